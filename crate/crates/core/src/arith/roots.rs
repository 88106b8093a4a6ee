//! Certified complex root isolation.
//!
//! Approximations come from Aberth iteration in f64. Each approximation `z_i`
//! gets the disk of radius `n |p(z_i)| / |lc · Π_{j≠i}(z_i - z_j)|`; when these
//! disks are pairwise disjoint each holds exactly one root.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::ball::{up, Ball, CBall};
use super::poly::Poly;
use super::rat::Rat;
use crate::error::{Error, Result};

const U: f64 = f64::EPSILON;

/// An isolating disk with its reality verdict when the polynomial is real.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootDisk {
    pub ball: CBall,
    /// `Some(true)`: the root is real; `Some(false)`: certainly not real.
    pub real: Option<bool>,
}

fn horner_c(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Aberth iteration for a monic polynomial given by f64 coefficients.
pub fn aberth(c: &[Complex64], max_iter: usize) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n == 0 {
        return vec![];
    }
    // Fujiwara bound
    let mut bound: f64 = 0.0;
    for k in 1..=n {
        let a = c[n - k].norm();
        let t = if k == n { (a / 2.0).powf(1.0 / k as f64) } else { a.powf(1.0 / k as f64) };
        bound = bound.max(t);
    }
    let r0 = (2.0 * bound).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0 * 0.7, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut settled = vec![false; n];
    for _ in 0..max_iter {
        let mut all = true;
        for i in 0..n {
            if settled[i] {
                continue;
            }
            let (p, dp) = horner_c(c, z[i]);
            if p.norm() == 0.0 {
                settled[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += Complex64::new(1.0, 0.0) / (z[i] - z[j]);
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * U * z[i].norm().max(1e-300) {
                settled[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    z
}

fn dyadic(x: f64) -> Rat {
    Rat::from_f64(x).unwrap_or_else(Rat::zero)
}

/// Upper bound on `|a + ib|` for exact rationals.
fn abs_upper(a: &Rat, b: &Rat) -> f64 {
    let x = Ball::from_rat(a);
    let y = Ball::from_rat(b);
    up(x.abs_upper().hypot(y.abs_upper()) * (1.0 + 2.0 * U))
}

/// Lower bound on `|Π_{j≠i}(z_i - z_j)|` in f64.
fn prod_lower(z: &[Complex64], i: usize) -> f64 {
    let n = z.len();
    let mut lp = 0.0f64;
    for j in 0..n {
        if j != i {
            let d = (z[i] - z[j]).norm();
            if d == 0.0 {
                return 0.0;
            }
            lp += d.ln();
        }
    }
    (lp - 8.0 * n as f64 * U).exp() * (1.0 - 8.0 * n as f64 * U)
}

/// Newton steps using exact residuals; lands within rounding of the nearest double.
fn polish_exact(p: &Poly, dp: &Poly, z: Complex64, steps: usize) -> Complex64 {
    let mut z = z;
    for _ in 0..steps {
        let (re, im) = (dyadic(z.re), dyadic(z.im));
        let (a, b) = p.eval_complex(&re, &im);
        if a.is_zero() && b.is_zero() {
            break;
        }
        let (c, d) = dp.eval_complex(&re, &im);
        let num = Complex64::new(a.to_f64(), b.to_f64());
        let den = Complex64::new(c.to_f64(), d.to_f64());
        if den.norm() == 0.0 || !num.re.is_finite() || !num.im.is_finite() {
            break;
        }
        let step = num / den;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= U * z.norm() {
            break;
        }
    }
    z
}

/// Isolate all roots of a squarefree rational polynomial of degree ≥ 1.
pub fn isolate(p: &Poly) -> Result<Vec<RootDisk>> {
    let n = p.degree().ok_or_else(|| Error::domain("zero polynomial has no isolated roots"))?;
    if n == 0 {
        return Ok(vec![]);
    }
    let m = p.monic();
    let dm = m.derivative();
    let c: Vec<Complex64> = m.coeffs().iter().map(|a| Complex64::new(a.to_f64(), 0.0)).collect();
    if c.iter().any(|x| !x.re.is_finite()) {
        return Err(Error::resource("coefficients outside f64 range"));
    }
    let mut z = aberth(&c, 2000);
    for zi in z.iter_mut() {
        *zi = polish_exact(&m, &dm, *zi, 4);
        if zi.im.abs() <= 64.0 * U * zi.norm() {
            zi.im = 0.0;
        }
    }
    let radii: Vec<f64> = (0..n)
        .map(|i| {
            let (re, im) = (dyadic(z[i].re), dyadic(z[i].im));
            let (a, b) = m.eval_complex(&re, &im);
            let num = abs_upper(&a, &b);
            let den = prod_lower(&z, i);
            if den <= 0.0 {
                f64::INFINITY
            } else {
                up(n as f64 * num / den)
            }
        })
        .collect();
    let disks: Vec<CBall> = (0..n).map(|i| CBall::new(z[i].re, z[i].im, radii[i])).collect();
    for i in 0..n {
        if !radii[i].is_finite() {
            return Err(Error::Undecided("root approximations coincide".into()));
        }
        for j in i + 1..n {
            if disks[i].overlaps(&disks[j]) {
                return Err(Error::Undecided(format!("root disks {i} and {j} overlap")));
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = disks[i];
        let real = if d.im.abs() > d.rad {
            Some(false)
        } else {
            let cj = d.conj();
            let alone = (0..n).all(|j| j == i || !cj.overlaps(&disks[j]));
            alone.then_some(true)
        };
        let ball = if real == Some(true) { CBall::new(d.re, 0.0, d.rad) } else { d };
        out.push(RootDisk { ball, real });
    }
    sort_roots(&mut out);
    Ok(out)
}

/// Deterministic order: by argument, then real part.
pub fn sort_roots(v: &mut [RootDisk]) {
    v.sort_by(|a, b| {
        let ka = (a.ball.im.atan2(a.ball.re), a.ball.re);
        let kb = (b.ball.im.atan2(b.ball.re), b.ball.re);
        ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// Roots of a monic polynomial with ball coefficients (leading coefficient exactly 1).
/// `eval` supplies an accurate evaluator of `(p, p')` for the approximation stage.
pub fn isolate_ball_coeffs<F>(coeffs: &[CBall], eval: Option<F>) -> Result<Vec<CBall>>
where
    F: Fn(Complex64) -> (Complex64, Complex64),
{
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    if lead.re != 1.0 || lead.im != 0.0 || lead.rad != 0.0 {
        return Err(Error::domain("ball root isolation expects a monic polynomial"));
    }
    let c: Vec<Complex64> = coeffs.iter().map(|b| b.mid()).collect();
    let mut z = aberth(&c, 2000);
    if let Some(ev) = &eval {
        for zi in z.iter_mut() {
            for _ in 0..6 {
                let (p, dp) = ev(*zi);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                if !step.re.is_finite() || !step.im.is_finite() {
                    break;
                }
                *zi -= step;
                if step.norm() <= U * zi.norm() {
                    break;
                }
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let val = CBall::horner_complex(coeffs, CBall::exact(z[i]));
        let den = prod_lower(&z, i);
        if den <= 0.0 {
            return Err(Error::Undecided("root approximations coincide".into()));
        }
        out.push(CBall::new(z[i].re, z[i].im, up(n as f64 * val.abs_upper() / den)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if out[i].overlaps(&out[j]) {
                return Err(Error::Undecided(format!("root disks {i} and {j} overlap")));
            }
        }
    }
    Ok(out)
}

fn sign_at(p: &Poly, x: &Rat) -> i32 {
    p.eval(x).signum()
}

/// Rational endpoints enclosing the real part of a real-root disk.
fn real_interval(d: &CBall) -> (Rat, Rat) {
    let lo = d.re - up(d.rad + d.re.abs() * U);
    let hi = d.re + up(d.rad + d.re.abs() * U);
    (dyadic(lo), dyadic(hi))
}

/// Exact rational root inside a certified real root disk, if there is one.
///
/// `p` must be squarefree with integer-clearing leading coefficient `lc`.
pub fn rational_root_in(p: &Poly, disk: &CBall, lc: &BigInt) -> Option<Rat> {
    let (mut a, mut b) = real_interval(disk);
    let sa = sign_at(p, &a);
    if sa == 0 {
        return Some(a);
    }
    let sb = sign_at(p, &b);
    if sb == 0 {
        return Some(b);
    }
    if sa == sb {
        return None;
    }
    let l = Rat::from_int(lc.clone());
    let one = Rat::one();
    let half = Rat::new(1, 2);
    while (&b - &a) * &l >= one {
        let mid = (&a + &b) * &half;
        let s = sign_at(p, &mid);
        if s == 0 {
            return Some(mid);
        }
        if s == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    let k = (&a * &l).ceil();
    let cand = Rat::new(k, lc.clone());
    if cand >= a && cand <= b && p.eval(&cand).is_zero() {
        Some(cand)
    } else {
        None
    }
}

/// Rational roots of a squarefree polynomial together with the isolating disks of all roots.
pub fn rational_roots(p: &Poly) -> Result<(Vec<Rat>, Vec<RootDisk>)> {
    if p.deg() == 0 {
        return Ok((vec![], vec![]));
    }
    let disks = isolate(p)?;
    let (ints, _) = p.to_primitive_integer();
    let lc = ints.last().unwrap().abs();
    let mut out = vec![];
    for d in &disks {
        if d.real == Some(true) {
            if let Some(q) = rational_root_in(p, &d.ball, &lc) {
                out.push(q);
            }
        }
    }
    out.sort();
    Ok((out, disks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::r;

    #[test]
    fn isolates_simple_roots() {
        // (x^2 - 2)(x^2 + 1)(x - 1/3)
        let f = &(&Poly::from_ints(&[-2, 0, 1]) * &Poly::from_ints(&[1, 0, 1])) * &Poly::new(vec![r(-1, 3), r(1, 1)]);
        let roots = isolate(&f).unwrap();
        assert_eq!(roots.len(), 5);
        let reals: Vec<_> = roots.iter().filter(|d| d.real == Some(true)).collect();
        assert_eq!(reals.len(), 3);
        assert!(reals.iter().any(|d| d.ball.contains(Complex64::new(2f64.sqrt(), 0.0))));
        for d in &roots {
            assert!(d.ball.rad < 1e-10);
        }
    }

    #[test]
    fn finds_rational_roots() {
        let f = &Poly::from_ints(&[-17, 0, 9]) * &Poly::from_ints(&[-1, 0, 9]);
        let (q, _) = rational_roots(&f).unwrap();
        assert_eq!(q, vec![r(-1, 3), r(1, 3)]);
    }

    #[test]
    fn large_denominator_roots() {
        let a = Rat::new(BigInt::from(3).pow(40) + 1u32, BigInt::from(3).pow(40));
        let f = &Poly::linear_root(&a) * &Poly::from_ints(&[1, 1, 1]);
        let (q, disks) = rational_roots(&f).unwrap();
        assert_eq!(q, vec![a]);
        assert_eq!(disks.len(), 3);
    }

    #[test]
    fn ball_coefficients() {
        let c = vec![CBall::new(-2.0, 0.0, 0.0), CBall::zero(), CBall::one()];
        let roots = isolate_ball_coeffs::<fn(Complex64) -> (Complex64, Complex64)>(&c, None).unwrap();
        assert!(roots.iter().any(|b| b.contains(Complex64::new(2f64.sqrt(), 0.0))));
        assert!(roots.iter().any(|b| b.contains(Complex64::new(-(2f64.sqrt()), 0.0))));
    }
}
