//! Böttcher coordinates: the Laurent series `Ψ` with `Ψ(X^d) = f(Ψ(X))` and its inverse `Φ`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::ball::up;
use crate::arith::{Ball, CBall, LaurentBlock, Poly, Rat};
use crate::dynamics::{detect_exceptional, escaping_critical_points, ExceptionalKind, PolyDS};
use crate::error::{Error, Result};
use crate::green::green_eval;

type Cache = RwLock<HashMap<String, Vec<Rat>>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `b_0, ..., b_order` with `Ψ(z) = z^{-1} Σ b_k z^k`.
fn psi_coeffs(f: &Poly, order: usize) -> Vec<Rat> {
    let key = f.to_string();
    if let Some(v) = cache().read().unwrap().get(&key) {
        if v.len() > order {
            return v[..=order].to_vec();
        }
    }
    let d = f.deg();
    let a = f.coeffs();
    let dr = Rat::from_int(d as i64);
    let mut b = vec![Rat::one()];
    // p[i][m] = [z^m] B^i
    let mut p: Vec<Vec<Rat>> = vec![vec![Rat::one()]; d + 1];
    for n in 1..=order {
        let mut partial = vec![Rat::zero(); d + 1];
        for i in 1..=d {
            // Σ_{0<k<n} b_k p[i-1][n-k] + p[i-1][n] with b_n = 0
            let mut s = if i == 1 { Rat::zero() } else { partial[i - 1].clone() };
            for k in 1..n {
                if b[k].is_zero() {
                    continue;
                }
                let q = &p[i - 1][n - k];
                if !q.is_zero() {
                    s += &b[k] * q;
                }
            }
            partial[i] = s;
        }
        let mut rhs = if n % d == 0 { b[n / d].clone() } else { Rat::zero() };
        rhs -= &partial[d];
        for i in 0..d {
            if n + i >= d && !a[i].is_zero() {
                let idx = n + i - d;
                rhs -= &a[i] * &p[i][idx];
            }
        }
        let bn = rhs / dr.clone();
        p[0].push(Rat::zero());
        for i in 1..=d {
            let v = &partial[i] + &(&bn * &Rat::from_int(i as i64));
            p[i].push(v);
        }
        b.push(bn);
    }
    let mut w = cache().write().unwrap();
    let e = w.entry(key).or_default();
    if e.len() < b.len() {
        *e = b.clone();
    }
    b
}

/// `Ψ` with coefficients at exponents `-1, ..., order - 1`; exponents `≥ order` unknown.
pub fn psi_series(ds: &PolyDS, order: usize) -> LaurentBlock {
    LaurentBlock::new(-1, psi_coeffs(ds.poly(), order), Some(order as i64))
}

/// `e_1, ..., e_{order+1}` with `Φ(X) = Σ e_n X^{-n}`, by Lagrange inversion.
fn phi_coeffs(b: &[Rat]) -> Vec<Rat> {
    // z = w B(z) so e_n = (1/n) [z^{n-1}] B^n
    let n_max = b.len();
    let bb = LaurentBlock::new(0, b.to_vec(), Some(n_max as i64));
    let mut out = Vec::with_capacity(n_max);
    let mut pw = LaurentBlock::monomial(Rat::one(), 0);
    for n in 1..=n_max {
        pw = pw.mul(&bb);
        let c = pw.coeff(n as i64 - 1).expect("within precision");
        out.push(c / Rat::from_int(n as i64));
    }
    out
}

/// `Φ` as a series in `w = 1/X`: coefficients at `w^1, ..., w^{order+1}`.
pub fn phi_series(ds: &PolyDS, order: usize) -> LaurentBlock {
    let e = phi_coeffs(&psi_coeffs(ds.poly(), order));
    LaurentBlock::new(1, e, Some(order as i64 + 2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoettcherPair {
    pub f: Poly,
    pub psi: LaurentBlock,
    /// In the variable `w = 1/X`.
    pub phi: LaurentBlock,
    pub order: usize,
}

impl BoettcherPair {
    pub fn new(ds: &PolyDS, order: usize) -> Self {
        let b = psi_coeffs(ds.poly(), order);
        let phi = LaurentBlock::new(1, phi_coeffs(&b), Some(order as i64 + 2));
        BoettcherPair { f: ds.poly().clone(), psi: LaurentBlock::new(-1, b, Some(order as i64)), phi, order }
    }

    /// `Ψ(z^d) - f(Ψ(z))` to the precision both sides are known.
    pub fn psi_residual(&self) -> Result<LaurentBlock> {
        let d = self.f.deg() as i64;
        let lhs = self.psi.compose_monomial(d)?;
        let mut rhs = LaurentBlock::zero();
        let mut pw = LaurentBlock::monomial(Rat::one(), 0);
        for (i, a) in self.f.coeffs().iter().enumerate() {
            if i > 0 {
                pw = pw.mul(&self.psi);
            }
            if !a.is_zero() {
                rhs = rhs.add(&pw.scale(a));
            }
        }
        Ok(lhs.sub(&rhs))
    }

    /// `Φ(f(X)) - Φ(X)^d` in `w = 1/X`.
    pub fn phi_residual(&self) -> Result<LaurentBlock> {
        let d = self.f.deg();
        let prec = self.phi.trunc().unwrap_or(self.order as i64 + 2) + d as i64;
        // 1/f(X) = w^d / F(w), F(w) = Σ a_i w^{d-i}
        let fw: Vec<Rat> = (0..=d).map(|k| self.f.coeff(d - k)).collect();
        let inv = LaurentBlock::exact(0, fw).inverse(prec as usize)?;
        let inner = inv.mul(&LaurentBlock::monomial(Rat::one(), d as i64));
        let lhs = self.phi.compose(&inner)?;
        let rhs = self.phi.pow(d as u32);
        Ok(lhs.sub(&rhs))
    }

    /// `Φ(Ψ(z)) - z`, via `w(z) = 1/Ψ(z)`.
    pub fn inversion_residual(&self) -> Result<LaurentBlock> {
        let w = self.psi.inverse(self.order + 1)?;
        Ok(self.phi.compose(&w)?.sub(&LaurentBlock::monomial(Rat::one(), 1)))
    }

    /// Truncated `Ψ(z)` with an estimated tail radius (not rigorous).
    pub fn psi_eval(&self, z: CBall) -> Option<CBall> {
        let b: Vec<Ball> = self.psi.coeffs().iter().map(Ball::from_rat).collect();
        let head = CBall::horner_complex(&b.iter().map(|x| CBall::real(*x)).collect::<Vec<_>>(), z);
        let tail = tail_estimate(self.psi.coeffs(), z.abs_upper());
        let v = head.div(&z)?;
        let extra = tail / z.abs_lower();
        Some(CBall::new(v.re, v.im, up(v.rad + extra)))
    }

    /// Truncated `Φ(X)` with an estimated tail radius (not rigorous).
    pub fn phi_eval(&self, x: CBall) -> Option<CBall> {
        let w = x.recip()?;
        let mut c = vec![CBall::zero()];
        c.extend(self.phi.coeffs().iter().map(CBall::from_rat));
        let head = CBall::horner_complex(&c, w);
        let tail = tail_estimate(&c_rats(&self.phi), w.abs_upper());
        Some(CBall::new(head.re, head.im, up(head.rad + tail)))
    }
}

fn c_rats(s: &LaurentBlock) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); s.low().max(0) as usize];
    v.extend(s.coeffs().iter().cloned());
    v
}

/// Geometric tail estimate from the last five coefficients, doubled.
pub fn tail_estimate(c: &[Rat], rho: f64) -> f64 {
    let n = c.len();
    if n == 0 {
        return 0.0;
    }
    let mut q: f64 = 0.0;
    for k in n.saturating_sub(5).max(1)..n {
        let a = c[k].to_f64().abs();
        if a > 0.0 {
            q = q.max(a.powf(1.0 / k as f64));
        }
    }
    if q == 0.0 {
        return 0.0;
    }
    let t = q * rho;
    if t >= 1.0 {
        return f64::INFINITY;
    }
    2.0 * t.powi(n as i32) / (1.0 - t)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchRadius {
    pub value: Ball,
    /// Some critical point could not be classified; the ball covers both outcomes.
    pub undecided: bool,
}

/// `R = min exp(-g_f(c))` over escaping critical points, `1` if none escape.
pub fn radius_archimedean(ds: &PolyDS, tol: f64) -> Result<ArchRadius> {
    if tol <= 0.0 {
        return Err(Error::domain("tolerance must be positive"));
    }
    let s = escaping_critical_points(ds, 500)?;
    let mut value = Ball::exact(1.0);
    let mut first = true;
    for c in &s.escaping {
        let g = green_eval(ds, c.point.ball, tol);
        let r = (-g.value).exp();
        let lo = r.lower().max(0.0);
        let hi = r.upper().min(1.0);
        if first {
            value = Ball::from_bounds(lo, hi);
            first = false;
        } else {
            value = Ball::from_bounds(value.lower().min(lo), value.upper().min(hi));
        }
    }
    let undecided = !s.undecided.is_empty();
    if undecided {
        value = value.hull(&Ball::exact(1.0));
    }
    Ok(ArchRadius { value, undecided })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonarchRadius {
    One,
    LeqOneUnknown,
    /// Bad reduction for an exceptional map: no bound claimed.
    Unknown,
}

/// `R_p`: `1` at primes of good reduction.
pub fn radius_nonarch(ds: &PolyDS, p: &BigInt) -> Result<NonarchRadius> {
    use num_traits::ToPrimitive;
    if !p.to_u64().is_some_and(crate::arith::primes::is_prime) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let coprime = !(BigInt::from(ds.degree()) % p).is_zero();
    if ds.has_good_reduction(p) && coprime {
        return Ok(NonarchRadius::One);
    }
    Ok(match detect_exceptional(ds).kind {
        ExceptionalKind::None => NonarchRadius::LeqOneUnknown,
        _ => NonarchRadius::Unknown,
    })
}

/// `Φ(z)^{-1}` compared with `(f^n(z))^{1/d^n}` on the principal branch.
pub fn bottcher_numeric(ds: &PolyDS, z: Complex64, n: usize) -> Complex64 {
    let mut w = z;
    let d = ds.degree() as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let f = ds.poly();
    // log φ(z) = log z + Σ d^{-k-1} log(f(w_k)/w_k^d)
    let mut scale = 1.0 / d;
    let lz = z.ln();
    let dd = ds.degree();
    for _ in 0..n {
        // f(w)/w^d = Σ a_i w^{i-d}, evaluated in 1/w to avoid overflow
        let u = w.inv();
        let mut ratio = Complex64::new(0.0, 0.0);
        for i in (0..=dd).rev() {
            ratio = ratio * u + Complex64::new(f.coeff(dd - i).to_f64(), 0.0);
        }
        acc += ratio.ln() * scale;
        scale /= d;
        w = ratio * w.powi(dd as i32);
        if !w.is_finite() {
            break;
        }
    }
    (lz + acc).exp()
}
