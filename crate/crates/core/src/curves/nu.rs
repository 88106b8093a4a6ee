//! The auxiliary series `ν(x) = N(ζ₁φx^{k₁}, ζ₂φx^{k₂})` with `N(x, y) = P(1/Ψ(x), 1/Ψ(y))`.

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::PlaneCurve;
use crate::arith::{Rat, BiPoly};
use crate::boettcher::psi_series;
use crate::dynamics::PolyDS;
use crate::error::{Error, Result};
use crate::nonarch::scalar::check_prime;
use crate::nonarch::{count_zeros_pj, PadicScalar, PadicSeries, PjLedger, Radius, TailBound};

/// Largest window accepted by `build_nu`.
pub const MAX_NU_WINDOW: usize = 256;

/// Roots of unity available in Z_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RootOfUnity {
    One,
    MinusOne,
    /// The Teichmüller lift of `residue mod p`.
    Teichmuller { residue: i64 },
}

impl RootOfUnity {
    pub fn to_padic(self, p: u64, prec: u32) -> Result<PadicScalar> {
        match self {
            RootOfUnity::One => Ok(PadicScalar::one(p, prec)),
            RootOfUnity::MinusOne => Ok(PadicScalar::one(p, prec).neg()),
            RootOfUnity::Teichmuller { residue } => PadicScalar::teichmuller(residue, p, prec),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuSeries {
    pub p: u64,
    pub phi: PadicScalar,
    pub zeta1: RootOfUnity,
    pub zeta2: RootOfUnity,
    pub k1: i64,
    pub k2: i64,
    pub window: usize,
    /// Coefficients `b_k` for `|k| ≤ window`, with tails `v(b_k) ≥ v(φ)|k| / max(|k₁|, |k₂|)`.
    pub series: PadicSeries,
    /// Absolute precision of coefficients whose defining sum is infinite.
    pub precision_cap: i64,
}

impl NuSeries {
    pub fn k_sup(&self) -> i64 {
        self.k1.abs().max(self.k2.abs())
    }

    pub fn phi_valuation(&self) -> i64 {
        self.phi.val
    }
}

/// `[x^0..=x^n] (1/Ψ)` for a monic `f`.
fn inverse_psi(ds: &PolyDS, n: usize) -> Vec<Rat> {
    let psi = psi_series(ds, n);
    let b: Vec<Rat> = (0..n).map(|k| psi.coeff(k as i64 - 1).expect("within the truncation")).collect();
    // 1/Ψ = x / B(x)
    let mut c = vec![Rat::one()];
    for m in 1..n {
        let mut s = Rat::zero();
        for k in 1..=m {
            if !b[k].is_zero() {
                s -= &b[k] * &c[m - k];
            }
        }
        c.push(s);
    }
    let mut u = vec![Rat::zero()];
    u.extend(c);
    u.truncate(n + 1);
    u
}

fn truncated_mul(a: &[Rat], b: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); n + 1];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().take(n + 1 - i.min(n + 1)) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// `a_{nm}` with `n + m ≤ w`.
fn n_coefficients(p: &BiPoly, u: &[Rat], w: usize) -> Vec<Vec<Rat>> {
    let top = p.deg_x().max(p.deg_y());
    let mut pows = vec![{
        let mut one = vec![Rat::zero(); w + 1];
        one[0] = Rat::one();
        one
    }];
    for i in 1..=top {
        pows.push(truncated_mul(&pows[i - 1], u, w));
    }
    let terms: Vec<((usize, usize), Rat)> = p.terms().map(|(k, c)| (*k, c.clone())).collect();
    (0..=w)
        .into_par_iter()
        .map(|n| {
            (0..=w - n)
                .map(|m| {
                    let mut s = Rat::zero();
                    for ((i, j), c) in &terms {
                        let (x, y) = (&pows[*i][n], &pows[*j][m]);
                        if !x.is_zero() && !y.is_zero() {
                            s += c * &(x * y);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Build `ν` on the window `|k| ≤ window`.
#[allow(clippy::too_many_arguments)]
pub fn build_nu(
    curve: &PlaneCurve,
    ds: &PolyDS,
    p: u64,
    phi: &PadicScalar,
    zeta1: RootOfUnity,
    zeta2: RootOfUnity,
    k1: i64,
    k2: i64,
    window: usize,
) -> Result<NuSeries> {
    check_prime(p)?;
    if !(k1 > 0 && k1 >= k2 && k1.gcd(&k2) == 1) {
        return Err(Error::domain("need k1 > 0, k1 >= k2 and gcd(k1, k2) = 1"));
    }
    if phi.p != p || phi.valuation().is_none_or(|v| v < 1) {
        return Err(Error::domain("phi must be a nonzero element of Q_p with |phi|_p < 1"));
    }
    let pb = BigInt::from(p);
    if !ds.has_good_reduction(&pb) || (ds.degree() as u64).is_multiple_of(p) {
        return Err(Error::domain(format!("p = {p} must be a prime of good reduction not dividing the degree")));
    }
    if window == 0 {
        return Err(Error::domain("window must be positive"));
    }
    if window > MAX_NU_WINDOW {
        return Err(Error::resource(format!(
            "window {window} exceeds {MAX_NU_WINDOW}; a window of w needs Psi to order w"
        )));
    }
    let w = window;
    let vphi = phi.val;
    let cap = vphi.saturating_mul(w as i64 + 1);
    let prec = u32::try_from(cap + 4).map_err(|_| Error::resource("precision too large"))?;
    let u = inverse_psi(ds, w);
    let a = n_coefficients(&curve.p, &u, w);
    for row in &a {
        for x in row {
            if !x.is_zero() && x.valuation(&pb).unwrap() < 0 {
                return Err(Error::domain("substituted coefficients are not p-integral"));
            }
        }
    }
    let z1 = zeta1.to_padic(p, prec)?.mul(phi);
    let z2 = zeta2.to_padic(p, prec)?.mul(phi);
    let mut pw1 = vec![PadicScalar::one(p, prec)];
    let mut pw2 = vec![PadicScalar::one(p, prec)];
    for n in 1..=w {
        pw1.push(pw1[n - 1].mul(&z1));
        pw2.push(pw2[n - 1].mul(&z2));
    }
    let separable = curve.p.terms().all(|((i, j), _)| *i == 0 || *j == 0);
    let wi = w as i64;
    let k_lo = if k2 < 0 { -wi } else { 0 };
    let coeffs: Vec<(i64, PadicScalar)> = (k_lo..=wi)
        .into_par_iter()
        .map(|k| -> Result<(i64, PadicScalar)> {
            let mut s = PadicScalar::exact_zero(p);
            for n in 0..=w {
                let rest = k - k1 * n as i64;
                let ms: Vec<usize> = if k2 == 0 {
                    if rest != 0 {
                        continue;
                    }
                    (0..=w - n).collect()
                } else {
                    if rest % k2 != 0 || rest / k2 < 0 {
                        continue;
                    }
                    let m = (rest / k2) as usize;
                    if n + m > w {
                        continue;
                    }
                    vec![m]
                };
                for m in ms {
                    let c = &a[n][m];
                    if c.is_zero() {
                        continue;
                    }
                    let t = PadicScalar::from_rat(c, p, prec)?.mul(&pw1[n]).mul(&pw2[m]);
                    s = s.add(&t);
                }
            }
            let complete = if separable { k2 != 0 || k != 0 } else { k2 > 0 };
            if !complete {
                s = if s.is_zero() {
                    PadicScalar::inexact_zero(p, s.val.min(cap))
                } else {
                    s.reduce_to(cap)
                };
            }
            Ok((k, s))
        })
        .collect::<Result<_>>()?;
    let terms = coeffs.into_iter().filter(|(_, s)| !s.is_exact_zero()).collect();
    let kk = k1.abs().max(k2.abs());
    let tail = TailBound { c: Rat::new(vphi * wi, kk), slope: Rat::new(vphi, kk) };
    let series = PadicSeries::from_terms(p, terms, k_lo, wi)
        .with_tails((k2 < 0).then(|| tail.clone()), Some(tail));
    Ok(NuSeries { p, phi: phi.clone(), zeta1, zeta2, k1, k2, window, series, precision_cap: cap })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaCheck {
    /// `-κ(ν, 1)`.
    pub lhs: Rat,
    /// `max(|k₁|, |k₂|) · log|ν|₁ / log|φ|`.
    pub rhs: Rat,
    pub holds: bool,
}

/// Estimates for `ν` on the unit circle; logarithms are in units of `log p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuLedger {
    pub p: u64,
    pub k_sup: i64,
    pub phi_valuation: i64,
    /// No coefficient in the window is known to be nonzero.
    pub possibly_zero: bool,
    /// `log_p |ν|₁`.
    pub log_norm: Option<Rat>,
    pub norm_at_most_one: Option<bool>,
    pub kappa: Option<i64>,
    pub kappa_max: Option<i64>,
    /// Zeros on `|x| = 1`, as `κ⁺(ν, 1) - κ(ν, 1)`.
    pub zero_count: Option<i64>,
    pub kappa_check: Option<KappaCheck>,
    /// Constant with `k_sup · log r ≥ -c1 · log|φ|` for the annulus `A[1, r)` where `ν` converges.
    pub c1: Rat,
    /// `-κ(ν,1) - log|ν|₁ / log r`.
    pub zero_bound_annulus: Option<Rat>,
    /// `2 c1 k_sup log|ν|₁ / log|φ|`.
    pub zero_bound: Option<Rat>,
    pub zero_bound_holds: Option<bool>,
    /// Poisson-Jensen ledgers on `A[r⁻¹, 1)` and `A[1, r)` with `r = p^{v(φ)/(2 k_sup)}`.
    pub inner: Option<PjLedger>,
    pub outer: Option<PjLedger>,
    pub notes: Vec<String>,
}

pub fn nu_estimates(nu: &NuSeries) -> NuLedger {
    let kk = nu.k_sup();
    let vphi = nu.phi_valuation();
    let c1 = Rat::one();
    let mut led = NuLedger {
        p: nu.p,
        k_sup: kk,
        phi_valuation: vphi,
        possibly_zero: false,
        log_norm: None,
        norm_at_most_one: None,
        kappa: None,
        kappa_max: None,
        zero_count: None,
        kappa_check: None,
        c1: c1.clone(),
        zero_bound_annulus: None,
        zero_bound: None,
        zero_bound_holds: None,
        inner: None,
        outer: None,
        notes: vec![],
    };
    let g = &nu.series;
    if g.nonzero().next().is_none() {
        led.possibly_zero = true;
        led.notes.push("no coefficient in the window is known to be nonzero".into());
        return led;
    }
    let one = Radius::one();
    match g.norm_and_kappa(&one) {
        Ok((m, k)) => {
            let ln = m.log_p().expect("p-power radius");
            led.norm_at_most_one = Some(!ln.is_positive());
            let v = -ln.clone();
            let rhs = Rat::new(kk, vphi) * v.clone();
            let lhs = Rat::from_int(-k);
            led.kappa_check = Some(KappaCheck { holds: lhs <= rhs, lhs: lhs.clone(), rhs: rhs.clone() });
            led.zero_bound_annulus = Some(&lhs + &rhs);
            let bound = Rat::from_int(2) * c1 * rhs;
            led.kappa = Some(k);
            led.log_norm = Some(ln);
            match g.kappa_max(&one) {
                Ok(top) => {
                    led.kappa_max = Some(top);
                    led.zero_count = Some(top - k);
                    led.zero_bound_holds = Some(Rat::from_int(top - k) <= bound);
                }
                Err(e) => led.notes.push(format!("zero count: {e}")),
            }
            led.zero_bound = Some(bound);
        }
        Err(e) => led.notes.push(format!("norm at 1: {e}")),
    }
    let s = Rat::new(vphi, 2 * kk);
    match count_zeros_pj(g, &Radius::PPow(-s.clone()), &one) {
        Ok(l) => led.inner = Some(l),
        Err(e) => led.notes.push(format!("inner annulus: {e}")),
    }
    match count_zeros_pj(g, &one, &Radius::PPow(s)) {
        Ok(l) => led.outer = Some(l),
        Err(e) => led.notes.push(format!("outer annulus: {e}")),
    }
    led
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::r;

    fn phi(p: u64, q: Rat) -> PadicScalar {
        PadicScalar::from_rat(&q, p, 200).unwrap()
    }

    fn same(a: &PadicScalar, b: &PadicScalar) -> bool {
        let ap = a.abs_prec().min(b.abs_prec());
        a.sub(b).is_zero() && a.sub(b).val >= ap.min(40)
    }

    #[test]
    fn power_map_is_substitution() {
        let ds = PolyDS::from_ints(&[0, 0, 1]).unwrap();
        let curve = PlaneCurve::from_int_terms(&[(2, 1, 1), (0, 1, -3), (1, 0, 2), (0, 0, 1)]).unwrap();
        let ph = phi(5, r(10, 3));
        let z1 = RootOfUnity::Teichmuller { residue: 2 };
        let z2 = RootOfUnity::MinusOne;
        let nu = build_nu(&curve, &ds, 5, &ph, z1, z2, 3, -2, 20).unwrap();
        let a1 = z1.to_padic(5, 200).unwrap().mul(&ph);
        let a2 = z2.to_padic(5, 200).unwrap().mul(&ph);
        let mut expect: std::collections::BTreeMap<i64, PadicScalar> = Default::default();
        for ((i, j), c) in curve.p.terms() {
            let t = PadicScalar::from_rat(c, 5, 200).unwrap().mul(&a1.pow(*i as u32)).mul(&a2.pow(*j as u32));
            let k = 3 * *i as i64 - 2 * *j as i64;
            let e = expect.entry(k).or_insert_with(|| PadicScalar::exact_zero(5));
            *e = e.add(&t);
        }
        for (k, e) in &expect {
            assert!(same(nu.series.coeff(*k).unwrap(), e), "k = {k}");
        }
        for (k, b) in &nu.series.terms {
            if !expect.contains_key(k) {
                assert!(b.is_zero(), "k = {k}");
            }
        }
    }

    #[test]
    fn two_term_example() {
        let ds = PolyDS::from_ints(&[0, 0, 1]).unwrap();
        let curve = PlaneCurve::from_int_terms(&[(1, 0, 1), (0, 1, -1)]).unwrap();
        let nu = build_nu(&curve, &ds, 3, &phi(3, r(3, 1)), RootOfUnity::One, RootOfUnity::One, 1, -1, 10).unwrap();
        let led = nu_estimates(&nu);
        assert_eq!(led.log_norm, Some(r(-1, 1)));
        assert_eq!(led.kappa, Some(-1));
        assert_eq!(led.kappa_max, Some(1));
        assert_eq!(led.zero_count, Some(2));
        let kc = led.kappa_check.unwrap();
        assert_eq!((kc.lhs, kc.rhs, kc.holds), (r(1, 1), r(1, 1), true));
        assert_eq!(led.zero_bound_holds, Some(true));
    }

    #[test]
    fn positive_exponents_trivial() {
        let ds = PolyDS::from_ints(&[-1, 0, 1]).unwrap();
        let curve = PlaneCurve::from_int_terms(&[(2, 0, 1), (0, 1, -1), (1, 1, 1), (0, 0, 2)]).unwrap();
        let nu = build_nu(&curve, &ds, 3, &phi(3, r(3, 1)), RootOfUnity::One, RootOfUnity::MinusOne, 2, 1, 30).unwrap();
        assert!(nu.series.lower_tail.is_none());
        let led = nu_estimates(&nu);
        assert!(led.kappa.unwrap() >= 0);
        assert!(led.kappa_check.unwrap().holds);
        assert_eq!(led.norm_at_most_one, Some(true));
    }

    #[test]
    fn conic_over_q3_is_self_consistent() {
        let ds = PolyDS::from_ints(&[-1, 0, 1]).unwrap();
        let curve = PlaneCurve::from_int_terms(&[(2, 0, 1), (0, 2, 1), (1, 1, 1), (0, 0, -3)]).unwrap();
        let nu = build_nu(&curve, &ds, 3, &phi(3, r(3, 2)), RootOfUnity::One, RootOfUnity::One, 2, -1, 40).unwrap();
        let led = nu_estimates(&nu);
        assert!(led.kappa_check.as_ref().unwrap().holds);
        assert_eq!(led.norm_at_most_one, Some(true));
        let inner = led.inner.as_ref().unwrap();
        assert_eq!(inner.residual(), Some(Rat::zero()));
        let outer = led.outer.as_ref().unwrap();
        assert_eq!(outer.residual(), Some(Rat::zero()));
    }

    #[test]
    fn preconditions() {
        let ds = PolyDS::from_ints(&[-1, 0, 1]).unwrap();
        let c = PlaneCurve::from_int_terms(&[(1, 0, 1), (0, 1, -1)]).unwrap();
        let one = RootOfUnity::One;
        let ph = phi(3, r(3, 1));
        assert!(build_nu(&c, &ds, 3, &ph, one, one, 1, 1, 10).is_ok());
        assert!(build_nu(&c, &ds, 3, &ph, one, one, 2, 4, 10).is_err());
        assert!(build_nu(&c, &ds, 3, &ph, one, one, 2, -2, 10).is_err());
        assert!(build_nu(&c, &ds, 3, &phi(3, r(1, 1)), one, one, 1, -1, 10).is_err());
        assert!(build_nu(&c, &ds, 2, &phi(2, r(2, 1)), one, one, 1, -1, 10).is_err());
        assert!(build_nu(&c, &ds, 3, &ph, one, one, 1, -1, MAX_NU_WINDOW + 1).is_err());
    }
}
