//! Canonical heights and small / grand orbit level sets.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::ball::up;
use crate::arith::factor::{factor, IrrationalFactor};
use crate::arith::primes::factor_big;
use crate::arith::{Ball, CBall, Poly, Rat};
use crate::curves::PlaneCurve;
use crate::dynamics::{Place, PolyDS};
use crate::error::{Error, Result};
use crate::green::green_eval;
use crate::nonarch::PadicScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeightMethod {
    /// Sum of local limits `lim log⁺|f^n(α)|_v / d^n` over the finitely many relevant places.
    Limit,
    ExactPowerMap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightValue {
    pub value: Ball,
    pub method: HeightMethod,
    pub local: Vec<(Place, Ball)>,
}

/// Local canonical height at `p`.
pub fn local_height_p(ds: &PolyDS, alpha: &Rat, p: u64, tol: f64) -> Ball {
    let pb = BigInt::from(p);
    let lnp = (p as f64).ln();
    let e = ds.bad_exponent(&pb);
    if e == 0 {
        let v = alpha.valuation(&pb).unwrap_or(0);
        return Ball::new((-v).max(0) as f64 * lnp, up((-v).max(0) as f64 * lnp * f64::EPSILON));
    }
    let d = ds.degree();
    let steps = (((e as f64 * lnp) / tol).ln() / (d as f64).ln()).ceil().max(0.0) as u32 + 1;
    let prec = 64 + steps * (e as u32 * (d as u32 + 1) + 2);
    let coeffs: Vec<PadicScalar> = ds
        .poly()
        .coeffs()
        .iter()
        .map(|c| PadicScalar::from_rat(c, p, prec).expect("prime checked"))
        .collect();
    let mut x = PadicScalar::from_rat(alpha, p, prec).expect("prime checked");
    let mut scale = 1.0;
    let mut best = f64::INFINITY;
    for _ in 0..=steps {
        match x.valuation() {
            Some(v) if -v > e => {
                let val = (-v) as f64 * lnp * scale;
                return Ball::new(val, up(val * 4.0 * f64::EPSILON));
            }
            Some(_) => best = best.min(e as f64 * lnp * scale),
            None => {
                // |x| ≤ p^{-val}: λ ≤ max(-val, e) log p / d^n
                let k = (-x.val).max(e) as f64;
                best = best.min(k * lnp * scale);
            }
        }
        if best <= tol {
            break;
        }
        let mut acc = PadicScalar::exact_zero(p);
        for c in coeffs.iter().rev() {
            acc = acc.mul(&x).add(c);
        }
        x = acc;
        scale /= d as f64;
    }
    Ball::from_bounds(0.0, up(best))
}

fn relevant_primes(ds: &PolyDS, alpha: &Rat) -> Vec<u64> {
    let mut s: BTreeSet<BigInt> = ds.bad_primes().into_iter().collect();
    if let Some(f) = factor_big(alpha.denom()) {
        s.extend(f.into_iter().map(|(p, _)| p));
    }
    s.into_iter().filter_map(|p| p.to_u64()).collect()
}

/// `ĥ_f(α)` enclosed in a ball of radius at most `tol`.
pub fn canonical_height(ds: &PolyDS, alpha: &Rat, tol: f64) -> Result<HeightValue> {
    if tol <= 0.0 {
        return Err(Error::domain("tolerance must be positive"));
    }
    if factor_big(alpha.denom()).is_none() {
        return Err(Error::resource("denominator too large to factor"));
    }
    let d = ds.degree();
    if ds.poly() == &Poly::monomial(Rat::one(), d) {
        let h = alpha.height();
        return Ok(HeightValue {
            value: Ball::new(h, up(h * 4.0 * f64::EPSILON)),
            method: HeightMethod::ExactPowerMap,
            local: vec![],
        });
    }
    let primes = relevant_primes(ds, alpha);
    let share = tol / (2.0 * (primes.len().max(1)) as f64);
    let mut local = vec![];
    let g = green_eval(ds, CBall::from_rat(alpha), tol / 2.0);
    let mut total = g.value;
    local.push((Place::Archimedean, g.value));
    for p in primes {
        let b = local_height_p(ds, alpha, p, share);
        total = total + b;
        local.push((Place::Prime(BigInt::from(p)), b));
    }
    let value = if total.lower() < 0.0 { Ball::from_bounds(0.0, total.upper()) } else { total };
    Ok(HeightValue { value, method: HeightMethod::Limit, local })
}

/// Default bound on `d^n` for level sets.
pub const DEFAULT_LEVEL_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitLevelSet {
    pub level: usize,
    /// Level of `α` on the right-hand side.
    pub m: usize,
    pub target: Rat,
    /// `f^n(X) - f^m(α)`.
    pub defining: Poly,
    pub rational: Vec<(Rat, usize)>,
    pub factors: Vec<IrrationalFactor>,
}

impl OrbitLevelSet {
    /// Number of roots with multiplicity.
    pub fn size(&self) -> usize {
        self.rational.iter().map(|(_, m)| m).sum::<usize>()
            + self.factors.iter().map(|f| f.multiplicity * f.poly.deg()).sum::<usize>()
    }

    pub fn rational_roots(&self) -> Vec<Rat> {
        self.rational.iter().map(|(q, _)| q.clone()).collect()
    }

    /// All roots as balls, one per distinct root.
    pub fn root_balls(&self) -> Vec<CBall> {
        let mut v: Vec<CBall> = self.rational.iter().map(|(q, _)| CBall::from_rat(q)).collect();
        for f in &self.factors {
            v.extend(f.roots.iter().copied());
        }
        v
    }

    /// Every root satisfies the defining equation: exactly for rationals, by ball evaluation otherwise.
    pub fn verify(&self) -> bool {
        let rat_ok = self.rational.iter().all(|(q, _)| self.defining.eval(q).is_zero());
        let ball_ok = self.factors.iter().all(|f| {
            f.roots.iter().all(|z| {
                self.defining.eval_ball(*z).contains_zero() && f.poly.eval_ball(*z).contains_zero()
            })
        });
        rat_ok && ball_ok
    }
}

fn check_cap(ds: &PolyDS, n: usize, cap: usize) -> Result<()> {
    let d = ds.degree();
    let ok = (d as u128).checked_pow(n as u32).is_some_and(|x| x <= cap as u128);
    if !ok {
        return Err(Error::resource(format!("d^n = {d}^{n} exceeds the level cap {cap}")));
    }
    Ok(())
}

fn merge(rational: &mut BTreeMap<Rat, usize>, factors: &mut Vec<IrrationalFactor>, p: &Poly) -> Result<()> {
    let fac = factor(p)?;
    for (q, m) in fac.rational {
        *rational.entry(q).or_default() += m;
    }
    for f in fac.factors {
        if let Some(g) = factors.iter_mut().find(|g| g.poly == f.poly) {
            g.multiplicity += f.multiplicity;
        } else {
            factors.push(f);
        }
    }
    Ok(())
}

/// Roots of `f^n(X) = f^n(α)`.
pub fn small_orbit_level(ds: &PolyDS, alpha: &Rat, n: usize) -> Result<OrbitLevelSet> {
    small_orbit_level_capped(ds, alpha, n, DEFAULT_LEVEL_CAP)
}

pub fn small_orbit_level_capped(ds: &PolyDS, alpha: &Rat, n: usize, cap: usize) -> Result<OrbitLevelSet> {
    check_cap(ds, n, cap)?;
    let target = ds.orbit_point(alpha, n);
    let defining = &ds.iterate(n)? - &Poly::constant(target.clone());
    let mut rational = BTreeMap::new();
    let mut factors = vec![];
    // g_k = f^k(X) - f^k(α) is divisible by g_{k-1}; factor the quotients
    let mut prev = Poly::linear_root(alpha);
    *rational.entry(alpha.clone()).or_default() += 1;
    for k in 1..=n {
        let gk = &ds.iterate(k)? - &Poly::constant(ds.orbit_point(alpha, k));
        let q = gk.div_exact(&prev).expect("telescoping divisibility");
        if q.deg() > 0 {
            merge(&mut rational, &mut factors, &q)?;
        }
        prev = gk;
    }
    factors.sort_by_key(|a| (a.poly.deg(), a.poly.to_string()));
    Ok(OrbitLevelSet { level: n, m: n, target, defining, rational: rational.into_iter().collect(), factors })
}

/// Roots of `f^n(X) = f^m(α)`.
pub fn grand_orbit_points(ds: &PolyDS, alpha: &Rat, n: usize, m: usize) -> Result<OrbitLevelSet> {
    check_cap(ds, n, DEFAULT_LEVEL_CAP)?;
    let target = ds.orbit_point(alpha, m);
    let defining = &ds.iterate(n)? - &Poly::constant(target.clone());
    let mut rational = BTreeMap::new();
    let mut factors = vec![];
    merge(&mut rational, &mut factors, &defining)?;
    Ok(OrbitLevelSet { level: n, m, target, defining, rational: rational.into_iter().collect(), factors })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceRow {
    pub x: Rat,
    pub y: Rat,
    /// `deg_X P · h(x) - deg_Y P · h(y)`.
    pub difference: f64,
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub rows: Vec<BalanceRow>,
    /// Smallest `c` with `|difference| ≤ c · √(1 + min(h(x), h(y)))` on the sample.
    pub fitted_c: f64,
}

/// Height balance along a curve: `h(x)/deg x` against `h(y)/deg y` for rational points.
pub fn height_balance_check(curve: &PlaneCurve, points: &[(Rat, Rat)]) -> Result<BalanceReport> {
    let dx = curve.p.deg_x() as f64;
    let dy = curve.p.deg_y() as f64;
    let mut rows = vec![];
    let mut c: f64 = 0.0;
    for (x, y) in points {
        if !curve.p.eval(x, y).is_zero() {
            return Err(Error::domain(format!("point ({x}, {y}) is not on the curve")));
        }
        let (hx, hy) = (x.height(), y.height());
        let difference = dx * hx - dy * hy;
        let scale = (1.0 + hx.min(hy)).sqrt();
        c = c.max(difference.abs() / scale);
        rows.push(BalanceRow { x: x.clone(), y: y.clone(), difference, scale });
    }
    Ok(BalanceReport { rows, fitted_c: c })
}
