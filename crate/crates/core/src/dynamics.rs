//! Polynomial dynamical systems over Q.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::factor::factor;
use crate::arith::poly::DEFAULT_MAX_DEGREE;
use crate::arith::primes::factor_big;
use crate::arith::{Ball, CBall, Poly, Rat};
use crate::error::{Error, Result};

/// A monic polynomial map of degree at least 2.
pub struct PolyDS {
    f: Poly,
    d: usize,
    max_degree: usize,
    iterates: RwLock<Vec<Poly>>,
}

impl Clone for PolyDS {
    fn clone(&self) -> Self {
        PolyDS {
            f: self.f.clone(),
            d: self.d,
            max_degree: self.max_degree,
            iterates: RwLock::new(self.iterates.read().unwrap().clone()),
        }
    }
}

impl fmt::Debug for PolyDS {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyDS({})", self.f)
    }
}

impl PartialEq for PolyDS {
    fn eq(&self, o: &Self) -> bool {
        self.f == o.f
    }
}

impl PolyDS {
    pub fn new(f: Poly) -> Result<Self> {
        let d = f.deg();
        if d < 2 {
            return Err(Error::domain("dynamical system needs degree at least 2"));
        }
        if !f.is_monic() {
            return Err(Error::domain("polynomial must be monic; use normalize_monic"));
        }
        Ok(PolyDS { f, d, max_degree: DEFAULT_MAX_DEGREE, iterates: RwLock::new(vec![Poly::x()]) })
    }

    pub fn from_ints(c: &[i64]) -> Result<Self> {
        PolyDS::new(Poly::from_ints(c))
    }

    pub fn with_max_degree(mut self, m: usize) -> Self {
        self.max_degree = m;
        self
    }

    pub fn poly(&self) -> &Poly {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `f^{∘n}`, memoised.
    pub fn iterate(&self, n: usize) -> Result<Poly> {
        if let Some(p) = self.iterates.read().unwrap().get(n) {
            return Ok(p.clone());
        }
        let mut w = self.iterates.write().unwrap();
        while w.len() <= n {
            let next = self.f.compose_checked(w.last().unwrap(), self.max_degree)?;
            w.push(next);
        }
        Ok(w[n].clone())
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.f.eval(x)
    }

    pub fn eval_ball(&self, z: CBall) -> CBall {
        self.f.eval_ball(z)
    }

    /// `f^{∘n}(x)` exactly.
    pub fn orbit_point(&self, x: &Rat, n: usize) -> Rat {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.eval(&y);
        }
        y
    }

    /// `Σ_{i<d} |a_i|`.
    pub fn coeff_abs_sum(&self) -> Rat {
        self.f.coeffs()[..self.d].iter().map(|c| c.abs()).sum()
    }

    /// Any `|z| > R_esc` escapes: `R_esc = 1 + Σ_{i<d} |a_i|`.
    pub fn escape_radius(&self) -> Rat {
        Rat::one() + self.coeff_abs_sum()
    }

    /// Primes dividing some coefficient denominator.
    pub fn bad_primes(&self) -> Vec<BigInt> {
        let mut s = BTreeSet::new();
        for c in self.f.coeffs() {
            if let Some(f) = factor_big(c.denom()) {
                for (p, _) in f {
                    s.insert(p);
                }
            }
        }
        s.into_iter().collect()
    }

    pub fn has_good_reduction(&self, p: &BigInt) -> bool {
        self.f.coeffs().iter().all(|c| (c.denom() % p).is_positive())
    }

    /// `log M_p` in units of `log p`, where `M_p = max(1, max |a_i|_p)`.
    pub fn bad_exponent(&self, p: &BigInt) -> i64 {
        self.f.coeffs().iter().filter_map(|c| c.valuation(p)).map(|v| -v).max().unwrap_or(0).max(0)
    }

    /// Constant `c_f` with `|h(x) - ĥ_f(x)| ≤ c_f` for all rational `x`.
    pub fn height_constant(&self) -> f64 {
        let s = self.coeff_abs_sum().to_f64();
        let d = self.d as f64;
        let arch = (1.0 + s).ln().max(2f64.ln()).max(d * (2.0 * s).ln().max(0.0));
        let fin: f64 = self
            .bad_primes()
            .iter()
            .map(|p| self.bad_exponent(p) as f64 * p.to_f64().unwrap().ln())
            .sum();
        // slack for float evaluation of the logs
        (arch + d * fin) / (d - 1.0) * (1.0 + 1e-12) + 1e-12
    }
}

/// How `L(x) = c x` was realised.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scaling {
    Rational { c: Rat },
    /// `c` is the real root of `c^{d-1} = value`, irrational.
    Irrational { value: Rat, root_index: usize, c: CBall },
}

/// Record of the conjugacy `L ∘ g ∘ L^{-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conjugacy {
    pub scaling: Scaling,
}

impl Conjugacy {
    pub fn identity() -> Self {
        Conjugacy { scaling: Scaling::Rational { c: Rat::one() } }
    }
}

/// Exact `k`-th root of a rational, if it exists in Q.
pub fn rational_root(a: &Rat, k: u32) -> Option<Rat> {
    if k == 1 {
        return Some(a.clone());
    }
    if a.is_negative() && k.is_multiple_of(2) {
        return None;
    }
    let n = a.numer().abs();
    let d = a.denom().clone();
    let rn = n.nth_root(k);
    let rd = d.nth_root(k);
    if num_traits::pow(rn.clone(), k as usize) != n || num_traits::pow(rd.clone(), k as usize) != d {
        return None;
    }
    let r = Rat::new(rn, rd);
    Some(if a.is_negative() { -r } else { r })
}

/// Conjugate `g` to a monic polynomial by `L(x) = c x` with `c^{d-1} = lc(g)`.
pub fn normalize_monic(g: &Poly) -> Result<(PolyDS, Conjugacy)> {
    let d = g.deg();
    if d < 2 {
        return Err(Error::domain("degree must be at least 2"));
    }
    let a = g.leading();
    let k = (d - 1) as u32;
    if let Some(c) = rational_root(&a, k) {
        // L g L^{-1}(x) = c g(x/c) = Σ a_i c^{1-i} x^i
        let coeffs = g.coeffs().iter().enumerate().map(|(i, ai)| ai * &c.pow(1 - i as i64)).collect();
        let ds = PolyDS::new(Poly::new(coeffs))?;
        return Ok((ds, Conjugacy { scaling: Scaling::Rational { c } }));
    }
    if a.is_negative() && k.is_multiple_of(2) {
        return Err(Error::domain("monic conjugate needs a non-real scaling"));
    }
    // c^{1-i} = a^{(1-i)/(d-1)} must be rational whenever a_i ≠ 0
    let mut coeffs = vec![];
    for (i, ai) in g.coeffs().iter().enumerate() {
        if ai.is_zero() {
            coeffs.push(Rat::zero());
            continue;
        }
        let e = 1 - i as i64;
        let g0 = e.unsigned_abs().gcd(&(k as u64)) as u32;
        let m = k / g0.max(1);
        let eprime = e / g0.max(1) as i64;
        let base = rational_root(&a, m).ok_or_else(|| {
            Error::domain(format!("no rational monic conjugate by scaling: coefficient of X^{i} becomes irrational"))
        })?;
        coeffs.push(ai * &base.pow(eprime));
    }
    let ds = PolyDS::new(Poly::new(coeffs))?;
    let c = a.to_f64().abs().powf(1.0 / k as f64) * a.signum() as f64;
    let ball = CBall::real(Ball::new(c, c.abs() * 1e-14));
    Ok((ds, Conjugacy { scaling: Scaling::Irrational { value: a, root_index: k as usize, c: ball } }))
}

/// Monic Chebyshev polynomials `T̃_d(z + 1/z) = z^d + z^{-d}`.
pub fn chebyshev(d: usize) -> Poly {
    let mut a = Poly::from_ints(&[2]);
    let mut b = Poly::x();
    if d == 0 {
        return a;
    }
    for _ in 1..d {
        let c = &(&Poly::x() * &b) - &a;
        a = b;
        b = c;
    }
    b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExceptionalKind {
    PowerMap,
    Chebyshev,
    /// Conjugate to `T̃_d` only through `x ↦ i x`.
    NegChebyshev,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exceptional {
    pub kind: ExceptionalKind,
    /// The witnessing conjugacy is not defined over Q.
    pub over_extension: bool,
    /// Translation `t` with `f(x + t) - t` depressed.
    pub shift: Rat,
}

/// Exceptional test over Q̄ for a monic rational polynomial.
pub fn detect_exceptional(ds: &PolyDS) -> Exceptional {
    let f = ds.poly();
    let d = ds.degree();
    let t = -(f.coeff(d - 1) / Rat::from_int(d as i64));
    let h = &f.shift(&t) - &Poly::constant(t.clone());
    let kind;
    let mut over = false;
    if h == Poly::monomial(Rat::one(), d) {
        kind = ExceptionalKind::PowerMap;
    } else {
        let tc = chebyshev(d);
        if h == tc {
            kind = ExceptionalKind::Chebyshev;
        } else {
            // i·T̃_d(x/i): the coefficient of x^{d-2k} picks up (-1)^k
            let alt = Poly::new(
                tc.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(j, c)| if ((d - j) / 2) % 2 == 1 { -c } else { c.clone() })
                    .collect(),
            );
            if (d - 1).is_multiple_of(4) && h == alt {
                kind = ExceptionalKind::NegChebyshev;
                over = true;
            } else {
                kind = ExceptionalKind::None;
            }
        }
    }
    Exceptional { kind, over_extension: over, shift: t }
}

/// A place of Q.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Place {
    Prime(#[serde(with = "crate::arith::rat::bigint_str")] BigInt),
    Archimedean,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "p={p}"),
            Place::Archimedean => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaceReport {
    pub place: Place,
    pub good_reduction: bool,
    pub coprime_to_d: bool,
    pub escape_iterate: Option<usize>,
}

impl PlaceReport {
    fn new(ds: &PolyDS, place: Place, escape_iterate: Option<usize>) -> Self {
        let (good, coprime) = match &place {
            Place::Prime(p) => (ds.has_good_reduction(p), !(BigInt::from(ds.degree()) % p).is_zero()),
            Place::Archimedean => (false, false),
        };
        PlaceReport { place, good_reduction: good, coprime_to_d: coprime, escape_iterate }
    }

    /// Finite, of good reduction and coprime to `d`.
    pub fn qualifies(&self) -> bool {
        matches!(self.place, Place::Prime(_)) && self.good_reduction && self.coprime_to_d
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OrbitVerdict {
    Preperiodic { preperiod: usize, period: usize, cycle: Vec<Rat> },
    Wandering { place: PlaceReport },
}

/// Does `x` lie in the escape region at the given place?
pub fn in_escape_region(ds: &PolyDS, x: &Rat, place: &Place) -> bool {
    match place {
        Place::Archimedean => x.abs() > ds.escape_radius(),
        Place::Prime(p) => match x.valuation(p) {
            Some(v) => -v > ds.bad_exponent(p),
            None => false,
        },
    }
}

fn escaping_places(ds: &PolyDS, x: &Rat) -> Vec<Place> {
    let mut out = vec![];
    let mut primes: BTreeSet<BigInt> = ds.bad_primes().into_iter().collect();
    if let Some(f) = factor_big(x.denom()) {
        primes.extend(f.into_iter().map(|(p, _)| p));
    }
    for p in primes {
        let pl = Place::Prime(p);
        if in_escape_region(ds, x, &pl) {
            out.push(pl);
        }
    }
    if in_escape_region(ds, x, &Place::Archimedean) {
        out.push(Place::Archimedean);
    }
    out
}

/// Exact preperiodicity test for a rational point.
pub fn is_preperiodic(ds: &PolyDS, alpha: &Rat) -> Result<OrbitVerdict> {
    is_preperiodic_budget(ds, alpha, 10_000)
}

pub fn is_preperiodic_budget(ds: &PolyDS, alpha: &Rat, budget: usize) -> Result<OrbitVerdict> {
    let cutoff = ds.height_constant();
    let mut seen: HashMap<Rat, usize> = HashMap::new();
    let mut orbit: Vec<Rat> = vec![];
    let mut x = alpha.clone();
    let mut wandering = false;
    for n in 0..budget {
        if let Some(&i) = seen.get(&x) {
            return Ok(OrbitVerdict::Preperiodic { preperiod: i, period: n - i, cycle: orbit[i..].to_vec() });
        }
        let esc = escaping_places(ds, &x);
        if !esc.is_empty() {
            let reports: Vec<PlaceReport> = esc.into_iter().map(|p| PlaceReport::new(ds, p, Some(n))).collect();
            let best = reports
                .iter()
                .find(|r| r.qualifies())
                .or_else(|| reports.iter().find(|r| matches!(r.place, Place::Prime(_))))
                .unwrap_or(&reports[0])
                .clone();
            return Ok(OrbitVerdict::Wandering { place: best });
        }
        if x.height() > cutoff {
            // not preperiodic; keep iterating until a place certifies the escape
            wandering = true;
        }
        seen.insert(x.clone(), n);
        orbit.push(x.clone());
        x = ds.eval(&x);
    }
    Err(Error::Undecided(format!(
        "orbit budget exhausted{}",
        if wandering { " (height exceeds the preperiodic bound, escape place not located)" } else { "" }
    )))
}

/// A finite place of good reduction, coprime to `d`, where the orbit escapes; otherwise
/// the place that certifies escape (archimedean or bad).
pub fn find_place_of_good_reduction_escape(ds: &PolyDS, alpha: &Rat) -> Result<PlaceReport> {
    let witness = match is_preperiodic(ds, alpha)? {
        OrbitVerdict::Preperiodic { .. } => return Err(Error::domain("point is preperiodic")),
        OrbitVerdict::Wandering { place } => place,
    };
    // Under good reduction the unit ball is invariant, so escape at p happens iff p | den(α).
    if let Some(f) = factor_big(alpha.denom()) {
        for (p, _) in f {
            let r = PlaceReport::new(ds, Place::Prime(p), Some(0));
            if r.qualifies() {
                return Ok(r);
            }
        }
    }
    Ok(witness)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CritPoint {
    pub ball: CBall,
    pub exact: Option<Rat>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CritStatus {
    Escaping { iterate: usize },
    Bounded { preperiod: usize, period: usize },
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CritReport {
    pub point: CritPoint,
    pub status: CritStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalSummary {
    pub escaping: Vec<CritReport>,
    pub bounded: Vec<CritReport>,
    pub undecided: Vec<CritReport>,
    /// `Some(false)` once an escaping critical point is certified.
    pub julia_connected: Option<bool>,
}

/// Roots of `f'` with multiplicity.
pub fn critical_points(ds: &PolyDS) -> Result<Vec<CritPoint>> {
    let fac = factor(&ds.poly().derivative())?;
    let mut out = vec![];
    for (q, m) in fac.rational {
        out.push(CritPoint { ball: CBall::from_rat(&q), exact: Some(q), multiplicity: m });
    }
    for fct in fac.factors {
        for b in fct.roots {
            out.push(CritPoint { ball: b, exact: None, multiplicity: fct.multiplicity });
        }
    }
    Ok(out)
}

/// Ball orbit: `Some(n)` once `|f^n(z)| > r` is certified, `None` if undecided within `max_iter`.
pub fn ball_escape(ds: &PolyDS, z: CBall, max_iter: usize, r: f64) -> Option<usize> {
    let coeffs = ds.poly().ball_coeffs();
    let mut w = z;
    for n in 0..=max_iter {
        if w.abs_lower() > r {
            return Some(n);
        }
        if !w.is_finite() || w.rad > 4.0 * r {
            return None;
        }
        w = CBall::horner(&coeffs, w);
    }
    None
}

fn classify_crit(ds: &PolyDS, c: &CritPoint, max_iter: usize, r_esc: &Rat) -> CritStatus {
    let rf = Ball::from_rat(r_esc).upper();
    if let Some(q) = &c.exact {
        let mut seen: HashMap<Rat, usize> = HashMap::new();
        let mut x = q.clone();
        for n in 0..=max_iter {
            if let Some(&i) = seen.get(&x) {
                return CritStatus::Bounded { preperiod: i, period: n - i };
            }
            if &x.abs() > r_esc {
                return CritStatus::Escaping { iterate: n };
            }
            if x.numer().bits() + x.denom().bits() > 4096 {
                // heights too large for exact cycle search; finish with balls
                return match ball_escape(ds, CBall::from_rat(&x), max_iter - n, rf) {
                    Some(k) => CritStatus::Escaping { iterate: n + k },
                    None => CritStatus::Undecided,
                };
            }
            seen.insert(x.clone(), n);
            x = ds.eval(&x);
        }
        return CritStatus::Undecided;
    }
    match ball_escape(ds, c.ball, max_iter, rf) {
        Some(k) => CritStatus::Escaping { iterate: k },
        None => CritStatus::Undecided,
    }
}

/// Classify each critical point as escaping, bounded or undecided.
pub fn escaping_critical_points(ds: &PolyDS, max_iter: usize) -> Result<CriticalSummary> {
    if max_iter == 0 {
        return Err(Error::domain("max_iter must be at least 1"));
    }
    let r = ds.escape_radius();
    let mut s = CriticalSummary { escaping: vec![], bounded: vec![], undecided: vec![], julia_connected: None };
    for c in critical_points(ds)? {
        let status = classify_crit(ds, &c, max_iter, &r);
        let rep = CritReport { point: c, status: status.clone() };
        match status {
            CritStatus::Escaping { .. } => s.escaping.push(rep),
            CritStatus::Bounded { .. } => s.bounded.push(rep),
            CritStatus::Undecided => s.undecided.push(rep),
        }
    }
    s.julia_connected = if !s.escaping.is_empty() {
        Some(false)
    } else if s.undecided.is_empty() {
        Some(true)
    } else {
        None
    };
    Ok(s)
}
