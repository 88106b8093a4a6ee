//! Laurent series over Q_p on annuli, with certified tails.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::scalar::{check_prime, PadicScalar};
use crate::arith::Rat;
use crate::error::{Error, Result};

/// A radius `r > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Radius {
    /// `r = p^s`.
    PPow(Rat),
    Rational(Rat),
}

impl Radius {
    pub fn one() -> Self {
        Radius::PPow(Rat::zero())
    }

    /// `r`, detected as a power of `p` when it is one.
    pub fn from_rat(r: &Rat, p: u64) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::domain("radius must be positive"));
        }
        let pb = num_bigint::BigInt::from(p);
        let v = r.valuation(&pb).unwrap();
        if (r / &Rat::from_int(pb).pow(v)).is_one() {
            Ok(Radius::PPow(Rat::from_int(v)))
        } else {
            Ok(Radius::Rational(r.clone()))
        }
    }

    /// `log_p r` when exact.
    pub fn log_p(&self) -> Option<Rat> {
        match self {
            Radius::PPow(s) => Some(s.clone()),
            Radius::Rational(_) => None,
        }
    }

    pub fn ln(&self, p: u64) -> f64 {
        match self {
            Radius::PPow(s) => s.to_f64() * (p as f64).ln(),
            Radius::Rational(r) => r.ln_abs(),
        }
    }
}

/// A positive real of the form `p^e` (exact exponent) or an exact rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mag {
    PPow(Rat),
    Exact(Rat),
}

impl Mag {
    pub fn ln(&self, p: u64) -> f64 {
        match self {
            Mag::PPow(e) => e.to_f64() * (p as f64).ln(),
            Mag::Exact(q) => q.ln_abs(),
        }
    }

    /// `log_p` of the value when exact.
    pub fn log_p(&self) -> Option<Rat> {
        match self {
            Mag::PPow(e) => Some(e.clone()),
            Mag::Exact(_) => None,
        }
    }

    pub fn to_f64(&self, p: u64) -> f64 {
        self.ln(p).exp()
    }

    fn cmp_same(&self, o: &Mag) -> Ordering {
        match (self, o) {
            (Mag::PPow(a), Mag::PPow(b)) => a.cmp(b),
            (Mag::Exact(a), Mag::Exact(b)) => a.cmp(b),
            _ => unreachable!("magnitudes of one kind per radius"),
        }
    }
}

/// `|a| r^n` for a nonzero coefficient of valuation `v`.
fn term_mag(p: u64, v: i64, n: i64, r: &Radius) -> Mag {
    match r {
        Radius::PPow(s) => Mag::PPow(Rat::from_int(-v) + s * &Rat::from_int(n)),
        Radius::Rational(q) => Mag::Exact(Rat::from_int(p as i64).pow(-v) * q.pow(n)),
    }
}

/// Omitted coefficients beyond a window edge satisfy `v(a_n) ≥ c + slope · dist`,
/// `dist ≥ 1` being the distance from the edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailBound {
    pub c: Rat,
    pub slope: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicSeries {
    pub p: u64,
    pub terms: BTreeMap<i64, PadicScalar>,
    pub n_min: i64,
    pub n_max: i64,
    /// `None`: no nonzero coefficient above `n_max`.
    pub upper_tail: Option<TailBound>,
    /// `None`: no nonzero coefficient below `n_min`.
    pub lower_tail: Option<TailBound>,
}

impl PadicSeries {
    /// A Laurent polynomial `Σ c_n z^n` with exact rational coefficients.
    pub fn from_rats(p: u64, low: i64, coeffs: &[Rat], prec: u32) -> Result<Self> {
        check_prime(p)?;
        let mut terms = BTreeMap::new();
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.insert(low + i as i64, PadicScalar::from_rat(c, p, prec)?);
            }
        }
        let n_max = low + coeffs.len() as i64 - 1;
        Ok(PadicSeries { p, terms, n_min: low, n_max: n_max.max(low), upper_tail: None, lower_tail: None })
    }

    pub fn from_ints(p: u64, low: i64, coeffs: &[i64]) -> Result<Self> {
        let c: Vec<Rat> = coeffs.iter().map(|&x| Rat::from_int(x)).collect();
        PadicSeries::from_rats(p, low, &c, 64)
    }

    pub fn from_terms(p: u64, terms: BTreeMap<i64, PadicScalar>, n_min: i64, n_max: i64) -> Self {
        PadicSeries { p, terms, n_min, n_max, upper_tail: None, lower_tail: None }
    }

    pub fn with_tails(mut self, lower: Option<TailBound>, upper: Option<TailBound>) -> Self {
        self.lower_tail = lower;
        self.upper_tail = upper;
        self
    }

    pub fn is_exact(&self) -> bool {
        self.upper_tail.is_none() && self.lower_tail.is_none()
    }

    pub fn coeff(&self, n: i64) -> Option<&PadicScalar> {
        self.terms.get(&n)
    }

    /// Known nonzero terms.
    pub fn nonzero(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().filter_map(|(n, a)| a.valuation().map(|v| (*n, v)))
    }

    /// Largest stored term on `|z| = r`, with its least index.
    fn stored_max(&self, r: &Radius) -> Option<(Mag, i64)> {
        let mut best: Option<(Mag, i64)> = None;
        for (n, v) in self.nonzero() {
            let m = term_mag(self.p, v, n, r);
            match &best {
                Some((b, _)) if m.cmp_same(b) != Ordering::Greater => {}
                _ => best = Some((m, n)),
            }
        }
        best
    }

    /// Check that no omitted or imprecise coefficient can change the maximum `bound`
    /// attained first at index `kappa`.
    fn certify(&self, r: &Radius, bound: &Mag, kappa: i64) -> Result<()> {
        let refuse = |what: &str| {
            Err(Error::Refused(format!(
                "window [{}, {}] not certified at this radius: {what}; widen the window",
                self.n_min, self.n_max
            )))
        };
        for (n, a) in &self.terms {
            if a.is_zero() && !a.is_exact_zero() {
                let m = term_mag(self.p, a.val, *n, r);
                let c = m.cmp_same(bound);
                if c == Ordering::Greater || (c == Ordering::Equal && *n < kappa) {
                    return refuse(&format!("coefficient {n} lacks precision"));
                }
            }
        }
        for (tail, dir) in [(&self.upper_tail, 1i64), (&self.lower_tail, -1i64)] {
            let Some(t) = tail else { continue };
            let s = match r {
                Radius::PPow(s) => s.clone(),
                Radius::Rational(_) => return refuse("tails need a radius that is a power of p"),
            };
            let edge = if dir > 0 { self.n_max } else { self.n_min };
            // log_p(|a_n| r^n) ≤ -(c + slope·k) + (edge + dir·k)·s, k ≥ 1
            let growth = &(&Rat::from_int(dir) * &s) - &t.slope;
            if !growth.is_negative() {
                return refuse("tail does not decay");
            }
            let first = -(&t.c + &t.slope) + Rat::from_int(edge + dir) * s.clone();
            let Mag::PPow(b) = bound else { unreachable!() };
            // omitted indices above the window cannot move κ; below it they would on a tie
            let reaches = if dir > 0 { first > *b } else { first >= *b };
            if reaches {
                return refuse("tail reaches the maximum");
            }
        }
        Ok(())
    }

    /// `|g|_r = sup_n |a_n| r^n`.
    pub fn sup_norm(&self, r: &Radius) -> Result<Mag> {
        Ok(self.norm_and_kappa(r)?.0)
    }

    /// `κ(g, r) = inf{n : |a_n| r^n = |g|_r}`.
    pub fn kappa(&self, r: &Radius) -> Result<i64> {
        Ok(self.norm_and_kappa(r)?.1)
    }

    pub fn norm_and_kappa(&self, r: &Radius) -> Result<(Mag, i64)> {
        let Some((m, k)) = self.stored_max(r) else {
            return Err(Error::domain("no known nonzero coefficient"));
        };
        self.certify(r, &m, k)?;
        Ok((m, k))
    }

    /// Largest index attaining `|g|_r`; the difference with `κ` counts zeros on `|z| = r`.
    pub fn kappa_max(&self, r: &Radius) -> Result<i64> {
        let (m, _) = self.norm_and_kappa(r)?;
        let top = self
            .nonzero()
            .filter(|(n, v)| term_mag(self.p, *v, *n, r).cmp_same(&m) == Ordering::Equal)
            .map(|(n, _)| n)
            .max()
            .expect("the maximum is attained");
        let refuse = |what: &str| Err(Error::Refused(format!("last maximal index not certified: {what}")));
        for (n, a) in &self.terms {
            if *n > top && a.is_zero() && !a.is_exact_zero() && term_mag(self.p, a.val, *n, r).cmp_same(&m) != Ordering::Less {
                return refuse(&format!("coefficient {n} lacks precision"));
            }
        }
        if let (Some(t), Mag::PPow(b)) = (&self.upper_tail, &m) {
            let Radius::PPow(s) = r else { return refuse("tails need a radius that is a power of p") };
            let first = -(&t.c + &t.slope) + Rat::from_int(self.n_max + 1) * s.clone();
            if first >= *b {
                return refuse("upper tail may tie the maximum");
            }
        }
        Ok(top)
    }

    fn exact_only(&self) -> Result<()> {
        if !self.is_exact() {
            return Err(Error::domain("operation needs a series without tails"));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.exact_only()?;
        o.exact_only()?;
        let mut terms = self.terms.clone();
        for (n, a) in &o.terms {
            let s = match terms.get(n) {
                Some(b) => b.add(a),
                None => a.clone(),
            };
            terms.insert(*n, s);
        }
        terms.retain(|_, a| !a.is_exact_zero());
        Ok(PadicSeries::from_terms(self.p, terms, self.n_min.min(o.n_min), self.n_max.max(o.n_max)))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.exact_only()?;
        o.exact_only()?;
        let mut terms: BTreeMap<i64, PadicScalar> = BTreeMap::new();
        for (n, a) in &self.terms {
            for (m, b) in &o.terms {
                let t = a.mul(b);
                let s = match terms.get(&(n + m)) {
                    Some(c) => c.add(&t),
                    None => t,
                };
                terms.insert(n + m, s);
            }
        }
        terms.retain(|_, a| !a.is_exact_zero());
        Ok(PadicSeries::from_terms(self.p, terms, self.n_min + o.n_min, self.n_max + o.n_max))
    }
}
