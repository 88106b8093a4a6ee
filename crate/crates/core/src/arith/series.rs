//! Truncated Laurent series with exact rational coefficients.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::rat::Rat;
use crate::error::{Error, Result};

/// `Σ coeffs[i] x^{low+i}`; every exponent `≥ trunc` is unknown. `trunc = None` means exact.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LaurentBlock {
    low: i64,
    coeffs: Vec<Rat>,
    trunc: Option<i64>,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn add_opt(a: Option<i64>, k: i64) -> Option<i64> {
    a.map(|x| x + k)
}

impl LaurentBlock {
    /// Builds and normalises; coefficients at or above `trunc` are dropped.
    pub fn new(low: i64, coeffs: Vec<Rat>, trunc: Option<i64>) -> Self {
        let mut s = LaurentBlock { low, coeffs, trunc };
        s.normalise();
        s
    }

    pub fn exact(low: i64, coeffs: Vec<Rat>) -> Self {
        LaurentBlock::new(low, coeffs, None)
    }

    pub fn zero() -> Self {
        LaurentBlock::exact(0, vec![])
    }

    /// `c x^n`, exact.
    pub fn monomial(c: Rat, n: i64) -> Self {
        LaurentBlock::exact(n, vec![c])
    }

    pub fn from_poly(p: &Poly) -> Self {
        LaurentBlock::exact(0, p.coeffs().to_vec())
    }

    /// Zero known below `t`.
    pub fn big_o(t: i64) -> Self {
        LaurentBlock::new(t, vec![], Some(t))
    }

    fn normalise(&mut self) {
        if let Some(t) = self.trunc {
            let keep = (t - self.low).max(0) as usize;
            if self.coeffs.len() > keep {
                self.coeffs.truncate(keep);
            }
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.low += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.low = self.trunc.unwrap_or(0);
        }
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn trunc(&self) -> Option<i64> {
        self.trunc
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// No known nonzero coefficient.
    pub fn is_zero_known(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient, or where knowledge ends.
    /// `None` only for the exact zero series.
    pub fn order(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            self.trunc
        } else {
            Some(self.low)
        }
    }

    /// Highest stored exponent.
    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    /// Coefficient of `x^n`, `None` when unknown.
    pub fn coeff(&self, n: i64) -> Option<Rat> {
        if self.trunc.is_some_and(|t| n >= t) {
            return None;
        }
        if n < self.low || n > self.high() {
            return Some(Rat::zero());
        }
        Some(self.coeffs[(n - self.low) as usize].clone())
    }

    /// Coefficient assumed known; zero outside the stored range.
    fn c(&self, n: i64) -> Rat {
        if n < self.low || n > self.high() {
            Rat::zero()
        } else {
            self.coeffs[(n - self.low) as usize].clone()
        }
    }

    pub fn truncate(&self, t: i64) -> Self {
        LaurentBlock::new(self.low, self.coeffs.clone(), min_opt(self.trunc, Some(t)))
    }

    pub fn add(&self, o: &Self) -> Self {
        let trunc = min_opt(self.trunc, o.trunc);
        if self.coeffs.is_empty() && o.coeffs.is_empty() {
            return LaurentBlock::new(0, vec![], trunc);
        }
        let lo = match (self.coeffs.is_empty(), o.coeffs.is_empty()) {
            (true, _) => o.low,
            (_, true) => self.low,
            _ => self.low.min(o.low),
        };
        let hi = self.high().max(o.high()).max(lo);
        let v = (lo..=hi).map(|n| self.c(n) + o.c(n)).collect();
        LaurentBlock::new(lo, v, trunc)
    }

    pub fn neg(&self) -> Self {
        LaurentBlock { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect(), trunc: self.trunc }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        LaurentBlock::new(self.low, self.coeffs.iter().map(|a| a * c).collect(), self.trunc)
    }

    /// Product; the result is known below `min(ord a + trunc b, ord b + trunc a)`.
    pub fn mul(&self, o: &Self) -> Self {
        let (Some(oa), Some(ob)) = (self.order(), o.order()) else {
            return LaurentBlock::zero();
        };
        let trunc = min_opt(add_opt(o.trunc, oa), add_opt(self.trunc, ob));
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return LaurentBlock::new(0, vec![], trunc);
        }
        let lo = self.low + o.low;
        let mut hi = self.high() + o.high();
        if let Some(t) = trunc {
            hi = hi.min(t - 1);
        }
        if hi < lo {
            return LaurentBlock::new(lo, vec![], trunc);
        }
        let mut v = vec![Rat::zero(); (hi - lo + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= v.len() {
                    break;
                }
                if !b.is_zero() {
                    v[k] += a * b;
                }
            }
        }
        LaurentBlock::new(lo, v, trunc)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = LaurentBlock::monomial(Rat::one(), 0);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// `a(x^k)`.
    pub fn compose_monomial(&self, k: i64) -> Result<Self> {
        self.substitute_scaled(&Rat::one(), k)
    }

    /// `a(c x^k)`: coefficient `a_n c^n` moves to exponent `n k`.
    pub fn substitute_scaled(&self, c: &Rat, k: i64) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("monomial substitution needs k != 0"));
        }
        if c.is_zero() {
            return Err(Error::domain("substitution scale must be invertible"));
        }
        if k < 0 && self.trunc.is_some() {
            return Err(Error::domain("negative-exponent substitution of a truncated series is not a Laurent block"));
        }
        if self.coeffs.is_empty() {
            return Ok(LaurentBlock::new(0, vec![], self.trunc.map(|t| t * k)));
        }
        let n_lo = self.low;
        let n_hi = self.high();
        let (lo, hi) = if k > 0 { (n_lo * k, n_hi * k) } else { (n_hi * k, n_lo * k) };
        let mut v = vec![Rat::zero(); (hi - lo + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            let n = n_lo + i as i64;
            if !a.is_zero() {
                v[(n * k - lo) as usize] = a * &c.pow(n);
            }
        }
        Ok(LaurentBlock::new(lo, v, self.trunc.map(|t| t * k)))
    }

    /// Multiplicative inverse with at most `rel_prec` known terms.
    pub fn inverse(&self, rel_prec: usize) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(Error::domain("inverse of a series with no known nonzero term"));
        }
        let v = self.low;
        let mut avail = rel_prec as i64;
        if let Some(t) = self.trunc {
            avail = avail.min(t - v);
        }
        let n = avail.max(0) as usize;
        let a0inv = self.coeffs[0].recip().unwrap();
        let mut b: Vec<Rat> = Vec::with_capacity(n);
        for m in 0..n {
            if m == 0 {
                b.push(a0inv.clone());
                continue;
            }
            let mut s = Rat::zero();
            for j in 1..=m.min(self.coeffs.len() - 1) {
                s += &self.coeffs[j] * &b[m - j];
            }
            b.push(-(s * &a0inv));
        }
        Ok(LaurentBlock::new(-v, b, Some(-v + n as i64)))
    }

    /// `self(inner)` for a power series `self` (`low ≥ 0`) and `inner` of positive order.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.low < 0 && !self.coeffs.is_empty() {
            return Err(Error::domain("outer series must be a power series"));
        }
        let Some(ov) = inner.order() else {
            return Ok(match self.trunc {
                Some(t) if t <= 0 => LaurentBlock::big_o(0),
                _ => LaurentBlock::monomial(self.c(0), 0),
            });
        };
        if ov < 1 {
            return Err(Error::domain("inner series must have positive order"));
        }
        let trunc = min_opt(self.trunc.map(|t| t * ov), inner.trunc);
        let mut acc = LaurentBlock::zero();
        let mut pw = LaurentBlock::monomial(Rat::one(), 0);
        let top = if self.coeffs.is_empty() { -1 } else { self.high() };
        for n in 0..=top {
            if n > 0 {
                pw = pw.mul(inner);
                if let Some(t) = trunc {
                    pw = pw.truncate(t);
                }
            }
            let c = self.c(n);
            if !c.is_zero() {
                acc = acc.add(&pw.scale(&c));
            }
            if let (Some(t), Some(o)) = (trunc, pw.order()) {
                if o >= t {
                    break;
                }
            }
        }
        Ok(match trunc {
            Some(t) => acc.truncate(t),
            None => acc,
        })
    }

    /// Truncated float evaluation (no tail estimate).
    pub fn eval_f64(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + Complex64::new(c.to_f64(), 0.0);
        }
        acc * z.powi(self.low as i32)
    }

    /// Labelled coefficients `(exponent, value)` over the known range.
    pub fn labelled(&self) -> Vec<(i64, Rat)> {
        self.coeffs.iter().enumerate().map(|(i, c)| (self.low + i as i64, c.clone())).collect()
    }

    /// Every stored coefficient is zero (nothing nonzero known).
    pub fn vanishes(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl fmt::Display for LaurentBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.labelled() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})x^{n}")?;
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(t) = self.trunc {
            write!(f, " + O(x^{t})")?;
        }
        Ok(())
    }
}
