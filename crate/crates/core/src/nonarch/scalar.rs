//! p-adic numbers with tracked precision.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::primes::is_prime;
use crate::arith::Rat;
use crate::error::{Error, Result};

/// `p^val · (unit + O(p^prec))` with `p ∤ unit`.
///
/// A zero is stored with `unit = 0`, `prec = 0`; `val` is then its absolute
/// precision (`i64::MAX` for an exact zero).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicScalar {
    pub p: u64,
    pub val: i64,
    #[serde(with = "crate::arith::rat::bigint_str")]
    pub unit: BigInt,
    pub prec: u32,
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{p} is not prime")))
    }
}

fn ppow(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

impl PadicScalar {
    pub fn exact_zero(p: u64) -> Self {
        PadicScalar { p, val: i64::MAX, unit: BigInt::zero(), prec: 0 }
    }

    /// `O(p^val)`.
    pub fn inexact_zero(p: u64, val: i64) -> Self {
        PadicScalar { p, val, unit: BigInt::zero(), prec: 0 }
    }

    /// The rational `q` to `prec` unit digits.
    pub fn from_rat(q: &Rat, p: u64, prec: u32) -> Result<Self> {
        check_prime(p)?;
        if prec == 0 {
            return Err(Error::domain("precision must be positive"));
        }
        if q.is_zero() {
            return Ok(PadicScalar::exact_zero(p));
        }
        let pb = BigInt::from(p);
        let v = q.valuation(&pb).unwrap();
        let mut num = q.numer().clone();
        let mut den = q.denom().clone();
        if v > 0 {
            num /= num_traits::pow(pb.clone(), v as usize);
        } else if v < 0 {
            den /= num_traits::pow(pb.clone(), (-v) as usize);
        }
        let m = ppow(p, prec);
        let inv = mod_inverse(&den, &m).expect("unit denominator");
        let unit = (num * inv).mod_floor(&m);
        Ok(PadicScalar { p, val: v, unit, prec })
    }

    pub fn from_int(n: i64, p: u64, prec: u32) -> Result<Self> {
        PadicScalar::from_rat(&Rat::from_int(n), p, prec)
    }

    pub fn one(p: u64, prec: u32) -> Self {
        PadicScalar { p, val: 0, unit: BigInt::one(), prec }
    }

    /// `p^k` exactly to `prec` digits.
    pub fn p_power(p: u64, k: i64, prec: u32) -> Self {
        PadicScalar { p, val: k, unit: BigInt::one(), prec }
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.is_zero() && self.val == i64::MAX
    }

    /// `v_p(x)`, `None` for zeros.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Absolute precision: the value is known modulo `p^abs_prec`.
    pub fn abs_prec(&self) -> i64 {
        if self.is_zero() {
            self.val
        } else {
            self.val.saturating_add(self.prec as i64)
        }
    }

    fn same_prime(&self, o: &Self) {
        assert_eq!(self.p, o.p, "mixed primes");
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = ppow(self.p, self.prec);
        PadicScalar { unit: (-&self.unit).mod_floor(&m), ..self.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_prime(o);
        let p = self.p;
        let ap = self.abs_prec().min(o.abs_prec());
        if self.is_zero() && o.is_zero() {
            return if ap == i64::MAX { PadicScalar::exact_zero(p) } else { PadicScalar::inexact_zero(p, ap) };
        }
        if self.is_zero() {
            return o.reduce_to(ap);
        }
        if o.is_zero() {
            return self.reduce_to(ap);
        }
        let (a, b) = if self.val <= o.val { (self, o) } else { (o, self) };
        let width = (ap - a.val) as u32;
        let m = ppow(p, width);
        let shift = ppow(p, (b.val - a.val).min(width as i64) as u32);
        let s = (&a.unit + &b.unit * shift).mod_floor(&m);
        if s.is_zero() {
            return PadicScalar::inexact_zero(p, ap);
        }
        let pb = BigInt::from(p);
        let mut s = s;
        let mut k = 0u32;
        while (&s % &pb).is_zero() {
            s /= &pb;
            k += 1;
        }
        PadicScalar { p, val: a.val + k as i64, unit: s, prec: width - k }
    }

    /// Drop digits beyond absolute precision `ap`.
    pub fn reduce_to(&self, ap: i64) -> Self {
        if self.is_zero() || ap >= self.abs_prec() {
            return self.clone();
        }
        if ap <= self.val {
            return PadicScalar::inexact_zero(self.p, ap);
        }
        let prec = (ap - self.val) as u32;
        PadicScalar { p: self.p, val: self.val, unit: self.unit.mod_floor(&ppow(self.p, prec)), prec }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same_prime(o);
        let p = self.p;
        match (self.is_zero(), o.is_zero()) {
            (true, true) => PadicScalar::inexact_zero(p, self.val.saturating_add(o.val)),
            (true, false) => PadicScalar::inexact_zero(p, self.val.saturating_add(o.val)),
            (false, true) => PadicScalar::inexact_zero(p, self.val.saturating_add(o.val)),
            (false, false) => {
                let prec = self.prec.min(o.prec);
                let m = ppow(p, prec);
                PadicScalar { p, val: self.val + o.val, unit: (&self.unit * &o.unit).mod_floor(&m), prec }
            }
        }
        .normal()
    }

    fn normal(self) -> Self {
        if self.is_zero() && self.val >= i64::MAX / 2 {
            PadicScalar::exact_zero(self.p)
        } else {
            self
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = PadicScalar::one(self.p, self.prec.max(1));
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::domain("inverse of a p-adic zero"));
        }
        let m = ppow(self.p, self.prec);
        let u = mod_inverse(&self.unit, &m).unwrap();
        Ok(PadicScalar { p: self.p, val: -self.val, unit: u, prec: self.prec })
    }

    /// The Teichmüller lift of `a mod p`.
    pub fn teichmuller(a: i64, p: u64, prec: u32) -> Result<Self> {
        check_prime(p)?;
        let pb = BigInt::from(p);
        let a0 = BigInt::from(a).mod_floor(&pb);
        if a0.is_zero() {
            return Err(Error::domain("Teichmüller lift needs a unit"));
        }
        let m = ppow(p, prec);
        let mut x = a0;
        for _ in 0..prec {
            x = x.modpow(&pb, &m);
        }
        Ok(PadicScalar { p, val: 0, unit: x, prec })
    }

    /// Nearest rational representative `p^val · unit` (unit in `[0, p^prec)`).
    pub fn to_rat(&self) -> Rat {
        if self.is_zero() {
            return Rat::zero();
        }
        Rat::from_int(self.unit.clone()) * Rat::from_int(self.p as i64).pow(self.val)
    }

    /// `log_p |x|_p = -val`.
    pub fn log_abs(&self) -> Option<i64> {
        self.valuation().map(|v| -v)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            write!(f, "0")
        } else if self.is_zero() {
            write!(f, "O({}^{})", self.p, self.val)
        } else {
            write!(f, "{}^{}*({} + O({}^{}))", self.p, self.val, self.unit, self.p, self.prec)
        }
    }
}

pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.abs().is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::r;

    #[test]
    fn construction() {
        let x = PadicScalar::from_rat(&r(18, 5), 3, 6).unwrap();
        assert_eq!(x.valuation(), Some(2));
        assert_eq!(x.log_abs(), Some(-2));
        let y = PadicScalar::from_rat(&r(1, 9), 3, 4).unwrap();
        assert_eq!(y.valuation(), Some(-2));
        assert!(PadicScalar::from_rat(&r(1, 2), 4, 4).is_err());
    }

    #[test]
    fn arithmetic_matches_rationals() {
        let p = 5;
        let vals = [r(3, 7), r(-25, 2), r(10, 3), r(1, 125), r(-3, 7)];
        for a in &vals {
            for b in &vals {
                let pa = PadicScalar::from_rat(a, p, 12).unwrap();
                let pb = PadicScalar::from_rat(b, p, 12).unwrap();
                let sum = pa.add(&pb);
                let exact = a + b;
                if exact.is_zero() {
                    assert!(sum.is_zero());
                } else {
                    assert_eq!(sum.valuation(), exact.valuation(&BigInt::from(p)));
                    let e = PadicScalar::from_rat(&exact, p, sum.prec).unwrap();
                    assert_eq!(sum, e);
                }
                let prod = pa.mul(&pb);
                assert_eq!(prod, PadicScalar::from_rat(&(a * b), p, 12).unwrap());
            }
        }
    }

    #[test]
    fn cancellation_loses_precision() {
        let a = PadicScalar::from_rat(&r(1, 1), 3, 5).unwrap();
        let b = PadicScalar::from_rat(&r(-1 + 81, 1), 3, 5).unwrap();
        let s = a.add(&b);
        assert_eq!(s.valuation(), Some(4));
        assert_eq!(s.prec, 1);
    }

    #[test]
    fn teichmuller_roots() {
        let w = PadicScalar::teichmuller(2, 5, 10).unwrap();
        let w4 = w.pow(4);
        assert_eq!(w4, PadicScalar::one(5, 10));
        assert_eq!(w.unit.clone() % 5u32, BigInt::from(2));
    }

    #[test]
    fn inverse_roundtrip() {
        let x = PadicScalar::from_rat(&r(12, 7), 2, 8).unwrap();
        let y = x.inverse().unwrap();
        assert_eq!(x.mul(&y), PadicScalar::one(2, 8));
    }
}
