//! Arbitrary precision rationals.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A reduced fraction with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    /// Panics if `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        let den = den.into();
        assert!(!den.is_zero(), "zero denominator");
        Rat(BigRational::new(num.into(), den))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn from_big(r: BigRational) -> Self {
        Rat(r)
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    /// Exact dyadic value of a finite float.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rat)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rat(self.0.recip()))
        }
    }

    /// Panics on `0^negative`.
    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            let r = self.recip().expect("zero to a negative power");
            return r.pow(-e);
        }
        let e = u32::try_from(e).expect("exponent too large");
        Rat(num_traits::pow::Pow::pow(&self.0, e))
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Nearest float (ties as in the underlying conversion); infinities on overflow.
    pub fn to_f64(&self) -> f64 {
        match self.0.to_f64() {
            Some(x) => x,
            None => {
                let l = self.ln_abs();
                if self.is_negative() {
                    -l.exp()
                } else {
                    l.exp()
                }
            }
        }
    }

    /// Natural log of |self|, `-inf` at zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_big(self.numer()) - ln_big(self.denom())
    }

    /// Exponent of `p` in the factorization; `None` for zero.
    pub fn valuation(&self, p: &BigInt) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(int_valuation(self.numer(), p) as i64 - int_valuation(self.denom(), p) as i64)
    }

    /// Logarithmic Weil height `log max(|num|, den)`.
    pub fn height(&self) -> f64 {
        let a = ln_big(self.numer());
        let b = ln_big(self.denom());
        a.max(b)
    }

    /// `max(|num|, den)` exactly.
    pub fn height_int(&self) -> BigInt {
        let a = self.numer().abs();
        if &a > self.denom() {
            a
        } else {
            self.denom().clone()
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Accepts `a`, `a/b` and finite decimals such as `-1.25` or `2e-3`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().replace('\u{2212}', "-");
        if t.is_empty() {
            return Err(Error::parse("empty rational"));
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| Error::parse(format!("bad numerator in {s:?}")))?;
            let d: BigInt = d.trim().parse().map_err(|_| Error::parse(format!("bad denominator in {s:?}")))?;
            if d.is_zero() {
                return Err(Error::parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Rat::new(n, d));
        }
        if let Ok(n) = t.parse::<BigInt>() {
            return Ok(Rat::from_int(n));
        }
        parse_decimal(&t).ok_or_else(|| Error::parse(format!("not a rational: {s:?}")))
    }
}

fn parse_decimal(t: &str) -> Option<Rat> {
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().ok()?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return None;
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{ip}{fp}");
    let mut n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    if neg {
        n = -n;
    }
    let scale = exp - fp.len() as i64;
    let ten = Rat::from_int(10);
    Some(Rat::from_int(n) * ten.pow(scale))
}

/// Largest `k` with `p^k | n`; zero for `n = 0`.
pub fn int_valuation(n: &BigInt, p: &BigInt) -> u64 {
    if n.is_zero() {
        return 0;
    }
    let mut k = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return k;
        }
        m = q;
        k += 1;
    }
}

/// Natural log of |n| without overflow.
pub fn ln_big(n: &BigInt) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Rat::parse(s)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::from_int(n)
    }
}

impl From<i32> for Rat {
    fn from(n: i32) -> Self {
        Rat::from_int(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Self {
        Rat::from_int(n)
    }
}

/// Serde helpers writing a `BigInt` as a decimal string.
pub mod bigint_str {
    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => Rat::parse(&s).map_err(de::Error::custom),
            serde_json::Value::Number(n) => Rat::parse(&n.to_string()).map_err(de::Error::custom),
            other => Err(de::Error::custom(format!("expected rational, got {other}"))),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                Rat($tr::$m(self.0, o.0))
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                Rat($tr::$m(self.0, &o.0))
            }
        }
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                Rat($tr::$m(&self.0, &o.0))
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                Rat($tr::$m(&self.0, o.0))
            }
        }
        impl $atr<Rat> for Rat {
            fn $am(&mut self, o: Rat) {
                $atr::$am(&mut self.0, o.0)
            }
        }
        impl $atr<&Rat> for Rat {
            fn $am(&mut self, o: &Rat) {
                $atr::$am(&mut self.0, &o.0)
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);
binop!(Div, div, DivAssign, div_assign);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(it: I) -> Rat {
        it.fold(Rat::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(it: I) -> Rat {
        it.fold(Rat::zero(), |a, b| a + b)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(it: I) -> Rat {
        it.fold(Rat::one(), |a, b| a * b)
    }
}

/// `r(n, d)` shorthand used heavily in tests.
pub fn r(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        assert_eq!(Rat::new(2, 4), Rat::new(1, 2));
        assert_eq!(Rat::new(2, -4).to_string(), "-1/2");
        assert_eq!(Rat::from_int(3).to_string(), "3/1");
    }

    #[test]
    fn parsing() {
        assert_eq!(Rat::parse("6/8").unwrap(), r(3, 4));
        assert_eq!(Rat::parse("-7").unwrap(), r(-7, 1));
        assert_eq!(Rat::parse("0.8").unwrap(), r(4, 5));
        assert_eq!(Rat::parse("-1.25").unwrap(), r(-5, 4));
        assert_eq!(Rat::parse("2e-3").unwrap(), r(1, 500));
        assert_eq!(Rat::parse("\u{2212}1").unwrap(), r(-1, 1));
        assert!(Rat::parse("1/0").is_err());
        assert!(Rat::parse("abc").is_err());
        assert!(Rat::parse(".").is_err());
    }

    #[test]
    fn serde_roundtrip() {
        let x = r(-17, 9);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, "\"-17/9\"");
        let y: Rat = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        let z: Rat = serde_json::from_str("-1").unwrap();
        assert_eq!(z, r(-1, 1));
        let w: Rat = serde_json::from_str("0.5").unwrap();
        assert_eq!(w, r(1, 2));
    }

    #[test]
    fn valuations_and_heights() {
        let p = BigInt::from(3);
        assert_eq!(r(18, 5).valuation(&p), Some(2));
        assert_eq!(r(5, 27).valuation(&p), Some(-3));
        assert_eq!(Rat::zero().valuation(&p), None);
        assert!((r(-8, 3).height() - 8f64.ln()).abs() < 1e-15);
        let big = Rat::from_int(BigInt::from(3).pow(2000));
        assert!((big.height() - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn powers() {
        assert_eq!(r(2, 3).pow(3), r(8, 27));
        assert_eq!(r(2, 3).pow(-2), r(9, 4));
        assert_eq!(r(5, 7).pow(0), Rat::one());
    }
}
