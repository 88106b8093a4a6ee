//! Dense univariate polynomials over Q.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ball::{Ball, CBall};
use super::rat::Rat;
use crate::error::{Error, Result};

/// Default cap on the degree of iterates and compositions.
pub const DEFAULT_MAX_DEGREE: usize = 1 << 16;

/// `coeffs[i]` is the coefficient of `X^i`; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| Rat::from_int(x)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn x() -> Self {
        Poly::monomial(Rat::one(), 1)
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(c: Rat, n: usize) -> Self {
        let mut v = vec![Rat::zero(); n + 1];
        v[n] = c;
        Poly::new(v)
    }

    /// `X - a`.
    pub fn linear_root(a: &Rat) -> Self {
        Poly::new(vec![-a, Rat::one()])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rat> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `deg 0 = 0`.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.leading().recip().unwrap();
        self.scale(&l)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Exact evaluation at `re + i im`, returning real and imaginary parts.
    pub fn eval_complex(&self, re: &Rat, im: &Rat) -> (Rat, Rat) {
        let mut a = Rat::zero();
        let mut b = Rat::zero();
        for c in self.coeffs.iter().rev() {
            let na = &a * re - &b * im + c;
            let nb = &a * im + &b * re;
            a = na;
            b = nb;
        }
        (a, b)
    }

    pub fn ball_coeffs(&self) -> Vec<Ball> {
        self.coeffs.iter().map(Ball::from_rat).collect()
    }

    pub fn eval_ball(&self, z: CBall) -> CBall {
        CBall::horner(&self.ball_coeffs(), z)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64();
        }
        acc
    }

    pub fn eval_f64_complex(&self, z: num_complex::Complex64) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_f64();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_int(i as i64))
                .collect(),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self ∘ q`.
    pub fn compose(&self, q: &Poly) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * q) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Composition with a degree guard.
    pub fn compose_checked(&self, q: &Poly, max_degree: usize) -> Result<Self> {
        let d = self.deg().saturating_mul(q.deg());
        if d > max_degree {
            return Err(Error::resource(format!("composition degree {d} exceeds cap {max_degree}")));
        }
        Ok(self.compose(q))
    }

    /// `f^{∘n}`, with `f^{∘0} = X`.
    pub fn iterate(&self, n: usize, max_degree: usize) -> Result<Self> {
        if self.deg() < 1 {
            return Err(Error::domain("iteration needs a nonconstant polynomial"));
        }
        let mut g = Poly::x();
        for _ in 0..n {
            g = self.compose_checked(&g, max_degree)?;
        }
        Ok(g)
    }

    /// Euclidean division; panics when dividing by zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.deg();
        if self.degree().is_none_or(|n| n < dd) {
            return (Poly::zero(), self.clone());
        }
        let inv = d.leading().recip().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![Rat::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] * &inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Exact quotient when `d | self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.primitive_rational();
        }
        a.monic()
    }

    /// Scale so that coefficients are coprime integers with positive leading term.
    pub fn primitive_rational(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let (ints, _) = self.to_primitive_integer();
        Poly::new(ints.into_iter().map(Rat::from_int).collect())
    }

    /// Returns integer coefficients `c_i` and a rational `s` with `self = s · Σ c_i X^i`,
    /// `gcd(c_i) = 1` and positive leading `c`.
    pub fn to_primitive_integer(&self) -> (Vec<BigInt>, Rat) {
        if self.is_zero() {
            return (vec![], Rat::zero());
        }
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = self.coeffs.iter().map(|c| c.numer() * (&l / c.denom())).collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        for c in ints.iter_mut() {
            *c = &*c / &g;
        }
        (ints, Rat::new(g, l))
    }

    /// Yun's algorithm: `self = lc · Π s_i^i` with `s_i` monic squarefree and pairwise coprime.
    /// Returns `(s_i, i)` for nonconstant `s_i`.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let mut out = vec![];
        if self.deg() < 1 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_exact(&a0).unwrap();
        let mut c = fp.div_exact(&a0).unwrap();
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.deg() >= 1 {
                out.push((a.clone(), i));
            }
            b = b.div_exact(&a).unwrap();
            if b.deg() < 1 {
                break;
            }
            c = d.div_exact(&a).unwrap();
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// Product of the distinct monic irreducible factors.
    pub fn squarefree_part(&self) -> Poly {
        if self.deg() < 1 {
            return Poly::one();
        }
        let f = self.monic();
        f.div_exact(&f.gcd(&f.derivative())).unwrap()
    }

    pub fn max_abs_coeff(&self) -> Rat {
        self.coeffs.iter().map(|c| c.abs()).fold(Rat::zero(), Rat::max)
    }

    pub fn map<F: Fn(&Rat) -> Rat>(&self, f: F) -> Poly {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// `p(cX)`.
    pub fn scale_var(&self, c: &Rat) -> Poly {
        let mut pw = Rat::one();
        let mut v = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            v.push(a * &pw);
            pw *= c;
        }
        Poly::new(v)
    }

    /// `p(X + t)`.
    pub fn shift(&self, t: &Rat) -> Poly {
        self.compose(&Poly::new(vec![t.clone(), Rat::one()]))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show = !a.is_one() || i == 0;
            if show {
                write!(f, "{a:?}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}X", if show { "*" } else { "" })?,
                _ => write!(f, "{}X^{i}", if show { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Poly::new(Vec::<Rat>::deserialize(d)?))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += a * b;
                }
            }
        }
        Poly::new(v)
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                $tr::$m(&self, &o)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: &Poly) -> Poly {
                $tr::$m(&self, o)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::r;

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(c)
    }

    #[test]
    fn composition_examples() {
        assert_eq!(p(&[0, 0, 1]).compose(&p(&[-1, 0, 1])), p(&[1, 0, -2, 0, 1]));
        let q = p(&[3, -1, 4, 1]);
        assert_eq!(p(&[0, 1]).compose(&q), q);
        let f = p(&[-1, 0, 1]);
        assert_eq!(f.iterate(2, DEFAULT_MAX_DEGREE).unwrap(), p(&[0, 0, -2, 0, 1]));
        assert_eq!(f.iterate(0, DEFAULT_MAX_DEGREE).unwrap(), Poly::x());
        assert_eq!(p(&[0, 0, 1]).iterate(3, DEFAULT_MAX_DEGREE).unwrap(), Poly::monomial(Rat::one(), 8));
    }

    #[test]
    fn iterate_guard() {
        let f = p(&[-1, 0, 1]);
        assert!(matches!(f.iterate(5, 16), Err(Error::Resource(_))));
        assert!(f.iterate(4, 16).is_ok());
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, 1]);
        let (q, rem) = a.div_rem(&b);
        assert_eq!(q, p(&[-1, 1]));
        assert!(rem.is_zero());
        let g = p(&[1, 2, 1]).gcd(&p(&[-1, 0, 1]));
        assert_eq!(g, p(&[1, 1]));
    }

    #[test]
    fn squarefree() {
        // (x-1)^2 (x+2)^3 x
        let f = &(&p(&[-1, 1]).pow(2) * &p(&[2, 1]).pow(3)) * &p(&[0, 1]);
        let sq = f.squarefree_decomposition();
        assert_eq!(sq, vec![(p(&[0, 1]), 1), (p(&[-1, 1]), 2), (p(&[2, 1]), 3)]);
        assert_eq!(f.squarefree_part().deg(), 3);
    }

    #[test]
    fn primitive_integer() {
        let f = Poly::new(vec![r(-17, 9), r(0, 1), r(1, 1)]);
        let (ints, s) = f.to_primitive_integer();
        assert_eq!(ints, vec![BigInt::from(-17), BigInt::zero(), BigInt::from(9)]);
        assert_eq!(s, r(1, 9));
    }

    #[test]
    fn display_and_json() {
        let f = Poly::new(vec![r(-1, 1), r(0, 1), r(1, 1)]);
        assert_eq!(f.to_string(), "X^2 - 1");
        assert_eq!(serde_json::to_string(&f).unwrap(), r#"["-1/1","0/1","1/1"]"#);
        let g: Poly = serde_json::from_str(r#"["-1", 0, 1]"#).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn complex_eval() {
        let f = p(&[1, 0, 1]);
        let (a, b) = f.eval_complex(&Rat::zero(), &Rat::one());
        assert!(a.is_zero() && b.is_zero());
    }
}
