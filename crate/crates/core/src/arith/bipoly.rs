//! Sparse bivariate polynomials over Q.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ball::{Ball, CBall};
use super::poly::Poly;
use super::rat::Rat;

/// Polynomial in `X, Y`; key `(i, j)` holds the coefficient of `X^i Y^j`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    terms: BTreeMap<(usize, usize), Rat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Var {
    X,
    Y,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((usize, usize), Rat)>>(it: I) -> Self {
        let mut p = BiPoly::zero();
        for (k, c) in it {
            p.add_term(k, c);
        }
        p
    }

    /// Integer terms `(i, j, c)` for `c X^i Y^j`.
    pub fn from_int_terms(t: &[(usize, usize, i64)]) -> Self {
        BiPoly::from_terms(t.iter().map(|&(i, j, c)| ((i, j), Rat::from_int(c))))
    }

    /// `m[i][j]` is the coefficient of `X^i Y^j`.
    pub fn from_matrix(m: &[Vec<Rat>]) -> Self {
        let mut p = BiPoly::zero();
        for (i, row) in m.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                p.add_term((i, j), c.clone());
            }
        }
        p
    }

    pub fn to_matrix(&self) -> Vec<Vec<Rat>> {
        if self.is_zero() {
            return vec![];
        }
        let dx = self.deg_x();
        let dy = self.deg_y();
        let mut m = vec![vec![Rat::zero(); dy + 1]; dx + 1];
        for (&(i, j), c) in &self.terms {
            m[i][j] = c.clone();
        }
        m
    }

    pub fn from_x(p: &Poly) -> Self {
        BiPoly::from_terms(p.coeffs().iter().enumerate().map(|(i, c)| ((i, 0), c.clone())))
    }

    pub fn from_y(p: &Poly) -> Self {
        BiPoly::from_terms(p.coeffs().iter().enumerate().map(|(j, c)| ((0, j), c.clone())))
    }

    pub fn add_term(&mut self, k: (usize, usize), c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rat {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn deg_x(&self) -> usize {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn deg_y(&self) -> usize {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    pub fn deg(&self, v: Var) -> usize {
        match v {
            Var::X => self.deg_x(),
            Var::Y => self.deg_y(),
        }
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|k| k.0 + k.1).max().unwrap_or(0)
    }

    pub fn swap(&self) -> Self {
        BiPoly::from_terms(self.terms.iter().map(|(&(i, j), c)| ((j, i), c.clone())))
    }

    pub fn eval(&self, x: &Rat, y: &Rat) -> Rat {
        self.eval_x(x).eval(y)
    }

    /// `P(x, Y)` as a polynomial in `Y`.
    pub fn eval_x(&self, x: &Rat) -> Poly {
        let mut v = vec![Rat::zero(); self.deg_y() + 1];
        for (&(i, j), c) in &self.terms {
            v[j] += c * x.pow(i as i64);
        }
        Poly::new(v)
    }

    /// `P(X, y)` as a polynomial in `X`.
    pub fn eval_y(&self, y: &Rat) -> Poly {
        self.swap().eval_x(y)
    }

    /// Coefficients in the chosen variable as polynomials in the other one.
    pub fn coeffs_in(&self, v: Var) -> Vec<Poly> {
        let n = self.deg(v);
        let mut rows = vec![vec![]; n + 1];
        for (&(i, j), c) in &self.terms {
            let (outer, inner) = match v {
                Var::X => (i, j),
                Var::Y => (j, i),
            };
            let row: &mut Vec<Rat> = &mut rows[outer];
            if row.len() <= inner {
                row.resize(inner + 1, Rat::zero());
            }
            row[inner] += c;
        }
        rows.into_iter().map(Poly::new).collect()
    }

    pub fn eval_ball(&self, x: CBall, y: CBall) -> CBall {
        let rows = self.coeffs_in(Var::X);
        let mut acc = CBall::zero();
        for row in rows.iter().rev() {
            let cs: Vec<Ball> = row.ball_coeffs();
            acc = acc * x + CBall::horner(&cs, y);
        }
        acc
    }

    /// `P(g(X), h(Y))`.
    pub fn compose_each(&self, g: &Poly, h: &Poly) -> BiPoly {
        let gx = BiPoly::from_x(g);
        let hy = BiPoly::from_y(h);
        let mut gp = vec![BiPoly::one()];
        let mut hp = vec![BiPoly::one()];
        for _ in 0..self.deg_x() {
            let n = &gp[gp.len() - 1] * &gx;
            gp.push(n);
        }
        for _ in 0..self.deg_y() {
            let n = &hp[hp.len() - 1] * &hy;
            hp.push(n);
        }
        let mut out = BiPoly::zero();
        for (&(i, j), c) in &self.terms {
            let t = (&gp[i] * &hp[j]).scale(c);
            out = &out + &t;
        }
        out
    }

    pub fn one() -> Self {
        BiPoly::from_terms([((0, 0), Rat::one())])
    }

    pub fn scale(&self, c: &Rat) -> Self {
        BiPoly::from_terms(self.terms.iter().map(|(k, a)| (*k, a * c)))
    }

    /// Lex division remainder (X before Y).
    pub fn rem_lex(&self, b: &BiPoly) -> BiPoly {
        assert!(!b.is_zero(), "division by zero polynomial");
        let (&lt, lc) = b.terms.iter().next_back().unwrap();
        let inv = lc.recip().unwrap();
        let mut a = self.clone();
        let mut rem = BiPoly::zero();
        while let Some((&k, c)) = a.terms.iter().next_back() {
            let c = c.clone();
            if k.0 >= lt.0 && k.1 >= lt.1 {
                let q = &c * &inv;
                let sh = (k.0 - lt.0, k.1 - lt.1);
                for (&(i, j), bc) in &b.terms {
                    a.add_term((i + sh.0, j + sh.1), -(&q * bc));
                }
            } else {
                a.terms.remove(&k);
                rem.add_term(k, c);
            }
        }
        rem
    }

    pub fn divides(&self, a: &BiPoly) -> bool {
        a.rem_lex(self).is_zero()
    }

    /// Integer coefficients with gcd 1 and positive leading (lex) coefficient.
    pub fn primitive_integer(&self) -> BiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut l = BigInt::one();
        for c in self.terms.values() {
            l = l.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(&(c.numer() * (&l / c.denom())));
        }
        if self.terms.values().next_back().unwrap().is_negative() {
            g = -g;
        }
        self.scale(&Rat::new(l, g))
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c.numer());
        }
        g
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let a = c.abs();
            let mut parts = vec![];
            if !a.is_one() || (i == 0 && j == 0) {
                parts.push(format!("{a:?}"));
            }
            match i {
                0 => {}
                1 => parts.push("X".into()),
                _ => parts.push(format!("X^{i}")),
            }
            match j {
                0 => {}
                1 => parts.push("Y".into()),
                _ => parts.push(format!("Y^{j}")),
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly({self})")
    }
}

impl Serialize for BiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_matrix().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BiPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = Vec::<Vec<Rat>>::deserialize(d)?;
        Ok(BiPoly::from_matrix(&m))
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, o: &BiPoly) -> BiPoly {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(*k, c.clone());
        }
        r
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, o: &BiPoly) -> BiPoly {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(*k, -c);
        }
        r
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly::from_terms(self.terms.iter().map(|(k, c)| (*k, -c)))
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, o: &BiPoly) -> BiPoly {
        let mut r = BiPoly::zero();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &o.terms {
                r.add_term((i + k, j + l), a * b);
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisibility() {
        let f = Poly::from_ints(&[-1, 0, 1]);
        let diff = &BiPoly::from_x(&f) - &BiPoly::from_y(&f);
        let xmy = BiPoly::from_int_terms(&[(1, 0, 1), (0, 1, -1)]);
        let xpy = BiPoly::from_int_terms(&[(1, 0, 1), (0, 1, 1)]);
        assert!(xmy.divides(&diff));
        assert!(xpy.divides(&diff));
        let other = BiPoly::from_int_terms(&[(1, 0, 1), (0, 1, -1), (0, 0, -1)]);
        assert!(!other.divides(&diff));
    }

    #[test]
    fn matrix_roundtrip() {
        let p = BiPoly::from_int_terms(&[(2, 0, 3), (0, 1, -1), (1, 1, 5)]);
        let m = p.to_matrix();
        assert_eq!(BiPoly::from_matrix(&m), p);
        let s = serde_json::to_string(&p).unwrap();
        let q: BiPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn primitive() {
        let p = BiPoly::from_terms([((1, 0), Rat::new(-3, 2)), ((0, 0), Rat::new(-1, 2))]);
        assert_eq!(p.primitive_integer(), BiPoly::from_int_terms(&[(1, 0, 3), (0, 0, 1)]));
    }

    #[test]
    fn compose() {
        let p = BiPoly::from_int_terms(&[(1, 0, 1), (0, 1, -1)]);
        let f = Poly::from_ints(&[-1, 0, 1]);
        let q = p.compose_each(&f, &f);
        assert_eq!(q, &BiPoly::from_x(&f) - &BiPoly::from_y(&f));
    }
}
