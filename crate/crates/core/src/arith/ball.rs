//! Midpoint-radius interval arithmetic over f64.
//!
//! Radii absorb the round-to-nearest error of every midpoint operation, so an
//! enclosure stays valid under the usual IEEE error model.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rat::Rat;

const U: f64 = f64::EPSILON;

/// Round an error term up.
#[inline]
pub(crate) fn up(x: f64) -> f64 {
    x * (1.0 + 4.0 * U) + f64::MIN_POSITIVE
}

/// Real ball `[mid - rad, mid + rad]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub mid: f64,
    pub rad: f64,
}

impl Ball {
    pub fn new(mid: f64, rad: f64) -> Self {
        Ball { mid, rad: rad.abs() }
    }

    pub fn exact(x: f64) -> Self {
        Ball { mid: x, rad: 0.0 }
    }

    pub fn zero() -> Self {
        Ball::exact(0.0)
    }

    pub fn from_rat(q: &Rat) -> Self {
        let m = q.to_f64();
        let back = Rat::from_f64(m);
        let rad = match back {
            Some(b) if &b == q => 0.0,
            _ => up(m.abs() * U),
        };
        Ball { mid: m, rad }
    }

    /// Enclosure of `[lo, hi]`.
    pub fn from_bounds(lo: f64, hi: f64) -> Self {
        let mid = 0.5 * (lo + hi);
        let rad = up((hi - mid).max(mid - lo) + mid.abs() * U);
        Ball { mid, rad }
    }

    pub fn lower(&self) -> f64 {
        self.mid - up(self.rad + self.mid.abs() * U)
    }

    pub fn upper(&self) -> f64 {
        self.mid + up(self.rad + self.mid.abs() * U)
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.mid).abs() <= self.rad
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.abs() <= self.rad
    }

    pub fn is_finite(&self) -> bool {
        self.mid.is_finite() && self.rad.is_finite()
    }

    pub fn scale(&self, c: f64) -> Self {
        let m = self.mid * c;
        Ball { mid: m, rad: up(self.rad * c.abs() + m.abs() * U) }
    }

    /// Natural log; requires a strictly positive ball.
    pub fn ln(&self) -> Option<Self> {
        let lo = self.mid - self.rad;
        if !(lo > 0.0) {
            return None;
        }
        let hi = self.mid + self.rad;
        let a = lo.ln();
        let b = hi.ln();
        let slack = 4.0 * U * a.abs().max(b.abs()) + f64::MIN_POSITIVE;
        Some(Ball::from_bounds(a - slack, b + slack))
    }

    pub fn exp(&self) -> Self {
        let a = (self.mid - self.rad).exp();
        let b = (self.mid + self.rad).exp();
        Ball::from_bounds(a * (1.0 - 4.0 * U), b * (1.0 + 4.0 * U))
    }

    /// Union hull with another ball.
    pub fn hull(&self, o: &Ball) -> Self {
        Ball::from_bounds(self.lower().min(o.lower()), self.upper().max(o.upper()))
    }

    pub fn abs_upper(&self) -> f64 {
        up(self.mid.abs() + self.rad)
    }
}

impl Add for Ball {
    type Output = Ball;
    fn add(self, o: Ball) -> Ball {
        let m = self.mid + o.mid;
        Ball { mid: m, rad: up(self.rad + o.rad + m.abs() * U) }
    }
}

impl Sub for Ball {
    type Output = Ball;
    fn sub(self, o: Ball) -> Ball {
        let m = self.mid - o.mid;
        Ball { mid: m, rad: up(self.rad + o.rad + m.abs() * U) }
    }
}

impl Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball { mid: -self.mid, rad: self.rad }
    }
}

impl Mul for Ball {
    type Output = Ball;
    fn mul(self, o: Ball) -> Ball {
        let m = self.mid * o.mid;
        let r = self.mid.abs() * o.rad + o.mid.abs() * self.rad + self.rad * o.rad + m.abs() * U;
        Ball { mid: m, rad: up(r) }
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e} +/- {:.3e}]", self.mid, self.rad)
    }
}

/// Complex disk with centre `mid` and radius `rad`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CBall {
    pub re: f64,
    pub im: f64,
    pub rad: f64,
}

impl CBall {
    pub fn new(re: f64, im: f64, rad: f64) -> Self {
        CBall { re, im, rad: rad.abs() }
    }

    pub fn exact(z: Complex64) -> Self {
        CBall { re: z.re, im: z.im, rad: 0.0 }
    }

    pub fn real(b: Ball) -> Self {
        CBall { re: b.mid, im: 0.0, rad: b.rad }
    }

    pub fn zero() -> Self {
        CBall::new(0.0, 0.0, 0.0)
    }

    pub fn one() -> Self {
        CBall::new(1.0, 0.0, 0.0)
    }

    pub fn from_rat(q: &Rat) -> Self {
        CBall::real(Ball::from_rat(q))
    }

    pub fn from_rats(re: &Rat, im: &Rat) -> Self {
        let a = Ball::from_rat(re);
        let b = Ball::from_rat(im);
        CBall { re: a.mid, im: b.mid, rad: up(a.rad + b.rad) }
    }

    pub fn mid(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite() && self.rad.is_finite()
    }

    pub fn mid_abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Upper bound on |z| over the disk.
    pub fn abs_upper(&self) -> f64 {
        up(self.mid_abs() * (1.0 + 2.0 * U) + self.rad)
    }

    /// Lower bound on |z| over the disk (clamped at 0).
    pub fn abs_lower(&self) -> f64 {
        let v = self.mid_abs() * (1.0 - 2.0 * U) - up(self.rad);
        v.max(0.0)
    }

    /// Real ball enclosing |z|.
    pub fn abs(&self) -> Ball {
        Ball::from_bounds(self.abs_lower(), self.abs_upper())
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower() == 0.0
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.mid()).norm() <= self.rad
    }

    pub fn overlaps(&self, o: &CBall) -> bool {
        (self.mid() - o.mid()).norm() <= up(self.rad + o.rad)
    }

    pub fn conj(&self) -> Self {
        CBall { re: self.re, im: -self.im, rad: self.rad }
    }

    pub fn scale(&self, c: f64) -> Self {
        let re = self.re * c;
        let im = self.im * c;
        CBall { re, im, rad: up(self.rad * c.abs() + (re.abs() + im.abs()) * U) }
    }

    pub fn sqr(&self) -> Self {
        *self * *self
    }

    /// Reciprocal; `None` if the disk touches zero.
    pub fn recip(&self) -> Option<Self> {
        let lo = self.abs_lower();
        if lo <= 0.0 {
            return None;
        }
        let m = self.mid();
        let n2 = m.norm_sqr();
        let inv = Complex64::new(m.re / n2, -m.im / n2);
        // |1/z - 1/m| = |z - m| / (|z||m|)
        let r = self.rad / (lo * self.mid_abs()) + 4.0 * U * inv.norm();
        Some(CBall { re: inv.re, im: inv.im, rad: up(r) })
    }

    pub fn div(&self, o: &CBall) -> Option<Self> {
        o.recip().map(|r| *self * r)
    }

    /// Evaluate a real-coefficient polynomial (lowest degree first) by Horner.
    pub fn horner(coeffs: &[Ball], z: CBall) -> CBall {
        let mut acc = CBall::zero();
        for c in coeffs.iter().rev() {
            acc = acc * z + CBall::real(*c);
        }
        acc
    }

    pub fn horner_complex(coeffs: &[CBall], z: CBall) -> CBall {
        let mut acc = CBall::zero();
        for c in coeffs.iter().rev() {
            acc = acc * z + *c;
        }
        acc
    }
}

impl Add for CBall {
    type Output = CBall;
    fn add(self, o: CBall) -> CBall {
        let re = self.re + o.re;
        let im = self.im + o.im;
        CBall { re, im, rad: up(self.rad + o.rad + (re.abs() + im.abs()) * U) }
    }
}

impl Sub for CBall {
    type Output = CBall;
    fn sub(self, o: CBall) -> CBall {
        let re = self.re - o.re;
        let im = self.im - o.im;
        CBall { re, im, rad: up(self.rad + o.rad + (re.abs() + im.abs()) * U) }
    }
}

impl Neg for CBall {
    type Output = CBall;
    fn neg(self) -> CBall {
        CBall { re: -self.re, im: -self.im, rad: self.rad }
    }
}

impl Mul for CBall {
    type Output = CBall;
    fn mul(self, o: CBall) -> CBall {
        let re = self.re * o.re - self.im * o.im;
        let im = self.re * o.im + self.im * o.re;
        let a = self.mid_abs();
        let b = o.mid_abs();
        // each component involves two products and one sum
        let round = 3.0 * U * (self.re.abs() + self.im.abs()) * (o.re.abs() + o.im.abs());
        let r = a * o.rad + b * self.rad + self.rad * o.rad + round;
        CBall { re, im, rad: up(r) }
    }
}

impl fmt::Display for CBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e} {:+e}i +/- {:.3e}]", self.re, self.im, self.rad)
    }
}
