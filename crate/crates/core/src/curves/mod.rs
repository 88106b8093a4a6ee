//! Plane curves, special-curve classification, commuting linear maps.

mod intersect;
mod nu;

pub use intersect::{intersect_small_orbit, Coord, IntersectionPoint, IntersectionReport, IntersectionVerdict};
pub use nu::{build_nu, nu_estimates, KappaCheck, NuLedger, NuSeries, RootOfUnity, MAX_NU_WINDOW};

use serde::{Deserialize, Serialize};

use crate::arith::factor::is_irreducible;
use crate::arith::{BiPoly, LaurentBlock, Poly, Rat, Var};
use crate::boettcher::phi_series;
use crate::dynamics::PolyDS;
use crate::error::{Error, Result};

/// An affine plane curve `P(X, Y) = 0` with `P` primitive over Z.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneCurve {
    pub p: BiPoly,
    /// `deg_Y P`.
    pub d1: usize,
    /// `deg_X P`.
    pub d2: usize,
    /// Irreducibility over Q: `None` when not certified either way.
    pub irreducible: Option<bool>,
}

impl PlaneCurve {
    pub fn new(p: BiPoly) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::domain("the zero polynomial defines no curve"));
        }
        if p.total_degree() == 0 {
            return Err(Error::domain("a constant polynomial defines no curve"));
        }
        let p = p.primitive_integer();
        let irreducible = irreducible_over_q(&p);
        Ok(PlaneCurve { d1: p.deg_y(), d2: p.deg_x(), p, irreducible })
    }

    pub fn from_int_terms(t: &[(usize, usize, i64)]) -> Result<Self> {
        PlaneCurve::new(BiPoly::from_int_terms(t))
    }

    pub fn degree(&self) -> usize {
        self.p.total_degree()
    }

    /// `X - β` or `Y - β` for a rational `β`.
    fn line_root(&self, v: Var) -> Option<Rat> {
        let (keep, other) = match v {
            Var::X => (self.p.deg_x(), self.p.deg_y()),
            Var::Y => (self.p.deg_y(), self.p.deg_x()),
        };
        if keep != 1 || other != 0 {
            return None;
        }
        let (c0, c1) = match v {
            Var::X => (self.p.coeff(0, 0), self.p.coeff(1, 0)),
            Var::Y => (self.p.coeff(0, 0), self.p.coeff(0, 1)),
        };
        Some(-(c0 / c1))
    }
}

fn nonconstant_content(p: &BiPoly, v: Var) -> bool {
    let mut g = Poly::zero();
    for c in p.coeffs_in(v) {
        g = g.gcd(&c);
    }
    g.deg() > 0
}

/// Reducible if a content in one variable is nonconstant; irreducible if some
/// specialisation keeps the degree and is irreducible.
fn irreducible_over_q(p: &BiPoly) -> Option<bool> {
    let (dx, dy) = (p.deg_x(), p.deg_y());
    if dx == 0 {
        return is_irreducible(&p.eval_x(&Rat::zero()));
    }
    if dy == 0 {
        return is_irreducible(&p.eval_y(&Rat::zero()));
    }
    if nonconstant_content(p, Var::X) || nonconstant_content(p, Var::Y) {
        return Some(false);
    }
    for t in [0i64, 1, -1, 2, -2, 3, -3, 5, 7, -7] {
        let t = Rat::from_int(t);
        let sx = p.eval_y(&t);
        if sx.deg() == dx && is_irreducible(&sx) == Some(true) {
            return Some(true);
        }
        let sy = p.eval_x(&t);
        if sy.deg() == dy && is_irreducible(&sy) == Some(true) {
            return Some(true);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SpecialVerdict {
    /// `P` divides `f^n(X) - f^n(Y)`.
    SpecialDiagonal { n: usize },
    /// `X = β` with `f^level(β) = f^level(α)`.
    SpecialVertical { beta: Rat, level: usize },
    /// `Y = β` with `f^level(β) = f^level(α)`.
    SpecialHorizontal { beta: Rat, level: usize },
    NotSpecialUpTo { nmax: usize },
}

impl SpecialVerdict {
    pub fn is_special(&self) -> bool {
        !matches!(self, SpecialVerdict::NotSpecialUpTo { .. })
    }
}

/// `f^n(X) - f^n(Y)`.
pub fn diagonal_poly(ds: &PolyDS, n: usize) -> Result<BiPoly> {
    let g = ds.iterate(n)?;
    Ok(&BiPoly::from_x(&g) - &BiPoly::from_y(&g))
}

/// First level `n ≤ nmax` with `f^n(β) = f^n(α)`.
pub fn small_orbit_level_of(ds: &PolyDS, alpha: &Rat, beta: &Rat, nmax: usize) -> Option<usize> {
    let (mut a, mut b) = (alpha.clone(), beta.clone());
    for n in 0..=nmax {
        if a == b {
            return Some(n);
        }
        if n < nmax {
            a = ds.eval(&a);
            b = ds.eval(&b);
        }
    }
    None
}

pub fn is_special_curve(curve: &PlaneCurve, ds: &PolyDS, alpha: &Rat, nmax: usize) -> Result<SpecialVerdict> {
    if let Some(beta) = curve.line_root(Var::X) {
        if let Some(level) = small_orbit_level_of(ds, alpha, &beta, nmax) {
            return Ok(SpecialVerdict::SpecialVertical { beta, level });
        }
    }
    if let Some(beta) = curve.line_root(Var::Y) {
        if let Some(level) = small_orbit_level_of(ds, alpha, &beta, nmax) {
            return Ok(SpecialVerdict::SpecialHorizontal { beta, level });
        }
    }
    // a component of f^n(X) = f^n(Y) has equal degree in both variables
    if curve.d1 == curve.d2 {
        for n in 0..=nmax {
            let dn = ds.degree().checked_pow(n as u32).unwrap_or(usize::MAX);
            if curve.d2 > dn {
                continue;
            }
            if curve.p.divides(&diagonal_poly(ds, n)?) {
                return Ok(SpecialVerdict::SpecialDiagonal { n });
            }
        }
    }
    Ok(SpecialVerdict::NotSpecialUpTo { nmax })
}

/// `L(X) = aX + b` commuting with an iterate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearMap {
    pub a: Rat,
    pub b: Rat,
    /// `L ∘ f^n = f^n ∘ L`, checked by exact composition.
    pub verified: bool,
    /// `1/Φ(L(X)) = a^{-1} / Φ(X)` on the computed coefficients.
    pub phi_scaling: Option<bool>,
}

impl LinearMap {
    pub fn poly(&self) -> Poly {
        Poly::new(vec![self.b.clone(), self.a.clone()])
    }
}

const PHI_CHECK_ORDER: usize = 24;

/// Rational `L` with `L ∘ f^n = f^n ∘ L`.
pub fn commuting_linear(ds: &PolyDS, n: usize) -> Result<Vec<LinearMap>> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let g = ds.iterate(n)?;
    let dd = g.deg();
    // a^{D-1} = 1 over Q
    let mut scalings = vec![Rat::one()];
    if dd % 2 == 1 {
        scalings.push(-Rat::one());
    }
    let c = g.coeff(dd - 1);
    let mut out = vec![];
    for a in scalings {
        let ad1 = a.pow(dd as i64 - 1);
        // compare X^{D-1}: a c = D a^{D-1} b + a^{D-1} c
        let b = (&(&a * &c) - &(&ad1 * &c)) / (Rat::from_int(dd as i64) * ad1);
        let l = Poly::new(vec![b.clone(), a.clone()]);
        let verified = l.compose(&g) == g.compose(&l);
        if verified {
            let phi_scaling = Some(phi_scaling_holds(ds, &a, &b)?);
            out.push(LinearMap { a, b, verified, phi_scaling });
        }
    }
    Ok(out)
}

/// Series comparison in `w = 1/X`: `W(w / (a + b w)) = W(w) / a` with `W = 1/Φ`.
fn phi_scaling_holds(ds: &PolyDS, a: &Rat, b: &Rat) -> Result<bool> {
    let w = phi_series(ds, PHI_CHECK_ORDER);
    let t = w.trunc().expect("truncated series");
    let ratio = -(b / a);
    let a_inv = a.recip().expect("nonzero scaling");
    let coeffs: Vec<Rat> = (0..t).map(|k| &a_inv * &ratio.pow(k)).collect();
    let u = LaurentBlock::new(1, coeffs, Some(t + 1));
    let lhs = w.compose(&u)?;
    Ok(lhs.sub(&w.scale(&a_inv)).vanishes())
}
