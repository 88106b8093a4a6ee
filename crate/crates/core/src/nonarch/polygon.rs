//! Newton polygons and Poisson-Jensen zero counting.

use serde::{Deserialize, Serialize};

use std::collections::BTreeMap;

use super::scalar::PadicScalar;
use super::series::{PadicSeries, Radius};
use crate::arith::Rat;
use crate::error::{Error, Result};

/// Lower convex hull of `(n, v(a_n))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    pub vertices: Vec<(i64, i64)>,
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
}

impl NewtonPolygon {
    /// `(slope, horizontal length)` per segment.
    pub fn segments(&self) -> Vec<(Rat, i64)> {
        self.vertices
            .windows(2)
            .map(|w| (Rat::new(w[1].1 - w[0].1, w[1].0 - w[0].0), w[1].0 - w[0].0))
            .collect()
    }

    /// Height of the polygon above `n`, if `n` is in range.
    pub fn height_at(&self, n: i64) -> Option<Rat> {
        for w in self.vertices.windows(2) {
            if w[0].0 <= n && n <= w[1].0 {
                let t = Rat::new(n - w[0].0, w[1].0 - w[0].0);
                return Some(Rat::from_int(w[0].1) + t * Rat::from_int(w[1].1 - w[0].1));
            }
        }
        match self.vertices.as_slice() {
            [(m, v)] if *m == n => Some(Rat::from_int(*v)),
            _ => None,
        }
    }
}

pub fn newton_polygon(g: &PadicSeries) -> Result<NewtonPolygon> {
    let pts: Vec<(i64, i64)> = g.nonzero().collect();
    if pts.is_empty() {
        return Err(Error::domain("empty series has no Newton polygon"));
    }
    let mut hull: Vec<(i64, i64)> = vec![];
    for p in pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let np = NewtonPolygon { vertices: hull };
    // imprecise zeros must lie strictly above the hull
    for (n, a) in &g.terms {
        if a.is_zero() && !a.is_exact_zero() {
            match np.height_at(*n) {
                Some(h) if Rat::from_int(a.val) > h => {}
                _ => return Err(Error::Refused(format!("coefficient {n} lacks precision for the polygon"))),
            }
        }
    }
    Ok(np)
}

/// `(valuation of root, multiplicity)`: a segment of slope `-s` and length `m` gives `m` roots of valuation `s`.
pub fn zeros_by_slope(np: &NewtonPolygon) -> Vec<(Rat, i64)> {
    np.segments().into_iter().map(|(s, m)| (-s, m)).collect()
}

/// Every term of the Poisson-Jensen identity in units of `log p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PjLedger {
    pub p: u64,
    pub log_r1: Rat,
    pub log_r: Rat,
    pub log_norm_r: Rat,
    pub kappa_r1: i64,
    pub log_abs_a_kappa: Rat,
    /// `N(g, 0, r) = log|g|_r - κ(g, r₁) log r - log|a_κ|`.
    pub n_identity: Rat,
    /// `Σ log(r/|z|)` over zeros in `r₁ ≤ |z| < r`, from the Newton polygon.
    pub n_polygon: Option<Rat>,
}

impl PjLedger {
    pub fn residual(&self) -> Option<Rat> {
        self.n_polygon.as_ref().map(|n| &self.n_identity - n)
    }

    pub fn n_ln(&self) -> f64 {
        self.n_identity.to_f64() * (self.p as f64).ln()
    }
}

/// Weighted zero count of `g` on `A[r₁, r)` via the Poisson-Jensen identity,
/// cross-checked against the Newton polygon of the stored terms.
pub fn count_zeros_pj(g: &PadicSeries, r1: &Radius, r: &Radius) -> Result<PjLedger> {
    let (Some(l1), Some(l)) = (r1.log_p(), r.log_p()) else {
        return Err(Error::domain("exact zero counting needs radii that are powers of p"));
    };
    if l1 >= l {
        return Err(Error::domain("need r1 < r"));
    }
    let (norm, kr) = g.norm_and_kappa(r)?;
    let (_, k1) = g.norm_and_kappa(r1)?;
    let log_norm_r = norm.log_p().expect("p-power radius");
    let a = g.coeff(k1).and_then(|a| a.log_abs()).expect("κ indexes a nonzero term");
    let log_abs_a_kappa = Rat::from_int(a);
    let n_identity = &(&log_norm_r - &(Rat::from_int(k1) * l.clone())) - &log_abs_a_kappa;
    // zeros in r₁ ≤ |z| < r come from the hull between κ(r₁) and κ(r), which
    // certification at both radii pins to the stored terms
    let part: BTreeMap<i64, PadicScalar> = g.terms.range(k1..=kr).map(|(n, a)| (*n, a.clone())).collect();
    let n_polygon = if let Ok(np) = newton_polygon(&PadicSeries::from_terms(g.p, part, k1, kr)) {
        let mut n = Rat::zero();
        for (s, m) in zeros_by_slope(&np) {
            // |z| = p^{-s}
            let lz = -s.clone();
            if lz >= l1 && lz < l {
                n += Rat::from_int(m) * (&l - &lz);
            }
        }
        Some(n)
    } else {
        None
    };
    Ok(PjLedger { p: g.p, log_r1: l1, log_r: l, log_norm_r, kappa_r1: k1, log_abs_a_kappa, n_identity, n_polygon })
}
