//! Points of a plane curve with both coordinates in a small orbit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{is_special_curve, small_orbit_level_of, PlaneCurve, SpecialVerdict};
use crate::arith::resultant::resultant_shared;
use crate::arith::{BiPoly, CBall, Poly, Rat, Var};
use crate::dynamics::{is_preperiodic, OrbitVerdict, PolyDS};
use crate::error::Result;
use crate::orbits::small_orbit_level;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Coord {
    Rational { value: Rat },
    /// The root of the monic irreducible `poly` inside `ball`.
    Algebraic { poly: Poly, ball: CBall },
}

impl Coord {
    pub fn ball(&self) -> CBall {
        match self {
            Coord::Rational { value } => CBall::from_rat(value),
            Coord::Algebraic { ball, .. } => *ball,
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Coord::Rational { value } => Some(value),
            Coord::Algebraic { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionPoint {
    pub x: Coord,
    pub y: Coord,
    /// Least `n` with `f^n(x) = f^n(y) = f^n(α)` up to the first level of each coordinate.
    pub level: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntersectionVerdict {
    Special,
    Consistent,
    WouldBeCounterexample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelCount {
    pub level: usize,
    pub points: usize,
    /// `deg P · d^level`.
    pub bezout_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub cap: usize,
    pub special: SpecialVerdict,
    pub alpha_preperiodic: bool,
    pub points: Vec<IntersectionPoint>,
    /// Pairs whose membership could not be decided; never counted.
    pub undecided: Vec<(Coord, Coord)>,
    pub per_level: Vec<LevelCount>,
    pub verdict: IntersectionVerdict,
}

/// A Galois class of the level set: a rational point or the roots of an irreducible factor.
#[derive(Clone, Debug)]
enum Class {
    Rat(Rat, usize),
    Alg { poly: Poly, roots: Vec<CBall>, level: usize },
}

impl Class {
    fn level(&self) -> usize {
        match self {
            Class::Rat(_, l) | Class::Alg { level: l, .. } => *l,
        }
    }

    fn coords(&self) -> Vec<Coord> {
        match self {
            Class::Rat(q, _) => vec![Coord::Rational { value: q.clone() }],
            Class::Alg { poly, roots, .. } => {
                roots.iter().map(|b| Coord::Algebraic { poly: poly.clone(), ball: *b }).collect()
            }
        }
    }
}

#[derive(Default)]
struct PairResult {
    found: Vec<(Coord, Coord)>,
    undecided: Vec<(Coord, Coord)>,
}

/// Roots of `g` (given by disks) that are roots of `h`: exact via `gcd(g, h)` plus a disk count.
/// Returns `(certified, undecided)` indices.
fn common_roots(g: &Poly, roots: &[CBall], h: &Poly) -> (Vec<usize>, Vec<usize>) {
    if h.is_zero() {
        return ((0..roots.len()).collect(), vec![]);
    }
    let c = g.gcd(h);
    if c.deg() == 0 {
        return (vec![], vec![]);
    }
    let cand: Vec<usize> = (0..roots.len()).filter(|&i| c.eval_ball(roots[i]).contains_zero()).collect();
    if cand.len() == c.deg() {
        (cand, vec![])
    } else {
        (vec![], cand)
    }
}

fn pair_rat_alg(p: &BiPoly, a: &Rat, g: &Poly, roots: &[CBall], swap: bool) -> PairResult {
    let h = if swap { p.eval_y(a) } else { p.eval_x(a) };
    let (yes, maybe) = common_roots(g, roots, &h);
    let fixed = Coord::Rational { value: a.clone() };
    let mk = |i: usize| {
        let z = Coord::Algebraic { poly: g.clone(), ball: roots[i] };
        if swap {
            (z, fixed.clone())
        } else {
            (fixed.clone(), z)
        }
    };
    PairResult { found: yes.into_iter().map(mk).collect(), undecided: maybe.into_iter().map(mk).collect() }
}

/// `Res_X(P, g₁)` vanishes exactly at the `y` lying over some root of `g₁`.
fn pair_alg_alg(p: &BiPoly, c1: &Class, c2: &Class, res: Option<&Poly>) -> PairResult {
    let (Class::Alg { poly: g1, roots: r1, .. }, Class::Alg { poly: g2, roots: r2, .. }) = (c1, c2) else {
        unreachable!()
    };
    let mut out = PairResult::default();
    let xs = c1.coords();
    let ys = c2.coords();
    let Some(res) = res else {
        if p.deg_x() > 0 {
            // no resultant available
            for x in &xs {
                out.undecided.extend(ys.iter().map(|y| (x.clone(), y.clone())));
            }
            return out;
        }
        // P does not involve X
        let (yes, maybe) = common_roots(g2, r2, &p.eval_x(&Rat::zero()));
        for x in &xs {
            out.found.extend(yes.iter().map(|&j| (x.clone(), ys[j].clone())));
            out.undecided.extend(maybe.iter().map(|&j| (x.clone(), ys[j].clone())));
        }
        return out;
    };
    if res.is_zero() {
        // P(β₁, Y) vanishes identically for the roots of gcd(g₁, coefficients in Y)
        let mut c = g1.clone();
        for q in p.coeffs_in(Var::Y) {
            c = c.gcd(&q);
        }
        let (yes, maybe) = common_roots(g1, r1, &c);
        for i in yes {
            out.found.extend(ys.iter().map(|y| (xs[i].clone(), y.clone())));
        }
        for i in maybe {
            out.undecided.extend(ys.iter().map(|y| (xs[i].clone(), y.clone())));
        }
        return out;
    }
    let (yes, maybe) = common_roots(g2, r2, res);
    for j in maybe {
        for (i, x) in xs.iter().enumerate() {
            if p.eval_ball(r1[i], r2[j]).contains_zero() {
                out.undecided.push((x.clone(), ys[j].clone()));
            }
        }
    }
    for j in yes {
        let cand: Vec<usize> = (0..r1.len()).filter(|&i| p.eval_ball(r1[i], r2[j]).contains_zero()).collect();
        // some root of g₁ pairs with this y; if only one disk survives it is that one
        if cand.len() == 1 {
            out.found.push((xs[cand[0]].clone(), ys[j].clone()));
        } else {
            out.undecided.extend(cand.into_iter().map(|i| (xs[i].clone(), ys[j].clone())));
        }
    }
    out
}

fn classes(ds: &PolyDS, alpha: &Rat, cap: usize) -> Result<Vec<Class>> {
    let set = small_orbit_level(ds, alpha, cap)?;
    let mut out: Vec<Class> = set
        .rational
        .iter()
        .map(|(q, _)| Class::Rat(q.clone(), small_orbit_level_of(ds, alpha, q, cap).expect("root of the level set")))
        .collect();
    for f in &set.factors {
        let mut level = cap;
        for n in 0..=cap {
            let g = &ds.iterate(n)? - &Poly::constant(ds.orbit_point(alpha, n));
            if g.div_exact(&f.poly).is_some() {
                level = n;
                break;
            }
        }
        out.push(Class::Alg { poly: f.poly.clone(), roots: f.roots.clone(), level });
    }
    Ok(out)
}

/// Pairs `(β₁, β₂)` on the curve with `f^n(β_i) = f^n(α)` for some `n ≤ cap`.
pub fn intersect_small_orbit(curve: &PlaneCurve, ds: &PolyDS, alpha: &Rat, cap: usize) -> Result<IntersectionReport> {
    let alpha_preperiodic = matches!(is_preperiodic(ds, alpha), Ok(OrbitVerdict::Preperiodic { .. }));
    let special = is_special_curve(curve, ds, alpha, cap)?;
    let cls = classes(ds, alpha, cap)?;
    let p = &curve.p;
    let resultants: Vec<Option<Poly>> = cls
        .par_iter()
        .map(|c| match c {
            Class::Alg { poly, .. } if p.deg_x() > 0 => resultant_shared(p, &BiPoly::from_x(poly), Var::X).ok(),
            _ => None,
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..cls.len()).flat_map(|i| (0..cls.len()).map(move |j| (i, j))).collect();
    let results: Vec<(usize, PairResult)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let level = cls[i].level().max(cls[j].level());
            let r = match (&cls[i], &cls[j]) {
                (Class::Rat(a, _), Class::Rat(b, _)) => {
                    let hit = p.eval(a, b).is_zero();
                    let pt = (Coord::Rational { value: a.clone() }, Coord::Rational { value: b.clone() });
                    PairResult { found: if hit { vec![pt] } else { vec![] }, undecided: vec![] }
                }
                (Class::Rat(a, _), Class::Alg { poly, roots, .. }) => pair_rat_alg(p, a, poly, roots, false),
                (Class::Alg { poly, roots, .. }, Class::Rat(b, _)) => pair_rat_alg(p, b, poly, roots, true),
                (c1, c2) => pair_alg_alg(p, c1, c2, resultants[i].as_ref()),
            };
            (level, r)
        })
        .collect();
    let mut points = vec![];
    let mut undecided = vec![];
    for (level, r) in results {
        points.extend(r.found.into_iter().map(|(x, y)| IntersectionPoint { x, y, level }));
        undecided.extend(r.undecided);
    }
    let deg = curve.degree();
    let per_level: Vec<LevelCount> = (0..=cap)
        .map(|n| LevelCount {
            level: n,
            points: points.iter().filter(|q| q.level <= n).count(),
            bezout_bound: deg.saturating_mul(ds.degree().saturating_pow(n as u32)),
        })
        .collect();
    let verdict = if special.is_special() {
        IntersectionVerdict::Special
    } else if per_level.iter().all(|l| l.points <= l.bezout_bound) {
        IntersectionVerdict::Consistent
    } else {
        IntersectionVerdict::WouldBeCounterexample
    };
    Ok(IntersectionReport { cap, special, alpha_preperiodic, points, undecided, per_level, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::r;
    use num_complex::Complex64;

    fn setup() -> (PolyDS, Rat) {
        (PolyDS::from_ints(&[-1, 0, 1]).unwrap(), r(1, 3))
    }

    #[test]
    fn diagonal_pairs() {
        let (ds, a) = setup();
        let c = PlaneCurve::from_int_terms(&[(1, 0, 1), (0, 1, -1)]).unwrap();
        let rep = intersect_small_orbit(&c, &ds, &a, 2).unwrap();
        assert!(rep.undecided.is_empty());
        assert_eq!(rep.points.len(), 4);
        let rats: Vec<Rat> = rep.points.iter().filter_map(|q| q.x.as_rat().cloned()).collect();
        assert_eq!(rats, vec![r(-1, 3), r(1, 3)]);
        let s17 = 17f64.sqrt() / 3.0;
        for q in &rep.points {
            assert!(q.x.ball().overlaps(&q.y.ball()));
            if q.x.as_rat().is_none() {
                let z = q.x.ball();
                assert!(z.contains(Complex64::new(s17, 0.0)) || z.contains(Complex64::new(-s17, 0.0)));
                assert_eq!(q.level, 2);
            }
        }
        assert_eq!(rep.verdict, IntersectionVerdict::Special);
        assert_eq!(rep.per_level.iter().map(|l| l.points).collect::<Vec<_>>(), vec![1, 2, 4]);
    }

    #[test]
    fn vertical_line() {
        let (ds, a) = setup();
        let c = PlaneCurve::from_int_terms(&[(1, 0, 3), (0, 0, 1)]).unwrap();
        let rep = intersect_small_orbit(&c, &ds, &a, 2).unwrap();
        assert_eq!(rep.points.len(), 4);
        assert!(rep.points.iter().all(|q| q.x.as_rat() == Some(&r(-1, 3))));
    }

    #[test]
    fn shifted_line_is_sparse() {
        let (ds, a) = setup();
        let c = PlaneCurve::from_int_terms(&[(0, 1, 1), (1, 0, -1), (0, 0, -1)]).unwrap();
        let rep = intersect_small_orbit(&c, &ds, &a, 3).unwrap();
        assert_eq!(rep.verdict, IntersectionVerdict::Consistent);
        assert!(rep.undecided.is_empty());
        for q in &rep.points {
            let (x, y) = (q.x.ball(), q.y.ball());
            assert!(c.p.eval_ball(x, y).contains_zero());
        }
    }

    #[test]
    fn antidiagonal_conjugate_pairs() {
        let (ds, a) = setup();
        let c = PlaneCurve::from_int_terms(&[(1, 0, 1), (0, 1, 1)]).unwrap();
        let rep = intersect_small_orbit(&c, &ds, &a, 3).unwrap();
        assert!(rep.undecided.is_empty());
        assert_eq!(rep.points.len(), 8);
        for q in &rep.points {
            assert!(q.x.ball().overlaps(&q.y.ball().scale(-1.0)));
        }
    }
}
