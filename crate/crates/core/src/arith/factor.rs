//! Factorization over Q by numeric recombination of certified roots.
//!
//! A candidate factor is `ℓ · Π_{i∈S}(X - z_i)` with `ℓ` a divisor of the
//! leading coefficient. Its coefficients are enclosed in balls; a candidate is
//! accepted only after exact division.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::ball::CBall;
use super::poly::Poly;
use super::primes::{divisors_from, factor_big};
use super::rat::Rat;
use super::roots::{rational_roots, RootDisk};
use crate::error::Result;

/// Subset budget for the recombination search.
pub const DEFAULT_SUBSET_BUDGET: usize = 1 << 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certainty {
    Certified,
    Unknown,
}

/// A monic factor of degree ≥ 2 with its root disks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrrationalFactor {
    pub poly: Poly,
    pub multiplicity: usize,
    pub irreducible: Certainty,
    pub roots: Vec<CBall>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    /// Rational roots with multiplicity.
    pub rational: Vec<(Rat, usize)>,
    pub factors: Vec<IrrationalFactor>,
}

impl Factorization {
    pub fn degree(&self) -> usize {
        self.rational.iter().map(|(_, m)| m).sum::<usize>()
            + self.factors.iter().map(|f| f.multiplicity * f.poly.deg()).sum::<usize>()
    }
}

/// Conjugation classes among root disks: real roots alone, others paired.
fn conj_classes(disks: &[RootDisk]) -> Option<Vec<Vec<usize>>> {
    let n = disks.len();
    let mut used = vec![false; n];
    let mut out = vec![];
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        if disks[i].real == Some(true) {
            out.push(vec![i]);
            continue;
        }
        let cj = disks[i].ball.conj();
        let partner = (0..n).find(|&j| !used[j] && disks[j].ball.overlaps(&cj) && disks[j].real != Some(true))?;
        used[partner] = true;
        out.push(vec![i, partner]);
    }
    Some(out)
}

/// Ball coefficients of `Π (X - z_i)`.
fn ball_product(roots: &[CBall]) -> Vec<CBall> {
    let mut c = vec![CBall::one()];
    for z in roots {
        let mut next = vec![CBall::zero(); c.len() + 1];
        for (k, a) in c.iter().enumerate() {
            next[k + 1] = next[k + 1] + *a;
            next[k] = next[k] - *a * *z;
        }
        c = next;
    }
    c
}

/// The unique integer in a real ball, `Err` when ambiguous, `Ok(None)` when none.
fn unique_integer(b: &CBall, scale: f64) -> std::result::Result<Option<BigInt>, ()> {
    let x = b.scale(scale);
    if x.im.abs() > x.rad {
        return Ok(None);
    }
    let lo = (x.re - x.rad).ceil();
    let hi = (x.re + x.rad).floor();
    if lo > hi {
        return Ok(None);
    }
    if lo < hi || !lo.is_finite() || lo.abs() > 2f64.powi(52) {
        return Err(());
    }
    Ok(Some(BigInt::from(lo as i64)))
}

enum Search {
    Found(Vec<usize>, Poly),
    None,
    Inconclusive,
}

/// Depth-first walk over unions of classes with total size `left`.
fn rec(
    start: usize,
    left: usize,
    classes: &[Vec<usize>],
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    if left == 0 {
        return visit(chosen);
    }
    for c in start..classes.len() {
        let k = classes[c].len();
        if k > left {
            continue;
        }
        let before = chosen.len();
        chosen.extend_from_slice(&classes[c]);
        if rec(c + 1, left - k, classes, chosen, visit) {
            return true;
        }
        chosen.truncate(before);
    }
    false
}

/// Smallest nontrivial factor among conjugation-closed subsets of the roots.
fn search_factor(h: &Poly, disks: &[RootDisk], lcs: &[BigInt], budget: &mut usize) -> Search {
    let n = disks.len();
    let Some(classes) = conj_classes(disks) else {
        return Search::Inconclusive;
    };
    let mut inconclusive = false;
    for size in 1..=n / 2 {
        let mut chosen: Vec<usize> = vec![];
        let mut found: Option<(Vec<usize>, Poly)> = None;
        let mut visit = |s: &[usize]| -> bool {
            if *budget == 0 {
                inconclusive = true;
                return true;
            }
            *budget -= 1;
            let roots: Vec<CBall> = s.iter().map(|&i| disks[i].ball).collect();
            let prod = ball_product(&roots);
            for l in lcs {
                let lf = l.to_f64().unwrap_or(f64::INFINITY);
                // cheap trace test first
                match unique_integer(&prod[s.len() - 1], lf) {
                    Ok(None) => continue,
                    Err(()) => {
                        inconclusive = true;
                        continue;
                    }
                    Ok(Some(_)) => {}
                }
                let mut ints = Vec::with_capacity(prod.len());
                let mut ok = true;
                for c in &prod {
                    match unique_integer(c, lf) {
                        Ok(Some(v)) => ints.push(v),
                        Ok(None) => {
                            ok = false;
                            break;
                        }
                        Err(()) => {
                            inconclusive = true;
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                let cand = Poly::new(ints.into_iter().map(Rat::from_int).collect());
                if h.div_exact(&cand).is_some() {
                    found = Some((s.to_vec(), cand.monic()));
                    return true;
                }
            }
            false
        };
        rec(0, size, &classes, &mut chosen, &mut visit);
        if let Some((s, f)) = found {
            return Search::Found(s, f);
        }
        if *budget == 0 {
            return Search::Inconclusive;
        }
    }
    if inconclusive {
        Search::Inconclusive
    } else {
        Search::None
    }
}

/// Split a squarefree polynomial without rational roots into factors.
fn split_irrational(h: &Poly, disks: Vec<RootDisk>, budget: &mut usize) -> Vec<(Poly, Vec<CBall>, Certainty)> {
    let mut out = vec![];
    let mut work = vec![(h.monic(), disks)];
    while let Some((g, ds)) = work.pop() {
        if g.deg() < 2 {
            continue;
        }
        let (ints, _) = g.to_primitive_integer();
        let lc = ints.last().unwrap().abs();
        let lcs = match factor_big(&lc) {
            Some(f) => divisors_from(&f),
            None => {
                out.push((g, ds.iter().map(|d| d.ball).collect(), Certainty::Unknown));
                continue;
            }
        };
        match search_factor(&g, &ds, &lcs, budget) {
            Search::Found(s, f) => {
                let q = g.div_exact(&f).unwrap();
                let mut a = vec![];
                let mut b = vec![];
                for (i, d) in ds.iter().enumerate() {
                    if s.contains(&i) {
                        a.push(*d);
                    } else {
                        b.push(*d);
                    }
                }
                work.push((f, a));
                work.push((q.monic(), b));
            }
            Search::None => out.push((g, ds.iter().map(|d| d.ball).collect(), Certainty::Certified)),
            Search::Inconclusive => out.push((g, ds.iter().map(|d| d.ball).collect(), Certainty::Unknown)),
        }
    }
    out.sort_by_key(|a| (a.0.deg(), a.0.to_string()));
    out
}

/// Factor `p` over Q: rational roots exactly, other factors with certified root disks.
pub fn factor(p: &Poly) -> Result<Factorization> {
    factor_with_budget(p, DEFAULT_SUBSET_BUDGET)
}

pub fn factor_with_budget(p: &Poly, budget: usize) -> Result<Factorization> {
    let mut out = Factorization::default();
    let mut budget = budget;
    for (s, mult) in p.squarefree_decomposition() {
        let (qs, disks) = rational_roots(&s)?;
        let mut rest = s.clone();
        for q in &qs {
            rest = rest.div_exact(&Poly::linear_root(q)).unwrap();
            out.rational.push((q.clone(), mult));
        }
        if rest.deg() == 0 {
            continue;
        }
        let remaining: Vec<RootDisk> = disks
            .into_iter()
            .filter(|d| !qs.iter().any(|q| d.real == Some(true) && d.ball.contains(num_complex::Complex64::new(q.to_f64(), 0.0))))
            .collect();
        debug_assert_eq!(remaining.len(), rest.deg());
        if remaining.len() != rest.deg() {
            // fall back to a fresh isolation
            let (_, ds) = rational_roots(&rest)?;
            for (f, roots, c) in split_irrational(&rest, ds, &mut budget) {
                out.factors.push(IrrationalFactor { poly: f, multiplicity: mult, irreducible: c, roots });
            }
            continue;
        }
        for (f, roots, c) in split_irrational(&rest, remaining, &mut budget) {
            out.factors.push(IrrationalFactor { poly: f, multiplicity: mult, irreducible: c, roots });
        }
    }
    out.rational.sort();
    Ok(out)
}

/// Irreducibility over Q, certified when recombination is exhaustive.
pub fn is_irreducible(p: &Poly) -> Option<bool> {
    if p.deg() == 0 || p.is_zero() {
        return Some(false);
    }
    if p.deg() == 1 {
        return Some(true);
    }
    let sq = p.squarefree_decomposition();
    if sq.len() != 1 || sq[0].1 != 1 {
        return Some(false);
    }
    let f = factor(p).ok()?;
    if !f.rational.is_empty() || f.factors.len() != 1 {
        return Some(false);
    }
    match f.factors[0].irreducible {
        Certainty::Certified => Some(true),
        Certainty::Unknown => None,
    }
}
