//! Lattice cosets `S_a = Z a + N Z²` in boxes, and the root-of-unity decomposition built on them.
//!
//! Box sides `N^c` are handled exactly for rational `c` through integer roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::Rat;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCoset {
    pub a: (i64, i64),
    pub n: i64,
}

impl LatticeCoset {
    pub fn new(a1: i64, a2: i64, n: i64) -> Self {
        LatticeCoset { a: (a1, a2), n }
    }

    fn check(&self) -> Result<()> {
        if self.n < 17 {
            return Err(Error::domain(format!("hypothesis N >= 17 fails for N = {}", self.n)));
        }
        if self.a.0.gcd(&self.a.1).gcd(&self.n) != 1 {
            return Err(Error::domain(format!(
                "hypothesis gcd(a1, a2, N) = 1 fails for a = ({}, {}), N = {}",
                self.a.0, self.a.1, self.n
            )));
        }
        Ok(())
    }

    /// `k a mod N` for `k = 0..N`.
    fn residues(&self) -> impl Iterator<Item = (i64, (i64, i64))> + '_ {
        let n = self.n;
        (0..n).map(move |k| (k, ((k * self.a.0).rem_euclid(n), (k * self.a.1).rem_euclid(n))))
    }
}

fn check_exponent(c: &Rat) -> Result<()> {
    if *c < Rat::new(3, 4) || *c > Rat::one() {
        return Err(Error::domain(format!("hypothesis 3/4 <= c <= 1 fails for c = {c}")));
    }
    if c.denom() > &BigInt::from(64) {
        return Err(Error::domain("exponent denominators above 64 are not supported"));
    }
    Ok(())
}

fn pq(c: &Rat) -> (u32, u32) {
    (c.numer().to_u32().expect("small exponent"), c.denom().to_u32().expect("small exponent"))
}

/// `⌊N^c⌋`.
pub fn floor_pow(n: i64, c: &Rat) -> i64 {
    let (p, q) = pq(c);
    BigInt::from(n).pow(p).nth_root(q).to_i64().expect("box side fits i64")
}

/// Least integer `t` with `4t ≥ N^{2c-1}`.
pub fn box_threshold(n: i64, c: &Rat) -> i64 {
    let (p, q) = pq(c);
    let target = BigInt::from(n).pow(2 * p - q);
    // least m with m^q ≥ target
    let mut m = target.nth_root(q);
    if m.pow(q) < target {
        m += 1;
    }
    let m = m.to_i64().expect("threshold fits i64");
    (m + 3) / 4
}

/// Integers `x ≡ r (mod n)` with `|x| ≤ b`.
fn reps(r: i64, n: i64, b: i64) -> impl Iterator<Item = i64> {
    let start = -b + (r - (-b)).rem_euclid(n);
    (0..).map(move |t| start + t * n).take_while(move |x| *x <= b)
}

fn reps_count(r: i64, n: i64, b: i64) -> i64 {
    let start = -b + (r - (-b)).rem_euclid(n);
    if start > b {
        0
    } else {
        (b - start) / n + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxCount {
    pub count: usize,
    /// `⌊N^c⌋`.
    pub box_side: i64,
    /// `⌈N^{2c-1}/4⌉`.
    pub threshold: i64,
    pub holds: bool,
    pub witnesses: Vec<(i64, i64)>,
}

fn count_in_box(s: &LatticeCoset, b: i64) -> usize {
    s.residues().map(|(_, (r1, r2))| reps_count(r1, s.n, b) * reps_count(r2, s.n, b)).sum::<i64>() as usize
}

/// `S_a ∩ B_{N^c}`, enumerated exactly.
pub fn coset_points_in_box(s: &LatticeCoset, c: &Rat) -> Result<BoxCount> {
    s.check()?;
    check_exponent(c)?;
    let b = floor_pow(s.n, c);
    let mut witnesses = vec![];
    for (_, (r1, r2)) in s.residues() {
        for x in reps(r1, s.n, b) {
            for y in reps(r2, s.n, b) {
                witnesses.push((x, y));
            }
        }
    }
    witnesses.sort();
    let threshold = box_threshold(s.n, c);
    let count = witnesses.len();
    Ok(BoxCount { count, box_side: b, threshold, holds: count as i64 >= threshold, witnesses })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `e ≤ C₁ C² N^{1-c}`.
    SmallE,
    /// `|(k₁, k₂)|_∞ > C`.
    LargeK,
}

/// `e (k₁, k₂) ∈ S_a ∩ B_{N^c}` with `gcd(k₁, k₂) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitiveWitness {
    pub k1: i64,
    pub k2: i64,
    pub e: i64,
    /// `e (k₁, k₂) ≡ multiplier · a (mod N)`.
    pub multiplier: i64,
    pub branch: Branch,
    /// Least `C₁` for which this witness satisfies the small-`e` branch; 0 on the other branch.
    pub c1_needed: f64,
}

fn c1_needed(e: i64, ksup: i64, big_c: &Rat, n: i64, c: &Rat) -> (Branch, f64) {
    if Rat::from_int(ksup) > *big_c {
        (Branch::LargeK, 0.0)
    } else {
        let cc = big_c.to_f64();
        (Branch::SmallE, e as f64 / (cc * cc * (n as f64).powf(1.0 - c.to_f64())))
    }
}

/// Searches the box for the witness needing the smallest constant, then by `(e, |k|_∞)`.
pub fn find_primitive_decomposition(s: &LatticeCoset, big_c: &Rat, c: &Rat) -> Result<PrimitiveWitness> {
    s.check()?;
    check_exponent(c)?;
    if *big_c < Rat::one() {
        return Err(Error::domain("hypothesis C >= 1 fails"));
    }
    let b = floor_pow(s.n, c);
    let mut best: Option<(f64, i64, i64, i64, i64, PrimitiveWitness)> = None;
    for (k, (r1, r2)) in s.residues() {
        for x in reps(r1, s.n, b) {
            for y in reps(r2, s.n, b) {
                if x == 0 && y == 0 {
                    continue;
                }
                let e = x.gcd(&y);
                let (k1, k2) = (x / e, y / e);
                let ksup = k1.abs().max(k2.abs());
                let (branch, need) = c1_needed(e, ksup, big_c, s.n, c);
                let key = (need, e, ksup, k1, k2);
                let better = match &best {
                    None => true,
                    Some(bk) => {
                        need < bk.0 || (need == bk.0 && (e, ksup, k1, k2) < (bk.1, bk.2, bk.3, bk.4))
                    }
                };
                if better {
                    let w = PrimitiveWitness { k1, k2, e, multiplier: k, branch, c1_needed: need };
                    best = Some((key.0, key.1, key.2, key.3, key.4, w));
                }
            }
        }
    }
    Ok(best.expect("the box contains a nonzero coset point").5)
}

/// `ℓ` with `k ≡ ℓ gcd(N, k) (mod N)` and `gcd(ℓ, N) = 1`.
pub fn gcd_shift(k: i64, n: i64) -> Result<i64> {
    if k < 2 || n < 2 {
        return Err(Error::domain("need k >= 2 and N >= 2"));
    }
    let f = n.gcd(&k);
    let (base, step) = (k / f, n / f);
    (0..=n)
        .map(|t| base + t * step)
        .find(|l| l.gcd(&n) == 1)
        .ok_or_else(|| Error::Undecided("no unit found in the progression".into()))
}

/// `(ζ_N^{a₁}, ζ_N^{a₂}) = (ζ_e^{t₁} ζ^{k₁}, ζ_e^{t₂} ζ^{k₂})` with `ζ = ζ_N^{ℓ*}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootPairDecomposition {
    pub k1: i64,
    pub k2: i64,
    /// Divides `N`.
    pub e: i64,
    /// A unit mod `N`.
    pub ell_star: i64,
    /// Exponents of `ζ_e = ζ_N^{N/e}`.
    pub t: (i64, i64),
    pub branch: Branch,
    pub c1_needed: f64,
}

fn divisors(n: i64) -> Vec<i64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Search by `(e, |k|_∞, k)` over `e | N` and units `ℓ`.
pub fn decompose_root_pair(a1: i64, a2: i64, n: i64, big_c: &Rat, c: &Rat) -> Result<RootPairDecomposition> {
    let s = LatticeCoset::new(a1, a2, n);
    s.check()?;
    check_exponent(c)?;
    if *big_c < Rat::one() {
        return Err(Error::domain("hypothesis C >= 1 fails"));
    }
    let side = floor_pow(n, c);
    for e in divisors(n) {
        let m = n / e;
        let b = side / e;
        let mut best: Option<((i64, i64, i64), i64)> = None;
        for l in (1..=m).filter(|l| l.gcd(&m) == 1) {
            let (r1, r2) = ((l * a1).rem_euclid(m), (l * a2).rem_euclid(m));
            for x in reps(r1, m, b) {
                for y in reps(r2, m, b) {
                    if x.gcd(&y) != 1 {
                        continue;
                    }
                    let key = (x.abs().max(y.abs()), x, y);
                    if best.as_ref().is_none_or(|(bk, _)| key < *bk) {
                        best = Some((key, l));
                    }
                }
            }
        }
        let Some(((ksup, k1, k2), l)) = best else { continue };
        // ℓ* ≡ ℓ^{-1} (mod N/e), lifted to a unit mod N
        let inv = (1..=m).find(|x| (x * l) % m == 1 % m).unwrap_or(1);
        let ell_star = (0..=n).map(|t| inv + t * m).find(|x| x.gcd(&n) == 1).expect("units lift");
        let t1 = ((a1 - ell_star * k1) / m).rem_euclid(e);
        let t2 = ((a2 - ell_star * k2) / m).rem_euclid(e);
        let (branch, need) = c1_needed(e, ksup, big_c, n, c);
        return Ok(RootPairDecomposition { k1, k2, e, ell_star, t: (t1, t2), branch, c1_needed: need });
    }
    Err(Error::Undecided(format!("no decomposition found for a = ({a1}, {a2}), N = {n}")))
}

/// Exact check of a decomposition against `(a₁, a₂) mod N`.
pub fn verify_root_pair(a1: i64, a2: i64, n: i64, c: &Rat, d: &RootPairDecomposition) -> bool {
    if d.e < 1 || n % d.e != 0 || d.ell_star.gcd(&n) != 1 || d.k1.gcd(&d.k2) != 1 {
        return false;
    }
    if d.e * d.k1.abs().max(d.k2.abs()) > floor_pow(n, c) {
        return false;
    }
    let m = n / d.e;
    let ok = |a: i64, k: i64, t: i64| (a - d.ell_star * k - m * t).rem_euclid(n) == 0;
    ok(a1, d.k1, d.t.0) && ok(a2, d.k2, d.t.1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma {
    /// Counting coset points in a box.
    Box1,
    /// Primitive decomposition of a coset point.
    Boom,
    /// Decomposition of a pair of roots of unity.
    Rootsof1,
}

impl std::str::FromStr for Lemma {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "box1" => Ok(Lemma::Box1),
            "boom" => Ok(Lemma::Boom),
            "rootsof1" => Ok(Lemma::Rootsof1),
            _ => Err(Error::Parse(format!("unknown lemma {s:?}; expected box1, boom or rootsof1"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCase {
    pub a: (i64, i64),
    pub n: i64,
    pub c: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: i64,
    pub cases: usize,
    pub violations: usize,
    /// Smallest `count / threshold` (box counting) or largest needed constant (decompositions).
    pub extreme: f64,
    pub extreme_case: Option<SweepCase>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub lemma: Lemma,
    pub rows: Vec<SweepRow>,
    pub cases: usize,
    pub violations: usize,
    /// Running maximum of the needed constant; an empirical value, not a proven one.
    pub empirical_c1: Option<f64>,
    pub pass: bool,
}

/// All admissible `a mod N` for `17 ≤ N ≤ min(nmax, exhaustive_max)`, plus `random` samples above.
pub fn sweep_cases(nmax: i64, exhaustive_max: i64, random: usize, seed: u64) -> Vec<SweepCase> {
    let mut out = vec![];
    let cs = [Rat::new(3, 4), Rat::one()];
    for n in 17..=nmax.min(exhaustive_max) {
        for a1 in 0..n {
            for a2 in 0..n {
                if a1.gcd(&a2).gcd(&n) == 1 {
                    for c in &cs {
                        out.push(SweepCase { a: (a1, a2), n, c: c.clone() });
                    }
                }
            }
        }
    }
    let lo = exhaustive_max.max(16) + 1;
    if nmax >= lo {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extra = [Rat::new(3, 4), Rat::new(4, 5), Rat::one()];
        let mut k = 0;
        while k < random {
            let n = rng.gen_range(lo..=nmax);
            let a = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a.0.gcd(&a.1).gcd(&n) != 1 {
                continue;
            }
            let c = extra[rng.gen_range(0..extra.len())].clone();
            out.push(SweepCase { a, n, c });
            k += 1;
        }
    }
    out
}

const SWEEP_CS: [i64; 3] = [1, 2, 3];

/// Runs one lemma over the cases, in parallel by `N`.
pub fn sweep(lemma: Lemma, cases: &[SweepCase]) -> SweepReport {
    let mut ns: Vec<i64> = cases.iter().map(|c| c.n).collect();
    ns.sort();
    ns.dedup();
    let rows: Vec<SweepRow> = ns
        .par_iter()
        .map(|&n| {
            let mine: Vec<&SweepCase> = cases.iter().filter(|c| c.n == n).collect();
            let mut row = SweepRow { n, cases: 0, violations: 0, extreme: f64::NAN, extreme_case: None };
            let mut note = |v: f64, case: &SweepCase, smaller: bool| {
                let better = row.extreme.is_nan() || if smaller { v < row.extreme } else { v > row.extreme };
                if better {
                    row.extreme = v;
                    row.extreme_case = Some(case.clone());
                }
            };
            let mut cases_seen = 0;
            let mut violations = 0;
            for case in mine {
                let s = LatticeCoset::new(case.a.0, case.a.1, n);
                match lemma {
                    Lemma::Box1 => {
                        cases_seen += 1;
                        let b = floor_pow(n, &case.c);
                        let count = count_in_box(&s, b) as i64;
                        let t = box_threshold(n, &case.c);
                        if count < t {
                            violations += 1;
                        }
                        note(count as f64 / t as f64, case, true);
                    }
                    Lemma::Boom => {
                        for cc in SWEEP_CS {
                            cases_seen += 1;
                            match find_primitive_decomposition(&s, &Rat::from_int(cc), &case.c) {
                                Ok(w) => note(w.c1_needed, case, false),
                                Err(_) => violations += 1,
                            }
                        }
                    }
                    Lemma::Rootsof1 => {
                        for cc in SWEEP_CS {
                            cases_seen += 1;
                            match decompose_root_pair(case.a.0, case.a.1, n, &Rat::from_int(cc), &case.c) {
                                Ok(d) if verify_root_pair(case.a.0, case.a.1, n, &case.c, &d) => {
                                    note(d.c1_needed, case, false)
                                }
                                _ => violations += 1,
                            }
                        }
                    }
                }
            }
            row.cases = cases_seen;
            row.violations = violations;
            row
        })
        .collect();
    let cases_n = rows.iter().map(|r| r.cases).sum();
    let violations = rows.iter().map(|r| r.violations).sum();
    let empirical_c1 = match lemma {
        Lemma::Box1 => None,
        _ => rows.iter().map(|r| r.extreme).filter(|x| !x.is_nan()).reduce(f64::max).map(|x| x.max(1.0)),
    };
    SweepReport { lemma, rows, cases: cases_n, violations, empirical_c1, pass: violations == 0 }
}

/// `Σ |v|` over a witness list; used to compare runs.
pub fn witness_checksum(w: &[(i64, i64)]) -> BigInt {
    w.iter().map(|(x, y)| BigInt::from(x.abs() + y.abs())).sum::<BigInt>().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat::r;

    #[test]
    fn exact_box_sides() {
        assert_eq!(floor_pow(17, &r(1, 1)), 17);
        assert_eq!(floor_pow(17, &r(3, 4)), 8);
        assert_eq!(floor_pow(16, &r(3, 4)), 8);
        assert_eq!(floor_pow(81, &r(3, 4)), 27);
        assert_eq!(box_threshold(17, &r(1, 1)), 5);
        assert_eq!(box_threshold(17, &r(3, 4)), 2);
        assert_eq!(box_threshold(16, &r(3, 4)), 1);
    }

    #[test]
    fn box_examples() {
        let b = coset_points_in_box(&LatticeCoset::new(1, 0, 17), &r(1, 1)).unwrap();
        assert!(b.holds && b.count >= 5);
        let b = coset_points_in_box(&LatticeCoset::new(1, 1, 17), &r(3, 4)).unwrap();
        assert!(b.holds && b.count >= 2);
        // brute force over the whole box
        let s = LatticeCoset::new(3, 5, 19);
        let side = floor_pow(19, &r(3, 4));
        let mut brute = 0;
        for x in -side..=side {
            for y in -side..=side {
                if (0..19).any(|k| (x - 3 * k).rem_euclid(19) == 0 && (y - 5 * k).rem_euclid(19) == 0) {
                    brute += 1;
                }
            }
        }
        assert_eq!(coset_points_in_box(&s, &r(3, 4)).unwrap().count, brute);
        assert!(coset_points_in_box(&LatticeCoset::new(0, 0, 17), &r(1, 1)).is_err());
        assert!(coset_points_in_box(&LatticeCoset::new(1, 0, 16), &r(1, 1)).is_err());
        assert!(coset_points_in_box(&LatticeCoset::new(1, 0, 17), &r(1, 2)).is_err());
    }

    #[test]
    fn monotone_in_c() {
        let s = LatticeCoset::new(2, 7, 29);
        let mut last = 0;
        for c in [r(3, 4), r(4, 5), r(5, 6), r(1, 1)] {
            let n = coset_points_in_box(&s, &c).unwrap().count;
            assert!(n >= last);
            last = n;
        }
    }

    #[test]
    fn primitive_examples() {
        let w = find_primitive_decomposition(&LatticeCoset::new(1, 0, 17), &r(100, 1), &r(1, 1)).unwrap();
        assert_eq!((w.k1.abs(), w.k2, w.e), (1, 0, 1));
        // with C = 1 any point with |k| > 1 satisfies the other branch outright
        let w = find_primitive_decomposition(&LatticeCoset::new(1, 0, 17), &r(1, 1), &r(1, 1)).unwrap();
        assert_eq!((w.branch, w.c1_needed), (Branch::LargeK, 0.0));
        let w = find_primitive_decomposition(&LatticeCoset::new(1, 4, 25), &r(2, 1), &r(4, 5)).unwrap();
        assert_eq!(w.k1.gcd(&w.k2), 1);
        let s = LatticeCoset::new(1, 4, 25);
        assert_eq!(((w.e * w.k1 - w.multiplier).rem_euclid(25), (w.e * w.k2 - 4 * w.multiplier).rem_euclid(25)), (0, 0));
        let w = find_primitive_decomposition(&s, &r(1000, 1), &r(3, 4)).unwrap();
        assert_eq!(w.branch, Branch::SmallE);
    }

    #[test]
    fn gcd_shift_examples() {
        assert_eq!(gcd_shift(6, 9).unwrap(), 2);
        assert_eq!(gcd_shift(4, 5).unwrap(), 4);
        assert_eq!(gcd_shift(10, 8).unwrap(), 5);
        for n in 2..60 {
            for k in 2..120 {
                let l = gcd_shift(k, n).unwrap();
                assert_eq!(l.gcd(&n), 1);
                assert_eq!((k - l * n.gcd(&k)).rem_euclid(n), 0);
            }
        }
        assert!(gcd_shift(1, 5).is_err());
    }

    #[test]
    fn root_pair_examples() {
        let d = decompose_root_pair(1, 0, 17, &r(1, 1), &r(1, 1)).unwrap();
        assert_eq!((d.k1.abs(), d.k2, d.e), (1, 0, 1));
        assert!(verify_root_pair(1, 0, 17, &r(1, 1), &d));
        let d = decompose_root_pair(3, 5, 19, &r(1, 1), &r(1, 1)).unwrap();
        assert!(verify_root_pair(3, 5, 19, &r(1, 1), &d));
        assert!(decompose_root_pair(1, 0, 16, &r(1, 1), &r(1, 1)).is_err());
        let mut bad = d.clone();
        bad.k1 += 1;
        assert!(!verify_root_pair(3, 5, 19, &r(1, 1), &bad));
    }

    #[test]
    fn small_sweeps_pass() {
        let cases = sweep_cases(20, 20, 0, 1);
        for lemma in [Lemma::Box1, Lemma::Boom, Lemma::Rootsof1] {
            let rep = sweep(lemma, &cases);
            assert!(rep.pass, "{lemma:?}");
            assert_eq!(rep.rows.len(), 4);
        }
    }
}
