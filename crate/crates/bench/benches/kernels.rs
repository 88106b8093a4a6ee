use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use orbitforge_core::arith::rat::r;
use orbitforge_core::boettcher::psi_series;
use orbitforge_core::combinat::{coset_points_in_box, decompose_root_pair, LatticeCoset};
use orbitforge_core::dynamics::PolyDS;
use orbitforge_core::green::green_eval;
use orbitforge_core::nonarch::{count_zeros_pj, PadicSeries, Radius};
use orbitforge_core::orbits::{canonical_height, small_orbit_level};
use orbitforge_core::CBall;

fn series(c: &mut Criterion) {
    let f = PolyDS::from_ints(&[-1, 2, 0, 1]).unwrap();
    c.bench_function("psi_series cubic order 40", |b| b.iter(|| psi_series(black_box(&f), 40)));
}

fn green(c: &mut Criterion) {
    let f = PolyDS::from_ints(&[-1, 0, 1]).unwrap();
    let z = CBall::new(0.3, 1.1, 0.0);
    c.bench_function("green_eval X^2-1", |b| b.iter(|| green_eval(black_box(&f), z, 1e-12)));
}

fn padic(c: &mut Criterion) {
    let g = PadicSeries::from_ints(3, 0, &[9, 3, 1, 27, 2, 81, 5, 1, 3]).unwrap();
    let (r1, r) = (Radius::from_rat(&r(1, 9), 3).unwrap(), Radius::from_rat(&r(3, 1), 3).unwrap());
    c.bench_function("poisson-jensen ledger deg 8", |b| b.iter(|| count_zeros_pj(black_box(&g), &r1, &r)));
}

fn orbits(c: &mut Criterion) {
    let f = PolyDS::from_ints(&[-1, 0, 1]).unwrap();
    c.bench_function("small orbit level 3", |b| b.iter(|| small_orbit_level(black_box(&f), &r(1, 3), 3)));
    c.bench_function("canonical height 1/3", |b| b.iter(|| canonical_height(black_box(&f), &r(1, 3), 1e-10)));
}

fn combinat(c: &mut Criterion) {
    let s = LatticeCoset::new(7, 11, 199);
    c.bench_function("box count N=199", |b| b.iter(|| coset_points_in_box(black_box(&s), &r(3, 4))));
    c.bench_function("root pair N=199", |b| b.iter(|| decompose_root_pair(7, 11, 199, &r(2, 1), &r(3, 4))));
}

criterion_group!(kernels, series, green, padic, orbits, combinat);
criterion_main!(kernels);
