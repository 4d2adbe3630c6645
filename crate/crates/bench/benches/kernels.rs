//! Criterion benchmarks for the hot kernels: constrained enumeration,
//! lattice point counting, density evaluation (formula and oracle), the
//! Ω(p)/p combination and the four-fold sieve sum.

use criterion::{criterion_group, criterion_main, Criterion};
use polysieve_core::{lattice, localdensity, polygonal, sieve};
use std::hint::black_box;

fn bench_enumeration(c: &mut Criterion) {
    let prob = polygonal::PolygonalProblem::new(5, &[1, 1, 1, 1], 2000).unwrap();
    c.bench_function("enumerate m=5 n=2000", |b| {
        b.iter(|| {
            polygonal::enumerate_representations(
                black_box(&prob),
                &polygonal::SolutionConstraint::none(),
            )
            .unwrap()
            .len()
        })
    });
}

fn bench_lattice_count(c: &mut Criterion) {
    let lat = lattice::ShiftedLattice::build(11, &[1, 2, 3, 4], &[1, 5, 1, 1]).unwrap();
    let prob = polygonal::PolygonalProblem::new(11, &[1, 2, 3, 4], 500).unwrap();
    let h = prob.scaled_target().h_quarter;
    c.bench_function("lattice count m=11 n=500", |b| {
        b.iter(|| lat.count_points(black_box(&h)))
    });
}

fn bench_density(c: &mut Criterion) {
    c.bench_function("density_general p=7", |b| {
        b.iter(|| {
            localdensity::density_general(11, &[1, 2, 2, 5], &[1, 7, 1, 1], 7, black_box(343 + 2))
                .unwrap()
        })
    });
    c.bench_function("density_oracle p=5 k=4 (direct)", |b| {
        b.iter(|| {
            localdensity::density_oracle(11, &[1, 2, 2, 5], &[5, 1, 1, 1], 5, black_box(28), 4)
                .unwrap()
        })
    });
    c.bench_function("density_oracle p=7 k=5 (ntt)", |b| {
        b.iter(|| {
            localdensity::density_oracle(11, &[1, 2, 2, 5], &[7, 1, 1, 1], 7, black_box(28), 5)
                .unwrap()
        })
    });
}

fn bench_omega(c: &mut Criterion) {
    c.bench_function("omega_p_ratio p=5", |b| {
        b.iter(|| localdensity::omega_p_ratio(11, &[1, 2, 2, 5], 5, black_box(198 + 49)).unwrap())
    });
}

fn bench_sieve_sum(c: &mut Criterion) {
    let cfg = sieve::SieveConfig::power_level(11, 27, 10.0, 11.0).unwrap();
    let h4 = polygonal::PolygonalProblem::new(5, &[1, 1, 1, 1], 100)
        .unwrap()
        .scaled_target()
        .h_times_4;
    c.bench_function("sum_dz z=11", |b| {
        b.iter(|| sieve::sum_dz(&cfg, 5, &[1, 1, 1, 1], black_box(h4)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_enumeration,
    bench_lattice_count,
    bench_density,
    bench_omega,
    bench_sieve_sum
);
criterion_main!(benches);
