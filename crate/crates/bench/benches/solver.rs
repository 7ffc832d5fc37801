use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::{BigInt, BigUint};
use std::hint::black_box;
use sunit_core::abc::verify_baker;
use sunit_core::arith::PrimeSet;
use sunit_core::enumeration::{refined_enumeration_mu, EnumerationConfig};
use sunit_core::lattice::{enumerate_ellipsoid, lll_reduce, IntegerEllipsoid, IntegerLattice};
use sunit_core::relations::relation_basis;
use sunit_core::sieves::{mu_length, refined_sieve, MuVector, SieveContext};
use sunit_core::solver::{solve_sunit, SolverConfig};

fn solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve_first_n");
    g.sample_size(10);
    for n in [3, 4, 5, 6] {
        let set = PrimeSet::first_n(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &set, |b, s| {
            b.iter(|| solve_sunit(black_box(s), &SolverConfig::default()).unwrap())
        });
    }
    g.finish();
}

fn stages(c: &mut Criterion) {
    let set = PrimeSet::first_n(6);
    let t = mu_length(set.len());
    c.bench_function("refined_sieve_s6_n12", |b| {
        let lo = MuVector::lower_schedule(12, t);
        let hi = MuVector::lower_schedule(13, t);
        b.iter(|| refined_sieve(&set, &lo, &hi, &SieveContext::default()).unwrap())
    });
    c.bench_function("enumeration_s6_n8", |b| {
        let mu = MuVector::lower_schedule(8, t);
        b.iter(|| refined_enumeration_mu(&set, &mu, &EnumerationConfig::default()).unwrap())
    });
}

fn lattices(c: &mut Criterion) {
    let gens: Vec<BigUint> = [3u64, 5, 7, 11, 13, 17].iter().map(|&p| BigUint::from(p * p)).collect();
    let modulus = BigUint::from(2u32).pow(40);
    c.bench_function("relation_basis_2^40", |b| {
        b.iter(|| relation_basis(black_box(&gens), &modulus).unwrap())
    });
    let rel = relation_basis(&gens, &modulus).unwrap();
    let lattice = IntegerLattice::new(rel.basis().clone()).unwrap();
    c.bench_function("lll_dim6", |b| b.iter(|| lll_reduce(black_box(&lattice)).unwrap()));
    let weights = vec![BigInt::from(1); 6];
    let ellipsoid = IntegerEllipsoid::diagonal(&weights, BigInt::from(6 * 40 * 40));
    c.bench_function("fincke_pohst_dim6", |b| {
        b.iter(|| enumerate_ellipsoid(&lattice, black_box(&ellipsoid), None).unwrap())
    });
}

fn baker(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify_baker");
    g.sample_size(10);
    g.bench_function("radical_1000", |b| {
        b.iter(|| verify_baker(black_box(1000), &SolverConfig::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, solve, stages, lattices, baker);
criterion_main!(benches);
