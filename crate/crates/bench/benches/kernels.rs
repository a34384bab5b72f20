use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gleason_csm::csm::{empirical_frequencies, Modality};
use gleason_csm::frame::reconstruct_rho;
use gleason_csm::hilbert::{random_basis, random_density_matrix};
use gleason_csm::scalar_lemma::check_hypotheses;
use gleason_csm::seed;
use gleason_csm::sphere::build_piron_chain;
use gleason_csm::{Field, FrameFunction, ScalarCandidate, UnitVector};

fn haar(c: &mut Criterion) {
    let mut g = c.benchmark_group("random_basis");
    for dim in [3, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, &dim| {
            let mut s = 0;
            b.iter(|| {
                s += 1;
                random_basis(dim, Field::Complex, black_box(s)).unwrap()
            })
        });
    }
    g.finish();
}

fn reconstruction(c: &mut Criterion) {
    let mut g = c.benchmark_group("reconstruct_rho");
    for dim in [3, 6] {
        let rho = random_density_matrix(dim, Field::Complex, dim, &mut seed::rng(1)).unwrap();
        let f = FrameFunction::born(rho, Field::Complex);
        g.bench_with_input(BenchmarkId::from_parameter(dim), &f, |b, f| b.iter(|| reconstruct_rho(f, 200, 7).unwrap()));
    }
    g.finish();
}

fn chains(c: &mut Criterion) {
    let p = UnitVector::real(&[0.0, 0.0, 1.0]).unwrap();
    let u = UnitVector::real(&[1.0, 0.0, 3.0]).unwrap();
    let mut g = c.benchmark_group("piron_chain");
    for gap in [0.1, 0.01] {
        let hu = u.overlap(&p);
        let hv = hu - gap;
        let v = UnitVector::real(&[0.0, (1.0 - hv).sqrt(), hv.sqrt()]).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(gap), &v, |b, v| {
            b.iter(|| build_piron_chain(&u, v, &p, 1000).unwrap())
        });
    }
    g.finish();
}

fn triple_scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("h3_scan");
    for q in [60, 240] {
        let cand = ScalarCandidate::identity(q).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(q), &cand, |b, cand| b.iter(|| check_hypotheses(cand)));
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let from = Arc::new(random_basis(3, Field::Complex, 1).unwrap());
    let to = Arc::new(random_basis(3, Field::Complex, 2).unwrap());
    let m = Modality::new(from, 0).unwrap();
    c.bench_function("empirical_frequencies/100000", |b| {
        b.iter(|| empirical_frequencies(&m, &to, 100_000, 3).unwrap())
    });
}

criterion_group!(benches, haar, reconstruction, chains, triple_scan, sampling);
criterion_main!(benches);
