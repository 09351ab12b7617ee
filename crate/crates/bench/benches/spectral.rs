use std::hint::black_box;

use besov_ns::besov::{besov_norm_full, BesovParams};
use besov_ns::bony::bony_decompose;
use besov_ns::commutator::CommutatorWorkspace;
use besov_ns::ns::{step, SolverState};
use besov_ns::{default_lp, Exponent};
use besov_ns_bench::{scalar, velocity, SEED};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn fft(c: &mut Criterion) {
    let mut g = c.benchmark_group("fft_round_trip");
    for n in [32, 64] {
        let u = scalar(n, SEED);
        g.bench_with_input(BenchmarkId::from_parameter(n), &u, |b, u| {
            b.iter(|| black_box(u.to_physical()).to_spectral().unwrap())
        });
    }
    g.finish();
}

fn besov(c: &mut Criterion) {
    let mut g = c.benchmark_group("besov_norm");
    let params = [
        ("s0.5_p2_q2", BesovParams::new(0.5, Exponent::TWO, Exponent::TWO)),
        ("s-0.5_pinf_qinf", BesovParams::new(-0.5, Exponent::INFINITY, Exponent::INFINITY)),
    ];
    for n in [32, 64] {
        let u = scalar(n, SEED);
        for (name, p) in params {
            g.bench_with_input(BenchmarkId::new(name, n), &u, |b, u| {
                b.iter(|| besov_norm_full(default_lp(), u, p).unwrap())
            });
        }
    }
    g.finish();
}

fn bony(c: &mut Criterion) {
    let mut g = c.benchmark_group("bony_decompose");
    g.sample_size(10);
    for n in [32, 64] {
        let (u, v) = (scalar(n, SEED), scalar(n, SEED + 1));
        g.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| bony_decompose(default_lp(), &u, &v).unwrap())
        });
    }
    g.finish();
}

fn commutator(c: &mut Criterion) {
    let mut g = c.benchmark_group("commutator_all_bands");
    g.sample_size(10);
    let (v, f) = (velocity(32, SEED), scalar(32, SEED + 1));
    g.bench_function("32", |b| {
        b.iter(|| {
            let ws = CommutatorWorkspace::new(default_lp(), &v, &f).unwrap();
            ws.bands().iter().map(|j| ws.decompose(j).identity_defect()).fold(0.0, f64::max)
        })
    });
    g.finish();
}

fn ns_step(c: &mut Criterion) {
    let mut g = c.benchmark_group("ns_rk4_step");
    g.sample_size(10);
    for n in [32, 64] {
        let state = SolverState::new(velocity(n, SEED), 1e-3).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &state, |b, s| b.iter(|| step(s, 1e-3).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, fft, besov, bony, commutator, ns_step);
criterion_main!(benches);
