//! Sequential vs parallel throughput of the data-parallel kernels.
//!
//! Without the `parallel` feature both modes run on one thread, which gives
//! the baseline for the speed-up.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use powerwl::curve::{DensityCurve, Grid, GridScale, LawId};
use powerwl::finite::EnsembleParams;
use powerwl::macrolaw::{self, ScalingParams};
use powerwl::sampler::{Method, Sampler};
use powerwl::specfit::{self, FitMethod};
use powerwl::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample");
    g.sample_size(10);
    let p = EnsembleParams::from_alpha(2, 30, 0, 1.0, 1.0).unwrap();
    for (name, exec) in MODES {
        for method in [Method::Dense, Method::Bidiagonal] {
            let s = Sampler::new(p).unwrap().method(method).exec(exec);
            g.bench_with_input(BenchmarkId::new(format!("{method:?}"), name), &s, |b, s| {
                b.iter(|| black_box(s.sample(200, 7).unwrap()))
            });
        }
    }
    g.finish();
}

fn tabulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("density_macro");
    g.sample_size(10);
    let p = ScalingParams::new(3.0, 0.3).unwrap();
    let grid = Grid::new(1e-3, 8.0, 512, GridScale::Log).unwrap().points();
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| {
                DensityCurve::tabulate(LawId::GeneralizedMp, serde_json::Value::Null, &grid, exec, |x| {
                    macrolaw::gen_density(x, &p)
                })
                .unwrap()
            })
        });
    }
    g.finish();
}

fn fitting(c: &mut Criterion) {
    let mut g = c.benchmark_group("fit_profile");
    g.sample_size(10);
    let raw = specfit::synthetic_spectrum(1.0, 0.5, 50, 100, 1, Exec::default()).unwrap();
    let s = specfit::from_eigenvalues(&raw).unwrap();
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| specfit::fit_alpha(&s, Some(0.5), FitMethod::Mle, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, sampling, tabulation, fitting);
criterion_main!(benches);
