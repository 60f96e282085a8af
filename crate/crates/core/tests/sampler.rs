use powerwl::finite::{self, EnsembleParams};
use powerwl::sampler::stats::{self, Rescaling};
use powerwl::sampler::{read_csv, write_csv, Method, Sampler};
use powerwl::specfun::ln_gamma;
use powerwl::{Exec, Variant};

#[test]
fn positive_semidefinite_and_sorted() {
    for beta in [1u8, 2, 4] {
        let p = EnsembleParams::from_alpha(beta, 5, 2, 1.0, 0.5).unwrap();
        let s = Sampler::new(p).unwrap().sample(200, 8).unwrap();
        s.validate().unwrap();
        assert!(s.eigenvalues.iter().flatten().all(|&v| v >= 0.0));
    }
}

#[test]
fn determinism_across_modes_and_methods() {
    let p = EnsembleParams::from_alpha(2, 30, 0, 1.0, 1.0).unwrap();
    for m in [Method::Dense, Method::Bidiagonal] {
        let a = Sampler::new(p).unwrap().method(m).exec(Exec::Sequential).sample(30, 7).unwrap();
        let b = Sampler::new(p).unwrap().method(m).exec(Exec::Parallel).sample(30, 7).unwrap();
        assert_eq!(write_csv(&a).unwrap(), write_csv(&b).unwrap());
        assert_eq!(read_csv(&write_csv(&a).unwrap()).unwrap(), a);
    }
}

#[test]
fn near_gaussian_mean() {
    let p = EnsembleParams::new(2, 4, 1, 1.0, 1e6).unwrap();
    let s = Sampler::new(p).unwrap().sample(5000, 3).unwrap();
    let m = stats::moments(&stats::trace_per_n(&s)).unwrap();
    let expect = finite::mean_eigenvalue(&p, Variant::Standard).unwrap();
    assert!((m.mean - expect).abs() < 4.0 * m.std_error, "{} vs {expect}", m.mean);
}

#[test]
fn single_real_eigenvalue_law() {
    // N = 1, ν = 0, β = 1: density λ^{−1/2}(1 + nλ/γ)^{−γ} k^{1/2}/B(1/2, γ−1/2), k = n/γ
    let p = EnsembleParams::new(1, 1, 0, 1.0, 4.0).unwrap();
    let s = Sampler::new(p).unwrap().sample(5000, 11).unwrap();
    let v = stats::pooled(&s, Rescaling::Raw).unwrap();
    let (g, k) = (p.gamma, p.n / p.gamma);
    let ln_b = ln_gamma(0.5) + ln_gamma(g - 0.5) - ln_gamma(g);
    let pdf = |l: f64| (0.5 * k.ln() - ln_b - 0.5 * l.ln() - g * (k * l).ln_1p()).exp();
    let ks = stats::ks_test_pdf(&v, 0.0, pdf).unwrap();
    assert!(ks.p_value > 0.01, "p = {}", ks.p_value);
}

#[test]
fn conditional_sampler_matches_fixed_xi_density() {
    let p = EnsembleParams::from_alpha(2, 4, 1, 1.0, 2.0).unwrap();
    let xi = 2.5;
    let s = Sampler::new(p).unwrap().fixed_xi(Some(xi)).sample(4000, 5).unwrap();
    let v = stats::one_per_draw(&s, Rescaling::Raw).unwrap();
    let ks = stats::ks_test_pdf(&v, 0.0, |l| finite::finite_density_xi(l, &p, xi).unwrap() / 4.0).unwrap();
    assert!(ks.p_value > 0.01, "p = {}", ks.p_value);
}

#[test]
fn heavy_tail_witness() {
    let heavy = EnsembleParams::from_alpha(1, 10, 0, 1.0, 1.0).unwrap();
    let light = EnsembleParams::new(1, 10, 0, 1.0, 1e6).unwrap();
    let k = |p| {
        let s = Sampler::new(p).unwrap().sample(4000, 9).unwrap();
        stats::moments(&stats::trace_per_n(&s)).unwrap().kurtosis
    };
    assert!(k(heavy) > k(light));
}

#[test]
fn statistics_edge_cases() {
    let p = EnsembleParams::from_alpha(2, 2, 0, 1.0, 3.0).unwrap();
    let s = Sampler::new(p).unwrap().sample(100, 1).unwrap();
    assert_eq!(stats::spacings(&s, Rescaling::Raw).unwrap().len(), 100);
    assert_eq!(stats::smallest(&s, Rescaling::Raw).unwrap().len(), 100);
    let h = stats::spectrum_histogram(&s, Rescaling::MeanScaled, Some(20)).unwrap();
    assert!((h.values.iter().sum::<f64>() * (h.grid[1] - h.grid[0]) - 1.0).abs() < 1e-12);
    let mut empty = s.clone();
    empty.eigenvalues.clear();
    assert!(stats::pooled(&empty, Rescaling::Raw).is_err());
}
