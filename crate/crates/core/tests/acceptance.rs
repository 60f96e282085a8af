//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p powerwl --test acceptance`. The process exits with
//! a non-zero status if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use powerwl::finite::{self, EnsembleParams};
use powerwl::macrolaw::{self, GenMp, ScalingParams};
use powerwl::microlaw::{self, MicroParams};
use powerwl::quad::{self, GaussLegendre, Tolerance};
use powerwl::sampler::stats::{self, Rescaling};
use powerwl::sampler::Sampler;
use powerwl::specfit::{self, FitMethod};
use powerwl::specfun::{bessel_j_int, ln_gamma};
use powerwl::surmise::{self, SpacingParams};
use powerwl::{Exec, Variant};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Least-squares slope of ln f against ln x on a log grid.
fn log_slope(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> f64 {
    let xs: Vec<f64> = (0..points)
        .map(|i| lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (points - 1) as f64)
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&u| f(u.exp()).ln()).collect();
    let n = points as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn c1_normalization_and_moments() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for &alpha in &[-0.5, 0.1, 0.5, 1.0, 3.0, 14.0] {
        for &c in &[0.3, 0.7, 1.0] {
            let g = GenMp::new(ScalingParams::new(alpha, c).map_err(e)?).map_err(e)?;
            let m0 = g.moment(0).map_err(e)?;
            worst = worst.max((m0 - 1.0).abs());
            // the first moment exists only for α > 0
            if alpha > 0.0 {
                let m1 = g.moment(1).map_err(e)?;
                worst = worst.max((m1 - 1.0).abs());
            }
        }
    }
    let t = start.elapsed();
    check(
        worst < 1e-6 && t < Duration::from_secs(30),
        format!("max |moment - 1| = {worst:.2e} over 18 (alpha, c) pairs in {:.1} s", t.as_secs_f64()),
    )
}

fn c2_tail_law() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for &alpha in &[0.5, 1.0, 3.0] {
        for &c in &[0.5, 1.0] {
            let p = ScalingParams::new(alpha, c).map_err(e)?;
            let slope = log_slope(|x| macrolaw::gen_density(x, &p).unwrap(), 1e2, 1e4, 21);
            let rel_slope = (slope / -(alpha + 2.0) - 1.0).abs();
            let rho = macrolaw::gen_density(1e3, &p).map_err(e)?;
            let pref = (rho / macrolaw::tail_asymptote(1e3, &p).map_err(e)? - 1.0).abs();
            ok &= rel_slope < 0.02 && pref < 0.01;
            details.push(format!("a={alpha},c={c}: slope err {rel_slope:.1e}, prefactor err {pref:.1e}"));
        }
    }
    check(ok, details.join("; "))
}

fn c3_small_x_law() -> Outcome {
    let x: f64 = 1e-4;
    let mut worst: f64 = 0.0;
    for &alpha in &[0.5, 1.0, 3.0, 14.0] {
        let p = ScalingParams::new(alpha, 1.0).map_err(e)?;
        let rho = macrolaw::gen_density(x, &p).map_err(e)?;
        let norm = (ln_gamma(alpha + 1.0) - ln_gamma(alpha + 1.5)).exp() * PI * alpha.sqrt();
        worst = worst.max((rho * x.sqrt() * norm - 1.0).abs());
    }
    check(worst < 0.01, format!("max relative deviation at x = 1e-4: {worst:.2e}"))
}

fn c4_pseudo_edge() -> Outcome {
    let root = macrolaw::pseudo_edge(&ScalingParams::new(3.0, 0.3).map_err(e)?).map_err(e)?;
    check((root - 0.055).abs() <= 0.005, format!("c = 0.3, alpha = 3: root {root:.4}"))
}

fn c5_large_alpha() -> Outcome {
    let alpha = 1e4;
    let mut parts = Vec::new();
    let mut ok = true;
    for &c in &[0.5, 1.0] {
        let p = ScalingParams::new(alpha, c).map_err(e)?;
        let (xm, xp) = p.bounds();
        let (lo, hi) = (c * xm + 0.1, c * xp - 0.1);
        let mut sup: f64 = 0.0;
        for i in 0..=200 {
            let x = lo + (hi - lo) * i as f64 / 200.0;
            let d = macrolaw::gen_density(x, &p).map_err(e)? - macrolaw::mp_density(x, c);
            sup = sup.max(d.abs());
        }
        ok &= sup < 1e-2;
        parts.push(format!("macro c={c}: {sup:.1e}"));
    }
    let mp = MicroParams::new(alpha, 0, 2).map_err(e)?;
    let mut sup: f64 = 0.0;
    for i in 1..=100 {
        let y = 0.1 * i as f64;
        let d = microlaw::gen_bessel_density_b2(y, &mp).map_err(e)? - microlaw::bessel_density_b2(y, 0);
        sup = sup.max(d.abs());
    }
    ok &= sup < 1e-2;
    parts.push(format!("Bessel: {sup:.1e}"));
    // N = 2 spacing law with γ = α + (β/2)N(N+ν) + 1
    let sp = SpacingParams::new(2, 0, 1.0, alpha + 5.0).map_err(e)?;
    let mut sup: f64 = 0.0;
    for i in 1..=200 {
        let s = 0.025 * i as f64;
        let d = surmise::gen_spacing_pdf(s, &sp).map_err(e)? - surmise::wl_spacing_pdf(s, &sp).map_err(e)?;
        sup = sup.max(d.abs());
    }
    ok &= sup < 1e-2;
    parts.push(format!("spacing: {sup:.1e}"));
    check(ok, format!("alpha = 1e4 sup distances: {}", parts.join(", ")))
}

fn c6_micro_closed_forms() -> Outcome {
    // density as y∫_0^1 t J_ν(yt)² dt against the closed form
    let mut d_err: f64 = 0.0;
    for nu in 0..=3u32 {
        for &y in &[0.3, 1.0, 4.0, 12.0] {
            let integral = quad::integrate(
                |t: f64| {
                    let j = bessel_j_int(nu as i64, y * t);
                    t * j * j
                },
                0.0,
                1.0,
                Tolerance::new(1e-16, 1e-14),
            )
            .map_err(e)?
            .value;
            let cf = microlaw::bessel_density_b2(y, nu);
            d_err = d_err.max((y * integral - cf).abs());
        }
    }
    let mut f_err: f64 = 0.0;
    for &alpha in &[0.5, 2.0, 10.0] {
        let p = MicroParams::new(alpha, 1, 2).map_err(e)?;
        for &y in &[0.2, 1.0, 3.0, 8.0] {
            let closed = microlaw::first_eig_b2_nu1_closed(y, alpha).map_err(e)?;
            let mixed = microlaw::first_eig_generalized(y, &p).map_err(e)?;
            f_err = f_err.max((closed - mixed).abs() / closed.abs().max(1e-300));
        }
    }
    let mut g_err: f64 = 0.0;
    for &alpha in &[0.5, 2.0, 10.0] {
        let p = MicroParams::new(alpha, 0, 2).map_err(e)?;
        // the gap probability takes the unsquared variable y²
        let gap = |y: f64| microlaw::gap_probability_micro(y * y, &p, Variant::Generalized).unwrap();
        for &y in &[0.3, 1.0, 3.0] {
            let h = 1e-3;
            let deriv = (-gap(y + 2.0 * h) + 8.0 * gap(y + h) - 8.0 * gap(y - h) + gap(y - 2.0 * h)) / (12.0 * h);
            let pdf = microlaw::first_eigenvalue_pdf(y, &p, Variant::Generalized).map_err(e)?;
            g_err = g_err.max((pdf + deriv).abs());
        }
    }
    check(
        d_err < 1e-10 && f_err < 1e-8 && g_err < 1e-8,
        format!("density integral {d_err:.1e}, nu=1 closed form vs mixture {f_err:.1e}, gap derivative {g_err:.1e}"),
    )
}

fn c7_b1_hard_edge() -> Outcome {
    let y = 1e-12;
    let std_v = microlaw::bessel_density_b1(y, 0);
    let mut worst = (std_v - 0.5).abs();
    for &alpha in &[0.1, 2.0, 20.0] {
        let p = MicroParams::new(alpha, 0, 1).map_err(e)?;
        let v = microlaw::micro_density_b1(y, &p, Variant::Generalized).map_err(e)?;
        worst = worst.max((v - 0.5).abs());
    }
    check(worst < 1e-8, format!("max |value - 1/2| at the origin: {worst:.1e}"))
}

fn c8_monte_carlo() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    // (a) trace mean
    for &(beta, n_size, nu) in &[(1u8, 10usize, 0u32), (2, 10, 2), (4, 6, 0)] {
        let p = EnsembleParams::from_alpha(beta, n_size, nu, 1.0, 1.0).map_err(e)?;
        let s = Sampler::new(p).map_err(e)?.sample(20_000, 101).map_err(e)?;
        let m = stats::moments(&stats::trace_per_n(&s)).map_err(e)?;
        let expect = finite::mean_eigenvalue(&p, Variant::Generalized).map_err(e)?;
        let z = (m.mean - expect) / m.std_error;
        ok &= z.abs() < 3.0;
        parts.push(format!("(a) beta={beta}: z = {z:.2}"));
    }
    // (b) smallest eigenvalue in microscopic units
    let p = EnsembleParams::from_alpha(2, 30, 0, 1.0, 1.0).map_err(e)?;
    let s = Sampler::new(p).map_err(e)?.sample(10_000, 202).map_err(e)?;
    let ys = stats::smallest(&s, Rescaling::Micro).map_err(e)?;
    let mp = MicroParams::new(1.0, 0, 2).map_err(e)?;
    let ks = stats::ks_test_pdf(&ys, 0.0, |y| microlaw::first_eigenvalue_pdf(y, &mp, Variant::Generalized).unwrap())
        .map_err(e)?;
    ok &= ks.p_value > 0.01;
    parts.push(format!("(b) KS p = {:.3}", ks.p_value));
    // (c) one eigenvalue per draw against the finite-N density
    let p = EnsembleParams::from_alpha(2, 6, 1, 1.0, 2.0).map_err(e)?;
    let s = Sampler::new(p).map_err(e)?.sample(4_000, 303).map_err(e)?;
    let v = stats::one_per_draw(&s, Rescaling::Raw).map_err(e)?;
    let n = p.n_size as f64;
    let ks = stats::ks_test_pdf(&v, 0.0, |l| finite::gen_finite_density(l, &p).unwrap() / n).map_err(e)?;
    ok &= ks.p_value > 0.01;
    parts.push(format!("(c) KS p = {:.3}", ks.p_value));
    let t = start.elapsed();
    ok &= t < Duration::from_secs(300);
    parts.push(format!("{:.1} s", t.as_secs_f64()));
    check(ok, parts.join("; "))
}

fn c9_surmise() -> Outcome {
    let p = EnsembleParams::new(2, 2, 0, 1.0, 8.0).map_err(e)?;
    let s = Sampler::new(p).map_err(e)?.sample(10_000, 404).map_err(e)?;
    let gaps = stats::spacings(&s, Rescaling::Raw).map_err(e)?;
    let sp = SpacingParams::new(2, 0, 1.0, 8.0).map_err(e)?;
    let ks = stats::ks_test_pdf(&gaps, 0.0, |x| surmise::gen_spacing_pdf(x, &sp).unwrap()).map_err(e)?;
    let mut ok = ks.p_value > 0.01;
    let mut parts = vec![format!("KS p = {:.3}", ks.p_value)];
    for beta in [1u8, 2, 4] {
        let q = SpacingParams::with_varpi(beta, 0.0, 1.0, 2.0).map_err(e)?;
        let slope = log_slope(|x| surmise::rescaled_spacing_pdf(x, &q, Variant::Generalized).unwrap(), 1e2, 1e4, 21);
        let rel = (slope / -3.0 - 1.0).abs();
        ok &= rel < 0.02;
        parts.push(format!("beta={beta} slope {slope:.4}"));
    }
    check(ok, parts.join("; "))
}

fn c10_finite_n_convergence() -> Outcome {
    let alpha = 14.0;
    let lim = ScalingParams::new(alpha, 1.0).map_err(e)?;
    let theta = macrolaw::theta_map(|x| macrolaw::gen_density_c1(x, &lim).unwrap());
    let rule = GaussLegendre::new(200);
    let mut dists = Vec::new();
    for n_size in [2usize, 4, 8] {
        let p = EnsembleParams::from_alpha(2, n_size, 0, 1.0, alpha).map_err(e)?;
        // both curves are even in x; integrate over [0, 4] in four panels
        let mut d = 0.0;
        for k in 0..4 {
            let a = k as f64;
            d += rule.integrate(a, a + 1.0, |x| (finite::rescaled_macro_theta(x, &p).unwrap() - theta(x)).abs());
        }
        dists.push(2.0 * d);
    }
    let ok = dists.windows(2).all(|w| w[1] < w[0]);
    check(ok, format!("L1 distances N=2,4,8: {:.4}, {:.4}, {:.4}", dists[0], dists[1], dists[2]))
}

fn c11_fit_recovery() -> Outcome {
    let mut hits = 0;
    let mut fits = Vec::new();
    for seed in 0..10u64 {
        let raw = specfit::synthetic_spectrum(1.0, 0.5, 200, 4000, 1000 + seed, Exec::default()).map_err(e)?;
        let s = specfit::from_eigenvalues(&raw).map_err(e)?;
        let r = specfit::fit_alpha(&s, Some(0.5), FitMethod::Mle, Exec::default()).map_err(e)?;
        if (0.85..=1.15).contains(&r.alpha_hat) {
            hits += 1;
        }
        fits.push(format!("{:.3}", r.alpha_hat));
    }
    check(hits >= 8, format!("{hits}/10 seeds in [0.85, 1.15]: {}", fits.join(" ")))
}

fn c12_non_universality() -> Outcome {
    let rel = |alpha: f64| -> Result<f64, String> {
        let p = EnsembleParams::from_alpha(2, 2, 0, 1.0, alpha).map_err(e)?;
        let (a, b) = finite::connected_two_point_demo(&p, 0.5, 1.5).map_err(e)?;
        Ok((a - b).abs() / a.abs().max(b.abs()))
    };
    let (r1, r5) = (rel(1.0)?, rel(1e5)?);
    check(r1 > 1e-6 && r5 < 1e-3, format!("relative difference {r1:.2e} at alpha = 1, {r5:.2e} at alpha = 1e5"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("normalization and first moment", c1_normalization_and_moments),
        ("tail law", c2_tail_law),
        ("small-x law", c3_small_x_law),
        ("pseudo-edge", c4_pseudo_edge),
        ("large-alpha limit", c5_large_alpha),
        ("microscopic closed forms", c6_micro_closed_forms),
        ("beta=1 hard-edge value", c7_b1_hard_edge),
        ("Monte Carlo vs analytic", c8_monte_carlo),
        ("spacing laws", c9_surmise),
        ("finite-N convergence", c10_finite_n_convergence),
        ("fit recovery", c11_fit_recovery),
        ("non-universality witness", c12_non_universality),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}: {name} ({detail}) [{:.1} s]", i + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
