//! Fast invariants over the whole library, meant to run in a few seconds.

use powerwl::finite::{self, EnsembleParams};
use powerwl::macrolaw::{self, ScalingParams};
use powerwl::microlaw::{self, MicroParams};
use powerwl::quad::{self, Tolerance};
use powerwl::sampler::Sampler;
use powerwl::surmise::{self, SpacingParams};
use powerwl::{Exec, Result, Variant};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn run(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: e.to_string() },
    }
}

fn mass_on_half_line(f: impl Fn(f64) -> f64) -> Result<f64> {
    let tol = Tolerance::new(1e-12, 1e-9);
    let head = quad::integrate(&f, 0.0, 1.0, tol)?.value;
    // x = 1/t maps (1, ∞) onto (0, 1)
    let tail = quad::integrate(|t: f64| if t <= 0.0 { 0.0 } else { f(1.0 / t) / (t * t) }, 0.0, 1.0, tol)?.value;
    Ok(head + tail)
}

pub fn checks(exec: Exec) -> Vec<Check> {
    vec![
        run("mp-normalization", || {
            let c: f64 = 0.5;
            let lo = (1.0 - c.sqrt()).powi(2);
            let hi = (1.0 + c.sqrt()).powi(2);
            let m = quad::integrate(|x| macrolaw::mp_density(x, c), lo, hi, Tolerance::new(1e-12, 1e-10))?.value;
            Ok(((m - 1.0).abs() < 1e-8, format!("mass {m:.12}")))
        }),
        run("generalized-mp-mass-and-mean", || {
            let law = macrolaw::GenMp::new(ScalingParams::new(2.0, 1.0)?)?;
            let m0 = law.moment(0)?;
            let m1 = law.moment(1)?;
            Ok(((m0 - 1.0).abs() < 1e-6 && (m1 - 1.0).abs() < 1e-6, format!("mass {m0:.10}, mean {m1:.10}")))
        }),
        run("gap-derivative-is-first-eigenvalue", || {
            let p = MicroParams::new(2.0, 0, 2)?;
            let gap = |y: f64| microlaw::gap_probability_micro(y * y, &p, Variant::Generalized);
            let (y, h) = (1.0, 1e-3);
            let deriv = (-gap(y + 2.0 * h)? + 8.0 * gap(y + h)? - 8.0 * gap(y - h)? + gap(y - 2.0 * h)?) / (12.0 * h);
            let pdf = microlaw::first_eigenvalue_pdf(y, &p, Variant::Generalized)?;
            let err = (pdf + deriv).abs();
            Ok((err < 1e-7, format!("|p + dE/dy| = {err:.1e}")))
        }),
        run("spacing-normalization", || {
            let p = SpacingParams::new(2, 0, 1.0, 12.0)?;
            let m = mass_on_half_line(|s| surmise::spacing_pdf(s, &p, Variant::Generalized).unwrap_or(f64::NAN))?;
            Ok(((m - 1.0).abs() < 1e-6, format!("mass {m:.10}")))
        }),
        run("finite-density-counts-eigenvalues", || {
            let p = EnsembleParams::from_alpha(2, 2, 0, 1.0, 2.0)?;
            let m = mass_on_half_line(|l| finite::gen_finite_density(l, &p).unwrap_or(f64::NAN))?;
            Ok(((m - 2.0).abs() < 1e-6, format!("integral {m:.10} for N = 2")))
        }),
        run("sampler-reproducible-across-modes", || {
            let p = EnsembleParams::from_alpha(2, 3, 1, 1.0, 3.0)?;
            let a = Sampler::new(p)?.exec(Exec::Sequential).sample(64, 7)?;
            let b = Sampler::new(p)?.exec(exec).sample(64, 7)?;
            Ok((a.eigenvalues == b.eigenvalues, format!("{} eigenvalues compared", a.eigenvalues.len())))
        }),
    ]
}
