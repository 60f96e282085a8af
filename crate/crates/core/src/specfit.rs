//! Fitting the deformed Marčenko-Pastur law to empirical spectra.
//!
//! Spectra are rescaled to unit mean, the normalisation every macroscopic law
//! in this crate uses, so the fit only has to find α. The likelihood is
//! evaluated from a log-log table of ρ_α, which makes each objective value
//! cost a few hundred density evaluations however large the sample is.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::curve::DensityCurve;
use crate::error::{Error, Result};
use crate::finite::EnsembleParams;
use crate::linalg;
use crate::macrolaw::{GenMp, ScalingParams};
use crate::par::Exec;
use crate::sampler::stats::histogram;
use crate::sampler::{Method, Sampler};

/// Search bracket for α.
pub const ALPHA_MIN: f64 = -0.9;
pub const ALPHA_MAX: f64 = 50.0;
/// Number of points of the objective profile.
pub const PROFILE_POINTS: usize = 21;
/// α values closer to zero than this are skipped: the rescaling is singular there.
const ALPHA_GAP: f64 = 1e-3;
const TABLE_POINTS: usize = 1200;
const TABLE_LN_MIN: f64 = -14.0;
const TABLE_LN_MAX: f64 = 14.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Mle,
    LeastSquares,
}

/// Eigenvalues ready for fitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Sorted, positive, unit mean.
    pub eigenvalues: Vec<f64>,
    /// Mean of the raw positive eigenvalues, divided out.
    pub rescale_mean: f64,
    /// Eigenvalues dropped as numerically zero.
    pub zero_count: usize,
    /// Set when the data cannot have full rank (M ≤ N).
    pub rank_deficient: bool,
    /// Aspect ratio min(N, M)/max(N, M) of the data; `None` for bare
    /// eigenvalue lists.
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub alpha_hat: f64,
    pub c: f64,
    /// Mean negative log-likelihood (mle) or binned L2 distance
    /// (least_squares) at the optimum; smaller is better.
    pub objective: f64,
    pub method: FitMethod,
    pub n_eigenvalues: usize,
    pub rescale_mean: f64,
    pub zero_count: usize,
    /// (α, objective) on the coarse profile.
    pub profile: Vec<(f64, f64)>,
    /// The optimum lies at the edge of the search bracket.
    pub boundary_warning: bool,
}

impl FitReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Rescales positive eigenvalues to unit mean, dropping values below
/// 1e-10 × the largest as zeros.
pub fn from_eigenvalues(raw: &[f64]) -> Result<Spectrum> {
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("eigenvalues must be finite".into()));
    }
    let top = raw.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let cut = 1e-10 * top;
    let mut kept: Vec<f64> = raw.iter().copied().filter(|&v| v > cut).collect();
    if kept.len() < 2 {
        return Err(Error::Degenerate("fewer than two positive eigenvalues".into()));
    }
    if raw.iter().any(|&v| v < -cut) {
        return Err(Error::Domain("eigenvalues of a covariance matrix cannot be negative".into()));
    }
    kept.sort_by(f64::total_cmp);
    if kept[0] == kept[kept.len() - 1] {
        return Err(Error::Degenerate("all eigenvalues are identical".into()));
    }
    let mean = kept.iter().sum::<f64>() / kept.len() as f64;
    let eigenvalues = kept.iter().map(|v| v / mean).collect();
    Ok(Spectrum { eigenvalues, rescale_mean: mean, zero_count: raw.len() - kept.len(), rank_deficient: false, c: None })
}

/// Spectrum of W = XᵀX for an M×N table (rows = observations) after
/// standardising every column.
pub fn ingest_timeseries(rows: &[Vec<f64>]) -> Result<Spectrum> {
    let m = rows.len();
    let n = rows.first().map_or(0, |r| r.len());
    if n < 2 || m < 2 {
        return Err(Error::Domain(format!("need at least 2 rows and 2 columns, got {m}×{n}")));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::Parse(format!("row {i} has {} columns, expected {n}", rows[i].len())));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Domain("table contains missing or non-finite values".into()));
    }
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    for (j, col) in cols.iter_mut().enumerate() {
        let mean = col.iter().sum::<f64>() / m as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m as f64;
        if !(var > 1e-300) || var.sqrt() <= 1e-12 * mean.abs() {
            return Err(Error::Degenerate(format!("column {j} is constant")));
        }
        let sd = var.sqrt();
        col.iter_mut().for_each(|v| *v = (*v - mean) / sd);
    }
    for i in 0..n {
        for j in 0..i {
            if cols[i] == cols[j] {
                return Err(Error::Degenerate(format!("columns {j} and {i} are identical")));
            }
        }
    }
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
            w[i * n + j] = s;
            w[j * n + i] = s;
        }
    }
    let ev = linalg::eigensolve_selfadjoint(w, n)?;
    let mut s = from_eigenvalues(&ev)?;
    s.rank_deficient = m <= n;
    s.c = Some(n.min(m) as f64 / n.max(m) as f64);
    Ok(s)
}

/// Parses a table: comma, semicolon, tab or whitespace separated, with an
/// optional non-numeric header row and `#` comments.
pub fn parse_table(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> =
            line.split(|c: char| c == ',' || c == ';' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(r) => rows.push(r),
            Err(_) if rows.is_empty() => continue, // header
            Err(e) => return Err(Error::Parse(format!("line {}: {e}", ln + 1))),
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("no numeric rows".into()));
    }
    Ok(rows)
}

/// ln ρ_α tabulated on a uniform grid in ln x, linearly interpolated and
/// linearly extrapolated beyond the ends (power-law behaviour).
#[derive(Debug, Clone)]
pub struct LnDensityTable {
    step: f64,
    values: Vec<f64>,
}

impl LnDensityTable {
    pub fn new(alpha: f64, c: f64) -> Result<Self> {
        let g = GenMp::new(ScalingParams::new(alpha, c)?)?;
        let step = (TABLE_LN_MAX - TABLE_LN_MIN) / (TABLE_POINTS - 1) as f64;
        let values: Result<Vec<f64>> =
            (0..TABLE_POINTS).map(|i| g.ln_density((TABLE_LN_MIN + i as f64 * step).exp())).collect();
        let values = values?;
        if values.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::Numerical(format!("density table for alpha = {alpha} is not finite")));
        }
        Ok(Self { step, values })
    }

    pub fn ln_density(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::NEG_INFINITY;
        }
        let t = (x.ln() - TABLE_LN_MIN) / self.step;
        let last = self.values.len() - 1;
        let i = (t.floor().max(0.0) as usize).min(last - 1);
        let f = t - i as f64;
        self.values[i] + f * (self.values[i + 1] - self.values[i])
    }
}

fn neg_log_likelihood(x: &[f64], alpha: f64, c: f64) -> Result<f64> {
    let table = LnDensityTable::new(alpha, c)?;
    let s: f64 = x.iter().map(|&v| table.ln_density(v)).sum();
    Ok(-s / x.len() as f64)
}

/// Density histogram used by the least-squares objective: Freedman–Diaconis
/// bins on [0, 99th percentile], normalised by the full sample size.
fn fit_histogram(x: &[f64]) -> Result<DensityCurve> {
    let hi = x[((x.len() - 1) as f64 * 0.99) as usize];
    let body: Vec<f64> = x.iter().copied().filter(|&v| v <= hi).collect();
    histogram(&body, None, Some((0.0, hi)), x.len() as f64)
}

fn binned_l2(h: &DensityCurve, alpha: f64, c: f64) -> Result<f64> {
    let g = GenMp::new(ScalingParams::new(alpha, c)?)?;
    let width = h.grid.get(1).map_or(1.0, |b| b - h.grid[0]);
    let mut s = 0.0;
    for (&x, &y) in h.grid.iter().zip(&h.values) {
        let r = g.density(x)?;
        s += (y - r).powi(2) * width;
    }
    Ok(s)
}

/// Profile abscissae, geometric in α + 1 between the bracket ends.
pub fn profile_alphas() -> Vec<f64> {
    let (lo, hi) = (ALPHA_MIN + 1.0, ALPHA_MAX + 1.0);
    (0..PROFILE_POINTS)
        .map(|k| {
            if k == PROFILE_POINTS - 1 {
                return ALPHA_MAX;
            }
            let a = lo * (hi / lo).powf(k as f64 / (PROFILE_POINTS - 1) as f64) - 1.0;
            if a.abs() < ALPHA_GAP { ALPHA_GAP.copysign(a) } else { a }
        })
        .collect()
}

/// Golden-section minimisation on [a, b].
fn golden<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while b - a > tol * (1.0 + x1.abs()) {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Fits α to a unit-mean spectrum. `c` defaults to the aspect ratio
/// recorded in the spectrum.
pub fn fit_alpha(s: &Spectrum, c: Option<f64>, method: FitMethod, exec: Exec) -> Result<FitReport> {
    let c = c.or(s.c).ok_or_else(|| Error::Domain("c must be given for a bare eigenvalue list".into()))?;
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::Domain(format!("c must lie in (0, 1], got {c}")));
    }
    let x = &s.eigenvalues;
    if x.len() < 2 || x[0] == x[x.len() - 1] {
        return Err(Error::Degenerate("all eigenvalues are identical".into()));
    }
    let hist = match method {
        FitMethod::LeastSquares => Some(fit_histogram(x)?),
        FitMethod::Mle => None,
    };
    let objective = |alpha: f64| -> Result<f64> {
        match &hist {
            None => neg_log_likelihood(x, alpha, c),
            Some(h) => binned_l2(h, alpha, c),
        }
    };
    let alphas = profile_alphas();
    let values: Result<Vec<f64>> = exec.map(&alphas, |&a| objective(a)).into_iter().collect();
    let values = values?;
    let k = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let lo = alphas[k.saturating_sub(1)];
    let hi = alphas[(k + 1).min(PROFILE_POINTS - 1)];
    // refine, keeping away from α = 0 where the law is undefined
    let mut pieces = Vec::new();
    if lo < -ALPHA_GAP {
        pieces.push((lo, hi.min(-ALPHA_GAP)));
    }
    if hi > ALPHA_GAP {
        pieces.push((lo.max(ALPHA_GAP), hi));
    }
    let mut best = (alphas[k], values[k]);
    for (a, b) in pieces {
        if b > a {
            let cand = golden(&objective, a, b, 1e-4)?;
            if cand.1 < best.1 {
                best = cand;
            }
        }
    }
    let span = ALPHA_MAX - ALPHA_MIN;
    let boundary_warning =
        k == 0 || k == PROFILE_POINTS - 1 || best.0 - ALPHA_MIN < 1e-3 * span || ALPHA_MAX - best.0 < 1e-3 * span;
    if !best.1.is_finite() {
        return Err(Error::Numerical("fit objective is not finite at the optimum".into()));
    }
    Ok(FitReport {
        alpha_hat: best.0,
        c,
        objective: best.1,
        method,
        n_eigenvalues: x.len(),
        rescale_mean: s.rescale_mean,
        zero_count: s.zero_count,
        profile: alphas.into_iter().zip(values).collect(),
        boundary_warning,
    })
}

/// MLE objective (mean log-likelihood, larger is better) at a given α.
pub fn mean_log_likelihood(s: &Spectrum, alpha: f64, c: f64) -> Result<f64> {
    Ok(-neg_log_likelihood(&s.eigenvalues, alpha, c)?)
}

/// `x,empirical,fitted` rows: the fit histogram against ρ_α̂.
pub fn overlay_csv(s: &Spectrum, report: &FitReport) -> Result<String> {
    let h = fit_histogram(&s.eigenvalues)?;
    let g = GenMp::new(ScalingParams::new(report.alpha_hat, report.c)?)?;
    let mut out = String::new();
    let _ = writeln!(out, "# powerwl {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# fit: {}", serde_json::to_string(report)?);
    out.push_str("x,empirical,fitted\n");
    for (&x, &y) in h.grid.iter().zip(&h.values) {
        let _ = writeln!(out, "{x:.16e},{y:.16e},{:.16e}", g.density(x)?);
    }
    Ok(out)
}

/// Pooled raw eigenvalues of `draws` real (β = 1) deformed matrices with
/// N = `n_size` and ν ≈ N(1/c − 1). A single draw is a rescaled MP
/// spectrum; the power-law tail only appears across draws.
pub fn synthetic_spectrum(alpha: f64, c: f64, n_size: usize, draws: usize, seed: u64, exec: Exec) -> Result<Vec<f64>> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::Domain(format!("c must lie in (0, 1], got {c}")));
    }
    let nu = (n_size as f64 * (1.0 / c - 1.0)).round() as u32;
    let p = EnsembleParams::from_alpha(1, n_size, nu, 1.0, alpha)?;
    let s = Sampler::new(p)?.method(Method::Bidiagonal).exec(exec).sample(draws, seed)?;
    Ok(s.eigenvalues.into_iter().flatten().collect())
}
