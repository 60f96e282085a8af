//! Empirical statistics of sampled spectra and goodness-of-fit tests.

use serde::{Deserialize, Serialize};

use super::SpectrumSample;
use crate::curve::{DensityCurve, LawId};
use crate::error::{Error, Result};
use crate::finite::mean_eigenvalue;
use crate::microlaw::{b_constant, lambda_to_y};
use crate::quad::{self, Tolerance};
use crate::Variant;

/// How raw eigenvalues are mapped before a statistic is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rescaling {
    Raw,
    /// λ / ⟨λ⟩, using the exact mean of the ensemble.
    MeanScaled,
    /// y = √(4N²b²λ/⟨λ⟩), the squared variable of the microscopic laws.
    Micro,
    /// Spacings divided by their empirical mean.
    SpacingScaled,
}

fn require_draws(s: &SpectrumSample) -> Result<()> {
    if s.eigenvalues.is_empty() {
        return Err(Error::Domain("sample has no draws".into()));
    }
    Ok(())
}

/// Mean eigenvalue used for rescaling: the deformed mean when it exists,
/// which needs α > 0.
fn ensemble_mean(s: &SpectrumSample) -> Result<f64> {
    mean_eigenvalue(&s.params, Variant::Generalized)
}

/// Maps eigenvalues of `s` (any subset) to the requested scale.
pub fn rescale(s: &SpectrumSample, values: &[f64], rescaling: Rescaling) -> Result<Vec<f64>> {
    match rescaling {
        Rescaling::Raw => Ok(values.to_vec()),
        Rescaling::MeanScaled => {
            let m = ensemble_mean(s)?;
            Ok(values.iter().map(|v| v / m).collect())
        }
        Rescaling::Micro => {
            let m = ensemble_mean(s)?;
            let b = b_constant(s.params.alpha());
            Ok(values.iter().map(|&v| lambda_to_y(v, m, s.params.n_size, b)).collect())
        }
        Rescaling::SpacingScaled => {
            let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
            if !(mean > 0.0) {
                return Err(Error::Degenerate("spacings have zero mean".into()));
            }
            Ok(values.iter().map(|v| v / mean).collect())
        }
    }
}

/// All eigenvalues pooled across draws.
pub fn pooled(s: &SpectrumSample, rescaling: Rescaling) -> Result<Vec<f64>> {
    require_draws(s)?;
    let all: Vec<f64> = s.eigenvalues.iter().flatten().copied().collect();
    rescale(s, &all, rescaling)
}

/// One eigenvalue per draw, taking index `d mod N` in draw `d`. Unlike the
/// pooled set these values are independent, as a KS test assumes, and their
/// law is still the one-point density.
pub fn one_per_draw(s: &SpectrumSample, rescaling: Rescaling) -> Result<Vec<f64>> {
    require_draws(s)?;
    let v: Vec<f64> = s.eigenvalues.iter().enumerate().map(|(d, ev)| ev[d % ev.len()]).collect();
    rescale(s, &v, rescaling)
}

/// Smallest eigenvalue of each draw.
pub fn smallest(s: &SpectrumSample, rescaling: Rescaling) -> Result<Vec<f64>> {
    require_draws(s)?;
    let v: Vec<f64> = s.eigenvalues.iter().map(|ev| ev[0]).collect();
    rescale(s, &v, rescaling)
}

/// Nearest-neighbour gaps of each draw: the middle third of the spectrum for
/// N > 2, the single gap for N = 2.
pub fn spacings(s: &SpectrumSample, rescaling: Rescaling) -> Result<Vec<f64>> {
    require_draws(s)?;
    let n = s.params.n_size;
    if n < 2 {
        return Err(Error::Domain("spacings need N >= 2".into()));
    }
    let (lo, hi) = if n == 2 { (0, 2) } else { (n / 3, (2 * n).div_ceil(3).max(n / 3 + 2).min(n)) };
    let mut gaps = Vec::new();
    for ev in &s.eigenvalues {
        gaps.extend(ev[lo..hi].windows(2).map(|w| w[1] - w[0]));
    }
    match rescaling {
        Rescaling::Raw | Rescaling::SpacingScaled => rescale(s, &gaps, rescaling),
        Rescaling::MeanScaled => rescale(s, &gaps, rescaling),
        Rescaling::Micro => Err(Error::Domain("micro rescaling does not apply to spacings".into())),
    }
}

/// Sample mean, standard error of the mean, variance and kurtosis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub std_error: f64,
    pub variance: f64,
    pub kurtosis: f64,
}

pub fn moments(values: &[f64]) -> Result<Moments> {
    let k = values.len();
    if k < 2 {
        return Err(Error::Domain("moments need at least two values".into()));
    }
    let kf = k as f64;
    let mean = values.iter().sum::<f64>() / kf;
    let (m2, m4) = values.iter().fold((0.0, 0.0), |(a, b), v| {
        let d = (v - mean) * (v - mean);
        (a + d, b + d * d)
    });
    let variance = m2 / (kf - 1.0);
    let pop = m2 / kf;
    Ok(Moments {
        count: k,
        mean,
        std_error: (variance / kf).sqrt(),
        variance,
        kurtosis: if pop > 0.0 { m4 / kf / (pop * pop) } else { f64::NAN },
    })
}

/// Tr(W)/N for every draw.
pub fn trace_per_n(s: &SpectrumSample) -> Vec<f64> {
    s.eigenvalues.iter().map(|ev| ev.iter().sum::<f64>() / ev.len() as f64).collect()
}

/// Freedman–Diaconis bin width 2·IQR/k^{1/3}.
pub fn freedman_diaconis_width(values: &[f64]) -> Result<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (v.len() - 1) as f64;
        let i = h.floor() as usize;
        let t = h - i as f64;
        if i + 1 < v.len() { v[i] * (1.0 - t) + v[i + 1] * t } else { v[i] }
    };
    let iqr = q(0.75) - q(0.25);
    let width = 2.0 * iqr / (v.len() as f64).cbrt();
    if !(width > 0.0) {
        return Err(Error::Degenerate("values have zero interquartile range".into()));
    }
    Ok(width)
}

/// Density histogram on [min, max] of `values`. Counts are divided by bin
/// width times `normalizer` (draws × N for a one-point density, or the
/// value count for a probability density). Bins come from Freedman–Diaconis
/// unless `bins` is given; the curve holds bin centres.
pub fn histogram(values: &[f64], bins: Option<usize>, range: Option<(f64, f64)>, normalizer: f64) -> Result<DensityCurve> {
    if values.is_empty() {
        return Err(Error::Domain("histogram of an empty sample".into()));
    }
    let (lo, hi) = match range {
        Some(r) => r,
        None => values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v))),
    };
    if !(hi > lo) {
        return Err(Error::Degenerate("histogram range is empty".into()));
    }
    let count = match bins {
        Some(b) if b > 0 => b,
        Some(_) => return Err(Error::Domain("bin count must be positive".into())),
        None => (((hi - lo) / freedman_diaconis_width(values)?).ceil() as usize).clamp(1, 100_000),
    };
    let width = (hi - lo) / count as f64;
    let mut counts = vec![0usize; count];
    for &v in values {
        if v < lo || v > hi {
            continue;
        }
        let i = (((v - lo) / width) as usize).min(count - 1);
        counts[i] += 1;
    }
    let centres = (0..count).map(|i| lo + (i as f64 + 0.5) * width).collect();
    let dens = counts.iter().map(|&c| c as f64 / (width * normalizer)).collect();
    DensityCurve::new(
        LawId::Histogram,
        serde_json::json!({"bins": count, "min": lo, "max": hi, "normalizer": normalizer}),
        centres,
        dens,
    )
}

/// One-point density histogram of a spectrum sample, normalised by bin width
/// × draws × N so that it estimates the eigenvalue density.
pub fn spectrum_histogram(s: &SpectrumSample, rescaling: Rescaling, bins: Option<usize>) -> Result<DensityCurve> {
    let v = pooled(s, rescaling)?;
    let norm = (s.draws() * s.params.n_size) as f64;
    histogram(&v, bins, None, norm)
}

/// Result of a one-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub count: usize,
}

/// Kolmogorov survival function Q(λ) = 2Σ(−1)^{k−1}e^{−2k²λ²}.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// KS test of `values` against the continuous CDF `cdf`, with the
/// Stephens small-sample correction of the statistic.
pub fn ks_test<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> Result<KsResult> {
    if values.is_empty() {
        return Err(Error::Domain("KS test of an empty sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        if !f.is_finite() {
            return Err(Error::Numerical(format!("CDF is not finite at {x}")));
        }
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let sn = n.sqrt();
    Ok(KsResult { statistic: d, p_value: kolmogorov_q((sn + 0.12 + 0.11 / sn) * d), count: v.len() })
}

/// KS test against a density on [lower, ∞): the CDF at the sorted sample
/// points is built by integrating `pdf` between consecutive points.
pub fn ks_test_pdf<F: Fn(f64) -> f64>(values: &[f64], lower: f64, pdf: F) -> Result<KsResult> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let tol = Tolerance::new(1e-13, 1e-10);
    let mut cdf_vals = Vec::with_capacity(v.len());
    let mut acc = 0.0;
    let mut prev = lower;
    for &x in &v {
        if x > prev {
            acc += quad::integrate(&pdf, prev, x, tol)?.value;
            prev = x;
        }
        cdf_vals.push(acc);
    }
    let total = acc + quad::integrate_to_infinity(&pdf, prev, tol)?.value;
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Accuracy(format!("reference density has mass {total}, expected 1")));
    }
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, f) in cdf_vals.iter().enumerate() {
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let sn = n.sqrt();
    Ok(KsResult { statistic: d, p_value: kolmogorov_q((sn + 0.12 + 0.11 / sn) * d), count: v.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::EnsembleParams;
    use crate::sampler::Sampler;

    #[test]
    fn kolmogorov_reference_values() {
        // Q(1.36) ≈ 0.0494, Q(1.63) ≈ 0.0098
        assert!((kolmogorov_q(1.36) - 0.0494).abs() < 5e-4);
        assert!((kolmogorov_q(1.63) - 0.0098).abs() < 3e-4);
        assert_eq!(kolmogorov_q(0.0), 1.0);
    }

    #[test]
    fn ks_accepts_uniform_and_rejects_shift() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_test(&v, |x| x.clamp(0.0, 1.0)).unwrap().p_value > 0.99);
        assert!(ks_test(&v, |x| (x * x).clamp(0.0, 1.0)).unwrap().p_value < 1e-6);
        // exponential quantiles against the exponential density
        let q: Vec<f64> = v.iter().map(|u| -(1.0 - u).ln()).collect();
        let e = ks_test_pdf(&q, 0.0, |x| (-x).exp()).unwrap();
        assert!(e.p_value > 0.99);
    }

    #[test]
    fn histogram_normalisation() {
        let v: Vec<f64> = (0..10_000).map(|i| (i as f64 + 0.5) / 10_000.0).collect();
        let h = histogram(&v, None, None, v.len() as f64).unwrap();
        assert!((h.values.iter().sum::<f64>() * (h.grid[1] - h.grid[0]) - 1.0).abs() < 1e-12);
        assert!(histogram(&[1.0, 1.0], None, None, 2.0).is_err());
    }

    #[test]
    fn mean_scaled_first_moment() {
        let p = EnsembleParams::from_alpha(2, 4, 0, 1.0, 6.0).unwrap();
        let s = Sampler::new(p).unwrap().sample(4000, 2).unwrap();
        let m = moments(&pooled(&s, Rescaling::MeanScaled).unwrap()).unwrap();
        assert!((m.mean - 1.0).abs() < 4.0 * m.std_error * 2.0);
        let g = spacings(&s, Rescaling::SpacingScaled).unwrap();
        assert!((g.iter().sum::<f64>() / g.len() as f64 - 1.0).abs() < 1e-12);
    }
}
