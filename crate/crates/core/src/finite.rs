//! Exact finite-N results for the Gaussian potential: partition-function
//! ratio, mean eigenvalue, and the β = 2 spectral density and k-point
//! correlators at finite N and γ, plus a brute-force jpdf reference for
//! N ≤ 3.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gammamix;
use crate::linalg;
use crate::quad::{self, Tolerance};
use crate::specfun::{laguerre, laguerre_normalized, ln_gamma};
use crate::Variant;

/// Above this matrix size the density uses the Christoffel-Darboux form.
pub const CD_THRESHOLD: usize = 20;

/// A finite-N deformed ensemble: N×N Wishart matrix W = X†X with X of size
/// (N+ν)×N, Dyson index β, Gaussian scale n and power-law exponent γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleParams {
    pub beta: u8,
    #[serde(rename = "N")]
    pub n_size: usize,
    pub nu: u32,
    pub n: f64,
    pub gamma: f64,
}

impl EnsembleParams {
    pub fn new(beta: u8, n_size: usize, nu: u32, n: f64, gamma: f64) -> Result<Self> {
        let p = Self { beta, n_size, nu, n, gamma };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with γ = α + (β/2)N(N+ν) + 1.
    pub fn from_alpha(beta: u8, n_size: usize, nu: u32, n: f64, alpha: f64) -> Result<Self> {
        let dof = 0.5 * beta as f64 * n_size as f64 * (n_size + nu as usize) as f64;
        Self::new(beta, n_size, nu, n, alpha + dof + 1.0)
    }

    /// (β/2)N(N+ν), the number of real degrees of freedom over two.
    pub fn dof(&self) -> f64 {
        0.5 * self.beta as f64 * self.n_size as f64 * (self.n_size as f64 + self.nu as f64)
    }

    /// α = γ − (β/2)N(N+ν) − 1, the exponent of the ξ-mixture.
    pub fn alpha(&self) -> f64 {
        self.gamma - self.dof() - 1.0
    }

    pub fn validate(&self) -> Result<()> {
        if ![1, 2, 4].contains(&self.beta) {
            return Err(Error::Domain(format!("beta must be 1, 2 or 4, got {}", self.beta)));
        }
        if self.n_size == 0 {
            return Err(Error::Domain("N must be positive".into()));
        }
        if !(self.n > 0.0) || !self.n.is_finite() {
            return Err(Error::Domain(format!("n must be positive, got {}", self.n)));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must be positive, got {}", self.gamma)));
        }
        gammamix::ratio_exponent(self.gamma, self.beta as f64, self.n_size, self.nu as f64)?;
        Ok(())
    }

    fn require_beta2(&self) -> Result<()> {
        self.validate()?;
        if self.beta != 2 {
            return Err(Error::Unsupported(format!(
                "finite-N orthogonal-polynomial formulas are implemented for beta = 2 only, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    /// Scale s = 2nξ/γ of the Laguerre weight at variance parameter ξ.
    fn scale(&self, xi: f64) -> f64 {
        2.0 * self.n * xi / self.gamma
    }
}

/// ln of ξ^{−(β/2)N(N+ν)}/Γ(γ − (β/2)N(N+ν)).
pub fn ln_partition_ratio(p: &EnsembleParams, xi: f64) -> Result<f64> {
    p.validate()?;
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("xi must be positive, got {xi}")));
    }
    let d = p.dof();
    Ok(-d * xi.ln() - ln_gamma(p.gamma - d))
}

/// Ratio 𝒵(ξ)/(Γ(γ)𝒵_γ) = ξ^{−(β/2)N(N+ν)}/Γ(γ − (β/2)N(N+ν)).
pub fn partition_ratio(p: &EnsembleParams, xi: f64) -> Result<f64> {
    Ok(ln_partition_ratio(p, xi)?.exp())
}

/// ln 𝒵(ξ) of the undeformed eigenvalue integral with weight
/// e^{−ξ(nβ/γ)λ} (Laguerre-Selberg integral; angular constant omitted).
pub fn ln_partition_xi(p: &EnsembleParams, xi: f64) -> f64 {
    let b = p.beta as f64;
    let a = 0.5 * b * (p.nu as f64 + 1.0) - 1.0;
    let mut ln = -p.dof() * (xi * p.n * b / p.gamma).ln();
    for j in 0..p.n_size {
        let jf = j as f64;
        ln += ln_gamma(1.0 + 0.5 * (jf + 1.0) * b) + ln_gamma(a + 1.0 + 0.5 * jf * b)
            - ln_gamma(1.0 + 0.5 * b);
    }
    ln
}

/// ln 𝒵_γ of the deformed eigenvalue integral, in closed form.
pub fn ln_partition_gamma(p: &EnsembleParams) -> Result<f64> {
    p.validate()?;
    let d = p.dof();
    Ok(ln_partition_xi(p, 1.0) + ln_gamma(p.gamma - d) - ln_gamma(p.gamma))
}

/// Mean eigenvalue: (N+ν)/(2n) for the undeformed ensemble,
/// γ(N+ν)/(2n(γ − (β/2)N(N+ν) − 1)) for the deformed one.
pub fn mean_eigenvalue(p: &EnsembleParams, variant: Variant) -> Result<f64> {
    p.validate()?;
    let base = (p.n_size as f64 + p.nu as f64) / (2.0 * p.n);
    match variant {
        Variant::Standard => Ok(base),
        Variant::Generalized => {
            let den = p.gamma - p.dof() - 1.0;
            if !(den > 0.0) {
                return Err(Error::MomentDivergence(format!(
                    "the mean eigenvalue exists only if gamma > (beta/2) N (N + nu) + 1 = {}, got gamma = {}",
                    p.dof() + 1.0,
                    p.gamma
                )));
            }
            Ok(p.gamma * base / den)
        }
    }
}

/// Laguerre orthogonal polynomials for the weight λ^ν e^{−sλ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreBasis {
    pub nu: u32,
    pub count: usize,
    pub scale: f64,
}

impl LaguerreBasis {
    pub fn new(count: usize, nu: u32, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::Domain(format!("Laguerre scale must be positive, got {scale}")));
        }
        Ok(Self { nu, count, scale })
    }

    /// ln h_k with h_k = k!(k+ν)! s^{−(2k+ν+1)}.
    pub fn ln_norm(&self, k: usize) -> f64 {
        let kf = k as f64;
        let nu = self.nu as f64;
        ln_gamma(kf + 1.0) + ln_gamma(kf + nu + 1.0) - (2.0 * kf + nu + 1.0) * self.scale.ln()
    }

    pub fn norm(&self, k: usize) -> f64 {
        self.ln_norm(k).exp()
    }

    /// Monic polynomial π_k(λ) = (−1)^k k! s^{−k} L_k^ν(sλ).
    pub fn monic(&self, k: usize, lambda: f64) -> f64 {
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let ln = ln_gamma(k as f64 + 1.0) - k as f64 * self.scale.ln();
        sign * ln.exp() * laguerre(k, self.nu as f64, self.scale * lambda)
    }
}

/// Σ_{k<N} k!/(k+ν)! L_k^ν(u)² by direct summation.
fn kernel_sum_direct(n_size: usize, nu: u32, u: f64) -> f64 {
    laguerre_normalized(n_size, nu as f64, u).iter().map(|v| v * v).sum()
}

/// The same sum via the equal-argument Christoffel-Darboux identity
/// N!/Γ(N+ν) [L_{N−1}^ν L_{N−1}^{ν+1} − L_N^ν L_{N−2}^{ν+1}].
fn kernel_sum_cd(n_size: usize, nu: u32, u: f64) -> f64 {
    let (n, o) = (n_size, nu as f64);
    if n < 2 {
        return kernel_sum_direct(n, nu, u);
    }
    let pref = (ln_gamma(n as f64 + 1.0) - ln_gamma(n as f64 + o)).exp();
    pref * (laguerre(n - 1, o, u) * laguerre(n - 1, o + 1.0, u) - laguerre(n, o, u) * laguerre(n - 2, o + 1.0, u))
}

/// R(λ; ξ) at β = 2 without the factor e^{−sλ}: s (sλ)^ν Σ_k p_k(sλ)².
fn density_xi_noexp(lambda: f64, n_size: usize, nu: u32, s: f64, use_cd: bool) -> f64 {
    let u = s * lambda;
    let sum = if use_cd { kernel_sum_cd(n_size, nu, u) } else { kernel_sum_direct(n_size, nu, u) };
    s * u.powi(nu as i32) * sum
}

/// Undeformed β = 2 density R(λ; ξ) with weight e^{−(2nξ/γ)λ}, integrating
/// to N. The Christoffel-Darboux form is used for N > 20.
pub fn finite_density_xi(lambda: f64, p: &EnsembleParams, xi: f64) -> Result<f64> {
    p.require_beta2()?;
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("xi must be positive, got {xi}")));
    }
    if lambda < 0.0 {
        return Ok(0.0);
    }
    let s = p.scale(xi);
    let use_cd = p.n_size > CD_THRESHOLD;
    Ok(density_xi_noexp(lambda, p.n_size, p.nu, s, use_cd) * (-s * lambda).exp())
}

/// R(λ; ξ) with the summation path chosen explicitly (for cross-checks).
pub fn finite_density_xi_path(lambda: f64, p: &EnsembleParams, xi: f64, christoffel_darboux: bool) -> Result<f64> {
    p.require_beta2()?;
    let s = p.scale(xi);
    Ok(density_xi_noexp(lambda, p.n_size, p.nu, s, christoffel_darboux) * (-s * lambda).exp())
}

/// Deformed β = 2 density R_γ(λ), the Gamma(α+1) average of R(λ; ξ).
pub fn gen_finite_density(lambda: f64, p: &EnsembleParams) -> Result<f64> {
    p.require_beta2()?;
    if !(lambda > 0.0) {
        return Ok(0.0);
    }
    let a = p.alpha();
    let kappa = 2.0 * p.n * lambda / p.gamma;
    let use_cd = p.n_size > CD_THRESHOLD;
    // e^{−sλ} = e^{−κξ} is pulled into the Gamma weight; the rest is a polynomial in ξ
    gammamix::mix_damped(a, kappa, |xi| density_xi_noexp(lambda, p.n_size, p.nu, p.scale(xi), use_cd))
}

/// Laguerre kernel K(λ, μ; ξ) without the factor e^{−s(λ+μ)/2}.
fn kernel_noexp(x: f64, y: f64, n_size: usize, nu: u32, s: f64) -> f64 {
    let px = laguerre_normalized(n_size, nu as f64, s * x);
    let py = laguerre_normalized(n_size, nu as f64, s * y);
    let sum: f64 = px.iter().zip(&py).map(|(a, b)| a * b).sum();
    s * (s * s * x * y).powf(0.5 * nu as f64) * sum
}

fn kernel_det_noexp(lambdas: &[f64], n_size: usize, nu: u32, s: f64) -> f64 {
    let k = lambdas.len();
    let mut m = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let v = kernel_noexp(lambdas[i], lambdas[j], n_size, nu, s);
            m[i * k + j] = v;
            m[j * k + i] = v;
        }
    }
    linalg::det(&m, k)
}

fn check_kpoint(lambdas: &[f64], kmax: usize) -> Result<()> {
    if lambdas.is_empty() || lambdas.len() > kmax {
        return Err(Error::Domain(format!("k-point function needs 1 ≤ k ≤ {kmax}, got {}", lambdas.len())));
    }
    for (i, &a) in lambdas.iter().enumerate() {
        if !(a > 0.0) {
            return Err(Error::Domain(format!("eigenvalue arguments must be positive, got {a}")));
        }
        if lambdas[..i].contains(&a) {
            return Err(Error::Domain("coincident arguments in the k-point function".into()));
        }
    }
    Ok(())
}

/// Undeformed β = 2 k-point function det[K(λ_i, λ_j; ξ)].
pub fn finite_kpoint_xi(lambdas: &[f64], p: &EnsembleParams, xi: f64) -> Result<f64> {
    p.require_beta2()?;
    check_kpoint(lambdas, 4)?;
    let s = p.scale(xi);
    let total: f64 = lambdas.iter().sum();
    Ok(kernel_det_noexp(lambdas, p.n_size, p.nu, s) * (-s * total).exp())
}

/// Deformed β = 2 k-point function R_γ(λ_1, …, λ_k), k ≤ 4.
pub fn gen_finite_kpoint(lambdas: &[f64], p: &EnsembleParams) -> Result<f64> {
    p.require_beta2()?;
    check_kpoint(lambdas, 4)?;
    // canonical order makes the result bit-identical under permutations
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lambdas = &sorted[..];
    let kappa = 2.0 * p.n * lambdas.iter().sum::<f64>() / p.gamma;
    gammamix::mix_damped(p.alpha(), kappa, |xi| kernel_det_noexp(lambdas, p.n_size, p.nu, p.scale(xi)))
}

/// Connected two-point function of the deformed ensemble next to the
/// Gamma average of the undeformed connected function:
/// (R_γ(λ,μ) − R_γ(λ)R_γ(μ), E[R(λ,μ;ξ) − R(λ;ξ)R(μ;ξ)]).
/// The two differ by the ξ-covariance of R(λ;ξ) and R(μ;ξ).
pub fn connected_two_point_demo(p: &EnsembleParams, lambda: f64, mu: f64) -> Result<(f64, f64)> {
    p.require_beta2()?;
    if p.n_size > 6 {
        return Err(Error::Domain(format!("demo is limited to N ≤ 6, got {}", p.n_size)));
    }
    check_kpoint(&[lambda, mu], 2)?;
    let two = gen_finite_kpoint(&[lambda, mu], p)?;
    let r_l = gen_finite_density(lambda, p)?;
    let r_m = gen_finite_density(mu, p)?;
    let kappa = 2.0 * p.n * (lambda + mu) / p.gamma;
    let product = gammamix::mix_damped(p.alpha(), kappa, |xi| {
        let s = p.scale(xi);
        density_xi_noexp(lambda, p.n_size, p.nu, s, false) * density_xi_noexp(mu, p.n_size, p.nu, s, false)
    })?;
    Ok((two - r_l * r_m, two - product))
}

/// Finite-N density in the macroscopic squared variable,
/// |x| ⟨λ⟩_γ R_γ(⟨λ⟩_γ x²)/N, for comparison with the large-N law.
pub fn rescaled_macro_theta(x: f64, p: &EnsembleParams) -> Result<f64> {
    let mean = mean_eigenvalue(p, Variant::Generalized)?;
    let a = x.abs();
    if a == 0.0 {
        return Ok(0.0);
    }
    Ok(a * mean * gen_finite_density(mean * a * a, p)? / p.n_size as f64)
}

/// Unnormalised deformed jpdf
/// (1 + (nβ/γ)Σλ)^{−γ} Π λ_i^{(β/2)(ν+1)−1} Π_{i<j} |λ_i − λ_j|^β.
pub fn jpdf_weight(lambdas: &[f64], p: &EnsembleParams) -> f64 {
    let b = p.beta as f64;
    let a = 0.5 * b * (p.nu as f64 + 1.0) - 1.0;
    let total: f64 = lambdas.iter().sum();
    let mut ln = -p.gamma * (p.n * b * total / p.gamma).ln_1p();
    for (i, &x) in lambdas.iter().enumerate() {
        if x <= 0.0 {
            return 0.0;
        }
        ln += a * x.ln();
        for &y in &lambdas[..i] {
            let d = (x - y).abs();
            if d == 0.0 {
                return 0.0;
            }
            ln += b * d.ln();
        }
    }
    ln.exp()
}

fn half_line<F: Fn(f64) -> f64>(f: F, marks: &[f64], tol: Tolerance) -> Result<f64> {
    let mut pts: Vec<f64> = vec![0.0];
    pts.extend(marks.iter().copied().filter(|&m| m > 0.0));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let last = *pts.last().unwrap();
    let mut total = if pts.len() > 1 { quad::integrate_with_breaks(&f, &pts, tol)?.value } else { 0.0 };
    total += quad::integrate_to_infinity(&f, last, tol)?.value;
    Ok(total)
}

/// Reference k-point function N!/(N−k)! ∫ 𝒫_γ dλ_{k+1}⋯dλ_N / 𝒵_γ by nested
/// quadrature of the jpdf, for N ≤ 3 and any β. Slow; meant for tests.
pub fn jpdf_marginal(lambdas: &[f64], p: &EnsembleParams) -> Result<f64> {
    p.validate()?;
    let k = lambdas.len();
    let n = p.n_size;
    if n > 3 || k == 0 || k > n {
        return Err(Error::Domain(format!("jpdf reference needs N ≤ 3 and 1 ≤ k ≤ N, got N = {n}, k = {k}")));
    }
    let ln_z = ln_partition_gamma(p)?;
    let comb: f64 = ((n - k + 1)..=n).map(|j| j as f64).product();
    let mean = mean_eigenvalue(p, Variant::Standard)?;
    let tol = Tolerance { abs: 0.0, rel: 1e-10, max_intervals: 4000 };
    let raw = match n - k {
        0 => jpdf_weight(lambdas, p),
        1 => {
            let mut marks = lambdas.to_vec();
            marks.push(mean);
            half_line(
                |x| {
                    let mut v = lambdas.to_vec();
                    v.push(x);
                    jpdf_weight(&v, p)
                },
                &marks,
                tol,
            )?
        }
        _ => {
            let marks = vec![lambdas[0], mean];
            let inner = |x: f64| -> f64 {
                let mut m2 = marks.clone();
                m2.push(x);
                half_line(|y| jpdf_weight(&[lambdas[0], x, y], p), &m2, tol).unwrap_or(f64::NAN)
            };
            half_line(inner, &marks, tol)?
        }
    };
    Ok(comb * raw * (-ln_z).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(n_size: usize, nu: u32, alpha: f64) -> EnsembleParams {
        EnsembleParams::from_alpha(2, n_size, nu, 1.0, alpha).unwrap()
    }

    #[test]
    fn ratio_and_mean_values() {
        let p = EnsembleParams::new(2, 1, 0, 1.0, 3.0).unwrap();
        assert!((partition_ratio(&p, 2.5).unwrap() - 1.0 / 2.5).abs() < 1e-15);
        let q = EnsembleParams::new(2, 2, 0, 1.0, 10.0).unwrap();
        assert!((mean_eigenvalue(&q, Variant::Generalized).unwrap() - 2.0).abs() < 1e-14);
        let r = EnsembleParams::new(2, 3, 1, 0.5, 1e9).unwrap();
        let (g, s) = (
            mean_eigenvalue(&r, Variant::Generalized).unwrap(),
            mean_eigenvalue(&r, Variant::Standard).unwrap(),
        );
        assert!((g / s - 1.0).abs() < 1e-6);
        let bad = EnsembleParams::new(2, 2, 0, 1.0, 4.5).unwrap();
        assert!(matches!(mean_eigenvalue(&bad, Variant::Generalized), Err(Error::MomentDivergence(_))));
        assert!(matches!(EnsembleParams::new(2, 2, 0, 1.0, 4.0), Err(Error::Convergence(_))));
    }

    #[test]
    fn ratio_integrates_to_one() {
        let p = EnsembleParams::new(4, 2, 1, 1.0, 13.5).unwrap();
        let v = quad::integrate_to_infinity(
            |xi| {
                if xi <= 0.0 {
                    return 0.0;
                }
                ((p.gamma - 1.0) * xi.ln() - xi).exp() * partition_ratio(&p, xi).unwrap()
            },
            0.0,
            Tolerance::new(0.0, 1e-11),
        )
        .unwrap()
        .value;
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn partition_gamma_matches_mixture() {
        for p in [p2(3, 1, 2.0), EnsembleParams::from_alpha(1, 3, 0, 1.0, 1.5).unwrap()] {
            let closed = ln_partition_gamma(&p).unwrap();
            // 𝒵_γ = E over Gamma(γ) of 𝒵(ξ)
            let g = gammamix::mix(p.gamma - 1.0, |xi| (ln_partition_xi(&p, xi) - ln_partition_xi(&p, 1.0)).exp())
                .unwrap();
            let mixed = ln_partition_xi(&p, 1.0) + g.ln();
            assert!((closed - mixed).abs() < 1e-9, "{closed} vs {mixed}");
        }
    }

    #[test]
    fn laguerre_norms() {
        let basis = LaguerreBasis::new(7, 2, 1.7).unwrap();
        for k in 0..=6 {
            for l in 0..=6 {
                let v = quad::integrate_to_infinity(
                    |x| basis.monic(k, x) * basis.monic(l, x) * x.powi(2) * (-1.7 * x).exp(),
                    0.0,
                    Tolerance::new(1e-14, 1e-12),
                )
                .unwrap()
                .value;
                let expect = if k == l { basis.norm(k) } else { 0.0 };
                assert!((v - expect).abs() < 1e-8 * basis.norm(k.max(l)), "k {k} l {l}: {v}");
            }
        }
    }

    #[test]
    fn density_xi_normalisation_and_paths() {
        let p = p2(4, 1, 3.0);
        let total = quad::integrate_to_infinity(|x| finite_density_xi(x, &p, 2.0).unwrap(), 0.0, Tolerance::new(0.0, 1e-11))
            .unwrap()
            .value;
        assert!((total - 4.0).abs() < 1e-9, "{total}");
        let one = p2(1, 0, 3.0);
        let s = 2.0 * 3.0 / one.gamma;
        assert!((finite_density_xi(0.8, &one, 3.0).unwrap() - s * (-s * 0.8).exp()).abs() < 1e-15);
        let big = p2(25, 2, 3.0);
        for &x in &[0.05, 1.0, 10.0, 40.0] {
            let d = finite_density_xi_path(x, &big, 5.0, false).unwrap();
            let c = finite_density_xi_path(x, &big, 5.0, true).unwrap();
            assert!((d - c).abs() < 1e-9 * d.abs().max(1e-12), "x {x}: {d} vs {c}");
        }
    }

    #[test]
    fn generalized_density_mass_and_mean() {
        let p = p2(3, 0, 1.5);
        let f = |k: i32| {
            quad::integrate_to_infinity(
                |x| x.powi(k) * gen_finite_density(x, &p).unwrap(),
                0.0,
                Tolerance::new(0.0, 1e-10),
            )
            .unwrap()
            .value
        };
        assert!((f(0) - 3.0).abs() < 1e-7);
        let m = f(1) / 3.0;
        let expect = mean_eigenvalue(&p, Variant::Generalized).unwrap();
        assert!((m / expect - 1.0).abs() < 1e-6, "{m} vs {expect}");
    }

    #[test]
    fn kpoint_against_jpdf() {
        let p = p2(2, 0, 1.0);
        let a = gen_finite_kpoint(&[0.4, 1.3], &p).unwrap();
        let b = jpdf_marginal(&[0.4, 1.3], &p).unwrap();
        assert!((a - b).abs() < 1e-10 * b, "{a} vs {b}");
        let c = gen_finite_kpoint(&[1.3, 0.4], &p).unwrap();
        assert_eq!(a, c);
        let d1 = gen_finite_kpoint(&[0.9], &p).unwrap();
        let d2 = gen_finite_density(0.9, &p).unwrap();
        assert!((d1 - d2).abs() < 1e-12 * d2);
        let j1 = jpdf_marginal(&[0.9], &p).unwrap();
        assert!((d2 - j1).abs() < 1e-8 * d2, "{d2} vs {j1}");
        assert!(gen_finite_kpoint(&[0.4, 0.4], &p).is_err());
    }

    #[test]
    fn jpdf_normalisation_by_quadrature() {
        let p = p2(2, 1, 1.0);
        let tol = Tolerance::new(0.0, 1e-9);
        let z = half_line(
            |x| half_line(|y| jpdf_weight(&[x, y], &p), &[x], tol).unwrap(),
            &[1.0],
            tol,
        )
        .unwrap();
        let closed = ln_partition_gamma(&p).unwrap().exp();
        assert!((z / closed - 1.0).abs() < 1e-7, "{z} vs {closed}");
    }

    #[test]
    fn connected_demo_behaviour() {
        let (a, b) = connected_two_point_demo(&p2(2, 0, 1.0), 0.5, 1.5).unwrap();
        assert!((a - b).abs() > 1e-6 * a.abs());
        let (c, d) = connected_two_point_demo(&p2(2, 0, 1e5), 0.5, 1.5).unwrap();
        assert!((c - d).abs() < 1e-3 * c.abs(), "{c} vs {d}");
    }
}
