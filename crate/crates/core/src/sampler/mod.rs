//! Monte Carlo sampling of the deformed ensembles.
//!
//! A draw first picks the variance scale ξ ~ Gamma(γ − (β/2)N(N+ν)), then a
//! Gaussian (N+ν)×N matrix X whose real degrees of freedom have variance
//! γ/(2nβξ). That variance makes the conditional weight
//! exp[−ξ(nβ/γ) Tr X†X]; integrating ξ back out gives the power-law weight.
//! The ξ shape absorbs the ξ^{−(β/2)N(N+ν)} from the Gaussian normalisation.
//!
//! Every draw owns its own ChaCha8 stream (seed, draw index), so samples do
//! not depend on how draws are scheduled across threads.

mod io;
pub mod stats;

pub use io::{read_csv, write_csv};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite::EnsembleParams;
use crate::linalg;
use crate::par::Exec;

/// Relative tolerance of the Kramers pairing check for β = 4.
const KRAMERS_TOL: f64 = 1e-8;

/// Eigenvalue sets from independent draws, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSample {
    pub params: EnsembleParams,
    pub seed: u64,
    pub eigenvalues: Vec<Vec<f64>>,
}

impl SpectrumSample {
    pub fn draws(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.eigenvalues.is_empty() {
            return Err(Error::Domain("sample has no draws".into()));
        }
        for (d, ev) in self.eigenvalues.iter().enumerate() {
            if ev.len() != self.params.n_size {
                return Err(Error::InternalConsistency(format!(
                    "draw {d} has {} eigenvalues, expected N = {}",
                    ev.len(),
                    self.params.n_size
                )));
            }
            if ev.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::InternalConsistency(format!("draw {d} is not sorted")));
            }
        }
        Ok(())
    }
}

/// How the matrix eigenvalues are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Fill X densely (quaternions as 2×2 complex blocks), form W = X†X and
    /// diagonalise it.
    #[default]
    Dense,
    /// Bidiagonal χ-model with the same eigenvalue law; O(N²) per draw and
    /// valid for any β.
    Bidiagonal,
}

/// RNG for one draw: stream `stream` of the ChaCha8 generator keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws the variance scale ξ ~ Gamma(γ − (β/2)N(N+ν), 1).
pub fn sample_xi<R: Rng + ?Sized>(p: &EnsembleParams, rng: &mut R) -> Result<f64> {
    p.validate()?;
    let shape = p.gamma - p.dof();
    let g = Gamma::new(shape, 1.0).map_err(|e| Error::Domain(format!("Gamma shape {shape}: {e}")))?;
    Ok(g.sample(rng))
}

/// Standard deviation of each real degree of freedom at scale ξ.
fn entry_sigma(p: &EnsembleParams, xi: f64) -> f64 {
    (p.gamma / (2.0 * p.n * p.beta as f64 * xi)).sqrt()
}

fn gauss<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    sigma * z
}

/// W = X†X for a row-major m×n matrix X.
fn gram<T: linalg::Scalar>(x: &[T], m: usize, n: usize) -> Vec<T> {
    let mut w = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = T::zero();
            for r in 0..m {
                s = s.add(x[r * n + i].conj().mul(x[r * n + j]));
            }
            w[i * n + j] = s;
            w[j * n + i] = s.conj();
        }
    }
    w
}

fn dense_eigenvalues<R: Rng + ?Sized>(p: &EnsembleParams, xi: f64, rng: &mut R) -> Result<Vec<f64>> {
    let n = p.n_size;
    let m = n + p.nu as usize;
    let sigma = entry_sigma(p, xi);
    match p.beta {
        1 => {
            let x: Vec<f64> = (0..m * n).map(|_| gauss(rng, sigma)).collect();
            linalg::eigensolve_selfadjoint(gram(&x, m, n), n)
        }
        2 => {
            let x: Vec<Complex64> =
                (0..m * n).map(|_| Complex64::new(gauss(rng, sigma), gauss(rng, sigma))).collect();
            linalg::eigensolve_selfadjoint(gram(&x, m, n), n)
        }
        4 => {
            // quaternion a + bi + cj + dk as the block [[a+ib, c+id], [-c+id, a-ib]]
            let (m2, n2) = (2 * m, 2 * n);
            let mut x = vec![Complex64::new(0.0, 0.0); m2 * n2];
            for r in 0..m {
                for c in 0..n {
                    let (a, b, cc, d) = (gauss(rng, sigma), gauss(rng, sigma), gauss(rng, sigma), gauss(rng, sigma));
                    x[(2 * r) * n2 + 2 * c] = Complex64::new(a, b);
                    x[(2 * r) * n2 + 2 * c + 1] = Complex64::new(cc, d);
                    x[(2 * r + 1) * n2 + 2 * c] = Complex64::new(-cc, d);
                    x[(2 * r + 1) * n2 + 2 * c + 1] = Complex64::new(a, -b);
                }
            }
            let ev = linalg::eigensolve_selfadjoint(gram(&x, m2, n2), n2)?;
            kramers_halve(&ev)
        }
        b => Err(Error::Domain(format!("beta must be 1, 2 or 4, got {b}"))),
    }
}

/// Checks that sorted eigenvalues come in degenerate pairs and keeps one of each.
fn kramers_halve(ev: &[f64]) -> Result<Vec<f64>> {
    let top = ev.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut out = Vec::with_capacity(ev.len() / 2);
    for pair in ev.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        if (a - b).abs() > KRAMERS_TOL * top.max(f64::MIN_POSITIVE) {
            return Err(Error::InternalConsistency(format!(
                "Kramers pairing violated: {a:e} and {b:e} should coincide"
            )));
        }
        out.push(0.5 * (a + b));
    }
    Ok(out)
}

fn chi<R: Rng + ?Sized>(rng: &mut R, k: f64) -> Result<f64> {
    let d = ChiSquared::new(k).map_err(|e| Error::Domain(format!("chi-square dof {k}: {e}")))?;
    Ok(d.sample(rng).sqrt())
}

fn bidiagonal_eigenvalues<R: Rng + ?Sized>(p: &EnsembleParams, xi: f64, rng: &mut R) -> Result<Vec<f64>> {
    let n = p.n_size;
    let m = n + p.nu as usize;
    let b = p.beta as f64;
    let diag: Vec<f64> = (0..n).map(|i| chi(rng, b * (m - i) as f64)).collect::<Result<_>>()?;
    let sub: Vec<f64> = (0..n.saturating_sub(1)).map(|i| chi(rng, b * (n - 1 - i) as f64)).collect::<Result<_>>()?;
    // B lower bidiagonal; BBᵀ is tridiagonal with the entries below
    let d: Vec<f64> = (0..n)
        .map(|i| diag[i] * diag[i] + if i > 0 { sub[i - 1] * sub[i - 1] } else { 0.0 })
        .collect();
    let e: Vec<f64> = (0..n.saturating_sub(1)).map(|i| diag[i] * sub[i]).collect();
    let s2 = entry_sigma(p, xi).powi(2);
    Ok(linalg::tridiagonal_eigenvalues(d, &e)?.into_iter().map(|v| v * s2).collect())
}

/// Eigenvalues of one matrix drawn at a fixed ξ (conditional sampler).
pub fn sample_at_xi<R: Rng + ?Sized>(p: &EnsembleParams, xi: f64, method: Method, rng: &mut R) -> Result<Vec<f64>> {
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("xi must be positive, got {xi}")));
    }
    let ev = match method {
        Method::Dense => dense_eigenvalues(p, xi, rng)?,
        Method::Bidiagonal => bidiagonal_eigenvalues(p, xi, rng)?,
    };
    let top = ev.last().copied().unwrap_or(0.0).abs();
    if let Some(&lo) = ev.first() {
        if lo < -1e-10 * top {
            return Err(Error::InternalConsistency(format!(
                "W = X†X produced a negative eigenvalue {lo:e}"
            )));
        }
    }
    Ok(ev.into_iter().map(|v| v.max(0.0)).collect())
}

/// Eigenvalues of one deformed-ensemble matrix.
pub fn sample_matrix<R: Rng + ?Sized>(p: &EnsembleParams, method: Method, rng: &mut R) -> Result<Vec<f64>> {
    let xi = sample_xi(p, rng)?;
    sample_at_xi(p, xi, method, rng)
}

/// Configured sampler. Draw d always uses stream d of `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampler {
    pub params: EnsembleParams,
    pub method: Method,
    pub exec: Exec,
    /// Pins ξ to a fixed value (conditional sampling, for testing).
    pub fixed_xi: Option<f64>,
}

impl Sampler {
    pub fn new(params: EnsembleParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, method: Method::default(), exec: Exec::default(), fixed_xi: None })
    }

    pub fn method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn fixed_xi(mut self, xi: Option<f64>) -> Self {
        self.fixed_xi = xi;
        self
    }

    /// The draw with index `d`.
    pub fn draw(&self, seed: u64, d: u64) -> Result<Vec<f64>> {
        let mut rng = stream_rng(seed, d);
        match self.fixed_xi {
            Some(xi) => sample_at_xi(&self.params, xi, self.method, &mut rng),
            None => sample_matrix(&self.params, self.method, &mut rng),
        }
    }

    pub fn sample(&self, draws: usize, seed: u64) -> Result<SpectrumSample> {
        if draws == 0 {
            return Err(Error::Domain("at least one draw is required".into()));
        }
        let eigenvalues: Result<Vec<Vec<f64>>> =
            self.exec.map_range(draws, |d| self.draw(seed, d as u64)).into_iter().collect();
        Ok(SpectrumSample { params: self.params, seed, eigenvalues: eigenvalues? })
    }
}
