//! Gamma-weight mixtures.
//!
//! Every deformed quantity is an average of the undeformed one over a
//! Gamma-distributed variance scale ξ with density e^{-ξ} ξ^a / Γ(a+1). This
//! module provides generalized Gauss-Laguerre rules for that weight and the
//! averaging operator built on them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::tridiagonal_eigenvalues;
use crate::quad::{self, Tolerance};
use crate::specfun::ln_gamma;

/// Node counts tried by [`mix`] before falling back to adaptive quadrature.
pub const NODE_LADDER: [usize; 3] = [200, 400, 800];
const MIX_REL_TOL: f64 = 1e-9;

/// Generalized Gauss-Laguerre rule for the weight e^{-ξ} ξ^exponent.
///
/// Weights are stored normalised to unit total (probability weights); the
/// un-normalised weights are `weights[i] * exp(ln_total_weight)` with
/// `ln_total_weight = ln Γ(exponent + 1)`, which stays finite for huge
/// exponents where Γ itself overflows. Nodes whose weight underflows are
/// dropped.
#[derive(Debug, Clone)]
pub struct GammaWeightRule {
    exponent: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    ln_total_weight: f64,
    order: usize,
}

impl GammaWeightRule {
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Probability weights (sum to one).
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ln Γ(exponent + 1), the total mass of the weight function.
    pub fn ln_total_weight(&self) -> f64 {
        self.ln_total_weight
    }

    /// Number of nodes of the underlying rule before pruning.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Σ w_i f(ξ_i) with probability weights, i.e. E[f(ξ)] for ξ ~ Gamma(exponent + 1).
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// ∫_0^∞ e^{-ξ} ξ^exponent f(ξ) dξ.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.expect(f) * self.ln_total_weight.exp()
    }
}

/// Builds the `node_count`-point rule for e^{-ξ} ξ^exponent.
pub fn build_rule(exponent: f64, node_count: usize) -> Result<GammaWeightRule> {
    if !(exponent > -1.0) || !exponent.is_finite() {
        return Err(Error::Domain(format!("Gamma weight exponent must exceed -1, got {exponent}")));
    }
    if node_count < 8 {
        return Err(Error::Domain(format!("node_count must be at least 8, got {node_count}")));
    }
    let n = node_count;
    let a = exponent;
    // Jacobi matrix of the monic Laguerre recurrence (Golub-Welsch)
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + a + 1.0).collect();
    let off: Vec<f64> = (1..n).map(|k| (k as f64 * (k as f64 + a)).sqrt()).collect();
    let mut nodes = tridiagonal_eigenvalues(diag, &off)
        .map_err(|e| Error::Accuracy(format!("Gauss-Laguerre nodes: {e}")))?;
    let mut ln_weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        // Newton polish on L_n^a, then Christoffel weights 1 / Σ p_k(x)²
        for _ in 0..3 {
            let (qn, qn1, _) = orthonormal_sums(n, a, *x);
            let denom = n as f64 * qn - (n as f64 * (n as f64 + a)).sqrt() * qn1;
            if denom == 0.0 {
                break;
            }
            let step = *x * qn / denom;
            if !step.is_finite() || step.abs() > 1e-6 * x.abs().max(1.0) {
                break;
            }
            *x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
                break;
            }
        }
        let (_, _, ln_sum) = orthonormal_sums(n, a, *x);
        ln_weights.push(-ln_sum);
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes[0] <= 0.0 {
        return Err(Error::Accuracy("Gauss-Laguerre nodes are not strictly increasing".into()));
    }
    let ln_max = ln_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = ln_weights.iter().map(|l| (l - ln_max).exp()).collect();
    let total: f64 = raw.iter().sum();
    let mut kept_nodes = Vec::with_capacity(n);
    let mut kept_weights = Vec::with_capacity(n);
    for (x, w) in nodes.into_iter().zip(raw) {
        let w = w / total;
        if w > 1e-300 {
            kept_nodes.push(x);
            kept_weights.push(w);
        }
    }
    Ok(GammaWeightRule {
        exponent,
        nodes: kept_nodes,
        weights: kept_weights,
        ln_total_weight: ln_gamma(a + 1.0),
        order: n,
    })
}

/// Orthonormal (probability-measure) Laguerre values at x: returns
/// (r_n, r_{n-1}, ln Σ_{k<n} r_k²) with a common scale factor dropped from
/// the first two. Rescaled on the fly so large nodes do not overflow.
fn orthonormal_sums(n: usize, a: f64, x: f64) -> (f64, f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sum = 1.0;
    let mut ln_scale = 0.0;
    for k in 0..n {
        let kf = k as f64;
        let next = ((2.0 * kf + a + 1.0 - x) * cur - (kf * (kf + a)).sqrt() * prev)
            / ((kf + 1.0) * (kf + a + 1.0)).sqrt();
        prev = cur;
        cur = next;
        if k + 1 < n {
            sum += cur * cur;
        }
        if cur.abs() > 1e150 {
            prev *= 1e-150;
            cur *= 1e-150;
            sum *= 1e-300;
            ln_scale += 300.0 * std::f64::consts::LN_10;
        }
    }
    (cur, prev, sum.ln() + ln_scale)
}

type RuleCache = Mutex<HashMap<(u64, usize), Arc<GammaWeightRule>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared, lazily built rule; identical for every caller and thread.
pub fn cached_rule(exponent: f64, node_count: usize) -> Result<Arc<GammaWeightRule>> {
    let key = (exponent.to_bits(), node_count);
    if let Some(r) = cache().lock().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(r));
    }
    let rule = Arc::new(build_rule(exponent, node_count)?);
    let mut guard = cache().lock().expect("rule cache poisoned");
    Ok(Arc::clone(guard.entry(key).or_insert(rule)))
}

/// Exponent γ - 1 - (β/2)N(N+ν) of the Gamma weight left after the Gaussian
/// partition-function ratio is absorbed. Fails when the deformed measure is
/// not normalisable, i.e. unless γ > (β/2)N(N+ν).
pub fn ratio_exponent(gamma: f64, beta: f64, n_size: usize, nu: f64) -> Result<f64> {
    let dof = 0.5 * beta * n_size as f64 * (n_size as f64 + nu);
    let a = gamma - 1.0 - dof;
    if !(a > -1.0) {
        return Err(Error::Convergence(format!(
            "the deformed weight is integrable only if gamma > (beta/2) N (N + nu) = {dof}, got gamma = {gamma}"
        )));
    }
    Ok(a)
}

fn check_exponent(a: f64) -> Result<()> {
    if !(a > -1.0) || !a.is_finite() {
        return Err(Error::Convergence(format!(
            "mixture exponent must exceed -1 (integrability), got {a}"
        )));
    }
    Ok(())
}

fn agree(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1e-300)
}

/// E[inner(ξ)] for ξ ~ Gamma(shape = exponent + 1, scale = 1).
///
/// Gauss-Laguerre rules of increasing size are tried until two successive
/// estimates agree to 1e-9; otherwise adaptive quadrature takes over.
pub fn mix<F: Fn(f64) -> f64>(exponent: f64, inner: F) -> Result<f64> {
    check_exponent(exponent)?;
    let mut last = cached_rule(exponent, NODE_LADDER[0])?.expect(&inner);
    for &n in &NODE_LADDER[1..] {
        let next = cached_rule(exponent, n)?.expect(&inner);
        if agree(last, next, MIX_REL_TOL) {
            return Ok(next);
        }
        last = next;
    }
    mix_adaptive(exponent, inner)
}

/// E[e^{-κξ} g(ξ)] = (1+κ)^{-(a+1)} E[g(ξ/(1+κ))]; exact under Gauss-Laguerre
/// when g is a polynomial of low enough degree.
pub fn mix_damped<F: Fn(f64) -> f64>(exponent: f64, kappa: f64, g: F) -> Result<f64> {
    if !(kappa > -1.0) {
        return Err(Error::Domain(format!("damping must exceed -1, got {kappa}")));
    }
    let s = 1.0 / (1.0 + kappa);
    let factor = ((exponent + 1.0) * s.ln()).exp();
    Ok(factor * mix(exponent, |xi| g(xi * s))?)
}

/// E[inner(ξ)] by adaptive Gauss-Kronrod quadrature of the Gamma density.
pub fn mix_adaptive<F: Fn(f64) -> f64>(exponent: f64, inner: F) -> Result<f64> {
    check_exponent(exponent)?;
    let a = exponent;
    let lg = ln_gamma(a + 1.0);
    let density = |xi: f64| {
        if xi <= 0.0 {
            return 0.0;
        }
        (a * xi.ln() - xi - lg).exp()
    };
    let sd = (a + 1.0).sqrt();
    let mode = a.max(0.0);
    let upper = a + 1.0 + 40.0 * sd + 60.0;
    let mut breaks: Vec<f64> = vec![0.0];
    for k in [-12.0, -6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0, 12.0, 24.0] {
        let b = mode + k * sd;
        if b > *breaks.last().unwrap() && b < upper {
            breaks.push(b);
        }
    }
    breaks.push(upper);
    let tol = Tolerance { abs: 1e-15, rel: 1e-11, max_intervals: 20_000 };
    let mut total = 0.0;
    let first_piece_end = breaks[1];
    if a < 0.0 {
        // ξ^a singularity at the origin: substitute ξ = b u^{1/(a+1)}
        let p = 1.0 / (a + 1.0);
        let b0 = first_piece_end;
        let g = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let xi = b0 * u.powf(p);
            // e^{-ξ} ξ^a dξ = e^{-ξ} b^{a+1} p du
            let w = (-(xi) + (a + 1.0) * b0.ln() - lg).exp() * p;
            w * inner(xi)
        };
        total += quad::integrate(g, 0.0, 1.0, tol)?.value;
    } else {
        total += quad::integrate(|xi| density(xi) * inner(xi), 0.0, first_piece_end, tol)?.value;
    }
    total += quad::integrate_with_breaks(|xi| density(xi) * inner(xi), &breaks[1..], tol)?.value;
    Ok(total)
}

/// E[h(√ξ)]: adaptive quadrature in r = √ξ, suited to integrands that are
/// smooth or oscillatory in the square root of the scale.
pub fn mix_sqrt<F: Fn(f64) -> f64>(exponent: f64, h: F) -> Result<f64> {
    check_exponent(exponent)?;
    let a = exponent;
    let lg = ln_gamma(a + 1.0);
    // density of r: 2 r^{2a+1} e^{-r²} / Γ(a+1)
    let density = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        2.0 * ((2.0 * a + 1.0) * r.ln() - r * r - lg).exp()
    };
    let mode = (a + 0.5).max(0.0).sqrt();
    let upper = (a + 1.0 + 40.0 * (a + 1.0).sqrt() + 60.0).sqrt();
    let mut breaks = vec![0.0];
    for k in [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0] {
        let b = mode + k * std::f64::consts::FRAC_1_SQRT_2;
        if b > *breaks.last().unwrap() && b < upper {
            breaks.push(b);
        }
    }
    breaks.push(upper);
    let tol = Tolerance { abs: 1e-15, rel: 1e-11, max_intervals: 20_000 };
    if a < -0.5 {
        // r^{2a+1} singular at the origin: substitute r = b u^{1/(2a+2)}
        let p = 1.0 / (2.0 * a + 2.0);
        let b0 = breaks[1];
        let g = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let r = b0 * u.powf(p);
            let w = 2.0 * (-(r * r) + (2.0 * a + 2.0) * b0.ln() - lg).exp() * p;
            w * h(r)
        };
        let head = quad::integrate(g, 0.0, 1.0, tol)?.value;
        let tail = quad::integrate_with_breaks(|r| density(r) * h(r), &breaks[1..], tol)?.value;
        return Ok(head + tail);
    }
    Ok(quad::integrate_with_breaks(|r| density(r) * h(r), &breaks, tol)?.value)
}
