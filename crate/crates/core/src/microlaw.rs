//! Hard-edge microscopic laws in the squared variable y: Bessel densities
//! for β = 1, 2, 4, the β = 2 k-point correlator, gap probabilities and
//! smallest-eigenvalue distributions, each in its standard form and in its
//! deformed (Gamma-mixed) form.
//!
//! Every deformed law follows from the standard one by the same average:
//! f_α(y) = E[s f(s y)] with s = √(ξ/α)/b and ξ ~ Gamma(α + 1).

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gammamix;
use crate::linalg;
use crate::quad::{self, Tolerance};
use crate::specfun::{bessel_i_scaled, bessel_j, bessel_j_int, hyp1f1, ln_gamma};
use crate::Variant;

/// Largest ν accepted by the β = 2 determinant formula.
pub const MAX_NU_B2: u32 = 8;
/// Largest odd ν accepted by the β = 1 Pfaffian formula.
pub const MAX_NU_B1: u32 = 7;

/// b = Γ(α+3/2)/(Γ(α+1)√α): the deformed macroscopic density at the origin
/// is b/π in place of 1/π, so the microscopic unit is rescaled by b.
pub fn b_constant(alpha: f64) -> f64 {
    (ln_gamma(alpha + 1.5) - ln_gamma(alpha + 1.0) - 0.5 * alpha.ln()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicroParams {
    pub alpha: f64,
    pub nu: u32,
    pub beta: u8,
}

impl MicroParams {
    pub fn new(alpha: f64, nu: u32, beta: u8) -> Result<Self> {
        let p = Self { alpha, nu, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::Domain(format!(
                "microscopic laws need alpha > 0, got {}",
                self.alpha
            )));
        }
        if ![1, 2, 4].contains(&self.beta) {
            return Err(Error::Domain(format!("beta must be 1, 2 or 4, got {}", self.beta)));
        }
        Ok(())
    }

    pub fn b(&self) -> f64 {
        b_constant(self.alpha)
    }

    /// Scale factor s(r) = r/(√α b) for r = √ξ.
    fn scale_of(&self) -> impl Fn(f64) -> f64 {
        let k = 1.0 / (self.alpha.sqrt() * self.b());
        move |r| r * k
    }
}

/// Maps an eigenvalue to the microscopic squared variable
/// y = √(4N²b²λ/⟨λ⟩). Use b = 1 for the undeformed ensemble.
pub fn lambda_to_y(lambda: f64, mean_lambda: f64, n_size: usize, b: f64) -> f64 {
    let n = n_size as f64;
    (4.0 * n * n * b * b * lambda / mean_lambda).max(0.0).sqrt()
}

/// Inverse of [`lambda_to_y`]: λ = y²⟨λ⟩/(4N²b²).
pub fn y_to_lambda(y: f64, mean_lambda: f64, n_size: usize, b: f64) -> f64 {
    let n = n_size as f64;
    y * y * mean_lambda / (4.0 * n * n * b * b)
}

/// E[s f(s y)] over the Gamma(α+1) scale, integrating in √ξ.
fn mix_scaled<F: Fn(f64) -> f64>(p: &MicroParams, f: F) -> Result<f64> {
    p.validate()?;
    let scale = p.scale_of();
    gammamix::mix_sqrt(p.alpha, |r| {
        let s = scale(r);
        s * f(s)
    })
}

/// ∫_0^v J_ν(t) dt = 2 Σ_k J_{ν+2k+1}(v). Cheaper than quadrature inside
/// mixture integrands.
fn j_integral(nu: u32, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    if nu == 1 {
        return 1.0 - bessel_j(0.0, v);
    }
    let mut sum = 0.0;
    let kmax = (v / 2.0).ceil() as u32 + 40;
    for k in 0..kmax {
        let order = (nu + 2 * k + 1) as f64;
        let term = bessel_j(order, v);
        sum += term;
        if order > v + 10.0 && term.abs() < 1e-18 {
            break;
        }
    }
    2.0 * sum
}

/// Standard β = 2 Bessel density (|y|/2)(J_ν(y)² − J_{ν−1}(y)J_{ν+1}(y)).
pub fn bessel_density_b2(y: f64, nu: u32) -> f64 {
    let a = y.abs();
    if a == 0.0 {
        return 0.0;
    }
    let n = nu as i64;
    let j = bessel_j_int(n, a);
    0.5 * a * (j * j - bessel_j_int(n - 1, a) * bessel_j_int(n + 1, a))
}

/// Standard β = 1 density: β = 2 law plus (1/2)J_ν(|y|)(1 − ∫_0^{|y|} J_ν).
pub fn bessel_density_b1(y: f64, nu: u32) -> f64 {
    let a = y.abs();
    bessel_density_b2(a, nu) + 0.5 * bessel_j(nu as f64, a) * (1.0 - j_integral(nu, a))
}

/// Standard β = 4 density: ϑ^{(2)}_{2ν}(2y) − (1/2)J_{2ν}(2|y|)∫_0^{2|y|} J_{2ν}.
pub fn bessel_density_b4(y: f64, nu: u32) -> f64 {
    let a = 2.0 * y.abs();
    bessel_density_b2(a, 2 * nu) - 0.5 * bessel_j((2 * nu) as f64, a) * j_integral(2 * nu, a)
}

/// Standard microscopic density for any β.
pub fn bessel_density(y: f64, nu: u32, beta: u8) -> Result<f64> {
    match beta {
        1 => Ok(bessel_density_b1(y, nu)),
        2 => Ok(bessel_density_b2(y, nu)),
        4 => Ok(bessel_density_b4(y, nu)),
        _ => Err(Error::Domain(format!("beta must be 1, 2 or 4, got {beta}"))),
    }
}

/// Deformed β = 2 Bessel density.
pub fn gen_bessel_density_b2(y: f64, p: &MicroParams) -> Result<f64> {
    if y == 0.0 {
        p.validate()?;
        return Ok(0.0);
    }
    mix_scaled(p, |s| bessel_density_b2(s * y, p.nu))
}

/// Deformed microscopic density for p.beta.
pub fn gen_micro_density(y: f64, p: &MicroParams) -> Result<f64> {
    let nu = p.nu;
    match p.beta {
        1 => mix_scaled(p, |s| bessel_density_b1(s * y, nu)),
        2 => gen_bessel_density_b2(y, p),
        4 => {
            if y == 0.0 {
                return Ok(0.0);
            }
            mix_scaled(p, |s| bessel_density_b4(s * y, nu))
        }
        b => Err(Error::Domain(format!("beta must be 1, 2 or 4, got {b}"))),
    }
}

/// β = 1 microscopic density, standard or deformed.
pub fn micro_density_b1(y: f64, p: &MicroParams, variant: Variant) -> Result<f64> {
    let q = MicroParams { beta: 1, ..*p };
    match variant {
        Variant::Standard => Ok(bessel_density_b1(y, p.nu)),
        Variant::Generalized => gen_micro_density(y, &q),
    }
}

/// β = 4 microscopic density, standard or deformed.
pub fn micro_density_b4(y: f64, p: &MicroParams, variant: Variant) -> Result<f64> {
    let q = MicroParams { beta: 4, ..*p };
    match variant {
        Variant::Standard => Ok(bessel_density_b4(y, p.nu)),
        Variant::Generalized => gen_micro_density(y, &q),
    }
}

/// Microscopic density for p.beta, standard or deformed.
pub fn micro_density(y: f64, p: &MicroParams, variant: Variant) -> Result<f64> {
    match variant {
        Variant::Standard => bessel_density(y, p.nu, p.beta),
        Variant::Generalized => gen_micro_density(y, p),
    }
}

/// Symmetric Bessel kernel in the squared variable,
/// K(u,v) = √(uv)(u J_{ν+1}(u)J_ν(v) − v J_ν(u)J_{ν+1}(v))/(u² − v²),
/// whose diagonal is the β = 2 density.
pub fn bessel_kernel(u: f64, v: f64, nu: u32) -> f64 {
    let (u, v) = (u.abs(), v.abs());
    if u == v {
        return bessel_density_b2(u, nu);
    }
    let o = nu as f64;
    let num = u * bessel_j(o + 1.0, u) * bessel_j(o, v) - v * bessel_j(o, u) * bessel_j(o + 1.0, v);
    (u * v).sqrt() * num / (u * u - v * v)
}

fn check_points(ys: &[f64]) -> Result<()> {
    if ys.is_empty() || ys.len() > 6 {
        return Err(Error::Domain(format!("k-point correlator needs 1 ≤ k ≤ 6, got {}", ys.len())));
    }
    for i in 0..ys.len() {
        for j in 0..i {
            if ys[i].abs() == ys[j].abs() {
                return Err(Error::Domain(
                    "coincident points in the k-point correlator; use the density for k = 1".into(),
                ));
            }
        }
    }
    Ok(())
}

fn kernel_det(ys: &[f64], nu: u32) -> f64 {
    let k = ys.len();
    let mut m = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            m[i * k + j] = bessel_kernel(ys[i], ys[j], nu);
        }
    }
    linalg::det(&m, k)
}

/// Standard β = 2 k-point microscopic correlator det[K(y_i, y_j)].
pub fn bessel_kpoint_b2(ys: &[f64], nu: u32) -> Result<f64> {
    check_points(ys)?;
    Ok(kernel_det(ys, nu))
}

/// Deformed β = 2 k-point correlator E[s^k det K(s y_i, s y_j)].
pub fn micro_kpoint_b2(ys: &[f64], p: &MicroParams) -> Result<f64> {
    check_points(ys)?;
    p.validate()?;
    let k = ys.len() as i32;
    let mut sorted: Vec<f64> = ys.iter().map(|y| y.abs()).collect();
    sorted.sort_by(f64::total_cmp);
    let ys = &sorted[..];
    let scale = p.scale_of();
    gammamix::mix_sqrt(p.alpha, |r| {
        let s = scale(r);
        let pts: Vec<f64> = ys.iter().map(|y| s * y).collect();
        s.powi(k) * kernel_det(&pts, p.nu)
    })
}

/// Microscopic gap probability ℰ(y) that (0, y] (in the unsquared micro
/// variable) is empty, β = 2 and ν = 0: e^{−y/4} or (1 + y/(4αb²))^{−(α+1)}.
pub fn gap_probability_micro(y: f64, p: &MicroParams, variant: Variant) -> Result<f64> {
    if p.beta != 2 || p.nu != 0 {
        return Err(Error::Unsupported(format!(
            "closed-form gap probability is known for beta = 2, nu = 0 only (got beta = {}, nu = {})",
            p.beta, p.nu
        )));
    }
    let y = y.max(0.0);
    match variant {
        Variant::Standard => Ok((-0.25 * y).exp()),
        Variant::Generalized => {
            p.validate()?;
            let b = p.b();
            Ok((-(p.alpha + 1.0) * (y / (4.0 * p.alpha * b * b)).ln_1p()).exp())
        }
    }
}

/// Finite-N gap probability E(s) for β = 2, ν = 0: e^{−2nNs} or
/// (1 + 2nNs/γ)^{−(γ − N²)}.
pub fn gap_probability_finite(
    s: f64,
    p: &crate::finite::EnsembleParams,
    variant: Variant,
) -> Result<f64> {
    if p.beta != 2 || p.nu != 0 {
        return Err(Error::Unsupported(format!(
            "closed-form gap probability is known for beta = 2, nu = 0 only (got beta = {}, nu = {})",
            p.beta, p.nu
        )));
    }
    let s = s.max(0.0);
    let nn = p.n_size as f64;
    match variant {
        Variant::Standard => Ok((-2.0 * p.n * nn * s).exp()),
        Variant::Generalized => {
            p.validate()?;
            let expo = p.gamma - nn * nn;
            Ok((-expo * (2.0 * p.n * nn * s / p.gamma).ln_1p()).exp())
        }
    }
}

fn unsupported_first_eig(beta: u8, nu: u32) -> Error {
    let why = match beta {
        1 if nu.is_multiple_of(2) => "for beta = 1 the smallest-eigenvalue law is available only for nu = 0 and odd nu",
        1 => "beta = 1 Pfaffian formula is restricted to odd nu <= 7",
        2 => "beta = 2 determinant formula is restricted to nu <= 8",
        4 => "for beta = 4 the smallest-eigenvalue law is available only for nu = 0",
        _ => "beta must be 1, 2 or 4",
    };
    Error::Unsupported(format!("{why} (got beta = {beta}, nu = {nu})"))
}

fn check_first_eig(beta: u8, nu: u32) -> Result<()> {
    let ok = match beta {
        1 => nu == 0 || (nu % 2 == 1 && nu <= MAX_NU_B1),
        2 => nu <= MAX_NU_B2,
        4 => nu == 0,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(unsupported_first_eig(beta, nu))
    }
}

/// (|y|/2)e^{−y²/4} det[I_{i−j+2}(|y|)]_{ν×ν}, with scaled Bessel functions.
fn first_eig_b2(y: f64, nu: u32) -> f64 {
    let a = y.abs();
    if a == 0.0 {
        return 0.0;
    }
    let n = nu as usize;
    let det = if n == 0 {
        1.0
    } else {
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = bessel_i_scaled(i as f64 - j as f64 + 2.0, a);
            }
        }
        linalg::det(&m, n)
    };
    0.5 * a * (-0.25 * a * a + nu as f64 * a).exp() * det
}

/// Unnormalised β = 1, odd-ν law |y|^{(3−ν)/2} e^{−y²/8} Pf[(i−j) I_{i+j+3}(|y|)]
/// over half-integer i, j in [1 − ν/2, ν/2 − 1].
fn first_eig_b1_raw(y: f64, nu: u32) -> f64 {
    let a = y.abs();
    if a == 0.0 {
        return if nu == 3 { 0.0 } else { f64::NAN };
    }
    let m = (nu - 1) as usize;
    let lo = 1.0 - 0.5 * nu as f64;
    let pf = if m == 0 {
        1.0
    } else {
        let mut mat = vec![0.0; m * m];
        for r in 0..m {
            for c in 0..m {
                let (i, j) = (lo + r as f64, lo + c as f64);
                mat[r * m + c] = (i - j) * bessel_i_scaled(i + j + 3.0, a);
            }
        }
        linalg::pfaffian(&mat, m)
    };
    let ln = 0.5 * (3.0 - nu as f64) * a.ln() - a * a / 8.0 + 0.5 * m as f64 * a;
    ln.exp() * pf
}

fn b1_norm_cache() -> &'static Mutex<HashMap<u32, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Normalisation constant of the β = 1 Pfaffian law, computed once per ν.
pub fn b1_pfaffian_constant(nu: u32) -> Result<f64> {
    if nu.is_multiple_of(2) || nu > MAX_NU_B1 {
        return Err(unsupported_first_eig(1, nu));
    }
    if let Some(&c) = b1_norm_cache().lock().expect("normalisation cache poisoned").get(&nu) {
        return Ok(c);
    }
    let breaks: Vec<f64> = (0..=24).map(|k| 4.0 * k as f64).collect();
    let f = |y: f64| if y <= 0.0 { 0.0 } else { first_eig_b1_raw(y, nu) };
    let total = quad::integrate_with_breaks(f, &breaks, Tolerance::new(0.0, 1e-13))?.value;
    if total == 0.0 || !total.is_finite() {
        return Err(Error::Numerical(format!("beta = 1 Pfaffian law at nu = {nu} has no finite mass")));
    }
    let c = 1.0 / total;
    b1_norm_cache().lock().expect("normalisation cache poisoned").insert(nu, c);
    Ok(c)
}

/// Standard smallest-eigenvalue density ℘^{(β)}_ν(y) in the squared variable.
pub fn first_eig_standard(y: f64, nu: u32, beta: u8) -> Result<f64> {
    check_first_eig(beta, nu)?;
    let a = y.abs();
    Ok(match (beta, nu) {
        (2, _) => first_eig_b2(a, nu),
        (1, 0) => 0.25 * (2.0 + a) * (-0.5 * a - a * a / 8.0).exp(),
        (1, 1) => 0.25 * a * (-a * a / 8.0).exp(),
        (1, 3) => 0.5 * (-a * a / 8.0).exp() * bessel_i_scaled(3.0, a) * a.exp(),
        (1, _) => {
            if a == 0.0 {
                0.0
            } else {
                b1_pfaffian_constant(nu)? * first_eig_b1_raw(a, nu)
            }
        }
        (4, 0) => {
            if a < 1e-3 {
                // cosh y − sinh y / y = y²/3 + y⁴/30 + ...
                let a2 = a * a;
                a * a2 * (1.0 / 3.0 + a2 / 30.0 + a2 * a2 / 840.0) * (-0.5 * a2).exp()
            } else {
                let ln_ch = a - 0.5 * a * a;
                // cosh − sinh/y with both in e^{a} scale
                let c = 0.5 * (1.0 + (-2.0 * a).exp());
                let s = 0.5 * (1.0 - (-2.0 * a).exp());
                a * (c - s / a) * ln_ch.exp()
            }
        }
        _ => unreachable!("checked above"),
    })
}

/// Deformed smallest-eigenvalue density ℘^{(β)}_{α,ν}(y).
pub fn first_eig_generalized(y: f64, p: &MicroParams) -> Result<f64> {
    check_first_eig(p.beta, p.nu)?;
    p.validate()?;
    let a = y.abs();
    if a == 0.0 {
        return first_eig_standard(0.0, p.nu, p.beta).map(|v| if v == 0.0 { 0.0 } else { v });
    }
    let b = p.b();
    let al = p.alpha;
    match (p.beta, p.nu) {
        (2, 0) => {
            let k = 4.0 * al * b * b;
            Ok(a * (al + 1.0) / (0.5 * k) * (-(al + 2.0) * (a * a / k).ln_1p()).exp())
        }
        (1, 1) => {
            let k = 8.0 * al * b * b;
            Ok(a * (al + 1.0) / (0.5 * k) * (-(al + 2.0) * (a * a / k).ln_1p()).exp())
        }
        _ => mix_scaled(p, |s| first_eig_standard(s * a, p.nu, p.beta).unwrap_or(f64::NAN)),
    }
}

/// Closed form of the deformed β = 2, ν = 1 law:
/// Γ(α+3)/Γ(α+1) · |y|³/(16α²b⁴) · (1+κ)^{−(α+3)} ₁F₁(α+3; 3; κ/(1+κ)), κ = y²/(4αb²).
pub fn first_eig_b2_nu1_closed(y: f64, alpha: f64) -> Result<f64> {
    MicroParams::new(alpha, 1, 2)?;
    let a = y.abs();
    if a == 0.0 {
        return Ok(0.0);
    }
    let b = b_constant(alpha);
    let kappa = a * a / (4.0 * alpha * b * b);
    let f = hyp1f1(alpha + 3.0, 3.0, kappa / (1.0 + kappa))?;
    let ln = ln_gamma(alpha + 3.0) - ln_gamma(alpha + 1.0) + 3.0 * a.ln()
        - (16.0 * alpha * alpha * b.powi(4)).ln()
        - (alpha + 3.0) * kappa.ln_1p();
    Ok(ln.exp() * f)
}

/// Smallest-eigenvalue density, standard or deformed.
pub fn first_eigenvalue_pdf(y: f64, p: &MicroParams, variant: Variant) -> Result<f64> {
    match variant {
        Variant::Standard => first_eig_standard(y, p.nu, p.beta),
        Variant::Generalized => first_eig_generalized(y, p),
    }
}
