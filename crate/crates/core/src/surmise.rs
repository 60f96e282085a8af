//! Two-by-two (N = 2) nearest-neighbour spacing laws.
//!
//! With ν̄ = (β/2)(ν+1) − 1 the undeformed spacing density is
//! C s^{β+ν̄+1/2} K_{ν̄+1/2}(nβs). The deformed one is a power law with tail
//! s^{−(ϖ+1)}, ϖ = γ − β − 2ν̄ − 2, and equals the undeformed law averaged over
//! n → nξ/γ with ξ ~ Gamma(ϖ). Only ν̄ = 0 is a good model of bulk spacings at
//! large N; other ν̄ are provided for completeness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{bessel_k_scaled, hyp2f1, ln_gamma};
use crate::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacingParams {
    pub beta: u8,
    /// `None` when ν̄ was set directly (e.g. the ν̄ = 0 family at β = 4,
    /// which no integer ν produces).
    pub nu: Option<u32>,
    pub nubar: f64,
    pub n: f64,
    pub gamma: f64,
    pub varpi: f64,
}

impl SpacingParams {
    pub fn new(beta: u8, nu: u32, n: f64, gamma: f64) -> Result<Self> {
        let nubar = 0.5 * beta as f64 * (nu as f64 + 1.0) - 1.0;
        let mut p = Self::with_nubar(beta, nubar, n, gamma)?;
        p.nu = Some(nu);
        Ok(p)
    }

    pub fn with_nubar(beta: u8, nubar: f64, n: f64, gamma: f64) -> Result<Self> {
        let p = Self { beta, nu: None, nubar, n, gamma, varpi: gamma - beta as f64 - 2.0 * nubar - 2.0 };
        p.validate()?;
        Ok(p)
    }

    /// The deformed law with ϖ fixed, i.e. γ = ϖ + β + 2ν̄ + 2.
    pub fn with_varpi(beta: u8, nubar: f64, n: f64, varpi: f64) -> Result<Self> {
        Self::with_nubar(beta, nubar, n, varpi + beta as f64 + 2.0 * nubar + 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        if ![1, 2, 4].contains(&self.beta) {
            return Err(Error::Domain(format!("beta must be 1, 2 or 4, got {}", self.beta)));
        }
        if !(self.nubar > -1.0) {
            return Err(Error::Domain(format!("nubar must exceed -1, got {}", self.nubar)));
        }
        if let Some(nu) = self.nu {
            let expect = 0.5 * self.beta as f64 * (nu as f64 + 1.0) - 1.0;
            if self.nubar != expect {
                return Err(Error::InternalConsistency(format!("nubar {} does not match nu = {nu}", self.nubar)));
            }
        }
        if !(self.n > 0.0 && self.n.is_finite()) {
            return Err(Error::Domain(format!("n must be positive, got {}", self.n)));
        }
        if !(self.gamma > 0.0) {
            return Err(Error::Domain(format!("gamma must be positive, got {}", self.gamma)));
        }
        Ok(())
    }

    fn require_convergent(&self) -> Result<()> {
        if !(self.varpi > 0.0) {
            return Err(Error::Convergence(format!(
                "the deformed spacing law needs varpi = gamma - beta - 2 nubar - 2 > 0, got {}",
                self.varpi
            )));
        }
        Ok(())
    }

    fn b(&self) -> f64 {
        self.beta as f64
    }
}

/// ln C for the undeformed law.
fn ln_wl_constant(p: &SpacingParams) -> f64 {
    let (b, nb, nbeta) = (p.b(), p.nubar, p.n * p.b());
    -((b + nb - 0.5) * std::f64::consts::LN_2 - (1.5 + b + nb) * nbeta.ln()
        + ln_gamma(0.5 * (1.0 + b))
        + ln_gamma(1.0 + nb + 0.5 * b))
}

/// Undeformed N = 2 spacing density C s^{β+ν̄+1/2} K_{ν̄+1/2}(nβs).
pub fn wl_spacing_pdf(s: f64, p: &SpacingParams) -> Result<f64> {
    p.validate()?;
    if s < 0.0 {
        return Err(Error::Domain(format!("spacing must be non-negative, got {s}")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let x = p.n * p.b() * s;
    let k = bessel_k_scaled(p.nubar + 0.5, x)?;
    Ok((ln_wl_constant(p) + (p.b() + p.nubar + 0.5) * s.ln() - x).exp() * k)
}

/// Deformed N = 2 spacing density (hypergeometric form).
pub fn gen_spacing_pdf(s: f64, p: &SpacingParams) -> Result<f64> {
    p.validate()?;
    p.require_convergent()?;
    if s < 0.0 {
        return Err(Error::Domain(format!("spacing must be non-negative, got {s}")));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let (b, nb, g) = (p.b(), p.nubar, p.gamma);
    let nbeta = p.n * b;
    if nb == 0.0 {
        return Ok(gen_spacing_pdf_nubar0(s, p));
    }
    let ln_beta_fn = ln_gamma(nb + 1.0) + ln_gamma(g - 2.0 * nb - 1.0) - ln_gamma(g - nb);
    let ln_c = (1.0 - g) * std::f64::consts::LN_2 + ln_beta_fn + ln_gamma(g) + ln_gamma(1.0 + 0.5 * b)
        - ln_gamma(nb + 1.0)
        - ln_gamma(1.0 + b)
        - ln_gamma(nb + 1.0 + 0.5 * b)
        - ln_gamma(g - 2.0 - b - 2.0 * nb)
        + (2.0 + 2.0 * nb + b - g) * (nbeta / g).ln();
    let f = hyp2f1(-nb, nb + 1.0, g - nb, 0.5 - g / (2.0 * nbeta * s))?;
    let ln_rest = (b + nb) * s.ln() + (nb + 1.0 - g) * (g / (2.0 * nbeta) + 0.5 * s).ln();
    Ok((ln_c + ln_rest).exp() * f)
}

/// ν̄ = 0 closed form n(nβ/γ)^β Γ(γ−1)/(γΓ(β)Γ(γ−β−2)) s^β (1+snβ/γ)^{1−γ}.
fn gen_spacing_pdf_nubar0(s: f64, p: &SpacingParams) -> f64 {
    let (b, g) = (p.b(), p.gamma);
    let k = p.n * b / g;
    let ln_c = p.n.ln() + b * k.ln() + ln_gamma(g - 1.0) - g.ln() - ln_gamma(b) - ln_gamma(g - b - 2.0);
    (ln_c + b * s.ln() + (1.0 - g) * (k * s).ln_1p()).exp()
}

/// Mean spacing ⟨⟨s⟩⟩ of either law.
pub fn mean_spacing(p: &SpacingParams, variant: Variant) -> Result<f64> {
    p.validate()?;
    let (b, nb) = (p.b(), p.nubar);
    let wl = 2.0 / (p.n * b)
        * (ln_gamma(nb + 1.5 + 0.5 * b) + ln_gamma(1.0 + 0.5 * b) - ln_gamma(0.5 * (1.0 + b)) - ln_gamma(1.0 + nb + 0.5 * b))
            .exp();
    match variant {
        Variant::Standard => Ok(wl),
        Variant::Generalized => {
            p.require_convergent()?;
            if !(p.varpi > 1.0) {
                return Err(Error::MomentDivergence(format!(
                    "the mean spacing needs varpi > 1, got {}",
                    p.varpi
                )));
            }
            // scale mixture over ξ ~ Gamma(ϖ) of spacings ∝ γ/ξ
            Ok(p.gamma / (p.varpi - 1.0) * wl)
        }
    }
}

pub fn spacing_pdf(s: f64, p: &SpacingParams, variant: Variant) -> Result<f64> {
    match variant {
        Variant::Standard => wl_spacing_pdf(s, p),
        Variant::Generalized => gen_spacing_pdf(s, p),
    }
}

/// Unit-mean spacing density P̂(x) = ⟨⟨s⟩⟩ P(⟨⟨s⟩⟩ x).
pub fn rescaled_spacing_pdf(x: f64, p: &SpacingParams, variant: Variant) -> Result<f64> {
    let m = mean_spacing(p, variant)?;
    Ok(m * spacing_pdf(m * x, p, variant)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_to_infinity, Tolerance};

    fn mass(f: impl Fn(f64) -> f64) -> f64 {
        integrate_to_infinity(f, 0.0, Tolerance::new(1e-14, 1e-11)).unwrap().value
    }

    #[test]
    fn nubar_from_nu() {
        assert_eq!(SpacingParams::new(2, 0, 1.0, 8.0).unwrap().nubar, 0.0);
        assert_eq!(SpacingParams::new(1, 0, 1.0, 8.0).unwrap().nubar, -0.5);
        assert_eq!(SpacingParams::new(4, 1, 1.0, 30.0).unwrap().nubar, 3.0);
        assert_eq!(SpacingParams::new(2, 0, 1.0, 8.0).unwrap().varpi, 4.0);
    }

    #[test]
    fn wl_nubar0_is_gamma_shape() {
        // K_{1/2} closed form: P = (nβ)^{β+1} s^β e^{−nβs} / β!
        for beta in [1u8, 2, 4] {
            let p = SpacingParams::with_nubar(beta, 0.0, 0.7, 50.0).unwrap();
            let b = beta as f64;
            for s in [0.1f64, 1.0, 3.0] {
                let expect = (0.7 * b).powf(b + 1.0) * s.powf(b) * (-0.7 * b * s).exp() / ln_gamma(b + 1.0).exp();
                assert!((wl_spacing_pdf(s, &p).unwrap() / expect - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn normalisation_and_means() {
        for (beta, nu) in [(1u8, 0u32), (1, 1), (2, 0), (2, 1), (4, 0)] {
            let p = SpacingParams::new(beta, nu, 1.0, 40.0).unwrap();
            for v in [Variant::Standard, Variant::Generalized] {
                let m0 = mass(|s| spacing_pdf(s, &p, v).unwrap());
                let m1 = mass(|s| s * spacing_pdf(s, &p, v).unwrap());
                assert!((m0 - 1.0).abs() < 1e-8, "{beta} {nu} {v:?} mass {m0}");
                assert!((m1 / mean_spacing(&p, v).unwrap() - 1.0).abs() < 1e-8, "{beta} {nu} {v:?} mean {m1}");
            }
        }
    }

    #[test]
    fn general_form_matches_gamma_mixture() {
        for (beta, nu) in [(1u8, 0u32), (2, 2), (4, 1)] {
            let p = SpacingParams::new(beta, nu, 0.8, 30.0).unwrap();
            for s in [0.2, 1.5, 6.0] {
                let mix = crate::gammamix::mix(p.varpi - 1.0, |xi| {
                    let scale = xi / p.gamma;
                    scale * wl_spacing_pdf(s * scale, &p).unwrap()
                })
                .unwrap();
                let direct = gen_spacing_pdf(s, &p).unwrap();
                assert!((direct / mix - 1.0).abs() < 1e-8, "{beta} {nu} {s}: {direct} vs {mix}");
            }
        }
    }

    #[test]
    fn nubar0_general_formula_reduces() {
        let p = SpacingParams::new(2, 0, 1.0, 9.0).unwrap();
        let s = 0.8;
        let (b, g, nbeta) = (2.0, 9.0, 2.0);
        let ln_c = (1.0 - g) * std::f64::consts::LN_2 + ln_gamma(1.0) + ln_gamma(g - 1.0) - ln_gamma(g) + ln_gamma(g)
            + ln_gamma(2.0)
            - ln_gamma(1.0)
            - ln_gamma(3.0)
            - ln_gamma(2.0)
            - ln_gamma(g - 4.0)
            + (4.0 - g) * (nbeta / g).ln();
        let general = (ln_c + b * f64::ln(s) + (1.0 - g) * (g / (2.0 * nbeta) + 0.5 * s).ln()).exp();
        assert!((general / gen_spacing_pdf(s, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn divergence_errors() {
        let p = SpacingParams::new(2, 0, 1.0, 4.0).unwrap();
        assert!(matches!(gen_spacing_pdf(1.0, &p), Err(Error::Convergence(_))));
        let q = SpacingParams::with_varpi(2, 0.0, 1.0, 0.5).unwrap();
        assert!(matches!(mean_spacing(&q, Variant::Generalized), Err(Error::MomentDivergence(_))));
    }
}
