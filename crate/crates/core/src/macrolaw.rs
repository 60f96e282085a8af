//! Macroscopic large-N densities: the Marčenko-Pastur law and its one-parameter
//! power-law deformation, their asymptotics, the pseudo-edge and the map to
//! the full real axis.
//!
//! All densities are in the rescaled variable x = λ / ⟨λ⟩, so they integrate
//! to one and (when it exists) have unit mean. For -1 < α < 0 the scale uses
//! |α|; the density stays normalised but its first moment diverges.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::specfun::{ln_gamma, ln_hyp1f1, hyp2f1, EvalPolicy};

/// Large-N double-scaling parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub alpha: f64,
    pub c: f64,
    pub beta: u8,
    pub nu: u32,
}

impl ScalingParams {
    pub fn new(alpha: f64, c: f64) -> Result<Self> {
        let p = Self { alpha, c, beta: 2, nu: 0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > -1.0) || self.alpha == 0.0 || !self.alpha.is_finite() {
            return Err(Error::Domain(format!(
                "alpha must satisfy alpha > -1 and alpha != 0, got {}",
                self.alpha
            )));
        }
        if !(self.c > 0.0 && self.c <= 1.0) {
            return Err(Error::Domain(format!("c must lie in (0, 1], got {}", self.c)));
        }
        if ![1, 2, 4].contains(&self.beta) {
            return Err(Error::Domain(format!("beta must be 1, 2 or 4, got {}", self.beta)));
        }
        Ok(())
    }

    /// MP support bounds (X_-, X_+) = ((c^{-1/2} ∓ 1)²) in the t variable;
    /// (0, 4) at c = 1.
    pub fn bounds(&self) -> (f64, f64) {
        bounds(self.c)
    }
}

fn bounds(c: f64) -> (f64, f64) {
    if c >= 1.0 {
        return (0.0, 4.0);
    }
    let r = 1.0 / c.sqrt();
    ((r - 1.0).powi(2), (r + 1.0).powi(2))
}

/// Asymptotic constants of the deformed c < 1 density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailConstants {
    /// Large-x constant: ρ ~ x^{-(α+2)} (c|α|)^{α+1} C / (2π Γ(α+1)).
    pub big_c: f64,
    /// Small-x constant: ρ ~ x^{-α-1/2} exp(-c|α| X_-/x) D.
    pub big_d: f64,
    pub x_minus: f64,
    pub x_plus: f64,
}

/// Marčenko-Pastur density with unit mean.
pub fn mp_density(x: f64, c: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    if c >= 1.0 {
        if x >= 4.0 {
            return 0.0;
        }
        return (4.0 / x - 1.0).sqrt() / (2.0 * PI);
    }
    let (xm, xp) = bounds(c);
    let (lo, hi) = (c * xm, c * xp);
    if x <= lo || x >= hi {
        return 0.0;
    }
    ((x - lo) * (hi - x)).sqrt() / (2.0 * PI * c * x)
}

/// Evaluator for the deformed density ρ_α at fixed parameters:
///
/// ρ_α(x) = (c|α|/x)^{α+2} / (2π c|α| Γ(α+1)) ∫_{X_-}^{X_+} e^{-c|α|t/x} t^α √((t-X_-)(X_+-t)) dt.
#[derive(Debug, Clone, Copy)]
pub struct GenMp {
    params: ScalingParams,
    x_minus: f64,
    x_plus: f64,
    scale: f64,
    ln_pref: f64,
}

impl GenMp {
    pub fn new(params: ScalingParams) -> Result<Self> {
        params.validate()?;
        let (x_minus, x_plus) = params.bounds();
        let scale = params.c * params.alpha.abs();
        let ln_pref = -(2.0 * PI * scale).ln() - ln_gamma(params.alpha + 1.0);
        Ok(Self { params, x_minus, x_plus, scale, ln_pref })
    }

    pub fn params(&self) -> ScalingParams {
        self.params
    }

    /// ln ∫ e^{-κ(t - X_-)} t^α √((t-X_-)(X_+-t)) dt.
    fn ln_edge_integral(&self, kappa: f64) -> Result<f64> {
        let (xm, xp) = (self.x_minus, self.x_plus);
        let width = xp - xm;
        let a = self.params.alpha;
        let theta_of = |t: f64| ((t - xm) / width).clamp(0.0, 1.0).sqrt().asin();
        let ln_w2 = (2.0 * width * width).ln();
        let ln_integrand = |theta: f64| {
            // t − X_- taken as w sin²θ directly: differencing t loses digits
            // when κ is large
            let s = theta.sin();
            let d = width * s * s;
            let t = xm + d;
            let sc = 0.5 * (2.0 * theta).sin();
            if t <= 0.0 || sc <= 0.0 {
                return f64::NEG_INFINITY;
            }
            ln_w2 + 2.0 * sc.ln() - kappa * d + a * t.ln()
        };
        let mut breaks = vec![0.0, FRAC_PI_2];
        if kappa > 0.0 {
            for m in [0.25, 1.0, 4.0, 16.0, 64.0] {
                breaks.push(theta_of(xm + m / kappa));
            }
            if a > 0.0 {
                let t_star = a / kappa;
                let w = a.sqrt() / kappa;
                for k in [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0] {
                    breaks.push(theta_of(t_star + k * w));
                }
            }
            if xm == 0.0 && a + 0.5 > 0.0 {
                // peak of t^{α+1/2} e^{−κt} at the hard edge
                breaks.push(theta_of((a + 0.5) / kappa));
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
        // keep exp in range: shift by the largest sampled log-integrand
        let mut probes: Vec<f64> = breaks.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        probes.extend((1..64).map(|i| FRAC_PI_2 * i as f64 / 64.0));
        probes.extend(breaks.iter().copied());
        let shift = probes.iter().map(|&th| ln_integrand(th)).fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return Err(Error::Numerical(format!("density integrand vanished at kappa = {kappa}")));
        }
        let integrand = |theta: f64| (ln_integrand(theta) - shift).exp();
        let tol = Tolerance { abs: 0.0, rel: 1e-12, max_intervals: 10_000 };
        let est = match quad::integrate_with_breaks(integrand, &breaks, tol) {
            // very thin boundary layers (tiny x, large α) stall near 1e-11
            Err(Error::Accuracy(_)) => {
                quad::integrate_with_breaks(integrand, &breaks, Tolerance { rel: 1e-9, ..tol })?
            }
            other => other?,
        };
        if !(est.value > 0.0) {
            return Err(Error::Numerical(format!("density integral vanished at kappa = {kappa}")));
        }
        Ok(est.value.ln() + shift)
    }

    /// ln ρ_α(x) from the t-integral.
    pub fn ln_density(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Ok(f64::NEG_INFINITY);
        }
        let kappa = self.scale / x;
        let ln_i = self.ln_edge_integral(kappa)?;
        Ok(self.ln_pref + (self.params.alpha + 2.0) * kappa.ln() - kappa * self.x_minus + ln_i)
    }

    /// ρ_α(x) from the t-integral.
    pub fn density(&self, x: f64) -> Result<f64> {
        Ok(self.ln_density(x)?.exp())
    }

    /// Edge moments M_k = ∫ t^{α+k} √((t-X_-)(X_+-t)) dt.
    pub fn edge_moment(&self, k: usize) -> Result<f64> {
        let (xm, xp) = (self.x_minus, self.x_plus);
        let width = xp - xm;
        let p = self.params.alpha + k as f64;
        let f = |theta: f64| {
            let s = theta.sin();
            let t = xm + width * s * s;
            if t <= 0.0 {
                return 0.0;
            }
            let sc = 0.5 * (2.0 * theta).sin();
            2.0 * width * width * sc * sc * t.powf(p)
        };
        Ok(quad::integrate(f, 0.0, FRAC_PI_2, Tolerance::new(0.0, 1e-13))?.value)
    }

    /// ∫_{x_cut}^∞ x^m ρ_α(x) dx from the large-x expansion
    /// ρ = Σ_k (-1)^k M_k (c|α|)^{α+2+k} x^{-(α+2+k)} / (2π c|α| Γ(α+1) k!).
    pub fn tail_integral(&self, x_cut: f64, m: u32) -> Result<f64> {
        let a = self.params.alpha;
        let mf = m as f64;
        if a + 1.0 - mf <= 0.0 {
            return Err(Error::MomentDivergence(format!(
                "moment {m} diverges for alpha = {a}: the density decays like x^-(alpha+2)"
            )));
        }
        if self.scale * self.x_plus / x_cut > 0.1 {
            return Err(Error::Domain(format!(
                "tail expansion needs x_cut >> c|alpha| X_+, got {x_cut}"
            )));
        }
        let mut total = 0.0;
        for k in 0..60 {
            let kf = k as f64;
            let mk = self.edge_moment(k)?;
            let ln_mag = self.ln_pref
                + mk.ln()
                + (a + 2.0 + kf) * self.scale.ln()
                - ln_gamma(kf + 1.0)
                + (mf - a - 1.0 - kf) * x_cut.ln();
            let term = ln_mag.exp() / (a + 1.0 + kf - mf);
            total += if k % 2 == 0 { term } else { -term };
            if term.abs() < 1e-17 * total.abs() {
                break;
            }
        }
        Ok(total)
    }

    /// ∫_0^∞ x^m ρ_α(x) dx, m ∈ {0, 1}: adaptive quadrature in u = √x up to
    /// a cut-off plus the analytic tail.
    pub fn moment(&self, m: u32) -> Result<f64> {
        let a = self.params.alpha;
        if a + 1.0 - m as f64 <= 0.0 {
            return Err(Error::MomentDivergence(format!(
                "moment {m} diverges for alpha = {a}"
            )));
        }
        let x_cut = (1.0e3f64).max(100.0 * self.scale * self.x_plus);
        let c = self.params.c;
        let mut pts: Vec<f64> = vec![0.0, x_cut.sqrt()];
        let mut g = 1e-4;
        while g < x_cut {
            pts.push(g.sqrt());
            g *= 2.0;
        }
        for x in [c * self.x_minus, c * self.x_plus, 1.0] {
            if x > 0.0 && x < x_cut {
                pts.push(x.sqrt());
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        let f = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let x = u * u;
            match self.density(x) {
                Ok(r) => 2.0 * u * r * x.powi(m as i32),
                Err(_) => f64::NAN,
            }
        };
        let tol = Tolerance { abs: 1e-13, rel: 1e-10, max_intervals: 4000 };
        let head = quad::integrate_with_breaks(f, &pts, tol)?;
        Ok(head.value + self.tail_integral(x_cut, m)?)
    }
}

/// ρ_α for c = 1 through the closed form
/// Γ(α+3/2)/(4|α|√π Γ(α+1)Γ(α+3)) (4|α|/x)^{α+2} 1F1(α+3/2; α+3; -4|α|/x).
pub fn gen_density_c1(x: f64, params: &ScalingParams) -> Result<f64> {
    Ok(ln_gen_density_c1(x, params)?.exp())
}

/// ln of [`gen_density_c1`].
pub fn ln_gen_density_c1(x: f64, params: &ScalingParams) -> Result<f64> {
    params.validate()?;
    if params.c != 1.0 {
        return Err(Error::Domain(format!("closed form needs c = 1, got {}", params.c)));
    }
    if !(x > 0.0) {
        return Ok(f64::NEG_INFINITY);
    }
    let a = params.alpha;
    let s = 4.0 * a.abs();
    let ln_pref = ln_gamma(a + 1.5) - s.ln() - 0.5 * PI.ln() - ln_gamma(a + 1.0) - ln_gamma(a + 3.0);
    let (ln_f, sign) = ln_hyp1f1(a + 1.5, a + 3.0, -s / x, &EvalPolicy::default())?;
    if sign <= 0.0 {
        return Err(Error::Numerical(format!("1F1 returned a non-positive value at x = {x}")));
    }
    Ok(ln_pref + (a + 2.0) * (s / x).ln() + ln_f)
}

/// ρ_α for c = 1 from the defining t-integral (cross-check of the closed form).
pub fn gen_density_c1_integral(x: f64, params: &ScalingParams) -> Result<f64> {
    if params.c != 1.0 {
        return Err(Error::Domain(format!("c = 1 expected, got {}", params.c)));
    }
    GenMp::new(*params)?.density(x)
}

/// ρ_α for 0 < c < 1 from the t-integral over [X_-, X_+].
pub fn gen_density_clt1(x: f64, params: &ScalingParams) -> Result<f64> {
    if !(params.c < 1.0) {
        return Err(Error::Domain(format!("c < 1 expected, got {}", params.c)));
    }
    GenMp::new(*params)?.density(x)
}

/// ρ_α for any c in (0, 1]; the closed form is used at c = 1.
pub fn gen_density(x: f64, params: &ScalingParams) -> Result<f64> {
    if params.c == 1.0 {
        gen_density_c1(x, params)
    } else {
        gen_density_clt1(x, params)
    }
}

/// Large- and small-x constants of the c < 1 density.
pub fn tail_constants(params: &ScalingParams) -> Result<TailConstants> {
    params.validate()?;
    if !(params.c < 1.0) {
        return Err(Error::Domain("tail constants are defined for c < 1".into()));
    }
    let (xm, xp) = params.bounds();
    let a = params.alpha;
    let w = xp - xm;
    let big_c = 0.125 * w * w * xm.powf(a) * PI * hyp2f1(1.5, -a, 3.0, -w / xm)?;
    let scale = params.c * a.abs();
    let ln_d = a * xm.ln() + 0.5 * w.ln() + (a - 0.5) * scale.ln()
        - (4.0 * PI.sqrt()).ln()
        - ln_gamma(a + 1.0);
    Ok(TailConstants { big_c, big_d: ln_d.exp(), x_minus: xm, x_plus: xp })
}

/// Leading large-x behaviour of ρ_α.
pub fn tail_asymptote(x: f64, params: &ScalingParams) -> Result<f64> {
    params.validate()?;
    let a = params.alpha;
    if params.c == 1.0 {
        let s = 4.0 * a.abs();
        let ln = ln_gamma(a + 1.5) + (a + 1.0) * s.ln()
            - 0.5 * PI.ln()
            - ln_gamma(a + 1.0)
            - ln_gamma(a + 3.0)
            - (a + 2.0) * x.ln();
        return Ok(ln.exp());
    }
    let tc = tail_constants(params)?;
    let scale = params.c * a.abs();
    let ln = -(a + 2.0) * x.ln() + (a + 1.0) * scale.ln() + tc.big_c.ln()
        - (2.0 * PI).ln()
        - ln_gamma(a + 1.0);
    Ok(ln.exp())
}

/// Leading small-x behaviour of ρ_α.
pub fn small_x_asymptote(x: f64, params: &ScalingParams) -> Result<f64> {
    params.validate()?;
    let a = params.alpha;
    if params.c == 1.0 {
        let ln = ln_gamma(a + 1.5) - PI.ln() - ln_gamma(a + 1.0) - 0.5 * a.abs().ln() - 0.5 * x.ln();
        return Ok(ln.exp());
    }
    let tc = tail_constants(params)?;
    let scale = params.c * a.abs();
    Ok(x.powf(-a - 0.5) * (-scale * tc.x_minus / x).exp() * tc.big_d)
}

/// Pseudo-edge: root of (α+1/2) ln X + c α X_-/X = 1 on (1e-8, c X_-].
pub fn pseudo_edge(params: &ScalingParams) -> Result<f64> {
    params.validate()?;
    if !(params.c < 1.0) {
        return Err(Error::Domain("the pseudo-edge needs c < 1 (X_- vanishes at c = 1)".into()));
    }
    let (xm, _) = params.bounds();
    let a = params.alpha;
    let k = params.c * a.abs() * xm;
    let f = |x: f64| (a + 0.5) * x.ln() + k / x - 1.0;
    let (mut lo, mut hi) = (1e-8, params.c * xm);
    let (flo, fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        return Err(Error::Numerical(format!(
            "no sign change of the damping condition on [{lo}, {hi}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maps a density on (0, ∞) to the symmetric density ϑ(y) = |y| ρ(y²) on ℝ.
pub fn theta_map<F: Fn(f64) -> f64>(rho: F) -> impl Fn(f64) -> f64 {
    move |y: f64| {
        if y == 0.0 {
            return 0.0;
        }
        y.abs() * rho(y * y)
    }
}

/// ϑ_α(0⁺) = b/π with b = Γ(α+3/2)/(Γ(α+1)√α).
pub fn theta_origin_limit(alpha: f64) -> f64 {
    crate::microlaw::b_constant(alpha) / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mp_values_and_moments() {
        assert!((mp_density(2.0, 1.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(mp_density(4.0, 1.0), 0.0);
        let (xm, xp) = bounds(0.5);
        assert_eq!(mp_density(0.5 * xm, 0.5), 0.0);
        assert_eq!(mp_density(0.5 * xp, 0.5), 0.0);
        for &c in &[0.25, 0.5, 1.0] {
            let (xm, xp) = bounds(c);
            let (lo, hi) = (c * xm, c * xp);
            // θ substitution x = lo + (hi-lo) sin²θ removes both edge singularities
            let m = |k: i32| {
                quad::integrate(
                    |th: f64| {
                        let s = th.sin();
                        let x = lo + (hi - lo) * s * s;
                        if x <= 0.0 {
                            return 0.0;
                        }
                        mp_density(x, c) * x.powi(k) * (hi - lo) * (2.0 * th).sin()
                    },
                    0.0,
                    FRAC_PI_2,
                    Tolerance::new(1e-14, 1e-12),
                )
                .unwrap()
                .value
            };
            assert!((m(0) - 1.0).abs() < 1e-9, "c {c}: mass {}", m(0));
            assert!((m(1) - 1.0).abs() < 1e-9, "c {c}: mean {}", m(1));
        }
    }

    #[test]
    fn closed_form_matches_integral() {
        for &a in &[-0.5, 0.1, 1.0, 3.0, 14.0] {
            let p = ScalingParams::new(a, 1.0).unwrap();
            for &x in &[0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0] {
                let cf = gen_density_c1(x, &p).unwrap();
                let it = gen_density_c1_integral(x, &p).unwrap();
                assert!((cf - it).abs() < 1e-9 * cf, "a {a} x {x}: {cf} vs {it}");
            }
        }
    }

    #[test]
    fn constant_d_from_direct_evaluation() {
        let p = ScalingParams::new(3.0, 0.3).unwrap();
        let tc = tail_constants(&p).unwrap();
        let g = GenMp::new(p).unwrap();
        let ratio = |x: f64| {
            let ln_lead = -3.5 * x.ln() - 0.9 * tc.x_minus / x + tc.big_d.ln();
            (g.ln_density(x).unwrap() - ln_lead).exp()
        };
        let (r3, r4) = (ratio(1e-3), ratio(1e-4));
        assert!((r3 - 1.0).abs() < 1e-2, "ratio {r3}");
        assert!((r4 - 1.0).abs() < 0.2 * (r3 - 1.0).abs(), "ratio {r4}");
        let x: f64 = 1e-3;
        let lead = x.powf(-3.5) * (-0.9 * tc.x_minus / x).exp();
        let rho = gen_density_clt1(x, &p).unwrap();
        // the printed 1/16 constant would be off by 4√π/16
        let printed = tc.big_d * 4.0 * PI.sqrt() / 16.0;
        assert!((rho / (lead * printed) - 1.0).abs() > 0.5);
    }

    #[test]
    fn alpha_zero_limit_of_c() {
        let c = 0.4;
        let (xm, xp) = bounds(c);
        let v = 0.125 * (xp - xm).powi(2) * PI * hyp2f1(1.5, 0.0, 3.0, -(xp - xm) / xm).unwrap();
        assert!((v - PI / 8.0 * (xp - xm).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn pseudo_edge_root() {
        let e = pseudo_edge(&ScalingParams::new(3.0, 0.3).unwrap()).unwrap();
        assert!((e - 0.055).abs() < 0.005, "{e}");
        let p = ScalingParams::new(1.0, 0.5).unwrap();
        let r = pseudo_edge(&p).unwrap();
        let (xm, _) = p.bounds();
        assert!((1.5 * r.ln() + 0.5 * xm / r - 1.0).abs() < 1e-10);
        assert!(pseudo_edge(&ScalingParams::new(1.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn theta_map_values() {
        let th = theta_map(|x| mp_density(x, 1.0));
        assert!((th(1.0) - (3.0f64).sqrt() / (2.0 * PI)).abs() < 1e-15);
        assert!((th(1e-12) - 1.0 / PI).abs() < 1e-6);
        let p = ScalingParams::new(2.0, 1.0).unwrap();
        let g = theta_map(|x| gen_density_c1(x, &p).unwrap());
        assert!((g(1e-4) / theta_origin_limit(2.0) - 1.0).abs() < 1e-3);
    }
}
