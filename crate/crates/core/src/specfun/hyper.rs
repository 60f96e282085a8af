use std::f64::consts::{FRAC_PI_2, LN_10};

use super::gamma::ln_gamma;
use super::{is_nonpositive_integer, EvalPolicy};
use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

const RESCALE: f64 = 1e250;
const LN_RESCALE: f64 = 250.0 * LN_10;

fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 || (x.floor() as i64) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sums Σ_k (a)_k / ((b)_k k!) z^k with running rescaling; returns (ln|S|, sign).
fn kummer_series(a: f64, b: f64, z: f64, policy: &EvalPolicy) -> Result<(f64, f64)> {
    let cap = policy.max_terms + (4.0 * (z.abs() + (a * z).abs().sqrt())) as usize + 200;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut ln_off = 0.0;
    for k in 0..cap {
        let kf = k as f64;
        if a + kf == 0.0 {
            return finish(sum, ln_off);
        }
        let ratio = (a + kf) * z / ((b + kf) * (kf + 1.0));
        term *= ratio;
        sum += term;
        let next = ((a + kf + 1.0) * z / ((b + kf + 1.0) * (kf + 2.0))).abs();
        if term.abs() <= 1e-17 * sum.abs() && next < 0.5 {
            return finish(sum, ln_off);
        }
        if sum.abs() > RESCALE || term.abs() > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            ln_off += LN_RESCALE;
        }
    }
    Err(Error::Accuracy(format!(
        "1F1({a}; {b}; {z}) series did not converge within {cap} terms"
    )))
}

fn finish(sum: f64, ln_off: f64) -> Result<(f64, f64)> {
    if sum == 0.0 {
        return Ok((f64::NEG_INFINITY, 1.0));
    }
    Ok((sum.abs().ln() + ln_off, sum.signum()))
}

/// Large-t algebraic expansion of 1F1(a; b; -t); None when it does not settle
/// or when the exponentially small companion term is not negligible.
fn kummer_asymptotic(a: f64, b: f64, t: f64) -> Option<(f64, f64)> {
    if t < 20.0 {
        return None;
    }
    let companion = ln_gamma(b - a) - ln_gamma(a) - t + (2.0 * a - b) * t.ln();
    if companion > -40.0 {
        return None;
    }
    let c = a - b + 1.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut last = f64::INFINITY;
    for s in 0..500 {
        let sf = s as f64;
        term *= (a + sf) * (c + sf) / ((sf + 1.0) * t);
        if term.abs() > last {
            return None;
        }
        last = term.abs();
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            let ln = ln_gamma(b) - ln_gamma(b - a) - a * t.ln() + sum.abs().ln();
            let sign = gamma_sign(b) * gamma_sign(b - a) * sum.signum();
            return Some((ln, sign));
        }
    }
    None
}

/// ln|1F1(a; b; z)| and its sign.
///
/// Negative arguments go through Kummer's transformation
/// 1F1(a; b; z) = e^z 1F1(b-a; b; -z), whose series has no cancellation for
/// b > a, b > 0; very negative arguments use the algebraic asymptotic expansion.
pub fn ln_hyp1f1(a: f64, b: f64, z: f64, policy: &EvalPolicy) -> Result<(f64, f64)> {
    policy.validate()?;
    if is_nonpositive_integer(b) {
        return Err(Error::Domain(format!("1F1 has a pole at b = {b}")));
    }
    if !(a.is_finite() && z.is_finite()) {
        return Err(Error::Domain("1F1 needs finite arguments".into()));
    }
    if z == 0.0 {
        return Ok((0.0, 1.0));
    }
    if a == b {
        return Ok((z, 1.0));
    }
    if is_nonpositive_integer(a) || z > 0.0 {
        return kummer_series(a, b, z, policy);
    }
    let t = -z;
    if !is_nonpositive_integer(b - a) {
        if let Some(r) = kummer_asymptotic(a, b, t) {
            return Ok(r);
        }
    }
    let (ln, sign) = kummer_series(b - a, b, t, policy)?;
    Ok((ln - t, sign))
}

/// Confluent hypergeometric function 1F1(a; b; z) with an explicit policy.
pub fn hyp1f1_with(a: f64, b: f64, z: f64, policy: &EvalPolicy) -> Result<f64> {
    let (ln, sign) = ln_hyp1f1(a, b, z, policy)?;
    Ok(sign * ln.exp())
}

/// Confluent hypergeometric function 1F1(a; b; z).
pub fn hyp1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    hyp1f1_with(a, b, z, &EvalPolicy::default())
}

/// Plain Maclaurin series of 1F1 with no transformation; reference only.
pub fn hyp1f1_series(a: f64, b: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..10_000 {
        let kf = k as f64;
        term *= (a + kf) * z / ((b + kf) * (kf + 1.0));
        sum += term;
        if term == 0.0 || (term.abs() <= 1e-17 * sum.abs() && kf > z.abs()) {
            break;
        }
    }
    sum
}

fn gauss_series(a: f64, b: f64, c: f64, z: f64, cap: usize) -> Option<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..cap {
        let kf = k as f64;
        if a + kf == 0.0 || b + kf == 0.0 {
            return Some(sum);
        }
        term *= (a + kf) * (b + kf) * z / ((c + kf) * (kf + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * (1.0 - z.abs()) * sum.abs() {
            return Some(sum);
        }
    }
    None
}

/// Euler integral Γ(c)/(Γ(b)Γ(c-b)) ∫_0^1 t^{b-1}(1-t)^{c-b-1}(1-zt)^{-a} dt,
/// valid for c > b > 0 and z < 1, with t = sin²θ.
fn euler_integral(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let shift = if a < 0.0 && z < 0.0 { -a * (1.0 - z).ln() } else { 0.0 };
    let integrand = |theta: f64| {
        let (s, co) = theta.sin_cos();
        if s <= 0.0 || co <= 0.0 {
            return 0.0;
        }
        let l = std::f64::consts::LN_2 + (2.0 * b - 1.0) * s.ln() + (2.0 * (c - b) - 1.0) * co.ln()
            - a * (1.0 - z * s * s).ln()
            - shift;
        l.exp()
    };
    let mut breaks = vec![0.0];
    if z < -1.0 {
        breaks.push((1.0 / (-z)).sqrt().asin());
    }
    breaks.push(FRAC_PI_2);
    let est = quad::integrate_with_breaks(integrand, &breaks, Tolerance::new(0.0, 1e-14))?;
    let ln_pref = ln_gamma(c) - ln_gamma(b) - ln_gamma(c - b) + shift;
    Ok(est.value * ln_pref.exp())
}

/// Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1.
pub fn hyp2f1_with(a: f64, b: f64, c: f64, z: f64, policy: &EvalPolicy) -> Result<f64> {
    policy.validate()?;
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("2F1 has a pole at c = {c}")));
    }
    if !(z < 1.0) {
        return Err(Error::Domain(format!("2F1 is implemented for z < 1, got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let long_cap = policy.max_terms * 100;
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return gauss_series(a, b, c, z, long_cap)
            .ok_or_else(|| Error::Accuracy("terminating 2F1 did not terminate".into()));
    }
    if z.abs() <= 0.5 {
        if let Some(v) = gauss_series(a, b, c, z, policy.max_terms) {
            return Ok(v);
        }
    }
    if z < 0.0 {
        // Pfaff: 2F1(a,b;c;z) = (1-z)^{-a} 2F1(a, c-b; c; z/(z-1))
        let w = z / (z - 1.0);
        let one_minus = 1.0 - z;
        if is_nonpositive_integer(c - b) || w <= 0.5 {
            if let Some(v) = gauss_series(a, c - b, c, w, long_cap) {
                return Ok(one_minus.powf(-a) * v);
            }
        }
        if is_nonpositive_integer(c - a) {
            if let Some(v) = gauss_series(c - a, b, c, w, long_cap) {
                return Ok(one_minus.powf(-b) * v);
            }
        }
    }
    if c > b && b > 0.0 {
        return euler_integral(a, b, c, z);
    }
    if c > a && a > 0.0 {
        return euler_integral(b, a, c, z);
    }
    let (x, pref, p, q) = if z < 0.0 {
        (z / (z - 1.0), (1.0 - z).powf(-a), a, c - b)
    } else {
        (z, 1.0, a, b)
    };
    gauss_series(p, q, c, x, long_cap)
        .map(|v| pref * v)
        .ok_or_else(|| Error::Accuracy(format!("2F1({a}, {b}; {c}; {z}) did not converge")))
}

/// Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    hyp2f1_with(a, b, c, z, &EvalPolicy::default())
}
