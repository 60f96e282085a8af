use std::f64::consts::PI;

use super::gamma::ln_gamma;
use crate::error::{Error, Result};
use crate::quad::{self, GaussLegendre, Tolerance};

/// Power series for J_ν(x), x ≥ 0. Accurate while x²/4 is not much larger
/// than ν + 1; exposed mainly as a reference.
pub fn bessel_j_series(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..2000 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum * (nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)).exp()
}

/// Hankel asymptotic coefficients a_k(ν)/x^k, summed until the smallest term.
fn hankel_sums(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn bessel_j_hankel(nu: f64, x: f64) -> f64 {
    let (p, q) = hankel_sums(nu, x);
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Miller's backward recurrence, normalised with the Neumann series
/// (x/2)^μ = Σ_k (μ+2k) Γ(μ+k)/k! J_{μ+2k}(x) for the fractional part μ of ν.
fn bessel_j_miller(nu: f64, x: f64) -> f64 {
    let n = nu.floor() as usize;
    let nu0 = nu - n as f64;
    let start = n.max(x.ceil() as usize) + 30 + (60.0 * x).sqrt().ceil() as usize;
    let m = start + start % 2;
    let coef_top = if nu0 == 0.0 {
        2.0
    } else {
        let i = (m / 2) as f64;
        ((nu0 + 2.0 * i).ln() + ln_gamma(nu0 + i) - ln_gamma(i + 1.0)).exp()
    };
    let mut coef = coef_top;
    let mut f_next = 0.0;
    let mut f = 1e-30;
    let mut sum = coef * f;
    let mut saved = if m == n { f } else { 0.0 };
    for k in (1..=m).rev() {
        let f_prev = 2.0 * (nu0 + k as f64) / x * f - f_next;
        f_next = f;
        f = f_prev;
        let j = k - 1;
        if j % 2 == 0 {
            let i = (j / 2) as f64;
            coef = if nu0 == 0.0 {
                if j == 0 {
                    1.0
                } else {
                    2.0
                }
            } else {
                coef * (nu0 + 2.0 * i) / (nu0 + 2.0 * i + 2.0) * (i + 1.0) / (nu0 + i)
            };
            sum += coef * f;
        }
        if j == n {
            saved = f;
        }
        if f.abs() > 1e250 {
            f *= 1e-250;
            f_next *= 1e-250;
            sum *= 1e-250;
            saved *= 1e-250;
        }
    }
    saved * (0.5 * x).powf(nu0) / sum
}

/// Bessel function of the first kind J_ν(x) for ν ≥ 0 and x ≥ 0.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    if nu < 0.0 || x < 0.0 || nu.is_nan() || x.is_nan() {
        return f64::NAN;
    }
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x <= 4.0 || x * x <= 12.0 * (nu + 1.0) {
        bessel_j_series(nu, x)
    } else if x > (nu * nu).max(40.0) {
        bessel_j_hankel(nu, x)
    } else {
        bessel_j_miller(nu, x)
    }
}

/// J_n(x) for any integer order and real argument.
pub fn bessel_j_int(n: i64, x: f64) -> f64 {
    let parity = |k: i64| if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut sign = 1.0;
    if n < 0 {
        sign *= parity(n);
    }
    if x < 0.0 {
        sign *= parity(n);
    }
    sign * bessel_j(n.unsigned_abs() as f64, x.abs())
}

fn ln_scaled_series_i(nu: f64, x: f64) -> f64 {
    // ln(e^{-x} I_ν(x)) via the ascending series with running rescaling
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut ln_off = 0.0;
    for k in 1..100_000 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
        if sum > 1e250 {
            sum *= 1e-250;
            term *= 1e-250;
            ln_off += 250.0 * std::f64::consts::LN_10;
        }
    }
    sum.ln() + ln_off + nu * (0.5 * x).ln() - ln_gamma(nu + 1.0) - x
}

fn scaled_asymptotic_i(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// Exponentially scaled modified Bessel function e^{-x} I_ν(x), x ≥ 0.
/// Negative integer orders map to I_{-n} = I_n.
pub fn bessel_i_scaled(nu: f64, x: f64) -> f64 {
    let nu = if nu < 0.0 && nu == nu.round() { -nu } else { nu };
    if nu < 0.0 || x < 0.0 || nu.is_nan() || x.is_nan() {
        return f64::NAN;
    }
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x > (nu * nu).max(30.0) {
        scaled_asymptotic_i(nu, x)
    } else {
        ln_scaled_series_i(nu, x).exp()
    }
}

/// Modified Bessel function of the first kind I_ν(x), x ≥ 0.
pub fn bessel_i(nu: f64, x: f64) -> f64 {
    let s = bessel_i_scaled(nu, x);
    if s == 0.0 {
        return 0.0;
    }
    (s.ln() + x).exp()
}

fn half_integer_offset(mu: f64) -> Option<usize> {
    let m = mu.abs() - 0.5;
    if m >= 0.0 && m == m.round() {
        Some(m as usize)
    } else {
        None
    }
}

/// Exponentially scaled e^{x} K_μ(x) for x > 0.
pub fn bessel_k_scaled(mu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("K_mu needs x > 0, got {x}")));
    }
    let mu = mu.abs();
    if let Some(m) = half_integer_offset(mu) {
        // K_{1/2} closed form and upward recurrence
        let mut k_prev = (PI / (2.0 * x)).sqrt();
        if m == 0 {
            return Ok(k_prev);
        }
        let mut k_cur = k_prev * (1.0 + 1.0 / x);
        for j in 1..m {
            let order = j as f64 + 0.5;
            let next = k_prev + 2.0 * order / x * k_cur;
            k_prev = k_cur;
            k_cur = next;
        }
        return Ok(k_cur);
    }
    // e^{x} K_μ(x) = ∫_0^∞ exp(-2x sinh²(t/2)) cosh(μt) dt
    let integrand = |t: f64| {
        let s = (0.5 * t).sinh();
        let e = -2.0 * x * s * s + mu * t;
        0.5 * e.exp() * (1.0 + (-2.0 * mu * t).exp())
    };
    let mut upper: f64 = 1.0;
    while -2.0 * x * (0.5 * upper).sinh().powi(2) + mu * upper > -60.0 {
        upper *= 1.5;
    }
    let peak = (mu / x).asinh();
    let mut breaks = vec![0.0];
    if peak > 0.0 && peak < upper {
        breaks.push(peak);
    }
    breaks.push(upper);
    let est = quad::integrate_with_breaks(integrand, &breaks, Tolerance::new(0.0, 1e-14))?;
    Ok(est.value)
}

/// Modified Bessel function of the second kind K_μ(x), x > 0.
pub fn bessel_k(mu: f64, x: f64) -> Result<f64> {
    Ok(bessel_k_scaled(mu, x)? * (-x).exp())
}

/// ∫_0^v J_ν(t) dt for integer ν, integrating panel by panel over π-long
/// pieces (roughly the spacing of Bessel zeros).
pub fn bessel_j_cumulative(nu: u32, v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let order = nu as f64;
    let f = |t: f64| bessel_j(order, t);
    let mut breaks: Vec<f64> = (0..).map(|k| k as f64 * PI).take_while(|&b| b < v).collect();
    breaks.push(v);
    match quad::integrate_with_breaks(f, &breaks, Tolerance::new(1e-15, 1e-14)) {
        Ok(e) => e.value,
        Err(_) => {
            let rule = GaussLegendre::new(48);
            breaks.windows(2).map(|w| rule.integrate(w[0], w[1], f)).sum()
        }
    }
}
