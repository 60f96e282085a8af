use std::f64::consts::PI;

use super::{is_nonpositive_integer, EvalPolicy};
use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_78;

fn lanczos_sum(xm1: f64) -> f64 {
    let mut s = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (xm1 + i as f64);
    }
    s
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Gamma function. Returns NaN at the poles (non-positive integers).
pub fn gamma(x: f64) -> f64 {
    if x.is_nan() || is_nonpositive_integer(x) {
        return f64::NAN;
    }
    if x == x.round() && x <= 171.0 {
        return factorial(x as usize - 1);
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    if x > 20.0 {
        return ln_gamma(x).exp();
    }
    let xm1 = x - 1.0;
    let t = xm1 + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(xm1 + 0.5) * (-t).exp() * lanczos_sum(xm1)
}

/// Natural log of |Γ(x)|.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() || is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin().abs()).ln() - ln_gamma(1.0 - x);
    }
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x >= 10.0 {
        // Stirling series with Bernoulli corrections
        let r = 1.0 / x;
        let r2 = r * r;
        let corr = r
            * (1.0 / 12.0
                - r2 * (1.0 / 360.0
                    - r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 * (1.0 / 1188.0)))));
        return (x - 0.5) * x.ln() - x + LN_SQRT_2PI + corr;
    }
    let xm1 = x - 1.0;
    let t = xm1 + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (xm1 + 0.5) * t.ln() - t + lanczos_sum(xm1).ln()
}

/// Checked Γ(x).
pub fn gamma_fn(x: f64, policy: &EvalPolicy) -> Result<f64> {
    policy.validate()?;
    if is_nonpositive_integer(x) {
        return Err(Error::Domain(format!("Gamma has a pole at {x}")));
    }
    let v = gamma(x);
    if v.is_infinite() {
        return Err(Error::Domain(format!("Gamma overflows at {x}; use ln_gamma")));
    }
    Ok(v)
}

/// Checked ln|Γ(x)|.
pub fn ln_gamma_fn(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::Domain(format!("Gamma has a pole at {x}")));
    }
    Ok(ln_gamma(x))
}

/// ln of the rising factorial (a)_k = Γ(a+k)/Γ(a) for a > 0.
pub fn ln_pochhammer(a: f64, k: f64) -> f64 {
    ln_gamma(a + k) - ln_gamma(a)
}
