use super::gamma::ln_gamma;

/// Generalized Laguerre polynomial L_k^ν(z) from the three-term recurrence.
pub fn laguerre(k: usize, nu: f64, z: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = nu + 1.0 - z;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + nu + 1.0 - z) * cur - (jf + nu) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// L_k^ν(z) from its explicit binomial sum; slow, used as a reference.
pub fn laguerre_series(k: usize, nu: f64, z: f64) -> f64 {
    // L_k^ν(z) = Σ_j (-1)^j Γ(k+ν+1) / (Γ(k-j+1) Γ(ν+j+1) j!) z^j
    let mut sum = 0.0;
    for j in 0..=k {
        let ln_c = ln_gamma(k as f64 + nu + 1.0)
            - ln_gamma((k - j) as f64 + 1.0)
            - ln_gamma(nu + j as f64 + 1.0)
            - ln_gamma(j as f64 + 1.0);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * ln_c.exp() * z.powi(j as i32);
    }
    sum
}

/// Orthonormal Laguerre values p_j(z) = √(j!/Γ(j+ν+1)) L_j^ν(z) for j = 0..count.
///
/// With this scaling Σ_j p_j(z)² z^ν e^{-z} is the Laguerre kernel diagonal
/// and the recurrence stays O(1) for large j.
pub fn laguerre_normalized(count: usize, nu: f64, z: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let p0 = (-0.5 * ln_gamma(nu + 1.0)).exp();
    out.push(p0);
    if count == 1 {
        return out;
    }
    out.push((nu + 1.0 - z) * p0 / (nu + 1.0).sqrt());
    for k in 1..count - 1 {
        let kf = k as f64;
        let next = ((2.0 * kf + nu + 1.0 - z) * out[k] - (kf * (kf + nu)).sqrt() * out[k - 1])
            / ((kf + 1.0) * (kf + nu + 1.0)).sqrt();
        out.push(next);
    }
    out
}
