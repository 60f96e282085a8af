//! Small dense linear algebra: determinants, Pfaffians and self-adjoint
//! eigenvalues via Householder reduction and implicit QL.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Determinant of a row-major n×n matrix by LU with partial pivoting.
pub fn det(a: &[f64], n: usize) -> f64 {
    let (ln, sign) = ln_abs_det(a, n);
    if sign == 0.0 {
        0.0
    } else {
        sign * ln.exp()
    }
}

/// (ln|det A|, sign) by LU with partial pivoting; sign is 0 for singular A.
pub fn ln_abs_det(a: &[f64], n: usize) -> (f64, f64) {
    assert_eq!(a.len(), n * n, "matrix must be n×n");
    let mut m = a.to_vec();
    let mut sign = 1.0;
    let mut ln = 0.0;
    for col in 0..n {
        let (piv, pmax) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pmax == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        if piv != col {
            for c in 0..n {
                m.swap(piv * n + c, col * n + c);
            }
            sign = -sign;
        }
        let p = m[col * n + col];
        sign *= p.signum();
        ln += p.abs().ln();
        for r in col + 1..n {
            let factor = m[r * n + col] / p;
            if factor != 0.0 {
                for c in col + 1..n {
                    m[r * n + c] -= factor * m[col * n + c];
                }
            }
        }
    }
    (ln, sign)
}

/// Pfaffian of a row-major skew-symmetric matrix by recursive expansion
/// along the first row. Intended for the small (n ≤ 10) matrices used here.
pub fn pfaffian(a: &[f64], n: usize) -> f64 {
    assert_eq!(a.len(), n * n, "matrix must be n×n");
    let idx: Vec<usize> = (0..n).collect();
    pfaffian_rec(a, n, &idx)
}

fn pfaffian_rec(a: &[f64], n: usize, idx: &[usize]) -> f64 {
    let k = idx.len();
    if k == 0 {
        return 1.0;
    }
    if k % 2 == 1 {
        return 0.0;
    }
    if k == 2 {
        return a[idx[0] * n + idx[1]];
    }
    let first = idx[0];
    let mut total = 0.0;
    let mut rest: Vec<usize> = Vec::with_capacity(k - 2);
    for j in 1..k {
        let entry = a[first * n + idx[j]];
        if entry == 0.0 {
            continue;
        }
        rest.clear();
        rest.extend(idx[1..].iter().enumerate().filter(|&(p, _)| p + 1 != j).map(|(_, &v)| v));
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        total += sign * entry * pfaffian_rec(a, n, &rest);
    }
    total
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (e[i] couples i and i+1) by implicit QL with Wilkinson
/// shifts. Returned in ascending order.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, e_in: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    if e_in.len() + 1 < n {
        return Err(Error::Domain("off-diagonal too short".into()));
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&e_in[..n - 1]);
    let max_iter = 30 * n.max(1);
    let mut iterations = 0;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > max_iter {
                return Err(Error::Numerical(format!(
                    "tridiagonal QL did not converge after {max_iter} sweeps"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Scalar field for dense self-adjoint matrices (real or complex).
pub trait Scalar: Copy + Send + Sync + std::fmt::Debug {
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn abs2(self) -> f64;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn scale(self, s: f64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn re(self) -> f64 {
        self
    }
    fn abs2(self) -> f64 {
        self * self
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

/// Reduces a row-major self-adjoint matrix to real symmetric tridiagonal form
/// (d, |e|) with Householder reflections. Only the lower triangle is read.
pub fn householder_tridiagonalize<T: Scalar>(mut a: Vec<T>, n: usize) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n, "matrix must be n×n");
    // mirror the lower triangle so the updates below can use full rows
    for i in 0..n {
        for j in 0..i {
            a[j * n + i] = a[i * n + j].conj();
        }
    }
    let mut v = vec![T::zero(); n];
    let mut p = vec![T::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let norm2: f64 = (k + 1..n).map(|i| a[i * n + k].abs2()).sum();
        let x0 = a[(k + 1) * n + k];
        let tail2 = norm2 - x0.abs2();
        if tail2 <= f64::MIN_POSITIVE {
            continue;
        }
        let norm = norm2.sqrt();
        let x0_abs = x0.abs2().sqrt();
        // alpha = -phase(x0) ‖x‖
        let phase = if x0_abs > 0.0 { x0.scale(1.0 / x0_abs) } else { T::from_real(1.0) };
        let alpha = phase.scale(-norm);
        for i in 0..n {
            v[i] = T::zero();
        }
        v[k + 1] = x0.sub(alpha);
        for i in k + 2..n {
            v[i] = a[i * n + k];
        }
        let vnorm2: f64 = (k + 1..n).map(|i| v[i].abs2()).sum();
        let tau = 2.0 / vnorm2;
        // p = tau A v on the trailing block
        for i in k + 1..n {
            let mut s = T::zero();
            for j in k + 1..n {
                s = s.add(a[i * n + j].mul(v[j]));
            }
            p[i] = s.scale(tau);
        }
        let mut vp = T::zero();
        for i in k + 1..n {
            vp = vp.add(v[i].conj().mul(p[i]));
        }
        let kk = 0.5 * tau * vp.re();
        for i in k + 1..n {
            p[i] = p[i].sub(v[i].scale(kk));
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let upd = v[i].mul(p[j].conj()).add(p[i].mul(v[j].conj()));
                a[i * n + j] = a[i * n + j].sub(upd);
            }
        }
        a[(k + 1) * n + k] = alpha;
        a[k * n + k + 1] = alpha.conj();
        for i in k + 2..n {
            a[i * n + k] = T::zero();
            a[k * n + i] = T::zero();
        }
    }
    let d = (0..n).map(|i| a[i * n + i].re()).collect();
    let e = (0..n.saturating_sub(1)).map(|i| a[(i + 1) * n + i].abs2().sqrt()).collect();
    (d, e)
}

/// Ascending eigenvalues of a dense self-adjoint matrix.
pub fn eigensolve_selfadjoint<T: Scalar>(a: Vec<T>, n: usize) -> Result<Vec<f64>> {
    let scale = a.iter().map(|x| x.abs2()).fold(0.0, f64::max).sqrt();
    for i in 0..n {
        for j in 0..i {
            let diff = a[i * n + j].sub(a[j * n + i].conj()).abs2().sqrt();
            if diff > 1e-10 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::Domain(format!(
                    "matrix is not self-adjoint: entry ({i}, {j}) differs by {diff:e}"
                )));
            }
        }
    }
    let (d, e) = householder_tridiagonalize(a, n);
    tridiagonal_eigenvalues(d, &e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn determinants() {
        assert!((det(&[2.0, 1.0, 1.0, 2.0], 2) - 3.0).abs() < 1e-15);
        let a = [0.0, 2.0, 1.0, 1.0, 0.0, 3.0, 4.0, 1.0, 0.0];
        // by cofactors: 0(0-3) - 2(0-12) + 1(1-0) = 25
        assert!((det(&a, 3) - 25.0).abs() < 1e-13);
        assert_eq!(det(&[1.0, 2.0, 2.0, 4.0], 2), 0.0);
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2usize, 4, 6, 8] {
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in i + 1..n {
                    let x: f64 = rng.random_range(-1.0..1.0);
                    a[i * n + j] = x;
                    a[j * n + i] = -x;
                }
            }
            let pf = pfaffian(&a, n);
            assert!((pf * pf - det(&a, n)).abs() < 1e-12, "n = {n}");
        }
        // Pf of [[0, a, b, c], ...] = af - be + cd
        let m = [0.0, 1.0, 2.0, 3.0, -1.0, 0.0, 4.0, 5.0, -2.0, -4.0, 0.0, 6.0, -3.0, -5.0, -6.0, 0.0];
        assert_eq!(pfaffian(&m, 4), 1.0 * 6.0 - 2.0 * 5.0 + 3.0 * 4.0);
        assert_eq!(pfaffian(&[0.0; 9], 3), 0.0);
    }

    #[test]
    fn small_eigenproblems() {
        let ev = eigensolve_selfadjoint(vec![2.0, 1.0, 1.0, 2.0], 2).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        let mut id = vec![0.0; 25];
        for i in 0..5 {
            id[i * 5 + i] = 1.0;
        }
        assert!(eigensolve_selfadjoint(id, 5).unwrap().iter().all(|&x| (x - 1.0).abs() < 1e-15));
        assert!(eigensolve_selfadjoint(vec![1.0, 2.0, 0.0, 1.0], 2).is_err());
    }

    fn random_wishart(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let m = n + 3;
        let x: Vec<f64> = (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                w[i * n + j] = (0..m).map(|k| x[k * n + i] * x[k * n + j]).sum();
            }
        }
        w
    }

    #[test]
    fn trace_and_residual_on_random_wishart() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 50;
        let w = random_wishart(n, &mut rng);
        let trace: f64 = (0..n).map(|i| w[i * n + i]).sum();
        let ev = eigensolve_selfadjoint(w.clone(), n).unwrap();
        assert!(((ev.iter().sum::<f64>() - trace) / trace).abs() < 1e-9);
        assert!(ev.windows(2).all(|p| p[0] <= p[1]));
        // spot-check: det(W - λ I) changes sign across each eigenvalue
        let norm = ev[n - 1];
        for &lam in &[ev[0], ev[n / 2], ev[n - 1]] {
            let mut shifted = w.clone();
            for i in 0..n {
                shifted[i * n + i] -= lam;
            }
            let (ln, _) = ln_abs_det(&shifted, n);
            let mut base = w.clone();
            for i in 0..n {
                base[i * n + i] -= lam + 1e-3 * norm;
            }
            let (ln_off, _) = ln_abs_det(&base, n);
            assert!(ln < ln_off - 5.0, "eigenvalue {lam} is not a root");
        }
    }

    #[test]
    fn complex_hermitian_matches_real_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 6;
        let mut h = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            h[i * n + i] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in 0..i {
                let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                h[i * n + j] = z;
                h[j * n + i] = z.conj();
            }
        }
        // [[Re, -Im], [Im, Re]] has every eigenvalue twice
        let m = 2 * n;
        let mut r = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                let z = h[i * n + j];
                r[i * m + j] = z.re;
                r[(i + n) * m + j + n] = z.re;
                r[i * m + j + n] = -z.im;
                r[(i + n) * m + j] = z.im;
            }
        }
        let ec = eigensolve_selfadjoint(h, n).unwrap();
        let er = eigensolve_selfadjoint(r, m).unwrap();
        for i in 0..n {
            assert!((ec[i] - er[2 * i]).abs() < 1e-12);
            assert!((ec[i] - er[2 * i + 1]).abs() < 1e-12);
        }
    }
}
