//! Real-argument special functions: Gamma, Laguerre polynomials, Bessel
//! functions and Gauss/Kummer hypergeometric functions.

mod bessel;
mod gamma;
mod hyper;
mod laguerre;

pub use bessel::{
    bessel_i, bessel_i_scaled, bessel_j, bessel_j_cumulative, bessel_j_int, bessel_j_series,
    bessel_k, bessel_k_scaled,
};
pub use gamma::{gamma, gamma_fn, ln_gamma, ln_gamma_fn, ln_pochhammer};
pub use hyper::{hyp1f1, hyp1f1_series, hyp1f1_with, hyp2f1, hyp2f1_with, ln_hyp1f1};
pub use laguerre::{laguerre, laguerre_normalized, laguerre_series};

use crate::error::{Error, Result};

/// Accuracy controls for series and iterative evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalPolicy {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for EvalPolicy {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_terms: 2000 }
    }
}

impl EvalPolicy {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        let p = Self { rel_tol, max_terms };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-6) {
            return Err(Error::Domain(format!(
                "rel_tol must lie in (0, 1e-6], got {}",
                self.rel_tol
            )));
        }
        if self.max_terms < 50 {
            return Err(Error::Domain(format!(
                "max_terms must be at least 50, got {}",
                self.max_terms
            )));
        }
        Ok(())
    }
}

/// True when `x` is 0, -1, -2, ...
pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}
