//! Power-law deformed Wishart-Laguerre random matrix ensembles.
//!
//! The deformed ensemble replaces the Gaussian weight of the Wishart-Laguerre
//! ensembles by (1 + (nβ/γ) Tr W)^{-γ}. Every spectral quantity is then a
//! Gamma average of its Gaussian counterpart, which is how most of this crate
//! computes them.

// `!(x > 0.0)` is deliberate: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// some coefficient tables carry more digits than an f64 holds
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod curve;
pub mod finite;
pub mod gammamix;
pub mod linalg;
pub mod macrolaw;
pub mod microlaw;
pub mod par;
pub mod quad;
pub mod sampler;
pub mod specfit;
pub mod specfun;
pub mod surmise;

pub use error::{Error, Result};
pub use par::Exec;

use serde::{Deserialize, Serialize};

/// Selects the undeformed (Gaussian) law or its power-law deformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Standard,
    Generalized,
}
