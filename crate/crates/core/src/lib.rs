//! Finite-sample error bounds for binary quantum hypothesis testing.
//!
//! The crate computes the Stein, Hoeffding and Chernoff regime bounds on the
//! optimal error probabilities of discriminating `rho^{(x)n}` from
//! `sigma^{(x)n}`, together with exact small-`n` oracles that check them:
//! Holevo-Helstrom mixed errors, the LP-dual optimal type-II error, method of
//! types enumeration for classical pairs and incomplete-beta formulas for
//! binary distributions.
//!
//! All entropic quantities are in nats.

pub mod classical_binary;
pub mod divergences;
pub mod error;
pub mod exact_oracles;
pub mod finite_bounds;
pub mod linalg;
pub mod ns_mapping;
pub mod numeric;

pub use divergences::{DivergenceProfile, PsiCurve};
pub use error::{Error, Result};
pub use linalg::{DensityMatrix, HermitianMatrix, SpectralDecomposition};
pub use ns_mapping::{ClassicalPair, TypeVector};
