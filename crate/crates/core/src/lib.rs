//! Wigner-Yanase entropy and its subadditivity inequalities for
//! multipartite pure states.
//!
//! - [`linalg`]: Hermitian matrices, Jacobi eigendecomposition, PSD square root.
//! - [`states`]: pure states, density matrices, partial traces, `γ`.
//! - [`skew`]: the entropy and the slack of each inequality.
//! - [`witness`]: the three-qubit counterexample, checked number by number.
//! - [`search`]: multi-start Nelder-Mead hunt for violations.
//! - [`sampling`]: random ensembles shared by checks and search.

#![forbid(unsafe_code)]
// `!(x <= tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod sampling;
pub mod search;
pub mod skew;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{Complex, HermitianMatrix, Matrix, SpectralDecomposition};
pub use skew::{InequalityId, SlackReport};
pub use states::{DensityMatrix, Normalization, PureState, SiteSubset};
