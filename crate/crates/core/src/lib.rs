//! Completely positive, copositive, psd and SOS biquadratic tensors.
//!
//! A biquadratic tensor `a[i][j][k][l]` (`i, k < m`, `j, l < n`) with the symmetries
//! `i ↔ k` and `j ↔ l` defines the form `F(x, y) = Σ a_ijkl x_i y_j x_k y_l`.
//! Indices are 0-based in the API and 1-based in error messages and documents.

pub mod decompose;
pub mod error;
pub mod flatten;
pub mod generators;
pub mod harness;
pub mod io;
mod linalg;
pub mod positivity;
pub mod quadrature;
pub mod random;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{BiquadraticTensor, VectorPair};
