//! Eigenvalue solvers. Only spectra are ever needed, so no eigenvectors are formed.

#![allow(clippy::needless_range_loop)]

mod dense;
mod hermitian;
mod tridiag;

pub use dense::{eigen_sym, SymMatrix};
pub use hermitian::HermitianMatrix;
pub use tridiag::SymTridiagonal;
