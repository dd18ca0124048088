//! Numerical laboratory for overlaps of spherical spin glasses at low temperature.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod edgelimit;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod overlap;
pub mod quadrature;
pub mod saddle;
pub mod spectral;
pub mod zerodiag;

pub use error::{Error, Result};
