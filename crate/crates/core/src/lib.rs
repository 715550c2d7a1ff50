//! Spectral solver and decay-rate laboratory for the strongly damped
//! Boussinesq-type equation
//!
//! ```text
//! u_tt − Δu + Δ²u + αΔu_t + Δ²u_t = Δ(f(u) + β g(u_t))
//! ```
//!
//! on periodic boxes in one to three dimensions.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod quadrature;
pub mod spectral;
pub mod symbols;
pub mod linear;
pub mod nonlinear;
pub mod analysis;

pub use error::{Error, Result};
