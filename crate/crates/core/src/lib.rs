//! Semi-Lagrangian discontinuous Galerkin (SLDG) operators.
//!
//! The solution space is the nodal DG space `V_k`: piecewise polynomials of
//! degree `k` stored by their values at the `k+1` Gauss points of each cell.
//! One time step traces characteristics backwards and projects the
//! transported data back onto `V_k` with a quadrature that is exact on each
//! piece where the integrand is smooth.
//!
//! The crate builds without `std` (an allocator is required). The `parallel`
//! feature spreads independent lines of 2D sweeps over a rayon pool.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod diffusion;
pub mod error;
pub mod field;
pub mod flow;
pub mod quadbasis;
pub mod split2d;
pub mod transport;

pub use error::{Error, Result};

use alloc::sync::Arc;

/// Shared scalar function of one variable.
pub type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Shared scalar function of two variables, `(t, x)` or `(x, y)` depending on context.
pub type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// Shared scalar function of `(t, x, y)`.
pub type Fn3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
