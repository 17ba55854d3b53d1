//! Solver library for the one-dimensional time-fractional Fokker–Planck
//! equation
//!
//! ```text
//! u_t - ∂_x( ∂_t^{1-α} κ ∂_x u - F ∂_t^{1-α} u ) = f,   0 < α ≤ 1,
//! ```
//!
//! discretised in time by an L1 scheme on power-graded meshes `t_i = T (i/N)^γ`
//! and in space by continuous piecewise-linear Galerkin elements.
//!
//! Module map:
//!
//! - [`timegrid`]: graded temporal meshes and their diagnostics.
//! - [`frackernel`]: the `ω_β` kernels, L1 history weights, the Mittag-Leffler
//!   function and the interpolation-error probe.
//! - [`fem1d`]: P1 assembly, norms, projections and the tridiagonal solver.
//! - [`stepper`]: the time-stepping driver.
//! - [`problems`]: manufactured test problems with Fourier/Mittag-Leffler
//!   series solutions.
//! - [`harness`]: error metrics, convergence rates and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fem1d;
pub mod frackernel;
pub mod harness;
pub mod problems;
pub mod quadrature;
pub mod special;
pub mod stepper;
pub mod timegrid;

pub use error::{Error, Result};
