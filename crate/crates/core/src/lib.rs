//! Construction and numerical verification of self-similar solutions of
//! the steady simplified Ericksen–Leslie system
//!
//! ```text
//! -Δu + u·∇u + ∇p = -div(∇d ⊙ ∇d),   div u = 0,
//! Δd + |∇d|² d = u·∇d,               |d| = 1,
//! ```
//!
//! on ℝⁿ∖{0}. The crate is organised as
//! * [`field`]: frames, grids, sphere quadrature, finite-difference stencils;
//! * [`families`]: the explicit solution families as [`SolutionSpec`]s;
//! * [`periodic_ode`]: the periodic profile problem behind the planar
//!   radial-flow family;
//! * [`residual`]: pointwise and grid verification of the equations,
//!   scaling laws and scaling-invariant bounds;
//! * [`energy`]: energy identity, boundary flux and harmonic-map
//!   monotonicity.

#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::suspicious_arithmetic_impl,
    clippy::should_implement_trait
)]

pub mod dd;
pub mod energy;
pub mod error;
pub mod families;
pub mod field;
pub mod jet;
pub mod numerics;
pub mod periodic_ode;
pub mod residual;
pub mod scalar;

pub use error::{Error, Result};
pub use families::{SmoothField, SolutionSpec};
pub use scalar::{Scalar, MAX_DIM};
