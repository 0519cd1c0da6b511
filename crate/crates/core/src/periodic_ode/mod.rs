//! The periodic profile problem `f'' + f² + 4f = λ` with prescribed minimal
//! period `2π/k` and integral `∫₀^{2π} f = Φ`.
//!
//! The solver works with `g = f + 2` and `E = λ + 4`, for which the
//! equation reads `g'' = E - g²` (see [`orbit`]). A closed orbit started at
//! its turning point `g0` has a period `T(E, g0)` and a mean `M(E, g0)`;
//! the profile is the orbit with `T = 2π/k` and `M = 2 + Φ/(2π)`.
//!
//! The rescaling `g_s(θ) = s² g(sθ)` maps solutions to solutions with
//! `E ↦ s⁴E`, so `⟨g⟩·T²` depends on the relative amplitude alone. It
//! equals `2π²` in the small-amplitude limit and decreases without bound
//! as the orbit approaches the saddle. A nontrivial profile therefore
//! exists exactly when `⟨g⟩ < k²/2`, which is `4 + Φ/π < k²`; on the
//! boundary only the constant solution remains.

pub mod orbit;
mod profile;
mod scan;
mod solve;

pub use orbit::{integrate_orbit, Orbit, OrbitSample};
pub use profile::{compute_c1, C1Report, ProfileSolution, SolveMethod, RESIDUAL_TOLERANCE, TAIL_TOLERANCE};
pub use scan::{scan_existence, write_scan_csv, ScanRow, SCAN_CSV_HEADER};
pub use solve::{solve_profile, solve_profile_bisection};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical parameters of the profile solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    /// Fixed integration step.
    pub rk_step: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Highest Fourier harmonic kept in the profile.
    pub fourier_n: usize,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            rk_step: 1e-4 * 2.0 * std::f64::consts::PI,
            newton_tol: 1e-12,
            max_newton: 50,
            fourier_n: 64,
        }
    }
}

impl ShootingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rk_step > 0.0 && self.newton_tol > 0.0 && self.max_newton > 0 && self.fourier_n > 0) {
            return Err(Error::InvalidParameter(format!(
                "shooting configuration must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Left-hand side `4 + Φ/π` of the existence condition.
pub fn existence_lhs(phi: f64) -> f64 {
    4.0 + phi / std::f64::consts::PI
}

/// `4 + Φ/π ≤ k²`, with ties (up to a few ulps of the operands) counted as
/// satisfied.
pub fn existence_condition(phi: f64, k: u32) -> bool {
    existence_margin(phi, k) >= -boundary_tolerance(phi, k)
}

/// `k² - 4 - Φ/π`.
pub(crate) fn existence_margin(phi: f64, k: u32) -> f64 {
    let k_sq = (k as f64) * (k as f64);
    k_sq - existence_lhs(phi)
}

pub(crate) fn boundary_tolerance(phi: f64, k: u32) -> f64 {
    let k_sq = (k as f64) * (k as f64);
    8.0 * f64::EPSILON * (k_sq + 4.0 + (phi / std::f64::consts::PI).abs())
}
