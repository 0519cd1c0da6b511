//! Energy bookkeeping for the steady system.
//!
//! With the head pressure `H = |∇d|²/2 + |u|²/2 + p` and the boundary flux
//!
//! ```text
//! h(τ) = ∫_{∂B_τ} ( ⟨u, ∂_r u⟩ - H ⟨u, x/|x|⟩ ) dσ,
//! ```
//!
//! every smooth solution on the annulus `A_{r,R}` satisfies
//!
//! ```text
//! ∫_{A_{r,R}} ( |∇u|² + |Δd + |∇d|² d|² ) = h(R) - h(r),
//! ```
//!
//! which integrates the pointwise identity
//! `|∇u|² + |Δd + |∇d|²d|² = Δ(|u|²/2) - u·∇H`.

mod harmonic;

pub use harmonic::{
    bump_battery, hm_energy_density, hm_monotonicity_scan, stationarity_identity_check, BumpField, BumpKind,
    HmOptions, MonotonicityScan, RotatedHedgehog, ShiftedHedgehog,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::SmoothField;
use crate::field::{composite_gauss_legendre, default_angular, sphere_quadrature, GridSpec, Point, Quadrature, StencilConfig};
use crate::numerics::pairwise_sum;
use crate::residual::{equation_reports, local_jet, EquationTag, LocalJet};

/// Largest residual sup for which [`energy_balance`] accepts a field.
pub const SOLUTION_TOLERANCE: f64 = 1e-4;
/// Relative tolerance on the identity gap.
pub const IDENTITY_TOLERANCE: f64 = 1e-4;
/// Absolute floor of the identity-gap tolerance.
pub const IDENTITY_FLOOR: f64 = 1e-8;

/// Quadrature and derivative settings of the energy computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyOptions {
    /// Gauss nodes per polar angle of the sphere rule.
    pub sphere_resolution: usize,
    /// Width in `ln r` of one radial panel.
    pub panel_width: f64,
    pub nodes_per_panel: usize,
    pub stencil: StencilConfig,
    pub solution_tolerance: f64,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        Self {
            sphere_resolution: 24,
            panel_width: 0.25,
            nodes_per_panel: 16,
            stencil: StencilConfig::default(),
            solution_tolerance: SOLUTION_TOLERANCE,
        }
    }
}

impl EnergyOptions {
    /// Same options with the sphere rule and radial panels refined twofold.
    pub fn refined(&self) -> Self {
        Self {
            sphere_resolution: 2 * self.sphere_resolution,
            panel_width: 0.5 * self.panel_width,
            ..*self
        }
    }
}

fn head_pressure_of(jet: &LocalJet) -> f64 {
    0.5 * jet.grad_d_sq() + 0.5 * jet.speed_sq() + jet.p()
}

/// `H(x) = |∇d|²/2 + |u|²/2 + p`.
pub fn head_pressure<F: SmoothField>(field: &F, x: &Point, cfg: &StencilConfig) -> Result<f64> {
    Ok(head_pressure_of(&local_jet(field, x, cfg)?))
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("radius must be positive and finite, got {r}")))
    }
}

/// Sum of `w_i g(τ ω_i)` over the sphere rule, in parallel.
fn sphere_sum<F, G>(field: &F, tau: f64, quad: &Quadrature, cfg: &StencilConfig, g: G) -> Result<f64>
where
    F: SmoothField,
    G: Fn(&LocalJet, &[f64]) -> f64 + Sync,
{
    let n = field.dim();
    let terms = quad
        .nodes
        .par_iter()
        .zip(quad.weights.par_iter())
        .map(|(omega, w)| {
            let x = Point::from_array(n, omega.map(|c| c * tau));
            let jet = local_jet(field, &x, cfg)?;
            Ok(w * g(&jet, &omega[..n]))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&terms))
}

/// `h(τ)` by the product rule on `∂B_τ`.
pub fn boundary_flux_h<F: SmoothField>(field: &F, tau: f64, quad: &Quadrature, cfg: &StencilConfig) -> Result<f64> {
    check_radius(tau)?;
    let n = field.dim();
    let integral = sphere_sum(field, tau, quad, cfg, |jet, omega| {
        let mut along = 0.0;
        let mut normal = 0.0;
        for i in 0..n {
            let radial: f64 = (0..n).map(|j| jet.du(i, j) * omega[j]).sum();
            along += jet.u(i) * radial;
            normal += jet.u(i) * omega[i];
        }
        along - head_pressure_of(jet) * normal
    })?;
    Ok(integral * tau.powi(n as i32 - 1))
}

/// `∫_{A_{r,R}} (|∇u|² + |Δd + |∇d|² d|²)` with composite Gauss–Legendre
/// in `ln |x|` times the sphere rule.
pub fn dissipation<F: SmoothField>(field: &F, r: f64, big_r: f64, opts: &EnergyOptions) -> Result<f64> {
    check_radius(r)?;
    check_radius(big_r)?;
    if r >= big_r {
        return Err(Error::InvalidParameter(format!("need r < R, got r = {r}, R = {big_r}")));
    }
    let n = field.dim();
    let quad = sphere_quadrature(n, opts.sphere_resolution)?;
    let (a, b) = (r.ln(), big_r.ln());
    let panels = ((b - a) / opts.panel_width).ceil() as usize;
    let mut shells = Vec::new();
    for (s, w) in composite_gauss_legendre(panels, opts.nodes_per_panel, a, b) {
        let rho = s.exp();
        let integral = sphere_sum(field, rho, &quad, &opts.stencil, |jet, _| {
            let tension: f64 = (0..n).map(|k| jet.tension(k).powi(2)).sum();
            jet.grad_u_sq() + tension
        })?;
        shells.push(w * integral * rho.powi(n as i32));
    }
    Ok(pairwise_sum(&shells))
}

/// `|∇u|² + |Δd + |∇d|²d|² - Δ(|u|²/2) + u·∇H` at `x`.
pub fn pointwise_energy_identity_residual<F: SmoothField>(field: &F, x: &Point, cfg: &StencilConfig) -> Result<f64> {
    let j = local_jet(field, x, cfg)?;
    let n = x.dim;
    let tension: f64 = (0..n).map(|k| j.tension(k).powi(2)).sum();
    let mut half_lap_speed = 0.0;
    for i in 0..n {
        half_lap_speed += j.u(i) * j.lap_u(i);
    }
    half_lap_speed += j.grad_u_sq();
    let mut transport = 0.0;
    for a in 0..n {
        let mut dh = j.dp(a);
        for i in 0..n {
            dh += j.u(i) * j.du(i, a);
        }
        for k in 0..n {
            for l in 0..n {
                dh += j.dd(k, l) * j.hess_d(k, l, a);
            }
        }
        transport += j.u(a) * dh;
    }
    Ok(j.grad_u_sq() + tension - half_lap_speed + transport)
}

/// The flux ladder and the annulus balance over a list of radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub radii: Vec<f64>,
    pub h: Vec<f64>,
    /// Dissipation over the annulus between the first and last radius.
    pub dissipation: f64,
    /// `h(R) - h(r)` for the first and last radius.
    pub h_gap: f64,
    /// `dissipation - h_gap`.
    pub identity_gap: f64,
    /// Dissipation of each consecutive annulus.
    pub interval_dissipation: Vec<f64>,
    /// `H` on the unit sphere at the nodes of a coarse lattice.
    pub head_pressure_samples: Vec<f64>,
    pub h_nondecreasing: bool,
    pub passed: bool,
}

impl EnergyReport {
    /// `|identity_gap| / |dissipation|`, or the absolute gap when the
    /// dissipation vanishes.
    pub fn relative_gap(&self) -> f64 {
        if self.dissipation.abs() > IDENTITY_FLOOR {
            self.identity_gap.abs() / self.dissipation.abs()
        } else {
            self.identity_gap.abs()
        }
    }
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.len() < 2 {
        return Err(Error::InvalidParameter("at least two radii are needed".into()));
    }
    for r in radii {
        check_radius(*r)?;
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("radii must be strictly increasing".into()));
    }
    Ok(())
}

/// Largest momentum, continuity or director residual of `field` on the
/// annulus spanned by `radii`.
pub fn solution_residual<F: SmoothField>(field: &F, radii: &[f64], cfg: &StencilConfig) -> Result<f64> {
    let n = field.dim();
    let grid = GridSpec::new(radii[0], radii[radii.len() - 1], radii.len().max(3), default_angular(n, None)?)?;
    let reports = equation_reports(field, &grid, cfg)?;
    Ok(reports
        .iter()
        .filter(|r| matches!(r.equation, EquationTag::Momentum | EquationTag::Continuity | EquationTag::Director))
        .map(|r| r.sup)
        .fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) }))
}

/// Flux ladder, dissipation and identity gap. The field must first pass
/// the residual check with tolerance `opts.solution_tolerance`.
pub fn energy_balance<F: SmoothField>(field: &F, radii: &[f64], opts: &EnergyOptions) -> Result<EnergyReport> {
    check_radii(radii)?;
    let residual = solution_residual(field, radii, &opts.stencil)?;
    if !(residual <= opts.solution_tolerance) {
        return Err(Error::NotASolution(residual));
    }
    let n = field.dim();
    let quad = sphere_quadrature(n, opts.sphere_resolution)?;
    let h = radii
        .iter()
        .map(|&t| boundary_flux_h(field, t, &quad, &opts.stencil))
        .collect::<Result<Vec<f64>>>()?;
    let interval_dissipation = radii
        .windows(2)
        .map(|w| dissipation(field, w[0], w[1], opts))
        .collect::<Result<Vec<f64>>>()?;
    let total = pairwise_sum(&interval_dissipation);
    let h_gap = h[h.len() - 1] - h[0];
    let identity_gap = total - h_gap;
    let scale = h.iter().fold(total.abs(), |m, v| m.max(v.abs()));
    let h_nondecreasing = h.windows(2).all(|w| w[1] >= w[0] - IDENTITY_FLOOR.max(1e-10 * scale));
    let head_pressure_samples = crate::field::sphere_directions(n, &default_angular(n, Some(4))?)?
        .into_iter()
        .map(|c| head_pressure(field, &Point::from_array(n, c), &opts.stencil))
        .collect::<Result<Vec<f64>>>()?;
    let passed = identity_gap.abs() <= (IDENTITY_TOLERANCE * total.abs()).max(IDENTITY_FLOOR) && h_nondecreasing;
    Ok(EnergyReport {
        radii: radii.to_vec(),
        h,
        dissipation: total,
        h_gap,
        identity_gap,
        interval_dissipation,
        head_pressure_samples,
        h_nondecreasing,
        passed,
    })
}

#[cfg(test)]
mod tests;
