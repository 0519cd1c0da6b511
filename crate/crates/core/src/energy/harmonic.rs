//! Harmonic-map energy quantities of a director field `d`.
//!
//! The scaled energy `E(r) = r^{2-n} ∫_{B_r} |∇d|²` of a stationary
//! harmonic map obeys
//!
//! ```text
//! d/dR E(R) = 2 R^{2-n} ∫_{∂B_R} |∂d/∂|x||²,
//! ```
//!
//! a consequence of the stationarity identity
//! `∫ (|∇d|² div Y - 2⟨∂_i d, ∂_j d⟩ ∂_j Yⁱ) = 0` with `Y = η(|x|) x`.
//! For every map, stationary or not, differentiating `E` gives
//! `E'(R) = (2-n) R^{1-n} ∫_{B_R} |∇d|² + R^{2-n} ∫_{∂B_R} |∇d|²`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FieldValues, SmoothField};
use crate::field::{composite_gauss_legendre, fd_jet, sphere_quadrature, DerivativeMode, Point, Quadrature, StencilConfig};
use crate::numerics::pairwise_sum;
use crate::scalar::{norm_sq, DoubleDouble, Grad, Scalar, MAX_DIM};

/// `g[k][j] = ∂_j d_k`.
type DirectorGradient = [[f64; MAX_DIM]; MAX_DIM];

fn director_gradient<F: SmoothField>(field: &F, x: &Point, cfg: &StencilConfig) -> Result<DirectorGradient> {
    match cfg.mode {
        DerivativeMode::AnalyticPreferred => {
            cfg.step(x)?;
            let d = field.evaluate(&Grad::seed(&x.coords, x.dim)).d;
            Ok(d.map(|c| c.g))
        }
        DerivativeMode::ForcedFd => {
            let jet = fd_jet::<DoubleDouble, MAX_DIM>(|y| field.evaluate(y).d, x, cfg, false)?;
            Ok(jet.grad)
        }
    }
}

/// Settings of the harmonic-map computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HmOptions {
    pub sphere_resolution: usize,
    /// Inner cutoff of ball integrals, relative to the outer radius.
    pub cutoff: f64,
    /// Width in `ln r` of one radial panel.
    pub panel_width: f64,
    pub nodes_per_panel: usize,
    /// Relative radius increment of the central-difference slope.
    pub slope_step: f64,
    pub stencil: StencilConfig,
}

impl Default for HmOptions {
    fn default() -> Self {
        Self {
            sphere_resolution: 16,
            cutoff: 1e-6,
            panel_width: 1.0,
            nodes_per_panel: 16,
            slope_step: 1e-3,
            stencil: StencilConfig::default(),
        }
    }
}

/// `∫_{∂B_ρ} |∇d|²` and `∫_{∂B_ρ} |∂_r d|²`.
fn shell_integrals<F: SmoothField>(field: &F, rho: f64, quad: &Quadrature, cfg: &StencilConfig) -> Result<(f64, f64)> {
    let n = field.dim();
    let terms = quad
        .nodes
        .par_iter()
        .zip(quad.weights.par_iter())
        .map(|(omega, w)| {
            let x = Point::from_array(n, omega.map(|c| c * rho));
            let g = director_gradient(field, &x, cfg)?;
            let mut full = 0.0;
            let mut radial = 0.0;
            for row in g.iter().take(n) {
                let dr: f64 = (0..n).map(|j| row[j] * omega[j]).sum();
                full += row[..n].iter().map(|v| v * v).sum::<f64>();
                radial += dr * dr;
            }
            Ok((w * full, w * radial))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let full: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let radial: Vec<f64> = terms.iter().map(|t| t.1).collect();
    let area = rho.powi(n as i32 - 1);
    Ok((area * pairwise_sum(&full), area * pairwise_sum(&radial)))
}

/// Exponent gap below which a shell profile counts as degree-0 homogeneous.
const HOMOGENEOUS_SLACK: f64 = 1e-3;

/// `∫_{B_r} |∇d|²`. Below the cutoff `ρ₀` the shell integral is
/// extrapolated as `S(ρ₀)(ρ/ρ₀)^β`, with `β` measured from `S(ρ₀)` and
/// `S(2ρ₀)` and snapped to `n - 3` for degree-0 maps.
fn ball_energy<F: SmoothField>(field: &F, r: f64, quad: &Quadrature, opts: &HmOptions) -> Result<f64> {
    let n = field.dim();
    let rho0 = opts.cutoff * r;
    let (s0, _) = shell_integrals(field, rho0, quad, &opts.stencil)?;
    let tail = if s0 == 0.0 {
        0.0
    } else {
        let (s1, _) = shell_integrals(field, 2.0 * rho0, quad, &opts.stencil)?;
        let mut beta = (s1 / s0).log2();
        let homogeneous = n as f64 - 3.0;
        if (beta - homogeneous).abs() < HOMOGENEOUS_SLACK {
            beta = homogeneous;
        }
        if !(beta > -1.0 + 1e-9) || beta < homogeneous - HOMOGENEOUS_SLACK {
            return Err(Error::DivergentEnergy(format!(
                "shell energy grows like r^{beta:.3} toward the origin in dimension {n}"
            )));
        }
        s0 * rho0 / (beta + 1.0)
    };
    let (a, b) = (rho0.ln(), r.ln());
    let panels = ((b - a) / opts.panel_width).ceil() as usize;
    let mut shells = Vec::new();
    for (s, w) in composite_gauss_legendre(panels, opts.nodes_per_panel, a, b) {
        let rho = s.exp();
        shells.push(w * rho * shell_integrals(field, rho, quad, &opts.stencil)?.0);
    }
    Ok(tail + pairwise_sum(&shells))
}

/// `E(r) = r^{2-n} ∫_{B_r} |∇d|²`.
pub fn hm_energy_density<F: SmoothField>(field: &F, r: f64, opts: &HmOptions) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let n = field.dim();
    let quad = sphere_quadrature(n, opts.sphere_resolution)?;
    Ok(r.powi(2 - n as i32) * ball_energy(field, r, &quad, opts)?)
}

/// The ladder `E(R_i)` with slope cross-checks at every radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityScan {
    pub radii: Vec<f64>,
    pub energy: Vec<f64>,
    /// Central difference of `E` at each radius.
    pub slope: Vec<f64>,
    /// `2 R^{2-n} ∫_{∂B_R} |∂_r d|²`, the slope of a stationary map.
    pub rhs: Vec<f64>,
    /// `(2-n) R^{1-n} ∫_{B_R} |∇d|² + R^{2-n} ∫_{∂B_R} |∇d|²`, the slope of
    /// any map.
    pub rhs_general: Vec<f64>,
    /// `E` nondecreasing within `1e-8` relative.
    pub nondecreasing: bool,
    /// `E` strictly increasing beyond `1e-8` relative.
    pub strictly_increasing: bool,
    /// Largest relative difference between `slope` and `rhs`.
    pub max_mismatch: f64,
    /// Largest relative difference between `slope` and `rhs_general`.
    pub max_general_mismatch: f64,
}

/// Relative difference of two slopes, zero when both are below `floor`.
fn mismatch(a: f64, b: f64, floor: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale <= floor {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

const LADDER_TOLERANCE: f64 = 1e-8;

/// `E(R)` over the radii, its central-difference slopes and both
/// right-hand sides.
pub fn hm_monotonicity_scan<F: SmoothField>(field: &F, radii: &[f64], opts: &HmOptions) -> Result<MonotonicityScan> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidParameter("radii must be positive and finite".into()));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("radii must be strictly increasing".into()));
    }
    let n = field.dim();
    let quad = sphere_quadrature(n, opts.sphere_resolution)?;
    let scaled = |r: f64| -> Result<f64> { Ok(r.powi(2 - n as i32) * ball_energy(field, r, &quad, opts)?) };
    let mut out = MonotonicityScan {
        radii: radii.to_vec(),
        energy: Vec::new(),
        slope: Vec::new(),
        rhs: Vec::new(),
        rhs_general: Vec::new(),
        nondecreasing: true,
        strictly_increasing: true,
        max_mismatch: 0.0,
        max_general_mismatch: 0.0,
    };
    for &r in radii {
        let ball = ball_energy(field, r, &quad, opts)?;
        let energy = r.powi(2 - n as i32) * ball;
        let h = opts.slope_step * r;
        let slope = (scaled(r + h)? - scaled(r - h)?) / (2.0 * h);
        let (shell, radial) = shell_integrals(field, r, &quad, &opts.stencil)?;
        let rhs = 2.0 * r.powi(2 - n as i32) * radial;
        let general = (2.0 - n as f64) * r.powi(1 - n as i32) * ball + r.powi(2 - n as i32) * shell;
        let floor = 1e-9 * (energy.abs() / r).max(f64::MIN_POSITIVE);
        out.max_mismatch = out.max_mismatch.max(mismatch(slope, rhs, floor));
        out.max_general_mismatch = out.max_general_mismatch.max(mismatch(slope, general, floor));
        out.energy.push(energy);
        out.slope.push(slope);
        out.rhs.push(rhs);
        out.rhs_general.push(general);
    }
    for w in out.energy.windows(2) {
        let tol = LADDER_TOLERANCE * w[0].abs().max(w[1].abs());
        if w[1] < w[0] - tol {
            out.nondecreasing = false;
        }
        if w[1] <= w[0] + tol {
            out.strictly_increasing = false;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpKind {
    /// `Y = η(|x|) x`.
    Radial,
    /// `Y = η(|x|) v`.
    Translation([f64; MAX_DIM]),
}

/// A test vector field supported in the open shell
/// `r₁ < |x - c| < r₂` around the centre `c`, with
/// `η(s) = exp(1 - (r₂-r₁)²/(4(s-r₁)(r₂-s)))` and `s = |x - c|`.
/// The origin must lie outside the support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpField {
    pub r_inner: f64,
    pub r_outer: f64,
    pub center: [f64; MAX_DIM],
    pub kind: BumpKind,
}

impl BumpField {
    pub fn new(r_inner: f64, r_outer: f64, center: [f64; MAX_DIM], kind: BumpKind) -> Result<Self> {
        if !(r_inner >= 0.0 && r_inner < r_outer && r_outer.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bump support must satisfy 0 <= r1 < r2, got ({r_inner}, {r_outer})"
            )));
        }
        let offset = center.iter().map(|c| c * c).sum::<f64>().sqrt();
        if offset > r_inner && offset < r_outer {
            return Err(Error::InvalidParameter("bump support must not contain the origin".into()));
        }
        Ok(Self {
            r_inner,
            r_outer,
            center,
            kind,
        })
    }

    /// `Y = η(|x|) x` on the shell `r₁ < |x| < r₂`.
    pub fn radial(r_inner: f64, r_outer: f64) -> Result<Self> {
        Self::new(r_inner, r_outer, [0.0; MAX_DIM], BumpKind::Radial)
    }

    /// `Y = η(|x - c|) v` on the shell `r₁ < |x - c| < r₂`.
    pub fn translation(r_inner: f64, r_outer: f64, center: [f64; MAX_DIM], v: [f64; MAX_DIM]) -> Result<Self> {
        Self::new(r_inner, r_outer, center, BumpKind::Translation(v))
    }

    /// `η(s)` and `η'(s)`.
    fn profile(&self, s: f64) -> (f64, f64) {
        if s <= self.r_inner || s >= self.r_outer {
            return (0.0, 0.0);
        }
        let (a, b) = (self.r_inner, self.r_outer);
        let g = (s - a) * (b - s);
        let c = 0.25 * (b - a) * (b - a);
        let eta = (1.0 - c / g).exp();
        let dg = a + b - 2.0 * s;
        (eta, eta * c * dg / (g * g))
    }

    /// `Y(x)` and `J[i][j] = ∂_j Yⁱ`.
    pub fn value_and_jacobian(&self, x: &[f64], dim: usize) -> ([f64; MAX_DIM], [[f64; MAX_DIM]; MAX_DIM]) {
        let mut z = [0.0; MAX_DIM];
        for i in 0..dim {
            z[i] = x[i] - self.center[i];
        }
        let s = z[..dim].iter().map(|c| c * c).sum::<f64>().sqrt();
        let (eta, deta) = self.profile(s);
        let mut y = [0.0; MAX_DIM];
        let mut jac = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..dim {
            match self.kind {
                BumpKind::Radial => {
                    y[i] = eta * z[i];
                    for j in 0..dim {
                        jac[i][j] = deta * z[i] * z[j] / s + if i == j { eta } else { 0.0 };
                    }
                }
                BumpKind::Translation(v) => {
                    y[i] = eta * v[i];
                    for j in 0..dim {
                        jac[i][j] = deta * v[i] * z[j] / s;
                    }
                }
            }
        }
        (y, jac)
    }
}

/// Test fields for the annulus `r₁ < |x| < r₂`: the radial bump, one
/// origin-centred translation bump per axis, and per axis a translation
/// bump on the ball of radius `(r₂-r₁)/2` centred at `((r₁+r₂)/2) e_k`.
pub fn bump_battery(dim: usize, r_inner: f64, r_outer: f64) -> Result<Vec<BumpField>> {
    let mut out = vec![BumpField::radial(r_inner, r_outer)?];
    let origin = [0.0; MAX_DIM];
    for axis in 0..dim {
        let mut v = [0.0; MAX_DIM];
        v[axis] = 1.0;
        out.push(BumpField::translation(r_inner, r_outer, origin, v)?);
        let center = v.map(|c| c * 0.5 * (r_inner + r_outer));
        out.push(BumpField::translation(0.0, 0.5 * (r_outer - r_inner), center, v)?);
    }
    Ok(out)
}

/// `|∫ (|∇d|² div Y - 2⟨∂_i d, ∂_j d⟩ ∂_j Yⁱ)|` over the support of `Y`,
/// in polar coordinates about its centre.
pub fn stationarity_identity_check<F: SmoothField>(field: &F, bump: &BumpField, opts: &HmOptions) -> Result<f64> {
    let n = field.dim();
    let quad = sphere_quadrature(n, opts.sphere_resolution)?;
    let mut shells = Vec::new();
    for (rho, w) in composite_gauss_legendre(8, opts.nodes_per_panel, bump.r_inner, bump.r_outer) {
        let terms = quad
            .nodes
            .par_iter()
            .zip(quad.weights.par_iter())
            .map(|(omega, wq)| {
                let mut c = bump.center;
                for i in 0..n {
                    c[i] += rho * omega[i];
                }
                let x = Point::from_array(n, c);
                let g = director_gradient(field, &x, &opts.stencil)?;
                let (_, jac) = bump.value_and_jacobian(&x.coords, n);
                let mut energy = 0.0;
                let mut div = 0.0;
                let mut stress = 0.0;
                for i in 0..n {
                    div += jac[i][i];
                    for j in 0..n {
                        let dot: f64 = (0..n).map(|k| g[k][i] * g[k][j]).sum();
                        stress += dot * jac[i][j];
                    }
                }
                for row in g.iter().take(n) {
                    energy += row[..n].iter().map(|v| v * v).sum::<f64>();
                }
                Ok(wq * (energy * div - 2.0 * stress))
            })
            .collect::<Result<Vec<f64>>>()?;
        shells.push(w * rho.powi(n as i32 - 1) * pairwise_sum(&terms));
    }
    Ok(pairwise_sum(&shells).abs())
}

/// `d(x) = R(α(|x|)) x/|x|` in `ℝ³`, rotating about the `x₃` axis by
/// `α(r) = rate · r`; `u ≡ 0`, `p ≡ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatedHedgehog {
    pub rate: f64,
}

impl SmoothField for RotatedHedgehog {
    fn dim(&self) -> usize {
        3
    }
    fn evaluate<S: Scalar>(&self, x: &[S; MAX_DIM]) -> FieldValues<S> {
        let r = norm_sq(x, 3).sqrt();
        let inv = r.recip();
        let angle = r * self.rate;
        let (s, c) = (angle.sin(), angle.cos());
        let (a, b) = (x[0] * inv, x[1] * inv);
        FieldValues {
            d: [c * a - s * b, s * a + c * b, x[2] * inv, S::zero()],
            ..FieldValues::zero()
        }
    }
}

/// `d(x) = (x - a)/|x - a|`; `u ≡ 0`, `p ≡ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftedHedgehog {
    pub dim: usize,
    pub center: [f64; MAX_DIM],
}

impl SmoothField for ShiftedHedgehog {
    fn dim(&self) -> usize {
        self.dim
    }
    fn evaluate<S: Scalar>(&self, x: &[S; MAX_DIM]) -> FieldValues<S> {
        let mut y = [S::zero(); MAX_DIM];
        for i in 0..self.dim {
            y[i] = x[i] - self.center[i];
        }
        let inv = norm_sq(&y, self.dim).sqrt().recip();
        FieldValues {
            d: y.map(|c| c * inv),
            ..FieldValues::zero()
        }
    }
}
