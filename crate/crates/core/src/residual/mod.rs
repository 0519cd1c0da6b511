//! Verification of candidate solutions against
//!
//! ```text
//! -Δu + u·∇u + ∇p + div(∇d ⊙ ∇d) = 0,   div u = 0,
//! Δd + |∇d|² d - u·∇d = 0,               |d| = 1,
//! ```
//!
//! together with the self-similar scaling law, the scaling-invariant
//! smallness quantities `sup |x||u|`, `sup |x||∇d|`, and the decay
//! constants `|x|^{k+1}|∇^k u|`, `|x|^{k+2}|∇^k p|`, `|x|^{k+1}|∇^{k+1}d|`.

mod local;
mod pressure;
pub(crate) mod sseq;

pub use local::{local_jet, LocalJet};
pub use pressure::{
    compatibility_certificate, path_integral, pressure_recovery, required_pressure_gradient, PressureRecovery,
    CERTIFICATE_TOLERANCE,
};
pub use sseq::{sseq_residual, SseqResidual};

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilyTag, SmoothField, SolutionSpec};
use crate::field::{annulus_grid, sphere_quadrature, DerivativeMode, GridSpec, Point, StencilConfig};
use crate::numerics::sup_rms;
use crate::scalar::MAX_DIM;

/// Default acceptance threshold on sup residuals with exact derivatives.
pub const ANALYTIC_THRESHOLD: f64 = 1e-8;
/// Default acceptance threshold on sup residuals with finite differences.
pub const FD_THRESHOLD: f64 = 1e-6;
/// Scaling factors used by [`verify`].
pub const DEFAULT_LAMBDAS: [f64; 3] = [0.5, 2.0, 10.0];

/// Threshold matching a derivative mode.
pub fn default_threshold(mode: DerivativeMode) -> f64 {
    match mode {
        DerivativeMode::AnalyticPreferred => ANALYTIC_THRESHOLD,
        DerivativeMode::ForcedFd => FD_THRESHOLD,
    }
}

/// Threshold for a family in a derivative mode. Profile-based families
/// carry a truncated Fourier series and use the finite-difference threshold
/// in both modes.
pub fn family_threshold(family: FamilyTag, mode: DerivativeMode) -> f64 {
    match family {
        FamilyTag::CaseIi | FamilyTag::CustomProfile => FD_THRESHOLD,
        _ => default_threshold(mode),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationTag {
    Momentum,
    Continuity,
    Director,
    UnitLength,
    Scaling,
    AdvectedHmSphere,
}

impl fmt::Display for EquationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Momentum => "momentum",
            Self::Continuity => "continuity",
            Self::Director => "director",
            Self::UnitLength => "unit_length",
            Self::Scaling => "scaling",
            Self::AdvectedHmSphere => "advected_hm_sphere",
        };
        f.write_str(s)
    }
}

/// Sup and RMS of one equation's pointwise residual norm over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationReport {
    pub equation: EquationTag,
    pub sup: f64,
    pub rms: f64,
    pub worst_point: Point,
    pub grid: GridSpec,
    pub mode: DerivativeMode,
}

fn report(equation: EquationTag, values: &[f64], points: &[Point], grid: &GridSpec, mode: DerivativeMode) -> EquationReport {
    let (sup, rms, at) = sup_rms(values);
    EquationReport {
        equation,
        sup,
        rms,
        worst_point: points[at],
        grid: grid.clone(),
        mode,
    }
}

fn grid_points<F: SmoothField>(field: &F, grid: &GridSpec) -> Result<Vec<Point>> {
    annulus_grid(grid, field.dim())
}

/// Pointwise residuals of the four equations at every grid point.
struct PointResiduals {
    momentum: Vec<[f64; MAX_DIM]>,
    continuity: Vec<f64>,
    director: Vec<[f64; MAX_DIM]>,
    unit: Vec<f64>,
}

fn pointwise<F: SmoothField>(field: &F, points: &[Point], cfg: &StencilConfig) -> Result<PointResiduals> {
    cfg.validate()?;
    let rows = points
        .par_iter()
        .map(|x| {
            let jet = local_jet(field, x, cfg)?;
            let mut m = [0.0; MAX_DIM];
            let mut d = [0.0; MAX_DIM];
            for i in 0..x.dim {
                m[i] = jet.momentum(i);
                d[i] = jet.director(i);
            }
            Ok((m, jet.divergence(), d, jet.unit_defect()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = PointResiduals {
        momentum: Vec::with_capacity(rows.len()),
        continuity: Vec::with_capacity(rows.len()),
        director: Vec::with_capacity(rows.len()),
        unit: Vec::with_capacity(rows.len()),
    };
    for (m, c, d, u) in rows {
        out.momentum.push(m);
        out.continuity.push(c);
        out.director.push(d);
        out.unit.push(u);
    }
    Ok(out)
}

fn norm(v: &[f64; MAX_DIM]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Momentum, continuity, director and unit-length reports in one pass.
pub fn equation_reports<F: SmoothField>(field: &F, grid: &GridSpec, cfg: &StencilConfig) -> Result<Vec<EquationReport>> {
    let points = grid_points(field, grid)?;
    let r = pointwise(field, &points, cfg)?;
    let m: Vec<f64> = r.momentum.iter().map(norm).collect();
    let c: Vec<f64> = r.continuity.iter().map(|v| v.abs()).collect();
    let d: Vec<f64> = r.director.iter().map(norm).collect();
    Ok(vec![
        report(EquationTag::Momentum, &m, &points, grid, cfg.mode),
        report(EquationTag::Continuity, &c, &points, grid, cfg.mode),
        report(EquationTag::Director, &d, &points, grid, cfg.mode),
        report(EquationTag::UnitLength, &r.unit, &points, grid, DerivativeMode::AnalyticPreferred),
    ])
}

/// `-Δu + u·∇u + ∇p + div(∇d ⊙ ∇d)` at every grid point, with its norms.
pub fn momentum_residual<F: SmoothField>(
    field: &F,
    grid: &GridSpec,
    cfg: &StencilConfig,
) -> Result<(Vec<[f64; MAX_DIM]>, EquationReport)> {
    let points = grid_points(field, grid)?;
    let r = pointwise(field, &points, cfg)?;
    let m: Vec<f64> = r.momentum.iter().map(norm).collect();
    let rep = report(EquationTag::Momentum, &m, &points, grid, cfg.mode);
    Ok((r.momentum, rep))
}

/// `div u` over the grid.
pub fn continuity_residual<F: SmoothField>(field: &F, grid: &GridSpec, cfg: &StencilConfig) -> Result<EquationReport> {
    let points = grid_points(field, grid)?;
    let r = pointwise(field, &points, cfg)?;
    let c: Vec<f64> = r.continuity.iter().map(|v| v.abs()).collect();
    Ok(report(EquationTag::Continuity, &c, &points, grid, cfg.mode))
}

/// `Δd + |∇d|² d - u·∇d` over the grid.
pub fn director_residual<F: SmoothField>(field: &F, grid: &GridSpec, cfg: &StencilConfig) -> Result<EquationReport> {
    let points = grid_points(field, grid)?;
    let r = pointwise(field, &points, cfg)?;
    let d: Vec<f64> = r.director.iter().map(norm).collect();
    Ok(report(EquationTag::Director, &d, &points, grid, cfg.mode))
}

/// `sup ||d| - 1|` over the grid.
pub fn unit_length_check<F: SmoothField>(field: &F, grid: &GridSpec) -> Result<EquationReport> {
    let points = grid_points(field, grid)?;
    let defects: Vec<f64> = points
        .par_iter()
        .map(|x| {
            let v = field.evaluate::<f64>(&x.coords);
            ((0..x.dim).map(|k| v.d[k] * v.d[k]).sum::<f64>().sqrt() - 1.0).abs()
        })
        .collect();
    Ok(report(EquationTag::UnitLength, &defects, &points, grid, DerivativeMode::AnalyticPreferred))
}

/// Largest of `|λu(λx) - u(x)|`, `|λ²p(λx) - p(x)|`, `|d(λx) - d(x)|` over
/// the grid and the given factors.
pub fn scaling_check<F: SmoothField>(field: &F, lambdas: &[f64], grid: &GridSpec) -> Result<EquationReport> {
    if lambdas.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidParameter("scaling factors must be positive".into()));
    }
    let points = grid_points(field, grid)?;
    let devs: Vec<f64> = points
        .par_iter()
        .map(|x| {
            let base = field.evaluate::<f64>(&x.coords);
            let mut worst: f64 = 0.0;
            for &l in lambdas {
                let s = field.evaluate::<f64>(&x.coords.map(|c| c * l));
                let mut du = [0.0; MAX_DIM];
                let mut dd = [0.0; MAX_DIM];
                for i in 0..x.dim {
                    du[i] = l * s.u[i] - base.u[i];
                    dd[i] = s.d[i] - base.d[i];
                }
                let dp = (l * l * s.p - base.p).abs();
                worst = worst.max(norm(&du)).max(dp).max(norm(&dd));
            }
            worst
        })
        .collect();
    Ok(report(EquationTag::Scaling, &devs, &points, grid, DerivativeMode::AnalyticPreferred))
}

/// `M_u = sup |x||u|`, `M_d = sup |x||∇d|` and their per-sphere values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallnessNorms {
    #[serde(rename = "M_u")]
    pub m_u: f64,
    #[serde(rename = "M_d")]
    pub m_d: f64,
    pub radii: Vec<f64>,
    pub per_sphere_u: Vec<f64>,
    pub per_sphere_d: Vec<f64>,
}

impl SmallnessNorms {
    /// Largest relative spread of the per-sphere values across radii.
    pub fn radial_variation(&self) -> f64 {
        fn spread(v: &[f64]) -> f64 {
            let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
            if max == 0.0 {
                0.0
            } else {
                (max - min) / max
            }
        }
        spread(&self.per_sphere_u).max(spread(&self.per_sphere_d))
    }
}

/// Per-point jets grouped by sphere (the grid is radius-major).
fn jets_by_sphere<F: SmoothField>(field: &F, grid: &GridSpec, cfg: &StencilConfig) -> Result<Vec<Vec<(Point, LocalJet)>>> {
    let points = grid_points(field, grid)?;
    let jets = points
        .par_iter()
        .map(|x| local_jet(field, x, cfg).map(|j| (*x, j)))
        .collect::<Result<Vec<_>>>()?;
    let per = grid.points_per_sphere();
    Ok(jets.chunks(per).map(|c| c.to_vec()).collect())
}

/// Scaling-invariant smallness quantities over the grid.
pub fn smallness_norms<F: SmoothField>(field: &F, grid: &GridSpec, cfg: &StencilConfig) -> Result<SmallnessNorms> {
    let spheres = jets_by_sphere(field, grid, cfg)?;
    let mut per_u = Vec::with_capacity(spheres.len());
    let mut per_d = Vec::with_capacity(spheres.len());
    for sphere in &spheres {
        let mut su: f64 = 0.0;
        let mut sd: f64 = 0.0;
        for (x, j) in sphere {
            let r = x.norm();
            su = su.max(r * j.speed_sq().sqrt());
            sd = sd.max(r * j.grad_d_sq().sqrt());
        }
        per_u.push(su);
        per_d.push(sd);
    }
    Ok(SmallnessNorms {
        m_u: per_u.iter().cloned().fold(0.0, f64::max),
        m_d: per_d.iter().cloned().fold(0.0, f64::max),
        radii: grid.radii(),
        per_sphere_u: per_u,
        per_sphere_d: per_d,
    })
}

/// Per-sphere decay constants of one derivative order `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub order: usize,
    pub radii: Vec<f64>,
    /// `sup_{|x|=r} |x|^{k+1} |∇^k u|`.
    pub u: Vec<f64>,
    /// `sup_{|x|=r} |x|^{k+2} |∇^k p|`.
    pub p: Vec<f64>,
    /// `sup_{|x|=r} |x|^{k+1} |∇^{k+1} d|`.
    pub d: Vec<f64>,
}

impl DecayRow {
    /// Largest relative spread across radii of the three constants.
    pub fn radial_variation(&self) -> f64 {
        fn spread(v: &[f64]) -> f64 {
            let max = v.iter().cloned().fold(0.0, f64::max);
            let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
            if max == 0.0 {
                0.0
            } else {
                (max - min) / max
            }
        }
        spread(&self.u).max(spread(&self.p)).max(spread(&self.d))
    }
}

/// `|∇³d|` at `x` from fourth-order differences of the Hessian of `d`.
fn third_derivative_norm<F: SmoothField>(field: &F, x: &Point, cfg: &StencilConfig) -> Result<f64> {
    let n = x.dim;
    let h = 1e-3 * x.norm();
    let mut acc = 0.0;
    for l in 0..n {
        let at = |s: f64| {
            let mut c = x.coords;
            c[l] += s * h;
            local::director_hessian(field, &Point::from_array(n, c), cfg)
        };
        let (m2, m1, p1, p2) = (at(-2.0)?, at(-1.0)?, at(1.0)?, at(2.0)?);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let t = (m2[k][i][j] - 8.0 * m1[k][i][j] + 8.0 * p1[k][i][j] - p2[k][i][j]) / (12.0 * h);
                    acc += t * t;
                }
            }
        }
    }
    Ok(acc.sqrt())
}

/// Decay constants for `k ∈ orders ⊆ {0, 1, 2}` on the spheres `|x| = r`
/// of the given radii, sampled on the angular lattice of `angular`.
pub fn decay_estimate_check<F: SmoothField>(
    field: &F,
    orders: &[usize],
    radii: &[f64],
    angular: &[usize],
    cfg: &StencilConfig,
) -> Result<Vec<DecayRow>> {
    if orders.iter().any(|&k| k > 2) {
        return Err(Error::InvalidParameter("decay orders are limited to 0, 1, 2".into()));
    }
    let n = field.dim();
    let mut rows: Vec<DecayRow> = orders
        .iter()
        .map(|&k| DecayRow {
            order: k,
            radii: radii.to_vec(),
            u: Vec::new(),
            p: Vec::new(),
            d: Vec::new(),
        })
        .collect();
    for &r in radii {
        let points = crate::field::sphere_grid(r, n, angular)?;
        let need_third = orders.contains(&2);
        let samples = points
            .par_iter()
            .map(|x| {
                let j = local_jet(field, x, cfg)?;
                let third = if need_third { third_derivative_norm(field, x, cfg)? } else { 0.0 };
                let mut out = [[0.0; 3]; 3];
                let idx = |a: usize| (0..n).map(move |b| (a, b));
                let u0 = j.speed_sq().sqrt();
                let u1 = j.grad_u_sq().sqrt();
                let u2 = (0..n)
                    .flat_map(|i| (0..n).flat_map(move |a| idx(a).map(move |(a, b)| (i, a, b))))
                    .map(|(i, a, b)| j.hess_u(i, a, b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let p0 = j.p().abs();
                let p1 = (0..n).map(|a| j.dp(a).powi(2)).sum::<f64>().sqrt();
                let p2 = (0..n).flat_map(idx).map(|(a, b)| j.hess_p(a, b).powi(2)).sum::<f64>().sqrt();
                let d1 = j.grad_d_sq().sqrt();
                let d2 = (0..n)
                    .flat_map(|k| (0..n).flat_map(move |a| idx(a).map(move |(a, b)| (k, a, b))))
                    .map(|(k, a, b)| j.hess_d(k, a, b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let rr = x.norm();
                out[0] = [rr * u0, rr * rr * p0, rr * d1];
                out[1] = [rr * rr * u1, rr.powi(3) * p1, rr * rr * d2];
                out[2] = [rr.powi(3) * u2, rr.powi(4) * p2, rr.powi(3) * third];
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        for row in rows.iter_mut() {
            let k = row.order;
            row.u.push(samples.iter().map(|s| s[k][0]).fold(0.0, f64::max));
            row.p.push(samples.iter().map(|s| s[k][1]).fold(0.0, f64::max));
            row.d.push(samples.iter().map(|s| s[k][2]).fold(0.0, f64::max));
        }
    }
    Ok(rows)
}

/// Residual of the advected harmonic-map equation on the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereResidual {
    pub equation: EquationTag,
    pub sup: f64,
    pub rms: f64,
    pub worst_point: Point,
    pub resolution: usize,
    pub mode: DerivativeMode,
}

/// Tolerance on the scaling deviation below which a field counts as
/// self-similar.
pub const SELF_SIMILAR_TOLERANCE: f64 = 1e-8;

/// `Δ_S d + |∇_S d|² d - v·∇_S d` on `S^{n-1}` with `v` the tangential
/// part of `u`. For degree-0 homogeneous `d` the ambient operators at
/// `|x| = 1` coincide with the intrinsic ones, so the residual is the
/// ambient tension minus `v·∇d` at the quadrature nodes.
pub fn sphere_director_residual<F: SmoothField>(field: &F, resolution: usize, cfg: &StencilConfig) -> Result<SphereResidual> {
    let n = field.dim();
    let probe = GridSpec::new(0.5, 2.0, 3, crate::field::default_angular(n, Some(8))?)?;
    let scaling = scaling_check(field, &[0.5, 2.0], &probe)?;
    if scaling.sup > SELF_SIMILAR_TOLERANCE {
        return Err(Error::NotSelfSimilar(scaling.sup));
    }
    let quad = sphere_quadrature(n, resolution)?;
    let points: Vec<Point> = quad.nodes.iter().map(|c| Point::from_array(n, *c)).collect();
    let values = points
        .par_iter()
        .map(|x| {
            let j = local_jet(field, x, cfg)?;
            let radial: f64 = (0..n).map(|i| j.u(i) * x.coords[i]).sum();
            let mut worst = 0.0;
            for k in 0..n {
                let mut adv = 0.0;
                for a in 0..n {
                    adv += (j.u(a) - radial * x.coords[a]) * j.dd(k, a);
                }
                let r = j.tension(k) - adv;
                worst += r * r;
            }
            Ok(f64::sqrt(worst))
        })
        .collect::<Result<Vec<f64>>>()?;
    let (sup, rms, at) = sup_rms(&values);
    Ok(SphereResidual {
        equation: EquationTag::AdvectedHmSphere,
        sup,
        rms,
        worst_point: points[at],
        resolution,
        mode: cfg.mode,
    })
}

/// Settings of [`verify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub grid: GridSpec,
    pub stencil: StencilConfig,
    pub threshold: f64,
    pub lambdas: Vec<f64>,
}

impl VerifyOptions {
    pub fn for_dim(dim: usize, mode: DerivativeMode) -> Result<Self> {
        Ok(Self {
            grid: GridSpec::default_for(dim)?,
            stencil: StencilConfig {
                mode,
                ..StencilConfig::default()
            },
            threshold: default_threshold(mode),
            lambdas: DEFAULT_LAMBDAS.to_vec(),
        })
    }

    /// Defaults for `spec` with its family threshold.
    pub fn for_spec(spec: &SolutionSpec, mode: DerivativeMode) -> Result<Self> {
        let mut opts = Self::for_dim(spec.dim(), mode)?;
        opts.threshold = family_threshold(spec.family(), mode);
        Ok(opts)
    }
}

/// Full verification record of one spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualReport {
    pub spec: serde_json::Value,
    pub reports: Vec<EquationReport>,
    pub smallness: SmallnessNorms,
    pub decay: Vec<DecayRow>,
    pub threshold: f64,
    pub passed: bool,
}

impl ResidualReport {
    pub fn get(&self, equation: EquationTag) -> Option<&EquationReport> {
        self.reports.iter().find(|r| r.equation == equation)
    }

    /// Largest sup residual over the reported equations.
    pub fn worst_sup(&self) -> f64 {
        self.reports.iter().map(|r| r.sup).fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
    }
}

/// Momentum, continuity, director, unit length and scaling over the grid,
/// plus smallness norms and decay constants. `passed` holds when every sup
/// residual is below the threshold.
pub fn verify(spec: &SolutionSpec, opts: &VerifyOptions) -> Result<ResidualReport> {
    let mut reports = equation_reports(spec, &opts.grid, &opts.stencil)?;
    reports.push(scaling_check(spec, &opts.lambdas, &opts.grid)?);
    let smallness = smallness_norms(spec, &opts.grid, &opts.stencil)?;
    let decay = decay_estimate_check(spec, &[0, 1, 2], &opts.grid.radii(), &opts.grid.angular, &opts.stencil)?;
    let passed = reports.iter().all(|r| r.sup < opts.threshold);
    Ok(ResidualReport {
        spec: spec.to_json(),
        reports,
        smallness,
        decay,
        threshold: opts.threshold,
        passed,
    })
}
