//! Pressure recovered from `∇p = Δu - u·∇u - div(∇d ⊙ ∇d)` by line
//! integration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::SmoothField;
use crate::field::{composite_gauss_legendre, fd_jacobian, Point, StencilConfig};
use crate::numerics::pairwise_sum;
use crate::residual::local::local_jet;
use crate::scalar::MAX_DIM;

/// Largest accepted antisymmetric part of the Jacobian of the recovered
/// pressure gradient.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-5;

const NODES_PER_PANEL: usize = 16;
const RADIAL_PANEL: f64 = 0.25;
const ANGULAR_PANEL: f64 = 0.1;

/// Recovered pressure on a point set, normalised by `p(base) = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PressureRecovery {
    pub base_point: Point,
    pub values: Vec<f64>,
    /// `sup_x max_{i<j} |∂_j g_i - ∂_i g_j| / 2` for `g` the demanded
    /// pressure gradient.
    pub certificate: f64,
    pub certificate_point: Point,
}

/// Demanded pressure gradient `Δu - u·∇u - div(∇d ⊙ ∇d)` at `x`.
pub fn required_pressure_gradient<F: SmoothField>(
    field: &F,
    x: &Point,
    cfg: &StencilConfig,
) -> Result<[f64; MAX_DIM]> {
    let jet = local_jet(field, x, cfg)?;
    let mut g = [0.0; MAX_DIM];
    for (i, gi) in g.iter_mut().enumerate().take(x.dim) {
        *gi = jet.required_pressure_gradient(i);
    }
    Ok(g)
}

fn dot(a: &[f64; MAX_DIM], b: &[f64; MAX_DIM]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `∫ g·dγ` along the radial segment from `base` to `|target| base/|base|`
/// followed by the great-circle arc to `target`.
pub fn path_integral<F: SmoothField>(field: &F, base: &Point, target: &Point, cfg: &StencilConfig) -> Result<f64> {
    if base.dim != target.dim {
        return Err(Error::InvalidParameter("base point and target differ in dimension".into()));
    }
    let dim = base.dim;
    let (rb, rt) = (base.norm(), target.norm());
    let b = base.direction();
    let t = target.direction();
    let mut terms = Vec::new();

    let log_ratio = (rt / rb).ln().abs();
    if log_ratio > 0.0 {
        let panels = (log_ratio / RADIAL_PANEL).ceil() as usize;
        for (s, w) in composite_gauss_legendre(panels, NODES_PER_PANEL, rb, rt) {
            let x = Point::from_array(dim, b.map(|c| c * s));
            let g = required_pressure_gradient(field, &x, cfg)?;
            terms.push(w * dot(&g, &b));
        }
    }

    let cos_w = dot(&b, &t).clamp(-1.0, 1.0);
    let mut perp = [0.0; MAX_DIM];
    for i in 0..dim {
        perp[i] = t[i] - cos_w * b[i];
    }
    let sin_w = perp.iter().map(|c| c * c).sum::<f64>().sqrt();
    let omega = sin_w.atan2(cos_w);
    if omega > 0.0 {
        let e = if sin_w < 1e-12 {
            any_perpendicular(&b, dim)
        } else {
            perp.map(|c| c / sin_w)
        };
        let panels = (omega / ANGULAR_PANEL).ceil() as usize;
        for (s, w) in composite_gauss_legendre(panels, NODES_PER_PANEL, 0.0, omega) {
            let (sn, cs) = s.sin_cos();
            let mut x = [0.0; MAX_DIM];
            let mut tangent = [0.0; MAX_DIM];
            for i in 0..dim {
                x[i] = rt * (cs * b[i] + sn * e[i]);
                tangent[i] = rt * (-sn * b[i] + cs * e[i]);
            }
            let g = required_pressure_gradient(field, &Point::from_array(dim, x), cfg)?;
            terms.push(w * dot(&g, &tangent));
        }
    }
    Ok(pairwise_sum(&terms))
}

/// A unit vector orthogonal to `b`; antipodal directions are joined by
/// the half great circle through it.
fn any_perpendicular(b: &[f64; MAX_DIM], dim: usize) -> [f64; MAX_DIM] {
    let axis = (0..dim).min_by(|&i, &j| b[i].abs().total_cmp(&b[j].abs())).unwrap_or(0);
    let mut e = [0.0; MAX_DIM];
    e[axis] = 1.0;
    let c = b[axis];
    for i in 0..dim {
        e[i] -= c * b[i];
    }
    let n = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    e.map(|v| v / n)
}

/// Largest antisymmetric part of the Jacobian of the demanded pressure
/// gradient over `points`, with the point where it occurs.
pub fn compatibility_certificate<F: SmoothField>(
    field: &F,
    points: &[Point],
    cfg: &StencilConfig,
) -> Result<(f64, Point)> {
    let outer = StencilConfig::default();
    let defects: Vec<f64> = points
        .par_iter()
        .map(|x| {
            let jac = fd_jacobian::<f64>(
                |y| {
                    let p = Point::from_array(x.dim, *y);
                    required_pressure_gradient(field, &p, cfg).unwrap_or([f64::NAN; MAX_DIM])
                },
                x,
                &outer,
            )?;
            let mut worst: f64 = 0.0;
            for i in 0..x.dim {
                for j in (i + 1)..x.dim {
                    let a = 0.5 * (jac[i][j] - jac[j][i]).abs();
                    worst = if a.is_nan() { f64::NAN } else { worst.max(a) };
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let (sup, _, at) = crate::numerics::sup_rms(&defects);
    Ok((sup, points[at]))
}

/// Pressure at every point of `points`, obtained by integrating the
/// demanded gradient from `base` (radial leg, then great-circle leg), with
/// its curl-compatibility certificate. Fails with `IncompatibleField` when
/// the certificate exceeds [`CERTIFICATE_TOLERANCE`].
pub fn pressure_recovery<F: SmoothField>(
    field: &F,
    base: &Point,
    points: &[Point],
    cfg: &StencilConfig,
) -> Result<PressureRecovery> {
    if points.is_empty() {
        return Err(Error::InvalidGrid("no points to recover the pressure on".into()));
    }
    if !points.iter().any(|p| p == base) {
        return Err(Error::InvalidParameter("base point must lie on the grid".into()));
    }
    let (certificate, certificate_point) = compatibility_certificate(field, points, cfg)?;
    if !(certificate < CERTIFICATE_TOLERANCE) {
        return Err(Error::IncompatibleField(certificate));
    }
    let values = points
        .par_iter()
        .map(|x| path_integral(field, base, x, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(PressureRecovery {
        base_point: *base,
        values,
        certificate,
        certificate_point,
    })
}
