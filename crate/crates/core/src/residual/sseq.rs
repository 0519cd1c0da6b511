//! The self-similar reduction of the planar system on the unit circle.
//!
//! For `u = f(θ)/r e_r + v(θ)/r e_θ`, `p = q(θ)/r²` and
//! `d = (cos(θ + ξ), sin(θ + ξ))` the system reduces to
//!
//! ```text
//! -f'' + v f' - f² - v² - 2q = (1 + ξ')²
//! q' - 2f' - v'' + v v' = -((1 + ξ')²)'
//! v' = 0
//! ξ'' = v (1 + ξ')
//! ```
//!
//! the first two being the radial and angular momentum equations, the
//! third continuity and the last the director equation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::ProfileSamples;
use crate::numerics::spectral_derivatives;

/// Sup norms of the four reduced equations, in the order listed above,
/// and the winding of `ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SseqResidual {
    pub radial: f64,
    pub angular: f64,
    pub continuity: f64,
    pub director: f64,
    pub winding: i64,
    /// Distance of the measured mean slope of `ξ` from the integer
    /// `winding`.
    pub winding_defect: f64,
}

impl SseqResidual {
    pub fn sup(&self) -> f64 {
        self.radial.max(self.angular).max(self.continuity).max(self.director)
    }
}

fn wrap(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    a - two_pi * (a / two_pi).round()
}

/// Mean slope of `ξ` from its wrapped increments, excluding the closing
/// step across `θ = 2π`.
pub(crate) fn mean_slope(xi: &[f64]) -> f64 {
    let n = xi.len();
    let total: f64 = xi.windows(2).map(|w| wrap(w[1] - w[0])).sum();
    total / (2.0 * std::f64::consts::PI * (n - 1) as f64 / n as f64)
}

pub fn sseq_residual(s: &ProfileSamples) -> Result<SseqResidual> {
    let n = s.f.len();
    if n < 8 || s.v.len() != n || s.q.len() != n || s.xi.len() != n {
        return Err(Error::InvalidParameter(
            "profile samples need at least 8 points and equal lengths".into(),
        ));
    }
    let slope = mean_slope(&s.xi);
    let winding = slope.round() as i64;
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let base = s.xi[0];
    let mut periodic = Vec::with_capacity(n);
    let mut prev = base;
    let mut unwrapped = base;
    for (i, &x) in s.xi.iter().enumerate() {
        if i > 0 {
            unwrapped += wrap(x - prev);
            prev = x;
        }
        periodic.push(unwrapped - winding as f64 * i as f64 * step);
    }
    let (f1, f2) = spectral_derivatives(&s.f);
    let (v1, v2) = spectral_derivatives(&s.v);
    let (q1, _) = spectral_derivatives(&s.q);
    let (x1, x2) = spectral_derivatives(&periodic);
    let w: Vec<f64> = x1.iter().map(|d| (1.0 + winding as f64 + d).powi(2)).collect();
    let (w1, _) = spectral_derivatives(&w);
    let mut out = SseqResidual {
        radial: 0.0,
        angular: 0.0,
        continuity: 0.0,
        director: 0.0,
        winding,
        winding_defect: (slope - winding as f64).abs(),
    };
    for i in 0..n {
        let (f, v, q) = (s.f[i], s.v[i], s.q[i]);
        let radial = -f2[i] + v * f1[i] - f * f - v * v - 2.0 * q - w[i];
        let angular = q1[i] - 2.0 * f1[i] - v2[i] + v * v1[i] + w1[i];
        let director = x2[i] - v * (1.0 + winding as f64 + x1[i]);
        out.radial = out.radial.max(radial.abs());
        out.angular = out.angular.max(angular.abs());
        out.continuity = out.continuity.max(v1[i].abs());
        out.director = out.director.max(director.abs());
    }
    Ok(out)
}
