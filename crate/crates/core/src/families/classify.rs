//! Recognising a sampled planar self-similar profile as one of the
//! families.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex64, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{FamilyTag, SmoothField, SolutionSpec};
use crate::residual::sseq::{mean_slope, sseq_residual};
use crate::scalar::MAX_DIM;

/// Relative tolerance for "constant" and for the reduced equations.
const CONSTANCY: f64 = 1e-6;
/// Harmonics below this fraction of the largest one are treated as absent.
const SPECTRAL_FLOOR: f64 = 1e-8;

/// `f, v, q, ξ` at `θ_i = 2πi/N` on the unit circle, where
/// `u = f e_r + v e_θ`, `p = q` and `d = (cos(θ+ξ), sin(θ+ξ))`.
/// `ξ` is continuous along the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSamples {
    pub f: Vec<f64>,
    pub v: Vec<f64>,
    pub q: Vec<f64>,
    pub xi: Vec<f64>,
}

/// Sample a planar spec on the unit circle.
pub fn sample_profiles(spec: &SolutionSpec, count: usize) -> Result<ProfileSamples> {
    if spec.dim() != 2 {
        return Err(Error::UnsupportedDimension(spec.dim()));
    }
    if count < 8 {
        return Err(Error::InvalidParameter("at least 8 samples are needed".into()));
    }
    let mut out = ProfileSamples {
        f: Vec::with_capacity(count),
        v: Vec::with_capacity(count),
        q: Vec::with_capacity(count),
        xi: Vec::with_capacity(count),
    };
    let mut previous: Option<f64> = None;
    for i in 0..count {
        let theta = 2.0 * PI * i as f64 / count as f64;
        let (s, c) = theta.sin_cos();
        let mut x = [0.0; MAX_DIM];
        x[0] = c;
        x[1] = s;
        let fv = spec.evaluate::<f64>(&x);
        out.f.push(fv.u[0] * c + fv.u[1] * s);
        out.v.push(-fv.u[0] * s + fv.u[1] * c);
        out.q.push(fv.p);
        let raw = fv.d[1].atan2(fv.d[0]) - theta;
        let xi = match previous {
            None => raw - 2.0 * PI * (raw / (2.0 * PI)).round(),
            Some(p) => p + {
                let d = raw - p;
                d - 2.0 * PI * (d / (2.0 * PI)).round()
            },
        };
        previous = Some(xi);
        out.xi.push(xi);
    }
    Ok(out)
}

/// The family a sampled profile belongs to, with fitted parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Classification {
    CaseI {
        c: f64,
        m: i64,
        theta0: f64,
    },
    CaseIi {
        #[serde(rename = "Phi")]
        phi: f64,
        k: u32,
        m: i64,
        theta1: f64,
        theta2: f64,
    },
    CaseIii {
        #[serde(rename = "Psi")]
        psi: f64,
        mu: f64,
        theta3: f64,
    },
}

impl Classification {
    pub fn family(&self) -> FamilyTag {
        match self {
            Self::CaseI { .. } => FamilyTag::CaseI,
            Self::CaseIi { .. } => FamilyTag::CaseIi,
            Self::CaseIii { .. } => FamilyTag::CaseIii,
        }
    }
}

fn sup_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn mean(x: &[f64]) -> f64 {
    crate::numerics::pairwise_sum(x) / x.len() as f64
}

fn is_constant(x: &[f64]) -> bool {
    let m = mean(x);
    let dev = x.iter().fold(0.0_f64, |a, v| a.max((v - m).abs()));
    dev <= CONSTANCY * sup_abs(x)
}

fn wrap_angle(a: f64) -> f64 {
    a - 2.0 * PI * (a / (2.0 * PI)).round()
}

/// Complex Fourier coefficients `F_j = (1/N) Σ f_i e^{-ijθ_i}`.
fn spectrum(f: &[f64]) -> Vec<Complex64> {
    let n = f.len();
    let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.into_iter().map(|z| z / n as f64).collect()
}

/// Minimal-period index `k` and the phase `θ₁` placing the maximum of the
/// profile `f(· + θ₁)` at `θ = 0`.
fn period_and_phase(f: &[f64]) -> Result<(u32, f64)> {
    let spec = spectrum(f);
    let half = f.len() / 2;
    let mags: Vec<f64> = (1..half).map(|j| spec[j].norm()).collect();
    let largest = mags.iter().cloned().fold(0.0, f64::max);
    let present: Vec<usize> = (1..half).filter(|&j| mags[j - 1] > SPECTRAL_FLOOR * largest).collect();
    let Some(&k) = present.first() else {
        return Err(Error::Unclassifiable("nonconstant profile without harmonics".into()));
    };
    let stride = present.iter().fold(0, |g, &j| gcd(g, j));
    if stride != k {
        return Err(Error::Unclassifiable(format!(
            "harmonics {present:?} do not share the lowest index {k}"
        )));
    }
    let kf = k as f64;
    let candidate = spec[k].arg() / kf;
    let value_at = |theta1: f64| -> f64 {
        let mut acc = spec[0].re;
        for &j in &present {
            acc += 2.0 * (spec[j] * Complex64::from_polar(1.0, -(j as f64) * theta1)).re;
        }
        acc
    };
    let shifted = candidate + PI / kf;
    let theta1 = if value_at(candidate) >= value_at(shifted) { candidate } else { shifted };
    let period = 2.0 * PI / kf;
    Ok((k as u32, theta1.rem_euclid(period)))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Decide which family the sampled profile belongs to.
///
/// The samples must first satisfy the reduced equations. Then `v ≡ 0`
/// gives `case_i` for constant `f` and `case_ii` otherwise; `v ≢ 0`
/// gives `case_iii` provided `f`, `v` are constant and `ξ' + 1 ≡ 0`.
/// Winding is the rounded mean slope of `ξ`. For `case_ii` the phase `θ₁`
/// is normalised to `[0, 2π/k)` with the profile maximum at `θ + θ₁ = 0`.
pub fn classify_profile(s: &ProfileSamples) -> Result<Classification> {
    let res = sseq_residual(s)?;
    let scale = 1.0
        + sup_abs(&s.f).powi(2)
        + sup_abs(&s.v).powi(2)
        + sup_abs(&s.q)
        + (1.0 + res.winding.unsigned_abs() as f64).powi(2);
    if res.winding_defect > 1e-3 {
        return Err(Error::Unclassifiable(format!(
            "director winding {} is not an integer",
            res.winding as f64 + res.winding_defect
        )));
    }
    if res.sup() > CONSTANCY * scale {
        return Err(Error::Unclassifiable(format!(
            "samples violate the reduced equations (residual {:.3e})",
            res.sup()
        )));
    }
    let m = res.winding;
    let phase = wrap_angle(s.xi[0]);
    let speed_scale = sup_abs(&s.f).max(1.0);
    if sup_abs(&s.v) <= CONSTANCY * 1e-2 * speed_scale {
        if is_constant(&s.f) {
            return Ok(Classification::CaseI {
                c: mean(&s.f),
                m,
                theta0: phase,
            });
        }
        let (k, theta1) = period_and_phase(&s.f)?;
        return Ok(Classification::CaseIi {
            phi: 2.0 * PI * mean(&s.f),
            k,
            m,
            theta1,
            theta2: phase,
        });
    }
    let slope = mean_slope(&s.xi);
    if is_constant(&s.f) && is_constant(&s.v) && (slope + 1.0).abs() < 1e-6 && m == -1 {
        return Ok(Classification::CaseIii {
            psi: 2.0 * PI * mean(&s.f),
            mu: mean(&s.v),
            theta3: phase,
        });
    }
    Err(Error::Unclassifiable(
        "swirling profile must have constant f, v and ξ' + 1 = 0".into(),
    ))
}
