//! Landau solutions `u_a = curl(ψ_a e_θ)`, `ψ_a = 2 sin φ/(a - cos φ)`,
//! with `d ≡ e₃` and a numerically recovered pressure.
//!
//! With `t = cos φ = x₃/r` the velocity is
//! `u = (2/r)[(a²-1)/(a-t)² - 1] e_r - 2 sin φ/(r(a-t)) e_φ`, and
//! `sin φ e_φ = (t x₁/r, t x₂/r, t² - 1)` keeps it free of `1/sin φ`.
//!
//! The pressure is homogeneous of degree `-2` and axisymmetric, so
//! `p = P(t)/r²`. `P` is recovered by line integration of the demanded
//! pressure gradient on the unit sphere; `Q(t) = (a-t)² P(t)` is then
//! stored as a Chebyshev series, which is far better conditioned than `P`
//! when `a` is close to 1.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::families::{FieldValues, SmoothField};
use crate::field::{annulus_grid, GridSpec, Point, StencilConfig};
use crate::residual::{compatibility_certificate, path_integral, CERTIFICATE_TOLERANCE};
use crate::scalar::{norm_sq, Scalar, MAX_DIM};

/// Chebyshev nodes used to tabulate `Q(t)`.
pub const LANDAU_CHEBYSHEV_NODES: usize = 128;
const CHOP_TOLERANCE: f64 = 1e-15;

/// The Landau parameter `a ∈ (1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LandauA {
    Finite(f64),
    Infinite,
}

impl LandauA {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Finite(a) if !(a > 1.0 && a.is_finite()) => Err(Error::InvalidParameter(format!(
                "Landau parameter must satisfy a > 1, got {a}"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for LandauA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(a) => write!(f, "{a}"),
            Self::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for LandauA {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let a = match s.trim() {
            "inf" | "infinity" | "Infinity" | "∞" => Self::Infinite,
            t => Self::Finite(
                t.parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("cannot parse Landau parameter '{s}'")))?,
            ),
        };
        if let Self::Finite(v) = a {
            if v.is_infinite() && v > 0.0 {
                return Ok(Self::Infinite);
            }
        }
        a.validate()?;
        Ok(a)
    }
}

impl Serialize for LandauA {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(a) => s.serialize_f64(*a),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for LandauA {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(a) => {
                let v = LandauA::Finite(a);
                v.validate().map_err(serde::de::Error::custom)?;
                Ok(v)
            }
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandauParams {
    pub a: LandauA,
}

/// Velocity of the Landau solution with pressure zero; the input of the
/// pressure recovery.
struct LandauVelocity {
    a: f64,
}

fn landau_velocity<S: Scalar>(a: f64, x: &[S; MAX_DIM]) -> [S; MAX_DIM] {
    let r2 = norm_sq(x, 3);
    let inv_r = r2.sqrt().recip();
    let t = x[2] * inv_r;
    let den = (t - a) * -1.0;
    let inv_den = den.recip();
    let radial = (inv_den * inv_den * (a * a - 1.0) - 1.0) * inv_r * 2.0;
    let swirl = inv_r * inv_den * -2.0;
    [
        x[0] * inv_r * radial + x[0] * inv_r * t * swirl,
        x[1] * inv_r * radial + x[1] * inv_r * t * swirl,
        x[2] * inv_r * radial + (t * t - 1.0) * swirl,
        S::zero(),
    ]
}

fn vertical<S: Scalar>() -> [S; MAX_DIM] {
    [S::zero(), S::zero(), S::from_f64(1.0), S::zero()]
}

impl SmoothField for LandauVelocity {
    fn dim(&self) -> usize {
        3
    }
    fn evaluate<S: Scalar>(&self, x: &[S; MAX_DIM]) -> FieldValues<S> {
        FieldValues {
            u: landau_velocity(self.a, x),
            p: S::zero(),
            d: vertical(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct LandauField {
    pub params: LandauParams,
    /// Chebyshev coefficients of `Q(t) = (a - t)² P(t)`.
    pressure_series: Vec<f64>,
    /// Curl-compatibility certificate of the recovered pressure gradient
    /// on the default annulus.
    pub certificate: f64,
}

impl LandauField {
    pub fn new(a: LandauA) -> Result<Self> {
        a.validate()?;
        let params = LandauParams { a };
        let LandauA::Finite(a) = a else {
            return Ok(Self {
                params,
                pressure_series: Vec::new(),
                certificate: 0.0,
            });
        };
        let velocity = LandauVelocity { a };
        let cfg = StencilConfig::default();
        let grid = annulus_grid(&GridSpec::default_for(3)?, 3)?;
        let (certificate, _) = compatibility_certificate(&velocity, &grid, &cfg)?;
        if !(certificate < CERTIFICATE_TOLERANCE) {
            return Err(Error::IncompatibleField(certificate));
        }
        let pressure_series = recover_pressure_series(&velocity, &cfg)?;
        Ok(Self {
            params,
            pressure_series,
            certificate,
        })
    }

    pub fn evaluate<S: Scalar>(&self, x: &[S; MAX_DIM]) -> FieldValues<S> {
        let LandauA::Finite(a) = self.params.a else {
            return FieldValues {
                d: vertical(),
                ..FieldValues::zero()
            };
        };
        let r2 = norm_sq(x, 3);
        let t = x[2] * r2.sqrt().recip();
        let den = (t - a) * -1.0;
        let q = clenshaw(&self.pressure_series, t);
        FieldValues {
            u: landau_velocity(a, x),
            p: q / (den * den * r2),
            d: vertical(),
        }
    }
}

/// Tabulates `P` on the unit sphere by integrating from the north pole
/// along meridians, fixes the constant by degree `-2` homogeneity on the
/// axis, and returns the chopped Chebyshev series of `(a - t)² P(t)`.
fn recover_pressure_series(velocity: &LandauVelocity, cfg: &StencilConfig) -> Result<Vec<f64>> {
    let a = velocity.a;
    let pole = Point::from_array(3, [0.0, 0.0, 1.0, 0.0]);
    let pole2 = Point::from_array(3, [0.0, 0.0, 2.0, 0.0]);
    let rise = path_integral(velocity, &pole, &pole2, cfg)?;
    let at_pole = -4.0 * rise / 3.0;
    let n = LANDAU_CHEBYSHEV_NODES;
    let angles: Vec<f64> = (0..n).map(|j| std::f64::consts::PI * (j as f64 + 0.5) / n as f64).collect();
    let q = angles
        .iter()
        .map(|&phi| {
            let (s, c) = phi.sin_cos();
            let target = Point::from_array(3, [s, 0.0, c, 0.0]);
            let p = at_pole + path_integral(velocity, &pole, &target, cfg)?;
            Ok((a - c) * (a - c) * p)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut coeffs: Vec<f64> = (0..n)
        .map(|k| {
            let sum: f64 = angles.iter().zip(&q).map(|(phi, v)| v * (k as f64 * phi).cos()).sum();
            let scale = if k == 0 { 1.0 } else { 2.0 };
            scale * sum / n as f64
        })
        .collect();
    let largest = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= CHOP_TOLERANCE * largest) {
        coeffs.pop();
    }
    Ok(coeffs)
}

/// `Σ c_k T_k(t)`.
fn clenshaw<S: Scalar>(coeffs: &[f64], t: S) -> S {
    let mut b1 = S::zero();
    let mut b2 = S::zero();
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = t * b1 * 2.0 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + coeffs.first().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clenshaw_matches_cosines() {
        let coeffs = [0.3, -1.2, 0.5, 2.0];
        for &phi in &[0.1, 1.0, 2.5] {
            let t: f64 = f64::cos(phi);
            let want: f64 = coeffs.iter().enumerate().map(|(k, c)| c * (k as f64 * phi).cos()).sum();
            assert!((clenshaw(&coeffs, t) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn parameter_parsing() {
        assert_eq!("inf".parse::<LandauA>().unwrap(), LandauA::Infinite);
        assert_eq!("2".parse::<LandauA>().unwrap(), LandauA::Finite(2.0));
        assert!("1".parse::<LandauA>().is_err());
        assert!("0.5".parse::<LandauA>().is_err());
        let json = serde_json::to_string(&LandauA::Infinite).unwrap();
        assert_eq!(json, "\"inf\"");
        let back: LandauA = serde_json::from_str("1.5").unwrap();
        assert_eq!(back, LandauA::Finite(1.5));
        assert!(serde_json::from_str::<LandauA>("0.9").is_err());
    }

    #[test]
    fn velocity_on_axis_is_vertical() {
        let u = landau_velocity(2.0, &[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(u[0], 0.0);
        assert_eq!(u[1], 0.0);
        assert!((u[2] - 2.0 * (3.0 - 1.0)).abs() < 1e-14);
    }
}
