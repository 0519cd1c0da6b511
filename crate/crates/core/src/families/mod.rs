//! The explicit solution families, packaged as [`SolutionSpec`]s.
//!
//! Every family writes `u`, `p` and `d` once against [`Scalar`], so the
//! same code yields plain values, exact derivatives (via [`crate::jet`])
//! and double-double values for finite-difference cross-checks.
//!
//! Planar families (`case_i`, `case_ii`, `case_iii`, `custom_profile`) use
//! `z = (x₁ + i x₂)/r = e^{iθ}`, which keeps them polynomial in `z` and
//! free of `atan2`.

mod classify;
mod document;
mod landau;
mod planar;

pub use classify::{classify_profile, sample_profiles, Classification, ProfileSamples};
pub use landau::{LandauA, LandauParams, LANDAU_CHEBYSHEV_NODES};
pub use planar::{CaseIIIParams, CaseIIParams, CaseIParams, CustomProfileParams, PressureConvention};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::periodic_ode::{existence_condition, solve_profile, ProfileSolution, ShootingConfig};
use crate::scalar::{Scalar, MAX_DIM};

use landau::LandauField;
use planar::ProfileField;

/// `u`, `p` and `d` at one point, in Cartesian components.
#[derive(Debug, Clone, Copy)]
pub struct FieldValues<S> {
    pub u: [S; MAX_DIM],
    pub p: S,
    pub d: [S; MAX_DIM],
}

impl<S: Scalar> FieldValues<S> {
    pub fn zero() -> Self {
        Self {
            u: [S::zero(); MAX_DIM],
            p: S::zero(),
            d: [S::zero(); MAX_DIM],
        }
    }

    /// `[u₁..u₄, p, d₁..d₄]`.
    pub fn pack(&self) -> [S; 2 * MAX_DIM + 1] {
        let mut out = [S::zero(); 2 * MAX_DIM + 1];
        out[..MAX_DIM].copy_from_slice(&self.u);
        out[MAX_DIM] = self.p;
        out[MAX_DIM + 1..].copy_from_slice(&self.d);
        out
    }
}

/// A triple `(u, p, d)` defined on `ℝⁿ∖{0}`.
pub trait SmoothField: Sync {
    fn dim(&self) -> usize;

    /// Components beyond `dim` must be zero.
    fn evaluate<S: Scalar>(&self, x: &[S; MAX_DIM]) -> FieldValues<S>;

    /// The director `d(x)` alone.
    fn evaluate_director<S: Scalar>(&self, x: &[S; MAX_DIM]) -> [S; MAX_DIM] {
        self.evaluate(x).d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    CaseI,
    CaseIi,
    CaseIii,
    Landau,
    Hedgehog,
    ConstantDirector,
    CustomProfile,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 7] = [
        Self::CaseI,
        Self::CaseIi,
        Self::CaseIii,
        Self::Landau,
        Self::Hedgehog,
        Self::ConstantDirector,
        Self::CustomProfile,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::CaseI => "case_i",
            Self::CaseIi => "case_ii",
            Self::CaseIii => "case_iii",
            Self::Landau => "landau",
            Self::Hedgehog => "hedgehog",
            Self::ConstantDirector => "constant_director",
            Self::CustomProfile => "custom_profile",
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FamilyTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family '{s}'")))
    }
}

/// `d = (x/|x| + ε e_n) / |x/|x| + ε e_n|`; `ε = 0` is the hedgehog.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HedgehogParams {
    #[serde(default, skip_serializing_if = "is_zero")]
    pub perturbation: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantDirectorParams {
    pub d0: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Family {
    CaseI(CaseIParams),
    CaseIi(ProfileField<CaseIIParams>),
    CaseIii(CaseIIIParams),
    Landau(LandauField),
    Hedgehog(HedgehogParams),
    ConstantDirector([f64; MAX_DIM]),
    CustomProfile(ProfileField<CustomProfileParams>),
}

/// A candidate solution: a family tag, its parameters and the evaluators.
/// Immutable once built.
#[derive(Debug, Clone)]
pub struct SolutionSpec {
    dim: usize,
    family: Family,
}

impl SolutionSpec {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> FamilyTag {
        match &self.family {
            Family::CaseI(_) => FamilyTag::CaseI,
            Family::CaseIi(_) => FamilyTag::CaseIi,
            Family::CaseIii(_) => FamilyTag::CaseIii,
            Family::Landau(_) => FamilyTag::Landau,
            Family::Hedgehog(_) => FamilyTag::Hedgehog,
            Family::ConstantDirector(_) => FamilyTag::ConstantDirector,
            Family::CustomProfile(_) => FamilyTag::CustomProfile,
        }
    }

    /// The profile of `case_ii` and `custom_profile` specs.
    pub fn profile(&self) -> Option<&ProfileSolution> {
        match &self.family {
            Family::CaseIi(f) => Some(&f.profile),
            Family::CustomProfile(f) => Some(&f.profile),
            _ => None,
        }
    }

    /// Pressure constant `C₁` of `p = (2f(θ+θ₁) + C₁)/r²` for the profile
    /// families.
    pub fn c1(&self) -> Option<f64> {
        match &self.family {
            Family::CaseIi(f) => Some(f.c1),
            Family::CustomProfile(f) => Some(f.c1),
            _ => None,
        }
    }

    /// Certificate of the recovered Landau pressure.
    pub fn pressure_certificate(&self) -> Option<f64> {
        match &self.family {
            Family::Landau(l) => Some(l.certificate),
            _ => None,
        }
    }

    /// Whether the evaluators are invariant under `u ↦ λu(λ·)`,
    /// `p ↦ λ²p(λ·)`, `d ↦ d(λ·)`; true for every built-in family.
    pub fn is_self_similar(&self) -> bool {
        true
    }

    pub fn to_json(&self) -> serde_json::Value {
        document::to_document(self)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("spec documents serialize")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        document::from_document(value)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))?;
        Self::from_json(&value)
    }
}

impl SmoothField for SolutionSpec {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate<S: Scalar>(&self, x: &[S; MAX_DIM]) -> FieldValues<S> {
        match &self.family {
            Family::CaseI(p) => p.evaluate(x),
            Family::CaseIi(f) => f.evaluate(x),
            Family::CaseIii(p) => p.evaluate(x),
            Family::Landau(l) => l.evaluate(x),
            Family::Hedgehog(h) => hedgehog(self.dim, h.perturbation, x),
            Family::ConstantDirector(d0) => FieldValues {
                d: d0.map(S::from_f64),
                ..FieldValues::zero()
            },
            Family::CustomProfile(f) => f.evaluate(x),
        }
    }

    fn evaluate_director<S: Scalar>(&self, x: &[S; MAX_DIM]) -> [S; MAX_DIM] {
        match &self.family {
            Family::Landau(_) => [S::zero(), S::zero(), S::from_f64(1.0), S::zero()],
            Family::ConstantDirector(d0) => d0.map(S::from_f64),
            _ => self.evaluate(x).d,
        }
    }
}

impl Serialize for SolutionSpec {
    fn serialize<Se: serde::Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SolutionSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(d)?;
        Self::from_json(&value).map_err(serde::de::Error::custom)
    }
}

fn hedgehog<S: Scalar>(dim: usize, eps: f64, x: &[S; MAX_DIM]) -> FieldValues<S> {
    let r2 = crate::scalar::norm_sq(x, dim);
    let inv_r = r2.sqrt().recip();
    let mut d = [S::zero(); MAX_DIM];
    for i in 0..dim {
        d[i] = x[i] * inv_r;
    }
    if eps != 0.0 {
        d[dim - 1] = d[dim - 1] + eps;
        let inv = crate::scalar::norm_sq(&d, dim).sqrt().recip();
        for c in d.iter_mut().take(dim) {
            *c = *c * inv;
        }
    }
    FieldValues {
        u: [S::zero(); MAX_DIM],
        p: r2.recip() * (-0.5 * (dim as f64 - 1.0)),
        d,
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// `u = c x/|x|²`, `d = (cos((m+1)θ+θ₀), sin((m+1)θ+θ₀))` and the
/// pressure of the chosen convention.
pub fn make_case_i(c: f64, m: i64, theta0: f64) -> Result<SolutionSpec> {
    make_case_i_with(c, m, theta0, PressureConvention::Balanced)
}

pub fn make_case_i_with(c: f64, m: i64, theta0: f64, pressure: PressureConvention) -> Result<SolutionSpec> {
    let params = CaseIParams::new(c, m, theta0, pressure)?;
    Ok(SolutionSpec {
        dim: 2,
        family: Family::CaseI(params),
    })
}

/// Radial flow `u = f(θ+θ₁)/r e_r` driven by the periodic profile with
/// mean flux `Φ` and minimal period `2π/k`.
pub fn make_case_ii(phi: f64, k: u32, m: i64, theta1: f64, theta2: f64) -> Result<SolutionSpec> {
    make_case_ii_with(phi, k, m, theta1, theta2, PressureConvention::Balanced, &ShootingConfig::default())
}

pub fn make_case_ii_with(
    phi: f64,
    k: u32,
    m: i64,
    theta1: f64,
    theta2: f64,
    pressure: PressureConvention,
    cfg: &ShootingConfig,
) -> Result<SolutionSpec> {
    let params = CaseIIParams {
        phi,
        k,
        m,
        theta1,
        theta2,
        pressure,
    };
    params.validate()?;
    if !existence_condition(phi, k) {
        return Err(Error::NoExistence {
            lhs: crate::periodic_ode::existence_lhs(phi),
            k_sq: (k as f64) * (k as f64),
        });
    }
    let profile = solve_profile(phi, k, cfg)?;
    let c1 = pressure.c1(&profile, m);
    Ok(SolutionSpec {
        dim: 2,
        family: Family::CaseIi(ProfileField::new(params, profile, c1)),
    })
}

/// `u = Ψ/(2πr) e_r + μ/r e_θ`, `p = -|u|²/2`, `d ≡ (cos θ₃, sin θ₃)`.
pub fn make_case_iii(psi: f64, mu: f64, theta3: f64) -> Result<SolutionSpec> {
    let params = CaseIIIParams::new(psi, mu, theta3)?;
    Ok(SolutionSpec {
        dim: 2,
        family: Family::CaseIii(params),
    })
}

/// Landau solution with parameter `a > 1` (or `∞`) and `d ≡ e₃`. The
/// pressure is recovered numerically from `u`.
pub fn make_landau(a: LandauA) -> Result<SolutionSpec> {
    Ok(SolutionSpec {
        dim: 3,
        family: Family::Landau(LandauField::new(a)?),
    })
}

/// `u ≡ 0`, `p = -(n-1)/(2|x|²)`, `d = x/|x|`.
pub fn make_hedgehog(n: usize) -> Result<SolutionSpec> {
    make_perturbed_hedgehog(n, 0.0)
}

/// The hedgehog with `d` replaced by the normalisation of
/// `x/|x| + ε e_n`; not a solution for `ε ≠ 0`.
pub fn make_perturbed_hedgehog(n: usize, eps: f64) -> Result<SolutionSpec> {
    check_dim(n)?;
    if !eps.is_finite() || eps.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "perturbation must satisfy |ε| < 1, got {eps}"
        )));
    }
    Ok(SolutionSpec {
        dim: n,
        family: Family::Hedgehog(HedgehogParams { perturbation: eps }),
    })
}

/// The rigid state `u ≡ 0`, `p ≡ 0`, `d ≡ d0`.
pub fn make_constant_director(n: usize, d0: &[f64]) -> Result<SolutionSpec> {
    check_dim(n)?;
    if d0.len() != n {
        return Err(Error::InvalidParameter(format!(
            "d0 must have {n} components, got {}",
            d0.len()
        )));
    }
    let norm = d0.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NonUnitDirector(norm));
    }
    let mut d = [0.0; MAX_DIM];
    d[..n].copy_from_slice(d0);
    Ok(SolutionSpec {
        dim: n,
        family: Family::ConstantDirector(d),
    })
}

/// A planar radial flow built from a caller-supplied profile and pressure
/// constant. Nothing is assumed about whether it solves the system.
pub fn custom_profile(profile: ProfileSolution, c1: f64, m: i64, theta1: f64, theta2: f64) -> Result<SolutionSpec> {
    let params = CustomProfileParams { m, theta1, theta2 };
    params.validate()?;
    if !c1.is_finite() {
        return Err(Error::InvalidParameter(format!("C1 must be finite, got {c1}")));
    }
    Ok(SolutionSpec {
        dim: 2,
        family: Family::CustomProfile(ProfileField::new(params, profile, c1)),
    })
}
