//! Planar families on `ℝ²∖{0}`, evaluated through `z = e^{iθ} = (x₁ + i x₂)/r`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::FieldValues;
use crate::periodic_ode::ProfileSolution;
use crate::scalar::{Cplx, Scalar, MAX_DIM};

/// Which closed form supplies the pressure of the radial families.
///
/// `Balanced` is the pressure that satisfies
/// `-Δu + u·∇u + ∇p + div(∇d ⊙ ∇d) = 0`; for `case_i` it is
/// `p = -(c² + (m+1)²)/(2r²)`. `Stated` is `p = ((m+1)² - c²)/(2r²)`
/// (and, for the profile family, `C₁ = ((m+1)² - λ)/2`), which balances
/// the momentum equation only with the Ericksen stress taken with the
/// opposite sign; it is kept to reproduce that closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureConvention {
    #[default]
    Balanced,
    Stated,
}

impl PressureConvention {
    /// `C₁` of `p = (2f + C₁)/r²` for winding `m`.
    pub fn c1(&self, profile: &ProfileSolution, m: i64) -> f64 {
        match self {
            Self::Balanced => profile.c1_balanced(m),
            Self::Stated => profile.c1_ode(m),
        }
    }

    fn is_default(&self) -> bool {
        *self == Self::Balanced
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

/// `e^{iθ}` and `1/r²` at a planar point.
fn unit_phase<S: Scalar>(x: &[S; MAX_DIM]) -> (Cplx<S>, S) {
    let r2 = x[0] * x[0] + x[1] * x[1];
    let inv_r = r2.sqrt().recip();
    (Cplx::new(x[0] * inv_r, x[1] * inv_r), r2.recip())
}

/// `(cos((m+1)θ + φ), sin((m+1)θ + φ))`.
fn winding_director<S: Scalar>(z: Cplx<S>, m: i64, phase: f64) -> [S; MAX_DIM] {
    let w = z.unit_powi(m + 1).scale(phase.cos(), phase.sin());
    [w.re, w.im, S::zero(), S::zero()]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseIParams {
    pub c: f64,
    pub m: i64,
    pub theta0: f64,
    #[serde(default, skip_serializing_if = "PressureConvention::is_default")]
    pub pressure: PressureConvention,
}

impl CaseIParams {
    pub fn new(c: f64, m: i64, theta0: f64, pressure: PressureConvention) -> Result<Self> {
        let p = Self { c, m, theta0, pressure };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        finite("c", self.c)?;
        finite("theta0", self.theta0)
    }

    /// `q` of `p = q/r²`.
    pub fn pressure_coefficient(&self) -> f64 {
        let w = ((self.m + 1) * (self.m + 1)) as f64;
        match self.pressure {
            PressureConvention::Balanced => -0.5 * (self.c * self.c + w),
            PressureConvention::Stated => 0.5 * (w - self.c * self.c),
        }
    }

    pub(crate) fn evaluate<S: Scalar>(&self, x: &[S; MAX_DIM]) -> FieldValues<S> {
        let (z, inv_r2) = unit_phase(x);
        FieldValues {
            u: [x[0] * inv_r2 * self.c, x[1] * inv_r2 * self.c, S::zero(), S::zero()],
            p: inv_r2 * self.pressure_coefficient(),
            d: winding_director(z, self.m, self.theta0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseIIParams {
    #[serde(rename = "Phi")]
    pub phi: f64,
    pub k: u32,
    pub m: i64,
    pub theta1: f64,
    pub theta2: f64,
    #[serde(default, skip_serializing_if = "PressureConvention::is_default")]
    pub pressure: PressureConvention,
}

impl CaseIIParams {
    pub fn validate(&self) -> Result<()> {
        finite("Phi", self.phi)?;
        finite("theta1", self.theta1)?;
        finite("theta2", self.theta2)?;
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be a positive integer".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomProfileParams {
    pub m: i64,
    pub theta1: f64,
    pub theta2: f64,
}

impl CustomProfileParams {
    pub fn validate(&self) -> Result<()> {
        finite("theta1", self.theta1)?;
        finite("theta2", self.theta2)
    }
}

/// Winding and phases shared by the profile-backed families.
pub(crate) trait ProfileAngles {
    fn m(&self) -> i64;
    fn theta1(&self) -> f64;
    fn theta2(&self) -> f64;
}

impl ProfileAngles for CaseIIParams {
    fn m(&self) -> i64 {
        self.m
    }
    fn theta1(&self) -> f64 {
        self.theta1
    }
    fn theta2(&self) -> f64 {
        self.theta2
    }
}

impl ProfileAngles for CustomProfileParams {
    fn m(&self) -> i64 {
        self.m
    }
    fn theta1(&self) -> f64 {
        self.theta1
    }
    fn theta2(&self) -> f64 {
        self.theta2
    }
}

/// `u = f(θ+θ₁) x/r²`, `p = (2f(θ+θ₁) + C₁)/r²`, `d` winding `m` with
/// phase `θ₂`.
#[derive(Debug, Clone)]
pub(crate) struct ProfileField<P> {
    pub params: P,
    pub profile: ProfileSolution,
    pub c1: f64,
    mean: f64,
    /// `c_j = (a_{sj} - i b_{sj}) e^{i s j θ₁}` for `j = 1..`, where `s` is
    /// the stride.
    coefficients: Vec<(f64, f64)>,
    stride: i64,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl<P: ProfileAngles> ProfileField<P> {
    pub fn new(params: P, profile: ProfileSolution, c1: f64) -> Self {
        let n = profile.truncation();
        let nonzero: Vec<usize> = (1..=n)
            .filter(|&j| profile.fourier_cos[j] != 0.0 || profile.fourier_sin[j] != 0.0)
            .collect();
        let stride = nonzero.iter().fold(0, |g, &j| gcd(g, j)).max(1);
        let top = nonzero.last().copied().unwrap_or(0);
        let theta1 = params.theta1();
        let coefficients = (1..=top / stride)
            .map(|i| {
                let j = i * stride;
                let (s, c) = (j as f64 * theta1).sin_cos();
                let (a, b) = (profile.fourier_cos[j], -profile.fourier_sin[j]);
                (a * c - b * s, a * s + b * c)
            })
            .collect();
        Self {
            mean: profile.fourier_cos[0],
            params,
            profile,
            c1,
            coefficients,
            stride: stride as i64,
        }
    }

    /// `f(θ + θ₁)` by Horner's rule in `e^{isθ}`.
    fn profile_at<S: Scalar>(&self, z: Cplx<S>) -> S {
        let Some(&(lr, li)) = self.coefficients.last() else {
            return S::from_f64(self.mean);
        };
        let w = z.unit_powi(self.stride);
        let mut acc = Cplx::<S>::from_f64(lr, li);
        for &(cr, ci) in self.coefficients.iter().rev().skip(1) {
            let t = acc.mul(w);
            acc = Cplx::new(t.re + cr, t.im + ci);
        }
        acc.mul(w).re + self.mean
    }

    pub fn evaluate<S: Scalar>(&self, x: &[S; MAX_DIM]) -> FieldValues<S> {
        let (z, inv_r2) = unit_phase(x);
        let f = self.profile_at(z);
        let a = f * inv_r2;
        FieldValues {
            u: [x[0] * a, x[1] * a, S::zero(), S::zero()],
            p: (f * 2.0 + self.c1) * inv_r2,
            d: winding_director(z, self.params.m(), self.params.theta2()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseIIIParams {
    #[serde(rename = "Psi")]
    pub psi: f64,
    pub mu: f64,
    pub theta3: f64,
}

impl CaseIIIParams {
    pub fn new(psi: f64, mu: f64, theta3: f64) -> Result<Self> {
        let p = Self { psi, mu, theta3 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        finite("Psi", self.psi)?;
        finite("mu", self.mu)?;
        finite("theta3", self.theta3)?;
        if self.mu == 0.0 {
            return Err(Error::InvalidParameter(
                "mu must be nonzero; mu = 0 is a radial flow (case_i or case_ii)".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn evaluate<S: Scalar>(&self, x: &[S; MAX_DIM]) -> FieldValues<S> {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let inv_r2 = r2.recip();
        let radial = self.psi / (2.0 * std::f64::consts::PI);
        let u = [
            (x[0] * radial - x[1] * self.mu) * inv_r2,
            (x[1] * radial + x[0] * self.mu) * inv_r2,
            S::zero(),
            S::zero(),
        ];
        let (s, c) = self.theta3.sin_cos();
        FieldValues {
            u,
            p: inv_r2 * (-0.5 * (radial * radial + self.mu * self.mu)),
            d: [S::from_f64(c), S::from_f64(s), S::zero(), S::zero()],
        }
    }
}
