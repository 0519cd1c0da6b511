use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::grid::Point;
use crate::scalar::{Scalar, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivativeMode {
    /// Exact derivatives from forward-mode differentiation where available.
    #[serde(rename = "analytic")]
    AnalyticPreferred,
    /// Central differences on double-double evaluations.
    #[serde(rename = "fd")]
    ForcedFd,
}

impl std::fmt::Display for DerivativeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::AnalyticPreferred => f.write_str("analytic"),
            Self::ForcedFd => f.write_str("fd"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StencilConfig {
    pub order: u8,
    /// Step relative to `|x|`: `h = relative_step · |x|`.
    pub relative_step: f64,
    pub mode: DerivativeMode,
}

impl Default for StencilConfig {
    fn default() -> Self {
        Self {
            order: 4,
            relative_step: 1e-4,
            mode: DerivativeMode::AnalyticPreferred,
        }
    }
}

impl StencilConfig {
    pub fn forced_fd() -> Self {
        Self {
            mode: DerivativeMode::ForcedFd,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order != 2 && self.order != 4 {
            return Err(Error::InvalidStencil(format!("order must be 2 or 4, got {}", self.order)));
        }
        if !(self.relative_step > 0.0 && self.relative_step < 0.1) {
            return Err(Error::InvalidStencil(format!(
                "relative step must lie in (0, 0.1), got {}",
                self.relative_step
            )));
        }
        Ok(())
    }

    /// Absolute step at `x`.
    pub fn step(&self, x: &Point) -> Result<f64> {
        self.validate()?;
        let r = x.norm();
        let h = self.relative_step * r;
        if !(r > self.order as f64 * h) {
            return Err(Error::StencilHitsOrigin { radius: r, step: h });
        }
        Ok(h)
    }

    /// Offsets and integer weights of the first-derivative stencil, with
    /// the denominator multiplying `h`.
    fn first(&self) -> (&'static [(f64, f64)], f64) {
        if self.order == 2 {
            (&[(-1.0, -1.0), (1.0, 1.0)], 2.0)
        } else {
            (&[(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)], 12.0)
        }
    }

    /// Offsets and integer weights of the second-derivative stencil, with
    /// the denominator multiplying `h²`.
    fn second(&self) -> (&'static [(f64, f64)], f64) {
        if self.order == 2 {
            (&[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)], 1.0)
        } else {
            (&[(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)], 12.0)
        }
    }
}

/// Value, first and second derivatives of a `K`-component field.
/// `grad[c][j] = ∂_j f_c`, `hess[c][j][k] = ∂_j ∂_k f_c`.
#[derive(Debug, Clone, Copy)]
pub struct FdJet<const K: usize> {
    pub value: [f64; K],
    pub grad: [[f64; MAX_DIM]; K],
    pub hess: [[[f64; MAX_DIM]; MAX_DIM]; K],
}

fn shifted<S: Scalar>(x: &[S; MAX_DIM], moves: &[(usize, f64)]) -> [S; MAX_DIM] {
    let mut y = *x;
    for &(axis, delta) in moves {
        y[axis] = y[axis] + delta;
    }
    y
}

/// Central-difference derivatives of `f` at `x`. Evaluation happens in
/// `S`; with [`crate::scalar::DoubleDouble`] the quotients carry no
/// visible roundoff at the default step.
pub fn fd_jet<S: Scalar, const K: usize>(
    f: impl Fn(&[S; MAX_DIM]) -> [S; K],
    x: &Point,
    cfg: &StencilConfig,
    with_hessian: bool,
) -> Result<FdJet<K>> {
    let h = cfg.step(x)?;
    let dim = x.dim;
    let base = x.coords.map(S::from_f64);
    let center = f(&base);
    let (first, d1) = cfg.first();
    let (second, d2) = cfg.second();
    let mut out = FdJet {
        value: center.map(|c| c.value()),
        grad: [[0.0; MAX_DIM]; K],
        hess: [[[0.0; MAX_DIM]; MAX_DIM]; K],
    };
    for j in 0..dim {
        let mut acc = [S::zero(); K];
        for &(a, w) in first {
            let v = f(&shifted(&base, &[(j, a * h)]));
            for c in 0..K {
                acc[c] = acc[c] + v[c] * w;
            }
        }
        for c in 0..K {
            out.grad[c][j] = (acc[c] / (d1 * h)).value();
        }
    }
    if !with_hessian {
        return Ok(out);
    }
    for j in 0..dim {
        let mut acc = [S::zero(); K];
        for &(a, w) in second {
            let v = if a == 0.0 { center } else { f(&shifted(&base, &[(j, a * h)])) };
            for c in 0..K {
                acc[c] = acc[c] + v[c] * w;
            }
        }
        for c in 0..K {
            out.hess[c][j][j] = (acc[c] / (d2 * h * h)).value();
        }
    }
    for j in 0..dim {
        for k in (j + 1)..dim {
            let mut acc = [S::zero(); K];
            for &(a, wa) in first {
                for &(b, wb) in first {
                    let v = f(&shifted(&base, &[(j, a * h), (k, b * h)]));
                    for c in 0..K {
                        acc[c] = acc[c] + v[c] * (wa * wb);
                    }
                }
            }
            for c in 0..K {
                let m = (acc[c] / (d1 * d1 * h * h)).value();
                out.hess[c][j][k] = m;
                out.hess[c][k][j] = m;
            }
        }
    }
    Ok(out)
}

/// Gradient of a scalar field.
pub fn fd_gradient<S: Scalar>(
    f: impl Fn(&[S; MAX_DIM]) -> S,
    x: &Point,
    cfg: &StencilConfig,
) -> Result<Vec<f64>> {
    let jet = fd_jet(|y| [f(y)], x, cfg, false)?;
    Ok(jet.grad[0][..x.dim].to_vec())
}

/// Jacobian `J[i][j] = ∂_j f_i` of a vector field.
pub fn fd_jacobian<S: Scalar>(
    f: impl Fn(&[S; MAX_DIM]) -> [S; MAX_DIM],
    x: &Point,
    cfg: &StencilConfig,
) -> Result<Vec<Vec<f64>>> {
    let jet = fd_jet(f, x, cfg, false)?;
    Ok((0..x.dim).map(|i| jet.grad[i][..x.dim].to_vec()).collect())
}

/// Laplacian of a scalar field.
pub fn fd_laplacian<S: Scalar>(
    f: impl Fn(&[S; MAX_DIM]) -> S,
    x: &Point,
    cfg: &StencilConfig,
) -> Result<f64> {
    let h = cfg.step(x)?;
    let base = x.coords.map(S::from_f64);
    let (second, d2) = cfg.second();
    let mut acc = S::zero();
    for j in 0..x.dim {
        for &(a, w) in second {
            acc = acc + f(&shifted(&base, &[(j, a * h)])) * w;
        }
    }
    Ok((acc / (d2 * h * h)).value())
}

/// Divergence of a vector field.
pub fn fd_divergence<S: Scalar>(
    f: impl Fn(&[S; MAX_DIM]) -> [S; MAX_DIM],
    x: &Point,
    cfg: &StencilConfig,
) -> Result<f64> {
    let jac = fd_jacobian(f, x, cfg)?;
    Ok((0..x.dim).map(|i| jac[i][i]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DoubleDouble;

    fn inv_r<S: Scalar>(x: &[S; MAX_DIM]) -> S {
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt().recip()
    }

    #[test]
    fn harmonic_inverse_radius() {
        let p = Point::new(&[1.0, 0.0, 0.0]).unwrap();
        let cfg = StencilConfig::default();
        let lap = fd_laplacian(inv_r::<f64>, &p, &cfg).unwrap();
        assert!(lap.abs() < 1e-6, "{lap}");
        let lap_dd = fd_laplacian(inv_r::<DoubleDouble>, &p, &cfg).unwrap();
        assert!(lap_dd.abs() < 1e-12, "{lap_dd}");
    }

    #[test]
    fn hedgehog_gradient_norm() {
        // |∇(x/|x|)|² = (n-1)/|x|² = 0.5 at |x| = 2 in 3D
        let p = Point::new(&[0.0, 2.0 * 0.6, 2.0 * 0.8]).unwrap();
        let cfg = StencilConfig::default();
        let jac = fd_jacobian(
            |x: &[f64; MAX_DIM]| {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                [x[0] / r, x[1] / r, x[2] / r, 0.0]
            },
            &p,
            &cfg,
        )
        .unwrap();
        let n2: f64 = jac.iter().flatten().map(|v| v * v).sum();
        assert!((n2 - 0.5).abs() < 1e-6, "{n2}");
    }

    #[test]
    fn constant_field_has_zero_gradient() {
        let p = Point::new(&[0.3, -0.4]).unwrap();
        let g = fd_gradient(|_: &[f64; MAX_DIM]| 7.25, &p, &StencilConfig::default()).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
    }

    #[test]
    fn polynomials_up_to_order_are_exact() {
        let p = Point::new(&[0.7, -0.3, 0.4]).unwrap();
        for &order in &[2u8, 4] {
            let cfg = StencilConfig { order, ..StencilConfig::default() };
            let deg = order as i32;
            // f = x^deg + x y^(deg-1) + z
            let f = |x: &[DoubleDouble; MAX_DIM]| {
                x[0].powi(deg as u32) + x[0] * x[1].powi(deg as u32 - 1) + x[2]
            };
            let jet = fd_jet(|y| [f(y)], &p, &cfg, true).unwrap();
            let (x, y) = (0.7_f64, -0.3_f64);
            let d = deg as f64;
            let gx = d * x.powi(deg - 1) + y.powi(deg - 1);
            let gy = x * (d - 1.0) * y.powi(deg - 2);
            let hxx = d * (d - 1.0) * x.powi(deg - 2);
            let hxy = (d - 1.0) * y.powi(deg - 2);
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
            assert!(rel(jet.grad[0][0], gx) < 1e-9);
            assert!(rel(jet.grad[0][1], gy) < 1e-9);
            assert!(rel(jet.grad[0][2], 1.0) < 1e-9);
            assert!(rel(jet.hess[0][0][0], hxx) < 1e-9);
            assert!(rel(jet.hess[0][0][1], hxy) < 1e-9);
        }
    }

    #[test]
    fn stencil_validation() {
        let p = Point::new(&[1.0, 1.0]).unwrap();
        let bad = StencilConfig { order: 3, ..StencilConfig::default() };
        assert!(bad.step(&p).is_err());
        let bad = StencilConfig { relative_step: 0.2, ..StencilConfig::default() };
        assert!(bad.step(&p).is_err());
    }
}
