//! Values, gradients and Hessians of `(u, p, d)` at one point, from exact
//! forward-mode derivatives or from double-double central differences.

use crate::error::Result;
use crate::families::SmoothField;
use crate::field::{fd_jet, DerivativeMode, Point, StencilConfig};
use crate::scalar::{DoubleDouble, Jet, MAX_DIM};

pub(crate) const PACKED: usize = 2 * MAX_DIM + 1;
const P: usize = MAX_DIM;
const D0: usize = MAX_DIM + 1;

/// Packed layout `[u₁..u₄, p, d₁..d₄]`; `grad[c][j] = ∂_j c`,
/// `hess[c][j][k] = ∂_j∂_k c`.
#[derive(Debug, Clone, Copy)]
pub struct LocalJet {
    pub dim: usize,
    pub value: [f64; PACKED],
    pub grad: [[f64; MAX_DIM]; PACKED],
    pub hess: [[[f64; MAX_DIM]; MAX_DIM]; PACKED],
}

impl LocalJet {
    pub fn u(&self, i: usize) -> f64 {
        self.value[i]
    }
    pub fn du(&self, i: usize, j: usize) -> f64 {
        self.grad[i][j]
    }
    pub fn lap_u(&self, i: usize) -> f64 {
        (0..self.dim).map(|j| self.hess[i][j][j]).sum()
    }
    pub fn p(&self) -> f64 {
        self.value[P]
    }
    pub fn dp(&self, j: usize) -> f64 {
        self.grad[P][j]
    }
    pub fn d(&self, k: usize) -> f64 {
        self.value[D0 + k]
    }
    pub fn dd(&self, k: usize, j: usize) -> f64 {
        self.grad[D0 + k][j]
    }
    pub fn hess_d(&self, k: usize, i: usize, j: usize) -> f64 {
        self.hess[D0 + k][i][j]
    }
    pub fn lap_d(&self, k: usize) -> f64 {
        (0..self.dim).map(|j| self.hess[D0 + k][j][j]).sum()
    }
    pub fn hess_u(&self, i: usize, j: usize, k: usize) -> f64 {
        self.hess[i][j][k]
    }
    pub fn hess_p(&self, j: usize, k: usize) -> f64 {
        self.hess[P][j][k]
    }

    /// `|∇d|² = Σ_{k,j} (∂_j d_k)²`.
    pub fn grad_d_sq(&self) -> f64 {
        let n = self.dim;
        (0..n).flat_map(|k| (0..n).map(move |j| (k, j))).map(|(k, j)| self.dd(k, j).powi(2)).sum()
    }

    /// `|∇u|²`.
    pub fn grad_u_sq(&self) -> f64 {
        let n = self.dim;
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| self.du(i, j).powi(2)).sum()
    }

    pub fn speed_sq(&self) -> f64 {
        (0..self.dim).map(|i| self.u(i).powi(2)).sum()
    }

    /// `∂_j(∂_i d · ∂_j d)`, the `i`-th component of `div(∇d ⊙ ∇d)`.
    pub fn ericksen_divergence(&self, i: usize) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for k in 0..n {
            let mut mixed = 0.0;
            for j in 0..n {
                mixed += self.hess_d(k, i, j) * self.dd(k, j);
            }
            acc += mixed + self.dd(k, i) * self.lap_d(k);
        }
        acc
    }

    /// `-Δu_i + (u·∇)u_i + ∂_i p + [div(∇d ⊙ ∇d)]_i`.
    pub fn momentum(&self, i: usize) -> f64 {
        -self.lap_u(i) + self.advection_u(i) + self.dp(i) + self.ericksen_divergence(i)
    }

    fn advection_u(&self, i: usize) -> f64 {
        (0..self.dim).map(|j| self.u(j) * self.du(i, j)).sum()
    }

    /// `Δu - (u·∇)u - div(∇d ⊙ ∇d)`, the pressure gradient the momentum
    /// equation demands.
    pub fn required_pressure_gradient(&self, i: usize) -> f64 {
        self.lap_u(i) - self.advection_u(i) - self.ericksen_divergence(i)
    }

    pub fn divergence(&self) -> f64 {
        (0..self.dim).map(|i| self.du(i, i)).sum()
    }

    /// `(u·∇)d_k`.
    pub fn advection_d(&self, k: usize) -> f64 {
        (0..self.dim).map(|j| self.u(j) * self.dd(k, j)).sum()
    }

    /// `Δd_k + |∇d|² d_k`, the tension field.
    pub fn tension(&self, k: usize) -> f64 {
        self.lap_d(k) + self.grad_d_sq() * self.d(k)
    }

    /// `Δd_k + |∇d|² d_k - (u·∇)d_k`.
    pub fn director(&self, k: usize) -> f64 {
        self.tension(k) - self.advection_d(k)
    }

    pub fn director_norm(&self) -> f64 {
        (0..self.dim).map(|k| self.director(k).powi(2)).sum::<f64>().sqrt()
    }

    pub fn momentum_norm(&self) -> f64 {
        (0..self.dim).map(|i| self.momentum(i).powi(2)).sum::<f64>().sqrt()
    }

    pub fn unit_defect(&self) -> f64 {
        ((0..self.dim).map(|k| self.d(k).powi(2)).sum::<f64>().sqrt() - 1.0).abs()
    }
}

/// Derivatives of `field` at `x` in the configured mode.
pub fn local_jet<F: SmoothField>(field: &F, x: &Point, cfg: &StencilConfig) -> Result<LocalJet> {
    match cfg.mode {
        DerivativeMode::AnalyticPreferred => {
            cfg.step(x)?;
            Ok(analytic_jet(field, x))
        }
        DerivativeMode::ForcedFd => {
            let jet = fd_jet::<DoubleDouble, PACKED>(|y| field.evaluate(y).pack(), x, cfg, true)?;
            Ok(LocalJet {
                dim: x.dim,
                value: jet.value,
                grad: jet.grad,
                hess: jet.hess,
            })
        }
    }
}

pub(crate) fn analytic_jet<F: SmoothField>(field: &F, x: &Point) -> LocalJet {
    let seeded = Jet::seed(&x.coords, x.dim);
    let packed = field.evaluate(&seeded).pack();
    LocalJet {
        dim: x.dim,
        value: packed.map(|j| j.v),
        grad: packed.map(|j| j.g),
        hess: packed.map(|j| j.h),
    }
}

/// `hess[k][i][j] = ∂_i∂_j d_k` at `x`.
pub(crate) fn director_hessian<F: SmoothField>(
    field: &F,
    x: &Point,
    cfg: &StencilConfig,
) -> Result<[[[f64; MAX_DIM]; MAX_DIM]; MAX_DIM]> {
    match cfg.mode {
        DerivativeMode::AnalyticPreferred => {
            cfg.step(x)?;
            let seeded = Jet::seed(&x.coords, x.dim);
            Ok(field.evaluate_director(&seeded).map(|c| c.h))
        }
        DerivativeMode::ForcedFd => {
            Ok(fd_jet::<DoubleDouble, MAX_DIM>(|y| field.evaluate_director(y), x, cfg, true)?.hess)
        }
    }
}
