//! Forward-mode truncated Taylor arithmetic in up to [`MAX_DIM`] variables.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::{Scalar, MAX_DIM};

type Vector = [f64; MAX_DIM];
type Matrix = [[f64; MAX_DIM]; MAX_DIM];

const ZV: Vector = [0.0; MAX_DIM];
const ZM: Matrix = [[0.0; MAX_DIM]; MAX_DIM];

/// Value and gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grad {
    pub v: f64,
    pub g: Vector,
}

/// Value, gradient and Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub g: Vector,
    pub h: Matrix,
}

impl Grad {
    pub fn constant(v: f64) -> Self {
        Self { v, g: ZV }
    }

    pub fn variable(v: f64, index: usize) -> Self {
        let mut g = ZV;
        g[index] = 1.0;
        Self { v, g }
    }

    /// Seed `x` so that component `i` is the `i`-th independent variable.
    pub fn seed(x: &[f64; MAX_DIM], dim: usize) -> [Self; MAX_DIM] {
        std::array::from_fn(|i| {
            if i < dim {
                Self::variable(x[i], i)
            } else {
                Self::constant(x[i])
            }
        })
    }

    fn scaled(self, c: f64) -> Self {
        Self {
            v: self.v * c,
            g: self.g.map(|x| x * c),
        }
    }

    fn chain(self, f: f64, df: f64) -> Self {
        Self {
            v: f,
            g: self.g.map(|gi| df * gi),
        }
    }
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Self { v, g: ZV, h: ZM }
    }

    pub fn variable(v: f64, index: usize) -> Self {
        let mut g = ZV;
        g[index] = 1.0;
        Self { v, g, h: ZM }
    }

    pub fn seed(x: &[f64; MAX_DIM], dim: usize) -> [Self; MAX_DIM] {
        std::array::from_fn(|i| {
            if i < dim {
                Self::variable(x[i], i)
            } else {
                Self::constant(x[i])
            }
        })
    }

    fn scaled(self, c: f64) -> Self {
        Self {
            v: self.v * c,
            g: self.g.map(|x| x * c),
            h: self.h.map(|row| row.map(|x| x * c)),
        }
    }

    fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        let mut h = ZM;
        for j in 0..MAX_DIM {
            for k in 0..MAX_DIM {
                h[j][k] = df * self.h[j][k] + d2f * self.g[j] * self.g[k];
            }
        }
        Self {
            v: f,
            g: self.g.map(|gi| df * gi),
            h,
        }
    }
}

impl Add for Grad {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            v: self.v + o.v,
            g: std::array::from_fn(|i| self.g[i] + o.g[i]),
        }
    }
}

impl Sub for Grad {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            v: self.v - o.v,
            g: std::array::from_fn(|i| self.g[i] - o.g[i]),
        }
    }
}

impl Mul for Grad {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            g: std::array::from_fn(|i| self.v * o.g[i] + o.v * self.g[i]),
        }
    }
}

impl Div for Grad {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for Grad {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            v: -self.v,
            g: self.g.map(|x| -x),
        }
    }
}

impl Add for Jet {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            v: self.v + o.v,
            g: std::array::from_fn(|i| self.g[i] + o.g[i]),
            h: std::array::from_fn(|i| std::array::from_fn(|j| self.h[i][j] + o.h[i][j])),
        }
    }
}

impl Sub for Jet {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self {
            v: self.v - o.v,
            g: std::array::from_fn(|i| self.g[i] - o.g[i]),
            h: std::array::from_fn(|i| std::array::from_fn(|j| self.h[i][j] - o.h[i][j])),
        }
    }
}

impl Mul for Jet {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut h = ZM;
        for j in 0..MAX_DIM {
            for k in 0..MAX_DIM {
                h[j][k] = self.v * o.h[j][k]
                    + o.v * self.h[j][k]
                    + self.g[j] * o.g[k]
                    + self.g[k] * o.g[j];
            }
        }
        Self {
            v: self.v * o.v,
            g: std::array::from_fn(|i| self.v * o.g[i] + o.v * self.g[i]),
            h,
        }
    }
}

impl Div for Jet {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            v: -self.v,
            g: self.g.map(|x| -x),
            h: self.h.map(|row| row.map(|x| -x)),
        }
    }
}

macro_rules! scalar_rhs_ops {
    ($t:ty) => {
        impl Add<f64> for $t {
            type Output = Self;
            fn add(mut self, c: f64) -> Self {
                self.v += c;
                self
            }
        }
        impl Sub<f64> for $t {
            type Output = Self;
            fn sub(mut self, c: f64) -> Self {
                self.v -= c;
                self
            }
        }
        impl Mul<f64> for $t {
            type Output = Self;
            fn mul(self, c: f64) -> Self {
                self.scaled(c)
            }
        }
        impl Div<f64> for $t {
            type Output = Self;
            fn div(self, c: f64) -> Self {
                self.scaled(1.0 / c)
            }
        }
    };
}

scalar_rhs_ops!(Grad);
scalar_rhs_ops!(Jet);

impl Scalar for Grad {
    fn from_f64(v: f64) -> Self {
        Self::constant(v)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s)
    }
}

impl Scalar for Jet {
    fn from_f64(v: f64) -> Self {
        Self::constant(v)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosen<S: Scalar>(x: &[S; MAX_DIM]) -> S {
        let a = x[1] - x[0] * x[0];
        let b = (x[0] - 1.0) * -1.0;
        a * a * 100.0 + b * b + (x[2] * x[2] + 1.0).sqrt() / (x[0] + 3.0)
    }

    #[test]
    fn jet_matches_hand_derivatives() {
        let p = [0.3, -0.2, 0.5, 0.0];
        let j = rosen(&Jet::seed(&p, 3));
        let (x, y, z) = (p[0], p[1], p[2]);
        let s = (z * z + 1.0).sqrt();
        let dx = -400.0 * x * (y - x * x) + 2.0 * (x - 1.0) - s / ((x + 3.0) * (x + 3.0));
        let dy = 200.0 * (y - x * x);
        let dz = z / s / (x + 3.0);
        assert!((j.g[0] - dx).abs() < 1e-12);
        assert!((j.g[1] - dy).abs() < 1e-12);
        assert!((j.g[2] - dz).abs() < 1e-12);
        assert_eq!(j.h[1][1], 200.0);
        assert!((j.h[0][1] - (-400.0 * x)).abs() < 1e-12);
        assert!((j.h[0][1] - j.h[1][0]).abs() < 1e-14);
        let dzz = 1.0 / (s * s * s) / (x + 3.0);
        assert!((j.h[2][2] - dzz).abs() < 1e-12);
    }

    #[test]
    fn grad_agrees_with_jet() {
        let p = [1.1, 0.4, -0.7, 0.0];
        let j = rosen(&Jet::seed(&p, 3));
        let g = rosen(&Grad::seed(&p, 3));
        assert_eq!(j.v, g.v);
        for k in 0..3 {
            assert!((j.g[k] - g.g[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn trig_chain_rule() {
        let j = Jet::variable(0.4, 0).sin();
        assert!((j.g[0] - 0.4_f64.cos()).abs() < 1e-15);
        assert!((j.h[0][0] + 0.4_f64.sin()).abs() < 1e-15);
    }
}
