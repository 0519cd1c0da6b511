//! Number types the closed-form evaluators are generic over.
//!
//! Every solution family writes its `u`, `p` and `d` once, against the
//! [`Scalar`] trait. Instantiating with `f64` gives plain values, with
//! [`Grad`]/[`Jet`] gives exact first/second derivatives (forward-mode
//! automatic differentiation), and with [`DoubleDouble`] gives ~32-digit
//! values that make finite-difference cross-checks roundoff-free.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub use crate::dd::DoubleDouble;
pub use crate::jet::{Grad, Jet};

/// Largest ambient dimension handled by the evaluators.
pub const MAX_DIM: usize = 4;

pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn from_f64(v: f64) -> Self;
    /// Leading `f64` value, dropping derivative or low-order parts.
    fn value(&self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn recip(self) -> Self {
        Self::from_f64(1.0) / self
    }

    fn powi(self, n: u32) -> Self {
        let mut acc = Self::from_f64(1.0);
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
}

/// Lift an `f64` point into any scalar type.
pub fn lift<S: Scalar>(x: &[f64; MAX_DIM]) -> [S; MAX_DIM] {
    x.map(S::from_f64)
}

pub fn values<S: Scalar>(x: &[S; MAX_DIM]) -> [f64; MAX_DIM] {
    x.map(|s| s.value())
}

/// `|x|²` over the first `dim` components.
pub fn norm_sq<S: Scalar>(x: &[S; MAX_DIM], dim: usize) -> S {
    let mut acc = S::zero();
    for c in &x[..dim] {
        acc = acc + *c * *c;
    }
    acc
}

/// Complex numbers over a [`Scalar`]; only what the planar families need.
#[derive(Debug, Clone, Copy)]
pub struct Cplx<S> {
    pub re: S,
    pub im: S,
}

impl<S: Scalar> Cplx<S> {
    pub fn new(re: S, im: S) -> Self {
        Self { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Self::new(S::from_f64(re), S::from_f64(im))
    }

    pub fn one() -> Self {
        Self::from_f64(1.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }

    pub fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }

    /// Multiply by a constant `(a + ib)`.
    pub fn scale(self, a: f64, b: f64) -> Self {
        Self::new(self.re * a - self.im * b, self.re * b + self.im * a)
    }

    /// Integer power of a unit-modulus number: negative exponents use the
    /// conjugate, which is exact on the unit circle.
    pub fn unit_powi(self, n: i64) -> Self {
        let (base, e) = if n < 0 {
            (self.conj(), n.unsigned_abs())
        } else {
            (self, n as u64)
        };
        let mut acc = Self::one();
        let mut b = base;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(b);
            }
            b = b.mul(b);
            e >>= 1;
        }
        acc
    }
}
