//! Double-double arithmetic (an unevaluated sum of two `f64`s, ~32 digits).
//!
//! Only what the evaluators need: field operations, `sqrt`, `sin`, `cos`.
//! The algorithms are the classical error-free transformations (Knuth
//! two-sum, FMA two-product) with Dekker-style normalisation.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

// pi/2 split into two doubles
const HALF_PI_DD: DoubleDouble = DoubleDouble {
    hi: FRAC_PI_2,
    lo: 6.123_233_995_736_766e-17,
};

impl DoubleDouble {
    pub const fn new(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    /// Taylor series for sin and cos on |x| ≤ π/4.
    fn sin_cos_reduced(x: Self) -> (Self, Self) {
        let x2 = x * x;
        let mut sin = x;
        let mut cos = Self::new(1.0);
        let mut term_s = x;
        let mut term_c = Self::new(1.0);
        for k in 1..=20 {
            let kf = k as f64;
            term_s = -(term_s * x2) / ((2.0 * kf) * (2.0 * kf + 1.0));
            term_c = -(term_c * x2) / ((2.0 * kf - 1.0) * (2.0 * kf));
            sin = sin + term_s;
            cos = cos + term_c;
            if term_s.hi.abs() < 1e-34 && term_c.hi.abs() < 1e-34 {
                break;
            }
        }
        (sin, cos)
    }

    pub fn sin_cos(self) -> (Self, Self) {
        let q = (self.hi / FRAC_PI_2).round();
        let r = self - HALF_PI_DD * q;
        let (s, c) = Self::sin_cos_reduced(r);
        match (q as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Self::renorm(s, e + f)
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        Self::renorm(p, e)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * q1;
        let q2 = r.hi / o.hi;
        let r = r - o * q2;
        let q3 = r.hi / o.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 } + Self::new(q3)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add<f64> for DoubleDouble {
    type Output = Self;
    fn add(self, c: f64) -> Self {
        let (s, e) = two_sum(self.hi, c);
        Self::renorm(s, e + self.lo)
    }
}

impl Sub<f64> for DoubleDouble {
    type Output = Self;
    fn sub(self, c: f64) -> Self {
        self + (-c)
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = Self;
    fn mul(self, c: f64) -> Self {
        let (p, e) = two_prod(self.hi, c);
        Self::renorm(p, e + self.lo * c)
    }
}

impl Div<f64> for DoubleDouble {
    type Output = Self;
    fn div(self, c: f64) -> Self {
        self / Self::new(c)
    }
}

impl Scalar for DoubleDouble {
    fn from_f64(v: f64) -> Self {
        Self::new(v)
    }
    fn value(&self) -> f64 {
        self.to_f64()
    }
    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::new(self.hi.sqrt());
        }
        let x = self.hi.sqrt();
        let (sq, err) = two_prod(x, x);
        let resid = (self - Self { hi: sq, lo: err }).to_f64();
        Self::renorm(x, resid / (2.0 * x))
    }
    fn sin(self) -> Self {
        self.sin_cos().0
    }
    fn cos(self) -> Self {
        self.sin_cos().1
    }
}
