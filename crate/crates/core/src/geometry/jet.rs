//! Second-order forward-mode jets: a value with its gradient and Hessian in up
//! to [`MAX_PARAM_DIM`] parameters.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const MAX_PARAM_DIM: usize = 8;

/// Arithmetic shared by `f64` and [`Jet2`], so that chart maps can be written
/// once and differentiated exactly.
pub trait Real:
    Copy
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
    fn cst(&self, value: f64) -> Self;
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;

    fn powi(self, k: u32) -> Self {
        (0..k).fold(self.cst(1.0), |acc, _| acc * self)
    }
}

impl Real for f64 {
    fn cst(&self, value: f64) -> Self {
        value
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    dim: usize,
    pub v: f64,
    pub g: [f64; MAX_PARAM_DIM],
    pub h: [[f64; MAX_PARAM_DIM]; MAX_PARAM_DIM],
}

impl Jet2 {
    pub fn constant(dim: usize, v: f64) -> Self {
        assert!(dim <= MAX_PARAM_DIM, "at most {MAX_PARAM_DIM} parameters");
        Self { dim, v, g: [0.0; MAX_PARAM_DIM], h: [[0.0; MAX_PARAM_DIM]; MAX_PARAM_DIM] }
    }

    /// The coordinate function `u_i` evaluated at `v`.
    pub fn variable(dim: usize, i: usize, v: f64) -> Self {
        let mut j = Self::constant(dim, v);
        j.g[i] = 1.0;
        j
    }

    /// Seeds all coordinates of a parameter point.
    pub fn seed(u: &[f64]) -> Vec<Self> {
        u.iter().enumerate().map(|(i, &v)| Self::variable(u.len(), i, v)).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Composition with a scalar function given its value and first two derivatives.
    fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        let mut out = Self::constant(self.dim, f);
        for i in 0..self.dim {
            out.g[i] = df * self.g[i];
            for j in 0..self.dim {
                out.h[i][j] = df * self.h[i][j] + d2f * self.g[i] * self.g[j];
            }
        }
        out
    }

    fn map_linear(self, other: Self, a: f64, b: f64) -> Self {
        let dim = self.dim.max(other.dim);
        let mut out = Self::constant(dim, a * self.v + b * other.v);
        for i in 0..dim {
            out.g[i] = a * self.g[i] + b * other.g[i];
            for j in 0..dim {
                out.h[i][j] = a * self.h[i][j] + b * other.h[i][j];
            }
        }
        out
    }

    fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        self.map_linear(rhs, 1.0, 1.0)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self.map_linear(rhs, 1.0, -1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let dim = self.dim.max(rhs.dim);
        let mut out = Jet2::constant(dim, self.v * rhs.v);
        for i in 0..dim {
            out.g[i] = self.v * rhs.g[i] + rhs.v * self.g[i];
            for j in 0..dim {
                out.h[i][j] = self.v * rhs.h[i][j]
                    + rhs.v * self.h[i][j]
                    + self.g[i] * rhs.g[j]
                    + rhs.g[i] * self.g[j];
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self * -1.0
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.v += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.v -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        let mut out = self;
        out.v *= rhs;
        for i in 0..self.dim {
            out.g[i] *= rhs;
            for j in 0..self.dim {
                out.h[i][j] *= rhs;
            }
        }
        out
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: f64) -> Jet2 {
        self * (1.0 / rhs)
    }
}

impl Real for Jet2 {
    fn cst(&self, value: f64) -> Self {
        Jet2::constant(self.dim, value)
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
    fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }
    fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f<R: Real>(x: R, y: R) -> R {
        x.sin() * y.exp() + (x * x + y * 3.0 + 1.0).sqrt() / y.cosh() - x.sinh() * y
    }

    #[test]
    fn matches_central_differences() {
        let (x0, y0) = (0.3, 0.4);
        let j = f(Jet2::variable(2, 0, x0), Jet2::variable(2, 1, y0));
        assert!((j.v - f(x0, y0)).abs() < 1e-14);
        let h = 1e-4;
        let dx = (f(x0 + h, y0) - f(x0 - h, y0)) / (2.0 * h);
        let dy = (f(x0, y0 + h) - f(x0, y0 - h)) / (2.0 * h);
        let dxx = (f(x0 + h, y0) - 2.0 * f(x0, y0) + f(x0 - h, y0)) / (h * h);
        let dxy = (f(x0 + h, y0 + h) - f(x0 + h, y0 - h) - f(x0 - h, y0 + h) + f(x0 - h, y0 - h)) / (4.0 * h * h);
        assert!((j.g[0] - dx).abs() < 1e-7);
        assert!((j.g[1] - dy).abs() < 1e-7);
        assert!((j.h[0][0] - dxx).abs() < 1e-5);
        assert!((j.h[0][1] - dxy).abs() < 1e-5);
        assert_eq!(j.h[0][1], j.h[1][0]);
    }

    #[test]
    fn quotient_rule() {
        let x = Jet2::variable(1, 0, 2.0);
        let q = x.cst(1.0) / (x * x);
        assert!((q.v - 0.25).abs() < 1e-15);
        assert!((q.g[0] + 0.25).abs() < 1e-15);
        assert!((q.h[0][0] - 0.375).abs() < 1e-15);
    }
}
