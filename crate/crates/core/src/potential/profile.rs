//! One-dimensional radial profiles `ρ(r)` with `Ŵ(ξ) = ρ(|ξ|)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::{exp, pow};
use crate::{Error, Result};

/// A radial profile and its first derivative, defined for `r ≥ 0`.
pub trait RadialProfile: Send + Sync {
    fn value(&self, r: f64) -> f64;
    fn derivative(&self, r: f64) -> f64;
}

/// `ρ ≡ a`, the transform of `a δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantProfile(pub f64);

impl RadialProfile for ConstantProfile {
    fn value(&self, _r: f64) -> f64 {
        self.0
    }
    fn derivative(&self, _r: f64) -> f64 {
        0.0
    }
}

/// Shchesnovich-Kraenkel family `ρ(r) = (1 + a r²)^{-b/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShchesnovichKraenkel {
    pub a: f64,
    pub b: f64,
}

impl RadialProfile for ShchesnovichKraenkel {
    fn value(&self, r: f64) -> f64 {
        pow(1.0 + self.a * r * r, -self.b / 2.0)
    }
    fn derivative(&self, r: f64) -> f64 {
        -self.a * self.b * r * pow(1.0 + self.a * r * r, -self.b / 2.0 - 1.0)
    }
}

/// Transform of `δ + ε e^{-|x|²}` in `ℝᴺ`: `1 + ε π^{N/2} e^{-r²/4}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPerturbed {
    pub epsilon: f64,
    pub dim: usize,
}

impl GaussianPerturbed {
    fn amplitude(&self) -> f64 {
        self.epsilon * pow(PI, self.dim as f64 / 2.0)
    }
}

impl RadialProfile for GaussianPerturbed {
    fn value(&self, r: f64) -> f64 {
        1.0 + self.amplitude() * exp(-r * r / 4.0)
    }
    fn derivative(&self, r: f64) -> f64 {
        -0.5 * r * self.amplitude() * exp(-r * r / 4.0)
    }
}

/// `f(r) = A e^{-r²}`, the default perturbation profile in physical space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub amplitude: f64,
}

impl Default for Gaussian {
    fn default() -> Self {
        Self { amplitude: 1.0 }
    }
}

impl RadialProfile for Gaussian {
    fn value(&self, r: f64) -> f64 {
        self.amplitude * exp(-r * r)
    }
    fn derivative(&self, r: f64) -> f64 {
        -2.0 * r * self.amplitude * exp(-r * r)
    }
}

/// Profile given by a pair of closures, for kernels outside the built-in families.
pub struct FnProfile<F, D> {
    value: F,
    derivative: D,
}

impl<F, D> FnProfile<F, D>
where
    F: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    pub fn new(value: F, derivative: D) -> Self {
        Self { value, derivative }
    }
}

impl<F, D> RadialProfile for FnProfile<F, D>
where
    F: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    fn value(&self, r: f64) -> f64 {
        (self.value)(r)
    }
    fn derivative(&self, r: f64) -> f64 {
        (self.derivative)(r)
    }
}

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson)
/// through a tabulated profile.
///
/// Outside the table the profile is extended by constants. A table that
/// starts at `r = 0` gets a zero end slope there, since an even `Ŵ` that is
/// differentiable at the origin has `ρ'(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    r: Vec<f64>,
    rho: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(table: &[(f64, f64)]) -> Result<Self> {
        if table.len() < 2 {
            return Err(Error::InvalidTable("need at least two (r, rho) rows"));
        }
        if table.iter().any(|&(r, rho)| !r.is_finite() || !rho.is_finite()) {
            return Err(Error::InvalidTable("non-finite entry"));
        }
        if table[0].0 < 0.0 {
            return Err(Error::InvalidTable("radii must be nonnegative"));
        }
        if table.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidTable("radii must be strictly increasing"));
        }
        let r: Vec<f64> = table.iter().map(|p| p.0).collect();
        let rho: Vec<f64> = table.iter().map(|p| p.1).collect();
        let n = r.len();
        let h: Vec<f64> = r.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (rho[i + 1] - rho[i]) / h[i]).collect();

        let mut slope = alloc::vec![0.0; n];
        if n == 2 {
            slope[0] = delta[0];
            slope[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    slope[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            slope[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
            slope[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        if r[0] == 0.0 {
            slope[0] = 0.0;
        }
        Ok(Self { r, rho, slope })
    }

    pub fn starts_at_origin(&self) -> bool {
        self.r[0] == 0.0
    }

    fn segment(&self, x: f64) -> usize {
        let idx = self.r.partition_point(|&ri| ri <= x);
        idx.saturating_sub(1).min(self.r.len() - 2)
    }
}

// Three-point end slope, clipped so the interpolant stays monotone.
fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

impl RadialProfile for MonotoneCubic {
    fn value(&self, x: f64) -> f64 {
        let n = self.r.len();
        if x <= self.r[0] {
            return self.rho[0];
        }
        if x >= self.r[n - 1] {
            return self.rho[n - 1];
        }
        let i = self.segment(x);
        let h = self.r[i + 1] - self.r[i];
        let s = (x - self.r[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.rho[i] + h10 * h * self.slope[i] + h01 * self.rho[i + 1] + h11 * h * self.slope[i + 1]
    }

    fn derivative(&self, x: f64) -> f64 {
        let n = self.r.len();
        if x <= self.r[0] || x >= self.r[n - 1] {
            return 0.0;
        }
        let i = self.segment(x);
        let h = self.r[i + 1] - self.r[i];
        let s = (x - self.r[i]) / h;
        let s2 = s * s;
        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (-6.0 * s2 + 6.0 * s) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        d00 * self.rho[i] + d10 * self.slope[i] + d01 * self.rho[i + 1] + d11 * self.slope[i + 1]
    }
}
