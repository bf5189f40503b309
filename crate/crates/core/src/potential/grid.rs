use alloc::vec::Vec;
use core::f64::consts::PI;

use super::PotentialModel;
use crate::math::{cos, exp, log, norm, pow, sin, sqrt};
use crate::{Error, Result};

/// Sampling of `ℝᴺ` used for every "for almost every ξ" condition: points
/// `r·d` for log-spaced radii `r` and unit directions `d`.
///
/// Directions are `n_dir` quasi-uniform points on the sphere (equispaced
/// angles for `N = 2`, a Fibonacci lattice for `N = 3`, normalized
/// low-discrepancy points otherwise) together with the coordinate axes
/// `±eₖ`, where many of the constraints are tightest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub n_dir: usize,
    /// Radii below this are skipped; nonzero for kernels discontinuous at 0.
    pub exclusion_radius: f64,
}

pub const DEFAULT_R_MIN: f64 = 1e-3;
pub const DEFAULT_R_MAX: f64 = 1e3;
pub const DEFAULT_N_R: usize = 200;
pub const DEFAULT_N_DIR: usize = 64;
pub const DEFAULT_EXCLUSION: f64 = 1e-6;

impl GridSpec {
    pub fn new(dim: usize, r_min: f64, r_max: f64, n_r: usize, n_dir: usize, exclusion_radius: f64) -> Result<Self> {
        let g = Self { dim, r_min, r_max, n_r, n_dir, exclusion_radius };
        g.validate()?;
        Ok(g)
    }

    pub fn default_for(model: &PotentialModel) -> Self {
        let exclusion = if model.flags().smooth_at_origin { 0.0 } else { DEFAULT_EXCLUSION };
        Self {
            dim: model.dim(),
            r_min: DEFAULT_R_MIN,
            r_max: DEFAULT_R_MAX,
            n_r: DEFAULT_N_R,
            n_dir: DEFAULT_N_DIR,
            exclusion_radius: exclusion,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidGrid("dimension must be at least 2"));
        }
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(Error::InvalidGrid("need 0 < r_min < r_max < inf"));
        }
        if self.n_r == 0 || self.n_dir == 0 {
            return Err(Error::InvalidGrid("n_r and n_dir must be at least 1"));
        }
        if !(self.exclusion_radius >= 0.0) {
            return Err(Error::InvalidGrid("exclusion radius must be nonnegative"));
        }
        Ok(())
    }

    /// Twice the radii and at least twice the directions. The extra `2·dim`
    /// directions cover the axes appended to the coarse set, so the refined
    /// grid has at least 4x the points.
    pub fn refined(&self) -> Self {
        Self { n_r: 2 * self.n_r, n_dir: 2 * self.n_dir + 2 * self.dim, ..self.clone() }
    }

    pub fn radii(&self) -> Vec<f64> {
        if self.n_r == 1 {
            return alloc::vec![sqrt(self.r_min * self.r_max)];
        }
        let (lo, hi) = (log(self.r_min), log(self.r_max));
        let step = (hi - lo) / (self.n_r - 1) as f64;
        (0..self.n_r)
            .map(|i| exp(lo + step * i as f64))
            .filter(|&r| r >= self.exclusion_radius)
            .collect()
    }

    /// Unit directions, each stored as a `dim`-vector.
    pub fn directions(&self) -> Vec<Vec<f64>> {
        let mut dirs = match self.dim {
            2 => (0..self.n_dir)
                .map(|k| {
                    let th = 2.0 * PI * k as f64 / self.n_dir as f64;
                    alloc::vec![cos(th), sin(th)]
                })
                .collect(),
            3 => fibonacci_sphere(self.n_dir),
            n => quasi_random_sphere(n, self.n_dir),
        };
        for k in 0..self.dim {
            for s in [1.0, -1.0] {
                let mut e = alloc::vec![0.0; self.dim];
                e[k] = s;
                let present = dirs.iter().any(|d| d.iter().zip(&e).all(|(a, b)| (a - b).abs() < 1e-12));
                if !present {
                    dirs.push(e);
                }
            }
        }
        dirs
    }

    /// All grid points, flattened row-major (`len = count * dim`).
    pub fn points(&self) -> Vec<f64> {
        let radii = self.radii();
        let dirs = self.directions();
        let mut out = Vec::with_capacity(radii.len() * dirs.len() * self.dim);
        for d in &dirs {
            for &r in &radii {
                out.extend(d.iter().map(|x| r * x));
            }
        }
        out
    }
}

fn fibonacci_sphere(n: usize) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - sqrt(5.0));
    (0..n)
        .map(|k| {
            let z = 1.0 - (2 * k + 1) as f64 / n as f64;
            let rho = sqrt((1.0 - z * z).max(0.0));
            let phi = golden * k as f64;
            alloc::vec![rho * cos(phi), rho * sin(phi), z]
        })
        .collect()
}

// Additive recurrence with the generalized golden ratio (root of x^{n+1} = x + 1),
// mapped to the cube [-1, 1]^n; points inside the unit ball are projected radially.
fn quasi_random_sphere(dim: usize, n: usize) -> Vec<Vec<f64>> {
    let mut phi = 2.0;
    for _ in 0..64 {
        phi = pow(1.0 + phi, 1.0 / (dim as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=dim).map(|k| pow(1.0 / phi, k as f64) % 1.0).collect();
    let mut out = Vec::with_capacity(n);
    let mut i = 1u64;
    while out.len() < n {
        let v: Vec<f64> = alpha.iter().map(|a| 2.0 * ((0.5 + a * i as f64) % 1.0) - 1.0).collect();
        let len = norm(&v);
        if len > 0.05 && len <= 1.0 {
            out.push(v.iter().map(|x| x / len).collect());
        }
        i += 1;
    }
    out
}
