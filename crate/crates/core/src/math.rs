//! Float helpers that `core` does not provide without `std`.

pub(crate) use libm::{cos, exp, log, pow, sin, sqrt, tgamma};

pub(crate) fn norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

pub(crate) fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Surface area of the unit sphere `S^{n-1}` in `ℝⁿ`.
pub(crate) fn sphere_area(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * pow(core::f64::consts::PI, half) / tgamma(half)
}
