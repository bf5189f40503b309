//! Bogoliubov dispersion relation, sonic speed, and the zero set of the
//! dispersion quartic near the origin.
//!
//! For a speed `c` and an axis `j ∈ {2, …, N}` the slice quartic is
//!
//! ```text
//!     R_j(t, y) = s² + 2 Ŵ(t e₁ + y e_j) s − c² t²,   s = t² + y²,
//! ```
//!
//! whose zero set near the origin consists of two curves `y = γ±(t)`.
//! The limit `ℓ = lim (γ±(t)/t)²` enters the multiplier conditions of the
//! certifier; for kernels that are C² near the origin it equals
//! `α_c = c²/c_s² − 1`.

mod ell;
mod trace;

pub use ell::{check_ell_equality, ell_tolerance, estimate_ell, morse_crosscheck, EllEqualityReport, MorseReport};
pub use trace::{residual_tolerance, trace_gamma, CurveSample, CurveTrace, TraceOptions};

use crate::error::Result;
use crate::math::{norm_sq, sqrt};
use crate::potential::PotentialModel;

/// `ω²(ξ) = |ξ|⁴ + 2Ŵ(ξ)|ξ|²`.
pub fn omega_squared(model: &PotentialModel, xi: &[f64]) -> Result<f64> {
    let w = model.eval_w_hat(xi)?;
    let r2 = norm_sq(xi);
    Ok(r2 * r2 + 2.0 * w * r2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SonicData {
    /// `√(2Ŵ(0))`; `None` when `Ŵ` is discontinuous at the origin or
    /// `Ŵ(0) ≤ 0`.
    pub c_s: Option<f64>,
}

impl SonicData {
    pub fn defined(&self) -> bool {
        self.c_s.is_some()
    }

    /// `α_c = c²/c_s² − 1`.
    pub fn alpha(&self, c: f64) -> Option<f64> {
        self.c_s.map(|cs| c * c / (cs * cs) - 1.0)
    }
}

pub fn sonic_speed(model: &PotentialModel) -> SonicData {
    let c_s = model.w_hat_origin().filter(|w| *w > 0.0).map(|w| sqrt(2.0 * w));
    SonicData { c_s }
}
