use alloc::vec::Vec;

use super::trace::{trace_gamma, CurveTrace, TraceOptions};
use super::sonic_speed;
use crate::error::{Error, Result};
use crate::potential::PotentialModel;

/// Tolerance for comparing two values of `ℓ`: relative `1e-3`, absolute
/// floor `1e-6`.
pub fn ell_tolerance(a: f64, b: f64) -> f64 {
    (1e-3 * a.abs().max(b.abs())).max(1e-6)
}

/// Extrapolated `ℓ_{j,c}`; both branches must give the same limit.
pub fn estimate_ell(trace: &CurveTrace) -> Result<f64> {
    if trace.samples.len() < 4 || !trace.ell_estimate.is_finite() {
        return Err(Error::InsufficientSamples { needed: 4, got: trace.samples.len() });
    }
    let last = trace.samples.last().expect("checked above");
    let (plus, minus) = (last.ratio_sq_plus(), last.ratio_sq_minus());
    if trace.branch_agreement > ell_tolerance(plus, minus) {
        return Err(Error::BranchMismatch { plus, minus });
    }
    Ok(trace.ell_estimate)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorseReport {
    /// `α_c`.
    pub predicted: f64,
    /// Traced `ℓ_{j,c}` for `j = 2..=N`.
    pub traced: Vec<f64>,
    pub max_abs_diff: f64,
}

/// Compares the traced limits with `α_c`, which they must equal when `Ŵ` is
/// C² near the origin.
pub fn morse_crosscheck(model: &PotentialModel, c: f64, opts: &TraceOptions) -> Result<MorseReport> {
    let sonic = sonic_speed(model);
    let c_s = sonic.c_s.ok_or(Error::SonicSpeedUndefined)?;
    if !(c > c_s) {
        return Err(Error::SubsonicSpeed { c, c_s });
    }
    let predicted = c * c / (c_s * c_s) - 1.0;
    let traced = traced_ells(model, c, opts)?;
    let max_abs_diff = traced.iter().fold(0.0f64, |m, l| m.max((l - predicted).abs()));
    Ok(MorseReport { predicted, traced, max_abs_diff })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllEqualityReport {
    /// `ℓ_{j,c}` for `j = 2..=N`.
    pub ells: Vec<f64>,
    pub all_positive: bool,
    pub equal: bool,
    pub max_spread: f64,
}

impl EllEqualityReport {
    pub fn from_ells(ells: Vec<f64>) -> Self {
        let lo = ells.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ells.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let max_spread = if ells.is_empty() { 0.0 } else { hi - lo };
        let equal = ells.is_empty() || max_spread <= ell_tolerance(lo, hi);
        let all_positive = ells.iter().all(|l| *l > 0.0);
        Self { ells, all_positive, equal, max_spread }
    }

    /// Distinct positive limits rule out nontrivial traveling waves.
    pub fn mismatch_certifies(&self) -> bool {
        self.all_positive && !self.equal
    }
}

pub fn check_ell_equality(model: &PotentialModel, c: f64, opts: &TraceOptions) -> Result<EllEqualityReport> {
    Ok(EllEqualityReport::from_ells(traced_ells(model, c, opts)?))
}

fn traced_ells(model: &PotentialModel, c: f64, opts: &TraceOptions) -> Result<Vec<f64>> {
    (2..=model.dim()).map(|j| estimate_ell(&trace_gamma(model, j, c, opts)?)).collect()
}
