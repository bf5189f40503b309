//! Sampled validation of the standing hypotheses on `Ŵ`.
//!
//! | name | condition |
//! |------|-----------|
//! | H1 | `Ŵ` even |
//! | H2 | `Ŵ ∈ L∞` (only the transform-level part is checked) |
//! | H3 | `ξⱼ ∂ₖŴ` bounded |
//! | H4 | `Ŵ ≥ 0` |
//! | H5 | `Ŵ` is C² near the origin and `Ŵ(0) > 0` |
//!
//! All checks run on grid samples; a pass is evidence, never a proof.

use alloc::vec::Vec;

use super::{GridSpec, PotentialModel};
use crate::math::norm_sq;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisStatus {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub status: HypothesisStatus,
    /// Worst sampled point (always present on failure).
    pub witness: Option<Vec<f64>>,
    /// Value at the witness.
    pub value: Option<f64>,
    pub note: &'static str,
}

impl HypothesisCheck {
    pub fn passed(&self) -> bool {
        self.status == HypothesisStatus::Pass
    }

    fn verdict(pass: bool, witness: Vec<f64>, value: f64, note: &'static str) -> Self {
        let status = if pass { HypothesisStatus::Pass } else { HypothesisStatus::Fail };
        Self { status, witness: Some(witness), value: Some(value), note }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub evenness: HypothesisCheck,
    pub boundedness: HypothesisCheck,
    pub gradient_boundedness: HypothesisCheck,
    pub nonnegativity: HypothesisCheck,
    pub regularity: HypothesisCheck,
}

impl HypothesisReport {
    /// H1 through H4, the hypotheses every criterion needs.
    pub fn base_hypotheses_hold(&self) -> bool {
        self.evenness.passed()
            && self.boundedness.passed()
            && self.gradient_boundedness.passed()
            && self.nonnegativity.passed()
    }

    pub fn entries(&self) -> [(&'static str, &HypothesisCheck); 5] {
        [
            ("H1", &self.evenness),
            ("H2", &self.boundedness),
            ("H3", &self.gradient_boundedness),
            ("H4", &self.nonnegativity),
            ("H5", &self.regularity),
        ]
    }
}

const EVEN_TOL: f64 = 1e-12;
const NONNEG_TOL: f64 = 1e-12;
/// Max/min ratio between outer-quarter and inner shells that counts as growth.
const GROWTH_FACTOR: f64 = 10.0;
const HESSIAN_SCALES: [f64; 3] = [1e-2, 1e-3, 1e-4];
const HESSIAN_REL_TOL: f64 = 0.05;

pub fn check_hypotheses(model: &PotentialModel, grid: &GridSpec) -> HypothesisReport {
    let dim = model.dim();
    let points = grid.points();
    let radii_per_dir = grid.radii().len().max(1);
    let outer_start = radii_per_dir - radii_per_dir.div_ceil(4);

    let mut even = (0.0f64, 0usize);
    let mut min_w = (f64::INFINITY, 0usize);
    let mut bound = Tail::default();
    let mut grad_bound = Tail::default();
    let mut neg = alloc::vec![0.0; dim];
    let mut finite = true;

    for (idx, xi) in points.chunks_exact(dim).enumerate() {
        let w = model.w_hat(xi);
        neg.iter_mut().zip(xi).for_each(|(n, x)| *n = -x);
        let w_neg = model.w_hat(&neg);
        finite &= w.is_finite() && w_neg.is_finite();
        let asym = (w - w_neg).abs() / (1.0 + w.abs());
        if !(asym <= even.0) {
            even = (asym, idx);
        }
        if !(w >= min_w.0) {
            min_w = (w, idx);
        }
        let outer = idx % radii_per_dir >= outer_start;
        bound.record(w.abs(), idx, outer);

        let grad = model.gradient(xi).unwrap_or_else(|_| alloc::vec![f64::NAN; dim]);
        let worst = xi
            .iter()
            .flat_map(|x| grad.iter().map(move |g| (x * g).abs()))
            .fold(0.0f64, |m, v| if v.is_nan() || v > m { v } else { m });
        grad_bound.record(worst, idx, outer);
    }

    let at = |idx: usize| points[idx * dim..(idx + 1) * dim].to_vec();
    let evenness = HypothesisCheck::verdict(even.0 <= EVEN_TOL, at(even.1), even.0, "max |W(xi) - W(-xi)| / (1 + |W(xi)|)");
    let boundedness = bound.check(finite, &at, "sup |W| finite and not growing in the outer radius shells");
    let gradient_boundedness = grad_bound.check(true, &at, "sup |xi_j d_k W| finite and not growing in the outer radius shells");
    let nonnegativity = HypothesisCheck::verdict(min_w.0 >= -NONNEG_TOL, at(min_w.1), min_w.0, "minimum sampled W");
    let regularity = check_regularity(model);

    HypothesisReport { evenness, boundedness, gradient_boundedness, nonnegativity, regularity }
}

/// Running maxima over the inner radii and over the outer quarter of radii.
#[derive(Default)]
struct Tail {
    inner: Option<(f64, usize)>,
    outer: Option<(f64, usize)>,
}

impl Tail {
    fn record(&mut self, v: f64, idx: usize, outer: bool) {
        let slot = if outer { &mut self.outer } else { &mut self.inner };
        let replace = match *slot {
            None => true,
            Some((best, _)) => !best.is_nan() && (v.is_nan() || v > best),
        };
        if replace {
            *slot = Some((v, idx));
        }
    }

    fn check(&self, finite: bool, at: &dyn Fn(usize) -> Vec<f64>, note: &'static str) -> HypothesisCheck {
        let inner = self.inner.unwrap_or((0.0, 0));
        let outer = self.outer.unwrap_or(inner);
        let worst = if outer.0.is_nan() || outer.0 >= inner.0 { outer } else { inner };
        let finite = finite && inner.0.is_finite() && outer.0.is_finite();
        let growing = outer.0 > GROWTH_FACTOR * inner.0.max(f64::MIN_POSITIVE);
        HypothesisCheck::verdict(finite && !growing, at(worst.1), worst.0, note)
    }
}

/// H5: smooth-at-origin flag, `Ŵ(0) > 0`, and agreement of second-difference
/// Hessians at the origin across shrinking stencils.
fn check_regularity(model: &PotentialModel) -> HypothesisCheck {
    let dim = model.dim();
    let origin = alloc::vec![0.0; dim];
    let Some(w0) = model.w_hat_origin().filter(|_| model.flags().smooth_at_origin) else {
        return HypothesisCheck {
            status: HypothesisStatus::Fail,
            witness: Some(origin),
            value: None,
            note: "W is not continuous at the origin",
        };
    };
    if !(w0 > 0.0) {
        return HypothesisCheck::verdict(false, origin, w0, "W(0) must be positive");
    }

    let hessians: Vec<Vec<f64>> = HESSIAN_SCALES.iter().map(|&h| hessian_at_origin(model, h)).collect();
    let scale = hessians
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-6 * (1.0 + w0.abs());
    let spread = hessians
        .windows(2)
        .flat_map(|pair| pair[0].iter().zip(&pair[1]).map(|(a, b)| (a - b).abs()))
        .fold(0.0f64, |m, d| if m.is_nan() || d.is_nan() { f64::NAN } else { m.max(d) });
    let pass = spread <= HESSIAN_REL_TOL * scale.max(floor) || (scale <= floor && spread <= floor);
    HypothesisCheck::verdict(pass, origin, spread, "max Hessian change across stencils 1e-2, 1e-3, 1e-4")
}

fn hessian_at_origin(model: &PotentialModel, h: f64) -> Vec<f64> {
    let dim = model.dim();
    let w0 = model.w_hat(&alloc::vec![0.0; dim]);
    let eval = |pairs: &[(usize, f64)]| {
        let mut x = alloc::vec![0.0; dim];
        for &(k, v) in pairs {
            x[k] += v;
        }
        if norm_sq(&x) == 0.0 {
            w0
        } else {
            model.w_hat(&x)
        }
    };
    let mut out = alloc::vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let v = if i == j {
                (eval(&[(i, h)]) - 2.0 * w0 + eval(&[(i, -h)])) / (h * h)
            } else {
                (eval(&[(i, h), (j, h)]) - eval(&[(i, h), (j, -h)]) - eval(&[(i, -h), (j, h)])
                    + eval(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h)
            };
            out[i * dim + j] = v;
            out[j * dim + i] = v;
        }
    }
    out
}
