//! Speed-by-speed nonexistence decisions.
//!
//! [`Certifier`] samples the kernel once and then runs, for each speed, the
//! cheapest applicable route: the static criterion at `c = 0`, a mismatch of
//! the slice limits `ℓ_{j,c}`, the two closed-form bounds, and finally the
//! multiplier linear program. Every certified verdict lists the assumptions
//! under which the sampled evidence stands in for the a.e. conditions.

mod farkas;
mod radial;
mod sigma;

pub use farkas::{build_farkas_system, dual_closed_forms, sigma2_slacks, FarkasSystem};
pub use radial::{epsilon_bound, radial_inf_ratio, EpsilonBound};
pub use sigma::{
    accept_on_refinement, gradient_bound_factor, gradient_bound_margin, max_grad_scaled, sigma_feasibility,
    verify_sigma, window_inf_ratio, SampledGrid, SigmaCertificate, SigmaCheck, FEASIBILITY_TOL,
};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::dispersion::{check_ell_equality, sonic_speed, EllEqualityReport, SonicData, TraceOptions};
use crate::potential::{check_hypotheses, GridSpec, HypothesisReport, PotentialModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    CertifiedNonexistence,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::CertifiedNonexistence => "certified-nonexistence",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    StaticC0,
    CorollaryGradient,
    CorollaryWindow,
    LpSigma,
    EllMismatch,
    None,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::StaticC0 => "static-c0",
            Route::CorollaryGradient => "corollary-gradient",
            Route::CorollaryWindow => "corollary-window",
            Route::LpSigma => "lp-sigma",
            Route::EllMismatch => "ell-mismatch",
            Route::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Assumption {
    /// Conditions required for a.e. `ξ` were checked on a finite grid.
    GridSampled,
    /// The zero set of the slice quartic near the origin is Lebesgue-null.
    H6MeasureZero,
    /// `ℓ` is the C² prediction `α_c`, cross-checked against tracing.
    EllFromMorse,
    /// `ℓ` is an extrapolated limit of traced curves.
    EllFromExtrapolation,
    /// A base hypothesis failed its grid check and was overridden.
    HypothesisOverridden(&'static str),
}

impl Assumption {
    pub fn describe(&self) -> String {
        match self {
            Assumption::GridSampled => "grid-sampled conditions".into(),
            Assumption::H6MeasureZero => "H6 measure-zero assumed".into(),
            Assumption::EllFromMorse => "ell from Morse value alpha_c".into(),
            Assumption::EllFromExtrapolation => "ell from extrapolation".into(),
            Assumption::HypothesisOverridden(h) => format!("{h} failed on grid; overridden"),
        }
    }
}

/// Record of a scalar closed-form test.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormCheck {
    pub check: &'static str,
    /// Signed margin; nonnegative when the check passes.
    pub margin: f64,
    pub witness: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evidence {
    Sigma(SigmaCertificate),
    EllEquality(EllEqualityReport),
    ClosedForm(ClosedFormCheck),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedVerdict {
    pub c: f64,
    pub status: Status,
    pub route: Route,
    /// The `ℓ` used by the multiplier routes.
    pub ell: Option<f64>,
    pub evidence: Option<Evidence>,
    pub assumptions: Vec<Assumption>,
    /// Why no route applied, or notes on fallbacks taken.
    pub diagnostics: Vec<String>,
}

impl SpeedVerdict {
    fn inconclusive(c: f64, diagnostic: String) -> Self {
        Self {
            c,
            status: Status::Inconclusive,
            route: Route::None,
            ell: None,
            evidence: None,
            assumptions: Vec::new(),
            diagnostics: alloc::vec![diagnostic],
        }
    }

    pub fn is_certified(&self) -> bool {
        self.status == Status::CertifiedNonexistence
    }

    pub fn sigma(&self) -> Option<&[f64]> {
        match &self.evidence {
            Some(Evidence::Sigma(cert)) => Some(&cert.sigma),
            _ => None,
        }
    }

    pub fn grid_margin(&self) -> Option<f64> {
        match &self.evidence {
            Some(Evidence::Sigma(cert)) => Some(cert.grid_margin),
            Some(Evidence::ClosedForm(check)) => Some(check.margin),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CertifyOptions {
    /// Constraint grid; defaults to [`GridSpec::default_for`].
    pub grid: Option<GridSpec>,
    pub trace: TraceOptions,
    /// Continue when H1-H4 fail their grid checks, recording the override.
    pub allow_hypothesis_failure: bool,
}

const MORSE_AGREE: f64 = 1e-3;
const MORSE_TOLERATE: f64 = 1e-2;

/// Speed-independent data for one kernel: hypotheses, sampled grids and
/// the closed-form bounds.
#[derive(Debug, Clone)]
pub struct Certifier {
    model: PotentialModel,
    opts: CertifyOptions,
    hypotheses: HypothesisReport,
    sonic: SonicData,
    coarse: SampledGrid,
    fine: SampledGrid,
    /// `inf ρ/(|ρ′|r)` for radial kernels.
    radial_ratio: Option<f64>,
    gradient_margin: f64,
    window_m: f64,
}

impl Certifier {
    pub fn new(model: PotentialModel, opts: CertifyOptions) -> Self {
        let spec = opts.grid.clone().unwrap_or_else(|| GridSpec::default_for(&model));
        let hypotheses = check_hypotheses(&model, &spec);
        let sonic = sonic_speed(&model);
        let coarse = SampledGrid::new(&model, &spec);
        let fine = SampledGrid::new(&model, &spec.refined());
        let radial_ratio = radial_inf_ratio(&model).ok();
        let kappa = gradient_bound_factor(model.dim());
        let (gradient_margin, window_m) = match radial_ratio {
            // radial reductions of both bounds
            Some(q) => (if q.is_infinite() { f64::INFINITY } else { q - kappa }, q),
            None => (gradient_bound_margin(&coarse), window_inf_ratio(&coarse)),
        };
        Self { model, opts, hypotheses, sonic, coarse, fine, radial_ratio, gradient_margin, window_m }
    }

    pub fn model(&self) -> &PotentialModel {
        &self.model
    }

    pub fn hypotheses(&self) -> &HypothesisReport {
        &self.hypotheses
    }

    pub fn sonic(&self) -> SonicData {
        self.sonic
    }

    pub fn grid(&self) -> &SampledGrid {
        &self.coarse
    }

    pub fn radial_ratio(&self) -> Option<f64> {
        self.radial_ratio
    }

    pub fn gradient_bound_holds(&self) -> bool {
        self.gradient_margin >= -FEASIBILITY_TOL
    }

    /// `m` of the speed window: certified when `ℓ ≤ m`.
    pub fn window_bound(&self) -> f64 {
        self.window_m
    }

    fn base_assumptions(&self) -> Result<Vec<Assumption>, String> {
        let mut out = Vec::new();
        for (label, check) in self.hypotheses.entries().into_iter().take(4) {
            if !check.passed() {
                if self.opts.allow_hypothesis_failure {
                    out.push(Assumption::HypothesisOverridden(label));
                } else {
                    return Err(format!("hypothesis {label} failed: {}", check.note));
                }
            }
        }
        Ok(out)
    }

    pub fn certify(&self, c: f64) -> SpeedVerdict {
        if !(c >= 0.0 && c.is_finite()) {
            return SpeedVerdict::inconclusive(c, format!("speed {c} must be finite and nonnegative"));
        }
        let mut assumptions = match self.base_assumptions() {
            Ok(a) => a,
            Err(reason) => return SpeedVerdict::inconclusive(c, reason),
        };
        if c == 0.0 {
            let mut v = self.check_static();
            assumptions.append(&mut v.assumptions);
            v.assumptions = assumptions;
            return v;
        }
        if let Some(c_s) = self.sonic.c_s {
            if c <= c_s {
                return SpeedVerdict::inconclusive(c, format!("c = {c} is not above the sonic speed {c_s}"));
            }
        }

        let mut diagnostics = Vec::new();
        assumptions.push(Assumption::H6MeasureZero);
        let ell = match self.determine_ell(c, &mut assumptions, &mut diagnostics) {
            EllChoice::Value(ell) => ell,
            EllChoice::Mismatch(report) => {
                return SpeedVerdict {
                    c,
                    status: Status::CertifiedNonexistence,
                    route: Route::EllMismatch,
                    ell: None,
                    evidence: Some(Evidence::EllEquality(report)),
                    assumptions,
                    diagnostics,
                };
            }
            EllChoice::Fail(reason) => {
                diagnostics.push(reason);
                return SpeedVerdict { diagnostics, ..SpeedVerdict::inconclusive(c, String::new()) };
            }
        };
        assumptions.push(Assumption::GridSampled);
        let certified = |route, evidence, assumptions, diagnostics| SpeedVerdict {
            c,
            status: Status::CertifiedNonexistence,
            route,
            ell: Some(ell),
            evidence: Some(evidence),
            assumptions,
            diagnostics,
        };

        if self.gradient_bound_holds() {
            let check = ClosedFormCheck { check: "gradient bound", margin: self.gradient_margin, witness: None };
            return certified(Route::CorollaryGradient, Evidence::ClosedForm(check), assumptions, diagnostics);
        }
        if ell <= self.window_m * (1.0 + 1e-12) {
            let check = ClosedFormCheck { check: "speed window", margin: self.window_m - ell, witness: None };
            return certified(Route::CorollaryWindow, Evidence::ClosedForm(check), assumptions, diagnostics);
        }
        match sigma_feasibility(ell, &self.coarse) {
            Some(mut cert) => {
                let fine = verify_sigma(ell, &cert.sigma, &self.fine);
                if accept_on_refinement(&fine) {
                    cert.grid_margin = cert.grid_margin.min(fine.margin);
                    cert.verified_on = self.fine.spec.clone();
                    return certified(Route::LpSigma, Evidence::Sigma(cert), assumptions, diagnostics);
                }
                diagnostics.push(format!(
                    "multiplier found on the constraint grid fails on the refined grid (margin {:e})",
                    fine.normalized_margin
                ));
            }
            None => diagnostics.push(format!("multiplier conditions infeasible on the grid for ell = {ell}")),
        }
        SpeedVerdict {
            c,
            status: Status::Inconclusive,
            route: Route::None,
            ell: Some(ell),
            evidence: None,
            assumptions: Vec::new(),
            diagnostics,
        }
    }

    fn determine_ell(&self, c: f64, assumptions: &mut Vec<Assumption>, diagnostics: &mut Vec<String>) -> EllChoice {
        let traced = check_ell_equality(&self.model, c, &self.opts.trace);
        let alpha = if self.hypotheses.regularity.passed() { self.sonic.alpha(c) } else { None };
        if let Some(alpha) = alpha {
            let report = match traced {
                Ok(r) => r,
                Err(e) => {
                    diagnostics.push(format!("curve tracing failed ({e}); using alpha_c"));
                    assumptions.push(Assumption::EllFromMorse);
                    return EllChoice::Value(alpha);
                }
            };
            let scale = alpha.abs().max(1.0);
            let diff = report.ells.iter().fold(0.0f64, |m, l| m.max((l - alpha).abs()));
            if diff <= MORSE_AGREE * scale {
                assumptions.push(Assumption::EllFromMorse);
                EllChoice::Value(alpha)
            } else if diff <= MORSE_TOLERATE * scale && report.equal {
                diagnostics.push(format!("traced ell differs from alpha_c by {diff:e}; using traced value"));
                assumptions.push(Assumption::EllFromExtrapolation);
                EllChoice::Value(mean(&report.ells))
            } else {
                EllChoice::Fail(format!("traced ell {:?} disagrees with alpha_c = {alpha}", report.ells))
            }
        } else {
            let report = match traced {
                Ok(r) => r,
                Err(e) => return EllChoice::Fail(format!("curve tracing failed: {e}")),
            };
            assumptions.push(Assumption::EllFromExtrapolation);
            if !report.all_positive {
                return EllChoice::Fail(format!("traced ell {:?} not all positive", report.ells));
            }
            if !report.equal {
                return EllChoice::Mismatch(report);
            }
            EllChoice::Value(mean(&report.ells))
        }
    }

    /// Nonexistence at `c = 0`: `ξₖ∂ₖŴ ≤ 0` for every `k`, checked through
    /// `ρ′ ≤ 0` for radial kernels.
    pub fn check_static(&self) -> SpeedVerdict {
        let (margin, witness) = match self.model.radial_profile() {
            Some(profile) => {
                let mut worst = f64::NEG_INFINITY;
                let mut at = None;
                for r in self.coarse.spec.radii() {
                    let d = profile.derivative(r);
                    if !(d <= worst) {
                        worst = d;
                        at = Some(r);
                    }
                }
                (0.0 - worst, at.map(|r| alloc::vec![r]))
            }
            None => {
                let (worst, at) = max_grad_scaled(&self.coarse);
                (0.0 - worst, at.map(|i| self.coarse.point(i).to_vec()))
            }
        };
        let passes = margin >= -FEASIBILITY_TOL;
        let evidence = ClosedFormCheck { check: "nonpositive radial derivative", margin, witness };
        if passes {
            SpeedVerdict {
                c: 0.0,
                status: Status::CertifiedNonexistence,
                route: Route::StaticC0,
                ell: None,
                evidence: Some(Evidence::ClosedForm(ClosedFormCheck { witness: None, ..evidence })),
                assumptions: alloc::vec![Assumption::GridSampled],
                diagnostics: Vec::new(),
            }
        } else {
            SpeedVerdict {
                evidence: Some(Evidence::ClosedForm(evidence)),
                ..SpeedVerdict::inconclusive(0.0, "a scaled gradient component is positive".into())
            }
        }
    }
}

enum EllChoice {
    Value(f64),
    Mismatch(EllEqualityReport),
    Fail(String),
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// `c = 0` criterion on the default grid of `model`.
pub fn check_static(model: &PotentialModel, grid: &GridSpec) -> SpeedVerdict {
    let opts = CertifyOptions { grid: Some(grid.clone()), ..Default::default() };
    Certifier::new(model.clone(), opts).check_static()
}

/// `Ŵ ≥ max{1, 2/(N−1)} Σ_{k≥2}|ξₖ∂ₖŴ| + |ξ₁∂₁Ŵ|`, through `ρ/(|ρ′|r)` for
/// radial kernels and on `grid` otherwise.
pub fn corollary_gradient_bound(model: &PotentialModel, grid: &GridSpec) -> bool {
    let kappa = gradient_bound_factor(model.dim());
    match radial_inf_ratio(model) {
        Ok(q) => q >= kappa - FEASIBILITY_TOL,
        Err(_) => gradient_bound_margin(&SampledGrid::new(model, grid)) >= -FEASIBILITY_TOL,
    }
}

/// `α_c ≤ m` with `m = inf (N−1)Ŵ / Σ_{k≥2}|ξₖ∂ₖŴ|` (`m = inf ρ/(|ρ′|r)` for
/// radial kernels). False when `c_s` is undefined or `c ≤ c_s`.
pub fn corollary_speed_window(model: &PotentialModel, c: f64, grid: &GridSpec) -> bool {
    let sonic = sonic_speed(model);
    let (Some(c_s), Some(alpha)) = (sonic.c_s, sonic.alpha(c)) else {
        return false;
    };
    if c <= c_s {
        return false;
    }
    let m = match radial_inf_ratio(model) {
        Ok(q) => q,
        Err(_) => window_inf_ratio(&SampledGrid::new(model, grid)),
    };
    alpha <= m * (1.0 + 1e-12)
}

pub fn certify_speed(model: &PotentialModel, c: f64, opts: &CertifyOptions) -> SpeedVerdict {
    Certifier::new(model.clone(), opts.clone()).certify(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub c_grid: Vec<f64>,
    pub verdicts: Vec<SpeedVerdict>,
    /// `[lo, hi]` for each maximal run of consecutive certified speeds.
    pub certified_intervals: Vec<(f64, f64)>,
    pub hypotheses: HypothesisReport,
    pub sonic: SonicData,
}

impl SweepReport {
    pub fn from_verdicts(certifier: &Certifier, verdicts: Vec<SpeedVerdict>) -> Self {
        let c_grid: Vec<f64> = verdicts.iter().map(|v| v.c).collect();
        let certified_intervals = certified_intervals(&verdicts);
        Self {
            c_grid,
            verdicts,
            certified_intervals,
            hypotheses: certifier.hypotheses().clone(),
            sonic: certifier.sonic(),
        }
    }
}

/// Maximal runs of consecutive certified verdicts, as `(first c, last c)`.
pub fn certified_intervals(verdicts: &[SpeedVerdict]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut run: Option<(f64, f64)> = None;
    for v in verdicts {
        if v.is_certified() {
            run = Some(match run {
                Some((lo, _)) => (lo, v.c),
                None => (v.c, v.c),
            });
        } else if let Some(r) = run.take() {
            out.push(r);
        }
    }
    out.extend(run);
    out
}

pub fn sweep(model: &PotentialModel, c_grid: &[f64], opts: &CertifyOptions) -> SweepReport {
    let certifier = Certifier::new(model.clone(), opts.clone());
    let verdicts = c_grid.iter().map(|&c| certifier.certify(c)).collect();
    SweepReport::from_verdicts(&certifier, verdicts)
}
