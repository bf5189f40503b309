use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::extrapolate::richardson;
use crate::potential::PotentialModel;
use crate::roots::{bracketed_newton, first_sign_change, RootOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub t_max: f64,
    pub t_min: f64,
    /// Samples `t_k = t_max 2^{-k}`, `k < n`, stopping early below `t_min`.
    pub n: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { t_max: 0.3, t_min: 1e-4, n: 12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub t: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub residual_plus: f64,
    pub residual_minus: f64,
}

impl CurveSample {
    pub fn ratio_sq_plus(&self) -> f64 {
        let q = self.gamma_plus / self.t;
        q * q
    }

    pub fn ratio_sq_minus(&self) -> f64 {
        let q = self.gamma_minus / self.t;
        q * q
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTrace {
    /// 1-based axis index in `2..=N`.
    pub j: usize,
    pub c: f64,
    /// Ordered by strictly decreasing `t`.
    pub samples: Vec<CurveSample>,
    /// Extrapolated limit of `(γ⁺/t)²`; NaN with fewer than 4 samples.
    pub ell_estimate: f64,
    /// Last-step change of the extrapolation, worst of both branches.
    pub ell_error: f64,
    /// `|(γ⁺/t)² − (γ⁻/t)²|` at the smallest `t`.
    pub branch_agreement: f64,
}

/// Largest `|R_j|` accepted at a kept sample.
pub fn residual_tolerance(t: f64, c: f64) -> f64 {
    1e-10 * (1.0 + t * t * t * t + c * c * t * t)
}

const EXPANSIONS: usize = 8;
const FIRST_SCAN_CELLS: usize = 256;
const CONTINUATION_CELLS: usize = 64;
const T_MAX_HALVINGS: usize = 20;
const MAX_RATIO_JUMP: f64 = 0.5;
/// Sub-steps used to confirm a suspicious jump between grid points.
const CONFIRM_STEPS: usize = 32;

struct Slice<'a> {
    model: &'a PotentialModel,
    axis: usize,
    c: f64,
    xi: Vec<f64>,
}

impl Slice<'_> {
    /// `(R_j(t, y), ∂_y R_j(t, y))`.
    fn eval(&mut self, t: f64, y: f64) -> (f64, f64) {
        self.xi[0] = t;
        self.xi[self.axis] = y;
        let w = self.model.w_hat(&self.xi);
        let dw = self.model.gradient(&self.xi).map(|g| g[self.axis]).unwrap_or(f64::NAN);
        let s = t * t + y * y;
        let r = s * s + 2.0 * w * s - self.c * self.c * t * t;
        let dr = 4.0 * s * y + 2.0 * dw * s + 4.0 * w * y;
        (r, dr)
    }

    /// Smallest root `u > 0` of `R_j(t, sign·u)` below `cap`, expanding the
    /// cap by doubling when no sign change is found.
    fn root(&mut self, t: f64, sign: f64, mut cap: f64, cells: usize) -> Option<f64> {
        let (r0, _) = self.eval(t, 0.0);
        if !(r0 < 0.0) {
            return None;
        }
        for _ in 0..=EXPANSIONS {
            let bracket = first_sign_change(|u| self.eval(t, sign * u).0, 0.0, cap, cells);
            if let Some((lo, hi)) = bracket {
                let g = |u: f64| {
                    let (r, dr) = self.eval(t, sign * u);
                    (r, sign * dr)
                };
                return bracketed_newton(g, lo, hi, &RootOptions::default()).ok();
            }
            cap *= 2.0;
        }
        None
    }

    /// Walks the smallest root from `(t0, y0)` to `t1` in small geometric
    /// steps. A continuous branch never moves `y/t` by more than
    /// `MAX_RATIO_JUMP` within one sub-step.
    fn continuous(&mut self, t0: f64, y0: f64, t1: f64, sign: f64) -> bool {
        let step = libm::pow(t1 / t0, 1.0 / CONFIRM_STEPS as f64);
        let (mut t, mut y) = (t0, y0);
        for _ in 0..CONFIRM_STEPS {
            let seed = y * step;
            t *= step;
            match self.root(t, sign, 4.0 * seed, CONTINUATION_CELLS) {
                Some(next) if (next / seed - 1.0).abs() <= MAX_RATIO_JUMP => y = next,
                _ => return false,
            }
        }
        true
    }
}

/// Traces `γ±_{j,c}` on the geometric grid of `opts`, seeding each root from
/// the previous one. When the quartic has no root at `t_max` (speeds just
/// above `c_s`) the starting point is halved until one appears.
pub fn trace_gamma(model: &PotentialModel, j: usize, c: f64, opts: &TraceOptions) -> Result<CurveTrace> {
    let dim = model.dim();
    if !(2..=dim).contains(&j) {
        return Err(Error::InvalidParameter { name: "axis".into(), reason: alloc::format!("must lie in 2..={dim}") });
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter { name: "c".into(), reason: "must be positive and finite".into() });
    }
    if !(opts.t_min > 0.0 && opts.t_min < opts.t_max && opts.t_max.is_finite() && opts.n > 0) {
        return Err(Error::InvalidParameter {
            name: "trace options".into(),
            reason: "need 0 < t_min < t_max and n > 0".into(),
        });
    }
    let axis = j - 1;
    let mut slice = Slice { model, axis, c, xi: alloc::vec![0.0; dim] };

    let mut t = opts.t_max;
    let mut first = None;
    for _ in 0..=T_MAX_HALVINGS {
        if t < opts.t_min {
            break;
        }
        let plus = slice.root(t, 1.0, c, FIRST_SCAN_CELLS);
        let minus = slice.root(t, -1.0, c, FIRST_SCAN_CELLS);
        if let (Some(p), Some(m)) = (plus, minus) {
            first = Some((p, m));
            break;
        }
        t *= 0.5;
    }
    let Some((mut yp, mut ym)) = first else {
        return Err(Error::NoRoot { axis: j, c, t: opts.t_max });
    };

    let mut samples = Vec::with_capacity(opts.n);
    let mut prev_t = t;
    for k in 0..opts.n {
        if k > 0 {
            t *= 0.5;
            if t < opts.t_min {
                break;
            }
            let scale = t / prev_t;
            let jump = |new: f64, seed: f64| (new / seed - 1.0).abs() > MAX_RATIO_JUMP;
            let (seed_p, seed_m) = (yp * scale, ym * scale);
            yp = slice.root(t, 1.0, 4.0 * seed_p, CONTINUATION_CELLS).ok_or(Error::NoRoot { axis: j, c, t })?;
            ym = slice.root(t, -1.0, 4.0 * seed_m, CONTINUATION_CELLS).ok_or(Error::NoRoot { axis: j, c, t })?;
            for (y, seed, sign) in [(yp, seed_p, 1.0), (ym, seed_m, -1.0)] {
                if jump(y, seed) && !slice.continuous(prev_t, seed / scale, t, sign) {
                    return Err(Error::LostBranch { axis: j, c, t });
                }
            }
        }
        let residual_plus = slice.eval(t, yp).0;
        let residual_minus = slice.eval(t, -ym).0;
        let tol = residual_tolerance(t, c);
        for residual in [residual_plus, residual_minus] {
            if !(residual.abs() <= tol) {
                return Err(Error::ResidualTooLarge { axis: j, c, t, residual });
            }
        }
        samples.push(CurveSample { t, gamma_plus: yp, gamma_minus: -ym, residual_plus, residual_minus });
        prev_t = t;
    }

    let plus: Vec<f64> = samples.iter().map(CurveSample::ratio_sq_plus).collect();
    let minus: Vec<f64> = samples.iter().map(CurveSample::ratio_sq_minus).collect();
    let (ell_estimate, ell_error) = match (richardson(&plus, 4.0, 3), richardson(&minus, 4.0, 3)) {
        (Some(p), Some(m)) => (p.value, p.error.max(m.error)),
        _ => (f64::NAN, f64::NAN),
    };
    let last = samples.last().expect("at least one sample is kept");
    let branch_agreement = (last.ratio_sq_plus() - last.ratio_sq_minus()).abs();
    Ok(CurveTrace { j, c, samples, ell_estimate, ell_error, branch_agreement })
}
