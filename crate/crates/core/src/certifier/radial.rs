use crate::error::{Error, Result};
use crate::math::{exp, log, sphere_area, sqrt};
use crate::potential::{PotentialModel, RadialProfile};
use crate::quadrature::{integrate_to_infinity, QuadOptions};

const SCAN_POINTS: usize = 4000;
const SCAN_LOG_MIN: f64 = -6.0;
const SCAN_LOG_MAX: f64 = 6.0;
const TAIL_DECADES: i32 = 12;
/// A tail decaying at least like `r^{-1/2}` is taken to reach zero.
const TAIL_SLOPE: f64 = -0.5;

fn ratio(profile: &dyn RadialProfile, r: f64) -> f64 {
    let d = profile.derivative(r);
    if d == 0.0 {
        return if profile.value(r) == 0.0 { f64::NAN } else { f64::INFINITY };
    }
    profile.value(r) / (d.abs() * r)
}

fn ratio_at_log(profile: &dyn RadialProfile, x: f64) -> f64 {
    ratio(profile, exp(x))
}

/// `inf_{r>0} ρ(r) / (|ρ′(r)| r)` for a radial kernel `Ŵ(ξ) = ρ(|ξ|)`.
///
/// Scans a log-spaced grid, refines the smallest sample by golden-section
/// search in `log r`, and inspects the decades `10^{±k}` up to `k = 12` for
/// an infimum approached at the ends. Points where both `ρ` and `ρ′` vanish
/// or are not finite are skipped. Returns `+∞` when `ρ′ ≡ 0`.
pub fn radial_inf_ratio(model: &PotentialModel) -> Result<f64> {
    let profile = model.radial_profile().ok_or(Error::NonRadialModel)?;
    Ok(profile_inf_ratio(profile))
}

pub(crate) fn profile_inf_ratio(profile: &dyn RadialProfile) -> f64 {
    let step = (SCAN_LOG_MAX - SCAN_LOG_MIN) * core::f64::consts::LN_10 / (SCAN_POINTS - 1) as f64;
    let x0 = SCAN_LOG_MIN * core::f64::consts::LN_10;
    let mut best = f64::INFINITY;
    let mut best_i = None;
    for i in 0..SCAN_POINTS {
        let q = ratio_at_log(profile, x0 + step * i as f64);
        if q < best {
            best = q;
            best_i = Some(i);
        }
    }
    if let Some(i) = best_i {
        let lo = x0 + step * i.saturating_sub(1) as f64;
        let hi = x0 + step * (i + 1).min(SCAN_POINTS - 1) as f64;
        best = best.min(golden_min(|x| ratio_at_log(profile, x), lo, hi));
    }

    for k in 0..=TAIL_DECADES {
        for r in [libm::pow(10.0, k as f64), libm::pow(10.0, -k as f64)] {
            let q = ratio(profile, r);
            if q < best {
                best = q;
            }
        }
    }
    // ratio still falling like a power at the far end: the infimum is 0
    let tail: alloc::vec::Vec<(f64, f64)> = (0..=TAIL_DECADES)
        .map(|k| libm::pow(10.0, k as f64))
        .map(|r| (r, ratio(profile, r)))
        .filter(|(_, q)| q.is_finite() && *q > 0.0)
        .collect();
    if let [.., (r1, q1), (r2, q2)] = tail[..] {
        let slope = (log(q2) - log(q1)) / (log(r2) - log(r1));
        if slope <= TAIL_SLOPE {
            best = best.min(0.0);
        }
    }
    best
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut best = fc.min(fd);
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        best = best.min(fc).min(fd);
    }
    best
}

/// Smallness threshold for a perturbation `W = δ + εf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonBound {
    /// `(4‖f‖₁ + Σₖ‖xₖ∂ₖf‖₁)^{-1}`.
    pub bound: f64,
    pub l1_norm: f64,
    /// `Σₖ‖xₖ∂ₖf‖₁ = ‖ |x| f′(|x|) ‖₁`.
    pub moment_sum: f64,
    /// `∫f`, which equals `f̂(0)`.
    pub integral: f64,
}

impl EpsilonBound {
    /// `c_s = (2 + 2ε∫f)^{1/2}`.
    pub fn sonic_speed(&self, epsilon: f64) -> f64 {
        sqrt(2.0 + 2.0 * epsilon * self.integral)
    }
}

/// Norms of a radial perturbation `f(x) = φ(|x|)` in `ℝᴺ` by adaptive
/// quadrature on `[0, ∞)`.
pub fn epsilon_bound(f: &dyn RadialProfile, dim: usize) -> Result<EpsilonBound> {
    if dim < 2 {
        return Err(Error::InvalidParameter { name: "dim".into(), reason: "must be at least 2".into() });
    }
    let area = sphere_area(dim);
    let n = dim as i32;
    let opts = QuadOptions { rel_tol: 1e-10, abs_tol: 1e-14, max_intervals: 4000 };
    let quad = |g: &dyn Fn(f64) -> f64| -> Result<f64> {
        let q = integrate_to_infinity(g, 0.0, &opts).map_err(|_| Error::DivergentQuadrature)?;
        // the substitution maps non-finite integrand values to 0; catch a
        // tail that is still heavy far out
        let far = 1e8;
        let tail = g(far) * far;
        if !(tail.abs() <= 1e-6 * (1.0 + q.value.abs())) {
            return Err(Error::DivergentQuadrature);
        }
        Ok(q.value)
    };
    let l1 = area * quad(&|r| f.value(r).abs() * libm::pow(r, (n - 1) as f64))?;
    let integral = area * quad(&|r| f.value(r) * libm::pow(r, (n - 1) as f64))?;
    let moment_sum = area * quad(&|r| f.derivative(r).abs() * libm::pow(r, n as f64))?;
    let denom = 4.0 * l1 + moment_sum;
    let bound = if denom > 0.0 { 1.0 / denom } else { f64::INFINITY };
    Ok(EpsilonBound { bound, l1_norm: l1, moment_sum, integral })
}
