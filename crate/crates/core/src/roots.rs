//! Safeguarded Newton iteration inside a sign-change bracket.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Stop when the step is below `x_rel_tol * |x|` (plus `x_abs_tol`).
    pub x_rel_tol: f64,
    pub x_abs_tol: f64,
    /// Stop as soon as `|f(x)| <= f_tol`.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { x_rel_tol: 4.0 * f64::EPSILON, x_abs_tol: 0.0, f_tol: 0.0, max_iter: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootError {
    /// `f(lo)` and `f(hi)` have the same strict sign.
    NoBracket { f_lo: f64, f_hi: f64 },
    NotFinite { x: f64 },
    MaxIterations { x: f64 },
}

/// Root of `f` in `[lo, hi]`, where `f` returns `(value, derivative)`.
///
/// Newton steps are taken when they stay inside the current bracket and
/// shrink it fast enough; otherwise the bracket is bisected.
pub fn bracketed_newton<F>(mut f: F, lo: f64, hi: f64, opts: &RootOptions) -> Result<f64, RootError>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if !f_lo.is_finite() {
        return Err(RootError::NotFinite { x: lo });
    }
    if !f_hi.is_finite() {
        return Err(RootError::NotFinite { x: hi });
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(RootError::NoBracket { f_lo, f_hi });
    }
    // orient so that f(neg) < 0 < f(pos)
    let (mut neg, mut pos) = if f_lo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);

    for _ in 0..opts.max_iter {
        if !fx.is_finite() {
            return Err(RootError::NotFinite { x });
        }
        if fx.abs() <= opts.f_tol || fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
        let newton_leaves_bracket = ((x - pos) * dfx - fx) * ((x - neg) * dfx - fx) > 0.0;
        let newton_too_slow = (2.0 * fx).abs() > (dx_old * dfx).abs();
        dx_old = dx;
        if newton_leaves_bracket || newton_too_slow || dfx == 0.0 || !dfx.is_finite() {
            dx = 0.5 * (pos - neg);
            x = neg + dx;
        } else {
            dx = fx / dfx;
            x -= dx;
        }
        let tol = opts.x_rel_tol * x.abs() + opts.x_abs_tol;
        if dx.abs() <= tol || (pos - neg).abs() <= tol {
            return Ok(x);
        }
        (fx, dfx) = f(x);
    }
    Err(RootError::MaxIterations { x })
}

/// Smallest sub-interval of `[lo, hi]` (split into `n` equal cells) on
/// which `f` changes sign, scanning upward from `lo`.
pub fn first_sign_change<F>(mut f: F, lo: f64, hi: f64, n: usize) -> Option<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let step = (hi - lo) / n as f64;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=n {
        let b = if i == n { hi } else { lo + step * i as f64 };
        let fb = f(b);
        if fa == 0.0 || (fa < 0.0) != (fb < 0.0) {
            return Some((a, b));
        }
        a = b;
        fa = fb;
    }
    None
}
