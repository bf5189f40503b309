use alloc::vec::Vec;

use super::farkas::sigma2_slacks;
use crate::potential::{GridSpec, PotentialModel};
use crate::simplex::{solve, StandardForm};

/// Slack allowed on constraints normalized to unit coefficient norm.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// `Ŵ` and `ξₖ∂ₖŴ` evaluated once on every grid point.
#[derive(Debug, Clone)]
pub struct SampledGrid {
    pub spec: GridSpec,
    pub(crate) dim: usize,
    pub(crate) points: Vec<f64>,
    pub(crate) w: Vec<f64>,
    pub(crate) g: Vec<f64>,
}

impl SampledGrid {
    pub fn new(model: &PotentialModel, spec: &GridSpec) -> Self {
        let dim = model.dim();
        let points = spec.points();
        let count = points.len() / dim;
        let mut w = Vec::with_capacity(count);
        let mut g = alloc::vec![0.0; count * dim];
        for (p, out) in points.chunks_exact(dim).zip(g.chunks_exact_mut(dim)) {
            w.push(model.w_hat(p));
            model.grad_scaled_into(p, out);
        }
        Self { spec: spec.clone(), dim, points, w, g }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// `(Ŵ(ξ), [ξₖ∂ₖŴ(ξ)]ₖ)` at sample `i`.
    pub fn sample(&self, i: usize) -> (f64, &[f64]) {
        (self.w[i], &self.g[i * self.dim..(i + 1) * self.dim])
    }

    fn samples(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.w.iter().copied().zip(self.g.chunks_exact(self.dim))
    }
}

/// Largest `ξₖ∂ₖŴ(ξ)` over grid points and components, with its location.
/// Nonexistence at `c = 0` needs this to be `≤ 0`.
pub fn max_grad_scaled(grid: &SampledGrid) -> (f64, Option<usize>) {
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    for (i, (_, g)) in grid.samples().enumerate() {
        for &v in g {
            if !(v <= worst) {
                worst = v;
                at = Some(i);
            }
        }
    }
    (worst, at)
}

/// `κ = max{1, 2/(N−1)}`.
pub fn gradient_bound_factor(dim: usize) -> f64 {
    (2.0 / (dim - 1) as f64).max(1.0)
}

/// Worst `(Ŵ − κ Σ_{k≥2}|ξₖ∂ₖŴ| − |ξ₁∂₁Ŵ|) / (1 + |Ŵ|)` over the grid.
pub fn gradient_bound_margin(grid: &SampledGrid) -> f64 {
    let kappa = gradient_bound_factor(grid.dim);
    grid.samples()
        .map(|(w, g)| {
            let rest: f64 = g[1..].iter().map(|v| v.abs()).sum();
            (w - kappa * rest - g[0].abs()) / (1.0 + w.abs())
        })
        .fold(f64::INFINITY, f64::min)
}

/// `inf (N−1)Ŵ / Σ_{k≥2}|ξₖ∂ₖŴ|` over grid points with a nonzero
/// denominator; `+∞` when there are none.
pub fn window_inf_ratio(grid: &SampledGrid) -> f64 {
    let n1 = (grid.dim - 1) as f64;
    grid.samples()
        .filter_map(|(w, g)| {
            let d: f64 = g[1..].iter().map(|v| v.abs()).sum();
            (d > 0.0).then(|| n1 * w / d)
        })
        .fold(f64::INFINITY, f64::min)
}

/// A multiplier vector satisfying the sampled conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaCertificate {
    pub sigma: Vec<f64>,
    pub ell: f64,
    /// Smallest left-hand side of the pointwise inequality on the grid.
    pub grid_margin: f64,
    pub sigma2_slacks: [f64; 3],
    pub verified_on: GridSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaCheck {
    /// `min_ξ Ŵ + ℓΣ_{k≥2}σₖξₖ∂ₖŴ − σ₁ξ₁∂₁Ŵ`.
    pub margin: f64,
    /// Same minimum after dividing each constraint by its coefficient norm.
    pub normalized_margin: f64,
    pub worst_point: Option<Vec<f64>>,
    pub sigma2_slacks: [f64; 3],
}

impl SigmaCheck {
    pub fn holds(&self) -> bool {
        self.normalized_margin >= -FEASIBILITY_TOL && self.sigma2_slacks.iter().all(|s| *s >= -FEASIBILITY_TOL)
    }
}

fn pointwise(ell: f64, sigma: &[f64], w: f64, g: &[f64]) -> (f64, f64) {
    let lhs = w + ell * sigma[1..].iter().zip(&g[1..]).map(|(s, v)| s * v).sum::<f64>() - sigma[0] * g[0];
    let norm_sq = w * w + g[0] * g[0] + g[1..].iter().map(|v| ell * ell * v * v).sum::<f64>();
    let norm = libm::sqrt(norm_sq);
    (lhs, if norm > 0.0 { lhs / norm } else { 0.0 })
}

/// Re-evaluates both multiplier conditions for a given `σ` on `grid`.
pub fn verify_sigma(ell: f64, sigma: &[f64], grid: &SampledGrid) -> SigmaCheck {
    let mut margin = f64::INFINITY;
    let mut normalized_margin = f64::INFINITY;
    let mut worst = None;
    for (i, (w, g)) in grid.samples().enumerate() {
        let (lhs, normalized) = pointwise(ell, sigma, w, g);
        if !(lhs >= margin) {
            margin = lhs;
            worst = Some(i);
        }
        if !(normalized >= normalized_margin) {
            normalized_margin = normalized;
        }
    }
    SigmaCheck {
        margin,
        normalized_margin,
        worst_point: worst.map(|i| grid.point(i).to_vec()),
        sigma2_slacks: sigma2_slacks(ell, sigma),
    }
}

/// Coefficients `(a, b)` of the constraint `a·σ + b ≥ 0`, divided by
/// `‖(a, b)‖`.
fn constraint_rows(ell: f64, grid: &SampledGrid) -> Vec<(Vec<f64>, f64)> {
    let n = grid.dim;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut push = |mut a: Vec<f64>, mut b: f64| {
        let norm = libm::sqrt(a.iter().map(|v| v * v).sum::<f64>() + b * b);
        if !(norm > 0.0) || !norm.is_finite() {
            return;
        }
        a.iter_mut().for_each(|v| *v /= norm);
        b /= norm;
        rows.push((a, b));
    };
    // pointwise inequality
    for (w, g) in grid.samples() {
        let mut a = Vec::with_capacity(n);
        a.push(-g[0]);
        a.extend(g[1..].iter().map(|v| ell * v));
        push(a, w);
    }
    // −σ₁ + S − 1 ≥ 0
    let mut a = alloc::vec![1.0; n];
    a[0] = -1.0;
    push(a, -1.0);
    // σ₁ + S + 2ℓσ_j − 1 ≥ 0
    for j in 1..n {
        let mut a = alloc::vec![1.0; n];
        a[j] += 2.0 * ell;
        push(a, -1.0);
    }
    // σ₁ + (ℓ+2)S − 1 ≥ 0
    let mut a = alloc::vec![ell + 2.0; n];
    a[0] = 1.0;
    push(a, -1.0);

    // drop duplicates up to rounding
    let key = |a: &[f64], b: f64| -> Vec<i64> {
        a.iter().chain(core::iter::once(&b)).map(|v| libm::round(v * 1e10) as i64).collect()
    };
    let mut keyed: Vec<(Vec<i64>, usize)> = rows.iter().enumerate().map(|(i, (a, b))| (key(a, *b), i)).collect();
    keyed.sort_unstable();
    keyed.dedup_by(|x, y| x.0 == y.0);
    let mut keep: Vec<usize> = keyed.into_iter().map(|(_, i)| i).collect();
    keep.sort_unstable();
    keep.into_iter().map(|i| rows[i].clone()).collect()
}

/// Largest `t ≤ 1` such that every normalized constraint has slack `≥ t`,
/// with the maximizing `σ`.
///
/// The program has `N + 1` free variables and one constraint per sample, so
/// its dual (`N + 1` equality rows) is the one handed to the simplex.
pub(crate) fn max_min_slack(ell: f64, grid: &SampledGrid) -> Option<(Vec<f64>, f64)> {
    let n = grid.dim;
    let rows = constraint_rows(ell, grid);
    // primal: max t  s.t.  −a·σ + t ≤ b  and  t ≤ 1
    // dual:   min bᵀy + y_cap  s.t.  Σ y_i(−a_i, 1) + y_cap e_t = e_t, y ≥ 0
    let cols = rows.len() + 1;
    let m = n + 1;
    let mut a = alloc::vec![0.0; m * cols];
    let mut c = Vec::with_capacity(cols);
    for (col, (coef, b)) in rows.iter().enumerate() {
        for (r, v) in coef.iter().enumerate() {
            a[r * cols + col] = -v;
        }
        a[n * cols + col] = 1.0;
        c.push(*b);
    }
    a[n * cols + rows.len()] = 1.0;
    c.push(1.0);
    let mut b = alloc::vec![0.0; m];
    b[n] = 1.0;
    let sol = solve(&StandardForm { rows: m, cols, a, b, c }).ok()?;
    let t = sol.duals[n];
    let sigma = sol.duals[..n].to_vec();
    Some((sigma, t))
}

/// Solves the sampled multiplier conditions for `σ`; `None` when they are
/// infeasible on `grid`.
pub fn sigma_feasibility(ell: f64, grid: &SampledGrid) -> Option<SigmaCertificate> {
    if !(ell > 0.0) {
        return None;
    }
    let (sigma, t) = max_min_slack(ell, grid)?;
    if t < -FEASIBILITY_TOL {
        return None;
    }
    let check = verify_sigma(ell, &sigma, grid);
    if !check.holds() {
        return None;
    }
    Some(SigmaCertificate {
        sigma,
        ell,
        grid_margin: check.margin,
        sigma2_slacks: check.sigma2_slacks,
        verified_on: grid.spec.clone(),
    })
}

/// A coarse-grid certificate stands only if it still holds on the finer grid.
pub fn accept_on_refinement(fine: &SigmaCheck) -> bool {
    fine.holds()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::profile::FnProfile;
    use crate::potential::{build_potential, PotentialSpec};
    use alloc::sync::Arc;

    fn sampled(spec: PotentialSpec) -> (PotentialModel, SampledGrid) {
        let model = build_potential(spec).unwrap();
        let grid = SampledGrid::new(&model, &GridSpec::default_for(&model));
        (model, grid)
    }

    #[test]
    fn delta_witness_and_lp() {
        let (_, grid) = sampled(PotentialSpec::delta(1.0, 2));
        let check = verify_sigma(1.0, &[-1.0, 1.0], &grid);
        assert_eq!(check.margin, 1.0);
        for (got, want) in check.sigma2_slacks.iter().zip([1.0, 1.0 / 3.0, 1.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(check.holds());
        let cert = sigma_feasibility(1.0, &grid).unwrap();
        assert!(cert.sigma2_slacks.iter().all(|s| *s >= -FEASIBILITY_TOL));
    }

    #[test]
    fn dipolar_half_half_witness() {
        let (_, grid) = sampled(PotentialSpec::dipolar(1.0, 0.25));
        let check = verify_sigma(0.5, &[0.0, 0.5, 0.5], &grid);
        assert!(check.margin >= 0.0 && check.holds(), "{check:?}");
        assert!(sigma_feasibility(0.5, &grid).is_some());
    }

    #[test]
    fn sign_changing_kernel_is_infeasible() {
        let p = FnProfile::new(libm::cos, |r: f64| -libm::sin(r));
        let model = PotentialModel::from_profile(2, Arc::new(p), true).unwrap();
        let grid = SampledGrid::new(&model, &GridSpec::default_for(&model));
        for ell in [0.1, 1.0, 5.0] {
            assert!(sigma_feasibility(ell, &grid).is_none());
        }
    }

    #[test]
    fn corrupted_sigma_fails() {
        let (_, grid) = sampled(PotentialSpec::delta(1.0, 2));
        let check = verify_sigma(1.0, &[-1.0, -1.0], &grid);
        assert_eq!(check.sigma2_slacks[0], -1.0);
        assert!(!check.holds() && !accept_on_refinement(&check));
    }

    #[test]
    fn sk_window_quantities() {
        let (model, grid) = sampled(PotentialSpec::radial_sk(1.0, 2.0, 3));
        // sampled inf approaches 2·(1/b) = 1 from above for N = 3
        let m = window_inf_ratio(&grid);
        assert!((1.0..1.0 + 1e-3).contains(&m), "{m}");
        assert!(gradient_bound_margin(&grid) < 0.0);
        let (worst, _) = max_grad_scaled(&grid);
        assert!(worst <= 0.0);
        let _ = model;
    }
}
