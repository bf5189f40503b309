//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Solves `min cᵀx  s.t.  A x = b, x ≥ 0` and also returns the dual vector
//! `y` (`Aᵀy ≤ c`, `bᵀy = cᵀx*`). Intended for problems with few rows; the
//! multiplier search in [`crate::certifier`] solves the dual of a problem
//! with few variables and many constraints, which has exactly that shape.

use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub struct StandardForm {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows × cols`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub duals: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    IterationLimit,
}

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;

struct Tableau {
    rows: usize,
    /// Original columns; artificials occupy `cols..cols + rows`.
    cols: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn at(&self, r: usize, j: usize) -> f64 {
        self.data[r * self.width + j]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn objective_row(&self) -> usize {
        self.rows
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.data[pr * w + pc];
        for j in 0..w {
            self.data[pr * w + j] /= p;
        }
        self.data[pr * w + pc] = 1.0;
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let factor = self.data[r * w + pc];
            if factor == 0.0 {
                continue;
            }
            for j in 0..w {
                self.data[r * w + j] -= factor * self.data[pr * w + j];
            }
            self.data[r * w + pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Bland: lowest-index improving column, then lowest-index basic variable
    /// among tied ratios.
    fn run(&mut self, allowed: usize) -> Result<(), LpError> {
        let obj = self.objective_row();
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Err(LpError::IterationLimit);
            }
            let Some(pc) = (0..allowed).find(|&j| self.at(obj, j) < -COST_TOL) else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let coef = self.at(r, pc);
                if coef <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / coef;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bv)) => {
                        let tie = (ratio - bv).abs() <= 1e-12 * (1.0 + bv.abs());
                        if ratio < bv && !tie || tie && self.basis[r] < self.basis[br] {
                            Some((r, ratio))
                        } else {
                            Some((br, bv))
                        }
                    }
                };
            }
            let Some((pr, _)) = best else {
                return Err(LpError::Unbounded);
            };
            self.pivot(pr, pc);
        }
    }

    fn set_costs(&mut self, costs: &[f64]) {
        let obj = self.objective_row();
        let w = self.width;
        for j in 0..w {
            self.data[obj * w + j] = if j < costs.len() { costs[j] } else { 0.0 };
        }
        for r in 0..self.rows {
            let cb = costs.get(self.basis[r]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..w {
                    self.data[obj * w + j] -= cb * self.data[r * w + j];
                }
            }
        }
    }
}

pub fn solve(lp: &StandardForm) -> Result<LpSolution, LpError> {
    let (m, n) = (lp.rows, lp.cols);
    assert_eq!(lp.a.len(), m * n, "constraint matrix has wrong size");
    assert_eq!(lp.b.len(), m);
    assert_eq!(lp.c.len(), n);

    let width = n + m + 1;
    let mut data = alloc::vec![0.0; (m + 1) * width];
    let mut signs = alloc::vec![1.0; m];
    for r in 0..m {
        let s = if lp.b[r] < 0.0 { -1.0 } else { 1.0 };
        signs[r] = s;
        for j in 0..n {
            data[r * width + j] = s * lp.a[r * n + j];
        }
        data[r * width + n + r] = 1.0;
        data[r * width + width - 1] = s * lp.b[r];
    }
    let mut t = Tableau { rows: m, cols: n, width, data, basis: (n..n + m).collect(), pivots: 0 };

    // phase 1: minimize the sum of artificials
    let mut phase1 = alloc::vec![0.0; n + m];
    phase1[n..].iter_mut().for_each(|c| *c = 1.0);
    t.set_costs(&phase1);
    t.run(n + m)?;
    let infeasibility = -t.at(m, width - 1);
    let scale = 1.0 + lp.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if infeasibility > 1e-9 * scale {
        return Err(LpError::Infeasible);
    }
    // drive zero-level artificials out of the basis where possible
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| t.at(r, j).abs() > 1e-9) {
                t.pivot(r, j);
            }
        }
    }

    // phase 2 on the original costs; artificials may not re-enter
    t.set_costs(&lp.c);
    t.run(n)?;

    let mut x = alloc::vec![0.0; n];
    for r in 0..m {
        if t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let duals = (0..m).map(|r| -signs[r] * t.at(m, t.cols + r)).collect();
    let objective = lp.c.iter().zip(&x).map(|(c, x)| c * x).sum();
    Ok(LpSolution { x, duals, objective, pivots: t.pivots })
}
