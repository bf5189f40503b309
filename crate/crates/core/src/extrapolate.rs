//! Richardson extrapolation of sequences with a known error expansion.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    /// Change of the extrapolated value when the newest sample is added.
    pub error: f64,
}

/// Extrapolates `values[i] = L + c₁ q^{-i} + c₂ q^{-2i} + …` to its limit,
/// where `q` is the factor by which the leading error term shrinks between
/// consecutive samples (`q = 4` for step halving with an `O(h²)` error).
///
/// `columns` samples go into each estimate (`columns = 3` eliminates the two
/// leading error terms); one more sample is needed for the error estimate.
pub fn richardson(values: &[f64], ratio: f64, columns: usize) -> Option<Extrapolation> {
    if columns == 0 || values.len() < columns + 1 {
        return None;
    }
    let estimate = |window: &[f64]| -> f64 {
        let mut col: Vec<f64> = window.to_vec();
        let mut factor = 1.0;
        for _ in 1..columns {
            factor *= ratio;
            col = col.windows(2).map(|w| w[1] + (w[1] - w[0]) / (factor - 1.0)).collect();
        }
        col[0]
    };
    let n = values.len();
    let latest = estimate(&values[n - columns..]);
    let previous = estimate(&values[n - columns - 1..n - 1]);
    Some(Extrapolation { value: latest, error: (latest - previous).abs() })
}
