use alloc::vec::Vec;

/// The `(N+1)×(N+1)` system behind the multiplier conditions.
///
/// A nontrivial solution would give a nonnegative `z` with `Az = b`; a
/// multiplier `σ′ = (σ, −1)` with `Aᵀσ′ ≥ 0` contradicts it. The right-hand
/// side depends on the unknown solution and is never formed.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasSystem {
    pub n: usize,
    pub ell: f64,
    /// Row-major.
    pub a: Vec<f64>,
    pub sigma_prime: Vec<f64>,
    /// `Aᵀσ′`.
    pub dual_components: Vec<f64>,
}

impl FarkasSystem {
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.a[row * (self.n + 1) + col]
    }

    pub fn dual_feasible(&self, tol: f64) -> bool {
        self.dual_components.iter().all(|d| *d >= -tol)
    }
}

/// Expanded forms of `Aᵀσ′`:
/// `−σ₁ + S − 1`, `σ₁ + S + 2ℓσ_j − 1` for `j = 2..N`, `σ₁ + (ℓ+2)S − 1`,
/// with `S = Σ_{k≥2} σ_k`.
pub fn dual_closed_forms(ell: f64, sigma: &[f64]) -> Vec<f64> {
    let s1 = sigma[0];
    let s: f64 = sigma[1..].iter().sum();
    let mut out = Vec::with_capacity(sigma.len() + 1);
    out.push(-s1 + s - 1.0);
    out.extend(sigma[1..].iter().map(|sj| s1 + s + 2.0 * ell * sj - 1.0));
    out.push(s1 + (ell + 2.0) * s - 1.0);
    out
}

/// The bracketed terms of the multiplier inequality, each with `S` added:
/// `S − σ₁ − 1`, `S + (σ₁ − 1)/(ℓ + 2)`, `min_j (S + 2ℓσ_j + σ₁ − 1)`.
/// All three are nonnegative exactly when [`dual_closed_forms`] are.
pub fn sigma2_slacks(ell: f64, sigma: &[f64]) -> [f64; 3] {
    let s1 = sigma[0];
    let s: f64 = sigma[1..].iter().sum();
    let per_axis = sigma[1..].iter().map(|sj| s + 2.0 * ell * sj + s1 - 1.0).fold(f64::INFINITY, f64::min);
    [s - s1 - 1.0, s + (s1 - 1.0) / (ell + 2.0), per_axis]
}

/// # Panics
/// If `n < 2`, `sigma.len() != n`, or `ell` is not positive.
pub fn build_farkas_system(n: usize, ell: f64, sigma: &[f64]) -> FarkasSystem {
    assert!(n >= 2, "dimension must be at least 2");
    assert_eq!(sigma.len(), n, "one multiplier per coordinate");
    assert!(ell > 0.0, "ell must be positive");
    let m = n + 1;
    let mut a = alloc::vec![1.0; m * m];
    a[0] = -1.0;
    for i in 1..n {
        a[i * m + i] = 1.0 + 2.0 * ell;
        a[i * m + n] = 2.0 + ell;
    }
    // the last diagonal entry is 1, not 1 + 2ℓ
    a[n * m + n] = 1.0;

    let mut sigma_prime = sigma.to_vec();
    sigma_prime.push(-1.0);
    let dual_components: Vec<f64> =
        (0..m).map(|col| (0..m).map(|row| a[row * m + col] * sigma_prime[row]).sum()).collect();

    debug_assert!({
        let closed = dual_closed_forms(ell, sigma);
        let scale = 1.0 + ell + sigma.iter().map(|s| s.abs()).sum::<f64>() * (2.0 + 2.0 * ell);
        dual_components.iter().zip(&closed).all(|(d, c)| (d - c).abs() <= 1e-12 * scale)
    });
    FarkasSystem { n, ell, a, sigma_prime, dual_components }
}
