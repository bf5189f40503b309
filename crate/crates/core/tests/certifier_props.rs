use std::f64::consts::PI;
use std::sync::Arc;

use ngp_cert_core::certifier::{
    accept_on_refinement, certified_intervals, dual_closed_forms, sigma2_slacks, ClosedFormCheck, SampledGrid,
    SigmaCheck, FEASIBILITY_TOL,
};
use ngp_cert_core::potential::{FnProfile, Gaussian};
use ngp_cert_core::*;
use proptest::prelude::*;

/// `A` written out row by row from its definition, independent of the
/// library's assembly.
fn farkas_matrix(n: usize, ell: f64) -> Vec<Vec<f64>> {
    let mut rows = Vec::new();
    rows.push((0..=n).map(|k| if k == 0 { -1.0 } else { 1.0 }).collect());
    for i in 1..n {
        rows.push(
            (0..=n)
                .map(|k| match k {
                    _ if k == i => 1.0 + 2.0 * ell,
                    _ if k == n => 2.0 + ell,
                    _ => 1.0,
                })
                .collect(),
        );
    }
    rows.push(vec![1.0; n + 1]);
    rows
}

fn transpose_times(a: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    (0..v.len()).map(|col| a.iter().zip(v).map(|(row, x)| row[col] * x).sum()).collect()
}

fn small_grid(dim: usize) -> GridSpec {
    GridSpec::new(dim, 1e-2, 1e2, 24, 8, 0.0).unwrap()
}

/// Multipliers `σ₁ = −1`, `σ_k = max{2/((N−1)(ℓ+2)), 2/(N−1+2ℓ)}`: the
/// smallest common `σ_k` meeting every bracketed condition, for which
/// `ℓσ_k ≤ max{1, 2/(N−1)}` keeps the pointwise inequality under the
/// gradient bound.
fn gradient_witness(dim: usize, ell: f64) -> Vec<f64> {
    let m = (dim - 1) as f64;
    let s = (2.0 / (m * (ell + 2.0))).max(2.0 / (m + 2.0 * ell));
    let mut sigma = vec![s; dim];
    sigma[0] = -1.0;
    sigma
}

fn kernel_with_sonic_speed() -> impl Strategy<Value = PotentialSpec> {
    prop_oneof![
        (0.1f64..5.0, 2usize..5).prop_map(|(a, n)| PotentialSpec::delta(a, n)),
        (0.1f64..5.0, 0.1f64..4.0, 2usize..5).prop_map(|(a, b, n)| PotentialSpec::radial_sk(a, b, n)),
        (0.0f64..0.5, 2usize..5).prop_map(|(e, n)| PotentialSpec::delta_plus_f(e, n)),
    ]
}

fn certified_verdict(c: f64) -> SpeedVerdict {
    SpeedVerdict {
        c,
        status: Status::CertifiedNonexistence,
        route: Route::StaticC0,
        ell: None,
        evidence: Some(Evidence::ClosedForm(ClosedFormCheck { check: "test", margin: 0.0, witness: None })),
        assumptions: vec![Assumption::GridSampled],
        diagnostics: Vec::new(),
    }
}

fn inconclusive_verdict(c: f64) -> SpeedVerdict {
    SpeedVerdict {
        c,
        status: Status::Inconclusive,
        route: Route::None,
        ell: None,
        evidence: None,
        assumptions: Vec::new(),
        diagnostics: vec!["test".into()],
    }
}

fn assert_verdict_invariants(v: &SpeedVerdict) {
    if v.is_certified() {
        assert_ne!(v.route, Route::None, "{v:?}");
        assert!(v.evidence.is_some(), "{v:?}");
        assert!(!v.assumptions.is_empty(), "{v:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn dual_components_match_closed_forms(
        n in 2usize..=4,
        ell in 1e-6f64..=10.0,
        raw in prop::collection::vec(-5.0f64..5.0, 4),
    ) {
        let sigma = &raw[..n];
        let f = build_farkas_system(n, ell, sigma);
        let mut sigma_prime = sigma.to_vec();
        sigma_prime.push(-1.0);
        let oracle = transpose_times(&farkas_matrix(n, ell), &sigma_prime);
        let closed = dual_closed_forms(ell, sigma);
        prop_assert_eq!(f.dual_components.len(), n + 1);
        for ((d, o), c) in f.dual_components.iter().zip(&oracle).zip(&closed) {
            let scale = 1.0f64.max(o.abs());
            prop_assert!((d - o).abs() <= 1e-12 * scale, "{} vs {}", d, o);
            prop_assert!((d - c).abs() <= 1e-12 * scale, "{} vs {}", d, c);
        }
        for r in 0..=n {
            for col in 0..=n {
                prop_assert_eq!(f.entry(r, col), farkas_matrix(n, ell)[r][col]);
            }
        }
    }

    #[test]
    fn three_forms_equivalent_to_min_form(
        n in 2usize..=4,
        ell in 1e-6f64..=10.0,
        raw in prop::collection::vec(-3.0f64..3.0, 4),
    ) {
        let sigma = &raw[..n];
        let closed = dual_closed_forms(ell, sigma);
        let slacks = sigma2_slacks(ell, sigma);
        // away from the boundary, where rounding could flip a sign
        prop_assume!(closed.iter().chain(&slacks).all(|v| v.abs() > 1e-9));
        let forms_hold = closed.iter().all(|v| *v >= 0.0);
        let min_form = slacks.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(forms_hold, min_form >= 0.0);
        // and term by term
        prop_assert_eq!(closed[0] >= 0.0, slacks[0] >= 0.0);
        prop_assert_eq!(closed[n] >= 0.0, slacks[1] >= 0.0);
        let per_axis = closed[1..n].iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(per_axis >= 0.0, slacks[2] >= 0.0);
    }

    #[test]
    fn certified_intervals_are_maximal_runs(flags in prop::collection::vec(any::<bool>(), 0..40)) {
        let verdicts: Vec<SpeedVerdict> = flags
            .iter()
            .enumerate()
            .map(|(i, &ok)| if ok { certified_verdict(i as f64) } else { inconclusive_verdict(i as f64) })
            .collect();
        let mut expected = Vec::new();
        let mut i = 0;
        while i < flags.len() {
            if flags[i] {
                let start = i;
                while i + 1 < flags.len() && flags[i + 1] {
                    i += 1;
                }
                expected.push((start as f64, i as f64));
            }
            i += 1;
        }
        prop_assert_eq!(certified_intervals(&verdicts), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gradient_bound_implies_multiplier_feasibility(
        dim in 2usize..=4,
        a in 0.2f64..4.0,
        shrink in 0.05f64..1.0,
        ell in 0.01f64..10.0,
    ) {
        // SK ratio 1/b meets max{1, 2/(N−1)} exactly when b ≤ 1/κ
        let kappa = 1.0f64.max(2.0 / (dim - 1) as f64);
        let b = shrink / kappa;
        let model = build_potential(PotentialSpec::radial_sk(a, b, dim)).unwrap();
        let spec = small_grid(dim);
        prop_assert!(corollary_gradient_bound(&model, &spec));
        let grid = SampledGrid::new(&model, &spec);
        let check = verify_sigma(ell, &gradient_witness(dim, ell), &grid);
        prop_assert!(check.holds(), "{:?}", check);
        prop_assert!(check.margin >= 0.0);
        let cert = sigma_feasibility(ell, &grid);
        prop_assert!(cert.is_some());
        let cert = cert.unwrap();
        prop_assert!(cert.grid_margin >= -FEASIBILITY_TOL);
        prop_assert!(cert.sigma2_slacks.iter().all(|s| *s >= -FEASIBILITY_TOL));
    }

    #[test]
    fn never_certified_at_or_below_sonic_speed(spec in kernel_with_sonic_speed(), u in 1e-6f64..=1.0) {
        let model = build_potential(spec).unwrap();
        let c_s = sonic_speed(&model).c_s.unwrap();
        let opts = CertifyOptions { grid: Some(small_grid(model.dim())), ..CertifyOptions::default() };
        for c in [u * c_s, c_s] {
            let v = certify_speed(&model, c, &opts);
            prop_assert!(!v.is_certified(), "{:?}", v);
        }
    }
}

#[test]
fn farkas_examples() {
    let f = build_farkas_system(2, 1.0, &[-1.0, 1.0]);
    assert_eq!(f.dual_components, vec![1.0, 1.0, 1.0]);
    assert_eq!(f.sigma_prime, vec![-1.0, 1.0, -1.0]);
    assert!(f.dual_feasible(0.0));

    let f = build_farkas_system(3, 0.5, &[0.0, 0.5, 0.5]);
    for (got, want) in f.dual_components.iter().zip([0.0, 0.5, 0.5, 1.5]) {
        assert!((got - want).abs() < 1e-15);
    }
    assert_eq!(f.entry(3, 3), 1.0);

    for ell in [0.01, 1.0, 9.5] {
        let f = build_farkas_system(2, ell, &[0.0, 0.0]);
        assert_eq!(f.dual_components[0], -1.0);
        assert!(!f.dual_feasible(1e-12));
    }
}

#[test]
fn static_examples() {
    let sk = build_potential(PotentialSpec::radial_sk(1.0, 2.0, 3)).unwrap();
    let v = check_static(&sk, &GridSpec::default_for(&sk));
    assert!(v.is_certified() && v.route == Route::StaticC0);
    assert_verdict_invariants(&v);

    let delta = build_potential(PotentialSpec::delta(1.0, 2)).unwrap();
    let v = check_static(&delta, &GridSpec::default_for(&delta));
    assert!(v.is_certified());

    // ρ increases on (0, 1)
    let bump = Arc::new(FnProfile::new(
        |r: f64| (1.0 + r * r) * (-r * r / 2.0).exp(),
        |r: f64| r * (1.0 - r * r) * (-r * r / 2.0).exp(),
    ));
    let model = PotentialModel::from_profile(2, bump, true).unwrap();
    let v = check_static(&model, &GridSpec::default_for(&model));
    assert_eq!(v.status, Status::Inconclusive);
    let Some(Evidence::ClosedForm(check)) = &v.evidence else { panic!("{v:?}") };
    assert!(check.margin < 0.0);
    let r0 = check.witness.as_ref().unwrap()[0];
    assert!(r0 > 0.0 && r0 < 1.0, "witness {r0}");
    // ρ′ peaks where r⁴ − 4r² + 1 = 0, r = (2 − √3)^{1/2}, up to grid spacing
    assert!((r0 - (2.0 - 3f64.sqrt()).sqrt()).abs() < 0.05);
}

#[test]
fn corollary_examples() {
    let sk_half = build_potential(PotentialSpec::radial_sk(1.0, 0.5, 2)).unwrap();
    assert!(corollary_gradient_bound(&sk_half, &GridSpec::default_for(&sk_half)));
    let sk = build_potential(PotentialSpec::radial_sk(1.0, 2.0, 3)).unwrap();
    let grid = GridSpec::default_for(&sk);
    assert!(!corollary_gradient_bound(&sk, &grid));
    let delta = build_potential(PotentialSpec::delta(1.0, 2)).unwrap();
    let delta_grid = GridSpec::default_for(&delta);
    assert!(corollary_gradient_bound(&delta, &delta_grid));

    assert!(corollary_speed_window(&sk, 1.6, &grid));
    assert!(!corollary_speed_window(&sk, 1.8, &grid));
    assert!(corollary_speed_window(&delta, 100.0, &delta_grid));
    assert!((radial_inf_ratio(&sk).unwrap() - 0.5).abs() < 1e-8);
}

#[test]
fn sigma_examples() {
    let delta = build_potential(PotentialSpec::delta(1.0, 2)).unwrap();
    let grid = SampledGrid::new(&delta, &GridSpec::default_for(&delta));
    assert!(sigma_feasibility(1.0, &grid).is_some());
    let check = verify_sigma(1.0, &[-1.0, 1.0], &grid);
    assert!(check.holds());
    assert_eq!(check.margin, 1.0);
    for (got, want) in check.sigma2_slacks.iter().zip([1.0, 1.0 / 3.0, 1.0]) {
        assert!((got - want).abs() < 1e-15);
    }
    let bad = verify_sigma(1.0, &[-1.0, -1.0], &grid);
    assert_eq!(bad.sigma2_slacks[0], -1.0);
    assert!(!bad.holds());

    let dip = build_potential(PotentialSpec::dipolar(1.0, 0.25)).unwrap();
    let spec = GridSpec::default_for(&dip);
    let coarse = SampledGrid::new(&dip, &spec);
    assert!(sigma_feasibility(0.5, &coarse).is_some());
    let fine = SampledGrid::new(&dip, &spec.refined());
    assert!(fine.len() >= 4 * coarse.len());
    let check = verify_sigma(0.5, &[0.0, 0.5, 0.5], &fine);
    assert!(check.margin >= 0.0 && check.holds(), "{check:?}");

    let cos = Arc::new(FnProfile::new(|r: f64| r.cos(), |r: f64| -r.sin()));
    let model = PotentialModel::from_profile(2, cos, true).unwrap();
    let grid = SampledGrid::new(&model, &GridSpec::default_for(&model));
    assert!(sigma_feasibility(1.0, &grid).is_none());
}

#[test]
fn refinement_rejects_negative_margin() {
    let ok = SigmaCheck { margin: 0.1, normalized_margin: 0.05, worst_point: None, sigma2_slacks: [0.0; 3] };
    assert!(accept_on_refinement(&ok));
    let bad = SigmaCheck { normalized_margin: -1e-6, ..ok.clone() };
    assert!(!accept_on_refinement(&bad));
    let bad_slack = SigmaCheck { sigma2_slacks: [0.0, -1e-6, 0.0], ..ok };
    assert!(!accept_on_refinement(&bad_slack));
}

/// SK profile with a narrow negative well placed on a radius that only the
/// refined grid samples.
#[test]
fn refined_grid_failure_downgrades_verdict() {
    let base = build_potential(PotentialSpec::radial_sk(1.0, 2.0, 3)).unwrap();
    let spec = GridSpec::default_for(&base);
    let (coarse_r, fine_r) = (spec.radii(), spec.refined().radii());
    let log_gap = |r: f64| coarse_r.iter().map(|q| (q.ln() - r.ln()).abs()).fold(f64::INFINITY, f64::min);
    let r0 = *fine_r.iter().filter(|r| **r > 0.5 && **r < 5.0).max_by(|x, y| log_gap(**x).total_cmp(&log_gap(**y))).unwrap();
    assert!(log_gap(r0) > 0.01);

    let width = 1e-4 * r0;
    let depth = 2.0 / (1.0 + r0 * r0);
    let well = move |r: f64| depth * (-((r - r0) / width).powi(2)).exp();
    let profile = Arc::new(FnProfile::new(
        move |r: f64| 1.0 / (1.0 + r * r) - well(r),
        move |r: f64| -2.0 * r / (1.0 + r * r).powi(2) + 2.0 * (r - r0) / (width * width) * well(r),
    ));
    let model = PotentialModel::from_profile(3, profile, true).unwrap();
    let certifier = Certifier::new(model, CertifyOptions::default());
    assert!(sigma_feasibility(1.0, certifier.grid()).is_some(), "coarse grid should not see the well");

    let v = certifier.certify(2.0);
    assert_eq!(v.status, Status::Inconclusive, "{v:?}");
    assert_eq!(v.route, Route::None);
    assert!(v.diagnostics.iter().any(|d| d.contains("refined grid")), "{:?}", v.diagnostics);

    // the same kernel without the well is certified by the same route
    let v = certify_speed(&base, 2.0, &CertifyOptions::default());
    assert!(v.is_certified() && v.route == Route::LpSigma, "{v:?}");
}

#[test]
fn epsilon_bound_examples() {
    let g2 = epsilon_bound(&Gaussian::default(), 2).unwrap();
    assert!((g2.bound - 1.0 / (6.0 * PI)).abs() < 1e-10);
    assert!((g2.l1_norm - PI).abs() < 1e-9 && (g2.moment_sum - 2.0 * PI).abs() < 1e-9);
    let g3 = epsilon_bound(&Gaussian::default(), 3).unwrap();
    assert!((g3.bound - 1.0 / (7.0 * PI.powf(1.5))).abs() < 1e-10);

    for lambda in [0.5, 3.0] {
        let scaled = epsilon_bound(&Gaussian { amplitude: lambda }, 2).unwrap();
        assert!((scaled.bound - g2.bound / lambda).abs() < 1e-12);
    }
    // c_s = (2 + 2ε∫f)^{1/2} agrees with the model built from the same f
    let eps = 0.05;
    let model = build_potential(PotentialSpec::delta_plus_f(eps, 2)).unwrap();
    assert!((g2.sonic_speed(eps) - sonic_speed(&model).c_s.unwrap()).abs() < 1e-9);
}

#[test]
fn certify_examples() {
    let sk = build_potential(PotentialSpec::radial_sk(1.0, 2.0, 3)).unwrap();
    let v = certify_speed(&sk, 1.6, &CertifyOptions::default());
    assert!(v.is_certified() && v.route == Route::CorollaryWindow, "{v:?}");
    assert!((v.ell.unwrap() - (1.6f64 * 1.6 / 2.0 - 1.0)).abs() < 1e-12);
    assert!(v.assumptions.contains(&Assumption::GridSampled));
    assert!(v.assumptions.contains(&Assumption::H6MeasureZero));

    let delta = build_potential(PotentialSpec::delta(1.0, 2)).unwrap();
    let v = certify_speed(&delta, 1.0, &CertifyOptions::default());
    assert_eq!((v.status, v.route), (Status::Inconclusive, Route::None));

    let dip = build_potential(PotentialSpec::dipolar(1.0, 0.25)).unwrap();
    let v = certify_speed(&dip, 2.0, &CertifyOptions::default());
    assert!(v.is_certified() && v.route == Route::EllMismatch, "{v:?}");
    let Some(Evidence::EllEquality(rep)) = &v.evidence else { panic!("{v:?}") };
    // slice limits c²/(2(a − b̃)) − 1 and −1 + (6b̃ + c²)/(2(a + 2b̃))
    assert!((rep.ells[0] - 5.0 / 3.0).abs() < 1e-4);
    assert!((rep.ells[1] - 5.0 / 6.0).abs() < 1e-4);
    assert!(v.assumptions.contains(&Assumption::EllFromExtrapolation));

    let v = certify_speed(&sk, f64::NAN, &CertifyOptions::default());
    assert_eq!(v.status, Status::Inconclusive);
}

#[test]
fn hypothesis_failure_blocks_unless_overridden() {
    // negative somewhere: nonnegativity fails on the grid
    let neg = Arc::new(FnProfile::new(|r: f64| 1.0 - 2.0 * (-(r - 3.0).powi(2)).exp(), move |r: f64| {
        4.0 * (r - 3.0) * (-(r - 3.0).powi(2)).exp()
    }));
    let model = PotentialModel::from_profile(2, neg, true).unwrap();
    let v = certify_speed(&model, 2.0, &CertifyOptions::default());
    assert_eq!(v.status, Status::Inconclusive);
    assert!(v.diagnostics[0].contains("hypothesis"), "{v:?}");
    let opts = CertifyOptions { allow_hypothesis_failure: true, ..CertifyOptions::default() };
    let v = certify_speed(&model, 2.0, &opts);
    assert!(!v.is_certified(), "a negative kernel admits no multiplier: {v:?}");
}

#[test]
fn delta_sweep() {
    let delta = build_potential(PotentialSpec::delta(1.0, 2)).unwrap();
    let cs = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0];
    let rep = sweep(&delta, &cs, &CertifyOptions::default());
    let certified: Vec<f64> = rep.verdicts.iter().filter(|v| v.is_certified()).map(|v| v.c).collect();
    assert_eq!(certified, vec![0.0, 1.5, 2.0, 3.0, 5.0, 10.0]);
    assert_eq!(rep.certified_intervals, vec![(0.0, 0.0), (1.5, 10.0)]);
    assert_eq!(rep.c_grid, cs.to_vec());
    rep.verdicts.iter().for_each(assert_verdict_invariants);
}

#[test]
fn sk_sweep_inside_window() {
    let sk = build_potential(PotentialSpec::radial_sk(1.0, 2.0, 3)).unwrap();
    let rep = sweep(&sk, &[1.5, 1.6, 1.7, 1.8], &CertifyOptions::default());
    let routes: Vec<Route> = rep.verdicts.iter().map(|v| v.route).collect();
    assert_eq!(routes[..3], [Route::CorollaryWindow; 3]);
    // above the window the closed-form route no longer applies
    assert_ne!(routes[3], Route::CorollaryWindow);
    rep.verdicts.iter().for_each(assert_verdict_invariants);
}

#[test]
fn dipolar_sweep() {
    let dip = build_potential(PotentialSpec::dipolar(1.0, 0.25)).unwrap();
    let rep = sweep(&dip, &[1.5, 3f64.sqrt(), 2.0, 3.0], &CertifyOptions::default());
    assert!(rep.verdicts.iter().all(SpeedVerdict::is_certified), "{:?}", rep.verdicts);
    assert_eq!(rep.certified_intervals, vec![(1.5, 3.0)]);
    assert!(rep.sonic.c_s.is_none());
    rep.verdicts.iter().for_each(assert_verdict_invariants);
}

/// For `ρ = 1/(1+r²)` in `ℝ³` the pointwise inequality is
/// `1 + (1+2σ₁)ξ₁² + Σ_{k≥2}(1 − 2ℓσ_k)ξ_k² ≥ 0`, so it needs `σ₁ ≥ −1/2`
/// and `σ_k ≤ 1/(2ℓ)`. With equal `σ₂ = σ₃` the bracketed conditions then
/// hold exactly when `ℓ ≤ 2`, i.e. `c ≤ √6`, beyond the closed-form window.
#[test]
fn sk_multiplier_range_matches_hand_solution() {
    let sk = build_potential(PotentialSpec::radial_sk(1.0, 2.0, 3)).unwrap();
    let spec = GridSpec::default_for(&sk);
    let grid = SampledGrid::new(&sk, &spec);
    let fine = SampledGrid::new(&sk, &spec.refined());
    for ell in [0.6, 1.0, 1.5, 2.0] {
        let sigma = [-0.5, 0.5 / ell, 0.5 / ell];
        let check = verify_sigma(ell, &sigma, &fine);
        assert!(check.holds() && check.margin >= 0.0, "ell {ell}: {check:?}");
        assert!(sigma_feasibility(ell, &grid).is_some(), "ell {ell}");
    }
    for ell in [2.05, 3.0] {
        assert!(sigma_feasibility(ell, &grid).is_none(), "ell {ell}");
    }
    let certified = |c: f64| certify_speed(&sk, c, &CertifyOptions::default()).is_certified();
    assert!(certified(6f64.sqrt() - 1e-3));
    assert!(!certified(6f64.sqrt() + 1e-2));
}
