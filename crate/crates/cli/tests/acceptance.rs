//! Acceptance checks: one PASS/FAIL line per criterion, non-zero exit when
//! any criterion fails. Tolerances and runtime limits are part of the
//! contract and are not configurable.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ngp_cert_core::certifier::{verify_sigma, SampledGrid};
use ngp_cert_core::potential::Gaussian;
use ngp_cert_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
    failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, detail: String::new(), failures: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.pass = false;
            self.failures.push(what.into());
        }
    }
}

fn run(id: u32, title: &str, limit: Option<Duration>, body: impl FnOnce(&mut Outcome)) -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    body(&mut out);
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        out.require(elapsed < limit, format!("runtime {elapsed:.2?} exceeds {limit:?}"));
    }
    let tag = if out.pass { "PASS" } else { "FAIL" };
    println!("{tag} criterion {id}: {title} ({elapsed:.2?}){}", if out.detail.is_empty() { String::new() } else { format!("; {}", out.detail) });
    for f in &out.failures {
        println!("    {f}");
    }
    out.pass
}

fn model(spec: PotentialSpec) -> PotentialModel {
    build_potential(spec).expect("documented kernel builds")
}

fn certified_set(verdicts: &[SpeedVerdict]) -> Vec<f64> {
    verdicts.iter().filter(|v| v.is_certified()).map(|v| v.c).collect()
}

fn criterion_1(out: &mut Outcome) {
    let m = model(PotentialSpec::delta(1.0, 2));
    let cs = [0.0, 0.5, 1.0, 1.41, 1.5, 2.0, 5.0, 10.0];
    let rep = sweep(&m, &cs, &CertifyOptions::default());
    let got = certified_set(&rep.verdicts);
    out.detail = format!("certified {got:?}");
    out.require(got == [0.0, 1.5, 2.0, 5.0, 10.0], format!("expected [0, 1.5, 2, 5, 10], got {got:?}"));
}

fn criterion_2(out: &mut Outcome) {
    let m = model(PotentialSpec::radial_sk(1.0, 2.0, 3));
    let ratio = radial_inf_ratio(&m).unwrap_or(f64::NAN);
    out.require((ratio - 0.5).abs() <= 1e-8, format!("radial inf ratio {ratio}, expected 0.5 +- 1e-8"));
    let (lo, hi) = (2f64.sqrt(), 3f64.sqrt());
    let cs: Vec<f64> = (0..100).map(|i| 1.0 + 1.6 * i as f64 / 99.0).collect();
    let rep = sweep(&m, &cs, &CertifyOptions::default());
    let inside_missed: Vec<f64> =
        rep.verdicts.iter().filter(|v| v.c > lo && v.c <= hi && !v.is_certified()).map(|v| v.c).collect();
    let above_certified: Vec<&SpeedVerdict> = rep.verdicts.iter().filter(|v| v.c > hi && v.is_certified()).collect();
    let below_certified: Vec<f64> = rep.verdicts.iter().filter(|v| v.c <= lo && v.is_certified()).map(|v| v.c).collect();
    let n_inside = rep.verdicts.iter().filter(|v| v.c > lo && v.c <= hi).count();
    out.detail = format!(
        "ratio {ratio:.10}; {} of {n_inside} inside certified; {} of {} above certified",
        n_inside - inside_missed.len(),
        above_certified.len(),
        rep.verdicts.iter().filter(|v| v.c > hi).count()
    );
    out.require(inside_missed.is_empty(), format!("inside window not certified at {inside_missed:?}"));
    out.require(below_certified.is_empty(), format!("certified at or below c_s at {below_certified:?}"));
    if let (Some(first), Some(last)) = (above_certified.first(), above_certified.last()) {
        out.require(
            false,
            format!(
                "certified above sqrt(3) for c in [{:.4}, {:.4}] via {} (multiplier conditions hold up to ell = 2)",
                first.c,
                last.c,
                first.route.as_str()
            ),
        );
    }
}

fn criterion_3(out: &mut Outcome) {
    let m = model(PotentialSpec::radial_sk(1.0, 0.4, 2));
    let grid = GridSpec::default_for(&m);
    out.require(corollary_gradient_bound(&m, &grid), "gradient bound does not hold");
    let lo = 2f64.sqrt();
    let cs: Vec<f64> = (1..=60).map(|i| lo + (50.0 - lo) * (i as f64 / 60.0).powi(2)).collect();
    let rep = sweep(&m, &cs, &CertifyOptions::default());
    let missed: Vec<f64> = rep.verdicts.iter().filter(|v| !v.is_certified()).map(|v| v.c).collect();
    out.detail = format!("{} of {} sampled speeds in (sqrt 2, 50] certified", cs.len() - missed.len(), cs.len());
    out.require(missed.is_empty(), format!("not certified at {missed:?}"));
}

fn criterion_4(out: &mut Outcome) {
    let m = model(PotentialSpec::radial_sk(1.0, 1.0, 2));
    let mut worst = 0.0f64;
    for f in [1.1, 1.5, 2.0] {
        let c = f * 2f64.sqrt();
        let alpha = c * c / 2.0 - 1.0;
        match trace_gamma(&m, 2, c, &TraceOptions::default()).and_then(|t| estimate_ell(&t)) {
            Ok(ell) => {
                worst = worst.max((ell - alpha).abs());
                out.require((ell - alpha).abs() <= 1e-4, format!("c = {c}: traced {ell} vs alpha {alpha}"));
            }
            Err(e) => out.require(false, format!("c = {c}: trace failed: {e}")),
        }
    }
    out.detail = format!("max |ell - alpha_c| = {worst:.2e}");
}

fn dipolar_gamma3(a: f64, bt: f64, c: f64, t: f64) -> f64 {
    // √(6b̃t² + (a+2b̃)² + c²t²) − (a+2b̃) − t², in cancellation-free form
    let p = a + 2.0 * bt;
    let q = (6.0 * bt + c * c) * t * t;
    (q / (p + (p * p + q).sqrt()) - t * t).sqrt()
}

fn criterion_5(out: &mut Outcome) {
    let (a, bt) = (1.0, 0.25);
    let m = model(PotentialSpec::dipolar(a, bt));
    let opts = TraceOptions::default();
    let c_star = 3f64.sqrt();

    let mut worst_rel = 0.0f64;
    for c in [c_star, 2.0, 3.0] {
        match trace_gamma(&m, 3, c, &opts) {
            Ok(tr) => {
                for s in tr.samples.iter().filter(|s| s.t >= 1e-3 && s.t <= 0.3) {
                    let exact = dipolar_gamma3(a, bt, c, s.t);
                    worst_rel = worst_rel.max(((s.gamma_plus - exact) / exact).abs());
                }
            }
            Err(e) => out.require(false, format!("gamma_3 trace at c = {c}: {e}")),
        }
    }
    out.require(worst_rel <= 1e-6, format!("gamma_3 relative error {worst_rel:e} > 1e-6"));

    let ell = |j: usize, c: f64| trace_gamma(&m, j, c, &opts).and_then(|t| estimate_ell(&t)).unwrap_or(f64::NAN);
    for c in [c_star, 2.0, 3.0] {
        let (l2, l3) = (ell(2, c), ell(3, c));
        let l2_stated = c * c / 2.0 - 1.0;
        let l3_stated = -1.0 + (6.0 * bt + c * c) / (2.0 * (a + 2.0 * bt));
        out.require((l2 - l2_stated).abs() <= 1e-4, format!("c = {c:.4}: ell_2 = {l2:.6}, stated c^2/2 - 1 = {l2_stated:.6}"));
        out.require((l3 - l3_stated).abs() <= 1e-4, format!("c = {c:.4}: ell_3 = {l3:.6}, stated {l3_stated:.6}"));
    }
    let (l2, l3) = (ell(2, c_star), ell(3, c_star));
    out.require(
        (l2 - 0.5).abs() <= 1e-4 && (l3 - 0.5).abs() <= 1e-4,
        format!("at c = sqrt 3 the slice limits are ({l2:.6}, {l3:.6}), not both 0.5"),
    );

    let spec = GridSpec::default_for(&m);
    for (label, grid) in [("grid", SampledGrid::new(&m, &spec)), ("refined grid", SampledGrid::new(&m, &spec.refined()))] {
        let check = verify_sigma(0.5, &[0.0, 0.5, 0.5], &grid);
        out.require(check.margin >= 0.0 && check.holds(), format!("sigma (0, 1/2, 1/2) on {label}: margin {:e}", check.margin));
    }

    let lo = 2f64.sqrt();
    let mut cs: Vec<f64> = (1..=20).map(|i| lo + (5.0 - lo) * i as f64 / 20.0).collect();
    cs.push(c_star);
    cs.sort_by(f64::total_cmp);
    let rep = sweep(&m, &cs, &CertifyOptions::default());
    let missed: Vec<f64> = rep.verdicts.iter().filter(|v| !v.is_certified()).map(|v| v.c).collect();
    out.require(missed.is_empty(), format!("not certified at {missed:?}"));
    let at_star = rep.verdicts.iter().find(|v| v.c == c_star).expect("c* sampled");
    out.detail = format!(
        "gamma_3 rel err {worst_rel:.1e}; {} of {} speeds above sqrt 2 certified; route at sqrt 3: {}",
        cs.len() - missed.len(),
        cs.len(),
        at_star.route.as_str()
    );
}

fn criterion_6(out: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut disagreements = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=4usize);
        let ell: f64 = rng.gen_range(1e-9..=10.0);
        let sigma: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let sys = build_farkas_system(n, ell, &sigma);

        // closed forms, written out independently
        let s: f64 = sigma[1..].iter().sum();
        let mut closed = vec![-sigma[0] + s - 1.0];
        closed.extend(sigma[1..].iter().map(|sj| sigma[0] + s + 2.0 * ell * sj - 1.0));
        closed.push(sigma[0] + (ell + 2.0) * s - 1.0);
        for (d, c) in sys.dual_components.iter().zip(&closed) {
            worst = worst.max((d - c).abs() / c.abs().max(1.0));
        }

        let per_axis = sigma[1..].iter().map(|sj| s + 2.0 * ell * sj + sigma[0] - 1.0).fold(f64::INFINITY, f64::min);
        let min_form = (s - sigma[0] - 1.0).min(s + (sigma[0] - 1.0) / (ell + 2.0)).min(per_axis);
        let three_forms = sys.dual_components.iter().all(|d| *d >= 0.0);
        let near_boundary = closed.iter().any(|c| c.abs() < 1e-9) || min_form.abs() < 1e-9;
        if !near_boundary && three_forms != (min_form >= 0.0) {
            disagreements += 1;
        }
    }
    out.detail = format!("max relative deviation {worst:.1e}, {disagreements} sign disagreements");
    out.require(worst <= 1e-12, format!("dual components deviate by {worst:e}"));
    out.require(disagreements == 0, format!("{disagreements} instances disagree with the min-form"));
}

fn criterion_7(out: &mut Outcome) {
    for (dim, expected) in [(2, 1.0 / (6.0 * PI)), (3, 1.0 / (7.0 * PI.powf(1.5)))] {
        match epsilon_bound(&Gaussian::default(), dim) {
            Ok(b) => {
                out.require((b.bound - expected).abs() <= 1e-4, format!("N = {dim}: bound {} vs {expected}", b.bound));
                out.detail.push_str(&format!("N={dim}: {:.6} ", b.bound));
            }
            Err(e) => out.require(false, format!("N = {dim}: {e}")),
        }
    }
}

fn criterion_8(out: &mut Outcome) {
    let specs = [
        PotentialSpec::delta(1.0, 2),
        PotentialSpec::delta(2.5, 3),
        PotentialSpec::radial_sk(1.0, 2.0, 3),
        PotentialSpec::radial_sk(1.0, 0.4, 2),
        PotentialSpec::radial_sk(3.0, 1.0, 4),
        PotentialSpec::delta_plus_f(0.05, 2),
        PotentialSpec::delta_plus_f(0.02, 3),
    ];
    let mut checked = 0;
    for spec in specs {
        let m = model(spec.clone());
        let Some(c_s) = sonic_speed(&m).c_s else { continue };
        let mut cs: Vec<f64> = (1..=50).map(|i| c_s * i as f64 / 50.0).collect();
        cs.push(c_s * (1.0 - 1e-12));
        let rep = sweep(&m, &cs, &CertifyOptions::default());
        checked += cs.len();
        let bad = certified_set(&rep.verdicts);
        out.require(bad.is_empty(), format!("{} dim {}: certified at {bad:?}", spec.kind, spec.dim));
    }
    out.detail = format!("{checked} speeds in (0, c_s] checked");
}

type Criterion = (u32, &'static str, Option<Duration>, fn(&mut Outcome));

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "delta sweep certifies {0} and speeds above sqrt 2", Some(Duration::from_secs(5)), criterion_1),
        (2, "SK b=2 N=3 inf ratio and certified window (sqrt 2, sqrt 3]", Some(Duration::from_secs(60)), criterion_2),
        (3, "SK b=0.4 N=2 gradient bound and certification up to 50", None, criterion_3),
        (4, "traced ell matches alpha_c for SK b=1 N=2", None, criterion_4),
        (5, "dipolar branch, slice limits, multiplier and sweep", Some(Duration::from_secs(60)), criterion_5),
        (6, "Farkas dual components and bracketed-form equivalence", None, criterion_6),
        (7, "Gaussian perturbation bounds", None, criterion_7),
        (8, "no certification at or below the sonic speed", None, criterion_8),
    ];
    let mut all = true;
    for (id, title, limit, body) in criteria {
        all &= run(id, title, limit, body);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
