//! Acceptance suite. Each test reports one PASS/FAIL line and then asserts.
//!
//! Timed sections run under a global lock so that the parallel test runner
//! does not distort the runtime limits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saranfk::measures::{density, MeasureSpec};
use saranfk::numerics::{gamma, q_beta, q_gamma, re, QContext, C64};
use saranfk::qkernels::{discrete_weight, discrete_weight_limit, q_measure_density_at, q_moment};
use saranfk::qkernels::{DiscreteWeightParams, QMeasureSpec, WeightKind};
use saranfk::registry::{
    builtin_registry, fk_erdelyi_form_agreement, lookup, relative_residual, sample_parameters, verify_identity,
    verify_points, EvalSettings, VerificationResult,
};
use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

static LOCK: Mutex<()> = Mutex::new(());

const SEED: u64 = 42;

// written to the raw stderr handle so the line survives output capture
fn report(n: u32, ok: bool, detail: &str) {
    let line = format!("{} criterion {n}: {detail}\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn run_suite(ids: &[&str], samples: usize, tol: f64, settings: &EvalSettings) -> Vec<VerificationResult> {
    ids.iter()
        .map(|id| {
            let case = lookup(id).unwrap();
            verify_identity(case, SEED, samples, Some(tol), settings).unwrap()
        })
        .collect()
}

fn summary(rs: &[VerificationResult]) -> String {
    rs.iter()
        .map(|r| format!("{} {:.1e}{}", r.id, r.max_rel_residual, if r.pass() { "" } else { " (fail)" }))
        .collect::<Vec<_>>()
        .join(", ")
}

fn suite_criterion(n: u32, ids: &[&str], samples: usize, tol: f64, limit: Duration, settings: &EvalSettings) {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let rs = run_suite(ids, samples, tol, settings);
    let elapsed = start.elapsed();
    let ok = rs.iter().all(|r| r.pass() && r.samples == samples) && elapsed < limit;
    report(n, ok, &format!("{} in {:.2?} (limit {:?})", summary(&rs), elapsed, limit));
    assert!(ok);
}

#[test]
fn criterion_1_classical_integrals() {
    let s = EvalSettings::default();
    assert_eq!(s.order, 96);
    suite_criterion(
        1,
        &["euler-1", "euler-2", "bateman", "erdelyi-1", "erdelyi-2", "erdelyi-3"],
        50,
        1e-9,
        Duration::from_secs(30),
        &s,
    );
}

#[test]
fn criterion_2_fk_erdelyi() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let s = EvalSettings::default();
    assert_eq!(s.multi_order, 32);
    let start = Instant::now();
    let case = lookup("fk-erdelyi").unwrap();
    let r = verify_identity(case, SEED, 10, Some(1e-6), &s).unwrap();
    let pts = sample_parameters(case, SEED, 10).unwrap();
    let mut evals = 0;
    let mut worst: f64 = 0.0;
    for p in &pts {
        let a = fk_erdelyi_form_agreement(p, &s, 64).unwrap();
        evals += a.evaluations;
        worst = worst.max(a.max_rel_diff);
    }
    let elapsed = start.elapsed();
    let ok = r.pass() && worst < 1e-10 && elapsed < Duration::from_secs(60);
    report(
        2,
        ok,
        &format!(
            "residual {:.1e}, form agreement {:.1e} over {evals} F_K evaluations, {:.2?}",
            r.max_rel_residual, worst, elapsed
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_3_section_three_suite() {
    suite_criterion(
        3,
        &["f2-curious", "manocha", "manocha-reduced", "fa-erdelyi"],
        20,
        1e-8,
        Duration::from_secs(60),
        &EvalSettings::default(),
    );
}

// (ν, λ, γ, η) with the moment measure well defined and decaying
fn moment_spec(rng: &mut ChaCha8Rng, ctx: QContext) -> QMeasureSpec {
    loop {
        let nu = rng.gen_range(0.1..2.5);
        let lambda = rng.gen_range(0.1..2.5);
        let gamma = rng.gen_range(0.1..2.5);
        let eta = rng.gen_range(0.1..2.5);
        if gamma + eta - lambda - nu < 0.05 {
            continue;
        }
        if let Ok(s) = QMeasureSpec::with_moments(re(nu), re(lambda), re(gamma), re(eta), ctx) {
            return s;
        }
    }
}

#[test]
fn criterion_4_q_moment_oracle() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for q in [0.3, 0.5, 0.7] {
        let ctx = QContext::new(q).unwrap();
        for _ in 0..20 {
            let spec = moment_spec(&mut rng, ctx);
            let lattice = spec.discretize(0).unwrap();
            for ell in 0..=8 {
                let closed = q_moment(&spec, ell).unwrap();
                let sum = lattice.integrate(|t| Ok(re(t.powi(ell as i32)))).unwrap();
                worst = worst.max(relative_residual(closed, sum));
                checks += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-10 && elapsed < Duration::from_secs(10);
    report(4, ok, &format!("{checks} moments, worst {:.1e}, {:.2?}", worst, elapsed));
    assert!(ok);
}

const Q_SUITE: [&str; 9] = [
    "gasper-q-erdelyi-1",
    "gasper-q-erdelyi-3",
    "ernst-q-bateman",
    "joshi-vyas-general",
    "qfk-phi3",
    "qfk-phi3-x0",
    "qfk-lr",
    "qfk-erdelyi",
    "qfk-erdelyi-simplified",
];

#[test]
fn criterion_5_q_identity_suite() {
    for id in Q_SUITE {
        let pts = sample_parameters(lookup(id).unwrap(), SEED, 10).unwrap();
        assert!(pts.iter().all(|p| p.arguments.values().all(|z| z.norm() <= 0.3)), "{id}");
    }
    let s = EvalSettings::default();
    assert_eq!(s.q, 0.5);
    suite_criterion(5, &Q_SUITE, 10, 1e-8, Duration::from_secs(120), &s);
}

#[test]
fn criterion_6_discrete_exactness() {
    let n: Vec<usize> = sample_parameters(lookup("gasper-discrete").unwrap(), SEED, 10)
        .unwrap()
        .iter()
        .map(|p| p.index("n").unwrap())
        .collect();
    assert!(n.iter().all(|&n| n <= 3));
    for p in sample_parameters(lookup("fk-discrete").unwrap(), SEED, 10).unwrap() {
        let o = [p.index("r").unwrap(), p.index("s").unwrap(), p.index("t").unwrap()];
        assert!(o == [2, 2, 2] || o == [3, 1, 2], "{o:?}");
    }
    suite_criterion(
        6,
        &["gasper-discrete", "fk-discrete"],
        10,
        1e-12,
        Duration::from_secs(10),
        &EvalSettings::default(),
    );
}

fn weight_params(rng: &mut ChaCha8Rng) -> DiscreteWeightParams {
    let off_int = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| loop {
        let v: f64 = rng.gen_range(lo..hi);
        if (v - v.round()).abs() > 0.05 {
            return v;
        }
    };
    let mu1 = rng.gen_range(0.1..1.0);
    let mu2 = rng.gen_range(0.1..1.0);
    DiscreteWeightParams {
        alpha1: re(off_int(rng, mu1, mu1 + 1.5)),
        beta2: re(off_int(rng, mu2, mu2 + 1.5)),
        gamma1: re(rng.gen_range(0.1..2.5)),
        gamma2: re(rng.gen_range(0.1..2.5)),
        gamma3: re(rng.gen_range(0.1..2.5)),
        lambda1: re(rng.gen_range(0.1..2.5)),
        lambda2: re(rng.gen_range(0.1..2.5)),
        mu1: re(mu1),
        mu2: re(mu2),
        mu3: re(rng.gen_range(0.1..2.5)),
    }
}

#[test]
fn criterion_7_limit_coherence() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();

    let ctx = QContext::new(0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let r = 50;
    let mut weights: f64 = 0.0;
    for _ in 0..10 {
        let p = weight_params(&mut rng);
        for kind in [WeightKind::W1, WeightKind::W2, WeightKind::W3] {
            for i in 0..=10 {
                let w = discrete_weight(kind, r - i, r, &p, &ctx).unwrap();
                let lim = discrete_weight_limit(kind, i, &p, &ctx).unwrap();
                weights = weights.max(relative_residual(lim, w));
            }
        }
    }

    let near = QContext::new(1.0 - 1e-4).unwrap();
    let rel = |a: C64, b: C64| (a - b).norm() / b.norm();
    let mut classical: f64 = 0.0;
    for x in [0.3, 0.7, 1.0, 1.5, 2.5, 4.2] {
        classical = classical.max(rel(q_gamma(re(x), &near).unwrap(), gamma(re(x)).unwrap()));
    }
    for (a, b) in [(0.5, 0.5), (1.2, 2.7), (3.0, 0.4)] {
        let beta = gamma(re(a)).unwrap() * gamma(re(b)).unwrap() / gamma(re(a + b)).unwrap();
        classical = classical.max(rel(q_beta(re(a), re(b), &near).unwrap(), beta));
    }
    let q = near.q();
    for (a, b) in [(0.5, 0.5), (1.2, 2.7), (3.0, 0.4)] {
        let qs = QMeasureSpec::dirichlet(re(a), re(b), near).unwrap();
        let cs = MeasureSpec::dirichlet_real(a, b).unwrap();
        // bulk points: the pointwise deviation grows like (1−q)/(1−t) near t = 1
        for t0 in [0.25f64, 0.5, 0.75] {
            let n = (t0.ln() / q.ln()).round() as usize;
            let t = q.powi(n as i32);
            let qd = q_measure_density_at(&qs, n).unwrap();
            classical = classical.max(rel(qd, density(&cs, t).unwrap()));
        }
    }
    let elapsed = start.elapsed();
    let ok = weights < 1e-5 && classical < 1e-3;
    report(
        7,
        ok,
        &format!("weights at r = 50: {:.1e}; q → 1 limits: {:.1e}; {:.2?}", weights, classical, elapsed),
    );
    assert!(ok);
}

#[test]
fn criterion_8_refinement_monotonicity() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let base = EvalSettings::default();
    let fine = base.refined();
    let mut checked = 0;
    let mut bad = Vec::new();
    for case in builtin_registry() {
        let pts = sample_parameters(case, SEED, 5).unwrap();
        let a = verify_points(case, &pts, case.tol, &base);
        if !a.pass() {
            continue;
        }
        checked += 1;
        let b = verify_points(case, &pts, case.tol, &fine);
        if !(b.failures.is_empty() && b.max_rel_residual <= 2.0 * a.max_rel_residual) {
            bad.push(format!("{} {:.1e} -> {:.1e}", case.id, a.max_rel_residual, b.max_rel_residual));
        }
    }
    let ok = bad.is_empty() && checked == builtin_registry().len();
    report(
        8,
        ok,
        &format!("{checked} passing identities refined, {} regressions {:?}, {:.2?}", bad.len(), bad, start.elapsed()),
    );
    assert!(ok);
}

#[test]
fn criterion_9_corrupted_identity() {
    let _g = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let s = EvalSettings::default();
    let mut lines = Vec::new();
    let mut ok = true;
    for id in ["euler-1", "bateman", "gasper-q-erdelyi-1"] {
        let bad = lookup(id).unwrap().corrupted(1.0 + 1e-4);
        let r = verify_identity(&bad, SEED, 20, None, &s).unwrap();
        let within = (1e-5..=1e-3).contains(&r.max_rel_residual);
        ok &= !r.pass() && within;
        lines.push(format!("{} {:.2e}", r.id, r.max_rel_residual));
    }
    report(9, ok, &lines.join(", "));
    assert!(ok);
}
