//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, at the stated
//! tolerances. Run with `cargo test -p cstar-pm-cli --test acceptance -- --nocapture`.
//!
//! Criterion 4 asks for `a⁻¹ t a⁻¹ ⪯ ‖a⁻¹‖² t` on random pairs. That
//! inequality is false whenever `a` and `t` do not commute, so the criterion
//! is reported as failing; the test asserts that it still fails, so a change
//! in behaviour is noticed.

use std::process::Command;
use std::time::{Duration, Instant};

use cstar_pm::cmetric::check_metric_axioms;
use cstar_pm::contraction::{shrink_certificate, uniqueness_probe, verify_a_contraction};
use cstar_pm::ddf::{check_ddf_axioms, ExpTrace};
use cstar_pm::fredholm::{
    check_contraction_condition, direct_solve, discretize, manufactured_error, observed_orders,
    picard_iterate, picard_step_bound, random_function_pair, verify_d_contraction, FredholmProblem, GSpec,
};
use cstar_pm::pmspace::{
    convergence_tail_index, sequence_cauchy, sequence_converges, verify_pm_axioms, SequenceDiagnostics,
};
use cstar_pm::sampling::{random_above, random_point, random_positive};
use cstar_pm::tnorm::hadzic_check;
use cstar_pm::{
    make_inverted_pm, make_ratio_pm, make_trace_pm, picard_solve, seeded, AffineMap2, ContractionConstant,
    DiagMetric, Error, PicardOptions, PointR2, TMin, TProd,
};

const KNOWN_FAILURES: &[u32] = &[4];
const SEED: u64 = 42;

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn criterion_1() -> Outcome {
    let (report, took) = timed(|| {
        check_metric_axioms(&DiagMetric, |r| random_point(r, 10.0), 2000, &mut seeded(SEED)).unwrap()
    });
    let counterexamples = report.failures().count();
    outcome(
        report.all_passed() && took < Duration::from_secs(1),
        format!("{counterexamples} failing checks over 2000 triples in {took:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let (report, took) = timed(|| {
        check_ddf_axioms(&ExpTrace, |r| random_positive(r, 2, 1.5), 2000, &mut seeded(SEED)).unwrap()
    });
    let pairs = report.check("monotone").unwrap().evaluated;
    let far = cstar_pm::ddf::exp_trace(&cstar_pm::PositiveElement::identity(2).scaled(1e4));
    outcome(
        report.all_passed() && pairs >= 2000 && far > 0.999 && took < Duration::from_secs(1),
        format!("{pairs} comparable pairs, F(1e4 e) = {far}, {took:.2?}"),
    )
}

fn criterion_3() -> Outcome {
    let points = |r: &mut _| random_point(r, 10.0);
    let cone = |r: &mut _| random_positive(r, 2, 2.0);
    let trace = verify_pm_axioms(&make_trace_pm(DiagMetric), points, cone, 2000, &mut seeded(SEED)).unwrap();
    let ratio = verify_pm_axioms(&make_ratio_pm(DiagMetric), points, cone, 2000, &mut seeded(SEED)).unwrap();
    let broken =
        verify_pm_axioms(&make_inverted_pm(DiagMetric), points, cone, 2000, &mut seeded(SEED)).unwrap();
    let caught = !broken.check("triangle").unwrap().ok();
    outcome(
        trace.all_passed() && ratio.all_passed() && caught,
        format!(
            "trace {}, ratio {}, inverted kernel counterexample found: {caught}",
            if trace.all_passed() { "passes" } else { "fails" },
            if ratio.all_passed() { "passes" } else { "fails" },
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = seeded(SEED);
    let (mut loewner_failures, mut norm_failures, mut worst) = (0, 0, f64::INFINITY);
    let mut drawn = 0;
    while drawn < 1000 {
        let a = ContractionConstant::new(random_above(&mut rng, 2, 1.05, 2.0)).unwrap();
        let t = random_positive(&mut rng, 2, 2.0);
        if t.is_theta() {
            continue;
        }
        drawn += 1;
        let cert = shrink_certificate(&a, &t).unwrap();
        worst = worst.min(cert.loewner_margin);
        if cert.loewner_margin < -1e-9 {
            loewner_failures += 1;
        }
        if !(a.inv_norm() < 1.0) {
            norm_failures += 1;
        }
    }
    outcome(
        loewner_failures == 0 && norm_failures == 0,
        format!(
            "Loewner bound violated in {loewner_failures}/1000 draws (worst margin {worst:.3e}); \
             ||a^-1|| < 1 in all but {norm_failures}; the bound needs a and t to commute"
        ),
    )
}

fn criterion_5() -> Outcome {
    let map = AffineMap2::new((1.0, 3.0), (0.5, 0.25)).unwrap();
    let f = |p: &PointR2| map.apply(p);
    let space = make_trace_pm(DiagMetric);
    let options = PicardOptions::default();
    let star = PointR2::new(2.0, 4.0);
    let mut rng = seeded(SEED);
    let (mut ok, mut max_steps, mut max_gap) = (true, 0, 0.0f64);
    for _ in 0..50 {
        let start = random_point(&mut rng, 100.0);
        let trace = picard_solve(&space, f, &start, &options).unwrap();
        let p = trace.fixed_point();
        let gap = (p.x - 2.0).abs().max((p.y - 4.0).abs());
        max_gap = max_gap.max(gap);
        max_steps = max_steps.max(trace.steps);
        ok &= trace.converged && gap <= 1e-8 && trace.steps <= 200;
        let e0 = space.distance(&start, &star).op_norm();
        for (n, q) in trace.iterates.iter().enumerate() {
            ok &= space.distance(q, &star).op_norm() <= 0.5f64.powi(n as i32) * e0 + 1e-9;
        }
    }
    let probe =
        uniqueness_probe(&space, f, &star, |r| random_point(r, 100.0), 50, &options, &mut seeded(SEED)).unwrap();
    outcome(
        ok && probe.unique,
        format!("max sup gap {max_gap:.2e}, max steps {max_steps}, unique: {}", probe.unique),
    )
}

fn criterion_6() -> Outcome {
    let map = AffineMap2::new((1.0, 3.0), (0.5, 0.25)).unwrap();
    let report = verify_a_contraction(
        &make_trace_pm(DiagMetric),
        |p| map.apply(p),
        &map.contraction_constant().unwrap(),
        |r| random_point(r, 100.0),
        |r| random_positive(r, 2, 2.0),
        1000,
        &mut seeded(SEED),
    )
    .unwrap();
    let c = report.check("a_contraction").unwrap();
    outcome(c.ok() && c.evaluated == 1000, format!("{}/{} samples hold", c.passed, c.evaluated))
}

fn criterion_7() -> Outcome {
    let eps = [0.5, 0.1, 0.01, 0.001];
    let min = hadzic_check(&TMin, &eps, 10_000).unwrap();
    let min_ok = min.entries.iter().all(|e| e.delta == Some(e.epsilon));
    let prod = hadzic_check(&TProd, &[0.5], 10_000).unwrap();
    let witness = prod.entries[0].witness;
    let prod_ok = prod.entries[0].delta.is_none() && witness.is_some_and(|w| w.value <= 0.5);
    outcome(
        min_ok && prod_ok,
        format!("t_min delta = epsilon: {min_ok}; t_prod witness: {witness:?}"),
    )
}

fn criterion_8() -> Outcome {
    let (result, took) = timed(|| {
        let prob =
            FredholmProblem::constant((0.0, 1.0), 0.2, [GSpec::Constant(1.0), GSpec::Constant(1.0)], 41).unwrap();
        let cond = check_contraction_condition(&prob).unwrap();
        let sys = discretize(&prob).unwrap();
        let picard = picard_iterate(&sys, 1e-10, 10_000).unwrap();
        let direct = direct_solve(&sys).unwrap();
        let bound = picard_step_bound(cond.kappa, 1e-10, picard.first_step);
        (picard.sup_distance(&direct), picard.iterations, bound, cond.kappa)
    });
    let (gap, iterations, bound, kappa) = result;
    outcome(
        gap <= 1e-8 && iterations <= bound && (kappa - 0.8).abs() < 1e-12 && took < Duration::from_secs(1),
        format!("kappa {kappa}, sup gap {gap:.2e}, {iterations} iterations (bound {bound}), {took:.2?}"),
    )
}

fn criterion_9() -> Outcome {
    let c = [[0.2, 0.1], [0.1, 0.2]];
    let errors: Vec<f64> = [11, 21, 41, 81].iter().map(|&m| manufactured_error(c, m).unwrap()).collect();
    let orders = observed_orders(&errors);
    let ok = orders.iter().all(|p| (1.8..=2.2).contains(p));
    let shown: Vec<String> = errors.iter().map(|e| format!("{e:.2e}")).collect();
    outcome(ok, format!("errors [{}], orders {orders:.3?}", shown.join(", ")))
}

fn criterion_10() -> Outcome {
    let g = || [GSpec::Constant(1.0), GSpec::Constant(1.0)];
    let good = FredholmProblem::constant((0.0, 1.0), 0.2, g(), 41).unwrap();
    let report = verify_d_contraction(&good, |r| random_function_pair(r, 41, 1.0), 500, &mut seeded(SEED)).unwrap();
    let bad = FredholmProblem::constant((0.0, 1.0), 0.3, g(), 41).unwrap();
    let rejected = matches!(
        verify_d_contraction(&bad, |r| random_function_pair(r, 41, 1.0), 500, &mut seeded(SEED)),
        Err(Error::Precondition(_))
    );
    outcome(
        report.all_passed() && rejected,
        format!("kappa 0.8 passes: {}; kappa 1.2 rejected: {rejected}", report.all_passed()),
    )
}

fn criterion_11() -> Outcome {
    let space = make_trace_pm(DiagMetric);
    let origin = PointR2::new(0.0, 0.0);
    let grid = SequenceDiagnostics::dyadic_grid(2, 8);
    let seq: Vec<PointR2> = (0..60).map(|n| PointR2::new(2f64.powi(-n), 0.0)).collect();
    let mut tails = Vec::new();
    let mut ok = true;
    for lambda in [0.1, 0.01, 0.001] {
        match convergence_tail_index(&space, &seq, &origin, &grid, lambda) {
            Some(tail) => {
                let diag = SequenceDiagnostics::new(grid.clone(), lambda, tail).unwrap();
                ok &= sequence_converges(&space, &seq, &origin, &diag).unwrap();
                tails.push(tail);
            }
            None => ok = false,
        }
    }
    let alternating: Vec<PointR2> =
        (0..40).map(|n| if n % 2 == 0 { origin } else { PointR2::new(3.0, 4.0) }).collect();
    let diag = SequenceDiagnostics::new(grid, 0.1, 0).unwrap();
    let rejected = !sequence_cauchy(&space, &alternating, &diag).unwrap();
    outcome(ok && rejected, format!("tail indices {tails:?}; alternating rejected: {rejected}"))
}

fn criterion_12() -> Outcome {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let status = Command::new(env!("CARGO_BIN_EXE_cstar-pm"))
            .args(["check-axioms", "--space", "trace", "--trials", "2000", "--seed", "42", "--output"])
            .arg(&path)
            .output()
            .unwrap()
            .status;
        let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        (status.code(), report["digest"].as_str().unwrap().to_owned())
    };
    let (a, b) = (run(), run());
    outcome(
        a.0 == Some(0) && b.0 == Some(0) && a.1 == b.1,
        format!("exit codes {:?}/{:?}, digests equal: {}", a.0, b.0, a.1 == b.1),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 12] = [
        (1, "metric axioms", criterion_1),
        (2, "distribution axioms", criterion_2),
        (3, "PM axioms", criterion_3),
        (4, "shrinking lemma", criterion_4),
        (5, "fixed point", criterion_5),
        (6, "a-contraction certificate", criterion_6),
        (7, "Hadzic diagnostic", criterion_7),
        (8, "Fredholm oracle equivalence", criterion_8),
        (9, "manufactured solution", criterion_9),
        (10, "D-contraction on function space", criterion_10),
        (11, "sequence diagnostics", criterion_11),
        (12, "CLI determinism", criterion_12),
    ];
    let mut unexpected = Vec::new();
    for (n, name, check) in criteria {
        let o = check();
        println!("criterion {n:>2} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if o.pass == KNOWN_FAILURES.contains(&n) {
            unexpected.push(n);
        }
    }
    assert!(unexpected.is_empty(), "criteria with unexpected outcome: {unexpected:?}");
}
