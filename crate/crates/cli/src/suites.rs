//! The command suites behind each subcommand.

use std::path::Path;

use cstar_pm::cmetric::{check_metric_axioms, DiagMetric};
use cstar_pm::contraction::{uniqueness_probe, verify_a_contraction};
use cstar_pm::ddf::{check_ddf_axioms, profile_on_unit_ray, ExpTrace};
use cstar_pm::fredholm::{
    check_contraction_condition, direct_solve, discretize, picard_iterate, picard_step_bound,
    random_function_pair, verify_d_contraction,
};
use cstar_pm::pmspace::{
    check_neighborhood_monotone, convergence_tail_index, hausdorff_witness, sequence_cauchy,
    sequence_converges, verify_pm_axioms, SequenceDiagnostics,
};
use cstar_pm::sampling::{random_point, random_positive, split};
use cstar_pm::tnorm::{check_tnorm_axioms, hadzic_check, HadzicBasis};
use cstar_pm::{
    make_inverted_pm, make_ratio_pm, make_trace_pm, picard_solve, seeded, AffineMap2, PMSpace,
    PicardOptions, PointR2, PositiveElement, TMin, TNorm, TProd,
};
use serde_json::json;

use crate::config::parse_fredholm_config;
use crate::report::{CheckEntry, Report};
use crate::UsageError;

/// Half-width of the box random points are drawn from.
const POINT_BOX: f64 = 10.0;
const START_BOX: f64 = 100.0;
/// Sup-norm agreement between the Picard fixed point and the closed form.
const FIXED_POINT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SpaceKind {
    /// Exponential-trace kernel `1 − exp(−tr C / tr d)`.
    Trace,
    /// Ratio kernel `tr C / tr(C + d)`.
    Ratio,
    /// Trace kernel with inverted scaling, expected to fail.
    Inverted,
}

impl SpaceKind {
    fn label(self) -> &'static str {
        match self {
            Self::Trace => "trace",
            Self::Ratio => "ratio",
            Self::Inverted => "inverted",
        }
    }

    fn space(self) -> PMSpace<PointR2> {
        match self {
            Self::Trace => make_trace_pm(DiagMetric),
            Self::Ratio => make_ratio_pm(DiagMetric),
            Self::Inverted => make_inverted_pm(DiagMetric),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TNormKind {
    Min,
    Prod,
}

pub fn check_axioms(space: SpaceKind, trials: usize, seed: u64) -> Result<Report, UsageError> {
    let mut report = Report::new(
        "check-axioms",
        json!({ "space": space.label(), "trials": trials, "seed": seed }),
    );
    let mut rng = seeded(seed);
    let points = |r: &mut _| random_point(r, POINT_BOX);
    let cone = |r: &mut _| random_positive(r, 2, 2.0);

    if space != SpaceKind::Inverted {
        let metric = check_metric_axioms(&DiagMetric, points, trials, &mut split(&mut rng))?;
        report.extend_from("metric", &metric);
        report.extend_from("tnorm", &check_tnorm_axioms(&TMin, 101)?);
    }
    if space == SpaceKind::Trace {
        let ddf = check_ddf_axioms(&ExpTrace, cone, trials, &mut split(&mut rng))?;
        report.extend_from("ddf", &ddf);
    }
    let pm = verify_pm_axioms(&space.space(), points, cone, trials, &mut split(&mut rng))?;
    report.extend_from("pm", &pm);
    Ok(report)
}

pub fn pm_demo(seed: u64) -> Result<Report, UsageError> {
    let mut report = Report::new("pm-demo", json!({ "seed": seed }));
    let origin = PointR2::new(0.0, 0.0);
    let q = PointR2::new(3.0, 4.0);
    let scales = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];

    for kind in [SpaceKind::Trace, SpaceKind::Ratio] {
        let space = kind.space();
        let curve = profile_on_unit_ray(&space.pair(&origin, &q), 2, &scales);
        report.set_result(&format!("profile_{}", kind.label()), json!({ "s": scales, "F": curve }));
    }

    let space = make_trace_pm(DiagMetric);
    let mut rng = seeded(seed);
    let cloud: Vec<PointR2> = std::iter::once(origin)
        .chain(std::iter::once(q))
        .chain((0..200).map(|_| random_point(&mut rng, POINT_BOX)))
        .collect();
    let witness = hausdorff_witness(&space, &origin, &q, &cloud)?;
    report.push(CheckEntry::verdict(
        "topology.hausdorff",
        witness.is_some(),
        json!({ "p": origin, "q": q, "reason": "no disjoint neighborhoods found" }),
    ));
    let small = PositiveElement::identity(2).scaled(0.5);
    let large = PositiveElement::identity(2).scaled(2.0);
    let nested = check_neighborhood_monotone(&space, &origin, &small, &large, 0.1, 0.3, &cloud)?;
    report.push(CheckEntry::verdict(
        "topology.neighborhood_monotone",
        nested,
        json!({ "t1": small, "t2": large, "lambda1": 0.1, "lambda2": 0.3 }),
    ));

    let grid = SequenceDiagnostics::dyadic_grid(2, 8);
    let halving: Vec<PointR2> = (0..60).map(|n| PointR2::new(2f64.powi(-n), 0.0)).collect();
    let mut tails = Vec::new();
    for lambda in [0.1, 0.01, 0.001] {
        let name = format!("sequence.halving_converges.lambda={lambda}");
        match convergence_tail_index(&space, &halving, &origin, &grid, lambda) {
            Some(tail) => {
                let diag = SequenceDiagnostics::new(grid.clone(), lambda, tail)?;
                let ok = sequence_converges(&space, &halving, &origin, &diag)?
                    && sequence_cauchy(&space, &halving, &diag)?;
                report.push(
                    CheckEntry::verdict(&name, ok, json!({ "tail_index": tail }))
                        .with_note(format!("tail index {tail}")),
                );
                tails.push(json!({ "lambda": lambda, "tail_index": tail }));
            }
            None => report.push(CheckEntry::verdict(&name, false, json!({ "tail_index": null }))),
        }
    }
    report.set_result("halving_tail_indices", tails);

    let alternating: Vec<PointR2> = (0..40).map(|n| if n % 2 == 0 { origin } else { q }).collect();
    let diag = SequenceDiagnostics::new(grid, 0.1, 0)?;
    let cauchy = sequence_cauchy(&space, &alternating, &diag)?;
    report.push(CheckEntry::verdict(
        "sequence.alternating_rejected",
        !cauchy,
        json!({ "sequence": "alternating (0,0), (3,4)", "accepted_as_cauchy": cauchy }),
    ));
    Ok(report)
}

pub struct FixedPointArgs {
    pub alpha: (f64, f64),
    pub lambda: (f64, f64),
    pub start: (f64, f64),
    pub starts: usize,
    pub trials: usize,
    pub seed: u64,
}

pub fn fixed_point(args: &FixedPointArgs) -> Result<Report, UsageError> {
    let mut report = Report::new(
        "fixed-point",
        json!({
            "alpha": [args.alpha.0, args.alpha.1],
            "lambda": [args.lambda.0, args.lambda.1],
            "start": [args.start.0, args.start.1],
            "starts": args.starts,
            "trials": args.trials,
            "seed": args.seed,
        }),
    );
    let map = AffineMap2::new(args.alpha, args.lambda)?;
    let f = |p: &PointR2| map.apply(p);
    let space = make_trace_pm(DiagMetric);
    let options = PicardOptions::default();
    let start = PointR2::new(args.start.0, args.start.1);
    if !start.is_finite() {
        return Err(UsageError("start point must be finite".into()));
    }
    let trace = picard_solve(&space, f, &start, &options)?;
    let found = *trace.fixed_point();
    let exact = map.fixed_point();
    let gap = (found.x - exact.x).abs().max((found.y - exact.y).abs());

    report.push(CheckEntry::verdict(
        "picard.converged",
        trace.converged,
        json!({ "steps": trace.steps, "residual": trace.residual }),
    ));
    report.push(CheckEntry::verdict(
        "picard.closed_form",
        gap <= FIXED_POINT_TOL,
        json!({ "found": found, "closed_form": exact, "sup_gap": gap }),
    ));
    let e0 = space.distance(&start, &exact).op_norm();
    let violation = trace.iterates.iter().enumerate().find_map(|(n, p)| {
        let e = space.distance(p, &exact).op_norm();
        let bound = map.rate().powi(n as i32) * e0 + 1e-9;
        (e > bound).then(|| json!({ "n": n, "error": e, "bound": bound }))
    });
    report.push(CheckEntry::verdict("picard.error_bound", violation.is_none(), violation.unwrap_or_default()));

    let mut rng = seeded(args.seed);
    let constant = map.contraction_constant()?;
    let contraction = verify_a_contraction(
        &space,
        f,
        &constant,
        |r| random_point(r, START_BOX),
        |r| random_positive(r, 2, 2.0),
        args.trials,
        &mut split(&mut rng),
    )?;
    report.extend_from("contraction", &contraction);

    let unique = uniqueness_probe(
        &space,
        f,
        &found,
        |r| random_point(r, START_BOX),
        args.starts,
        &options,
        &mut split(&mut rng),
    )?;
    let note = if unique.vacuous { "no starts tried".to_owned() } else { format!("{} starts", unique.starts) };
    report.push(
        CheckEntry::verdict(
            "uniqueness",
            unique.unique,
            json!({ "outlier": unique.outlier, "max_deviation": unique.max_deviation }),
        )
        .with_note(note),
    );

    report.headlines.push(format!("fixed point: ({:.12}, {:.12})", found.x, found.y));
    report.headlines.push(format!(
        "closed form: ({}, {}), steps: {}, residual: {:.3e}",
        exact.x,
        exact.y,
        trace.steps,
        trace.residual.unwrap_or(f64::NAN)
    ));

    report.set_result("fixed_point", found);
    report.set_result("closed_form", exact);
    report.set_result("steps", trace.steps);
    report.set_result("residual", trace.residual);
    report.set_result("rate", map.rate());
    Ok(report)
}

pub struct FredholmArgs<'a> {
    pub config: &'a Path,
    pub tol: f64,
    pub max_iter: usize,
    pub trials: usize,
    pub seed: u64,
}

pub fn fredholm_solve(args: &FredholmArgs<'_>) -> Result<Report, UsageError> {
    let path = args.config.display();
    let text = std::fs::read_to_string(args.config)
        .map_err(|e| UsageError(format!("{path}: cannot read config: {e}")))?;
    let problem = parse_fredholm_config(&text).map_err(|e| UsageError(format!("{path}: {e}")))?;
    let raw: serde_json::Value = serde_json::from_str(&text).expect("config parsed above");
    let mut report = Report::new(
        "fredholm solve",
        json!({ "problem": raw, "tol": args.tol, "max_iter": args.max_iter, "trials": args.trials, "seed": args.seed }),
    );
    if !(args.tol > 0.0) {
        return Err(UsageError(format!("tolerance {} must be positive", args.tol)));
    }

    let cond = check_contraction_condition(&problem)?;
    report.set_result("condition", &cond);
    report.push(CheckEntry::verdict(
        "condition",
        cond.passes,
        json!({ "kappa": cond.kappa, "kernel_norm": cond.kernel_norm, "required": "kappa <= 1 - 1e-9" }),
    ));

    let sys = discretize(&problem)?;
    let direct = match direct_solve(&sys) {
        Ok(sol) => {
            let holds = sol.residual <= 1e-9 * (1.0 + sup(&sys.rhs));
            report.push(CheckEntry::verdict("direct.residual", holds, json!({ "residual": sol.residual })));
            Some(sol)
        }
        Err(e) => {
            report.push(CheckEntry::verdict("direct.solve", false, json!({ "error": e.to_string() })));
            None
        }
    };

    if cond.passes {
        match picard_iterate(&sys, args.tol, args.max_iter) {
            Ok(sol) => {
                let bound = picard_step_bound(cond.kappa, args.tol, sol.first_step);
                report.push(CheckEntry::verdict(
                    "picard.step_bound",
                    sol.iterations <= bound,
                    json!({ "iterations": sol.iterations, "bound": bound }),
                ));
                if let Some(d) = &direct {
                    let gap = sol.sup_distance(d);
                    let allowed = 1e-8 + cond.kappa / (1.0 - cond.kappa) * args.tol;
                    report.push(CheckEntry::verdict(
                        "picard.agrees_with_direct",
                        gap <= allowed,
                        json!({ "sup_gap": gap, "allowed": allowed }),
                    ));
                }
                report.set_result("picard", &sol);
            }
            Err(e) => report.push(CheckEntry::verdict("picard.converged", false, json!({ "error": e.to_string() }))),
        }
        let m = problem.m;
        let contraction = verify_d_contraction(
            &problem,
            |r| random_function_pair(r, m, 1.0),
            args.trials,
            &mut seeded(args.seed),
        )?;
        report.extend_from("d_contraction", &contraction);
    } else {
        report.push(CheckEntry::skip("picard", "contraction condition fails"));
        report.push(CheckEntry::skip("d_contraction", "contraction condition fails"));
    }
    report.headlines.push(format!("kappa = {:.6}, kernel norm = {:.6}", cond.kappa, cond.kernel_norm));
    if let Some(d) = direct {
        let mid = d.nodes.len() / 2;
        report.headlines.push(format!(
            "phi1({x}) = {:.10}, phi2({x}) = {:.10}",
            d.phi1[mid],
            d.phi2[mid],
            x = d.nodes[mid]
        ));
        report.set_result("solution", &d);
    }
    Ok(report)
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn hadzic(kind: TNormKind, epsilons: &[f64], n_max: u64) -> Result<Report, UsageError> {
    let tnorm: &dyn TNorm = match kind {
        TNormKind::Min => &TMin,
        TNormKind::Prod => &TProd,
    };
    let mut report =
        Report::new("hadzic", json!({ "tnorm": tnorm.name(), "epsilons": epsilons, "n_max": n_max }));
    let result = hadzic_check(tnorm, epsilons, n_max)?;
    for entry in &result.entries {
        let basis = match entry.basis {
            HadzicBasis::AllOrders => "all n (closed form)".to_owned(),
            HadzicBasis::UpToNMax => format!("n <= {n_max}"),
        };
        let note = match entry.delta {
            Some(delta) => format!("delta = {delta:e}, {basis}"),
            None => format!("no delta on the grid, {basis}"),
        };
        report.push(
            CheckEntry::verdict(
                format!("epsilon={}", entry.epsilon),
                entry.delta.is_some(),
                json!(entry.witness),
            )
            .with_note(note),
        );
    }
    report.set_result("entries", &result.entries);
    Ok(report)
}
