//! Distance distribution functions on the positive cone.

use serde_json::json;

use crate::report::{require_trials, AxiomReport, CheckResult};
use crate::sampling::SampleRng;
use crate::symcone::{PositiveElement, SymMatrix};
use crate::Result;

/// Monotonicity slack allowed by the checker.
pub const MONOTONE_TOL: f64 = 1e-12;
/// Scale of the `t·e` probe for the limit axiom.
pub const CONE_LIMIT_SCALE: f64 = 1e4;
pub const CONE_LIMIT_FLOOR: f64 = 0.999;
/// Ray parameter `s = 1 − 1e-8` and allowed jump for left continuity.
pub const RAY_STEP: f64 = 1e-8;
pub const RAY_TOL: f64 = 1e-6;

/// A candidate distribution `F : 𝒜₊ → [0, 1]`.
pub trait DistanceDistribution: Send + Sync {
    fn eval(&self, c: &PositiveElement) -> f64;

    fn name(&self) -> &str;
}

/// `H₀`: 0 at θ, 1 elsewhere on the cone.
pub fn h0(c: &PositiveElement) -> f64 {
    if c.is_theta() {
        0.0
    } else {
        1.0
    }
}

/// `D(C) = 1 − e^{−tr C}`, which is 0 at θ.
pub fn exp_trace(c: &PositiveElement) -> f64 {
    // `+ 0.0` turns the `-0.0` produced at θ into `0.0`.
    -(-c.trace()).exp_m1() + 0.0
}

#[derive(Debug, Clone, Copy, Default)]
pub struct H0;

impl DistanceDistribution for H0 {
    fn eval(&self, c: &PositiveElement) -> f64 {
        h0(c)
    }

    fn name(&self) -> &str {
        "H0"
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExpTrace;

impl DistanceDistribution for ExpTrace {
    fn eval(&self, c: &PositiveElement) -> f64 {
        exp_trace(c)
    }

    fn name(&self) -> &str {
        "exp-trace"
    }
}

pub struct FnDistribution<F> {
    name: String,
    f: F,
}

impl<F> FnDistribution<F>
where
    F: Fn(&PositiveElement) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<F> DistanceDistribution for FnDistribution<F>
where
    F: Fn(&PositiveElement) -> f64 + Send + Sync,
{
    fn eval(&self, c: &PositiveElement) -> f64 {
        (self.f)(c)
    }

    fn name(&self) -> &str {
        &self.name
    }
}

/// Checks a candidate against the distribution axioms on sampled cone
/// elements:
///
/// * `zero_at_theta`: `F(θ) = 0` exactly;
/// * `unit_range`: sampled values lie in `[0, 1]`;
/// * `monotone`: `A ⪯ B ⇒ F(A) ≤ F(B) + 1e-12` on comparable pairs `B = A + P`;
/// * `cone_limit`: `F(10⁴·e) ≥ 0.999`, a proxy for the limit along
///   trace-unbounded increasing chains;
/// * `ray_left_continuity`: `|F((1 − 1e-8)·C) − F(C)| ≤ 1e-6` for sampled
///   `C ≻ θ`, so the ray is taken on `(0, 1]`.
pub fn check_ddf_axioms<D>(
    ddf: &D,
    sampler: impl Fn(&mut SampleRng) -> PositiveElement,
    trials: usize,
    rng: &mut SampleRng,
) -> Result<AxiomReport>
where
    D: DistanceDistribution + ?Sized,
{
    require_trials(trials)?;
    let mut zero = CheckResult::new("zero_at_theta");
    let mut range = CheckResult::new("unit_range");
    let mut monotone = CheckResult::new("monotone");
    let mut limit = CheckResult::new("cone_limit");
    let mut ray = CheckResult::new("ray_left_continuity");

    let first = sampler(rng);
    let dim = first.dim();

    let at_theta = ddf.eval(&PositiveElement::zero(dim));
    zero.record(at_theta == 0.0, Some(0.0 - at_theta.abs()), || json!({ "F(theta)": at_theta }));

    let big = PositiveElement::identity(dim).scaled(CONE_LIMIT_SCALE);
    let far = ddf.eval(&big);
    limit.record(far >= CONE_LIMIT_FLOOR, Some(far - CONE_LIMIT_FLOOR), || {
        json!({ "t": CONE_LIMIT_SCALE, "F(t*e)": far })
    });

    let mut pending = Some(first);
    for _ in 0..trials {
        let a = pending.take().unwrap_or_else(|| sampler(rng));
        let bump = sampler(rng);
        let b = a.plus(&bump)?;

        let (fa, fb) = (ddf.eval(&a), ddf.eval(&b));
        for (c, v) in [(&a, fa), (&b, fb)] {
            let inside = (0.0..=1.0).contains(&v);
            range.record(inside, None, || json!({ "C": c, "F": v }));
        }

        if a.loewner_leq(&b)? {
            let margin = fb + MONOTONE_TOL - fa;
            monotone.record(margin >= 0.0, Some(margin), || {
                json!({ "A": &a, "B": &b, "F(A)": fa, "F(B)": fb })
            });
        }

        if !b.is_theta() {
            let shrunk = b.scaled(1.0 - RAY_STEP);
            let jump = (ddf.eval(&shrunk) - fb).abs();
            ray.record(jump <= RAY_TOL, Some(RAY_TOL - jump), || {
                json!({ "C": &b, "s": 1.0 - RAY_STEP, "jump": jump })
            });
        }
    }

    Ok(AxiomReport::new(ddf.name(), trials, vec![zero, range, monotone, limit, ray]))
}

/// `F(t·e)` along a scalar ray of the unit, handy for plotting.
pub fn profile_on_unit_ray<D: DistanceDistribution + ?Sized>(
    ddf: &D,
    dim: usize,
    scales: &[f64],
) -> Vec<f64> {
    scales
        .iter()
        .map(|s| ddf.eval(&PositiveElement::new(SymMatrix::scalar(dim, s.max(0.0))).expect("scalar ray")))
        .collect()
}
