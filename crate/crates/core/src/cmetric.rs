//! Metrics valued in the positive cone of a matrix algebra.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::report::{require_trials, AxiomReport, CheckResult};
use crate::sampling::SampleRng;
use crate::symcone::{PositiveElement, SymMatrix, POSITIVITY_SCALE};
use crate::Result;

/// Anything a checker can sample, compare and print.
pub trait Point: Clone + PartialEq + Debug + Serialize + Send + Sync {}
impl<T: Clone + PartialEq + Debug + Serialize + Send + Sync> Point for T {}

/// Points that can be pulled toward an origin, used to shrink witnesses.
pub trait Scalable {
    fn scaled(&self, factor: f64) -> Self;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointR2 {
    pub x: f64,
    pub y: f64,
}

impl PointR2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Scalable for PointR2 {
    fn scaled(&self, factor: f64) -> Self {
        Self::new(self.x * factor, self.y * factor)
    }
}

impl From<(f64, f64)> for PointR2 {
    fn from((x, y): (f64, f64)) -> Self {
        Self::new(x, y)
    }
}

/// A pair of functions sampled on a fixed grid, the point type of the
/// integral-equation application.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionPair {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FunctionPair {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        assert_eq!(u.len(), v.len(), "function samples must share a grid");
        Self { u, v }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

impl Scalable for FunctionPair {
    fn scaled(&self, factor: f64) -> Self {
        Self {
            u: self.u.iter().map(|x| x * factor).collect(),
            v: self.v.iter().map(|x| x * factor).collect(),
        }
    }
}

/// A map `d : X × X → 𝒜₊`.
///
/// Values are returned as plain symmetric matrices so that candidate metrics
/// which leave the cone can still be inspected by [`check_metric_axioms`].
pub trait CStarMetric<P>: Send + Sync {
    fn distance(&self, p: &P, q: &P) -> SymMatrix;

    fn algebra_dim(&self) -> usize;

    fn name(&self) -> &str {
        "metric"
    }

    /// Distance certified to lie in the cone.
    fn positive_distance(&self, p: &P, q: &P) -> Result<PositiveElement> {
        PositiveElement::new(self.distance(p, q))
    }
}

/// `d(p, q) = diag(|p.x − q.x|, |p.y − q.y|)` on the plane.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiagMetric;

impl CStarMetric<PointR2> for DiagMetric {
    fn distance(&self, p: &PointR2, q: &PointR2) -> SymMatrix {
        SymMatrix::diag(&[(p.x - q.x).abs(), (p.y - q.y).abs()])
    }

    fn algebra_dim(&self) -> usize {
        2
    }

    fn name(&self) -> &str {
        "diag"
    }
}

pub fn diag_metric(p: &PointR2, q: &PointR2) -> PositiveElement {
    PositiveElement::diag(&[(p.x - q.x).abs(), (p.y - q.y).abs()])
        .expect("absolute differences are non-negative")
}

/// `d((u₁,v₁),(u₂,v₂)) = s·e` with `s = ‖u₁−u₂‖∞ + ‖v₁−v₂‖∞` over the grid.
#[derive(Debug, Clone, Copy, Default)]
pub struct SupSumMetric;

impl SupSumMetric {
    pub fn gap(p: &FunctionPair, q: &FunctionPair) -> f64 {
        sup_distance(&p.u, &q.u) + sup_distance(&p.v, &q.v)
    }
}

pub(crate) fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

impl CStarMetric<FunctionPair> for SupSumMetric {
    fn distance(&self, p: &FunctionPair, q: &FunctionPair) -> SymMatrix {
        SymMatrix::scalar(2, Self::gap(p, q))
    }

    fn algebra_dim(&self) -> usize {
        2
    }

    fn name(&self) -> &str {
        "sup-sum"
    }
}

/// A metric given by a closure, for user-supplied candidates.
pub struct FnMetric<F> {
    name: String,
    dim: usize,
    f: F,
}

impl<F> FnMetric<F> {
    pub fn new(name: impl Into<String>, dim: usize, f: F) -> Self {
        Self { name: name.into(), dim, f }
    }
}

impl<P, F> CStarMetric<P> for FnMetric<F>
where
    F: Fn(&P, &P) -> SymMatrix + Send + Sync,
{
    fn distance(&self, p: &P, q: &P) -> SymMatrix {
        (self.f)(p, q)
    }

    fn algebra_dim(&self) -> usize {
        self.dim
    }

    fn name(&self) -> &str {
        &self.name
    }
}

const SHRINK_STEPS: usize = 20;

/// Smallest factor `s ∈ (0, 1]` found by bisection for which `fails(s)`
/// still holds, assuming `fails(1)`.
pub(crate) fn bisect_witness_scale(fails: impl Fn(f64) -> bool) -> f64 {
    if fails(0.0) {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..SHRINK_STEPS {
        let mid = 0.5 * (lo + hi);
        if fails(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn witness<P: Point + Scalable>(points: &[&P], fails: impl Fn(&[P]) -> bool) -> Value {
    let original: Vec<P> = points.iter().map(|p| (*p).clone()).collect();
    let scale_of = |s: f64| original.iter().map(|p| p.scaled(s)).collect::<Vec<_>>();
    let scale = bisect_witness_scale(|s| fails(&scale_of(s)));
    json!({ "points": original, "shrunk_scale": scale, "shrunk_points": scale_of(scale) })
}

fn is_theta(m: &SymMatrix) -> bool {
    m.op_norm() <= POSITIVITY_SCALE
}

fn symmetric_gap(a: &SymMatrix, b: &SymMatrix) -> f64 {
    (a - b).max_abs_entry() - 1e-12 * (1.0 + a.max_abs_entry().max(b.max_abs_entry()))
}

/// Sample-based check of the four metric axioms: positivity, identity of
/// indiscernibles, symmetry and the triangle inequality in the Loewner order.
pub fn check_metric_axioms<P, M>(
    metric: &M,
    sampler: impl Fn(&mut SampleRng) -> P,
    trials: usize,
    rng: &mut SampleRng,
) -> Result<AxiomReport>
where
    P: Point + Scalable,
    M: CStarMetric<P> + ?Sized,
{
    require_trials(trials)?;
    let d = |p: &P, q: &P| metric.distance(p, q);
    let mut positivity = CheckResult::new("positivity");
    let mut identity = CheckResult::new("identity");
    let mut symmetry = CheckResult::new("symmetry");
    let mut triangle = CheckResult::new("triangle");

    for _ in 0..trials {
        let (x, y, z) = (sampler(rng), sampler(rng), sampler(rng));

        let dxy = d(&x, &y);
        let min_eig = dxy.min_eigenvalue();
        positivity.record(dxy.is_positive(), Some(min_eig), || {
            witness(&[&x, &y], |w| !d(&w[0], &w[1]).is_positive())
        });

        let self_ok = is_theta(&d(&x, &x));
        let distinct_ok = x == y || !is_theta(&dxy);
        identity.record(self_ok && distinct_ok, None, || {
            json!({ "points": [&x, &y], "d_xx": d(&x, &x), "d_xy": &dxy })
        });

        let gap = symmetric_gap(&dxy, &d(&y, &x));
        symmetry.record(gap <= 0.0, Some(-gap), || {
            witness(&[&x, &y], |w| symmetric_gap(&d(&w[0], &w[1]), &d(&w[1], &w[0])) > 0.0)
        });

        let slack = |x: &P, y: &P, z: &P| &(&d(x, z) + &d(z, y)) - &d(x, y);
        let s = slack(&x, &y, &z);
        triangle.record(s.is_positive(), Some(s.min_eigenvalue()), || {
            witness(&[&x, &y, &z], |w| !slack(&w[0], &w[1], &w[2]).is_positive())
        });
    }

    Ok(AxiomReport::new(metric.name(), trials, vec![positivity, identity, symmetry, triangle]))
}
