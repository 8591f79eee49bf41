//! Menger PM*-spaces: a C*-metric, a t-norm and a recipe turning the distance
//! `d(p, q)` into a distribution `𝓕_{p,q}` on the positive cone.
//!
//! Two recipes are shipped:
//!
//! * [`TraceRecipe`]: `𝓕_{p,q}(C) = 1 − exp(−tr C / tr d(p,q))`, and `H₀` at `p = q`;
//! * [`RatioRecipe`]: `𝓕_{p,q}(C) = tr C / tr(C + d(p,q))`.
//!
//! Points are considered identical exactly when `d(p, q)` is the zero matrix.
//! Topological notions (neighbourhoods, convergence) are evaluated on finite
//! point lists supplied by the caller.

use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::cmetric::{CStarMetric, Point};
use crate::ddf::{exp_trace, h0, DistanceDistribution};
use crate::error::Error;
use crate::report::{require_trials, AxiomReport, CheckResult};
use crate::sampling::SampleRng;
use crate::symcone::{PositiveElement, SymMatrix};
use crate::tnorm::{TMin, TNorm};
use crate::Result;

/// Tolerance for the identity, symmetry and Menger triangle checks.
pub const PM_TOL: f64 = 1e-12;

/// Turns a distance `d(p, q)` into the value `𝓕_{p,q}(C)`.
pub trait DistributionRecipe: Send + Sync {
    fn evaluate(&self, distance: &SymMatrix, c: &PositiveElement) -> f64;

    fn name(&self) -> &str;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TraceRecipe;

impl DistributionRecipe for TraceRecipe {
    fn evaluate(&self, distance: &SymMatrix, c: &PositiveElement) -> f64 {
        if distance.is_zero() {
            return h0(c);
        }
        // A sub-normal trace would overflow the argument; exp_trace saturates at 1.
        let scale = 1.0 / distance.trace();
        if scale.is_finite() {
            exp_trace(&c.scaled(scale))
        } else {
            h0(c)
        }
    }

    fn name(&self) -> &str {
        "trace"
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RatioRecipe;

impl DistributionRecipe for RatioRecipe {
    fn evaluate(&self, distance: &SymMatrix, c: &PositiveElement) -> f64 {
        let num = c.trace();
        if num <= 0.0 {
            return 0.0;
        }
        num / (num + distance.trace())
    }

    fn name(&self) -> &str {
        "ratio"
    }
}

pub struct FnRecipe<F> {
    name: String,
    f: F,
}

impl<F> FnRecipe<F>
where
    F: Fn(&SymMatrix, &PositiveElement) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<F> DistributionRecipe for FnRecipe<F>
where
    F: Fn(&SymMatrix, &PositiveElement) -> f64 + Send + Sync,
{
    fn evaluate(&self, distance: &SymMatrix, c: &PositiveElement) -> f64 {
        (self.f)(distance, c)
    }

    fn name(&self) -> &str {
        &self.name
    }
}

/// The quadruple `(X, 𝒜, 𝓕, T)`.
pub struct PMSpace<P> {
    name: String,
    metric: Arc<dyn CStarMetric<P>>,
    tnorm: Arc<dyn TNorm>,
    recipe: Arc<dyn DistributionRecipe>,
}

impl<P> Clone for PMSpace<P> {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            metric: Arc::clone(&self.metric),
            tnorm: Arc::clone(&self.tnorm),
            recipe: Arc::clone(&self.recipe),
        }
    }
}

impl<P> PMSpace<P> {
    pub fn new(
        name: impl Into<String>,
        metric: Arc<dyn CStarMetric<P>>,
        tnorm: Arc<dyn TNorm>,
        recipe: Arc<dyn DistributionRecipe>,
    ) -> Self {
        Self { name: name.into(), metric, tnorm, recipe }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn metric(&self) -> &dyn CStarMetric<P> {
        self.metric.as_ref()
    }

    pub fn tnorm(&self) -> &dyn TNorm {
        self.tnorm.as_ref()
    }

    pub fn algebra_dim(&self) -> usize {
        self.metric.algebra_dim()
    }

    pub fn distance(&self, p: &P, q: &P) -> SymMatrix {
        self.metric.distance(p, q)
    }

    /// `𝓕_{p,q}(C)`.
    pub fn distribution(&self, p: &P, q: &P, c: &PositiveElement) -> f64 {
        self.recipe.evaluate(&self.metric.distance(p, q), c)
    }

    /// `𝓕_{p,q}` as a stand-alone distribution function.
    pub fn pair(&self, p: &P, q: &P) -> PairDistribution {
        PairDistribution {
            name: format!("{}[p,q]", self.name),
            distance: self.metric.distance(p, q),
            recipe: Arc::clone(&self.recipe),
        }
    }
}

/// `𝓕_{p,q}` with the distance already evaluated.
pub struct PairDistribution {
    name: String,
    distance: SymMatrix,
    recipe: Arc<dyn DistributionRecipe>,
}

impl DistanceDistribution for PairDistribution {
    fn eval(&self, c: &PositiveElement) -> f64 {
        self.recipe.evaluate(&self.distance, c)
    }

    fn name(&self) -> &str {
        &self.name
    }
}

/// Exponential-trace construction with `T = T_min`.
pub fn make_trace_pm<P, M>(metric: M) -> PMSpace<P>
where
    M: CStarMetric<P> + 'static,
{
    let name = format!("trace/{}", metric.name());
    PMSpace::new(name, Arc::new(metric), Arc::new(TMin), Arc::new(TraceRecipe))
}

/// Trace-ratio construction with `T = T_min`.
pub fn make_ratio_pm<P, M>(metric: M) -> PMSpace<P>
where
    M: CStarMetric<P> + 'static,
{
    let name = format!("ratio/{}", metric.name());
    PMSpace::new(name, Arc::new(metric), Arc::new(TMin), Arc::new(RatioRecipe))
}

/// `exp_trace(tr d(p,q) · C)`: the trace construction with the scaling
/// inverted. It is symmetric and vanishes at θ but breaks the triangle
/// inequality, which makes it a negative control for the checker.
pub fn make_inverted_pm<P, M>(metric: M) -> PMSpace<P>
where
    M: CStarMetric<P> + 'static,
{
    let name = format!("inverted/{}", metric.name());
    let recipe = FnRecipe::new("inverted", |d: &SymMatrix, c: &PositiveElement| {
        if d.is_zero() {
            h0(c)
        } else {
            exp_trace(&c.scaled(d.trace()))
        }
    });
    PMSpace::new(name, Arc::new(metric), Arc::new(TMin), Arc::new(recipe))
}

/// Checks the three PM axioms on sampled points and cone elements:
///
/// * `identity`: `𝓕_{p,p}(t) = 1` for sampled `t ≻ θ`, and for `p ≠ q` some
///   `t · 2⁻ʲ` (`j ≤ 60`) gives `𝓕_{p,q} < 1`;
/// * `symmetry`: `𝓕_{p,q}(t) = 𝓕_{q,p}(t)`;
/// * `triangle`: `𝓕_{p,q}(A + B) ≥ T(𝓕_{p,r}(A), 𝓕_{r,q}(B)) − 1e-12`.
pub fn verify_pm_axioms<P: Point>(
    space: &PMSpace<P>,
    point_sampler: impl Fn(&mut SampleRng) -> P,
    cone_sampler: impl Fn(&mut SampleRng) -> PositiveElement,
    trials: usize,
    rng: &mut SampleRng,
) -> Result<AxiomReport> {
    require_trials(trials)?;
    let f = |p: &P, q: &P, c: &PositiveElement| space.distribution(p, q, c);
    let t_norm = space.tnorm();
    let mut identity = CheckResult::new("identity");
    let mut symmetry = CheckResult::new("symmetry");
    let mut triangle = CheckResult::new("triangle");

    for _ in 0..trials {
        let (p, q, r) = (point_sampler(rng), point_sampler(rng), point_sampler(rng));
        let (a, b) = (cone_sampler(rng), cone_sampler(rng));

        if !a.is_theta() {
            let same = f(&p, &p, &a);
            identity.record((same - 1.0).abs() <= PM_TOL, Some(PM_TOL - (same - 1.0).abs()), || {
                json!({ "p": &p, "t": &a, "F_pp(t)": same })
            });
            if p != q {
                let separates = (0..=60).any(|j| f(&p, &q, &a.scaled(2f64.powi(-j))) < 1.0 - PM_TOL);
                identity.record(separates, None, || {
                    json!({ "p": &p, "q": &q, "t": &a, "reason": "F_pq(t) = 1 along the ray" })
                });
            }
        }

        let (fpq, fqp) = (f(&p, &q, &a), f(&q, &p, &a));
        let gap = (fpq - fqp).abs();
        symmetry.record(gap <= PM_TOL, Some(PM_TOL - gap), || {
            json!({ "p": &p, "q": &q, "t": &a, "F_pq": fpq, "F_qp": fqp })
        });

        let sum = a.plus(&b)?;
        let lhs = f(&p, &q, &sum);
        let rhs = t_norm.apply(f(&p, &r, &a), f(&r, &q, &b));
        let margin = lhs - rhs + PM_TOL;
        triangle.record(margin >= 0.0, Some(margin), || {
            json!({ "p": &p, "q": &q, "r": &r, "A": &a, "B": &b, "lhs": lhs, "rhs": rhs })
        });
    }

    Ok(AxiomReport::new(space.name(), trials, vec![identity, symmetry, triangle]))
}

/// Parameters of the strong neighbourhood `N_p(t, λ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NeighborhoodSpec<P> {
    pub center: P,
    pub t: PositiveElement,
    pub lambda: f64,
}

impl<P> NeighborhoodSpec<P> {
    pub fn new(center: P, t: PositiveElement, lambda: f64) -> Result<Self> {
        if t.is_theta() {
            return Err(Error::InvalidArgument("neighbourhood radius t must satisfy t ≻ θ".into()));
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidArgument(format!("lambda {lambda} outside (0, 1)")));
        }
        Ok(Self { center, t, lambda })
    }
}

/// `N_p(t, λ) ∩ points = {q : 𝓕_{p,q}(t) > 1 − λ}`. The centre passes
/// whenever it is in the list.
pub fn neighborhood<'a, P>(
    space: &PMSpace<P>,
    spec: &NeighborhoodSpec<P>,
    points: &'a [P],
) -> Vec<&'a P> {
    points.iter().filter(|q| in_neighborhood(space, spec, q)).collect()
}

fn in_neighborhood<P>(space: &PMSpace<P>, spec: &NeighborhoodSpec<P>, q: &P) -> bool {
    space.distribution(&spec.center, q, &spec.t) > 1.0 - spec.lambda
}

/// Whether `N_p(t₁, λ₁) ⊆ N_p(t₂, λ₂)` on the given points, which must hold
/// when `t₁ ⪯ t₂` and `λ₁ ≤ λ₂`.
pub fn check_neighborhood_monotone<P: Clone>(
    space: &PMSpace<P>,
    p: &P,
    t1: &PositiveElement,
    t2: &PositiveElement,
    lambda1: f64,
    lambda2: f64,
    points: &[P],
) -> Result<bool> {
    if !t1.loewner_leq(t2)? {
        return Err(Error::Precondition("t1 ⪯ t2 does not hold".into()));
    }
    if lambda1 > lambda2 {
        return Err(Error::Precondition(format!("lambda1 {lambda1} > lambda2 {lambda2}")));
    }
    let small = NeighborhoodSpec::new(p.clone(), t1.clone(), lambda1)?;
    let large = NeighborhoodSpec::new(p.clone(), t2.clone(), lambda2)?;
    Ok(points
        .iter()
        .all(|q| !in_neighborhood(space, &small, q) || in_neighborhood(space, &large, q)))
}

/// Searches `t = 2⁻ᵏ·e` (`k = 0..40`) and `λ = 2⁻ʲ` (`j = 1..40`) for
/// neighbourhoods of `p` and `q` that are disjoint on `points`.
pub fn hausdorff_witness<P: Clone>(
    space: &PMSpace<P>,
    p: &P,
    q: &P,
    points: &[P],
) -> Result<Option<(NeighborhoodSpec<P>, NeighborhoodSpec<P>)>> {
    if space.distance(p, q).is_zero() {
        return Err(Error::InvalidArgument("hausdorff witness needs distinct points".into()));
    }
    let dim = space.algebra_dim();
    for k in 0..=40 {
        let t = PositiveElement::identity(dim).scaled(2f64.powi(-k));
        for j in 1..=40 {
            let lambda = 2f64.powi(-j);
            let np = NeighborhoodSpec::new(p.clone(), t.clone(), lambda)?;
            let nq = NeighborhoodSpec::new(q.clone(), t.clone(), lambda)?;
            let overlap = points
                .iter()
                .any(|x| in_neighborhood(space, &np, x) && in_neighborhood(space, &nq, x));
            if !overlap {
                return Ok(Some((np, nq)));
            }
        }
    }
    Ok(None)
}

/// Grid of radii, threshold and tail index `M_{t,λ}` for sequence tests.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceDiagnostics {
    pub t_grid: Vec<PositiveElement>,
    pub lambda: f64,
    pub tail_index: usize,
}

impl SequenceDiagnostics {
    pub fn new(t_grid: Vec<PositiveElement>, lambda: f64, tail_index: usize) -> Result<Self> {
        if t_grid.is_empty() {
            return Err(Error::InvalidArgument("t grid is empty".into()));
        }
        if t_grid.iter().any(PositiveElement::is_theta) {
            return Err(Error::InvalidArgument("every grid radius must satisfy t ≻ θ".into()));
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidArgument(format!("lambda {lambda} outside (0, 1)")));
        }
        Ok(Self { t_grid, lambda, tail_index })
    }

    /// `t = 2⁻ᵏ·e` for `k = 0..levels`.
    pub fn dyadic_grid(dim: usize, levels: i32) -> Vec<PositiveElement> {
        (0..levels).map(|k| PositiveElement::identity(dim).scaled(2f64.powi(-k))).collect()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len <= self.tail_index {
            return Err(Error::InvalidArgument(format!(
                "sequence of length {len} has no terms past tail index {}",
                self.tail_index
            )));
        }
        Ok(())
    }
}

/// True iff `𝓕_{limit, p_n}(t) > 1 − λ` for every grid `t` and every `n`
/// past the tail index (0-based).
pub fn sequence_converges<P>(
    space: &PMSpace<P>,
    seq: &[P],
    limit: &P,
    diag: &SequenceDiagnostics,
) -> Result<bool> {
    diag.check_len(seq.len())?;
    let level = 1.0 - diag.lambda;
    Ok(seq[diag.tail_index + 1..]
        .iter()
        .all(|p| diag.t_grid.iter().all(|t| space.distribution(limit, p, t) > level)))
}

/// True iff `𝓕_{p_n, p_m}(t) > 1 − λ` for every grid `t` and all `n, m` past
/// the tail index.
pub fn sequence_cauchy<P>(space: &PMSpace<P>, seq: &[P], diag: &SequenceDiagnostics) -> Result<bool> {
    diag.check_len(seq.len())?;
    let level = 1.0 - diag.lambda;
    let tail = &seq[diag.tail_index + 1..];
    Ok(tail.iter().enumerate().all(|(i, p)| {
        tail[i + 1..]
            .iter()
            .all(|q| diag.t_grid.iter().all(|t| space.distribution(p, q, t) > level))
    }))
}

/// Smallest tail index `M` for which [`sequence_converges`] accepts, if any
/// index below `seq.len() - 1` works.
pub fn convergence_tail_index<P>(
    space: &PMSpace<P>,
    seq: &[P],
    limit: &P,
    t_grid: &[PositiveElement],
    lambda: f64,
) -> Option<usize> {
    let level = 1.0 - lambda;
    let good: Vec<bool> = seq
        .iter()
        .map(|p| t_grid.iter().all(|t| space.distribution(limit, p, t) > level))
        .collect();
    // Start of the longest suffix inside the threshold.
    let first_good = good.iter().rposition(|ok| !ok).map_or(0, |i| i + 1);
    if first_good == good.len() {
        return None;
    }
    Some(first_good.saturating_sub(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmetric::{DiagMetric, PointR2};
    use crate::sampling::{random_nonzero_positive, random_point, random_positive, seeded};

    fn origin() -> PointR2 {
        PointR2::new(0.0, 0.0)
    }

    fn q34() -> PointR2 {
        PointR2::new(3.0, 4.0)
    }

    #[test]
    fn trace_pm_examples() {
        let space = make_trace_pm(DiagMetric);
        let p = origin();
        assert_eq!(space.distribution(&p, &p, &PositiveElement::identity(2)), 1.0);
        let c = PositiveElement::identity(2).scaled(7.0);
        let v = space.distribution(&p, &q34(), &c);
        assert!((v - (1.0 - (-2f64).exp())).abs() < 1e-15);
        assert!((v - 0.8646647).abs() < 1e-7);
        assert_eq!(space.distribution(&p, &q34(), &PositiveElement::zero(2)), 0.0);
    }

    #[test]
    fn ratio_pm_examples() {
        let space = make_ratio_pm(DiagMetric);
        let p = origin();
        assert_eq!(space.distribution(&p, &p, &PositiveElement::diag(&[0.3, 0.0]).unwrap()), 1.0);
        let v = space.distribution(&p, &q34(), &PositiveElement::identity(2));
        assert!((v - 2.0 / 9.0).abs() < 1e-15);
        assert_eq!(space.distribution(&p, &q34(), &PositiveElement::zero(2)), 0.0);
        assert_eq!(space.distribution(&p, &p, &PositiveElement::zero(2)), 0.0);
    }

    #[test]
    fn shipped_constructions_pass_axioms() {
        for space in [make_trace_pm(DiagMetric), make_ratio_pm(DiagMetric)] {
            let report = verify_pm_axioms(
                &space,
                |r| random_point(r, 10.0),
                |r| random_positive(r, 2, 2.0),
                500,
                &mut seeded(9),
            )
            .unwrap();
            assert!(report.all_passed(), "{report:?}");
        }
    }

    #[test]
    fn inverted_scaling_breaks_triangle() {
        let broken = make_inverted_pm(DiagMetric);
        let report = verify_pm_axioms(
            &broken,
            |r| random_point(r, 10.0),
            |r| random_positive(r, 2, 2.0),
            2000,
            &mut seeded(42),
        )
        .unwrap();
        assert!(!report.check("triangle").unwrap().ok());
    }

    #[test]
    fn neighborhood_examples() {
        let space = make_trace_pm(DiagMetric);
        let points = vec![origin(), q34(), PointR2::new(0.01, 0.0)];
        let spec = NeighborhoodSpec::new(origin(), PositiveElement::identity(2), 0.5).unwrap();
        let n = neighborhood(&space, &spec, &points);
        assert!(n.contains(&&origin()));
        assert!(!n.contains(&&q34()));
        let v = space.distribution(&origin(), &q34(), &PositiveElement::identity(2));
        assert!((v - 0.2485).abs() < 1e-4);

        let wide = NeighborhoodSpec::new(origin(), PositiveElement::identity(2), 1.0 - 1e-9).unwrap();
        assert_eq!(neighborhood(&space, &wide, &points).len(), 3);

        assert!(NeighborhoodSpec::new(origin(), PositiveElement::zero(2), 0.5).is_err());
        assert!(NeighborhoodSpec::new(origin(), PositiveElement::identity(2), 1.0).is_err());
    }

    #[test]
    fn neighborhood_monotone_on_random_sets() {
        let space = make_trace_pm(DiagMetric);
        let mut rng = seeded(17);
        for _ in 0..200 {
            let points: Vec<PointR2> = (0..20).map(|_| random_point(&mut rng, 5.0)).collect();
            let p = points[0];
            let t1 = random_nonzero_positive(&mut rng, 2, 1.0);
            let t2 = t1.plus(&random_positive(&mut rng, 2, 1.0)).unwrap();
            let l1: f64 = rand::Rng::gen_range(&mut rng, 0.01..0.98);
            let l2 = rand::Rng::gen_range(&mut rng, l1..0.99);
            assert!(check_neighborhood_monotone(&space, &p, &t1, &t2, l1, l2, &points).unwrap());
        }
        let t = PositiveElement::identity(2);
        assert!(check_neighborhood_monotone(&space, &origin(), &t, &t, 0.3, 0.3, &[q34()]).unwrap());
        let a = PositiveElement::diag(&[1.0, 2.0]).unwrap();
        let b = PositiveElement::diag(&[2.0, 1.0]).unwrap();
        assert!(matches!(
            check_neighborhood_monotone(&space, &origin(), &a, &b, 0.3, 0.4, &[]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn hausdorff_examples() {
        let space = make_trace_pm(DiagMetric);
        let (p, q) = (origin(), q34());
        let (np, nq) = hausdorff_witness(&space, &p, &q, &[p, q]).unwrap().unwrap();
        assert!(space.distribution(&p, &q, &np.t) <= 1.0 - np.lambda);
        assert_eq!(np.t, nq.t);
        assert!(hausdorff_witness(&space, &p, &q, &[p]).unwrap().is_some());
        assert!(hausdorff_witness(&space, &p, &p, &[p]).is_err());
    }

    fn halving(n: usize) -> Vec<PointR2> {
        (0..n).map(|k| PointR2::new(2f64.powi(-(k as i32)), 0.0)).collect()
    }

    #[test]
    fn sequence_examples() {
        let space = make_trace_pm(DiagMetric);
        let grid = SequenceDiagnostics::dyadic_grid(2, 4);
        let p = q34();
        let constant = vec![p; 10];
        let diag = SequenceDiagnostics::new(grid.clone(), 0.01, 0).unwrap();
        assert!(sequence_converges(&space, &constant, &p, &diag).unwrap());
        assert!(sequence_cauchy(&space, &constant, &diag).unwrap());

        let seq = halving(60);
        let tail = convergence_tail_index(&space, &seq, &origin(), &grid, 0.001).unwrap();
        let diag = SequenceDiagnostics::new(grid.clone(), 0.001, tail).unwrap();
        assert!(sequence_converges(&space, &seq, &origin(), &diag).unwrap());
        assert!(sequence_cauchy(&space, &seq, &diag).unwrap());

        let diverging: Vec<PointR2> = (0..30).map(|n| PointR2::new(n as f64, 0.0)).collect();
        let diag = SequenceDiagnostics::new(grid.clone(), 0.1, 5).unwrap();
        assert!(!sequence_converges(&space, &diverging, &origin(), &diag).unwrap());

        let alternating: Vec<PointR2> =
            (0..30).map(|n| if n % 2 == 0 { origin() } else { q34() }).collect();
        assert!(!sequence_cauchy(&space, &alternating, &diag).unwrap());

        assert!(SequenceDiagnostics::new(vec![], 0.1, 0).is_err());
        let short = SequenceDiagnostics::new(grid, 0.1, 5).unwrap();
        assert!(sequence_converges(&space, &seq[..5], &origin(), &short).is_err());
    }

    #[test]
    fn tail_index_is_minimal() {
        let space = make_trace_pm(DiagMetric);
        let grid = SequenceDiagnostics::dyadic_grid(2, 3);
        let seq = halving(40);
        let m = convergence_tail_index(&space, &seq, &origin(), &grid, 0.01).unwrap();
        let ok = SequenceDiagnostics::new(grid.clone(), 0.01, m).unwrap();
        assert!(sequence_converges(&space, &seq, &origin(), &ok).unwrap());
        if m > 0 {
            let earlier = SequenceDiagnostics::new(grid, 0.01, m - 1).unwrap();
            assert!(!sequence_converges(&space, &seq, &origin(), &earlier).unwrap());
        }
    }
}
