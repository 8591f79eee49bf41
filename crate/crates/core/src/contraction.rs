//! `a`-contractions on PM*-spaces and the Picard fixed-point solver.
//!
//! A self-map `f` is an `a`-contraction when `𝓕_{fp,fq}(t) ≥ 𝓕_{p,q}(a* t a)`
//! for a constant `a ≻ e`. Since `‖a⁻¹‖ < 1`, congruence by `a⁻¹` strictly
//! shrinks the cone (`a⁻¹ t a⁻¹ ⪯ ‖a⁻¹‖² t ≺ t`), and the Picard sequence
//! `p_{n+1} = f(p_n)` converges to the unique fixed point.

use serde::Serialize;
use serde_json::json;

use crate::cmetric::{Point, PointR2};
use crate::error::Error;
use crate::pmspace::PMSpace;
use crate::report::{require_trials, AxiomReport, CheckResult};
use crate::sampling::SampleRng;
use crate::symcone::{congruence, PositiveElement, SymMatrix};
use crate::Result;

/// Required spectral gap above the unit: `minEig(a) ≥ 1 + 1e-6`.
pub const STRICT_MARGIN: f64 = 1e-6;
/// Slack for the contraction inequality.
pub const CONTRACTION_TOL: f64 = 1e-12;

/// A symmetric constant `a` with `a ≻ e` by a strict spectral margin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionConstant {
    a: SymMatrix,
    inverse: SymMatrix,
    min_eig: f64,
    inv_norm: f64,
}

impl ContractionConstant {
    pub fn new(a: SymMatrix) -> Result<Self> {
        let min_eig = a.min_eigenvalue();
        if min_eig < 1.0 + STRICT_MARGIN {
            return Err(Error::Precondition(format!(
                "contraction constant needs minimum eigenvalue ≥ 1 + {STRICT_MARGIN:e}, found {min_eig}"
            )));
        }
        let inverse = a.inverse()?;
        let inv_norm = inverse.op_norm();
        Ok(Self { a, inverse, min_eig, inv_norm })
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.a
    }

    pub fn inverse(&self) -> &SymMatrix {
        &self.inverse
    }

    pub fn min_eig(&self) -> f64 {
        self.min_eig
    }

    /// `‖a⁻¹‖`, strictly below 1.
    pub fn inv_norm(&self) -> f64 {
        self.inv_norm
    }

    /// `a* t a`.
    pub fn enlarge(&self, t: &PositiveElement) -> Result<PositiveElement> {
        PositiveElement::new(congruence(&self.a, t)?)
    }

    /// `(aⁿ)* t aⁿ`.
    pub fn enlarge_n(&self, t: &PositiveElement, n: u32) -> Result<PositiveElement> {
        let power = self.a.powi(n as i32)?;
        PositiveElement::new(congruence(&power, t)?)
    }
}

/// Margins of the shrinking inequality `a⁻¹ t a⁻¹ ⪯ ‖a⁻¹‖² t ≺ t`.
///
/// The Loewner form only holds when `a` and `t` commute: in the eigenbasis of
/// `a` the gap has a zero diagonal entry next to a nonzero off-diagonal one.
/// The norm and trace forms hold for every `a ≻ e` and `t ≻ θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertReport {
    /// Smallest eigenvalue of `‖a⁻¹‖² t − a⁻¹ t a⁻¹`.
    pub loewner_margin: f64,
    /// `1 − ‖a⁻¹‖`.
    pub norm_margin: f64,
    /// `‖t‖ − ‖a⁻¹ t a⁻¹‖`.
    pub op_norm_margin: f64,
    /// `tr t − tr(a⁻¹ t a⁻¹)`.
    pub trace_margin: f64,
    /// Loewner form within tolerance and `‖a⁻¹‖ < 1`.
    pub holds: bool,
}

pub fn shrink_certificate(a: &ContractionConstant, t: &PositiveElement) -> Result<CertReport> {
    if t.is_theta() {
        return Err(Error::InvalidArgument("shrink certificate needs t ≻ θ".into()));
    }
    let shrunk = congruence(&a.inverse, t)?;
    let bound = t.scale(a.inv_norm * a.inv_norm);
    let gap = &bound - &shrunk;
    let loewner_margin = gap.min_eigenvalue();
    let norm_margin = 1.0 - a.inv_norm;
    let op_norm_margin = t.op_norm() - shrunk.op_norm();
    let trace_margin = t.trace() - shrunk.trace();
    let holds = gap.is_positive() && norm_margin > 0.0;
    Ok(CertReport { loewner_margin, norm_margin, op_norm_margin, trace_margin, holds })
}

/// Checks `𝓕_{fp,fq}(t) ≥ 𝓕_{p,q}(a t a) − 1e-12` on sampled pairs and radii.
pub fn verify_a_contraction<P: Point>(
    space: &PMSpace<P>,
    f: impl Fn(&P) -> P,
    a: &ContractionConstant,
    point_sampler: impl Fn(&mut SampleRng) -> P,
    cone_sampler: impl Fn(&mut SampleRng) -> PositiveElement,
    trials: usize,
    rng: &mut SampleRng,
) -> Result<AxiomReport> {
    require_trials(trials)?;
    let mut check = CheckResult::new("a_contraction");
    for _ in 0..trials {
        let (p, q) = (point_sampler(rng), point_sampler(rng));
        let t = cone_sampler(rng);
        let (fp, fq) = (f(&p), f(&q));
        let lhs = space.distribution(&fp, &fq, &t);
        let rhs = space.distribution(&p, &q, &a.enlarge(&t)?);
        let margin = lhs - rhs + CONTRACTION_TOL;
        check.record(margin >= 0.0, Some(margin), || {
            json!({ "p": &p, "q": &q, "t": &t, "fp": &fp, "fq": &fq, "lhs": lhs, "rhs": rhs })
        });
    }
    Ok(AxiomReport::new(format!("{} / a-contraction", space.name()), trials, vec![check]))
}

/// Stop rule and limits for [`picard_solve`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardOptions {
    pub t_ref: PositiveElement,
    pub lambda_stop: f64,
    pub metric_tol: f64,
    pub max_iter: usize,
}

impl PicardOptions {
    pub fn for_dim(dim: usize) -> Self {
        Self { t_ref: PositiveElement::identity(dim), lambda_stop: 1e-6, metric_tol: 1e-10, max_iter: 10_000 }
    }

    fn validate(&self) -> Result<()> {
        if self.t_ref.is_theta() {
            return Err(Error::InvalidArgument("reference radius must satisfy t ≻ θ".into()));
        }
        if !(self.lambda_stop > 0.0 && self.lambda_stop < 1.0) {
            return Err(Error::InvalidArgument(format!("lambda_stop {} outside (0, 1)", self.lambda_stop)));
        }
        if !(self.metric_tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidArgument("metric_tol must be positive and max_iter ≥ 1".into()));
        }
        Ok(())
    }
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self::for_dim(2)
    }
}

/// The Picard sequence together with the per-step certificate values
/// `𝓕_{p_n, p_{n+1}}(t_ref)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PicardTrace<P> {
    pub iterates: Vec<P>,
    pub cert_values: Vec<f64>,
    /// `‖d(p_n, p_{n+1})‖` per step.
    pub step_norms: Vec<f64>,
    pub converged: bool,
    pub steps: usize,
    /// `‖d(p*, f(p*))‖` at the returned point, when the stop rule fired.
    pub residual: Option<f64>,
}

impl<P> PicardTrace<P> {
    pub fn fixed_point(&self) -> &P {
        self.iterates.last().expect("trace holds at least the start point")
    }
}

fn finite_distance(d: &SymMatrix) -> bool {
    d.entries().iter().all(|v| v.is_finite())
}

/// Iterates `p_{n+1} = f(p_n)` until both `𝓕_{p_n,p_{n+1}}(t_ref) > 1 − λ_stop`
/// and `‖d(p_n, p_{n+1})‖ < metric_tol`, or `max_iter` steps pass. Non-finite
/// iterates are an error.
pub fn picard_solve<P: Point>(
    space: &PMSpace<P>,
    f: impl Fn(&P) -> P,
    p0: &P,
    options: &PicardOptions,
) -> Result<PicardTrace<P>> {
    options.validate()?;
    let mut iterates = vec![p0.clone()];
    let mut cert_values = Vec::new();
    let mut step_norms = Vec::new();
    let level = 1.0 - options.lambda_stop;

    for n in 0..options.max_iter {
        let current = &iterates[n];
        let next = f(current);
        let d = space.distance(current, &next);
        if !finite_distance(&d) {
            return Err(Error::Diverged { step: n + 1 });
        }
        let cert = space.distribution(current, &next, &options.t_ref);
        let gap = d.op_norm();
        cert_values.push(cert);
        step_norms.push(gap);
        iterates.push(next);

        if cert > level && gap < options.metric_tol {
            let last = iterates.last().expect("just pushed");
            let residual = space.distance(last, &f(last)).op_norm();
            return Ok(PicardTrace {
                iterates,
                cert_values,
                step_norms,
                converged: residual < 10.0 * options.metric_tol,
                steps: n,
                residual: Some(residual),
            });
        }
    }

    Ok(PicardTrace {
        iterates,
        cert_values,
        step_norms,
        converged: false,
        steps: options.max_iter,
        residual: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport<P> {
    pub unique: bool,
    /// No starts were tried, so `unique` holds vacuously.
    pub vacuous: bool,
    pub starts: usize,
    pub max_deviation: f64,
    /// First start that failed to converge or reached another point.
    pub outlier: Option<(P, Option<P>)>,
}

/// Runs [`picard_solve`] from `trials` random starts and checks that every
/// run lands within `10·metric_tol` of `fixed_point`.
pub fn uniqueness_probe<P: Point>(
    space: &PMSpace<P>,
    f: impl Fn(&P) -> P,
    fixed_point: &P,
    start_sampler: impl Fn(&mut SampleRng) -> P,
    trials: usize,
    options: &PicardOptions,
    rng: &mut SampleRng,
) -> Result<UniquenessReport<P>> {
    let radius = 10.0 * options.metric_tol;
    let residual = space.distance(fixed_point, &f(fixed_point)).op_norm();
    if !(residual < radius) {
        return Err(Error::Precondition(format!("candidate fixed point has residual {residual:e}")));
    }
    let mut report = UniquenessReport {
        unique: true,
        vacuous: trials == 0,
        starts: trials,
        max_deviation: 0.0,
        outlier: None,
    };
    for _ in 0..trials {
        let start = start_sampler(rng);
        let reached = match picard_solve(space, &f, &start, options) {
            Ok(trace) if trace.converged => Some(trace.fixed_point().clone()),
            Ok(_) | Err(Error::Diverged { .. }) => None,
            Err(e) => return Err(e),
        };
        let deviation = reached
            .as_ref()
            .map_or(f64::INFINITY, |p| space.distance(p, fixed_point).op_norm());
        report.max_deviation = report.max_deviation.max(deviation);
        if !(deviation < radius) {
            report.unique = false;
            if report.outlier.is_none() {
                report.outlier = Some((start, reached));
            }
        }
    }
    Ok(report)
}

/// `f(x, y) = (α₁ + λ₁x, α₂ + λ₂y)` with `λᵢ ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineMap2 {
    pub alpha1: f64,
    pub alpha2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl AffineMap2 {
    pub fn new(alpha: (f64, f64), lambda: (f64, f64)) -> Result<Self> {
        for l in [lambda.0, lambda.1] {
            if !(l > 0.0 && l < 1.0) {
                return Err(Error::InvalidArgument(format!("rate {l} outside (0, 1)")));
            }
        }
        if !(alpha.0.is_finite() && alpha.1.is_finite()) {
            return Err(Error::NonFinite("affine offsets"));
        }
        Ok(Self { alpha1: alpha.0, alpha2: alpha.1, lambda1: lambda.0, lambda2: lambda.1 })
    }

    pub fn apply(&self, p: &PointR2) -> PointR2 {
        PointR2::new(self.alpha1 + self.lambda1 * p.x, self.alpha2 + self.lambda2 * p.y)
    }

    /// `λ = max(λ₁, λ₂)`.
    pub fn rate(&self) -> f64 {
        self.lambda1.max(self.lambda2)
    }

    /// `Λ = diag(1/√λ, 1/√λ)`.
    pub fn contraction_matrix(&self) -> SymMatrix {
        SymMatrix::scalar(2, 1.0 / self.rate().sqrt())
    }

    pub fn contraction_constant(&self) -> Result<ContractionConstant> {
        ContractionConstant::new(self.contraction_matrix())
    }

    /// `(α₁/(1−λ₁), α₂/(1−λ₂))`.
    pub fn fixed_point(&self) -> PointR2 {
        PointR2::new(self.alpha1 / (1.0 - self.lambda1), self.alpha2 / (1.0 - self.lambda2))
    }
}
