//! 2×2 systems of Fredholm integral equations of the second kind,
//!
//! ```text
//! φ₁(x) = g₁(x) + ∫ₐᵇ K₁₁(x,t) φ₁(t) + K₁₂(x,t) φ₂(t) dt
//! φ₂(x) = g₂(x) + ∫ₐᵇ K₂₁(x,t) φ₁(t) + K₂₂(x,t) φ₂(t) dt
//! ```
//!
//! solved as the fixed point of the integral map on `C[a,b] × C[a,b]`. With
//! `‖K‖ = max(‖K₁₁‖ + ‖K₂₁‖, ‖K₁₂‖ + ‖K₂₂‖)` and `κ = 2(b − a)‖K‖ < 1` the map
//! is a `D`-contraction for `D = κ^{-1/2}·e` in the exponential-trace PM
//! space over the metric `d = (‖u₁−u₂‖∞ + ‖v₁−v₂‖∞)·e`.
//!
//! The integrals are discretized with the composite trapezoid rule on uniform
//! nodes (Nyström), and a dense Gaussian elimination serves as the oracle.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::cmetric::{FunctionPair, SupSumMetric};
use crate::contraction::{verify_a_contraction, ContractionConstant};
use crate::error::Error;
use crate::pmspace::make_trace_pm;
use crate::report::{require_trials, AxiomReport, CheckResult};
use crate::sampling::{random_positive, SampleRng};
use crate::symcone::SymMatrix;
use crate::Result;

/// Refinement of the node grid used to estimate kernel sup-norms.
pub const KERNEL_NORM_REFINE: usize = 4;
/// `κ` must not exceed `1 − 1e-9`.
pub const KAPPA_MARGIN: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-12;

/// Values tabulated on a uniform grid over `[a, b]` (or `[a, b]²`),
/// endpoints included, and interpolated linearly (bilinearly).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub values: Vec<Vec<f64>>,
}

fn lerp_position(x: f64, a: f64, b: f64, len: usize) -> (usize, f64) {
    let s = ((x - a) / (b - a)).clamp(0.0, 1.0) * (len - 1) as f64;
    let i = (s.floor() as usize).min(len - 2);
    (i, s - i as f64)
}

/// A kernel `K(x, t)`.
#[derive(Clone)]
pub enum KernelSpec {
    Constant(f64),
    /// `c·x·t`.
    Separable(f64),
    Table(Table),
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl KernelSpec {
    pub fn eval(&self, x: f64, t: f64, a: f64, b: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Separable(c) => c * x * t,
            Self::Table(table) => {
                let rows = &table.values;
                let (i, fx) = lerp_position(x, a, b, rows.len());
                let (j, ft) = lerp_position(t, a, b, rows[0].len());
                let top = rows[i][j] * (1.0 - ft) + rows[i][j + 1] * ft;
                let bottom = rows[i + 1][j] * (1.0 - ft) + rows[i + 1][j + 1] * ft;
                top * (1.0 - fx) + bottom * fx
            }
            Self::Custom(f) => f(x, t),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if let Self::Table(table) = self {
            let rows = &table.values;
            let width = rows.first().map_or(0, Vec::len);
            if rows.len() < 2 || width < 2 || rows.iter().any(|r| r.len() != width) {
                return Err(Error::InvalidArgument(format!(
                    "{name}: kernel table must be rectangular with at least 2×2 entries"
                )));
            }
            if rows.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name}: non-finite table entry")));
            }
        }
        Ok(())
    }
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Separable(c) => write!(f, "Separable({c})"),
            Self::Table(t) => write!(f, "Table({}×{})", t.values.len(), t.values[0].len()),
            Self::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// An inhomogeneity `g(x)`.
#[derive(Clone)]
pub enum GSpec {
    Constant(f64),
    /// Coefficients in increasing degree.
    Poly(Vec<f64>),
    Table(Vec<f64>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl GSpec {
    pub fn eval(&self, x: f64, a: f64, b: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Poly(coeffs) => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Self::Table(values) => {
                let (i, fx) = lerp_position(x, a, b, values.len());
                values[i] * (1.0 - fx) + values[i + 1] * fx
            }
            Self::Custom(f) => f(x),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        match self {
            Self::Table(values) if values.len() < 2 => Err(Error::InvalidArgument(format!(
                "{name}: table needs at least 2 values"
            ))),
            Self::Table(values) | Self::Poly(values) if values.iter().any(|v| !v.is_finite()) => {
                Err(Error::InvalidArgument(format!("{name}: non-finite coefficient")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Debug for GSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Poly(c) => write!(f, "Poly({c:?})"),
            Self::Table(v) => write!(f, "Table({})", v.len()),
            Self::Custom(_) => f.write_str("Custom"),
        }
    }
}

/// Interval, kernels `K[i][j]`, inhomogeneities and node count.
#[derive(Debug, Clone)]
pub struct FredholmProblem {
    pub a: f64,
    pub b: f64,
    pub kernels: [[KernelSpec; 2]; 2],
    pub g: [GSpec; 2],
    pub m: usize,
}

impl FredholmProblem {
    pub fn new(
        interval: (f64, f64),
        kernels: [[KernelSpec; 2]; 2],
        g: [GSpec; 2],
        m: usize,
    ) -> Result<Self> {
        let (a, b) = interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidArgument(format!("interval [{a}, {b}] needs a < b")));
        }
        if m < 2 {
            return Err(Error::InvalidArgument(format!("node count m = {m} must be at least 2")));
        }
        for (i, row) in kernels.iter().enumerate() {
            for (j, k) in row.iter().enumerate() {
                k.validate(&format!("K{}{}", i + 1, j + 1))?;
            }
        }
        g[0].validate("g1")?;
        g[1].validate("g2")?;
        Ok(Self { a, b, kernels, g, m })
    }

    /// All four kernels equal to the constant `c`.
    pub fn constant(interval: (f64, f64), c: f64, g: [GSpec; 2], m: usize) -> Result<Self> {
        let k = || KernelSpec::Constant(c);
        Self::new(interval, [[k(), k()], [k(), k()]], g, m)
    }

    pub fn with_nodes(&self, m: usize) -> Result<Self> {
        Self::new((self.a, self.b), self.kernels.clone(), self.g.clone(), m)
    }

    pub fn kernel(&self, i: usize, j: usize, x: f64, t: f64) -> f64 {
        self.kernels[i][j].eval(x, t, self.a, self.b)
    }

    pub fn nodes(&self) -> Vec<f64> {
        uniform_nodes(self.a, self.b, self.m)
    }
}

fn uniform_nodes(a: f64, b: f64, count: usize) -> Vec<f64> {
    let h = (b - a) / (count - 1) as f64;
    (0..count).map(|k| if k + 1 == count { b } else { a + k as f64 * h }).collect()
}

/// Sup-norms `‖K_ij‖` over a `(refine·m)²` uniform grid.
pub fn kernel_sup_norms(prob: &FredholmProblem, refine: usize) -> Result<[[f64; 2]; 2]> {
    if refine == 0 {
        return Err(Error::InvalidArgument("grid refinement must be at least 1".into()));
    }
    let grid = uniform_nodes(prob.a, prob.b, refine * prob.m);
    let mut norms = [[0.0_f64; 2]; 2];
    for (i, row) in norms.iter_mut().enumerate() {
        for (j, norm) in row.iter_mut().enumerate() {
            for &x in &grid {
                for &t in &grid {
                    let v = prob.kernel(i, j, x, t);
                    if !v.is_finite() {
                        return Err(Error::NonFinite("kernel value"));
                    }
                    *norm = norm.max(v.abs());
                }
            }
        }
    }
    Ok(norms)
}

/// `‖K‖ = max(‖K₁₁‖ + ‖K₂₁‖, ‖K₁₂‖ + ‖K₂₂‖)`.
pub fn kernel_norm(prob: &FredholmProblem, refine: usize) -> Result<f64> {
    let n = kernel_sup_norms(prob, refine)?;
    Ok((n[0][0] + n[1][0]).max(n[0][1] + n[1][1]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub kernel_norm: f64,
    pub kappa: f64,
    pub passes: bool,
    /// `κ = 0`: the map is constant and `φ = g` exactly.
    pub degenerate: bool,
    /// `D = κ^{-1/2}·e` when the condition holds and `κ > 0`.
    pub d_matrix: Option<SymMatrix>,
}

/// `κ = 2(b − a)‖K‖`, passing iff `κ ≤ 1 − 1e-9`.
pub fn check_contraction_condition(prob: &FredholmProblem) -> Result<ConditionReport> {
    let norm = kernel_norm(prob, KERNEL_NORM_REFINE)?;
    let kappa = 2.0 * (prob.b - prob.a) * norm;
    let passes = kappa <= 1.0 - KAPPA_MARGIN;
    let degenerate = kappa == 0.0;
    let d_matrix = (passes && !degenerate).then(|| SymMatrix::scalar(2, 1.0 / kappa.sqrt()));
    Ok(ConditionReport { kernel_norm: norm, kappa, passes, degenerate, d_matrix })
}

/// The discretized system `A φ = rhs` with `A = I − W∘K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NystromSystem {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Row-major `2m × 2m`.
    pub matrix: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl NystromSystem {
    pub fn m(&self) -> usize {
        self.nodes.len()
    }

    pub fn size(&self) -> usize {
        2 * self.nodes.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.size() + col]
    }

    /// `A·φ`.
    pub fn apply(&self, phi: &[f64]) -> Vec<f64> {
        let n = self.size();
        self.matrix.chunks(n).map(|row| row.iter().zip(phi).map(|(a, p)| a * p).sum()).collect()
    }

    /// One step of the integral map, `f(φ) = rhs + (I − A)·φ`.
    pub fn integral_map(&self, phi: &[f64]) -> Vec<f64> {
        let n = self.size();
        self.matrix
            .chunks(n)
            .enumerate()
            .map(|(r, row)| {
                let quad: f64 = row.iter().zip(phi).enumerate().map(|(c, (a, p))| {
                    let identity = if c == r { 1.0 } else { 0.0 };
                    (identity - a) * p
                }).sum();
                self.rhs[r] + quad
            })
            .collect()
    }

    /// `‖A·φ − rhs‖∞`.
    pub fn residual(&self, phi: &[f64]) -> f64 {
        sup_diff(&self.apply(phi), &self.rhs)
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Trapezoid weights `(h/2, h, …, h, h/2)` on uniform nodes.
pub fn trapezoid_weights(a: f64, b: f64, m: usize) -> Vec<f64> {
    let h = (b - a) / (m - 1) as f64;
    (0..m).map(|k| if k == 0 || k + 1 == m { 0.5 * h } else { h }).collect()
}

pub fn discretize(prob: &FredholmProblem) -> Result<NystromSystem> {
    let m = prob.m;
    if m < 2 {
        return Err(Error::InvalidArgument(format!("node count m = {m} must be at least 2")));
    }
    let nodes = prob.nodes();
    let weights = trapezoid_weights(prob.a, prob.b, m);
    let n = 2 * m;
    let mut matrix = vec![0.0; n * n];
    for bi in 0..2 {
        for bj in 0..2 {
            for (r, &x) in nodes.iter().enumerate() {
                for (c, (&t, &w)) in nodes.iter().zip(&weights).enumerate() {
                    let k = prob.kernel(bi, bj, x, t);
                    if !k.is_finite() {
                        return Err(Error::NonFinite("kernel value"));
                    }
                    let identity = if bi == bj && r == c { 1.0 } else { 0.0 };
                    matrix[(bi * m + r) * n + bj * m + c] = identity - w * k;
                }
            }
        }
    }
    let mut rhs = Vec::with_capacity(n);
    for g in &prob.g {
        for &x in &nodes {
            let v = g.eval(x, prob.a, prob.b);
            if !v.is_finite() {
                return Err(Error::NonFinite("inhomogeneity value"));
            }
            rhs.push(v);
        }
    }
    Ok(NystromSystem { nodes, weights, matrix, rhs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Picard,
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FredholmSolution {
    pub nodes: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub method: SolveMethod,
    pub iterations: usize,
    /// `‖A·φ − rhs‖∞`.
    pub residual: f64,
    /// Sup-norm of the first Picard step, 0 for the direct solver.
    pub first_step: f64,
}

impl FredholmSolution {
    fn from_stacked(sys: &NystromSystem, phi: Vec<f64>, method: SolveMethod, iterations: usize, first_step: f64) -> Self {
        let residual = sys.residual(&phi);
        let m = sys.m();
        Self {
            nodes: sys.nodes.clone(),
            phi1: phi[..m].to_vec(),
            phi2: phi[m..].to_vec(),
            method,
            iterations,
            residual,
            first_step,
        }
    }

    pub fn stacked(&self) -> Vec<f64> {
        self.phi1.iter().chain(&self.phi2).copied().collect()
    }

    /// `max(‖φ₁ − ψ₁‖∞, ‖φ₂ − ψ₂‖∞)`.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        sup_diff(&self.phi1, &other.phi1).max(sup_diff(&self.phi2, &other.phi2))
    }
}

/// Picard iteration `φ ← rhs + (I − A)·φ` from `φ₀ = rhs`, stopping once the
/// sup-norm step falls below `tol`.
pub fn picard_iterate(sys: &NystromSystem, tol: f64, max_iter: usize) -> Result<FredholmSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let mut phi = sys.rhs.clone();
    let mut first_step = 0.0;
    let mut step = f64::INFINITY;
    for k in 1..=max_iter {
        let next = sys.integral_map(&phi);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { step: k });
        }
        step = sup_diff(&next, &phi);
        if k == 1 {
            first_step = step;
        }
        phi = next;
        if step < tol {
            return Ok(FredholmSolution::from_stacked(sys, phi, SolveMethod::Picard, k, first_step));
        }
    }
    Err(Error::IterationLimit { iterations: max_iter, last_step: step })
}

/// Gaussian elimination with partial pivoting on `A φ = rhs`.
pub fn direct_solve(sys: &NystromSystem) -> Result<FredholmSolution> {
    let phi = gauss_solve(sys.size(), sys.matrix.clone(), sys.rhs.clone())?;
    Ok(FredholmSolution::from_stacked(sys, phi, SolveMethod::Direct, 0, 0.0))
}

/// Solves the dense row-major system `a·x = b` in place.
pub fn gauss_solve(n: usize, mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let scale = a.chunks(n).map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let tiny = PIVOT_TOL * scale;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .expect("non-empty range");
        let pv = a[pivot * n + col];
        if pv.abs() <= tiny || pv == 0.0 {
            return Err(Error::Singular(pv.abs()));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        for row in (col + 1)..n {
            let factor = a[row * n + col] / pv;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = ((row + 1)..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row * n + row];
    }
    Ok(x)
}

/// Random node-sampled function pair with values in `[-amp, amp]`.
pub fn random_function_pair(rng: &mut SampleRng, m: usize, amp: f64) -> FunctionPair {
    let mut draw = || (0..m).map(|_| rng.gen_range(-amp..=amp)).collect::<Vec<f64>>();
    let u = draw();
    let v = draw();
    FunctionPair::new(u, v)
}

/// Checks on the discretized function space that the integral map is a
/// `D`-contraction for the exponential-trace PM space:
///
/// * `a_contraction`: `𝓕_{fΦ,fΨ}(C) ≥ 𝓕_{Φ,Ψ}(D C D) − 1e-12`;
/// * `lipschitz`: `tr d(fΦ,fΨ) / tr d(Φ,Ψ) ≤ κ + 1e-6`.
///
/// Fails with a precondition error when `κ ≤ 1 − 1e-9` does not hold.
pub fn verify_d_contraction(
    prob: &FredholmProblem,
    sampler: impl Fn(&mut SampleRng) -> FunctionPair,
    trials: usize,
    rng: &mut SampleRng,
) -> Result<AxiomReport> {
    require_trials(trials)?;
    let cond = check_contraction_condition(prob)?;
    if !cond.passes {
        return Err(Error::Precondition(format!("contraction condition fails: κ = {}", cond.kappa)));
    }
    let sys = discretize(prob)?;
    let m = sys.m();
    let map = |p: &FunctionPair| {
        let stacked: Vec<f64> = p.u.iter().chain(&p.v).copied().collect();
        let out = sys.integral_map(&stacked);
        FunctionPair::new(out[..m].to_vec(), out[m..].to_vec())
    };
    // A constant map contracts for every D ≻ e.
    let d = cond.d_matrix.clone().unwrap_or_else(|| SymMatrix::scalar(2, 2.0));
    let constant = ContractionConstant::new(d)?;
    let space = make_trace_pm(SupSumMetric);

    let mut report = verify_a_contraction(
        &space,
        map,
        &constant,
        &sampler,
        |r| random_positive(r, 2, 2.0),
        trials,
        rng,
    )?;

    let mut lipschitz = CheckResult::new("lipschitz");
    for _ in 0..trials {
        let (p, q) = (sampler(rng), sampler(rng));
        let before = SupSumMetric::gap(&p, &q);
        if before == 0.0 {
            continue;
        }
        let ratio = SupSumMetric::gap(&map(&p), &map(&q)) / before;
        let margin = cond.kappa + 1e-6 - ratio;
        lipschitz.record(margin >= 0.0, Some(margin), || {
            serde_json::json!({ "ratio": ratio, "kappa": cond.kappa })
        });
    }
    report.checks.push(lipschitz);
    report.subject = format!("fredholm m={m} κ={:.6}", cond.kappa);
    Ok(report)
}

/// Separable test problem on `[0, 1]` with kernels `K_ij = c_ij·x·t` and the
/// inhomogeneities chosen so that `φ₁(x) = x`, `φ₂(x) = 1` solve it exactly.
pub fn manufactured_problem(c: [[f64; 2]; 2], m: usize) -> Result<FredholmProblem> {
    // ∫₀¹ t·t dt = 1/3 and ∫₀¹ t dt = 1/2.
    let g1 = GSpec::Poly(vec![0.0, 1.0 - c[0][0] / 3.0 - c[0][1] / 2.0]);
    let g2 = GSpec::Poly(vec![1.0, -(c[1][0] / 3.0 + c[1][1] / 2.0)]);
    let k = |v| KernelSpec::Separable(v);
    FredholmProblem::new(
        (0.0, 1.0),
        [[k(c[0][0]), k(c[0][1])], [k(c[1][0]), k(c[1][1])]],
        [g1, g2],
        m,
    )
}

/// Nodal sup-norm error of the direct solution against `φ₁ = x`, `φ₂ = 1`.
pub fn manufactured_error(c: [[f64; 2]; 2], m: usize) -> Result<f64> {
    let sol = direct_solve(&discretize(&manufactured_problem(c, m)?)?)?;
    let e1 = sol.nodes.iter().zip(&sol.phi1).fold(0.0_f64, |e, (x, p)| e.max((p - x).abs()));
    let e2 = sol.phi2.iter().fold(0.0_f64, |e, p| e.max((p - 1.0).abs()));
    Ok(e1.max(e2))
}

/// Observed orders `log₂(e_k / e_{k+1})` across successive node counts.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Upper bound on the Picard step count when `κ < 1`.
pub fn picard_step_bound(kappa: f64, tol: f64, first_step: f64) -> usize {
    if first_step < tol || kappa <= 0.0 {
        return 2;
    }
    ((tol / first_step).ln() / kappa.ln()).ceil() as usize + 2
}
