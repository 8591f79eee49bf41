//! Real symmetric matrices as a concrete unital C*-algebra.
//!
//! The hermitian part of the algebra is the space of real symmetric `n × n`
//! matrices with the transpose as involution. An element is positive when its
//! spectrum lies in `[0, ∞)`, and the Loewner order is `a ⪯ b ⇔ b − a ⪰ 0`.
//! Spectra come from a cyclic Jacobi eigensolver.

use std::fmt;
use std::ops::{Add, Deref, Mul, Sub};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check on construction.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Relative scale of the positivity tolerance, see [`SymMatrix::pos_tol`].
pub const POSITIVITY_SCALE: f64 = 1e-10;
/// Jacobi stops when the off-diagonal Frobenius mass drops below this
/// fraction of the matrix Frobenius norm.
const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative threshold under which an eigenvalue counts as zero for inversion.
const SINGULAR_TOL: f64 = 1e-12;

/// A real symmetric matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from row-major entries, checking shape, finiteness and
    /// symmetry. The stored matrix is the exact symmetric part of the input.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::BadShape(entries.len()));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        let scale = 1.0 + entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut entries = entries;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let (a, b) = (entries[i * dim + j], entries[j * dim + i]);
                let gap = (a - b).abs();
                if gap > SYMMETRY_TOL * scale {
                    return Err(Error::NotSymmetric { row: i, col: j, gap });
                }
                let mid = 0.5 * (a + b);
                entries[i * dim + j] = mid;
                entries[j * dim + i] = mid;
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::BadShape(rows.iter().map(Vec::len).sum()));
        }
        Self::new(dim, rows.concat())
    }

    /// The zero element θ.
    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self { dim, entries: vec![0.0; dim * dim] }
    }

    /// The unit e.
    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = value;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zero(values.len());
        for (i, v) in values.iter().enumerate() {
            m.entries[i * values.len() + i] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| *v == 0.0)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|v| v * factor).collect() }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, found: other.dim })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f(*a, *b)).collect();
        Self { dim: self.dim, entries }
    }

    /// Plain matrix product; the result is generally not symmetric.
    fn product(&self, other: &Self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        out
    }

    /// Symmetric part of a row-major square buffer.
    fn symmetrized(dim: usize, mut entries: Vec<f64>) -> Self {
        for i in 0..dim {
            for j in (i + 1)..dim {
                let mid = 0.5 * (entries[i * dim + j] + entries[j * dim + i]);
                entries[i * dim + j] = mid;
                entries[j * dim + i] = mid;
            }
        }
        Self { dim, entries }
    }

    /// Tolerance used to decide positivity: `1e-10 · (1 + ‖M‖)`.
    pub fn pos_tol(&self) -> f64 {
        POSITIVITY_SCALE * (1.0 + self.op_norm())
    }

    pub fn eigen(&self) -> EigenDecomposition {
        jacobi_eigen(self)
    }

    /// Eigenvalues sorted ascending.
    pub fn spectrum(&self) -> Spectrum {
        Spectrum { eigenvalues: self.eigen().values }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum().min()
    }

    /// Operator norm, `max |λ|`.
    pub fn op_norm(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.spectrum().abs_max()
    }

    /// `θ ⪯ M` up to [`pos_tol`](Self::pos_tol).
    pub fn is_positive(&self) -> bool {
        let spec = self.spectrum();
        let tol = POSITIVITY_SCALE * (1.0 + spec.abs_max());
        spec.min() >= -tol
    }

    /// `self ⪯ other` in the Loewner order.
    pub fn loewner_leq(&self, other: &Self) -> Result<bool> {
        self.check_dim(other)?;
        Ok(other.try_sub(self)?.is_positive())
    }

    pub fn loewner_relation(&self, other: &Self) -> Result<LoewnerRelation> {
        let leq = self.loewner_leq(other)?;
        let geq = other.loewner_leq(self)?;
        Ok(match (leq, geq) {
            (true, true) => LoewnerRelation::Equal,
            (true, false) => LoewnerRelation::LessEq,
            (false, true) => LoewnerRelation::GreaterEq,
            (false, false) => LoewnerRelation::Incomparable,
        })
    }

    /// Applies `f` to the spectrum: `Σ f(λ_k) v_k v_kᵀ`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let eig = self.eigen();
        let mapped: Vec<f64> = eig.values.iter().map(|v| f(*v)).collect();
        eig.recompose(&mapped)
    }

    /// Inverse via the spectral decomposition.
    pub fn inverse(&self) -> Result<Self> {
        let eig = self.eigen();
        let norm = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let smallest = eig.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if smallest <= SINGULAR_TOL * norm || smallest == 0.0 {
            return Err(Error::Singular(smallest));
        }
        let inv: Vec<f64> = eig.values.iter().map(|v| 1.0 / v).collect();
        Ok(eig.recompose(&inv))
    }

    /// Integer power `Mᵏ`, with negative exponents through the inverse.
    pub fn powi(&self, exponent: i32) -> Result<Self> {
        if exponent < 0 {
            return self.inverse()?.powi(-exponent);
        }
        Ok(self.spectral_map(|v| v.powi(exponent)))
    }

    /// `|M| = (MᵀM)^{1/2}`.
    pub fn abs(&self) -> PositiveElement {
        // For symmetric M the square root of MᵀM = M² has eigenvalues |λ|.
        let matrix = self.spectral_map(f64::abs);
        let min_eigenvalue = matrix.min_eigenvalue().max(0.0);
        PositiveElement { matrix, min_eigenvalue }
    }
}

/// `aᵀ · t · a`. With symmetric `a` this is `a* t a`.
pub fn congruence(a: &SymMatrix, t: &SymMatrix) -> Result<SymMatrix> {
    a.check_dim(t)?;
    let ta = t.product(a);
    let n = a.dim;
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aki = a.entries[k * n + i];
            if aki == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aki * ta[k * n + j];
            }
        }
    }
    Ok(SymMatrix::symmetrized(n, out))
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(serializer)
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        self.try_add(rhs).expect("dimension mismatch in matrix addition")
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        self.try_sub(rhs).expect("dimension mismatch in matrix subtraction")
    }
}

impl Mul<&SymMatrix> for f64 {
    type Output = SymMatrix;
    fn mul(self, rhs: &SymMatrix) -> SymMatrix {
        rhs.scale(self)
    }
}

/// Eigenvalues sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn abs_max(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }
}

/// Eigenpairs of a symmetric matrix; `vectors[k]` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    /// `Σ mapped[k] · v_k v_kᵀ`.
    pub fn recompose(&self, mapped: &[f64]) -> SymMatrix {
        let n = self.values.len();
        let mut out = vec![0.0; n * n];
        for (v, w) in self.vectors.iter().zip(mapped) {
            if *w == 0.0 {
                continue;
            }
            for i in 0..n {
                let wi = w * v[i];
                for j in 0..n {
                    out[i * n + j] += wi * v[j];
                }
            }
        }
        SymMatrix::symmetrized(n, out)
    }
}

fn jacobi_eigen(m: &SymMatrix) -> EigenDecomposition {
    let n = m.dim;
    let mut a = m.entries.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let threshold = JACOBI_TOL * m.frobenius_norm();
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A ← A·J
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                // A ← Jᵀ·A
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                // V ← V·J
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = order.iter().map(|&col| (0..n).map(|row| v[row * n + col]).collect()).collect();
    EigenDecomposition { values, vectors }
}

/// Outcome of comparing two elements in the Loewner order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LoewnerRelation {
    Equal,
    LessEq,
    GreaterEq,
    Incomparable,
}

/// A symmetric matrix certified to lie in the positive cone.
#[derive(Clone, PartialEq)]
pub struct PositiveElement {
    matrix: SymMatrix,
    min_eigenvalue: f64,
}

impl PositiveElement {
    pub fn new(matrix: SymMatrix) -> Result<Self> {
        let spec = matrix.spectrum();
        let tolerance = POSITIVITY_SCALE * (1.0 + spec.abs_max());
        let min_eigenvalue = spec.min();
        if min_eigenvalue < -tolerance {
            return Err(Error::NotPositive { min_eigenvalue, tolerance });
        }
        Ok(Self { matrix, min_eigenvalue })
    }

    pub fn zero(dim: usize) -> Self {
        Self { matrix: SymMatrix::zero(dim), min_eigenvalue: 0.0 }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: SymMatrix::identity(dim), min_eigenvalue: 1.0 }
    }

    /// Diagonal element with non-negative entries.
    pub fn diag(values: &[f64]) -> Result<Self> {
        Self::new(SymMatrix::diag(values))
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SymMatrix {
        self.matrix
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// Numerically θ: `‖C‖ ≤ posTol`.
    pub fn is_theta(&self) -> bool {
        let norm = self.matrix.op_norm();
        norm <= POSITIVITY_SCALE * (1.0 + norm)
    }

    /// Non-negative multiple of the element.
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor >= 0.0, "cone is closed under non-negative scaling only");
        Self { matrix: self.matrix.scale(factor), min_eigenvalue: self.min_eigenvalue * factor }
    }

    /// Sum of two cone elements, which stays in the cone.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        let matrix = self.matrix.try_add(&other.matrix)?;
        let min_eigenvalue = matrix.min_eigenvalue();
        Ok(Self { matrix, min_eigenvalue })
    }

    /// The positive square root. Eigenvalues in `[-posTol, 0)` are clamped to 0.
    pub fn sqrt(&self) -> PositiveElement {
        let matrix = self.matrix.spectral_map(|v| v.max(0.0).sqrt());
        let min_eigenvalue = self.min_eigenvalue.max(0.0).sqrt();
        PositiveElement { matrix, min_eigenvalue }
    }
}

impl Deref for PositiveElement {
    type Target = SymMatrix;
    fn deref(&self) -> &SymMatrix {
        &self.matrix
    }
}

impl fmt::Debug for PositiveElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.matrix.fmt(f)
    }
}

impl Serialize for PositiveElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix.serialize(serializer)
    }
}

impl TryFrom<SymMatrix> for PositiveElement {
    type Error = Error;
    fn try_from(m: SymMatrix) -> Result<Self> {
        Self::new(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m(rows: &[&[f64]]) -> SymMatrix {
        SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(SymMatrix::identity(2).spectrum().eigenvalues, vec![1.0, 1.0]);
        assert_eq!(SymMatrix::diag(&[5.0, 2.0]).spectrum().eigenvalues, vec![2.0, 5.0]);
        let s = m(&[&[0.0, 1.0], &[1.0, 0.0]]).spectrum().eigenvalues;
        assert_abs_diff_eq!(s[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let err = SymMatrix::new(2, vec![1.0, 2.0, 3.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { row: 0, col: 1, .. }));
        assert!(matches!(SymMatrix::new(2, vec![1.0; 3]), Err(Error::BadShape(3))));
        assert!(matches!(SymMatrix::new(1, vec![f64::NAN]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn eigenpairs_reconstruct() {
        let a = m(&[&[4.0, 1.0, -2.0], &[1.0, 2.0, 0.5], &[-2.0, 0.5, 3.0]]);
        let eig = a.eigen();
        let norm = a.op_norm();
        for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
            for i in 0..3 {
                let mv: f64 = (0..3).map(|j| a.get(i, j) * v[j]).sum();
                assert!((mv - lambda * v[i]).abs() <= 1e-9 * (1.0 + norm));
            }
        }
    }

    #[test]
    fn positivity_examples() {
        assert!(SymMatrix::zero(2).is_positive());
        assert!(!SymMatrix::diag(&[1.0, -1.0]).is_positive());
        assert!(m(&[&[2.0, 1.0], &[1.0, 2.0]]).is_positive());
    }

    #[test]
    fn loewner_examples() {
        let a = SymMatrix::diag(&[1.0, 2.0]);
        assert!(a.loewner_leq(&a).unwrap());
        assert_eq!(a.loewner_relation(&a).unwrap(), LoewnerRelation::Equal);
        assert!(a.loewner_leq(&SymMatrix::diag(&[2.0, 3.0])).unwrap());
        assert_eq!(
            a.loewner_relation(&SymMatrix::diag(&[2.0, 1.0])).unwrap(),
            LoewnerRelation::Incomparable
        );
        assert!(matches!(
            a.loewner_leq(&SymMatrix::identity(3)),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn sqrt_examples() {
        let s = PositiveElement::diag(&[4.0, 9.0]).unwrap().sqrt();
        assert_abs_diff_eq!(s.get(0, 0), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.get(1, 1), 3.0, epsilon = 1e-15);
        assert_eq!(PositiveElement::identity(2).sqrt().matrix(), &SymMatrix::identity(2));
        let p = PositiveElement::new(m(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        let spec = p.sqrt().spectrum().eigenvalues;
        assert_abs_diff_eq!(spec[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec[1], 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn sqrt_rejects_non_positive_input() {
        assert!(matches!(
            PositiveElement::new(SymMatrix::diag(&[1.0, -0.5])),
            Err(Error::NotPositive { .. })
        ));
        // Roundoff below the cone boundary is clamped.
        let p = PositiveElement::new(SymMatrix::diag(&[1.0, -1e-13])).unwrap();
        assert_eq!(p.sqrt().get(1, 1), 0.0);
    }

    #[test]
    fn abs_examples() {
        assert_eq!(SymMatrix::diag(&[-3.0, 4.0]).abs().matrix(), &SymMatrix::diag(&[3.0, 4.0]));
        let swap = m(&[&[0.0, 1.0], &[1.0, 0.0]]).abs();
        assert!((swap.matrix() - &SymMatrix::identity(2)).max_abs_entry() < 1e-14);
        let p = m(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert!((p.abs().matrix() - &p).max_abs_entry() < 1e-14);
    }

    #[test]
    fn trace_and_norm_examples() {
        assert_eq!(SymMatrix::diag(&[1.0, 2.0]).trace(), 3.0);
        assert_eq!(SymMatrix::zero(2).trace(), 0.0);
        assert_eq!(SymMatrix::identity(3).trace(), 3.0);
        assert_eq!(SymMatrix::diag(&[-3.0, 2.0]).op_norm(), 3.0);
        assert_eq!(SymMatrix::identity(2).op_norm(), 1.0);
        assert_abs_diff_eq!(m(&[&[2.0, 1.0], &[1.0, 2.0]]).op_norm(), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn congruence_examples() {
        let t = m(&[&[2.0, 1.0], &[1.0, 3.0]]);
        assert_eq!(congruence(&SymMatrix::identity(2), &t).unwrap(), t);
        assert_eq!(
            congruence(&SymMatrix::diag(&[2.0, 2.0]), &SymMatrix::identity(2)).unwrap(),
            SymMatrix::diag(&[4.0, 4.0])
        );
        assert!(congruence(&t, &SymMatrix::zero(2)).unwrap().is_zero());
        assert!(congruence(&t, &SymMatrix::zero(3)).is_err());
    }

    #[test]
    fn inverse_and_powers() {
        let a = m(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let inv = a.inverse().unwrap();
        let prod = SymMatrix::symmetrized(2, a.product(&inv));
        assert!((&prod - &SymMatrix::identity(2)).max_abs_entry() < 1e-14);
        assert!(matches!(SymMatrix::diag(&[1.0, 0.0]).inverse(), Err(Error::Singular(_))));
        let cube = a.powi(3).unwrap();
        let direct = SymMatrix::symmetrized(2, SymMatrix::symmetrized(2, a.product(&a)).product(&a));
        assert!((&cube - &direct).max_abs_entry() < 1e-12);
    }
}
