//! Triangular norms, their iterates `Tⁿ`, and the equicontinuity-at-1
//! diagnostic that separates Hadžić-type norms from the rest.

use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::report::{AxiomReport, CheckResult};
use crate::Result;

/// A binary operation on `[0, 1]` meant to satisfy the t-norm axioms.
pub trait TNorm: Send + Sync {
    /// `T(a, b)`; inputs are assumed to lie in `[0, 1]`.
    fn apply(&self, a: f64, b: f64) -> f64;

    fn name(&self) -> &str;

    /// Closed form of `Tⁿ(a)` when one is known.
    fn closed_form_iterate(&self, _a: f64, _n: u64) -> Option<f64> {
        None
    }

    /// `T(a, b)` with the unit-interval check.
    fn checked(&self, a: f64, b: f64) -> Result<f64> {
        unit(a, "t-norm argument")?;
        unit(b, "t-norm argument")?;
        Ok(self.apply(a, b))
    }
}

fn unit(value: f64, context: &'static str) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OutsideUnitInterval { value, context })
    }
}

/// `T_min(a, b) = min(a, b)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TMin;

/// `T_prod(a, b) = a·b`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TProd;

impl TNorm for TMin {
    fn apply(&self, a: f64, b: f64) -> f64 {
        a.min(b)
    }

    fn name(&self) -> &str {
        "min"
    }

    fn closed_form_iterate(&self, a: f64, _n: u64) -> Option<f64> {
        Some(a)
    }
}

impl TNorm for TProd {
    fn apply(&self, a: f64, b: f64) -> f64 {
        a * b
    }

    fn name(&self) -> &str {
        "prod"
    }

    fn closed_form_iterate(&self, a: f64, n: u64) -> Option<f64> {
        Some(a.powf(n as f64 + 1.0))
    }
}

pub fn t_min(a: f64, b: f64) -> Result<f64> {
    TMin.checked(a, b)
}

pub fn t_prod(a: f64, b: f64) -> Result<f64> {
    TProd.checked(a, b)
}

pub struct FnTNorm<F> {
    name: String,
    f: F,
}

impl<F: Fn(f64, f64) -> f64 + Send + Sync> FnTNorm<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<F: Fn(f64, f64) -> f64 + Send + Sync> TNorm for FnTNorm<F> {
    fn apply(&self, a: f64, b: f64) -> f64 {
        (self.f)(a, b)
    }

    fn name(&self) -> &str {
        &self.name
    }
}

/// `Tⁿ(a)` by the recursion `T¹(a) = T(a, a)`, `Tⁿ(a) = T(Tⁿ⁻¹(a), a)`.
pub fn iterate<T: TNorm + ?Sized>(tnorm: &T, a: f64, n: u64) -> Result<f64> {
    unit(a, "iterate argument")?;
    if n == 0 {
        return Err(Error::InvalidArgument("iterate order must be at least 1".into()));
    }
    let mut value = tnorm.apply(a, a);
    for _ in 1..n {
        value = tnorm.apply(value, a);
    }
    Ok(value)
}

/// Relative slack for associativity: floating-point products are not
/// associative, so `a·(b·c)` and `(a·b)·c` may differ in the last bits.
pub const ASSOC_ULPS: f64 = 4.0;

/// Grid check of commutativity, associativity, the unit law and monotonicity
/// on `points` equally spaced values in `[0, 1]`.
pub fn check_tnorm_axioms<T: TNorm + ?Sized>(tnorm: &T, points: usize) -> Result<AxiomReport> {
    if points < 2 {
        return Err(Error::InvalidArgument("grid needs at least two points".into()));
    }
    let grid: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
    let t = |a, b| tnorm.apply(a, b);
    let mut comm = CheckResult::new("commutativity");
    let mut assoc = CheckResult::new("associativity");
    let mut unit_law = CheckResult::new("unit");
    let mut mono = CheckResult::new("monotonicity");

    for (i, &a) in grid.iter().enumerate() {
        unit_law.record(t(a, 1.0) == a, None, || json!({ "a": a, "T(a,1)": t(a, 1.0) }));
        for (j, &b) in grid.iter().enumerate() {
            comm.record(t(a, b) == t(b, a), None, || json!({ "a": a, "b": b }));
            if i + 1 < points {
                let up = grid[i + 1];
                mono.record(t(a, b) <= t(up, b), None, || json!({ "a": a, "a'": up, "b": b }));
            }
            if j + 1 < points {
                let up = grid[j + 1];
                mono.record(t(a, b) <= t(a, up), None, || json!({ "a": a, "b": b, "b'": up }));
            }
            for &c in &grid {
                let (l, r) = (t(a, t(b, c)), t(t(a, b), c));
                let margin = ASSOC_ULPS * f64::EPSILON * l.abs().max(r.abs()) - (l - r).abs();
                assoc.record(margin >= 0.0, Some(margin), || {
                    json!({ "a": a, "b": b, "c": c, "lhs": l, "rhs": r })
                });
            }
        }
    }
    Ok(AxiomReport::new(tnorm.name(), points * points, vec![comm, assoc, unit_law, mono]))
}

/// How far in `n` a Hadžić verdict reaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HadzicBasis {
    /// A closed form of `Tⁿ` was used, so the verdict covers every `n ≥ 1`.
    AllOrders,
    /// The recursion was evaluated for `n ≤ nMax` only.
    UpToNMax,
}

/// A point where `Tⁿ(a) ≤ 1 − ε` although `a > 1 − δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HadzicWitness {
    pub epsilon: f64,
    pub delta: f64,
    pub a: f64,
    pub n: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HadzicEntry {
    pub epsilon: f64,
    /// First `δ` on the search grid that certifies `ε`.
    pub delta: Option<f64>,
    pub basis: HadzicBasis,
    /// Failure at the smallest `δ` tried, when no `δ` worked.
    pub witness: Option<HadzicWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HadzicReport {
    pub tnorm: String,
    pub n_max: u64,
    pub entries: Vec<HadzicEntry>,
}

impl HadzicReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.delta.is_some())
    }
}

const DELTA_STEPS: i32 = 40;
const A_GRID: usize = 21;
/// Search horizon for orders when a closed form is available.
const CLOSED_FORM_HORIZON: u64 = 1 << 60;

/// Smallest `n` with `Tⁿ(a) ≤ level`, if any.
fn first_failing_order<T: TNorm + ?Sized>(
    tnorm: &T,
    a: f64,
    level: f64,
    n_max: u64,
) -> Option<(u64, f64)> {
    if tnorm.closed_form_iterate(a, 1).is_some() {
        let at = |n| tnorm.closed_form_iterate(a, n).expect("closed form");
        // Iterates are non-increasing in n, so bisect on the order.
        if at(CLOSED_FORM_HORIZON) > level {
            return None;
        }
        let (mut lo, mut hi) = (0u64, CLOSED_FORM_HORIZON);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if at(mid) <= level {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return Some((hi, at(hi)));
    }
    let mut value = tnorm.apply(a, a);
    for n in 1..=n_max {
        if n > 1 {
            value = tnorm.apply(value, a);
        }
        if value <= level {
            return Some((n, value));
        }
    }
    None
}

/// Searches, for each `ε`, a `δ ∈ {ε·2⁻ᵏ : k = 0..40}` such that every point
/// of a 21-point grid in `(1 − δ, 1]` keeps `Tⁿ(a) > 1 − ε`. With a closed
/// form the search covers all orders; otherwise orders up to `n_max`.
pub fn hadzic_check<T: TNorm + ?Sized>(
    tnorm: &T,
    epsilons: &[f64],
    n_max: u64,
) -> Result<HadzicReport> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("nMax must be at least 1".into()));
    }
    if let Some(e) = epsilons.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(Error::InvalidArgument(format!("epsilon {e} outside (0, 1)")));
    }
    let basis = if tnorm.closed_form_iterate(0.5, 1).is_some() {
        HadzicBasis::AllOrders
    } else {
        HadzicBasis::UpToNMax
    };

    let entries = epsilons
        .iter()
        .map(|&epsilon| {
            let level = 1.0 - epsilon;
            let mut witness = None;
            for k in 0..=DELTA_STEPS {
                let delta = epsilon * 2f64.powi(-k);
                let failure = (0..A_GRID).find_map(|i| {
                    let a = 1.0 - delta * i as f64 / A_GRID as f64;
                    first_failing_order(tnorm, a, level, n_max)
                        .map(|(n, value)| HadzicWitness { epsilon, delta, a, n, value })
                });
                match failure {
                    None => return HadzicEntry { epsilon, delta: Some(delta), basis, witness: None },
                    Some(w) => witness = Some(w),
                }
            }
            HadzicEntry { epsilon, delta: None, basis, witness }
        })
        .collect();

    Ok(HadzicReport { tnorm: tnorm.name().to_string(), n_max, entries })
}
