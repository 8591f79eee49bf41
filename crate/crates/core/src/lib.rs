//! Probabilistic metric spaces whose distances live in the positive cone of a
//! matrix C*-algebra, with fixed-point solvers built on them.
//!
//! * [`symcone`]: symmetric matrices, the positive cone and the Loewner order.
//! * [`cmetric`]: C*-algebra-valued metrics and their axiom checker.
//! * [`ddf`]: distance distribution functions on the cone.
//! * [`tnorm`]: t-norms and the Hadžić-type check.
//! * [`pmspace`]: PM*-spaces, neighborhoods, convergence diagnostics.
//! * [`contraction`]: `a`-contractions and the certified Picard solver.
//! * [`fredholm`]: 2×2 Fredholm systems of the second kind.

pub mod cmetric;
pub mod contraction;
pub mod ddf;
pub mod error;
pub mod fredholm;
pub mod pmspace;
pub mod report;
pub mod sampling;
pub mod symcone;
pub mod tnorm;

pub use cmetric::{CStarMetric, DiagMetric, FunctionPair, Point, PointR2, SupSumMetric};
pub use contraction::{picard_solve, AffineMap2, ContractionConstant, PicardOptions, PicardTrace};
pub use error::{Error, Result};
pub use pmspace::{make_inverted_pm, make_ratio_pm, make_trace_pm, PMSpace};
pub use report::{AxiomReport, CheckResult};
pub use sampling::{seeded, SampleRng};
pub use symcone::{PositiveElement, SymMatrix};
pub use tnorm::{TMin, TNorm, TProd};
