//! Martingale optimal transport between finitely supported measures on the
//! real line.
//!
//! The crate provides exact calculus on discrete (sub-)probability measures
//! (CDF, quantile, potential), convex/stochastic order checks and the convex
//! order join, a self-contained two-phase revised simplex solver, builders
//! and solvers for martingale transport problems with costs `|x-y|^rho` or
//! concave tables, direct constructions of monotone martingale couplings,
//! per-point diagonal analysis, the `alpha_rho` threshold analytics, and a
//! benchmark pipeline comparing power-cost optima against the `rho = 1`
//! maximizer.

pub mod bench;
pub mod couplings;
pub mod measures;
pub mod motlp;
pub mod order;
pub mod pointmass;
pub mod simplex;
pub mod thresholds;
pub(crate) mod util;

#[cfg(test)]
pub(crate) mod testutil;

pub use couplings::{DirectionalSplit, MonotoneReport, PhiPath, SqLaw};
pub use measures::DiscreteMeasure;
pub use motlp::{CostSpec, Coupling, CouplingNorm, SolveReport};
pub use order::OrderReport;
pub use pointmass::PointMassProfile;
pub use simplex::{LinearProgram, LpSolution, LpStatus, Sense, SimplexSolver};
pub use thresholds::AlphaRho;

/// Crate-wide error type. Variant names follow the operation contracts.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("atoms must be strictly increasing")]
    Unsorted,
    #[error("weights must be positive and finite")]
    NonpositiveWeight,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("argument {name}={value} outside {lo}..{hi}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("measure is not a probability measure (mass must be 1)")]
    NotProbability,
    #[error("means differ beyond tolerance: {0} vs {1}")]
    MeanMismatch(f64, f64),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("iteration limit exceeded in {0}")]
    IterationLimit(&'static str),
    #[error("measures are not in convex order")]
    NotConvexOrdered,
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("directional split does not sum to the target measure: {0}")]
    SplitMismatch(String),
    #[error("no coupling with the requested directional split: {0}")]
    InfeasibleSplit(String),
    #[error("degenerate split: {0}")]
    Degenerate(String),
    #[error("reduced measure mu + nu_l + nu_r - nu has a negative atom at {0}")]
    NegativeReducedMeasure(f64),
    #[error("nested supports condition does not hold")]
    NoNestedSupports,
    #[error("independent construction routes disagree: {0}")]
    CrossCheckFailure(String),
    #[error("potential functions touch at x={0}; point-mass profile undefined")]
    PotentialsTouch(f64),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("constraint violated: {0}")]
    ConstraintViolated(&'static str),
    #[error("support shape mismatch: {0}")]
    SupportShapeMismatch(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
