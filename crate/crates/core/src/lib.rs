//! Vector-valued Gibbs thermodynamics on a finite state set.
//!
//! A finite set of states `A ⊂ ℝⁿ` carries a vector energy (the inclusion map),
//! and an inverse-temperature covector `β ∈ ℝⁿ*` weights each state by
//! `exp(−(β, ω))`. From there the crate provides:
//!
//! | Module | What it computes |
//! |--------|------------------|
//! | [`state_space`] | validated state sets, observables, covectors, affine span |
//! | [`gibbs`] | `log Z(β)`, Gibbs distribution, mean energy, covariance, entropy |
//! | [`moment_solver`] | inversion `Ē ↦ β(Ē)` of the mean-energy map by damped Newton, and `S(Ē)` |
//! | [`polytope`] | `Q = Conv(A)`: vertices, facets, interior margin, minimizing faces, low-temperature limits |
//! | [`duality`] | Legendre residuals between `−log Z` and `S`, Schur-complement direct images of quadratic forms |
//! | [`microstates`] | multinomial particle sampling, occupation counts, equilibrium-microstate counts |
//! | [`toric`] | positive part of the toric variety and the projective moment map |
//! | [`cli`] | the `moment-gibbs` command-line front end |
//!
//! ```
//! use moment_gibbs::{gibbs, moment_solver, CoVector, SolveOptions, StateSet};
//!
//! let a = StateSet::new(1, vec![vec![0.0], vec![1.0]], None).unwrap();
//! let beta = CoVector::new(vec![3f64.ln()]);
//! let mean = gibbs::mean_energy(&a, &beta).unwrap();
//! assert!((mean[0] - 0.25).abs() < 1e-15);
//!
//! let report = moment_solver::invert_mean_energy(&a, &mean, &SolveOptions::default()).unwrap();
//! assert!((report.beta[0] - 3f64.ln()).abs() < 1e-12);
//! ```

pub mod cli;
pub mod duality;
pub mod gibbs;
pub mod microstates;
pub mod moment_solver;
pub mod polytope;
pub mod state_space;
pub mod toric;

mod linalg;

pub use duality::QuadraticForm;
pub use gibbs::{Distribution, GibbsSummary};
pub use microstates::MicrostateCounts;
pub use moment_solver::{SolveOptions, SolveReport};
pub use polytope::{FaceResult, Polytope};
pub use state_space::{AffineSpan, CoVector, Observable, StateSet};
pub use toric::WeightVector;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("state set is empty")]
    EmptyStateSet,

    #[error("points {first} and {second} are identical")]
    DuplicatePoint { first: usize, second: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid solver options: {0}")]
    InvalidOptions(String),

    #[error("target lies outside the hull (interior margin {margin:.6e})")]
    TargetOutsideHull { margin: f64 },

    #[error(
        "target lies on the hull boundary (interior margin {margin:.6e}); β diverges there, \
         use polytope::tropical_limit for the limiting face"
    )]
    TargetOnBoundary { margin: f64 },

    #[error("no convergence after {} iterations (gradient norm {:.3e})", .0.iterations, .0.grad_norm)]
    NoConvergence(Box<SolveReport>),

    #[error("affine dimension {0} exceeds the supported maximum of 6")]
    UnsupportedDimension(usize),

    #[error("point is off the affine span of the state set (distance {distance:.6e})")]
    OffAffineSpan { distance: f64 },

    #[error("direction must be nonzero")]
    ZeroDirection,

    #[error("matrix is not positive definite: {0}")]
    NotNegativeDefinite(String),

    #[error("kept = {kept} must satisfy 1 <= kept < {dim}")]
    BadSplit { kept: usize, dim: usize },

    #[error("particle total must be at least 1, got {0}")]
    InvalidTotal(u64),

    #[error("weight vector is all zeros")]
    AllZeroWeights,
}

pub type Result<T> = std::result::Result<T, Error>;
