//! Dominant-eigenpair solvers built around the power method, with a
//! delayed-momentum acceleration scheme (DMPower and its streaming variant
//! DMStream), the classical baselines they are usually compared against,
//! and a deterministic benchmark harness.
//!
//! The crate is organized as:
//!
//! - [`matrix`], [`vector`], [`report`]: shared dense types.
//! - [`metrics`]: Rayleigh quotients, angular errors, perturbation norms.
//! - [`oracle`]: a cyclic-Jacobi eigendecomposition used as ground truth.
//!   It shares no code with the iterative solvers it checks.
//! - [`matgen`]: random covariance matrices with an exactly prescribed
//!   spectrum, via a synthetic SVD.
//! - [`solvers`]: vanilla power iteration, power iteration with momentum,
//!   DMPower, simultaneous (block) iteration, and Lanczos.
//! - [`streaming`]: batch-estimate streaming solvers (stochastic power,
//!   mini-batch momentum, Oja's rule, DMStream).
//! - [`clustering`]: deflation-based power iteration clustering on toy
//!   two-dimensional datasets.
//! - [`bench`]: seeded experiment grids emitting CSV.
//!
//! Everything is deterministic given the seeds handed in; no global RNG
//! state is consulted anywhere.

pub mod bench;
pub mod clustering;
pub mod error;
pub mod matgen;
pub mod matrix;
pub mod metrics;
pub mod oracle;
pub mod report;
pub mod solvers;
pub mod streaming;
pub mod vector;

pub use error::{Error, Result};
pub use matgen::{GeneratedInstance, Spectrum};
pub use matrix::SymmetricMatrix;
pub use report::{EigenEstimate, SolveReport, StopKind, StopRule};
pub use vector::UnitVector;
