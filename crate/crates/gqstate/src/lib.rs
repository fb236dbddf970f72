//! Maximum-entropy estimation of geometric quantum states.
//!
//! A *geometric quantum state* is a probability density `q(Z)` on the manifold
//! of pure states CP^{D-1}, a strictly richer description of a quantum system
//! than its density matrix: infinitely many densities share the same second
//! moments `ρ_{αβ} = E_q[Z^α Z̄^β]`. Given a density matrix, this crate finds
//! the *least-committal* density compatible with it — the one of maximum
//! geometric entropy — which has the exponential form
//!
//! ```text
//! q(Z) = exp(−Z̄ λ Z) / Z(λ),
//! ```
//!
//! where the Hermitian multiplier matrix `λ` is fixed by the moment
//! constraints. The partition function `Z(λ)` reduces, in the eigenbasis of
//! `λ`, to a simplex integral with a closed form: a divided difference of the
//! exponential function over the spectrum. Everything downstream (moments,
//! entropy, the convex dual objective and its Newton solve) is built on a
//! confluent-stable divided-difference engine, and everything is
//! cross-checked by Monte Carlo estimators on the manifold.
//!
//! # Modules
//!
//! - [`qstate`] — Hermitian/density matrix domain types, eigendecomposition
//!   with a deterministic convention, observables, discrete ensembles.
//! - [`manifold`] — coordinates on CP^{D-1}, the volume element
//!   `∏ dp_α dν_α / 2`, and uniform sampling with reproducible streams.
//! - [`partition`] — divided differences of `exp`, `log Z(λ)`, and closed-form
//!   moments.
//! - [`maxent`] — the multiplier solve (fast co-diagonalizing Newton path and
//!   a gradient-descent reference path), geometric entropy, the Gaussian-form
//!   shortcut `λ = ½ρ^{-1}`, and an audit quantifying its moment gap.
//! - [`montecarlo`] — self-normalized importance sampling, rejection sampling,
//!   and the estimator plumbing used to verify every closed form.
//! - [`tomography`] — simulated POVM counts and linear-inversion
//!   reconstruction, producing density matrices ready for estimation.
//! - [`cli`] — the `gqstate` binary: `estimate`, `verify`, `grid`, `tomo`,
//!   `sample`, `partition` subcommands over JSON/CSV files.
//!
//! # Quick start
//!
//! ```
//! use gqstate::qstate::validate_density;
//! use gqstate::maxent::solve_multipliers;
//! use nalgebra::DMatrix;
//! use num_complex::Complex64;
//!
//! let c = Complex64::new;
//! let rho = validate_density(&DMatrix::from_row_slice(2, 2, &[
//!     c(0.45, 0.0), c(0.2, -0.3),
//!     c(0.2, 0.3),  c(0.55, 0.0),
//! ])).unwrap();
//! let report = solve_multipliers(&rho, 1e-10, 200).unwrap();
//! assert!(report.residual <= 1e-10);
//! assert!(report.entropy < std::f64::consts::PI.ln());
//! ```
//!
//! Runnable walkthroughs live in `examples/`; try
//! `cargo run --release --example estimate_qubit`.

#![forbid(unsafe_code)]

pub mod cli;
pub mod manifold;
pub mod maxent;
pub mod montecarlo;
pub mod partition;
pub mod qstate;
pub mod tomography;

use thiserror::Error;

/// Named numerical tolerances used by validation and solvers.
///
/// Centralized so that tests and documentation reference one set of numbers.
pub mod tol {
    /// Max-norm tolerance for `‖A − A†‖` when constructing Hermitian matrices
    /// from raw data.
    pub const HERMITICITY: f64 = 1e-12;
    /// Tolerance for `|Tr ρ − 1|` when validating density matrices.
    pub const TRACE: f64 = 1e-12;
    /// Eigenvalue floor for positive semidefiniteness of density matrices.
    pub const PSD_FLOOR: f64 = -1e-12;
    /// Max-norm budget for eigendecomposition reconstruction and unitarity,
    /// relative to `1 + max |entry|`.
    pub const EIGH_RECONSTRUCTION: f64 = 1e-10;
    /// Tolerance for `|Σ p_α − 1|` on simplex points.
    pub const SIMPLEX_SUM: f64 = 1e-10;
    /// Amplitudes below this modulus count as vanishing for the global-phase
    /// gauge.
    pub const GAUGE_AMPLITUDE: f64 = 1e-14;
    /// Eigenvalues below this are treated as rank deficiency: the multiplier
    /// solve refuses such densities instead of regularizing silently.
    pub const RANK: f64 = 1e-10;
    /// PSD / sum-to-identity tolerance for POVM effects.
    pub const POVM: f64 = 1e-10;
    /// Tolerance for ensemble weights summing to 1.
    pub const WEIGHT_SUM: f64 = 1e-12;
    /// Effective-sample-size floor below which importance-sampling standard
    /// errors are unreliable and estimation aborts.
    pub const ESS_FLOOR: f64 = 100.0;
    /// Relative threshold for clustering near-coincident eigenvalue nodes in
    /// divided differences: nodes within `1e-7·(1 + max|l|)` merge.
    pub const NODE_CLUSTER: f64 = 1e-7;
    /// Relative rank tolerance for the informational-completeness check.
    pub const GRAM_RANK: f64 = 1e-10;
}

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix is not Hermitian within [`tol::HERMITICITY`].
    #[error("matrix is not Hermitian: max |A - A^H| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    /// Trace differs from 1 beyond [`tol::TRACE`].
    #[error("trace must equal 1: got {trace:.12} (deviation {deviation:.3e})")]
    TraceNotOne { trace: f64, deviation: f64 },
    /// An eigenvalue falls below [`tol::PSD_FLOOR`].
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.6e}")]
    NotPsd { min_eigenvalue: f64 },
    /// Operands have incompatible dimensions.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    /// The eigensolver did not converge; diagnostics describe the input.
    #[error("eigensolver failed to converge on a {dim}x{dim} matrix (max |entry| = {max_abs:.3e})")]
    ConvergenceFailure { dim: usize, max_abs: f64 },
    /// Probability vector is not a valid simplex point.
    #[error("invalid simplex point: {detail}")]
    InvalidSimplexPoint { detail: String },
    /// Cannot project the zero vector to CP^{D-1}.
    #[error("cannot normalize the zero vector")]
    ZeroVector,
    /// Density matrix is singular at the solver's rank tolerance.
    #[error(
        "density matrix is numerically singular: min eigenvalue {min_eigenvalue:.3e} < {tol:.0e}; \
         pass an explicit regularization (mix with identity/D) to proceed"
    )]
    SingularDensity { min_eigenvalue: f64, tol: f64 },
    /// Iterative solve exhausted its budget; carries the best report found.
    #[error("no convergence after {iterations} iterations: best residual {residual:.3e}")]
    MaxIterationsExceeded {
        iterations: usize,
        residual: f64,
        report: Box<maxent::SolveReport>,
    },
    /// Importance weights collapsed onto too few samples.
    #[error(
        "importance weights degenerate: effective sample size {ess:.1} < {floor}; \
         increase the sample count or estimate from rejection samples"
    )]
    DegenerateWeights { ess: f64, floor: f64 },
    /// POVM effects do not span Hermitian-matrix space.
    #[error("POVM set is not informationally complete: effect span has rank {rank} < {required}")]
    NotInformationallyComplete { rank: usize, required: usize },
    /// POVM effects violate positivity or the identity resolution.
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    /// Grid export is defined for qubits only.
    #[error("grid export requires a qubit state (D = 2), got D = {dim}")]
    GridRequiresQubit { dim: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
