//! Solution machinery for quantum Markov decision processes (q-MDPs).
//!
//! A q-MDP evolves a density operator `ρ` on a state space `H_X` through a
//! fixed quantum channel `N : H_X ⊗ H_A → H_X`; a policy chooses, at each
//! step, how the current state is lifted into a state-action operator on
//! `H_X ⊗ H_A`, and the controller pays `⟨c, σ_t⟩` discounted by `β`.
//!
//! The crate provides, for two policy classes (open-loop appending channels
//! and classical-state-preserving closed-loop channels):
//!
//! - the dynamic-programming super-operators `T(σ) = Tr_A(σ) − β N(σ)` and
//!   `T_w = N_qc ∘ T`-style variants, together with their adjoints,
//! - primal/dual semidefinite programs over state-action occupation
//!   operators, solved by the self-contained dense interior-point solver in
//!   [`conic`],
//! - value-function algorithms (a covering-net method for the open-loop
//!   class, an exact per-basis-state method for the closed-loop class),
//! - Frank-Wolfe searches for stationary optimal policies over the
//!   corresponding bilinear programs, with SDP lower-bound certificates,
//! - soundness checkers for the duality assumptions the theory rests on,
//! - a classical MDP oracle ([`classical`]) used to validate everything on
//!   embedded classical instances.
//!
//! See the `examples/` directory for one runnable walkthrough per
//! capability, and the `qmdp` binary for file-based validation and solving.

pub mod channel;
pub mod classical;
pub mod cli;
pub mod conic;
pub mod herm;
mod linalg;
pub mod qsolve;
pub mod sample;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not Hermitian: anti-Hermitian part has max entry {0:.3e}")]
    NotHermitian(f64),
    #[error("not a density operator: {0}")]
    NotDensity(String),
    #[error("not stochastic: {0}")]
    NotStochastic(String),
    #[error("eigendecomposition did not converge (numerical degeneracy)")]
    EigenConvergence,
    #[error("invalid Choi matrix: {0}")]
    InvalidChoi(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("net size {0} exceeds cap {1}; lower the resolution or raise the cap")]
    NetTooLarge(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
