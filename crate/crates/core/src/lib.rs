//! Riemannian proximal-gradient methods for l1-penalized sparse PCA.
//!
//! The crate solves
//!
//! ```text
//! min  -‖AX‖_F² + λ‖X‖₁   subject to  XᵀX = I_p
//! ```
//!
//! over the Stiefel manifold St(p, n) with three outer methods:
//!
//! * [`solver::manpg`]: manifold proximal gradient with Armijo backtracking,
//! * [`solver::manpg_ada`]: the same with an adaptive proximal parameter,
//! * [`solver::amanpg`]: the accelerated (FISTA-type) method with a periodic
//!   safeguard that restarts the momentum when it stops paying off.
//!
//! Every variant can optionally precondition its proximal subproblem with a
//! diagonal weight extracted from the Riemannian Hessian. The subproblems are
//! solved through their dual nonlinear system with a semi-smooth Newton
//! method ([`ssn`]).
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. It performs no IO; wall-clock timing is injected through
//! [`solver::Clock`].

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
pub mod linalg;
pub mod matrix;
pub mod prox;
pub mod rng;
pub mod solver;
pub mod spca;
pub mod ssn;
pub mod stiefel;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, SymMatrix};
pub use solver::{RunReport, RunStatus, SolverConfig, Variant};
pub use spca::{DiagonalWeight, SpcaProblem};
pub use stiefel::{StiefelPoint, TangentVector};
