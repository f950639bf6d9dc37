//! Dense kernels sized for tall-skinny problems: `n` up to ~10⁵ rows and
//! `p` of at most a few dozen columns.
//!
//! Everything here is a pure function of its inputs.

mod eig;
mod lu;
mod lyapunov;
mod power;
mod qr;
mod svd;

pub use eig::{sym_eig, sym_eig_dense, SymEig};
pub use lu::lu_solve;
pub use lyapunov::{lyapunov_residual, solve_lyapunov};
pub use power::spectral_norm_sq;
pub use qr::{householder_qr, thin_qr, ThinQr};
pub use svd::{small_svd, SmallSvd};
