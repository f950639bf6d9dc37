//! The weighted proximal subproblem on a tangent space,
//!
//! ```text
//! min_η  ⟨grad f(X), η⟩ + (1/2μ)‖η‖_W² + λ‖X + η‖₁   s.t.  Xᵀη + ηᵀX = 0,
//! ```
//!
//! solved through its dual: the multiplier `Λ` (a symmetric `p x p` matrix)
//! is a root of
//!
//! ```text
//! Ψ(Λ) = 𝒜(Prox(X - μW⁻¹(grad f(X) - 𝒜*Λ)) - X),
//! ```
//!
//! where `𝒜(η) = Xᵀη + ηᵀX` and `𝒜*Λ = 2XΛ`. `Ψ` is the gradient of a convex
//! function, so its generalized Jacobian is symmetric positive semidefinite
//! and a semi-smooth Newton iteration converges fast once the active set
//! settles.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::lu_solve;
use crate::matrix::{DenseMatrix, SymMatrix};
use crate::prox::{prox_clarke_mask, scaled_prox, soft_threshold};
use crate::spca::DiagonalWeight;
use crate::stiefel::{project_tangent, StiefelPoint, TangentVector};

/// Inputs of one subproblem.
#[derive(Clone, Copy, Debug)]
pub struct SubproblemSpec<'s, 'a> {
    pub x: &'a StiefelPoint,
    pub gradf: &'s TangentVector<'a>,
    pub weight: &'s DiagonalWeight,
    pub mu: f64,
    pub lambda: f64,
}

impl<'s, 'a> SubproblemSpec<'s, 'a> {
    pub fn new(
        gradf: &'s TangentVector<'a>,
        weight: &'s DiagonalWeight,
        mu: f64,
        lambda: f64,
    ) -> Result<Self> {
        let x = gradf.base();
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidArgument(alloc::format!("mu must be positive, got {mu}")));
        }
        if !(lambda >= 0.0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "penalty must be nonnegative, got {lambda}"
            )));
        }
        weight.weights().check_shape(x.n(), x.p())?;
        Ok(Self {
            x,
            gradf,
            weight,
            mu,
            lambda,
        })
    }

    /// Subproblem objective `⟨G, η⟩ + (1/2μ)‖η‖_W² + λ‖X + η‖₁`.
    pub fn objective(&self, eta: &DenseMatrix) -> f64 {
        let sum = self.x.mat() + eta;
        self.gradf.mat().dot(eta)
            + self.weight.norm_sq(eta) / (2.0 * self.mu)
            + self.lambda * sum.as_slice().iter().map(|v| v.abs()).sum::<f64>()
    }
}

/// Result of [`solve_subproblem`].
#[derive(Clone, Debug)]
pub struct SubproblemSolution<'a> {
    pub eta: TangentVector<'a>,
    pub dual: SymMatrix,
    /// `‖Ψ(dual)‖_F` at exit.
    pub residual: f64,
    pub newton_iters: usize,
}

/// Stopping and safeguard parameters of the Newton iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SsnOptions {
    pub max_iters: usize,
    /// Absolute tolerance per dual coordinate; scaled by `√(p(p+1)/2)`.
    pub eps_abs: f64,
    /// Tolerance relative to `‖Ψ(0)‖_F`.
    pub eps_rel: f64,
    pub max_halvings: usize,
}

impl Default for SsnOptions {
    fn default() -> Self {
        Self {
            max_iters: 40,
            eps_abs: 1e-10,
            eps_rel: 1e-8,
            max_halvings: 20,
        }
    }
}

/// `𝒜(η) = Xᵀη + ηᵀX`.
pub fn cal_a(x: &DenseMatrix, eta: &DenseMatrix) -> SymMatrix {
    x.sym_tr_matmul(eta).scaled(2.0)
}

/// `𝒜*(Λ) = 2XΛ`, the adjoint of [`cal_a`] under the trace inner products.
pub fn cal_a_star(x: &DenseMatrix, lam: &SymMatrix) -> DenseMatrix {
    x.mul_sym(lam).scaled(2.0)
}

// Quantities of Ψ that do not depend on Λ: the prox argument at Λ = 0 and the
// entrywise μ/w and μλ/w.
struct Workspace<'p> {
    x: &'p DenseMatrix,
    g: &'p DenseMatrix,
    w: &'p DenseMatrix,
    mu: f64,
    lambda: f64,
    base: DenseMatrix,
    step: DenseMatrix,
    thresh: DenseMatrix,
}

impl<'p> Workspace<'p> {
    fn new(spec: &'p SubproblemSpec<'_, '_>) -> Self {
        let x = spec.x.mat();
        let w = spec.weight.weights();
        let step = w.map(|wij| spec.mu / wij);
        let thresh = w.map(|wij| spec.mu * spec.lambda / wij);
        let mut base = x.clone();
        for ((b, g), s) in base
            .as_mut_slice()
            .iter_mut()
            .zip(spec.gradf.mat().as_slice())
            .zip(step.as_slice())
        {
            *b -= s * g;
        }
        Self {
            x,
            g: spec.gradf.mat(),
            w,
            mu: spec.mu,
            lambda: spec.lambda,
            base,
            step,
            thresh,
        }
    }

    // Negated Lagrangian dual at Λ, whose gradient is Ψ(Λ):
    // -(⟨G - 𝒜*Λ, η⟩ + (1/2μ)‖η‖_W² + λ‖X + η‖₁) with η = η(Λ).
    fn dual_objective(&self, lam: &SymMatrix, z: &DenseMatrix) -> f64 {
        let eta = self.eta(z);
        let shifted = cal_a_star(self.x, lam);
        let mut lin = 0.0;
        let mut quad = 0.0;
        let mut l1 = 0.0;
        for i in 0..eta.as_slice().len() {
            let e = eta.as_slice()[i];
            lin += (self.g.as_slice()[i] - shifted.as_slice()[i]) * e;
            quad += self.w.as_slice()[i] * e * e;
            l1 += (self.x.as_slice()[i] + e).abs();
        }
        -(lin + quad / (2.0 * self.mu) + self.lambda * l1)
    }

    // Prox argument X - μW⁻¹(G - 2XΛ).
    fn argument(&self, lam: &SymMatrix) -> DenseMatrix {
        let mut z = cal_a_star(self.x, lam);
        for ((zi, b), s) in z
            .as_mut_slice()
            .iter_mut()
            .zip(self.base.as_slice())
            .zip(self.step.as_slice())
        {
            *zi = b + s * *zi;
        }
        z
    }

    // η(Λ) = Prox(argument) - X.
    fn eta(&self, z: &DenseMatrix) -> DenseMatrix {
        let mut eta = z.clone();
        for ((e, t), xi) in eta
            .as_mut_slice()
            .iter_mut()
            .zip(self.thresh.as_slice())
            .zip(self.x.as_slice())
        {
            *e = soft_threshold(*e, *t) - xi;
        }
        eta
    }

    fn psi(&self, lam: &SymMatrix) -> (SymMatrix, DenseMatrix) {
        let z = self.argument(lam);
        let eta = self.eta(&z);
        (cal_a(self.x, &eta), z)
    }

    // Diagonal of the generalized Jacobian of the prox composed with μW⁻¹.
    fn jacobian_diag(&self, z: &DenseMatrix) -> DenseMatrix {
        let mut d = z.clone();
        for ((di, t), s) in d
            .as_mut_slice()
            .iter_mut()
            .zip(self.thresh.as_slice())
            .zip(self.step.as_slice())
        {
            *di = if di.abs() > *t { *s } else { 0.0 };
        }
        d
    }

    fn jacobian_apply(&self, diag: &DenseMatrix, d: &SymMatrix) -> SymMatrix {
        let mut v = cal_a_star(self.x, d);
        for (vi, di) in v.as_mut_slice().iter_mut().zip(diag.as_slice()) {
            *vi *= di;
        }
        cal_a(self.x, &v)
    }
}

/// `Ψ(Λ)`.
pub fn psi(spec: &SubproblemSpec<'_, '_>, lam: &SymMatrix) -> SymMatrix {
    Workspace::new(spec).psi(lam).0
}

/// `J_Ψ(Λ)[d] = 𝒜(mask ∘ (μW⁻¹ 𝒜*d))` for a Clarke mask from
/// [`prox_clarke_mask`] at the current prox argument.
pub fn jpsi_apply(spec: &SubproblemSpec<'_, '_>, mask: &DenseMatrix, d: &SymMatrix) -> SymMatrix {
    let x = spec.x.mat();
    let mut v = cal_a_star(x, d);
    for ((vi, m), w) in v
        .as_mut_slice()
        .iter_mut()
        .zip(mask.as_slice())
        .zip(spec.weight.weights().as_slice())
    {
        *vi *= m * spec.mu / w;
    }
    cal_a(x, &v)
}

/// Clarke mask at the prox argument belonging to `lam`.
pub fn clarke_mask_at(spec: &SubproblemSpec<'_, '_>, lam: &SymMatrix) -> DenseMatrix {
    let ws = Workspace::new(spec);
    prox_clarke_mask(&ws.argument(lam), spec.weight, spec.mu * spec.lambda)
}

/// The minimizer `η = Prox(X - μW⁻¹(G - 𝒜*Λ)) - X` for a given multiplier,
/// before any tangent projection.
pub fn eta_from_dual(spec: &SubproblemSpec<'_, '_>, lam: &SymMatrix) -> DenseMatrix {
    let ws = Workspace::new(spec);
    let z = ws.argument(lam);
    let prox = scaled_prox(&z, spec.weight, spec.mu * spec.lambda);
    &prox - spec.x.mat()
}

const ARMIJO: f64 = 1e-4;
// Fraction of the linear decrease required to keep extending a full step.
const EXPAND: f64 = 0.5;
const MAX_EXPANSIONS: usize = 40;
// Upper bound of the ‖Ψ‖-proportional regularization of the Newton systems.
const REG_CAP: f64 = 1e-2;

/// Semi-smooth Newton on `Ψ(Λ) = 0`, warm-started from `warm` (zero when
/// absent).
///
/// Each Newton system is assembled densely in the orthonormal coordinates of
/// the symmetric matrices and regularized by `min(‖Ψ‖_F, 1e-2)` times its
/// mean diagonal. Backtracking accepts a step on Armijo decrease of the dual
/// objective, or on a decrease of `‖Ψ‖_F` once the dual objective is flat to
/// roundoff. If the halvings run out, a plain gradient step is taken instead.
pub fn solve_subproblem<'a>(
    spec: &SubproblemSpec<'_, 'a>,
    warm: Option<&SymMatrix>,
    opts: &SsnOptions,
) -> Result<SubproblemSolution<'a>> {
    let p = spec.x.p();
    let len = p * (p + 1) / 2;
    let ws = Workspace::new(spec);

    let zero = SymMatrix::zeros(p);
    let psi0_norm = ws.psi(&zero).0.frob_norm();
    let tol = (opts.eps_abs * libm::sqrt(len as f64)).max(opts.eps_rel * psi0_norm);

    let mut lam = match warm {
        Some(w) if w.dim() == p => w.clone(),
        _ => zero,
    };
    let (mut res, mut z) = ws.psi(&lam);
    let mut res_norm = res.frob_norm();
    // Bound on ‖J_Ψ‖ used by the gradient fallback: ‖𝒜‖ = ‖𝒜*‖ = 2.
    let lipschitz = 4.0 * ws.step.max_abs();

    let mut phi = ws.dual_objective(&lam, &z);
    let mut iters = 0;
    while res_norm > tol {
        if iters >= opts.max_iters {
            return Err(Error::SsnNotConverged {
                iterations: iters,
                residual: res_norm,
                best_dual: lam,
            });
        }
        iters += 1;

        let diag = ws.jacobian_diag(&z);
        let dir = newton_direction(&ws, &diag, &res, len, p, res_norm.min(REG_CAP));

        let mut accepted = false;
        if let Some(dir) = dir {
            let slope = res.dot(&dir);
            // Cancellation in φ near the root; below this level only the
            // residual test is meaningful.
            let slack = 64.0 * f64::EPSILON * (1.0 + phi.abs());
            let mut alpha = 1.0;
            for _ in 0..=opts.max_halvings {
                let mut trial = lam.clone();
                trial.axpy(alpha, &dir);
                let (t_res, t_z) = ws.psi(&trial);
                let t_norm = t_res.frob_norm();
                let t_phi = ws.dual_objective(&trial, &t_z);
                let armijo = slope < 0.0 && t_phi <= phi + ARMIJO * alpha * slope;
                if armijo || (t_norm < res_norm && t_phi <= phi + slack) {
                    let mut best = (trial, t_res, t_z, t_norm, t_phi);
                    // A full step along a direction in which the Jacobian is
                    // singular only reaches the next kink of Ψ; keep doubling
                    // while the decrease stays linear.
                    if armijo && alpha == 1.0 {
                        for _ in 0..MAX_EXPANSIONS {
                            alpha *= 2.0;
                            let mut trial = lam.clone();
                            trial.axpy(alpha, &dir);
                            let (e_res, e_z) = ws.psi(&trial);
                            let e_phi = ws.dual_objective(&trial, &e_z);
                            if !(e_phi <= phi + EXPAND * alpha * slope && e_phi < best.4) {
                                break;
                            }
                            let e_norm = e_res.frob_norm();
                            best = (trial, e_res, e_z, e_norm, e_phi);
                        }
                    }
                    (lam, res, z, res_norm, phi) = best;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
        }
        if !accepted {
            if !(lipschitz > 0.0) {
                break;
            }
            lam.axpy(-1.0 / lipschitz, &res);
            let (t_res, t_z) = ws.psi(&lam);
            res = t_res;
            z = t_z;
            res_norm = res.frob_norm();
            phi = ws.dual_objective(&lam, &z);
        }
    }

    let eta = ws.eta(&z);
    let eta = project_tangent(spec.x, &eta)?;
    Ok(SubproblemSolution {
        eta,
        dual: lam,
        residual: res_norm,
        newton_iters: iters,
    })
}

// Solves (J + εI) d = -Ψ in scaled coordinates; retries with a stronger
// regularization if the first factorization breaks down.
fn newton_direction(
    ws: &Workspace<'_>,
    diag: &DenseMatrix,
    res: &SymMatrix,
    len: usize,
    p: usize,
    reg0: f64,
) -> Option<SymMatrix> {
    let mut jac = DenseMatrix::zeros(len, len);
    for k in 0..len {
        let image = ws.jacobian_apply(diag, &SymMatrix::basis(p, k));
        jac.col_mut(k).copy_from_slice(&image.to_scaled_vec());
    }
    let trace: f64 = (0..len).map(|k| jac[(k, k)]).sum();
    let scale = if trace > 0.0 { trace / len as f64 } else { 1.0 };
    let rhs: Vec<f64> = res.to_scaled_vec().iter().map(|v| -v).collect();
    for reg in [reg0.max(1e-12), 1e-8, 1e-4, 1e-1] {
        let mut reg_jac = jac.clone();
        for k in 0..len {
            reg_jac[(k, k)] += reg * scale;
        }
        if let Ok(sol) = lu_solve(&reg_jac, &rhs) {
            if sol.iter().all(|v| v.is_finite()) {
                return Some(SymMatrix::from_scaled_vec(p, &sol));
            }
        }
    }
    None
}
