//! Geometry of the Stiefel manifold St(p, n) = {X ∈ ℝ^{n×p} : XᵀX = I_p}.

use alloc::format;

use crate::error::{Error, Result};
use crate::linalg::{small_svd, solve_lyapunov, sym_eig, thin_qr};
use crate::matrix::{DenseMatrix, SymMatrix};
use crate::rng::{seeded, standard_normal_matrix};

/// Orthonormality tolerance for [`StiefelPoint::new`].
pub const ON_MANIFOLD_TOL: f64 = 1e-10;
/// Relative tangency tolerance for [`TangentVector::new`].
pub const TANGENT_TOL: f64 = 1e-8;

/// A matrix with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct StiefelPoint {
    mat: DenseMatrix,
}

impl StiefelPoint {
    /// Validates `‖XᵀX - I‖_F <= 1e-10`.
    pub fn new(mat: DenseMatrix) -> Result<Self> {
        Self::with_tolerance(mat, ON_MANIFOLD_TOL)
    }

    pub fn with_tolerance(mat: DenseMatrix, tol: f64) -> Result<Self> {
        if mat.rows() < mat.cols() {
            return Err(Error::InvalidArgument(format!(
                "Stiefel point needs n >= p, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let residual = orthonormality_residual(&mat);
        if !(residual <= tol) {
            return Err(Error::NotOnManifold { residual });
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix produced by a routine that guarantees orthonormality.
    pub(crate) fn new_unchecked(mat: DenseMatrix) -> Self {
        debug_assert!(orthonormality_residual(&mat) < 1e-8);
        Self { mat }
    }

    #[inline]
    pub fn mat(&self) -> &DenseMatrix {
        &self.mat
    }

    pub fn into_inner(self) -> DenseMatrix {
        self.mat
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.mat.cols()
    }

    pub fn residual(&self) -> f64 {
        orthonormality_residual(&self.mat)
    }
}

/// `‖MᵀM - I‖_F`.
pub fn orthonormality_residual(m: &DenseMatrix) -> f64 {
    let mut g = m.tr_matmul(m);
    for i in 0..g.cols() {
        g[(i, i)] -= 1.0;
    }
    g.frob_norm()
}

/// A tangent vector together with the point it is attached to.
#[derive(Clone, Debug)]
pub struct TangentVector<'a> {
    base: &'a StiefelPoint,
    mat: DenseMatrix,
}

impl<'a> TangentVector<'a> {
    /// Validates `‖Xᵀη + ηᵀX‖_F <= 1e-8 · max(1, ‖η‖_F)`.
    pub fn new(base: &'a StiefelPoint, mat: DenseMatrix) -> Result<Self> {
        mat.check_shape(base.n(), base.p())?;
        let residual = tangency_residual(base, &mat);
        if !(residual <= TANGENT_TOL * mat.frob_norm().max(1.0)) {
            return Err(Error::NotTangent { residual });
        }
        Ok(Self { base, mat })
    }

    pub(crate) fn new_unchecked(base: &'a StiefelPoint, mat: DenseMatrix) -> Self {
        Self { base, mat }
    }

    pub fn zero(base: &'a StiefelPoint) -> Self {
        Self {
            base,
            mat: DenseMatrix::zeros(base.n(), base.p()),
        }
    }

    #[inline]
    pub fn base(&self) -> &'a StiefelPoint {
        self.base
    }

    #[inline]
    pub fn mat(&self) -> &DenseMatrix {
        &self.mat
    }

    pub fn into_inner(self) -> DenseMatrix {
        self.mat
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            base: self.base,
            mat: self.mat.scaled(alpha),
        }
    }

    pub fn norm(&self) -> f64 {
        self.mat.frob_norm()
    }
}

/// `‖Xᵀη + ηᵀX‖_F`.
pub fn tangency_residual(x: &StiefelPoint, eta: &DenseMatrix) -> f64 {
    2.0 * x.mat.sym_tr_matmul(eta).frob_norm()
}

/// Orthogonal projection `ξ - X sym(Xᵀξ)` onto the tangent space at `X`.
pub fn project_tangent<'a>(x: &'a StiefelPoint, xi: &DenseMatrix) -> Result<TangentVector<'a>> {
    xi.check_shape(x.n(), x.p())?;
    let sym = x.mat.sym_tr_matmul(xi);
    let mut eta = xi.clone();
    eta.axpy(-1.0, &x.mat.mul_sym(&sym));
    Ok(TangentVector::new_unchecked(x, eta))
}

/// Polar retraction `(X + η)(I + ηᵀη)^{-1/2}`, computed as `Q U Vᵀ` from
/// `X + η = QR` and `R = U Σ Vᵀ`.
pub fn retract(x: &StiefelPoint, eta: &TangentVector<'_>) -> Result<StiefelPoint> {
    if !core::ptr::eq(x, eta.base) && x != eta.base {
        return Err(Error::BaseMismatch);
    }
    polar_factor(&(&x.mat + &eta.mat))
}

/// Orthonormal polar factor of a full-column-rank matrix, i.e. the nearest
/// point on the manifold in Frobenius norm.
pub fn polar_factor(m: &DenseMatrix) -> Result<StiefelPoint> {
    let qr = thin_qr(m)?;
    let svd = small_svd(&qr.r)?;
    let uvt = svd.u.matmul_tr(&svd.v);
    Ok(StiefelPoint::new_unchecked(qr.q.matmul(&uvt)))
}

/// The tangent vector `η` at `X` with `retract(X, η) = Y`.
///
/// Solves `(XᵀY) S + S (YᵀX) = 2I` and returns `η = Y S - X`. Fails when the
/// equation is singular or `S` is not positive definite, both of which mean
/// `Y` is outside the region where the retraction is invertible.
pub fn inverse_retract<'a>(x: &'a StiefelPoint, y: &StiefelPoint) -> Result<TangentVector<'a>> {
    y.mat.check_shape(x.n(), x.p())?;
    let b = x.mat.tr_matmul(&y.mat);
    let s = solve_lyapunov(&b, &SymMatrix::identity(x.p()).scaled(2.0))
        .map_err(|e| Error::InverseRetraction(format!("{e}")))?;
    let min_eig = sym_eig(&s)?.values[0];
    if !(min_eig > 0.0) {
        return Err(Error::InverseRetraction(format!(
            "S is not positive definite (smallest eigenvalue {min_eig:e})"
        )));
    }
    let mut eta = y.mat.mul_sym(&s);
    eta.axpy(-1.0, &x.mat);
    // Exactly tangent in exact arithmetic; the projection only removes
    // roundoff.
    project_tangent(x, &eta)
}

/// Q factor of a seeded standard normal `n x p` matrix.
pub fn random_point(n: usize, p: usize, seed: u64) -> Result<StiefelPoint> {
    if p == 0 || n < p {
        return Err(Error::InvalidArgument(format!(
            "random_point needs n >= p >= 1, got n={n}, p={p}"
        )));
    }
    let mut rng = seeded(seed);
    let g = standard_normal_matrix(n, p, &mut rng);
    Ok(StiefelPoint::new_unchecked(thin_qr(&g)?.q))
}

/// Random tangent vector at `x` with Frobenius norm `norm`.
pub fn random_tangent<'a>(x: &'a StiefelPoint, norm: f64, seed: u64) -> TangentVector<'a> {
    let mut rng = seeded(seed);
    let g = standard_normal_matrix(x.n(), x.p(), &mut rng);
    let eta = project_tangent(x, &g).expect("shapes match by construction");
    let len = eta.norm();
    // A trivial tangent space (n = p = 1) leaves only roundoff.
    if len <= 1e-12 * g.frob_norm() {
        return TangentVector::zero(x);
    }
    eta.scaled(norm / len)
}
