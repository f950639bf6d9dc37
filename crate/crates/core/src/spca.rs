//! The l1-penalized sparse PCA problem `min -‖AX‖_F² + λ‖X‖₁` on St(p, n),
//! its data generators and the reported quality metrics.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{householder_qr, sym_eig_dense, thin_qr, SymEig};
use crate::matrix::{dot_slice, DenseMatrix};
use crate::rng::{seeded, standard_normal, standard_normal_matrix};
use crate::stiefel::{project_tangent, StiefelPoint, TangentVector};

/// Default magnitude below which an entry counts as zero.
pub const SPARSITY_THRESHOLD: f64 = 1e-5;

/// A problem instance: data `A` (samples x variables) and penalty `λ`.
///
/// Construction caches `diag(AᵀA)` and the eigendecomposition of the smaller
/// Gram matrix, which supplies `‖A‖₂²` and the PCA baseline.
#[derive(Clone, Debug)]
pub struct SpcaProblem {
    a: DenseMatrix,
    lambda: f64,
    diag_ata: Vec<f64>,
    spec_sq: f64,
    gram: SymEig,
}

impl SpcaProblem {
    pub fn new(a: DenseMatrix, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "penalty must be finite and nonnegative, got {lambda}"
            )));
        }
        if !a.is_finite() {
            let k = a.as_slice().iter().position(|v| !v.is_finite()).unwrap_or(0);
            return Err(Error::NonFinite {
                row: k % a.rows(),
                col: k / a.rows(),
            });
        }
        let diag_ata = (0..a.cols()).map(|j| dot_slice(a.col(j), a.col(j))).collect();
        let gram_mat = if a.cols() <= a.rows() {
            a.tr_matmul(&a)
        } else {
            a.matmul_tr(&a)
        };
        let gram = sym_eig_dense(&gram_mat)?;
        let spec_sq = gram.values.last().copied().unwrap_or(0.0).max(0.0);
        Ok(Self {
            a,
            lambda,
            diag_ata,
            spec_sq,
            gram,
        })
    }

    /// Same data with a different penalty; reuses the cached quantities.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "penalty must be finite and nonnegative, got {lambda}"
            )));
        }
        let mut out = self.clone();
        out.lambda = lambda;
        Ok(out)
    }

    #[inline]
    pub fn data(&self) -> &DenseMatrix {
        &self.a
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Number of variables (rows of `X`).
    #[inline]
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Number of samples.
    #[inline]
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn diag_ata(&self) -> &[f64] {
        &self.diag_ata
    }

    /// `‖A‖₂²`.
    pub fn spec_sq(&self) -> f64 {
        self.spec_sq
    }

    /// Squared singular values of `A`, descending.
    pub fn squared_singular_values(&self) -> Vec<f64> {
        self.gram.values.iter().rev().map(|&v| v.max(0.0)).collect()
    }

    /// `-‖AX‖_F²`.
    pub fn eval_f(&self, x: &StiefelPoint) -> f64 {
        -self.a.matmul(x.mat()).frob_norm_sq()
    }

    /// `λ Σ |X_ij|`.
    pub fn eval_g(&self, x: &DenseMatrix) -> f64 {
        self.lambda * x.as_slice().iter().map(|v| v.abs()).sum::<f64>()
    }

    /// `F = f + g`.
    pub fn objective(&self, x: &StiefelPoint) -> f64 {
        self.eval_f(x) + self.eval_g(x.mat())
    }

    /// Euclidean gradient `-2AᵀAX` together with `AX`.
    pub fn euclid_grad(&self, x: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
        let ax = self.a.matmul(x);
        let grad = self.a.tr_matmul(&ax).scaled(-2.0);
        (grad, ax)
    }

    /// Riemannian gradient `P_T(-2AᵀAX)`.
    pub fn riem_grad_f<'a>(&self, x: &'a StiefelPoint) -> TangentVector<'a> {
        let (g, _) = self.euclid_grad(x.mat());
        project_tangent(x, &g).expect("gradient has the shape of X")
    }

    /// Lipschitz constant `2‖A‖₂²` of the Euclidean gradient.
    pub fn lipschitz_bound(&self) -> f64 {
        2.0 * self.spec_sq
    }

    /// `w_ij = max(-2(diag(AᵀA)_i - (XᵀAᵀAX)_jj), τ)`, the diagonal of the
    /// Kronecker-structured Hessian surrogate floored at `τ`.
    pub fn diag_weight(&self, x: &StiefelPoint, tau: f64) -> Result<DiagonalWeight> {
        let ax = self.a.matmul(x.mat());
        self.diag_weight_from_ax(&ax, tau)
    }

    pub(crate) fn diag_weight_from_ax(&self, ax: &DenseMatrix, tau: f64) -> Result<DiagonalWeight> {
        let col_sq: Vec<f64> = (0..ax.cols()).map(|j| dot_slice(ax.col(j), ax.col(j))).collect();
        let w = DenseMatrix::from_fn(self.n(), ax.cols(), |i, j| {
            (-2.0 * (self.diag_ata[i] - col_sq[j])).max(tau)
        });
        DiagonalWeight::new(w, tau)
    }

    /// Explained-variance ratio of the loadings `X`: `Σ R_jj²` from the QR of
    /// `AX`, divided by the variance `Σ_{j<=p} σ_j²` captured by plain PCA.
    ///
    /// A column of `AX` that is linearly dependent on earlier ones contributes
    /// zero. The result is clamped to `[0, 1]`.
    pub fn adjusted_variance(&self, x: &DenseMatrix) -> f64 {
        let p = x.cols();
        let ax = self.a.matmul(x);
        let r = householder_qr(&ax).r;
        let explained: f64 = (0..p.min(r.rows())).map(|j| r[(j, j)] * r[(j, j)]).sum();
        let best: f64 = self.squared_singular_values().iter().take(p).sum();
        if best <= 0.0 {
            return 0.0;
        }
        (explained / best).clamp(0.0, 1.0)
    }

    /// The leading `p` right singular vectors of `A`.
    ///
    /// With repeated singular values any orthonormal basis of the invariant
    /// subspace may be returned.
    pub fn pca_loadings(&self, p: usize) -> Result<StiefelPoint> {
        let (m, n) = self.a.shape();
        if p == 0 || p > m.min(n) {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= p <= min(m, n) = {}, got {p}",
                m.min(n)
            )));
        }
        let k = self.gram.values.len();
        if n <= m {
            let v = DenseMatrix::from_fn(n, p, |i, j| self.gram.vectors[(i, k - 1 - j)]);
            return Ok(StiefelPoint::new_unchecked(thin_qr(&v)?.q));
        }
        // Right singular vectors from the left ones: v_j = Aᵀu_j / σ_j.
        let mut v = DenseMatrix::zeros(n, p);
        for j in 0..p {
            let sigma_sq = self.gram.values[k - 1 - j];
            if !(sigma_sq > 0.0) {
                return Err(Error::RankDeficient { column: j });
            }
            let u = self.gram.vectors.col(k - 1 - j);
            let inv = 1.0 / libm::sqrt(sigma_sq);
            for (i, vi) in v.col_mut(j).iter_mut().enumerate() {
                *vi = dot_slice(self.a.col(i), u) * inv;
            }
        }
        // Re-orthonormalize to remove the roundoff of the division. R has a
        // nonnegative diagonal, so column signs are kept.
        Ok(StiefelPoint::new_unchecked(thin_qr(&v)?.q))
    }
}

/// Entrywise weights of a diagonal metric on ℝ^{n×p}, all at least `tau`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalWeight {
    w: DenseMatrix,
    tau: f64,
}

impl DiagonalWeight {
    pub fn new(w: DenseMatrix, tau: f64) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidArgument(format!("weight floor must be positive, got {tau}")));
        }
        for j in 0..w.cols() {
            for (i, &v) in w.col(j).iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if v < tau {
                    return Err(Error::InvalidArgument(format!(
                        "weight ({i}, {j}) = {v} is below the floor {tau}"
                    )));
                }
            }
        }
        Ok(Self { w, tau })
    }

    /// The Euclidean metric (all weights one).
    pub fn identity(n: usize, p: usize) -> Self {
        Self {
            w: DenseMatrix::from_fn(n, p, |_, _| 1.0),
            tau: 1.0,
        }
    }

    #[inline]
    pub fn weights(&self) -> &DenseMatrix {
        &self.w
    }

    #[inline]
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `‖η‖_W² = Σ w_ij η_ij²`.
    pub fn norm_sq(&self, eta: &DenseMatrix) -> f64 {
        self.w
            .as_slice()
            .iter()
            .zip(eta.as_slice())
            .map(|(w, e)| w * e * e)
            .sum()
    }
}

/// Fraction of entries with magnitude below `thresh`.
pub fn sparsity(x: &DenseMatrix, thresh: f64) -> f64 {
    let zeros = x.as_slice().iter().filter(|v| v.abs() < thresh).count();
    zeros as f64 / x.as_slice().len() as f64
}

/// How columns are scaled after (optional) centering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ColumnScale {
    /// Population standard deviation one (divisor `m`).
    #[default]
    UnitStd,
    /// Euclidean norm one.
    UnitNorm,
}

/// Optionally subtracts column means, then rescales every column.
pub fn normalize_columns(m: &DenseMatrix, center: bool, scale: ColumnScale) -> Result<DenseMatrix> {
    let rows = m.rows() as f64;
    let mut out = m.clone();
    for j in 0..out.cols() {
        let col = out.col_mut(j);
        let mean = col.iter().sum::<f64>() / rows;
        if center {
            col.iter_mut().for_each(|v| *v -= mean);
        }
        let denom = match scale {
            ColumnScale::UnitStd => {
                let base = if center { 0.0 } else { mean };
                libm::sqrt(col.iter().map(|v| (v - base) * (v - base)).sum::<f64>() / rows)
            }
            ColumnScale::UnitNorm => libm::sqrt(dot_slice(col, col)),
        };
        if !(denom > 0.0) {
            return Err(Error::ZeroVariance { column: j });
        }
        col.iter_mut().for_each(|v| *v /= denom);
    }
    Ok(out)
}

/// Seeded i.i.d. N(0, 1) data, centered and scaled column by column.
pub fn gen_random_data(m: usize, n: usize, seed: u64, scale: ColumnScale) -> Result<DenseMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("data needs m, n >= 1".into()));
    }
    let mut rng = seeded(seed);
    normalize_columns(&standard_normal_matrix(m, n, &mut rng), true, scale)
}

/// Standard deviation of the additive noise in [`gen_synthetic_data`]
/// (variance 0.25).
pub const SYNTHETIC_NOISE_STD: f64 = 0.5;

/// The five sparse base components: disjoint blocks of `⌊n/10⌋` ones starting
/// at `0, n/10, ..., 4n/10`.
pub fn synthetic_components(n: usize) -> DenseMatrix {
    let len = n / 10;
    DenseMatrix::from_fn(n, 5, |i, k| {
        let start = k * n / 10;
        if i >= start && i < start + len {
            1.0
        } else {
            0.0
        }
    })
}

/// Rows cycle through the five base components (`m/5` copies of each) plus
/// N(0, `noise_std²`) noise; no normalization.
pub fn gen_synthetic_raw(m: usize, n: usize, seed: u64, noise_std: f64) -> Result<DenseMatrix> {
    if m == 0 || m % 5 != 0 {
        return Err(Error::InvalidArgument(format!(
            "synthetic data needs m divisible by 5, got {m}"
        )));
    }
    if n < 10 {
        return Err(Error::InvalidArgument(format!("synthetic data needs n >= 10, got {n}")));
    }
    let comps = synthetic_components(n);
    let mut rng = seeded(seed);
    let mut a = DenseMatrix::zeros(m, n);
    for j in 0..n {
        for i in 0..m {
            a[(i, j)] = comps[(j, i % 5)] + noise_std * standard_normal(&mut rng);
        }
    }
    Ok(a)
}

/// Synthetic data with noise variance 0.25, columns scaled but not
/// centered so the sparse structure of the components survives.
pub fn gen_synthetic_data(m: usize, n: usize, seed: u64, scale: ColumnScale) -> Result<DenseMatrix> {
    normalize_columns(&gen_synthetic_raw(m, n, seed, SYNTHETIC_NOISE_STD)?, false, scale)
}

/// Column means and population standard deviations.
pub fn column_stats(m: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let rows = m.rows() as f64;
    let mut means = vec![0.0; m.cols()];
    let mut stds = vec![0.0; m.cols()];
    for j in 0..m.cols() {
        let col = m.col(j);
        let mean = col.iter().sum::<f64>() / rows;
        means[j] = mean;
        stds[j] = libm::sqrt(col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / rows);
    }
    (means, stds)
}
