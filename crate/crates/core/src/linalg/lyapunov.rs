use crate::error::{Error, Result};
use crate::linalg::lu_solve;
use crate::matrix::{DenseMatrix, SymMatrix};

/// Solves `B S + S Bᵀ = C` for symmetric `S`.
///
/// When the solution is unique it is symmetric, and `B S + S Bᵀ` is
/// symmetric for every symmetric `S`, so the upper triangle of the equation
/// is a square `p(p+1)/2` system in the packed entries of `S`. For the
/// `p <= 10` sizes used here that system is at most 55 x 55 and is solved
/// directly.
pub fn solve_lyapunov(b: &DenseMatrix, c: &SymMatrix) -> Result<SymMatrix> {
    let p = c.dim();
    b.check_shape(p, p)?;
    let len = c.packed_len();
    let mut op = DenseMatrix::zeros(len, len);
    let mut unit = SymMatrix::zeros(p);
    for k in 0..len {
        let (i, j) = packed_position(k);
        unit.set(i, j, 1.0);
        let image = apply(b, &unit);
        unit.set(i, j, 0.0);
        op.col_mut(k).copy_from_slice(image.packed());
    }
    let packed = lu_solve(&op, c.packed()).map_err(|e| match e {
        Error::Singular { pivot } => Error::SingularLyapunov { pivot },
        other => other,
    })?;
    SymMatrix::from_packed(p, packed)
}

/// `B S + S Bᵀ - C`, returned as a symmetric matrix.
pub fn lyapunov_residual(b: &DenseMatrix, s: &SymMatrix, c: &SymMatrix) -> SymMatrix {
    &apply(b, s) - c
}

// Inverse of the packed index j(j+1)/2 + i.
fn packed_position(k: usize) -> (usize, usize) {
    let mut j = 0;
    while (j + 1) * (j + 2) / 2 <= k {
        j += 1;
    }
    (k - j * (j + 1) / 2, j)
}

fn apply(b: &DenseMatrix, s: &SymMatrix) -> SymMatrix {
    let bs = b.mul_sym(s);
    SymMatrix::from_fn(s.dim(), |i, j| bs[(i, j)] + bs[(j, i)])
}
