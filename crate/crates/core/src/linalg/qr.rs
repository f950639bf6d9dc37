use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{axpy_slice, dot_slice, DenseMatrix};

/// Compact QR factors: `q` is `n × p` with orthonormal columns, `r` is
/// `p × p` upper triangular with a nonnegative diagonal.
#[derive(Clone, Debug)]
pub struct ThinQr {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
}

/// Householder QR of a tall matrix without any rank check.
///
/// A column that is (numerically) in the span of its predecessors yields a
/// tiny `r_jj` and an arbitrary but orthonormal `q_j`.
pub fn householder_qr(m: &DenseMatrix) -> ThinQr {
    let (n, p) = m.shape();
    assert!(n >= p, "householder_qr needs rows >= cols");
    let mut w = m.clone();
    let mut reflectors: Vec<Option<(Vec<f64>, f64)>> = Vec::with_capacity(p);

    for j in 0..p {
        let x = &w.col(j)[j..];
        let norm = libm::sqrt(dot_slice(x, x));
        if norm == 0.0 {
            reflectors.push(None);
            continue;
        }
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv = dot_slice(&v, &v);
        if vv == 0.0 {
            reflectors.push(None);
            continue;
        }
        let beta = 2.0 / vv;
        for c in j..p {
            let col = &mut w.col_mut(c)[j..];
            let s = beta * dot_slice(&v, col);
            axpy_slice(col, -s, &v);
        }
        reflectors.push(Some((v, beta)));
    }

    let mut r = DenseMatrix::zeros(p, p);
    for j in 0..p {
        for i in 0..=j {
            r[(i, j)] = w[(i, j)];
        }
    }

    let mut q = DenseMatrix::eye(n, p);
    for j in (0..p).rev() {
        if let Some((v, beta)) = &reflectors[j] {
            for c in j..p {
                let col = &mut q.col_mut(c)[j..];
                let s = beta * dot_slice(v, col);
                axpy_slice(col, -s, v);
            }
        }
    }

    for j in 0..p {
        if r[(j, j)] < 0.0 {
            for c in j..p {
                r[(j, c)] = -r[(j, c)];
            }
            q.col_mut(j).iter_mut().for_each(|v| *v = -*v);
        }
    }
    ThinQr { q, r }
}

/// Compact QR of a full-column-rank tall matrix.
///
/// Fails with [`Error::RankDeficient`] when some `|r_jj| < 1e-12 · ‖M‖_F`.
pub fn thin_qr(m: &DenseMatrix) -> Result<ThinQr> {
    let (n, p) = m.shape();
    if n < p {
        return Err(Error::InvalidArgument("thin_qr needs rows >= cols".into()));
    }
    let qr = householder_qr(m);
    let floor = 1e-12 * m.frob_norm();
    for j in 0..p {
        if !(qr.r[(j, j)].abs() >= floor) || qr.r[(j, j)] == 0.0 {
            return Err(Error::RankDeficient { column: j });
        }
    }
    Ok(qr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{seeded, standard_normal_matrix};

    fn orthonormality_residual(q: &DenseMatrix) -> f64 {
        (&q.tr_matmul(q) - &DenseMatrix::identity(q.cols())).frob_norm()
    }

    #[test]
    fn identity_columns() {
        let m = DenseMatrix::eye(3, 2);
        let qr = thin_qr(&m).unwrap();
        assert!((&qr.q - &m).frob_norm() < 1e-15);
        assert!((&qr.r - &DenseMatrix::identity(2)).frob_norm() < 1e-15);
    }

    #[test]
    fn three_four_five() {
        let m = DenseMatrix::from_row_major(2, 1, &[3., 4.]).unwrap();
        let qr = thin_qr(&m).unwrap();
        assert!((qr.q[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((qr.q[(1, 0)] - 0.8).abs() < 1e-15);
        assert!((qr.r[(0, 0)] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn random_tall_matrix_residuals() {
        let mut rng = seeded(11);
        let m = standard_normal_matrix(50, 4, &mut rng);
        let qr = thin_qr(&m).unwrap();
        assert!(orthonormality_residual(&qr.q) < 1e-12);
        assert!((&qr.q.matmul(&qr.r) - &m).frob_norm() < 1e-12 * m.frob_norm());
        for j in 0..4 {
            assert!(qr.r[(j, j)] >= 0.0);
            for i in j + 1..4 {
                assert_eq!(qr.r[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn square_case() {
        let mut rng = seeded(3);
        let m = standard_normal_matrix(3, 3, &mut rng);
        let qr = thin_qr(&m).unwrap();
        assert!(orthonormality_residual(&qr.q) < 1e-12);
    }

    #[test]
    fn detects_rank_deficiency() {
        let m = DenseMatrix::from_row_major(3, 2, &[1., 2., 2., 4., 3., 6.]).unwrap();
        assert!(matches!(thin_qr(&m), Err(Error::RankDeficient { column: 1 })));
        // The unchecked variant still returns orthonormal Q.
        let qr = householder_qr(&m);
        assert!(orthonormality_residual(&qr.q) < 1e-12);
        assert!(qr.r[(1, 1)].abs() < 1e-12);
    }

    #[test]
    fn zero_column_keeps_q_orthonormal() {
        let m = DenseMatrix::from_row_major(3, 2, &[1., 0., 0., 0., 0., 0.]).unwrap();
        let qr = householder_qr(&m);
        assert!(orthonormality_residual(&qr.q) < 1e-15);
        assert!(thin_qr(&m).is_err());
    }
}
