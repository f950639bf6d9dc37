use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{dot_slice, DenseMatrix};

const MAX_SWEEPS: usize = 60;

/// Thin SVD `M = U diag(sigma) Vᵀ` of a tall matrix, singular values
/// descending.
#[derive(Clone, Debug)]
pub struct SmallSvd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

/// One-sided Jacobi SVD. Intended for the `p x p` factors that show up in
/// retractions, but works for any matrix with `rows >= cols`.
///
/// Columns of `U` belonging to zero singular values are completed to an
/// orthonormal set so `U` always has orthonormal columns.
pub fn small_svd(m: &DenseMatrix) -> Result<SmallSvd> {
    let (rows, cols) = m.shape();
    if rows < cols {
        return Err(Error::InvalidArgument(alloc::format!(
            "small_svd needs rows >= cols, got {rows}x{cols}"
        )));
    }
    let mut w = m.clone();
    let mut v = DenseMatrix::identity(cols);
    let tol = 1e-15;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for j in 0..cols {
            for k in j + 1..cols {
                let alpha = dot_slice(w.col(j), w.col(j));
                let beta = dot_slice(w.col(k), w.col(k));
                let gamma = dot_slice(w.col(j), w.col(k));
                if gamma == 0.0 || gamma.abs() <= tol * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_cols(&mut w, j, k, c, s);
                rotate_cols(&mut v, j, k, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "small_svd",
            iterations: MAX_SWEEPS,
        });
    }

    let norms: Vec<f64> = (0..cols)
        .map(|j| libm::sqrt(dot_slice(w.col(j), w.col(j))))
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let scale = norms.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut u = DenseMatrix::zeros(rows, cols);
    let mut vs = DenseMatrix::zeros(cols, cols);
    let mut sigma = Vec::with_capacity(cols);
    let mut deficient = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        vs.col_mut(dst).copy_from_slice(v.col(src));
        if s > 1e-14 * scale && s > 0.0 {
            for (ui, wi) in u.col_mut(dst).iter_mut().zip(w.col(src)) {
                *ui = wi / s;
            }
        } else {
            deficient.push(dst);
        }
    }
    for dst in deficient {
        complete_column(&mut u, dst);
    }
    Ok(SmallSvd { u, sigma, v: vs })
}

fn rotate_cols(m: &mut DenseMatrix, j: usize, k: usize, c: f64, s: f64) {
    let rows = m.rows();
    let data = m.as_mut_slice();
    let (left, right) = data.split_at_mut(k * rows);
    let cj = &mut left[j * rows..(j + 1) * rows];
    let ck = &mut right[..rows];
    for (a, b) in cj.iter_mut().zip(ck.iter_mut()) {
        let x = *a;
        let y = *b;
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

// Fill column `dst` with a unit vector orthogonal to every other nonzero
// column, by Gram-Schmidt on canonical basis vectors.
fn complete_column(u: &mut DenseMatrix, dst: usize) {
    let (rows, cols) = u.shape();
    for e in 0..rows {
        let mut cand = alloc::vec![0.0; rows];
        cand[e] = 1.0;
        for _ in 0..2 {
            for j in 0..cols {
                if j == dst {
                    continue;
                }
                let col = u.col(j);
                let d = dot_slice(col, &cand);
                for (ci, uj) in cand.iter_mut().zip(col) {
                    *ci -= d * uj;
                }
            }
        }
        let n = libm::sqrt(dot_slice(&cand, &cand));
        if n > 0.5 {
            for (ui, ci) in u.col_mut(dst).iter_mut().zip(&cand) {
                *ui = ci / n;
            }
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{seeded, standard_normal_matrix};

    fn reconstruct(s: &SmallSvd) -> DenseMatrix {
        let us = DenseMatrix::from_fn(s.u.rows(), s.u.cols(), |i, j| s.u[(i, j)] * s.sigma[j]);
        us.matmul_tr(&s.v)
    }

    #[test]
    fn diagonal_values_sorted() {
        let m = DenseMatrix::from_diag(&[1.0, -3.0, 2.0]);
        let s = small_svd(&m).unwrap();
        assert_eq!(s.sigma, alloc::vec![3.0, 2.0, 1.0]);
        assert!((&reconstruct(&s) - &m).max_abs() < 1e-15);
    }

    #[test]
    fn diag_two_one() {
        let s = small_svd(&DenseMatrix::from_diag(&[2.0, 1.0])).unwrap();
        assert_eq!(s.sigma, alloc::vec![2.0, 1.0]);
        assert!((&s.u - &DenseMatrix::identity(2)).max_abs() < 1e-15);
        assert!((&s.v - &DenseMatrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn permutation_has_unit_values() {
        let m = DenseMatrix::from_row_major(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let s = small_svd(&m).unwrap();
        assert!((s.sigma[0] - 1.0).abs() < 1e-15 && (s.sigma[1] - 1.0).abs() < 1e-15);
        assert!((&reconstruct(&s) - &m).max_abs() < 1e-15);
    }

    #[test]
    fn values_match_gram_eigenvalues() {
        let mut rng = seeded(3);
        for p in 1..=8 {
            let m = standard_normal_matrix(p, p, &mut rng);
            let s = small_svd(&m).unwrap();
            let eig = crate::linalg::sym_eig_dense(&m.tr_matmul(&m)).unwrap();
            for (k, sv) in s.sigma.iter().enumerate() {
                let from_eig = libm::sqrt(eig.values[p - 1 - k].max(0.0));
                assert!((sv - from_eig).abs() < 1e-10, "p={p} k={k}: {sv} vs {from_eig}");
            }
        }
    }

    #[test]
    fn random_tall_and_square() {
        let mut rng = seeded(11);
        for (r, c) in [(4usize, 4usize), (7, 3), (30, 6), (1, 1)] {
            let m = standard_normal_matrix(r, c, &mut rng);
            let s = small_svd(&m).unwrap();
            assert!((&reconstruct(&s) - &m).frob_norm() < 1e-13 * m.frob_norm());
            let utu = s.u.tr_matmul(&s.u);
            assert!((&utu - &DenseMatrix::identity(c)).max_abs() < 1e-13);
            let vtv = s.v.tr_matmul(&s.v);
            assert!((&vtv - &DenseMatrix::identity(c)).max_abs() < 1e-13);
            assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rank_deficient_keeps_orthonormal_u() {
        let m = DenseMatrix::from_row_major(3, 3, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0])
            .unwrap();
        let s = small_svd(&m).unwrap();
        assert!((s.sigma[0] - 2.0).abs() < 1e-14);
        assert!(s.sigma[1].abs() < 1e-14 && s.sigma[2].abs() < 1e-14);
        let utu = s.u.tr_matmul(&s.u);
        assert!((&utu - &DenseMatrix::identity(3)).max_abs() < 1e-13);
        assert!((&reconstruct(&s) - &m).max_abs() < 1e-14);
    }

    #[test]
    fn wide_input_rejected() {
        assert!(small_svd(&DenseMatrix::zeros(2, 3)).is_err());
    }
}
