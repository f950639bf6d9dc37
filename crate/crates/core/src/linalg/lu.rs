use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Solves `a · x = b` by Gaussian elimination with partial pivoting.
///
/// Fails with [`Error::Singular`] when a pivot falls below
/// `1e-14 · max|a_ij|`.
pub fn lu_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows();
    a.check_shape(n, n)?;
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: (n, 1),
            found: (b.len(), 1),
        });
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    let tiny = 1e-14 * m.max_abs().max(f64::MIN_POSITIVE);

    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|i| (i, m[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax <= tiny {
            return Err(Error::Singular { pivot: pmax });
        }
        if piv != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            x.swap(k, piv);
        }
        let d = m[(k, k)];
        for i in k + 1..n {
            let l = m[(i, k)] / d;
            if l != 0.0 {
                m[(i, k)] = 0.0;
                for j in k + 1..n {
                    let v = m[(k, j)];
                    m[(i, j)] -= l * v;
                }
                x[i] -= l * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= m[(k, j)] * x[j];
        }
        x[k] = s / m[(k, k)];
    }
    Ok(x)
}
