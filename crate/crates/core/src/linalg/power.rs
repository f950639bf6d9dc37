use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::sym_eig_dense;
use crate::matrix::{axpy_slice, dot_slice, DenseMatrix};
use crate::rng::{seeded, standard_normal};

const MAX_ITERS: usize = 1000;
const REL_TOL: f64 = 1e-13;
const RESTART_SEED: u64 = 0x5eed;
// Below this Gram size a stagnating power iteration is replaced by a dense
// eigensolve of the Gram matrix.
const DENSE_FALLBACK_DIM: usize = 1024;

/// Squared spectral norm `‖A‖₂²` by power iteration on the smaller of `AᵀA`
/// and `AAᵀ`.
///
/// Starts from the all-ones vector; if that vector lies in the null space
/// (common for centered data) a single seeded random restart is made. A zero
/// matrix returns 0.
pub fn spectral_norm_sq(a: &DenseMatrix) -> f64 {
    if a.max_abs() == 0.0 {
        return 0.0;
    }
    let gram_dim = a.rows().min(a.cols());
    let start = vec![1.0 / libm::sqrt(gram_dim as f64); gram_dim];
    let (rho, converged) = match power(a, start) {
        Some(r) => r,
        None => {
            let mut rng = seeded(RESTART_SEED);
            let mut v: Vec<f64> = (0..gram_dim).map(|_| standard_normal(&mut rng)).collect();
            let n = libm::sqrt(dot_slice(&v, &v));
            v.iter_mut().for_each(|x| *x /= n);
            match power(a, v) {
                Some(r) => r,
                None => return 0.0,
            }
        }
    };
    if converged || gram_dim > DENSE_FALLBACK_DIM {
        return rho;
    }
    let gram = if a.cols() <= a.rows() {
        a.tr_matmul(a)
    } else {
        a.matmul_tr(a)
    };
    match sym_eig_dense(&gram) {
        Ok(eig) => eig.values[gram_dim - 1],
        Err(_) => rho,
    }
}

// Returns the Rayleigh quotient and whether it converged, or None when the
// iterate collapses to zero.
fn power(a: &DenseMatrix, mut v: Vec<f64>) -> Option<(f64, bool)> {
    let mut rho_prev = f64::NAN;
    let mut rho = 0.0;
    for _ in 0..MAX_ITERS {
        let w = gram_apply(a, &v);
        rho = dot_slice(&v, &w);
        let norm = libm::sqrt(dot_slice(&w, &w));
        if norm == 0.0 {
            return None;
        }
        if (rho - rho_prev).abs() <= REL_TOL * rho {
            return Some((rho, true));
        }
        rho_prev = rho;
        v = w;
        v.iter_mut().for_each(|x| *x /= norm);
    }
    Some((rho, false))
}

fn gram_apply(a: &DenseMatrix, v: &[f64]) -> Vec<f64> {
    let (m, n) = a.shape();
    if n <= m {
        // Aᵀ (A v)
        let mut av = vec![0.0; m];
        for (j, &vj) in v.iter().enumerate() {
            axpy_slice(&mut av, vj, a.col(j));
        }
        (0..n).map(|j| dot_slice(a.col(j), &av)).collect()
    } else {
        // A (Aᵀ v)
        let mut out = vec![0.0; m];
        for j in 0..n {
            let c = dot_slice(a.col(j), v);
            axpy_slice(&mut out, c, a.col(j));
        }
        out
    }
}
