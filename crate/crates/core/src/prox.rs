//! Proximal map of `μλ‖·‖₁` in a diagonal metric.

use crate::matrix::DenseMatrix;
use crate::spca::DiagonalWeight;

/// `argmin_V ½‖V - Z‖_W² + μλ‖V‖₁`, i.e. entrywise soft-thresholding at
/// `μλ / w_ij`.
pub fn scaled_prox(z: &DenseMatrix, w: &DiagonalWeight, mulambda: f64) -> DenseMatrix {
    let mut out = z.clone();
    for (v, &wij) in out.as_mut_slice().iter_mut().zip(w.weights().as_slice()) {
        *v = soft_threshold(*v, mulambda / wij);
    }
    out
}

#[inline]
pub fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// An element of the Clarke generalized Jacobian of [`scaled_prox`]: 1 where
/// `|Z_ij|` is strictly above its threshold, 0 otherwise (including at the
/// kink).
pub fn prox_clarke_mask(z: &DenseMatrix, w: &DiagonalWeight, mulambda: f64) -> DenseMatrix {
    let mut out = z.clone();
    for (v, &wij) in out.as_mut_slice().iter_mut().zip(w.weights().as_slice()) {
        *v = if v.abs() > mulambda / wij { 1.0 } else { 0.0 };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{seeded, standard_normal, standard_normal_matrix};

    fn ones(n: usize, p: usize) -> DiagonalWeight {
        DiagonalWeight::identity(n, p)
    }

    #[test]
    fn soft_threshold_examples() {
        let z = DenseMatrix::from_col_major(2, 1, [2.0, 0.3].to_vec()).unwrap();
        let out = scaled_prox(&z, &ones(2, 1), 0.5);
        assert_eq!(out.as_slice(), &[1.5, 0.0]);
        let neg = scaled_prox(&z.scaled(-1.0), &ones(2, 1), 0.5);
        assert_eq!(neg.as_slice(), &[-1.5, 0.0]);
    }

    // Golden-section search on the scalar objective (w/2)(v - z)² + c|v|.
    // Comparisons use the factored difference f(a) - f(b) so the flat
    // quadratic bottom does not drown in cancellation.
    fn scalar_minimizer(z: f64, w: f64, c: f64) -> f64 {
        let diff = |a: f64, b: f64| 0.5 * w * (a - b) * (a + b - 2.0 * z) + c * (a.abs() - b.abs());
        let (mut lo, mut hi) = (-z.abs() - 1.0, z.abs() + 1.0);
        let g = (libm::sqrt(5.0) - 1.0) / 2.0;
        while hi - lo > 1e-11 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if diff(a, b) < 0.0 {
                hi = b;
            } else {
                lo = a;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn matches_scalar_minimization() {
        let mut rng = seeded(1);
        let z = standard_normal_matrix(6, 3, &mut rng);
        let w = DiagonalWeight::new(
            DenseMatrix::from_fn(6, 3, |_, _| 0.2 + standard_normal(&mut rng).abs()),
            0.2,
        )
        .unwrap();
        let c = 0.4;
        let out = scaled_prox(&z, &w, c);
        for j in 0..3 {
            for i in 0..6 {
                let oracle = scalar_minimizer(z[(i, j)], w.weights()[(i, j)], c);
                assert!((out[(i, j)] - oracle).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn mask_examples() {
        let z = DenseMatrix::from_fn(3, 2, |_, _| 5.0);
        assert!(prox_clarke_mask(&z, &ones(3, 2), 1.0).as_slice().iter().all(|&m| m == 1.0));
        let z = DenseMatrix::zeros(3, 2);
        assert!(prox_clarke_mask(&z, &ones(3, 2), 1.0).as_slice().iter().all(|&m| m == 0.0));
        let kink = DenseMatrix::from_fn(1, 1, |_, _| 1.0);
        assert_eq!(prox_clarke_mask(&kink, &ones(1, 1), 1.0)[(0, 0)], 0.0);
    }

    #[test]
    fn mask_is_derivative_off_the_kink() {
        let z = DenseMatrix::from_col_major(4, 1, [0.49, 0.51, -0.7, -0.2].to_vec()).unwrap();
        let w = DiagonalWeight::identity(4, 1);
        let c = 0.5;
        let mask = prox_clarke_mask(&z, &w, c);
        let h = 1e-7;
        let plus = scaled_prox(&z.map(|v| v + h), &w, c);
        let minus = scaled_prox(&z.map(|v| v - h), &w, c);
        for i in 0..4 {
            let fd = (plus[(i, 0)] - minus[(i, 0)]) / (2.0 * h);
            assert!((fd - mask[(i, 0)]).abs() < 1e-6);
        }
    }
}
