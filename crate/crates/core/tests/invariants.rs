use amanpg::linalg::{lyapunov_residual, solve_lyapunov};
use amanpg::prox::{scaled_prox, soft_threshold};
use amanpg::rng::{seeded, standard_normal_matrix};
use amanpg::solver::{fista_t_update, t_identity_defect};
use amanpg::spca::{sparsity, DiagonalWeight};
use amanpg::stiefel::{
    inverse_retract, project_tangent, random_point, random_tangent, retract, tangency_residual,
};
use amanpg::{DenseMatrix, SpcaProblem, SymMatrix};
use proptest::prelude::*;

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..24).prop_flat_map(|n| (Just(n), 1..=n.min(6)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn retraction_lands_on_manifold((n, p) in shape(), seed in any::<u64>(), norm in 0.0f64..10.0) {
        let x = random_point(n, p, seed).unwrap();
        let eta = random_tangent(&x, norm, seed ^ 1);
        let y = retract(&x, &eta).unwrap();
        prop_assert!(y.residual() < 1e-12);
    }

    #[test]
    fn projection_is_idempotent((n, p) in shape(), seed in any::<u64>()) {
        let x = random_point(n, p, seed).unwrap();
        let xi = standard_normal_matrix(n, p, &mut seeded(seed ^ 2));
        let once = project_tangent(&x, &xi).unwrap();
        prop_assert!(tangency_residual(&x, once.mat()) < 1e-12);
        let twice = project_tangent(&x, once.mat()).unwrap();
        prop_assert!((twice.mat() - once.mat()).max_abs() < 1e-13 * (1.0 + xi.max_abs()));
    }

    #[test]
    fn inverse_retraction_round_trips((n, p) in shape(), seed in any::<u64>(), norm in 0.0f64..0.8) {
        let x = random_point(n, p, seed).unwrap();
        let eta = random_tangent(&x, norm, seed ^ 3);
        let y = retract(&x, &eta).unwrap();
        let back = inverse_retract(&x, &y).unwrap();
        prop_assert!((back.mat() - eta.mat()).frob_norm() < 1e-9);
    }

    #[test]
    fn lyapunov_solution_has_small_residual(p in 1usize..8, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        // B = I + E with ‖E‖ small keeps the operator well conditioned.
        let e = standard_normal_matrix(p, p, &mut rng).scaled(0.2 / p as f64);
        let b = &DenseMatrix::identity(p) + &e;
        let c = SymMatrix::from_dense_sym_part(&standard_normal_matrix(p, p, &mut rng));
        let s = solve_lyapunov(&b, &c).unwrap();
        prop_assert!(lyapunov_residual(&b, &s, &c).frob_norm() < 1e-12 * (1.0 + c.frob_norm()));
    }

    #[test]
    fn soft_threshold_is_nonexpansive(a in -1e3f64..1e3, b in -1e3f64..1e3, t in 0.0f64..10.0) {
        let d = (soft_threshold(a, t) - soft_threshold(b, t)).abs();
        prop_assert!(d <= (a - b).abs() + 1e-12);
        prop_assert!(soft_threshold(a, t).abs() <= a.abs());
    }

    #[test]
    fn scaled_prox_satisfies_optimality(seed in any::<u64>(), ml in 0.0f64..2.0) {
        let mut rng = seeded(seed);
        let z = standard_normal_matrix(5, 3, &mut rng);
        let w = DiagonalWeight::new(z.map(|v| 0.1 + v.abs()), 0.1).unwrap();
        let u = scaled_prox(&z, &w, ml);
        for i in 0..5 {
            for j in 0..3 {
                let (ui, zi, wi) = (u[(i, j)], z[(i, j)], w.weights()[(i, j)]);
                // 0 ∈ w(u - z) + mulambda·∂|u|
                let g = wi * (ui - zi);
                if ui != 0.0 {
                    prop_assert!((g + ml * ui.signum()).abs() < 1e-12);
                } else {
                    prop_assert!(g.abs() <= ml + 1e-12);
                }
            }
        }
    }

    #[test]
    fn objective_and_metrics_stay_in_range(seed in any::<u64>(), p in 1usize..4, lambda in 0.0f64..3.0) {
        let a = standard_normal_matrix(9, 7, &mut seeded(seed));
        let prob = SpcaProblem::new(a, lambda).unwrap();
        let x = random_point(7, p, seed ^ 5).unwrap();
        prop_assert!(prob.eval_f(&x) >= -prob.spec_sq() * p as f64 * (1.0 + 1e-12));
        let v = prob.adjusted_variance(x.mat());
        prop_assert!((0.0..=1.0).contains(&v));
        let s = sparsity(x.mat(), 1e-5);
        prop_assert!((0.0..=1.0).contains(&s));
        let tau = 0.1;
        let w = prob.diag_weight(&x, tau).unwrap();
        let hi = 2.0 * (prob.diag_ata().iter().cloned().fold(0.0, f64::max) + prob.spec_sq());
        for &wij in w.weights().as_slice() {
            prop_assert!(wij >= tau && wij <= hi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn packed_coordinates_round_trip(p in 1usize..9, seed in any::<u64>()) {
        let m = SymMatrix::from_dense_sym_part(&standard_normal_matrix(p, p, &mut seeded(seed)));
        let v = m.to_scaled_vec();
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((norm - m.frob_norm()).abs() < 1e-12 * (1.0 + norm));
        let back = SymMatrix::from_scaled_vec(p, &v);
        prop_assert!((&back - &m).frob_norm() < 1e-15 * (1.0 + norm));
    }
}

#[test]
fn fista_sequence_keeps_identity() {
    let mut t = 1.0;
    for _ in 0..100_000 {
        let next = fista_t_update(t);
        assert!(t_identity_defect(t, next) <= 1e-14);
        assert!(next > t);
        t = next;
    }
}
