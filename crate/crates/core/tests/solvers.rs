use amanpg::solver::{initial_point, solve, NoClock};
use amanpg::spca::{gen_random_data, ColumnScale};
use amanpg::stiefel::random_point;
use amanpg::{RunStatus, SolverConfig, SpcaProblem, Variant};

fn problem(seed: u64, lambda: f64) -> SpcaProblem {
    let a = gen_random_data(20, 60, seed, ColumnScale::UnitNorm).unwrap();
    SpcaProblem::new(a, lambda).unwrap()
}

fn configs() -> Vec<SolverConfig> {
    let mut out = Vec::new();
    for weighted in [false, true] {
        for v in Variant::ALL {
            out.push(SolverConfig::new(v, weighted));
        }
    }
    out
}

#[test]
fn every_variant_converges_and_descends() {
    let prob = problem(3, 0.6);
    let x0 = initial_point(&prob, 3).unwrap();
    for cfg in configs() {
        let r = solve(&prob, &x0, &cfg, &NoClock).unwrap();
        assert_eq!(r.status, RunStatus::Converged, "{}", cfg.label());
        assert!(r.monitors.max_manifold_residual < 1e-10);
        assert!(r.f <= prob.objective(&x0) + 1e-12, "{}", cfg.label());
        let last = r.history.last().unwrap();
        assert_eq!((last.k, last.f, last.eta_norm), (r.iters, r.f, r.eta_norm));
    }
}

#[test]
fn manpg_history_is_monotone() {
    let prob = problem(4, 0.8);
    let x0 = random_point(60, 2, 9).unwrap();
    let r = solve(&prob, &x0, &SolverConfig::new(Variant::ManPg, false), &NoClock).unwrap();
    assert_eq!(r.monitors.descent_violations, 0);
    for w in r.history.windows(2) {
        assert!(w[1].f <= w[0].f + 1e-12);
    }
}

#[test]
fn accelerated_checkpoints_decrease() {
    for weighted in [false, true] {
        let prob = problem(5, 0.5);
        let x0 = random_point(60, 3, 11).unwrap();
        let r = solve(&prob, &x0, &SolverConfig::new(Variant::AManPg, weighted), &NoClock).unwrap();
        assert_eq!(r.monitors.checkpoint_violations(), 0);
        assert!(r.monitors.max_t_defect <= 1e-14);
    }
}

#[test]
fn runs_are_deterministic() {
    let prob = problem(6, 0.7);
    let x0 = initial_point(&prob, 2).unwrap();
    for cfg in configs() {
        let a = solve(&prob, &x0, &cfg, &NoClock).unwrap();
        let b = solve(&prob, &x0, &cfg, &NoClock).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.iters, b.iters);
    }
}

#[test]
fn iteration_cap_is_reported() {
    let prob = problem(7, 0.4);
    let x0 = random_point(60, 2, 1).unwrap();
    let mut cfg = SolverConfig::new(Variant::ManPg, false);
    cfg.max_iters = 3;
    let r = solve(&prob, &x0, &cfg, &NoClock).unwrap();
    assert_eq!(r.status, RunStatus::MaxIters);
    assert_eq!(r.iters, 3);
}

#[test]
fn ada_keeps_mu_in_bounds() {
    let prob = problem(8, 0.5);
    let x0 = random_point(60, 3, 2).unwrap();
    let cfg = SolverConfig::new(Variant::ManPgAda, false);
    let mu0 = cfg.resolve_mu(&prob).unwrap();
    let r = solve(&prob, &x0, &cfg, &NoClock).unwrap();
    assert!(r.monitors.mu_max <= 100.0 * mu0 * (1.0 + 1e-12));
    assert!(r.monitors.mu_min >= 1e-4 * mu0 * (1.0 - 1e-12));
}
