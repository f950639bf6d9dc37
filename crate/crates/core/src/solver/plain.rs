use alloc::vec::Vec;

use super::{
    armijo, check_start, finish, proximal_step, stop_threshold, Clock, Evaluated, IterRecord,
    Monitors, RunReport, RunStatus, SolverConfig,
};
use crate::error::Result;
use crate::spca::SpcaProblem;
use crate::stiefel::StiefelPoint;

/// Manifold proximal gradient: subproblem at `x_k`, Armijo backtracking
/// along the retraction, fixed `μ`.
pub fn manpg(
    problem: &SpcaProblem,
    x0: &StiefelPoint,
    cfg: &SolverConfig,
    clock: &dyn Clock,
) -> Result<RunReport> {
    run(problem, x0, cfg, clock, false)
}

/// ManPG with `μ` adapted after every line search according to `cfg.ada`.
pub fn manpg_ada(
    problem: &SpcaProblem,
    x0: &StiefelPoint,
    cfg: &SolverConfig,
    clock: &dyn Clock,
) -> Result<RunReport> {
    run(problem, x0, cfg, clock, true)
}

fn run(
    problem: &SpcaProblem,
    x0: &StiefelPoint,
    cfg: &SolverConfig,
    clock: &dyn Clock,
    adaptive: bool,
) -> Result<RunReport> {
    check_start(problem, x0, cfg)?;
    let start = clock.now();
    let mu0 = cfg.resolve_mu(problem)?;
    let mut mu = mu0;
    let p = x0.p();
    let mut mon = Monitors::new(mu);
    let mut history = Vec::new();
    let mut warm = None;
    let mut cur = Evaluated::new(problem, x0.clone());
    mon.see_point(&cur.x);
    let mut eta_norm = f64::NAN;

    let mut k = 0;
    let status = loop {
        let step = match proximal_step(problem, &cur, cfg, mu, &mut warm, &mut mon) {
            Ok(s) => s,
            Err(e) => break RunStatus::Failed(alloc::format!("{e}")),
        };
        eta_norm = libm::sqrt(step.norm_p_sq);
        if step.norm_p_sq < stop_threshold(problem, p, mu, cfg) {
            break RunStatus::Converged;
        }
        if k >= cfg.max_iters {
            break RunStatus::MaxIters;
        }
        let (next, alpha) = match armijo(problem, &cur, &step, cfg) {
            Ok(r) => r,
            Err(e) => break RunStatus::Failed(alloc::format!("{e}")),
        };
        if next.f > cur.f - cfg.sigma * alpha * step.norm_f_sq {
            mon.descent_violations += 1;
        }
        if adaptive {
            mu = if alpha == 1.0 {
                (mu * cfg.ada.grow).min(cfg.ada.max_ratio * mu0)
            } else {
                (mu * cfg.ada.shrink).max(cfg.ada.min_ratio * mu0)
            };
            mon.mu_min = mon.mu_min.min(mu);
            mon.mu_max = mon.mu_max.max(mu);
        }
        k += 1;
        cur = next;
        mon.see_point(&cur.x);
        history.push(IterRecord {
            k,
            f: cur.f,
            eta_norm,
            seconds: clock.now() - start,
            safeguard: None,
        });
    };

    let seconds = clock.now() - start;
    Ok(finish(problem, cfg, status, &cur, history, k, seconds, eta_norm, 0, mon))
}
