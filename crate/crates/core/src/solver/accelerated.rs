use alloc::vec::Vec;

use super::{
    armijo, check_start, finish, fista_t_update, momentum_point, proximal_step, step_to,
    stop_threshold, t_identity_defect, Clock, Evaluated, IterRecord, Monitors, RunReport,
    RunStatus, SolverConfig,
};
use crate::error::Result;
use crate::matrix::SymMatrix;
use crate::spca::SpcaProblem;
use crate::stiefel::{polar_factor, StiefelPoint, TANGENT_TOL};

/// Iterates of the accelerated method: the accelerated sequence `x`, the
/// extrapolated points `y`, the safeguard reference `z` and the momentum
/// weight `t`.
#[derive(Clone, Debug)]
pub struct AcceleratedState {
    pub(crate) x: Evaluated,
    pub(crate) y: Evaluated,
    pub(crate) z: Evaluated,
    pub(crate) t: f64,
    dual_y: Option<SymMatrix>,
    dual_z: Option<SymMatrix>,
    pub(crate) mon: Monitors,
}

impl AcceleratedState {
    /// `t = 1`, `x = y = z = x0`.
    pub fn new(problem: &SpcaProblem, x0: &StiefelPoint, mu: f64) -> Self {
        let start = Evaluated::new(problem, x0.clone());
        let mut mon = Monitors::new(mu);
        mon.see_point(&start.x);
        mon.checkpoint_f.push(start.f);
        Self {
            x: start.clone(),
            y: start.clone(),
            z: start,
            t: 1.0,
            dual_y: None,
            dual_z: None,
            mon,
        }
    }

    pub fn x(&self) -> &StiefelPoint {
        &self.x.x
    }

    pub fn y(&self) -> &StiefelPoint {
        &self.y.x
    }

    pub fn z(&self) -> &StiefelPoint {
        &self.z.x
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn f_x(&self) -> f64 {
        self.x.f
    }

    pub fn f_z(&self) -> f64 {
        self.z.f
    }

    pub fn monitors(&self) -> &Monitors {
        &self.mon
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SafeguardOutcome {
    /// `‖η_z‖_P` fell below the stopping threshold; `z` is (numerically)
    /// stationary.
    Converged { eta_norm: f64 },
    /// The line search at `z` ran; `took_effect` tells whether it beat `x`
    /// and restarted the momentum.
    Checked {
        took_effect: bool,
        alpha: f64,
        eta_norm: f64,
    },
}

/// One safeguard check: a monotone proximal-gradient step from `z`. If it
/// lands below `F(x)`, `x` and `y` jump there and `t` resets to one. Either
/// way `z` moves to the (possibly new) `x`, so `F(z)` strictly decreases
/// from one check to the next.
pub fn safeguard_step(
    problem: &SpcaProblem,
    cfg: &SolverConfig,
    mu: f64,
    state: &mut AcceleratedState,
) -> Result<SafeguardOutcome> {
    let p = state.z.x.p();
    let step = proximal_step(problem, &state.z, cfg, mu, &mut state.dual_z, &mut state.mon)?;
    let eta_norm = libm::sqrt(step.norm_p_sq);
    if step.norm_p_sq < stop_threshold(problem, p, mu, cfg) {
        return Ok(SafeguardOutcome::Converged { eta_norm });
    }
    let (cand, alpha) = armijo(problem, &state.z, &step, cfg)?;
    let took_effect = cand.f < state.x.f;
    if took_effect {
        state.mon.see_point(&cand.x);
        state.x = cand.clone();
        state.y = cand;
        state.t = 1.0;
    }
    state.z = state.x.clone();
    state.mon.checkpoint_f.push(state.z.f);
    Ok(SafeguardOutcome::Checked {
        took_effect,
        alpha,
        eta_norm,
    })
}

/// Accelerated manifold proximal gradient with a safeguard every
/// `cfg.safeguard_period` iterations.
pub fn amanpg(
    problem: &SpcaProblem,
    x0: &StiefelPoint,
    cfg: &SolverConfig,
    clock: &dyn Clock,
) -> Result<RunReport> {
    check_start(problem, x0, cfg)?;
    let start = clock.now();
    let mu = cfg.resolve_mu(problem)?;
    let mut st = AcceleratedState::new(problem, x0, mu);
    let mut history = Vec::new();
    let mut eta_norm = f64::NAN;
    let mut triggers = 0;

    let mut k = 0;
    let status = loop {
        let mut flag = None;
        if k % cfg.safeguard_period == 0 {
            match safeguard_step(problem, cfg, mu, &mut st) {
                Ok(SafeguardOutcome::Converged { eta_norm: e }) => {
                    eta_norm = e;
                    break RunStatus::Converged;
                }
                Ok(SafeguardOutcome::Checked {
                    took_effect,
                    eta_norm: e,
                    ..
                }) => {
                    eta_norm = e;
                    triggers += usize::from(took_effect);
                    flag = Some(took_effect);
                }
                Err(e) => break RunStatus::Failed(alloc::format!("{e}")),
            }
        }
        if k >= cfg.max_iters {
            break RunStatus::MaxIters;
        }

        let step = match proximal_step(problem, &st.y, cfg, mu, &mut st.dual_y, &mut st.mon) {
            Ok(s) => s,
            Err(e) => break RunStatus::Failed(alloc::format!("{e}")),
        };
        let x_next = match step_to(problem, &st.y.x, &step.eta, 1.0) {
            Ok(x) => x,
            Err(e) => break RunStatus::Failed(alloc::format!("{e}")),
        };
        let mut t_next = fista_t_update(st.t);
        st.mon.max_t_defect = st.mon.max_t_defect.max(t_identity_defect(st.t, t_next));
        let y_next = match momentum_point(&x_next.x, &st.x.x, st.t, t_next) {
            Ok(y) => keep_on_manifold(y),
            Err(_) => {
                st.mon.momentum_resets += 1;
                t_next = 1.0;
                Ok(x_next.x.clone())
            }
        };
        let y_next = match y_next {
            Ok(y) => y,
            Err(e) => break RunStatus::Failed(alloc::format!("{e}")),
        };
        st.mon.see_point(&x_next.x);
        st.mon.see_point(&y_next);
        st.x = x_next;
        st.y = Evaluated::new(problem, y_next);
        st.t = t_next;
        k += 1;
        history.push(IterRecord {
            k,
            f: st.x.f,
            eta_norm: libm::sqrt(step.norm_p_sq),
            seconds: clock.now() - start,
            safeguard: flag,
        });
    };

    let seconds = clock.now() - start;
    let best = if st.z.f <= st.x.f { &st.z } else { &st.x };
    let mon = st.mon.clone();
    Ok(finish(problem, cfg, status, best, history, k, seconds, eta_norm, triggers, mon))
}

fn keep_on_manifold(y: StiefelPoint) -> Result<StiefelPoint> {
    if y.residual() > TANGENT_TOL {
        polar_factor(y.mat())
    } else {
        Ok(y)
    }
}
