//! Outer iterations: ManPG, ManPG-Ada and the accelerated AManPG with its
//! safeguard, each optionally preconditioned by a diagonal weight.

mod accelerated;
mod momentum;
mod plain;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SymMatrix};
use crate::spca::{sparsity, DiagonalWeight, SpcaProblem, SPARSITY_THRESHOLD};
use crate::ssn::{eta_from_dual, solve_subproblem, SsnOptions, SubproblemSpec};
use crate::stiefel::{project_tangent, StiefelPoint};

pub use accelerated::{amanpg, safeguard_step, AcceleratedState, SafeguardOutcome};
pub use momentum::{fista_t_update, momentum_point, t_identity_defect};
pub use plain::{manpg, manpg_ada};

/// Which outer method to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    ManPg,
    ManPgAda,
    AManPg,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::ManPg, Variant::ManPgAda, Variant::AManPg];

    pub fn name(self) -> &'static str {
        match self {
            Variant::ManPg => "manpg",
            Variant::ManPgAda => "manpg-ada",
            Variant::AManPg => "amanpg",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "manpg" => Ok(Variant::ManPg),
            "manpg-ada" => Ok(Variant::ManPgAda),
            "amanpg" => Ok(Variant::AManPg),
            other => Err(Error::InvalidArgument(alloc::format!("unknown variant `{other}`"))),
        }
    }
}

/// Step-size adaptation of ManPG-Ada: grow `μ` after a unit step, shrink it
/// after a backtrack, always within `[min_ratio, max_ratio] · μ₀`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaPolicy {
    pub grow: f64,
    pub shrink: f64,
    pub max_ratio: f64,
    pub min_ratio: f64,
}

impl AdaPolicy {
    /// Leaves `μ` untouched, reducing ManPG-Ada to ManPG.
    pub fn disabled() -> Self {
        Self {
            grow: 1.0,
            shrink: 1.0,
            ..Self::default()
        }
    }
}

impl Default for AdaPolicy {
    fn default() -> Self {
        Self {
            grow: 1.1,
            shrink: 0.5,
            max_ratio: 100.0,
            min_ratio: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub variant: Variant,
    pub use_diag_weight: bool,
    /// Proximal parameter; `None` picks `1/(2‖A‖₂²)` without the weight and
    /// `1` with it.
    pub mu: Option<f64>,
    pub sigma: f64,
    pub nu: f64,
    pub safeguard_period: usize,
    pub tau: f64,
    pub max_iters: usize,
    /// Stop once `‖η‖_P² < μ · n · p · tol_factor`.
    pub tol_factor: f64,
    pub max_halvings: usize,
    pub ada: AdaPolicy,
    pub ssn: SsnOptions,
}

impl SolverConfig {
    pub fn new(variant: Variant, use_diag_weight: bool) -> Self {
        Self {
            variant,
            use_diag_weight,
            mu: None,
            sigma: 1e-4,
            nu: 0.5,
            safeguard_period: 5,
            tau: 0.1,
            max_iters: 10_000,
            tol_factor: 1e-10,
            max_halvings: 60,
            ada: AdaPolicy::default(),
            ssn: SsnOptions::default(),
        }
    }

    /// Label such as `amanpg` or `manpg-d`.
    pub fn label(&self) -> String {
        let mut s = String::from(self.variant.name());
        if self.use_diag_weight {
            s.push_str("-d");
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return bad("sigma must lie in (0, 1)");
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return bad("nu must lie in (0, 1)");
        }
        if self.safeguard_period == 0 {
            return bad("safeguard period must be positive");
        }
        if !(self.tau > 0.0) {
            return bad("tau must be positive");
        }
        if let Some(mu) = self.mu {
            if !(mu > 0.0) || !mu.is_finite() {
                return bad("mu must be positive");
            }
        }
        Ok(())
    }

    pub fn resolve_mu(&self, problem: &SpcaProblem) -> Result<f64> {
        match self.mu {
            Some(mu) => Ok(mu),
            None if self.use_diag_weight => Ok(1.0),
            None => {
                let l = problem.lipschitz_bound();
                if !(l > 0.0) {
                    return Err(Error::InvalidArgument(
                        "zero data matrix has no Lipschitz-based step".into(),
                    ));
                }
                Ok(1.0 / l)
            }
        }
    }
}

/// Source of wall-clock time in seconds; the origin is arbitrary.
pub trait Clock {
    fn now(&self) -> f64;
}

/// A clock that always reads zero, for `no_std` or timing-free runs.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunStatus {
    Converged,
    MaxIters,
    Failed(String),
}

impl RunStatus {
    pub fn as_str(&self) -> &str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::MaxIters => "max_iters",
            RunStatus::Failed(_) => "failed",
        }
    }
}

/// One row of the iteration history.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterRecord {
    pub k: usize,
    /// Objective `F = f + g` at the new iterate.
    pub f: f64,
    /// `‖η‖_P` of the step that produced it.
    pub eta_norm: f64,
    pub seconds: f64,
    /// For iterations that invoked the safeguard: whether it took effect.
    pub safeguard: Option<bool>,
}

/// Invariant bookkeeping collected during a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Monitors {
    /// `F(z)` at successive safeguard checkpoints.
    pub checkpoint_f: Vec<f64>,
    /// Accepted plain steps violating `F(x⁺) <= F(x) - σα‖η‖_F²`.
    pub descent_violations: usize,
    pub max_t_defect: f64,
    pub momentum_resets: usize,
    pub mu_min: f64,
    pub mu_max: f64,
    pub ssn_iters: usize,
    pub subproblems: usize,
    /// Subproblems whose Newton iteration hit its cap; the best multiplier
    /// found was used.
    pub ssn_inexact: usize,
    pub max_manifold_residual: f64,
    pub min_weight: f64,
}

impl Monitors {
    fn new(mu: f64) -> Self {
        Self {
            mu_min: mu,
            mu_max: mu,
            min_weight: f64::INFINITY,
            ..Self::default()
        }
    }

    fn see_point(&mut self, x: &StiefelPoint) {
        self.max_manifold_residual = self.max_manifold_residual.max(x.residual());
    }

    /// Number of consecutive checkpoint pairs without strict decrease.
    pub fn checkpoint_violations(&self) -> usize {
        self.checkpoint_f.windows(2).filter(|w| !(w[1] < w[0])).count()
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub label: String,
    pub status: RunStatus,
    /// One record per iteration; the last one always describes the returned
    /// point and its final step norm.
    pub history: Vec<IterRecord>,
    /// Reported loadings.
    pub x: DenseMatrix,
    pub iters: usize,
    pub seconds: f64,
    pub f: f64,
    pub eta_norm: f64,
    pub sparsity: f64,
    pub adjusted_variance: f64,
    pub safeguard_triggers: usize,
    pub monitors: Monitors,
}

impl RunReport {
    /// Recomputes the sparsity with a different threshold.
    pub fn sparsity_at(&self, thresh: f64) -> f64 {
        sparsity(&self.x, thresh)
    }
}

/// Runs the method selected by `cfg.variant`.
pub fn solve(
    problem: &SpcaProblem,
    x0: &StiefelPoint,
    cfg: &SolverConfig,
    clock: &dyn Clock,
) -> Result<RunReport> {
    match cfg.variant {
        Variant::ManPg => manpg(problem, x0, cfg, clock),
        Variant::ManPgAda => manpg_ada(problem, x0, cfg, clock),
        Variant::AManPg => amanpg(problem, x0, cfg, clock),
    }
}

/// The leading `p` right singular vectors of the data.
pub fn initial_point(problem: &SpcaProblem, p: usize) -> Result<StiefelPoint> {
    problem.pca_loadings(p)
}

fn check_start(problem: &SpcaProblem, x0: &StiefelPoint, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    if x0.n() != problem.n() {
        return Err(Error::DimensionMismatch {
            expected: (problem.n(), x0.p()),
            found: (x0.n(), x0.p()),
        });
    }
    Ok(())
}

/// A point together with `AX` and `F(X)`.
#[derive(Clone, Debug)]
pub(crate) struct Evaluated {
    pub x: StiefelPoint,
    pub ax: DenseMatrix,
    pub f: f64,
}

impl Evaluated {
    pub fn new(problem: &SpcaProblem, x: StiefelPoint) -> Self {
        let ax = problem.data().matmul(x.mat());
        let f = -ax.frob_norm_sq() + problem.eval_g(x.mat());
        Self { x, ax, f }
    }
}

/// A solved subproblem: the step and its norms.
pub(crate) struct Step {
    pub eta: DenseMatrix,
    pub norm_f_sq: f64,
    pub norm_p_sq: f64,
}

/// Solves the proximal subproblem at `at`, updating the warm-start slot.
pub(crate) fn proximal_step(
    problem: &SpcaProblem,
    at: &Evaluated,
    cfg: &SolverConfig,
    mu: f64,
    warm: &mut Option<SymMatrix>,
    mon: &mut Monitors,
) -> Result<Step> {
    let grad_e = problem.data().tr_matmul(&at.ax).scaled(-2.0);
    let grad = project_tangent(&at.x, &grad_e)?;
    let weight = if cfg.use_diag_weight {
        problem.diag_weight_from_ax(&at.ax, cfg.tau)?
    } else {
        DiagonalWeight::identity(at.x.n(), at.x.p())
    };
    if cfg.use_diag_weight {
        let lo = weight.weights().as_slice().iter().fold(f64::INFINITY, |a, &b| a.min(b));
        mon.min_weight = mon.min_weight.min(lo);
    }
    let spec = SubproblemSpec::new(&grad, &weight, mu, problem.lambda())?;
    mon.subproblems += 1;
    let (eta, dual) = match solve_subproblem(&spec, warm.as_ref(), &cfg.ssn) {
        Ok(sol) => {
            mon.ssn_iters += sol.newton_iters;
            (sol.eta.into_inner(), sol.dual)
        }
        // An inexact multiplier still yields a usable tangent step; the
        // line search that follows decides whether it makes progress.
        Err(Error::SsnNotConverged {
            iterations,
            best_dual,
            ..
        }) => {
            mon.ssn_iters += iterations;
            mon.ssn_inexact += 1;
            let raw = eta_from_dual(&spec, &best_dual);
            (project_tangent(&at.x, &raw)?.into_inner(), best_dual)
        }
        Err(e) => return Err(e),
    };
    *warm = Some(dual);
    let norm_f_sq = eta.frob_norm_sq();
    let norm_p_sq = if cfg.use_diag_weight {
        weight.norm_sq(&eta)
    } else {
        norm_f_sq
    };
    Ok(Step {
        eta,
        norm_f_sq,
        norm_p_sq,
    })
}

/// `R_x(α η)` evaluated.
pub(crate) fn step_to(
    problem: &SpcaProblem,
    from: &StiefelPoint,
    eta: &DenseMatrix,
    alpha: f64,
) -> Result<Evaluated> {
    let scaled = crate::stiefel::TangentVector::new_unchecked(from, eta.scaled(alpha));
    let x = crate::stiefel::retract(from, &scaled)?;
    Ok(Evaluated::new(problem, x))
}

/// Armijo backtracking `F(R_x(αη)) <= F(x) - σα‖η‖_F²`. Returns the accepted
/// point and step length.
pub(crate) fn armijo(
    problem: &SpcaProblem,
    at: &Evaluated,
    step: &Step,
    cfg: &SolverConfig,
) -> Result<(Evaluated, f64)> {
    let mut alpha = 1.0;
    for _ in 0..=cfg.max_halvings {
        let trial = step_to(problem, &at.x, &step.eta, alpha)?;
        if trial.f <= at.f - cfg.sigma * alpha * step.norm_f_sq {
            return Ok((trial, alpha));
        }
        alpha *= cfg.nu;
    }
    Err(Error::LineSearch {
        halvings: cfg.max_halvings,
    })
}

pub(crate) fn stop_threshold(problem: &SpcaProblem, p: usize, mu: f64, cfg: &SolverConfig) -> f64 {
    mu * (problem.n() * p) as f64 * cfg.tol_factor
}

pub(crate) fn finish(
    problem: &SpcaProblem,
    cfg: &SolverConfig,
    status: RunStatus,
    best: &Evaluated,
    mut history: Vec<IterRecord>,
    iters: usize,
    seconds: f64,
    eta_norm: f64,
    safeguard_triggers: usize,
    monitors: Monitors,
) -> RunReport {
    let x = best.x.mat().clone();
    let f = problem.objective(&best.x);
    match history.last_mut() {
        Some(last) if last.k == iters => {
            last.f = f;
            last.eta_norm = eta_norm;
        }
        _ => history.push(IterRecord {
            k: iters,
            f,
            eta_norm,
            seconds,
            safeguard: None,
        }),
    }
    RunReport {
        label: cfg.label(),
        status,
        sparsity: sparsity(&x, SPARSITY_THRESHOLD),
        adjusted_variance: problem.adjusted_variance(&x),
        f,
        x,
        history,
        iters,
        seconds,
        eta_norm,
        safeguard_triggers,
        monitors,
    }
}
