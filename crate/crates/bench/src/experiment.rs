//! Solver sweeps over seeds, penalties and methods.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use amanpg::solver::{initial_point, solve, Clock, SolverConfig, Variant};
use amanpg::spca::{gen_random_data, gen_synthetic_data, ColumnScale, SPARSITY_THRESHOLD};
use amanpg::{DenseMatrix, RunReport, SpcaProblem};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{load_csv, DataError};

/// Wall clock backed by [`Instant`].
pub struct StdClock {
    origin: Instant,
}

impl StdClock {
    pub fn new() -> Self {
        Self {
            origin: Instant::now(),
        }
    }
}

impl Default for StdClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for StdClock {
    fn now(&self) -> f64 {
        self.origin.elapsed().as_secs_f64()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DatasetSpec {
    Random { m: usize, n: usize },
    Synthetic { m: usize, n: usize },
    Csv { path: PathBuf, center: bool },
}

impl DatasetSpec {
    /// Builds the data matrix; `seed` is ignored for CSV input.
    pub fn generate(&self, seed: u64, scale: ColumnScale) -> Result<DenseMatrix, DataError> {
        Ok(match self {
            DatasetSpec::Random { m, n } => gen_random_data(*m, *n, seed, scale)?,
            DatasetSpec::Synthetic { m, n } => gen_synthetic_data(*m, *n, seed, scale)?,
            DatasetSpec::Csv { path, center } => load_csv(path, *center, scale)?,
        })
    }
}

/// A solver variant with or without the diagonal weight, e.g. `amanpg-d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Method {
    pub variant: Variant,
    pub weighted: bool,
}

impl Method {
    pub const fn new(variant: Variant, weighted: bool) -> Self {
        Self { variant, weighted }
    }

    /// The six methods compared in the benchmark tables.
    pub fn all() -> Vec<Method> {
        let mut out = Vec::new();
        for weighted in [false, true] {
            for v in Variant::ALL {
                out.push(Method::new(v, weighted));
            }
        }
        out
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.variant, if self.weighted { "-d" } else { "" })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (base, weighted) = match s.strip_suffix("-d") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let variant = base.parse::<Variant>().map_err(|e| e.to_string())?;
        Ok(Method { variant, weighted })
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Overrides of the solver defaults; `None` keeps the default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverOverrides {
    pub max_iters: Option<usize>,
    pub mu: Option<f64>,
    pub tau: Option<f64>,
    pub sigma: Option<f64>,
    pub nu: Option<f64>,
    pub safeguard_period: Option<usize>,
}

impl SolverOverrides {
    pub fn config(&self, method: Method) -> SolverConfig {
        let mut cfg = SolverConfig::new(method.variant, method.weighted);
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        cfg.mu = self.mu;
        if let Some(v) = self.tau {
            cfg.tau = v;
        }
        if let Some(v) = self.sigma {
            cfg.sigma = v;
        }
        if let Some(v) = self.nu {
            cfg.nu = v;
        }
        if let Some(v) = self.safeguard_period {
            cfg.safeguard_period = v;
        }
        cfg
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub dataset: DatasetSpec,
    pub scale: Scale,
    pub p: usize,
    pub lambdas: Vec<f64>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub sparsity_thresh: f64,
    pub solver: SolverOverrides,
    /// Upper bound on concurrent runs.
    pub jobs: usize,
}

/// Serializable mirror of [`ColumnScale`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    UnitNorm,
    UnitStd,
}

impl From<Scale> for ColumnScale {
    fn from(s: Scale) -> Self {
        match s {
            Scale::UnitNorm => ColumnScale::UnitNorm,
            Scale::UnitStd => ColumnScale::UnitStd,
        }
    }
}

impl ExperimentSpec {
    pub fn new(dataset: DatasetSpec, p: usize) -> Self {
        Self {
            dataset,
            scale: Scale::UnitNorm,
            p,
            lambdas: vec![1.0],
            methods: vec![Method::new(Variant::AManPg, false)],
            seeds: vec![1],
            sparsity_thresh: SPARSITY_THRESHOLD,
            solver: SolverOverrides::default(),
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Spec(m.to_string()));
        if self.p == 0 {
            return bad("p must be at least 1");
        }
        if self.lambdas.is_empty() || self.methods.is_empty() || self.seeds.is_empty() {
            return bad("lambdas, methods and seeds must be nonempty");
        }
        if self.lambdas.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
            return bad("lambdas must be finite and nonnegative");
        }
        if !(self.sparsity_thresh > 0.0) {
            return bad("sparsity threshold must be positive");
        }
        for m in &self.methods {
            self.solver
                .config(*m)
                .validate()
                .map_err(|e| ExperimentError::Spec(e.to_string()))?;
        }
        Ok(())
    }

    pub fn run_count(&self) -> usize {
        self.lambdas.len() * self.methods.len() * self.seeds.len()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    Spec(String),
    #[error("seed {seed}: {source}")]
    Data {
        seed: u64,
        #[source]
        source: DataError,
    },
    #[error("seed {seed}: {source}")]
    Problem {
        seed: u64,
        #[source]
        source: amanpg::Error,
    },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// One solver run; `report` is absent when the run could not start.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub method: Method,
    pub lambda: f64,
    pub seed: u64,
    pub report: Result<RunReport, String>,
}

impl RunOutcome {
    pub fn failed(&self) -> bool {
        match &self.report {
            Ok(r) => matches!(r.status, amanpg::RunStatus::Failed(_)),
            Err(_) => true,
        }
    }
}

/// Means over the seeds of one (method, λ) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub variant: Method,
    pub lambda: f64,
    pub mean_iter: f64,
    pub mean_time: f64,
    pub mean_f: f64,
    pub mean_eta: f64,
    pub mean_sparsity: f64,
    pub mean_variance: f64,
    pub n_seeds: usize,
    pub failures: usize,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub runs: Vec<RunOutcome>,
    pub summary: Vec<SummaryRecord>,
}

/// Runs every (seed, λ, method) combination. Solver failures are recorded in
/// the outcomes; only data generation errors abort the sweep.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult, ExperimentError> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs.max(1))
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;

    let mut runs = Vec::with_capacity(spec.run_count());
    for &seed in &spec.seeds {
        let a = spec
            .dataset
            .generate(seed, spec.scale.into())
            .map_err(|source| ExperimentError::Data { seed, source })?;
        let base = SpcaProblem::new(a, 0.0)
            .map_err(|source| ExperimentError::Problem { seed, source })?;
        let x0 = initial_point(&base, spec.p)
            .map_err(|source| ExperimentError::Problem { seed, source })?;

        let cells: Vec<(f64, Method)> = spec
            .lambdas
            .iter()
            .flat_map(|&l| spec.methods.iter().map(move |&m| (l, m)))
            .collect();
        let batch: Vec<RunOutcome> = pool.install(|| {
            cells
                .par_iter()
                .map(|&(lambda, method)| {
                    let report = base
                        .with_lambda(lambda)
                        .and_then(|prob| {
                            let cfg = spec.solver.config(method);
                            solve(&prob, &x0, &cfg, &StdClock::new())
                        })
                        .map_err(|e| e.to_string());
                    RunOutcome {
                        method,
                        lambda,
                        seed,
                        report,
                    }
                })
                .collect()
        });
        runs.extend(batch);
    }
    let summary = summarize(&runs, &spec.lambdas, &spec.methods, spec.sparsity_thresh);
    Ok(ExperimentResult {
        spec: spec.clone(),
        runs,
        summary,
    })
}

/// One record per (method, λ) in grid order. Failed runs are counted but
/// excluded from the means.
pub fn summarize(
    runs: &[RunOutcome],
    lambdas: &[f64],
    methods: &[Method],
    sparsity_thresh: f64,
) -> Vec<SummaryRecord> {
    let mut out = Vec::new();
    for &lambda in lambdas {
        for &method in methods {
            let cell: Vec<&RunOutcome> = runs
                .iter()
                .filter(|r| r.method == method && r.lambda == lambda)
                .collect();
            let ok: Vec<&RunReport> = cell
                .iter()
                .filter(|r| !r.failed())
                .filter_map(|r| r.report.as_ref().ok())
                .collect();
            let mean = |f: &dyn Fn(&RunReport) -> f64| {
                if ok.is_empty() {
                    f64::NAN
                } else {
                    ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
                }
            };
            out.push(SummaryRecord {
                variant: method,
                lambda,
                mean_iter: mean(&|r| r.iters as f64),
                mean_time: mean(&|r| r.seconds),
                mean_f: mean(&|r| r.f),
                mean_eta: mean(&|r| r.eta_norm),
                mean_sparsity: mean(&|r| r.sparsity_at(sparsity_thresh)),
                mean_variance: mean(&|r| r.adjusted_variance),
                n_seeds: cell.len(),
                failures: cell.len() - ok.len(),
            });
        }
    }
    out
}
