//! Benchmark driver for the sparse PCA solvers in [`amanpg`]: data loading,
//! parameter sweeps and report files.

pub mod data;
pub mod experiment;
pub mod report;

pub use experiment::{
    run_experiment, summarize, DatasetSpec, ExperimentResult, ExperimentSpec, Method, RunOutcome,
    Scale, SolverOverrides, StdClock, SummaryRecord,
};
