use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use amanpg::rng::{seeded, standard_normal_matrix};
use amanpg::solver::Variant;
use amanpg::spca::ColumnScale;
use amanpg_bench::data::{load_csv, read_csv, write_csv, DataError};
use amanpg_bench::report::{history_file_name, write_all};
use amanpg_bench::{
    run_experiment, summarize, DatasetSpec, ExperimentSpec, Method, RunOutcome, SummaryRecord,
};

fn small_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(DatasetSpec::Random { m: 12, n: 50 }, 2);
    spec.lambdas = vec![0.5, 0.9];
    spec.methods = vec![
        Method::new(Variant::ManPg, false),
        Method::new(Variant::AManPg, true),
    ];
    spec.seeds = vec![3, 4, 5];
    spec
}

#[test]
fn csv_round_trip_is_bit_near() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let m = standard_normal_matrix(17, 9, &mut seeded(77)).scaled(1e3);
    write_csv(&path, &m).unwrap();
    let back = read_csv(&path).unwrap();
    assert_eq!(back.shape(), m.shape());
    assert!((&back - &m).max_abs() <= 1e-15 * m.max_abs());
}

#[test]
fn centered_two_by_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.csv");
    fs::write(&path, "1,2\n3,4\n").unwrap();
    let a = load_csv(&path, true, ColumnScale::UnitStd).unwrap();
    for j in 0..2 {
        assert!((a[(0, j)] + a[(1, j)]).abs() < 1e-15);
        assert!((a[(1, j)] - 1.0).abs() < 1e-15);
    }
    fs::write(&path, "a,b\n1,2\n3,4\n").unwrap();
    assert_eq!(read_csv(&path).unwrap().shape(), (2, 2));
}

#[test]
fn constant_column_is_reported_one_based() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    fs::write(&path, "1,5\n3,5\n").unwrap();
    match load_csv(&path, true, ColumnScale::UnitStd) {
        Err(DataError::ZeroVariance { column: 2 }) => {}
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        load_csv(&dir.path().join("missing.csv"), true, ColumnScale::UnitStd),
        Err(DataError::Io { .. })
    ));
}

#[test]
fn single_cell_grid_writes_one_history() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = small_spec();
    spec.lambdas.truncate(1);
    spec.methods.truncate(1);
    spec.seeds.truncate(1);
    let result = run_experiment(&spec).unwrap();
    assert_eq!(result.runs.len(), 1);
    assert_eq!(result.summary.len(), 1);
    write_all(dir.path(), &result).unwrap();
    let histories = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| {
            let name = e.as_ref().unwrap().file_name();
            name.to_string_lossy().starts_with("history_")
        })
        .count();
    assert_eq!(histories, 1);
}

fn last_history_row(path: &Path) -> (f64, f64, f64) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["k", "F", "eta_norm", "seconds"]);
    let last = rdr.records().map(|r| r.unwrap()).last().unwrap();
    let get = |i: usize| last[i].parse::<f64>().unwrap();
    (get(0), get(1), get(2))
}

#[test]
fn summary_means_match_history_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec();
    let result = run_experiment(&spec).unwrap();
    assert_eq!(result.runs.len(), spec.run_count());
    write_all(dir.path(), &result).unwrap();

    for rec in &result.summary {
        let (mut iters, mut f, mut eta) = (0.0, 0.0, 0.0);
        for &seed in &spec.seeds {
            let name = history_file_name(&rec.variant.to_string(), rec.lambda, seed);
            let (k, fk, ek) = last_history_row(&dir.path().join(name));
            iters += k;
            f += fk;
            eta += ek;
        }
        let n = spec.seeds.len() as f64;
        assert_eq!(rec.n_seeds, spec.seeds.len());
        assert_eq!(rec.failures, 0);
        assert!((rec.mean_iter - iters / n).abs() < 1e-12);
        assert!((rec.mean_f - f / n).abs() <= 1e-12 * rec.mean_f.abs());
        assert!((rec.mean_eta - eta / n).abs() <= 1e-12 * rec.mean_eta);
    }

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["records"].as_array().unwrap().len(), 4);
    assert_eq!(json["records"][1]["variant"], "amanpg-d");
    assert_eq!(json["spec_echo"]["dataset"]["kind"], "random");
}

fn numerics(records: &[SummaryRecord]) -> Vec<String> {
    records
        .iter()
        .map(|r| {
            format!(
                "{} {} {} {:?} {:?} {:?} {:?} {}",
                r.variant,
                r.lambda,
                r.mean_iter,
                r.mean_f,
                r.mean_eta,
                r.mean_sparsity,
                r.mean_variance,
                r.failures
            )
        })
        .collect()
}

#[test]
fn repeated_and_parallel_runs_agree() {
    let spec = small_spec();
    let a = run_experiment(&spec).unwrap();
    let mut par = spec.clone();
    par.jobs = 3;
    let b = run_experiment(&par).unwrap();
    assert_eq!(numerics(&a.summary), numerics(&b.summary));
}

#[test]
fn failed_runs_are_counted_not_averaged() {
    let spec = small_spec();
    let result = run_experiment(&spec).unwrap();
    let method = spec.methods[0];
    let lambda = spec.lambdas[0];
    let mut runs: Vec<RunOutcome> = result
        .runs
        .iter()
        .filter(|r| r.method == method && r.lambda == lambda)
        .cloned()
        .collect();
    let ok: Vec<f64> = runs.iter().map(|r| r.report.as_ref().unwrap().f).collect();
    runs.push(RunOutcome {
        method,
        lambda,
        seed: 99,
        report: Err("boom".into()),
    });
    let rec = &summarize(&runs, &[lambda], &[method], 1e-5)[0];
    assert_eq!((rec.n_seeds, rec.failures), (4, 1));
    let mean = ok.iter().sum::<f64>() / ok.len() as f64;
    assert!((rec.mean_f - mean).abs() <= 1e-12 * mean.abs());
}

#[test]
fn csv_dataset_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("data.csv");
    write_csv(&input, &standard_normal_matrix(15, 30, &mut seeded(5))).unwrap();
    let out = dir.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_amanpg-bench"))
        .args(["--dataset", "csv", "--csv-path"])
        .arg(&input)
        .args(["--p", "2", "--lambda", "0.5", "--variant", "amanpg", "--variant", "manpg-d"])
        .args(["--seeds", "1", "--out-dir"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let records = json["records"].as_array().unwrap();
    let by_name: HashMap<_, _> = records
        .iter()
        .map(|r| (r["variant"].as_str().unwrap().to_string(), r["failures"].as_u64()))
        .collect();
    assert_eq!(by_name["amanpg"], Some(0));
    assert_eq!(by_name["manpg-d"], Some(0));

    let bad = Command::new(env!("CARGO_BIN_EXE_amanpg-bench"))
        .args(["--dataset", "csv", "--seeds", "1"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}
