use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use coordinate_play::cli;
use coordinate_play::experiment::{
    mean_std, run_experiment, Algorithm, ExperimentSpec, Scenario, AGGREGATE_HEADER, SWEEP_HEADER,
    TRACE_HEADER,
};

fn read_rows(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn summary(path: &Path) -> BTreeMap<String, String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn cnp(args: &[&str]) -> i32 {
    cli::run(std::iter::once("cnp").chain(args.iter().copied()))
}

#[test]
fn aggregates_match_raw_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = cnp(&[
        "--scenario", "exp2", "--algo", "cp,cp-quietfree,mc,idealized", "--horizon", "12000",
        "--runs", "3", "--record-every", "500", "--out", out, "--workers", "2",
    ]);
    assert_eq!(code, 0);
    for algo in ["cp", "cp-quietfree", "mc", "idealized"] {
        let traces: Vec<Vec<Vec<f64>>> = (0..3)
            .map(|i| {
                let (header, rows) = read_rows(&dir.path().join(algo).join(format!("run_{i:03}.csv")));
                assert_eq!(header, TRACE_HEADER);
                rows
            })
            .collect();
        let (header, agg) = read_rows(&dir.path().join(format!("{algo}_aggregate.csv")));
        assert_eq!(header, AGGREGATE_HEADER);
        assert_eq!(agg.len(), traces[0].len());
        for (j, row) in agg.iter().enumerate() {
            let regrets: Vec<f64> = traces.iter().map(|t| t[j][3]).collect();
            assert!(traces.iter().all(|t| t[j][0] == row[0]));
            let (m, s) = mean_std(&regrets);
            assert!((m - row[1]).abs() <= 1e-12 * m.abs().max(1.0));
            assert!((s - row[2]).abs() <= 1e-12 * s.abs().max(1.0));
            for t in &traces {
                assert!((t[j][1] - t[j][2] - t[j][3]).abs() < 1e-6);
            }
        }
        assert_eq!(agg.last().unwrap()[0], 12000.0);
    }
    let s = summary(&dir.path().join("summary.txt"));
    assert_eq!(s["scenario"], "exp2");
    assert_eq!(s["change_points"], "3000,4000");
    assert_eq!(s["block_len.source"], "formula");
    assert_eq!(s["horizon"], "12000");
    assert!(s.contains_key("mc.final_regret_mean"));
}

#[test]
fn summary_echoes_resolved_defaults() {
    let spec = ExperimentSpec {
        horizon: Some(240_000),
        runs: 1,
        algorithms: vec![Algorithm::Mc],
        ..ExperimentSpec::default()
    };
    let config = coordinate_play::experiment::resolve_config(&spec, 8, 240_000).unwrap();
    assert_eq!(config.game.block_len, 245);
    assert!((config.game.eta - 0.0163).abs() < 5e-5);
    assert_eq!(config.game.rank_rounds, 135);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out");
    fs::write(
        &cfg,
        format!(
            "# small run\nscenario=exp3\nalgo=mc\nhorizon=8000\nruns=2\nrank-rounds=20\nout={}\n",
            out.display()
        ),
    )
    .unwrap();
    assert_eq!(cnp(&["--config", cfg.to_str().unwrap(), "--runs", "1"]), 0);
    let s = summary(&out.join("summary.txt"));
    assert_eq!(s["scenario"], "exp3");
    assert_eq!(s["runs"], "1");
    assert_eq!(s["rank_rounds"], "20");
    assert_eq!(s["rank_rounds.source"], "override");
    assert!(out.join("mc/run_000.csv").exists());
    assert!(!out.join("mc/run_001.csv").exists());
}

#[test]
fn file_scenario_takes_shape_from_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let losses = dir.path().join("l.csv");
    let mut text = String::new();
    for t in 0..3_000 {
        text.push_str(if t % 2 == 0 { "0.1,0.7,0.4\n" } else { "0.3,0.6,0.2\n" });
    }
    fs::write(&losses, text).unwrap();
    let spec = ExperimentSpec {
        scenario: Scenario::File,
        loss_file: Some(losses.clone()),
        players: 2,
        runs: 2,
        mc_learn_rounds: 300,
        out: Some(dir.path().join("out")),
        ..ExperimentSpec::default()
    };
    let report = run_experiment(&spec).unwrap();
    assert_eq!(report.config.game.arms, 3);
    assert_eq!(report.config.game.horizon, 3_000);

    // Horizons past the table are rejected.
    let too_long = ExperimentSpec { horizon: Some(3_001), ..spec.clone() };
    assert!(run_experiment(&too_long).is_err());

    fs::write(&losses, "0.1,0.2\n0.3\n").unwrap();
    let err = run_experiment(&spec).unwrap_err().to_string();
    assert!(err.contains(":2:"), "{err}");
}

#[test]
fn invalid_specs_fail_at_startup() {
    assert_ne!(cnp(&["--players", "8", "--arms", "8", "--horizon", "1000", "--out", "/nonexistent/x"]), 0);
    assert_ne!(cnp(&["--runs", "0"]), 0);
    assert_ne!(cnp(&["--scenario", "file"]), 0);
    assert_ne!(cnp(&["--bogus"]), 0);
}

#[test]
fn sweep_writes_csv_and_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        cnp(&["--algo", "cp", "--t-grid", "4000,8000", "--runs", "2", "--out", out]),
        0
    );
    let (header, rows) = read_rows(&dir.path().join("cp_sweep.csv"));
    assert_eq!(header, SWEEP_HEADER);
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![4000.0, 8000.0]);
    let s = summary(&dir.path().join("sweep_summary.txt"));
    let slope: f64 = s["cp.slope"].parse().unwrap();
    let expected = (rows[1][1] / rows[0][1]).ln() / 2f64.ln();
    assert!((slope - expected).abs() < 1e-9);

    let single = dir.path().join("single");
    assert_eq!(
        cnp(&["--algo", "cp", "--t-grid", "4000", "--runs", "1", "--out", single.to_str().unwrap()]),
        0
    );
    assert_eq!(summary(&single.join("sweep_summary.txt"))["cp.slope"], "absent");
}

#[test]
fn runs_do_not_depend_on_worker_count() {
    let base = ExperimentSpec {
        scenario: Scenario::Exp1,
        algorithms: vec![Algorithm::Cp, Algorithm::Mc],
        horizon: Some(6_000),
        runs: 4,
        seed: 99,
        ..ExperimentSpec::default()
    };
    let one = run_experiment(&ExperimentSpec { workers: 1, ..base.clone() }).unwrap();
    let four = run_experiment(&ExperimentSpec { workers: 4, ..base.clone() }).unwrap();
    for (a, b) in one.results.iter().zip(&four.results) {
        assert_eq!(a.traces, b.traces);
    }
    // Run i is the same with or without later runs.
    let two = run_experiment(&ExperimentSpec { runs: 2, ..base }).unwrap();
    assert_eq!(two.results[0].traces[..], one.results[0].traces[..2]);
}
