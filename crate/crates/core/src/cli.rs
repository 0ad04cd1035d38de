//! Command-line front end for [`crate::experiment`].
//!
//! Every flag can also come from a `key=value` config file given with
//! `--config`; flags on the command line win.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::error::{Error, Result};
use crate::experiment::{
    self, Algorithm, ExperimentSpec, Scenario, DEFAULT_GAP, DEFAULT_MC_LEARN_ROUNDS,
    DEFAULT_PLAYERS,
};

#[derive(Debug, Parser)]
#[command(
    name = "cnp",
    about = "Multi-player bandit experiments: Coordinate & Play vs Musical Chairs",
    args_override_self = true
)]
pub struct CliArgs {
    /// key=value file mirroring the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "exp1")]
    pub scenario: Scenario,

    /// Comma-separated algorithms.
    #[arg(long = "algo", value_enum, value_delimiter = ',', default_value = "cp,mc")]
    pub algorithms: Vec<Algorithm>,

    /// Number of arms N (default 8, or the loss file's width).
    #[arg(long = "arms")]
    pub arms: Option<usize>,

    #[arg(long = "players", default_value_t = DEFAULT_PLAYERS)]
    pub players: usize,

    /// Horizon T (default 240000, or the loss file's length).
    #[arg(long = "horizon")]
    pub horizon: Option<u64>,

    #[arg(long, default_value_t = 10)]
    pub runs: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Block length tau; the learning rate is retuned to it.
    #[arg(long = "block-size")]
    pub block_size: Option<u64>,

    #[arg(long)]
    pub eta: Option<f64>,

    #[arg(long = "rank-rounds")]
    pub rank_rounds: Option<u64>,

    #[arg(long = "mc-learn-rounds", default_value_t = DEFAULT_MC_LEARN_ROUNDS)]
    pub mc_learn_rounds: u64,

    /// Reward gap of the random stationary instance.
    #[arg(long, default_value_t = DEFAULT_GAP)]
    pub gap: f64,

    #[arg(long = "loss-file")]
    pub loss_file: Option<PathBuf>,

    #[arg(long = "record-every", default_value_t = experiment_default_record_every())]
    pub record_every: u64,

    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Comma-separated horizons; switches to a log-log regret sweep.
    #[arg(long = "t-grid", value_delimiter = ',')]
    pub t_grid: Vec<u64>,

    /// Concurrent runs (default: available cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

const fn experiment_default_record_every() -> u64 {
    crate::engine::DEFAULT_RECORD_EVERY
}

impl CliArgs {
    pub fn into_spec(self) -> ExperimentSpec {
        let workers = self.workers.unwrap_or_else(|| {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        });
        ExperimentSpec {
            scenario: self.scenario,
            algorithms: self.algorithms,
            arms: self.arms,
            players: self.players,
            horizon: self.horizon,
            runs: self.runs,
            seed: self.seed,
            block_len: self.block_size,
            eta: self.eta,
            rank_rounds: self.rank_rounds,
            mc_learn_rounds: self.mc_learn_rounds,
            gap: self.gap,
            loss_file: self.loss_file,
            record_every: self.record_every,
            out: Some(self.out),
            t_grid: self.t_grid,
            workers,
        }
    }
}

/// Turns `key=value` lines into `--key value` arguments. Blank lines and
/// lines starting with `#` are skipped.
pub fn config_file_args(text: &str, path: &Path) -> Result<Vec<OsString>> {
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("expected key=value, got {line:?}"),
        })?;
        let key = key.trim();
        if key == "config" {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: "config files cannot include other config files".into(),
            });
        }
        args.push(OsString::from(format!("--{key}")));
        args.push(OsString::from(value.trim()));
    }
    Ok(args)
}

fn find_config(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Parses the command line, splicing config-file arguments in front so that
/// explicit flags override them.
pub fn parse_args<I, T>(args: I) -> std::result::Result<CliArgs, String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let mut full = Vec::with_capacity(args.len());
    full.extend(args.first().cloned());
    if let Some(path) = find_config(&args) {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::io(&path, e).to_string())?;
        full.extend(config_file_args(&text, &path).map_err(|e| e.to_string())?);
    }
    full.extend(args.into_iter().skip(1));
    CliArgs::try_parse_from(full).map_err(|e| e.to_string())
}

/// Entry point of the `cnp` binary; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let cli = match parse_args(args) {
        Ok(c) => c,
        Err(msg) => {
            eprint!("{msg}");
            return 2;
        }
    };
    let spec = cli.into_spec();
    let out = spec.out.clone().unwrap_or_default();
    let result = if spec.t_grid.is_empty() {
        experiment::run_experiment(&spec).map(|report| {
            print!("{}", experiment::summary_text(&report));
        })
    } else {
        experiment::sweep_accumulated_regret(&spec).map(|sweeps| {
            for s in sweeps {
                for p in &s.points {
                    println!(
                        "{} T={} mean_final_regret={} std={}",
                        s.algorithm.name(),
                        p.horizon,
                        p.mean_final_regret,
                        p.std_final_regret
                    );
                }
                match s.fit {
                    Some(f) => println!(
                        "{} slope={} intercept={}",
                        s.algorithm.name(),
                        f.slope,
                        f.intercept
                    ),
                    None => println!("{} slope=absent", s.algorithm.name()),
                }
            }
        })
    };
    match result {
        Ok(()) => {
            eprintln!("wrote {}", out.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_map_to_spec() {
        let cli = parse_args([
            "cnp", "--scenario", "exp2", "--algo", "cp,mc,idealized", "--horizon", "5000",
            "--rank-rounds", "20", "--t-grid", "1000,2000", "--workers", "2",
        ])
        .unwrap();
        let spec = cli.into_spec();
        assert_eq!(spec.scenario, Scenario::Exp2);
        assert_eq!(
            spec.algorithms,
            vec![Algorithm::Cp, Algorithm::Mc, Algorithm::Idealized]
        );
        assert_eq!(spec.horizon, Some(5000));
        assert_eq!(spec.rank_rounds, Some(20));
        assert_eq!(spec.t_grid, vec![1000, 2000]);
        assert_eq!(spec.workers, 2);
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "# demo\nscenario=exp3\nruns = 3\nalgo=mc\n").unwrap();
        let p = path.to_str().unwrap();
        let cli = parse_args(["cnp", "--config", p, "--runs", "5"]).unwrap();
        assert_eq!(cli.scenario, Scenario::Exp3);
        assert_eq!(cli.runs, 5);
        assert_eq!(cli.algorithms, vec![Algorithm::Mc]);
    }

    #[test]
    fn bad_config_line_reports_line() {
        let err = config_file_args("runs=2\nnonsense\n", Path::new("c.conf")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
