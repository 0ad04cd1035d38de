//! Seeded multi-run experiments, aggregation, CSV artifacts and log-log
//! regret sweeps.
//!
//! Run `i` of an experiment uses the seed `derive_seed(base_seed, i)` for
//! everything random in it (instance, losses, every player), so its trace is
//! the same whatever the worker count, and every algorithm faces the same
//! loss table in run `i`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::adversaries::{self, LossSchedule, LossTable};
use crate::baseline_mc::McPlayer;
use crate::engine::{self, GameConfig, RegretTrace, DEFAULT_RECORD_EVERY};
use crate::error::{Error, Result};
use crate::metaplayer::{self, IdealizedConfig};
use crate::protocol::{CpPlayer, Variant};
use crate::rng::{derive_seed, rng_from_seed, stream};

pub const DEFAULT_ARMS: usize = 8;
pub const DEFAULT_PLAYERS: usize = 4;
pub const DEFAULT_HORIZON: u64 = 240_000;
pub const DEFAULT_MC_LEARN_ROUNDS: u64 = 3_000;
pub const DEFAULT_GAP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    /// Random stationary Bernoulli instance with a reward gap.
    Exp1,
    /// Two good links fail at T/4 and T/3.
    Exp2,
    /// A bad link becomes the best at T/4.
    Exp3,
    /// Losses read from `--loss-file`.
    File,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Exp1 => "exp1",
            Scenario::Exp2 => "exp2",
            Scenario::Exp3 => "exp3",
            Scenario::File => "file",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Algorithm {
    /// Coordinate & Play, idle followers quiet.
    Cp,
    /// Coordinate & Play, idle followers park on arm 0.
    CpQuietfree,
    /// Musical Chairs.
    Mc,
    /// Fully-communicating metaplayer (no collisions).
    Idealized,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Cp => "cp",
            Algorithm::CpQuietfree => "cp-quietfree",
            Algorithm::Mc => "mc",
            Algorithm::Idealized => "idealized",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub algorithms: Vec<Algorithm>,
    /// Taken from the loss file when `None` in the file scenario.
    pub arms: Option<usize>,
    pub players: usize,
    /// Defaults to the loss file's length, or [`DEFAULT_HORIZON`].
    pub horizon: Option<u64>,
    pub runs: usize,
    pub seed: u64,
    pub block_len: Option<u64>,
    pub eta: Option<f64>,
    pub rank_rounds: Option<u64>,
    pub mc_learn_rounds: u64,
    pub gap: f64,
    pub loss_file: Option<PathBuf>,
    pub record_every: u64,
    pub out: Option<PathBuf>,
    pub t_grid: Vec<u64>,
    pub workers: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            scenario: Scenario::Exp1,
            algorithms: vec![Algorithm::Cp, Algorithm::Mc],
            arms: None,
            players: DEFAULT_PLAYERS,
            horizon: None,
            runs: 10,
            seed: 0,
            block_len: None,
            eta: None,
            rank_rounds: None,
            mc_learn_rounds: DEFAULT_MC_LEARN_ROUNDS,
            gap: DEFAULT_GAP,
            loss_file: None,
            record_every: DEFAULT_RECORD_EVERY,
            out: None,
            t_grid: Vec::new(),
            workers: 1,
        }
    }
}

/// Whether a protocol parameter came from an explicit override or the
/// tuned formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSource {
    Formula,
    Override,
}

impl ParamSource {
    fn label(self) -> &'static str {
        match self {
            ParamSource::Formula => "formula",
            ParamSource::Override => "override",
        }
    }

    fn of<T>(o: &Option<T>) -> Self {
        if o.is_some() {
            ParamSource::Override
        } else {
            ParamSource::Formula
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedConfig {
    pub game: GameConfig,
    pub block_len_source: ParamSource,
    pub eta_source: ParamSource,
    pub rank_rounds_source: ParamSource,
}

/// Mean and population standard deviation of the online regret at one `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregatePoint {
    pub t: u64,
    pub mean_regret: f64,
    pub std_regret: f64,
}

#[derive(Debug, Clone)]
pub struct AlgorithmResult {
    pub algorithm: Algorithm,
    pub traces: Vec<RegretTrace>,
    pub aggregate: Vec<AggregatePoint>,
}

impl AlgorithmResult {
    pub fn final_regrets(&self) -> Vec<f64> {
        self.traces.iter().map(RegretTrace::final_regret).collect()
    }

    pub fn final_mean_std(&self) -> (f64, f64) {
        mean_std(&self.final_regrets())
    }

    /// Mean regret at the last recorded point not after `t`.
    pub fn mean_regret_at(&self, t: u64) -> Option<f64> {
        let idx = self.aggregate.partition_point(|p| p.t <= t);
        idx.checked_sub(1).map(|i| self.aggregate[i].mean_regret)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ResolvedConfig,
    pub scenario: Scenario,
    pub runs: usize,
    pub mc_learn_rounds: u64,
    /// Change points of run 0's schedule (identical across runs for the
    /// built-in scenarios).
    pub change_points: Vec<u64>,
    pub results: Vec<AlgorithmResult>,
}

impl ExperimentReport {
    pub fn result(&self, algorithm: Algorithm) -> Option<&AlgorithmResult> {
        self.results.iter().find(|r| r.algorithm == algorithm)
    }
}

/// A least-squares line `log(R_T) = slope * log(T) + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub horizon: u64,
    pub mean_final_regret: f64,
    pub std_final_regret: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub algorithm: Algorithm,
    pub points: Vec<SweepPoint>,
    pub fit: Option<LineFit>,
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Per-`t` mean and population std over runs that share record times.
pub fn aggregate(traces: &[RegretTrace]) -> Result<Vec<AggregatePoint>> {
    let Some(first) = traces.first() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(first.records.len());
    for (i, rec) in first.records.iter().enumerate() {
        let values: Vec<f64> = traces
            .iter()
            .map(|tr| match tr.records.get(i) {
                Some(r) if r.t == rec.t => Ok(r.online_regret),
                _ => Err(Error::invalid("traces have different record times")),
            })
            .collect::<Result<_>>()?;
        let (mean_regret, std_regret) = mean_std(&values);
        out.push(AggregatePoint {
            t: rec.t,
            mean_regret,
            std_regret,
        });
    }
    Ok(out)
}

/// Least-squares fit of `ln(mean regret)` against `ln(T)`. Points with a
/// nonpositive mean are skipped; fewer than two usable points give `None`.
pub fn fit_loglog(points: &[SweepPoint]) -> Option<LineFit> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.mean_final_regret > 0.0)
        .map(|p| ((p.horizon as f64).ln(), p.mean_final_regret.ln()))
        .collect();
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}

/// Loaded loss file, shared by all runs.
struct Source {
    file: Option<LossSchedule>,
    arms: usize,
}

fn load_source(spec: &ExperimentSpec) -> Result<Source> {
    if spec.scenario != Scenario::File {
        return Ok(Source {
            file: None,
            arms: spec.arms.unwrap_or(DEFAULT_ARMS),
        });
    }
    let path = spec
        .loss_file
        .as_deref()
        .ok_or_else(|| Error::invalid("the file scenario needs --loss-file"))?;
    let schedule = adversaries::load_schedule_file(path)?;
    if let Some(n) = spec.arms {
        if n != schedule.arms() {
            return Err(Error::invalid(format!(
                "--arms {n} does not match the {} columns of {}",
                schedule.arms(),
                path.display()
            )));
        }
    }
    Ok(Source {
        arms: schedule.arms(),
        file: Some(schedule),
    })
}

fn default_horizon(source: &Source) -> u64 {
    source
        .file
        .as_ref()
        .and_then(LossSchedule::fixed_rounds)
        .unwrap_or(DEFAULT_HORIZON)
}

/// Applies overrides on top of the tuned parameters for one horizon.
pub fn resolve_config(spec: &ExperimentSpec, arms: usize, horizon: u64) -> Result<ResolvedConfig> {
    let mut game = GameConfig::with_defaults(arms, spec.players, horizon, spec.seed)?;
    if let Some(tau) = spec.block_len {
        game.block_len = tau;
        game.eta = engine::default_eta(arms, horizon, tau);
    }
    if let Some(eta) = spec.eta {
        game.eta = eta;
    }
    if let Some(tr) = spec.rank_rounds {
        game.rank_rounds = tr;
    }
    game.record_every = spec.record_every;
    game.validate()?;
    Ok(ResolvedConfig {
        game,
        block_len_source: ParamSource::of(&spec.block_len),
        eta_source: ParamSource::of(&spec.eta),
        rank_rounds_source: ParamSource::of(&spec.rank_rounds),
    })
}

fn validate_spec(spec: &ExperimentSpec) -> Result<()> {
    if spec.runs == 0 {
        return Err(Error::invalid("runs must be at least 1"));
    }
    if spec.algorithms.is_empty() {
        return Err(Error::invalid("no algorithm selected"));
    }
    if spec.workers == 0 {
        return Err(Error::invalid("workers must be at least 1"));
    }
    Ok(())
}

/// Schedule of one run.
fn run_schedule(
    spec: &ExperimentSpec,
    source: &Source,
    horizon: u64,
    run_seed: u64,
) -> Result<LossSchedule> {
    match spec.scenario {
        Scenario::Exp1 => {
            let mut rng = rng_from_seed(derive_seed(run_seed, stream::INSTANCE));
            adversaries::experiment1_schedule(source.arms, spec.players, spec.gap, &mut rng)
        }
        Scenario::Exp2 => adversaries::experiment2_schedule(source.arms, horizon),
        Scenario::Exp3 => adversaries::experiment3_schedule(source.arms, horizon),
        Scenario::File => Ok(source.file.clone().expect("file scenario without a schedule")),
    }
}

/// Seed of run `index`.
pub fn run_seed(base_seed: u64, index: usize) -> u64 {
    derive_seed(base_seed, index as u64)
}

/// Plays one algorithm for one run on a materialized loss table.
pub fn simulate(
    algorithm: Algorithm,
    config: &GameConfig,
    mc_learn_rounds: u64,
    losses: &LossTable,
    run_seed: u64,
) -> Result<RegretTrace> {
    let player_rng = |p: usize| rng_from_seed(derive_seed(run_seed, stream::PLAYER_BASE + p as u64));
    match algorithm {
        Algorithm::Cp | Algorithm::CpQuietfree => {
            let variant = if algorithm == Algorithm::Cp {
                Variant::Quiet
            } else {
                Variant::QuietFree
            };
            let mut players = (0..config.players)
                .map(|p| CpPlayer::new(*config, variant, player_rng(p)))
                .collect::<Result<Vec<_>>>()?;
            engine::run_game(&mut players, losses, config.horizon, config.record_every)
        }
        Algorithm::Mc => {
            let mut players = (0..config.players)
                .map(|p| McPlayer::new(config.arms, config.players, mc_learn_rounds, player_rng(p)))
                .collect::<Result<Vec<_>>>()?;
            engine::run_game(&mut players, losses, config.horizon, config.record_every)
        }
        Algorithm::Idealized => {
            let ideal = IdealizedConfig {
                players: config.players,
                horizon: config.horizon,
                eta: metaplayer::per_round_eta(config.arms, config.horizon),
                record_every: config.record_every,
            };
            let mut rng = rng_from_seed(derive_seed(run_seed, stream::METAPLAYER));
            metaplayer::run_idealized_metaplayer(&ideal, losses, &mut rng)
        }
    }
}

fn run_all(
    spec: &ExperimentSpec,
    source: &Source,
    config: &ResolvedConfig,
) -> Result<Vec<AlgorithmResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let game = config.game;
    let per_run: Vec<Vec<RegretTrace>> = pool.install(|| {
        (0..spec.runs)
            .into_par_iter()
            .map(|i| {
                let seed = run_seed(spec.seed, i);
                let schedule = run_schedule(spec, source, game.horizon, seed)?;
                let losses = schedule.materialize(game.horizon, derive_seed(seed, stream::LOSSES))?;
                spec.algorithms
                    .iter()
                    .map(|&algo| simulate(algo, &game, spec.mc_learn_rounds, &losses, seed))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })?;
    spec.algorithms
        .iter()
        .enumerate()
        .map(|(a, &algorithm)| {
            let traces: Vec<RegretTrace> = per_run.iter().map(|r| r[a].clone()).collect();
            Ok(AlgorithmResult {
                algorithm,
                aggregate: aggregate(&traces)?,
                traces,
            })
        })
        .collect()
}

/// Runs every algorithm for every run at the spec's horizon and, when
/// `spec.out` is set, writes raw traces, aggregates and a summary.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    validate_spec(spec)?;
    let source = load_source(spec)?;
    let horizon = spec.horizon.unwrap_or_else(|| default_horizon(&source));
    let config = resolve_config(spec, source.arms, horizon)?;
    if let Some(out) = &spec.out {
        prepare_dir(out)?;
    }
    let change_points = run_schedule(spec, &source, horizon, run_seed(spec.seed, 0))?.change_points();
    let results = run_all(spec, &source, &config)?;
    let report = ExperimentReport {
        config,
        scenario: spec.scenario,
        runs: spec.runs,
        mc_learn_rounds: spec.mc_learn_rounds,
        change_points,
        results,
    };
    if let Some(out) = &spec.out {
        write_experiment(out, &report)?;
    }
    Ok(report)
}

/// Runs the experiment at every horizon of `spec.t_grid` and fits the
/// log-log slope of the mean final regret per algorithm.
pub fn sweep_accumulated_regret(spec: &ExperimentSpec) -> Result<Vec<SweepResult>> {
    validate_spec(spec)?;
    if spec.t_grid.is_empty() {
        return Err(Error::invalid("the horizon grid is empty"));
    }
    if spec.t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("the horizon grid must be strictly ascending"));
    }
    let source = load_source(spec)?;
    if let Some(out) = &spec.out {
        prepare_dir(out)?;
    }
    let mut points: Vec<Vec<SweepPoint>> = vec![Vec::new(); spec.algorithms.len()];
    let mut configs = Vec::new();
    for &horizon in &spec.t_grid {
        let config = resolve_config(spec, source.arms, horizon)?;
        let results = run_all(spec, &source, &config)?;
        for (a, result) in results.iter().enumerate() {
            let (mean, std) = result.final_mean_std();
            points[a].push(SweepPoint {
                horizon,
                mean_final_regret: mean,
                std_final_regret: std,
            });
        }
        configs.push(config);
    }
    let sweeps: Vec<SweepResult> = spec
        .algorithms
        .iter()
        .zip(points)
        .map(|(&algorithm, points)| SweepResult {
            algorithm,
            fit: fit_loglog(&points),
            points,
        })
        .collect();
    if let Some(out) = &spec.out {
        for s in &sweeps {
            write_file(&out.join(format!("{}_sweep.csv", s.algorithm.name())), &sweep_csv(&s.points))?;
        }
        write_file(&out.join("sweep_summary.txt"), &sweep_summary(spec, &configs, &sweeps))?;
    }
    Ok(sweeps)
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub const TRACE_HEADER: &str = "t,charged_loss,benchmark_loss,online_regret";
pub const AGGREGATE_HEADER: &str = "t,mean_regret,std_regret";
pub const SWEEP_HEADER: &str = "T,mean_final_regret,std_final_regret";

pub fn trace_csv(trace: &RegretTrace) -> String {
    let mut s = String::with_capacity(48 * (trace.records.len() + 1));
    s.push_str(TRACE_HEADER);
    s.push('\n');
    for r in &trace.records {
        let _ = writeln!(s, "{},{},{},{}", r.t, r.charged_loss, r.benchmark_loss, r.online_regret);
    }
    s
}

pub fn aggregate_csv(points: &[AggregatePoint]) -> String {
    let mut s = String::from(AGGREGATE_HEADER);
    s.push('\n');
    for p in points {
        let _ = writeln!(s, "{},{},{}", p.t, p.mean_regret, p.std_regret);
    }
    s
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for p in points {
        let _ = writeln!(s, "{},{},{}", p.horizon, p.mean_final_regret, p.std_final_regret);
    }
    s
}

/// Path of run `index`'s raw trace under an output directory.
pub fn trace_path(out: &Path, algorithm: Algorithm, index: usize) -> PathBuf {
    out.join(algorithm.name()).join(format!("run_{index:03}.csv"))
}

pub fn aggregate_path(out: &Path, algorithm: Algorithm) -> PathBuf {
    out.join(format!("{}_aggregate.csv", algorithm.name()))
}

fn config_lines(s: &mut String, spec_seed: u64, c: &ResolvedConfig) {
    let g = &c.game;
    let _ = writeln!(s, "arms={}", g.arms);
    let _ = writeln!(s, "players={}", g.players);
    let _ = writeln!(s, "horizon={}", g.horizon);
    let _ = writeln!(s, "seed={spec_seed}");
    let _ = writeln!(s, "block_len={}", g.block_len);
    let _ = writeln!(s, "block_len.source={}", c.block_len_source.label());
    let _ = writeln!(s, "eta={}", g.eta);
    let _ = writeln!(s, "eta.source={}", c.eta_source.label());
    let _ = writeln!(s, "rank_rounds={}", g.rank_rounds);
    let _ = writeln!(s, "rank_rounds.source={}", c.rank_rounds_source.label());
    let _ = writeln!(s, "record_every={}", g.record_every);
}

/// `key=value` summary: the resolved configuration, event times and final
/// regret per algorithm.
pub fn summary_text(report: &ExperimentReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario={}", report.scenario.name());
    let _ = writeln!(s, "runs={}", report.runs);
    config_lines(&mut s, report.config.game.seed, &report.config);
    let _ = writeln!(s, "mc_learn_rounds={}", report.mc_learn_rounds);
    let cps: Vec<String> = report.change_points.iter().map(u64::to_string).collect();
    let _ = writeln!(s, "change_points={}", cps.join(","));
    let algos: Vec<&str> = report.results.iter().map(|r| r.algorithm.name()).collect();
    let _ = writeln!(s, "algorithms={}", algos.join(","));
    for r in &report.results {
        let (mean, std) = r.final_mean_std();
        let _ = writeln!(s, "{}.final_regret_mean={mean}", r.algorithm.name());
        let _ = writeln!(s, "{}.final_regret_std={std}", r.algorithm.name());
    }
    s
}

fn sweep_summary(spec: &ExperimentSpec, configs: &[ResolvedConfig], sweeps: &[SweepResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario={}", spec.scenario.name());
    let _ = writeln!(s, "runs={}", spec.runs);
    let _ = writeln!(s, "seed={}", spec.seed);
    let _ = writeln!(s, "mc_learn_rounds={}", spec.mc_learn_rounds);
    for c in configs {
        let g = &c.game;
        let _ = writeln!(
            s,
            "T={} block_len={} ({}) eta={} ({}) rank_rounds={} ({})",
            g.horizon,
            g.block_len,
            c.block_len_source.label(),
            g.eta,
            c.eta_source.label(),
            g.rank_rounds,
            c.rank_rounds_source.label()
        );
    }
    for sw in sweeps {
        match sw.fit {
            Some(f) => {
                let _ = writeln!(s, "{}.slope={}", sw.algorithm.name(), f.slope);
                let _ = writeln!(s, "{}.intercept={}", sw.algorithm.name(), f.intercept);
            }
            None => {
                let _ = writeln!(s, "{}.slope=absent", sw.algorithm.name());
            }
        }
    }
    s
}

fn write_experiment(out: &Path, report: &ExperimentReport) -> Result<()> {
    for r in &report.results {
        let dir = out.join(r.algorithm.name());
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        for (i, trace) in r.traces.iter().enumerate() {
            write_file(&trace_path(out, r.algorithm, i), &trace_csv(trace))?;
        }
        write_file(&aggregate_path(out, r.algorithm), &aggregate_csv(&r.aggregate))?;
    }
    write_file(&out.join("summary.txt"), &summary_text(report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_population() {
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn loglog_fit_recovers_power_law() {
        let points: Vec<SweepPoint> = [1_000u64, 2_000, 4_000, 8_000]
            .iter()
            .map(|&t| SweepPoint {
                horizon: t,
                mean_final_regret: 3.0 * (t as f64).powf(2.0 / 3.0),
                std_final_regret: 0.0,
            })
            .collect();
        let fit = fit_loglog(&points).unwrap();
        assert!((fit.slope - 2.0 / 3.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-10);
        assert!(fit_loglog(&points[..1]).is_none());
    }

    #[test]
    fn overrides_are_labelled() {
        let spec = ExperimentSpec {
            rank_rounds: Some(20),
            ..Default::default()
        };
        let c = resolve_config(&spec, 8, 240_000).unwrap();
        assert_eq!(c.game.rank_rounds, 20);
        assert_eq!(c.rank_rounds_source, ParamSource::Override);
        assert_eq!(c.block_len_source, ParamSource::Formula);
        assert_eq!(c.game.block_len, 245);

        let spec = ExperimentSpec {
            block_len: Some(24),
            ..Default::default()
        };
        assert!(resolve_config(&spec, 8, 240_000).is_err());
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let spec = ExperimentSpec {
            runs: 0,
            ..Default::default()
        };
        assert!(run_experiment(&spec).is_err());
        let spec = ExperimentSpec {
            scenario: Scenario::File,
            ..Default::default()
        };
        assert!(run_experiment(&spec).is_err());
        let spec = ExperimentSpec {
            t_grid: vec![2_000, 1_000],
            ..Default::default()
        };
        assert!(sweep_accumulated_regret(&spec).is_err());
    }
}
