//! Simultaneous-play game loop and regret accounting.
//!
//! Each round every player submits an action, the engine resolves collisions
//! and charges losses:
//!
//! * sole picker of an arm: charged and shown that arm's loss,
//! * two or more pickers of one arm: each charged 1 and shown only a collision,
//! * quiet: charged 1, collides with nobody.
//!
//! Online regret at `t` is the cumulative charged loss minus the sum of the K
//! smallest cumulative true arm losses over rounds `1..=t`.

use crate::error::{Error, Result};
use crate::protocol::{PlayerAction, RoundOutcome};

/// A player state machine driven by the engine. Players exchange information
/// only through the outcomes the engine hands back.
pub trait Player {
    /// Action for 0-based round `t`.
    fn act(&mut self, t: u64) -> PlayerAction;

    /// Feedback for the action taken in round `t`.
    fn observe(&mut self, t: u64, outcome: RoundOutcome) -> Result<()>;
}

impl<P: Player + ?Sized> Player for Box<P> {
    fn act(&mut self, t: u64) -> PlayerAction {
        (**self).act(t)
    }

    fn observe(&mut self, t: u64, outcome: RoundOutcome) -> Result<()> {
        (**self).observe(t, outcome)
    }
}

/// Run parameters. Use [`GameConfig::with_defaults`] for the tuned block
/// length, learning rate and ranking length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameConfig {
    pub arms: usize,
    pub players: usize,
    pub horizon: u64,
    pub block_len: u64,
    pub eta: f64,
    pub rank_rounds: u64,
    pub seed: u64,
    pub record_every: u64,
}

pub const DEFAULT_RECORD_EVERY: u64 = 100;

/// `tau = round((K^2 N T / ln N)^(1/3))`, raised to `(K-1) N + 1` when that
/// would leave no Play phase.
pub fn default_block_len(arms: usize, players: usize, horizon: u64) -> u64 {
    let (n, k, t) = (arms as f64, players as f64, horizon as f64);
    let tau = (k * k * n * t / n.ln()).cbrt().round() as u64;
    tau.max(((players - 1) * arms) as u64 + 1)
}

/// `eta = sqrt(ln N / ((T / tau) N))`.
pub fn default_eta(arms: usize, horizon: u64, block_len: u64) -> f64 {
    let n = arms as f64;
    let blocks = horizon as f64 / block_len as f64;
    (n.ln() / (blocks * n)).sqrt()
}

/// `T_R = ceil(K e ln T)`.
pub fn default_rank_rounds(players: usize, horizon: u64) -> u64 {
    (players as f64 * std::f64::consts::E * (horizon as f64).ln()).ceil() as u64
}

impl GameConfig {
    pub fn with_defaults(arms: usize, players: usize, horizon: u64, seed: u64) -> Result<Self> {
        if players == 0 || arms < 2 || horizon == 0 {
            return Err(Error::invalid(format!(
                "need K >= 1, N >= 2, T >= 1; got K={players}, N={arms}, T={horizon}"
            )));
        }
        let block_len = default_block_len(arms, players, horizon);
        let cfg = GameConfig {
            arms,
            players,
            horizon,
            block_len,
            eta: default_eta(arms, horizon, block_len),
            rank_rounds: default_rank_rounds(players, horizon),
            seed,
            record_every: DEFAULT_RECORD_EVERY,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let GameConfig {
            arms: n,
            players: k,
            horizon: t,
            ..
        } = *self;
        if !(k >= 1 && k < n && (n as u64) < t) {
            return Err(Error::invalid(format!(
                "need 1 <= K < N < T; got K={k}, N={n}, T={t}"
            )));
        }
        let coordinate = ((k - 1) * n) as u64;
        if self.block_len <= coordinate {
            return Err(Error::invalid(format!(
                "block length {} leaves no Play phase after {coordinate} Coordinate rounds",
                self.block_len
            )));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::invalid(format!("learning rate {} must be positive", self.eta)));
        }
        if self.rank_rounds == 0 || self.rank_rounds >= t {
            return Err(Error::invalid(format!(
                "ranking length {} must be in [1, T)",
                self.rank_rounds
            )));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record stride must be positive"));
        }
        Ok(())
    }

    /// Number of complete blocks after ranking.
    pub fn blocks(&self) -> u64 {
        self.horizon.saturating_sub(self.rank_rounds) / self.block_len
    }
}

/// Resolves one round of simultaneous actions against the arms' losses.
pub fn resolve_round(actions: &[PlayerAction], losses: &[f64]) -> Result<Vec<RoundOutcome>> {
    let mut pickers = vec![0u32; losses.len()];
    for action in actions {
        if let PlayerAction::Pick(arm) = *action {
            let slot = pickers.get_mut(arm).ok_or_else(|| {
                Error::invalid(format!("arm {arm} out of range for {} arms", losses.len()))
            })?;
            *slot += 1;
        }
    }
    Ok(actions
        .iter()
        .map(|action| match *action {
            PlayerAction::Quiet => RoundOutcome::QuietCharged,
            PlayerAction::Pick(arm) if pickers[arm] > 1 => RoundOutcome::Collision,
            PlayerAction::Pick(arm) => RoundOutcome::Observed(losses[arm]),
        })
        .collect())
}

/// Loss of the best K distinct arms: the sum of the K smallest entries.
pub fn benchmark_best_k(cumulative: &[f64], players: usize) -> f64 {
    assert!(players <= cumulative.len(), "K exceeds N");
    if players == 0 {
        return 0.0;
    }
    let mut scratch = cumulative.to_vec();
    scratch.select_nth_unstable_by(players - 1, f64::total_cmp);
    let mut best = scratch[..players].to_vec();
    best.sort_by(f64::total_cmp);
    best.iter().sum()
}

/// One sampled point of a regret curve; `t` counts completed rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub t: u64,
    pub charged_loss: f64,
    pub benchmark_loss: f64,
    pub online_regret: f64,
}

/// Where the charged loss came from.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChargeTally {
    pub observed_loss: f64,
    pub collisions: u64,
    pub quiet: u64,
}

impl ChargeTally {
    pub fn total(&self) -> f64 {
        self.observed_loss + self.collisions as f64 + self.quiet as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub records: Vec<TraceRecord>,
    pub tally: ChargeTally,
}

impl RegretTrace {
    /// Regret after the last round.
    pub fn final_regret(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.online_regret)
    }

    /// Regret at the last recorded point not after `t`.
    pub fn regret_at(&self, t: u64) -> Option<f64> {
        let idx = self.records.partition_point(|r| r.t <= t);
        idx.checked_sub(1).map(|i| self.records[i].online_regret)
    }
}

/// Accumulates per-round charges and true losses into a [`RegretTrace`].
#[derive(Debug, Clone)]
pub struct TraceRecorder {
    players: usize,
    horizon: u64,
    record_every: u64,
    arm_totals: Vec<f64>,
    charged: f64,
    records: Vec<TraceRecord>,
    tally: ChargeTally,
}

impl TraceRecorder {
    pub fn new(arms: usize, players: usize, horizon: u64, record_every: u64) -> Result<Self> {
        if players == 0 || players > arms {
            return Err(Error::invalid(format!(
                "need 1 <= K <= N; got K={players}, N={arms}"
            )));
        }
        if record_every == 0 {
            return Err(Error::invalid("record stride must be positive"));
        }
        Ok(TraceRecorder {
            players,
            horizon,
            record_every,
            arm_totals: vec![0.0; arms],
            charged: 0.0,
            records: Vec::with_capacity((horizon / record_every + 1) as usize),
            tally: ChargeTally::default(),
        })
    }

    /// Adds one round's total charge (no per-outcome breakdown).
    pub fn record_round(&mut self, t: u64, charged: f64, losses: &[f64]) {
        self.tally.observed_loss += charged;
        self.push(t, charged, losses);
    }

    pub fn record_outcomes(&mut self, t: u64, outcomes: &[RoundOutcome], losses: &[f64]) {
        let mut charged = 0.0;
        for outcome in outcomes {
            match *outcome {
                RoundOutcome::Observed(l) => {
                    self.tally.observed_loss += l;
                    charged += l;
                }
                RoundOutcome::Collision => {
                    self.tally.collisions += 1;
                    charged += 1.0;
                }
                RoundOutcome::QuietCharged => {
                    self.tally.quiet += 1;
                    charged += 1.0;
                }
            }
        }
        self.push(t, charged, losses);
    }

    fn push(&mut self, t: u64, charged: f64, losses: &[f64]) {
        self.charged += charged;
        for (total, l) in self.arm_totals.iter_mut().zip(losses) {
            *total += l;
        }
        let done = t + 1;
        if done.is_multiple_of(self.record_every) || done == self.horizon {
            let benchmark = benchmark_best_k(&self.arm_totals, self.players);
            self.records.push(TraceRecord {
                t: done,
                charged_loss: self.charged,
                benchmark_loss: benchmark,
                online_regret: self.charged - benchmark,
            });
        }
    }

    pub fn finish(self) -> RegretTrace {
        RegretTrace {
            records: self.records,
            tally: self.tally,
        }
    }
}

/// Plays `horizon` rounds of the game between `players` and a fixed loss table.
pub fn run_game<P: Player>(
    players: &mut [P],
    losses: &crate::adversaries::LossTable,
    horizon: u64,
    record_every: u64,
) -> Result<RegretTrace> {
    if horizon == 0 || horizon > losses.rounds() {
        return Err(Error::invalid(format!(
            "horizon {horizon} must be in [1, {}]",
            losses.rounds()
        )));
    }
    let mut recorder = TraceRecorder::new(losses.arms(), players.len(), horizon, record_every)?;
    let mut actions = Vec::with_capacity(players.len());
    for t in 0..horizon {
        let row = losses.round(t);
        actions.clear();
        actions.extend(players.iter_mut().map(|p| p.act(t)));
        let outcomes = resolve_round(&actions, row)?;
        for (k, (player, outcome)) in players.iter_mut().zip(&outcomes).enumerate() {
            player.observe(t, *outcome).map_err(|e| match e {
                Error::ProtocolViolation(msg) => {
                    Error::ProtocolViolation(format!("player {k}, round {}: {msg}", t + 1))
                }
                other => other,
            })?;
        }
        recorder.record_outcomes(t, &outcomes, row);
    }
    Ok(recorder.finish())
}
