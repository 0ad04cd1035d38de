//! EXP3 over meta-arms (size-K sets of distinct arms).
//!
//! The metaplayer keeps one cumulative loss estimate per arm; a meta-arm's
//! estimate is the sum over its members, so `exp(-eta * L_I)` factorizes into
//! per-arm weights and the meta-arm distribution is a diagonal K-DPP.
//! Each round (or block) only one member's loss is observed, chosen uniformly,
//! and the importance-weighted estimate `K * l / Pr[i in I]` keeps every
//! per-arm estimate unbiased.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::adversaries::LossTable;
use crate::engine::{RegretTrace, TraceRecorder};
use crate::error::{Error, Result};
use crate::kdpp::{self, WeightVector};

/// An ordered meta-arm. `order()[0]` is the observer's (coordinator's) own
/// arm; `order()[r]` is the arm assigned to the player of rank `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetaArm {
    order: Vec<usize>,
}

impl MetaArm {
    pub fn new(order: Vec<usize>, arms: usize) -> Result<Self> {
        if order.is_empty() {
            return Err(Error::invalid("meta-arm has no members"));
        }
        let mut seen = vec![false; arms];
        for &a in &order {
            if a >= arms {
                return Err(Error::invalid(format!("arm {a} out of range for {arms} arms")));
            }
            if std::mem::replace(&mut seen[a], true) {
                return Err(Error::invalid(format!("arm {a} repeated in meta-arm")));
            }
        }
        Ok(MetaArm { order })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// The arm at position 0.
    pub fn lead(&self) -> usize {
        self.order[0]
    }

    /// Members in ascending order.
    pub fn members(&self) -> Vec<usize> {
        let mut m = self.order.clone();
        m.sort_unstable();
        m
    }

    pub fn contains(&self, arm: usize) -> bool {
        self.order.contains(&arm)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Per-arm cumulative loss estimates and the learning rate.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState {
    cumulative: Vec<f64>,
    players: usize,
    eta: f64,
    updates: u64,
}

impl EstimatorState {
    pub fn new(arms: usize, players: usize, eta: f64) -> Result<Self> {
        if players == 0 || players > arms {
            return Err(Error::invalid(format!(
                "need 1 <= K <= N, got K={players}, N={arms}"
            )));
        }
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::invalid(format!("learning rate {eta} must be positive")));
        }
        Ok(EstimatorState {
            cumulative: vec![0.0; arms],
            players,
            eta,
            updates: 0,
        })
    }

    /// Starts from given cumulative estimates (tests, warm starts).
    pub fn with_cumulative(cumulative: Vec<f64>, players: usize, eta: f64) -> Result<Self> {
        let mut s = Self::new(cumulative.len(), players, eta)?;
        if let Some(x) = cumulative.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::invalid(format!("cumulative estimate {x} is not a finite nonnegative value")));
        }
        s.cumulative = cumulative;
        Ok(s)
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn arms(&self) -> usize {
        self.cumulative.len()
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn weights(&self) -> Result<WeightVector> {
        kdpp::stabilize(&self.cumulative, self.eta)
    }

    /// `Pr[arm in I]` under the current meta-arm distribution.
    pub fn marginal(&self, arm: usize) -> Result<f64> {
        kdpp::marginal_inclusion(&self.weights()?, self.players, arm)
    }

    pub fn marginals(&self) -> Result<Vec<f64>> {
        kdpp::marginals(&self.weights()?, self.players)
    }
}

/// The single observed member of a meta-arm and its loss (per-round loss, or
/// a block-average loss) in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaFeedback {
    pub observed_arm: usize,
    pub observed_value: f64,
}

/// Samples a meta-arm with `Pr[I]` proportional to `exp(-eta * sum_{i in I} L_i)`
/// and orders its members by an independent uniform permutation.
pub fn draw_meta_arm<R: Rng + ?Sized>(state: &EstimatorState, rng: &mut R) -> Result<MetaArm> {
    let weights = state.weights()?;
    let mut order = kdpp::sample_k_subset(&weights, state.players, rng)?;
    order.shuffle(rng);
    Ok(MetaArm { order })
}

/// Importance-weighted loss estimate: `K * value / Pr[i in I]` at the observed
/// arm, zero elsewhere.
pub fn estimate_round_loss(
    state: &EstimatorState,
    meta: &MetaArm,
    fb: MetaFeedback,
) -> Result<Vec<f64>> {
    if !meta.contains(fb.observed_arm) {
        return Err(Error::invalid(format!(
            "observed arm {} is not in the meta-arm",
            fb.observed_arm
        )));
    }
    if !(0.0..=1.0).contains(&fb.observed_value) {
        return Err(Error::invalid(format!(
            "observed value {} outside [0, 1]",
            fb.observed_value
        )));
    }
    let marginal = state.marginal(fb.observed_arm)?;
    if marginal <= 0.0 {
        return Err(Error::NumericalInstability(format!(
            "arm {} was played with marginal {marginal}",
            fb.observed_arm
        )));
    }
    let value = state.players as f64 * fb.observed_value / marginal;
    if !value.is_finite() {
        return Err(Error::NumericalInstability(format!(
            "loss estimate overflowed (marginal {marginal})"
        )));
    }
    let mut estimates = vec![0.0; state.arms()];
    estimates[fb.observed_arm] = value;
    Ok(estimates)
}

/// Adds one round's (or block's) estimates to the cumulative sums.
pub fn apply_estimates(state: &mut EstimatorState, estimates: &[f64]) -> Result<()> {
    if estimates.len() != state.arms() {
        return Err(Error::invalid(format!(
            "{} estimates for {} arms",
            estimates.len(),
            state.arms()
        )));
    }
    if let Some(e) = estimates.iter().find(|e| !e.is_finite() || **e < 0.0) {
        return Err(Error::invalid(format!("estimate {e} is not a finite nonnegative value")));
    }
    for (c, e) in state.cumulative.iter_mut().zip(estimates) {
        *c += e;
    }
    state.updates += 1;
    Ok(())
}

/// Learning rate `sqrt(ln N / (T N))` for the per-round metaplayer.
pub fn per_round_eta(arms: usize, horizon: u64) -> f64 {
    let n = arms as f64;
    (n.ln() / (horizon as f64 * n)).sqrt()
}

/// Regret bound `2 K sqrt(T N ln N)` of the per-round metaplayer.
pub fn metaplayer_regret_bound(arms: usize, players: usize, horizon: u64) -> f64 {
    let n = arms as f64;
    2.0 * players as f64 * (horizon as f64 * n * n.ln()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealizedConfig {
    pub players: usize,
    pub horizon: u64,
    pub eta: f64,
    pub record_every: u64,
}

/// Simulates the fully-communicating metaplayer: every round K distinct arms
/// are played with no collisions and one uniformly chosen member is observed.
/// The trace's regret is the meta-regret against the best K arms in hindsight.
pub fn run_idealized_metaplayer<R: Rng + ?Sized>(
    config: &IdealizedConfig,
    losses: &LossTable,
    rng: &mut R,
) -> Result<RegretTrace> {
    let arms = losses.arms();
    if config.horizon > losses.rounds() {
        return Err(Error::invalid(format!(
            "horizon {} exceeds the {} rounds of the loss table",
            config.horizon,
            losses.rounds()
        )));
    }
    let mut state = EstimatorState::new(arms, config.players, config.eta)?;
    let mut recorder = TraceRecorder::new(arms, config.players, config.horizon, config.record_every)?;
    for t in 0..config.horizon {
        let row = losses.round(t);
        let meta = draw_meta_arm(&state, rng)?;
        let charged: f64 = meta.order().iter().map(|&a| row[a]).sum();
        // Position 0 of a uniform permutation is a uniform member.
        let observed = meta.lead();
        let estimates = estimate_round_loss(
            &state,
            &meta,
            MetaFeedback {
                observed_arm: observed,
                observed_value: row[observed],
            },
        )?;
        apply_estimates(&mut state, &estimates)?;
        recorder.record_round(t, charged, row);
    }
    Ok(recorder.finish())
}
