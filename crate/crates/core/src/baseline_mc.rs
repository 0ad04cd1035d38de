//! Musical Chairs baseline.
//!
//! For the first `T_0` rounds a player picks arms uniformly and averages the
//! rewards (`1 - loss`) it observes without collision. It then picks
//! uniformly among its own estimated top-K arms until the first round without
//! a collision, and owns that arm for the rest of the game.

use rand::Rng;

use crate::engine::Player;
use crate::error::{Error, Result};
use crate::protocol::{PlayerAction, RoundOutcome};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McPhase {
    Learn,
    Chairs,
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub struct McPlayer {
    arms: usize,
    players: usize,
    learn_rounds: u64,
    phase: McPhase,
    reward_sums: Vec<f64>,
    counts: Vec<u64>,
    top_k: Vec<usize>,
    last: usize,
    rng: SimRng,
}

impl McPlayer {
    pub fn new(arms: usize, players: usize, learn_rounds: u64, rng: SimRng) -> Result<Self> {
        if players == 0 || players > arms {
            return Err(Error::invalid(format!(
                "need 1 <= K <= N; got K={players}, N={arms}"
            )));
        }
        Ok(McPlayer {
            arms,
            players,
            learn_rounds,
            phase: if learn_rounds == 0 { McPhase::Chairs } else { McPhase::Learn },
            reward_sums: vec![0.0; arms],
            counts: vec![0; arms],
            top_k: if learn_rounds == 0 { (0..players).collect() } else { Vec::new() },
            last: 0,
            rng,
        })
    }

    pub fn phase(&self) -> McPhase {
        self.phase
    }

    /// Mean observed reward per arm; unobserved arms count as 0.
    pub fn estimated_rewards(&self) -> Vec<f64> {
        self.reward_sums
            .iter()
            .zip(&self.counts)
            .map(|(s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
            .collect()
    }

    /// Estimated top-K arms, best first; ties go to the lower index.
    pub fn top_k(&self) -> &[usize] {
        &self.top_k
    }

    fn freeze_estimates(&mut self) {
        let rewards = self.estimated_rewards();
        let mut order: Vec<usize> = (0..self.arms).collect();
        order.sort_by(|&a, &b| rewards[b].total_cmp(&rewards[a]).then(a.cmp(&b)));
        order.truncate(self.players);
        self.top_k = order;
        self.phase = McPhase::Chairs;
    }
}

impl Player for McPlayer {
    fn act(&mut self, t: u64) -> PlayerAction {
        if t >= self.learn_rounds && self.phase == McPhase::Learn {
            self.freeze_estimates();
        }
        self.last = match self.phase {
            McPhase::Learn => self.rng.random_range(0..self.arms),
            McPhase::Chairs => self.top_k[self.rng.random_range(0..self.top_k.len())],
            McPhase::Fixed(arm) => arm,
        };
        PlayerAction::Pick(self.last)
    }

    fn observe(&mut self, _t: u64, outcome: RoundOutcome) -> Result<()> {
        match (self.phase, outcome) {
            (McPhase::Learn, RoundOutcome::Observed(l)) => {
                self.reward_sums[self.last] += 1.0 - l;
                self.counts[self.last] += 1;
            }
            (McPhase::Chairs, RoundOutcome::Observed(_)) => self.phase = McPhase::Fixed(self.last),
            (_, RoundOutcome::QuietCharged) => {
                return Err(Error::ProtocolViolation("musical chairs players never stay quiet".into()))
            }
            _ => {}
        }
        Ok(())
    }
}
