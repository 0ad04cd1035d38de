//! Player state machines for the no-communication game.
//!
//! After a ranking phase, rank 0 acts as the coordinator and ranks `1..K` as
//! followers. Time is cut into blocks of `tau` rounds. A block opens with a
//! Coordinate phase of `K - 1` sub-blocks of `N` rounds each; in sub-block
//! `r` the coordinator parks on the arm meant for follower `r` while that
//! follower sweeps the arms in ascending order until it collides with her.
//! The rest of the block is the Play phase, where everyone sits on their
//! assigned arm and the coordinator observes her own arm's losses.
//!
//! Arms and ranks are 0-based.

use rand::Rng;

use crate::engine::{GameConfig, Player};
use crate::error::{Error, Result};
use crate::metaplayer::{self, EstimatorState, MetaArm, MetaFeedback};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlayerAction {
    Quiet,
    Pick(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoundOutcome {
    /// Another player picked the same arm. Carries no loss information.
    Collision,
    /// Sole picker; the arm's loss.
    Observed(f64),
    QuietCharged,
}

impl RoundOutcome {
    pub fn is_collision(&self) -> bool {
        matches!(self, RoundOutcome::Collision)
    }
}

/// How idle followers spend other followers' sub-blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// Idle followers stay quiet.
    #[default]
    Quiet,
    /// Idle followers sit on arm 0; a sweep that only collides on arm 0
    /// means arm 0 was assigned.
    QuietFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockPhase {
    /// Sub-block assigning follower `rank`, at `step` in `0..N`.
    SubBlock { rank: usize, step: usize },
    Play,
}

/// Layout of one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSchedule {
    arms: usize,
    players: usize,
    block_len: u64,
}

impl BlockSchedule {
    pub fn new(arms: usize, players: usize, block_len: u64) -> Result<Self> {
        if players == 0 || players > arms {
            return Err(Error::invalid(format!(
                "need 1 <= K <= N; got K={players}, N={arms}"
            )));
        }
        let coordinate = ((players - 1) * arms) as u64;
        if block_len <= coordinate {
            return Err(Error::invalid(format!(
                "block length {block_len} must exceed the {coordinate} Coordinate rounds"
            )));
        }
        Ok(BlockSchedule {
            arms,
            players,
            block_len,
        })
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn block_len(&self) -> u64 {
        self.block_len
    }

    pub fn coordinate_len(&self) -> u64 {
        ((self.players - 1) * self.arms) as u64
    }

    pub fn play_len(&self) -> u64 {
        self.block_len - self.coordinate_len()
    }

    /// Sub-block of follower `rank` occupies `[(rank-1) N, rank N)`.
    pub fn phase(&self, round_in_block: u64) -> BlockPhase {
        if round_in_block < self.coordinate_len() {
            let r = round_in_block as usize;
            BlockPhase::SubBlock {
                rank: r / self.arms + 1,
                step: r % self.arms,
            }
        } else {
            BlockPhase::Play
        }
    }
}

/// Pre-game ranking: pick a uniform arm in `0..K` until the first round
/// without a collision, then hold that arm; its index is the rank.
#[derive(Debug, Clone)]
pub struct Ranking {
    players: usize,
    last: usize,
    rank: Option<usize>,
}

impl Ranking {
    pub fn new(players: usize) -> Self {
        Ranking {
            players,
            last: 0,
            rank: None,
        }
    }

    pub fn act<R: Rng + ?Sized>(&mut self, rng: &mut R) -> PlayerAction {
        self.last = match self.rank {
            Some(r) => r,
            None => rng.random_range(0..self.players),
        };
        PlayerAction::Pick(self.last)
    }

    pub fn observe(&mut self, outcome: RoundOutcome) {
        if self.rank.is_none() && !outcome.is_collision() {
            self.rank = Some(self.last);
        }
    }

    /// The locked rank, or `None` if ranking has not succeeded (yet).
    pub fn rank(&self) -> Option<usize> {
        self.rank
    }
}

/// Rank 0: learns with the blocked metaplayer and assigns arms.
#[derive(Debug, Clone)]
pub struct Coordinator {
    schedule: BlockSchedule,
    variant: Variant,
    estimator: EstimatorState,
    meta: Option<MetaArm>,
    block_losses: Vec<f64>,
    collision_seen: bool,
    last: Option<usize>,
}

impl Coordinator {
    pub fn new(schedule: BlockSchedule, eta: f64, variant: Variant) -> Result<Self> {
        Ok(Coordinator {
            estimator: EstimatorState::new(schedule.arms, schedule.players, eta)?,
            schedule,
            variant,
            meta: None,
            block_losses: vec![0.0; schedule.arms],
            collision_seen: false,
            last: None,
        })
    }

    pub fn estimator(&self) -> &EstimatorState {
        &self.estimator
    }

    pub fn meta_arm(&self) -> Option<&MetaArm> {
        self.meta.as_ref()
    }

    /// Summed observed losses per arm in the current block.
    pub fn block_losses(&self) -> &[f64] {
        &self.block_losses
    }

    /// Draws this block's ordered meta-arm.
    pub fn begin_block<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let meta = metaplayer::draw_meta_arm(&self.estimator, rng)?;
        self.begin_block_with(meta)
    }

    /// Starts a block with a given ordered meta-arm.
    pub fn begin_block_with(&mut self, meta: MetaArm) -> Result<()> {
        if meta.len() != self.schedule.players || meta.order().iter().any(|&a| a >= self.schedule.arms) {
            return Err(Error::invalid("meta-arm does not match the block schedule"));
        }
        self.meta = Some(meta);
        self.block_losses.iter_mut().for_each(|l| *l = 0.0);
        self.collision_seen = false;
        self.last = None;
        Ok(())
    }

    fn meta(&self) -> &MetaArm {
        self.meta.as_ref().expect("coordinator acted outside a block")
    }

    /// In the quiet-free variant, parked followers make every collision on
    /// arm 0 ambiguous; when arm 0 is the target the coordinator holds it for
    /// the whole sub-block and the follower infers it from the sweep.
    fn holds_target(&self, target: usize) -> bool {
        self.variant == Variant::QuietFree && target == 0
    }

    pub fn act(&mut self, round_in_block: u64) -> PlayerAction {
        let meta = self.meta();
        let arm = match self.schedule.phase(round_in_block) {
            BlockPhase::SubBlock { rank, .. } => {
                let target = meta.order()[rank];
                if self.holds_target(target) || !self.collision_seen {
                    target
                } else {
                    meta.lead()
                }
            }
            BlockPhase::Play => meta.lead(),
        };
        self.last = Some(arm);
        PlayerAction::Pick(arm)
    }

    pub fn observe(&mut self, round_in_block: u64, outcome: RoundOutcome) -> Result<()> {
        let arm = self
            .last
            .take()
            .ok_or_else(|| Error::ProtocolViolation("coordinator observed without acting".into()))?;
        let phase = self.schedule.phase(round_in_block);
        match outcome {
            RoundOutcome::QuietCharged => {
                return Err(Error::ProtocolViolation("coordinator is never quiet".into()))
            }
            RoundOutcome::Observed(l) => self.block_losses[arm] += l,
            RoundOutcome::Collision => {
                if let BlockPhase::SubBlock { rank, .. } = phase {
                    let target = self.meta().order()[rank];
                    if arm == target && !self.holds_target(target) {
                        self.collision_seen = true;
                    }
                }
            }
        }
        // The collision flag is per sub-block.
        if let BlockPhase::SubBlock { step, .. } = phase {
            if step + 1 == self.schedule.arms {
                self.collision_seen = false;
            }
        }
        Ok(())
    }

    /// Feeds the block-average loss of the coordinator's own arm to the
    /// estimator: `K * (L / tau) / Pr[lead in I]` at the lead arm.
    pub fn end_block(&mut self) -> Result<()> {
        let meta = self
            .meta
            .take()
            .ok_or_else(|| Error::ProtocolViolation("block ended before it began".into()))?;
        let lead = meta.lead();
        let average = self.block_losses[lead] / self.schedule.block_len as f64;
        let estimates = metaplayer::estimate_round_loss(
            &self.estimator,
            &meta,
            MetaFeedback {
                observed_arm: lead,
                observed_value: average.min(1.0),
            },
        )?;
        metaplayer::apply_estimates(&mut self.estimator, &estimates)?;
        self.block_losses.iter_mut().for_each(|l| *l = 0.0);
        self.collision_seen = false;
        Ok(())
    }
}

/// Ranks `1..K`: find the assigned arm during the own sub-block, then hold it.
#[derive(Debug, Clone)]
pub struct Follower {
    schedule: BlockSchedule,
    rank: usize,
    variant: Variant,
    assigned: Option<usize>,
    zero_collision: bool,
}

impl Follower {
    pub fn new(schedule: BlockSchedule, rank: usize, variant: Variant) -> Result<Self> {
        if rank == 0 || rank >= schedule.players {
            return Err(Error::invalid(format!(
                "follower rank {rank} outside 1..{}",
                schedule.players
            )));
        }
        Ok(Follower {
            schedule,
            rank,
            variant,
            assigned: None,
            zero_collision: false,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Arm learned in the current block.
    pub fn assigned(&self) -> Option<usize> {
        self.assigned
    }

    pub fn begin_block(&mut self) {
        self.assigned = None;
        self.zero_collision = false;
    }

    pub fn act(&mut self, round_in_block: u64) -> PlayerAction {
        match self.schedule.phase(round_in_block) {
            BlockPhase::SubBlock { rank, step } if rank == self.rank => {
                PlayerAction::Pick(self.assigned.unwrap_or(step))
            }
            BlockPhase::SubBlock { .. } => match self.variant {
                Variant::Quiet => PlayerAction::Quiet,
                Variant::QuietFree => PlayerAction::Pick(0),
            },
            BlockPhase::Play => match self.assigned {
                Some(arm) => PlayerAction::Pick(arm),
                None => PlayerAction::Quiet,
            },
        }
    }

    pub fn observe(&mut self, round_in_block: u64, outcome: RoundOutcome) -> Result<()> {
        let BlockPhase::SubBlock { rank, step } = self.schedule.phase(round_in_block) else {
            return Ok(());
        };
        if rank != self.rank || self.assigned.is_some() {
            return Ok(());
        }
        if outcome.is_collision() {
            match self.variant {
                Variant::Quiet => self.assigned = Some(step),
                Variant::QuietFree if step != 0 => self.assigned = Some(step),
                Variant::QuietFree => self.zero_collision = true,
            }
        }
        if self.assigned.is_none() && step + 1 == self.schedule.arms {
            if self.variant == Variant::QuietFree && self.zero_collision {
                self.assigned = Some(0);
            } else {
                return Err(Error::ProtocolViolation(format!(
                    "follower {} swept all {} arms without meeting the coordinator",
                    self.rank, self.schedule.arms
                )));
            }
        }
        Ok(())
    }
}

/// What happened in one jointly simulated block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRun {
    /// Arm held by each rank in the first Play round; `None` if quiet.
    pub assignments: Vec<Option<usize>>,
    /// Arm each follower locked during its sub-block, indexed by rank - 1.
    pub locked: Vec<Option<usize>>,
    pub play_collisions: u64,
    pub coordinate_collisions: u64,
    pub quiet_rounds: u64,
}

/// Plays one block with a coordinator and `K - 1` followers on fixed
/// per-arm losses, starting from the given ordered meta-arm.
pub fn simulate_block(
    schedule: BlockSchedule,
    variant: Variant,
    meta: MetaArm,
    losses: &[f64],
) -> Result<BlockRun> {
    if losses.len() != schedule.arms {
        return Err(Error::invalid(format!(
            "{} losses for {} arms",
            losses.len(),
            schedule.arms
        )));
    }
    let mut coordinator = Coordinator::new(schedule, 1.0, variant)?;
    coordinator.begin_block_with(meta)?;
    let mut followers = (1..schedule.players)
        .map(|r| Follower::new(schedule, r, variant))
        .collect::<Result<Vec<_>>>()?;
    followers.iter_mut().for_each(Follower::begin_block);

    let mut run = BlockRun {
        assignments: vec![None; schedule.players],
        locked: vec![None; schedule.players - 1],
        play_collisions: 0,
        coordinate_collisions: 0,
        quiet_rounds: 0,
    };
    let mut actions = Vec::with_capacity(schedule.players);
    for rib in 0..schedule.block_len {
        actions.clear();
        actions.push(coordinator.act(rib));
        actions.extend(followers.iter_mut().map(|f| f.act(rib)));
        let outcomes = crate::engine::resolve_round(&actions, losses)?;
        let collided = outcomes.iter().filter(|o| o.is_collision()).count() as u64;
        run.quiet_rounds += actions.iter().filter(|a| **a == PlayerAction::Quiet).count() as u64;
        match schedule.phase(rib) {
            BlockPhase::Play => {
                if rib == schedule.coordinate_len() {
                    for (slot, action) in run.assignments.iter_mut().zip(&actions) {
                        *slot = match *action {
                            PlayerAction::Pick(arm) => Some(arm),
                            PlayerAction::Quiet => None,
                        };
                    }
                }
                run.play_collisions += collided;
            }
            BlockPhase::SubBlock { .. } => run.coordinate_collisions += collided,
        }
        coordinator.observe(rib, outcomes[0])?;
        for (f, outcome) in followers.iter_mut().zip(&outcomes[1..]) {
            f.observe(rib, *outcome)?;
        }
        if rib + 1 == schedule.coordinate_len() {
            for (slot, f) in run.locked.iter_mut().zip(&followers) {
                *slot = f.assigned();
            }
        }
    }
    coordinator.end_block()?;
    Ok(run)
}

#[derive(Debug, Clone)]
enum Role {
    Ranking(Ranking),
    Coordinator(Box<Coordinator>),
    Follower(Follower),
    /// Ranking failed or the protocol broke down: uniform play.
    Uniform,
}

/// One Coordinate & Play player over the whole game.
#[derive(Debug, Clone)]
pub struct CpPlayer {
    config: GameConfig,
    schedule: BlockSchedule,
    variant: Variant,
    rng: SimRng,
    role: Role,
    /// Set when the player fell back to uniform play.
    degraded: bool,
}

impl CpPlayer {
    pub fn new(config: GameConfig, variant: Variant, rng: SimRng) -> Result<Self> {
        config.validate()?;
        Ok(CpPlayer {
            schedule: BlockSchedule::new(config.arms, config.players, config.block_len)?,
            config,
            variant,
            rng,
            role: Role::Ranking(Ranking::new(config.players)),
            degraded: false,
        })
    }

    /// Rank after the ranking phase; `None` while ranking or if it failed.
    pub fn rank(&self) -> Option<usize> {
        match &self.role {
            Role::Ranking(_) | Role::Uniform => None,
            Role::Coordinator(_) => Some(0),
            Role::Follower(f) => Some(f.rank()),
        }
    }

    pub fn degraded(&self) -> bool {
        self.degraded
    }

    fn blocks_end(&self) -> u64 {
        self.config.rank_rounds + self.config.blocks() * self.config.block_len
    }

    fn round_in_block(&self, t: u64) -> Option<u64> {
        (t >= self.config.rank_rounds && t < self.blocks_end())
            .then(|| (t - self.config.rank_rounds) % self.config.block_len)
    }

    fn take_role(&mut self) -> Result<()> {
        let Role::Ranking(ranking) = &self.role else {
            return Ok(());
        };
        self.role = match ranking.rank() {
            None => {
                self.degraded = true;
                Role::Uniform
            }
            Some(0) => Role::Coordinator(Box::new(Coordinator::new(
                self.schedule,
                self.config.eta,
                self.variant,
            )?)),
            Some(r) => Role::Follower(Follower::new(self.schedule, r, self.variant)?),
        };
        Ok(())
    }

    fn act_inner(&mut self, t: u64) -> Result<PlayerAction> {
        if t < self.config.rank_rounds {
            if let Role::Ranking(ranking) = &mut self.role {
                return Ok(ranking.act(&mut self.rng));
            }
        }
        self.take_role()?;
        let Some(rib) = self.round_in_block(t) else {
            return Ok(PlayerAction::Pick(self.rng.random_range(0..self.config.arms)));
        };
        Ok(match &mut self.role {
            Role::Coordinator(c) => {
                if rib == 0 {
                    c.begin_block(&mut self.rng)?;
                }
                c.act(rib)
            }
            Role::Follower(f) => {
                if rib == 0 {
                    f.begin_block();
                }
                f.act(rib)
            }
            Role::Ranking(_) | Role::Uniform => {
                PlayerAction::Pick(self.rng.random_range(0..self.config.arms))
            }
        })
    }
}

impl Player for CpPlayer {
    fn act(&mut self, t: u64) -> PlayerAction {
        match self.act_inner(t) {
            Ok(action) => action,
            Err(_) => {
                self.degraded = true;
                self.role = Role::Uniform;
                PlayerAction::Pick(self.rng.random_range(0..self.config.arms))
            }
        }
    }

    fn observe(&mut self, t: u64, outcome: RoundOutcome) -> Result<()> {
        let rib = self.round_in_block(t);
        let result = match (&mut self.role, rib) {
            (Role::Ranking(r), _) => {
                r.observe(outcome);
                Ok(())
            }
            (Role::Coordinator(c), Some(rib)) => c.observe(rib, outcome).and_then(|()| {
                if rib + 1 == self.config.block_len {
                    c.end_block()
                } else {
                    Ok(())
                }
            }),
            // Followers ignore loss feedback outside the sweep.
            (Role::Follower(f), Some(rib)) => f.observe(rib, outcome),
            _ => Ok(()),
        };
        match result {
            // A missing peer (failed ranking elsewhere) breaks the handshake;
            // fall back to uniform play like an unranked player.
            Err(Error::ProtocolViolation(_)) => {
                self.degraded = true;
                self.role = Role::Uniform;
                Ok(())
            }
            other => other,
        }
    }
}
