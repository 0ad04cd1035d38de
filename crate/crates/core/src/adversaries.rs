//! Oblivious loss sequences.
//!
//! A [`LossSchedule`] describes the adversary; [`LossSchedule::materialize`]
//! fixes the full `T x N` loss table from a seed before any player acts.
//! Losses are used everywhere internally; rewards appear only where an
//! instance is specified by mean rewards (`loss = 1 - reward`).

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Materialized per-round losses, row-major by round.
#[derive(Debug, Clone, PartialEq)]
pub struct LossTable {
    arms: usize,
    rounds: u64,
    data: Vec<f64>,
}

impl LossTable {
    pub fn new(arms: usize, data: Vec<f64>) -> Result<Self> {
        if arms == 0 || data.is_empty() || !data.len().is_multiple_of(arms) {
            return Err(Error::invalid(format!(
                "{} loss values do not form rows of {arms} arms",
                data.len()
            )));
        }
        if let Some(x) = data.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::invalid(format!("loss {x} outside [0, 1]")));
        }
        Ok(LossTable {
            arms,
            rounds: (data.len() / arms) as u64,
            data,
        })
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Losses of all arms at 0-based round `t`.
    pub fn round(&self, t: u64) -> &[f64] {
        let start = t as usize * self.arms;
        &self.data[start..start + self.arms]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Bernoulli,
    PiecewiseBernoulli,
    File,
}

/// Mean losses in force from round `start` (0-based) until the next segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: u64,
    pub mean_losses: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossSchedule {
    kind: ScheduleKind,
    arms: usize,
    segments: Vec<Segment>,
    table: Option<LossTable>,
}

impl LossSchedule {
    /// Stationary i.i.d. Bernoulli losses.
    pub fn bernoulli(mean_losses: Vec<f64>) -> Result<Self> {
        let arms = mean_losses.len();
        let mut s = Self::piecewise(
            arms,
            vec![Segment {
                start: 0,
                mean_losses,
            }],
        )?;
        s.kind = ScheduleKind::Bernoulli;
        Ok(s)
    }

    /// Bernoulli losses whose means switch at the segment starts.
    pub fn piecewise(arms: usize, segments: Vec<Segment>) -> Result<Self> {
        if arms == 0 {
            return Err(Error::invalid("schedule needs at least one arm"));
        }
        match segments.first() {
            Some(s) if s.start == 0 => {}
            _ => return Err(Error::invalid("first segment must start at round 0")),
        }
        for pair in segments.windows(2) {
            if pair[1].start <= pair[0].start {
                return Err(Error::invalid("segment starts must be strictly increasing"));
            }
        }
        for seg in &segments {
            if seg.mean_losses.len() != arms {
                return Err(Error::invalid(format!(
                    "segment at {} has {} means, expected {arms}",
                    seg.start,
                    seg.mean_losses.len()
                )));
            }
            if let Some(m) = seg.mean_losses.iter().find(|m| !(0.0..=1.0).contains(*m)) {
                return Err(Error::invalid(format!("mean loss {m} outside [0, 1]")));
            }
        }
        Ok(LossSchedule {
            kind: ScheduleKind::PiecewiseBernoulli,
            arms,
            segments,
            table: None,
        })
    }

    /// A fixed, fully specified loss table.
    pub fn from_table(table: LossTable) -> Self {
        LossSchedule {
            kind: ScheduleKind::File,
            arms: table.arms(),
            segments: Vec::new(),
            table: Some(table),
        }
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Rounds at which the means change (segment starts after round 0).
    pub fn change_points(&self) -> Vec<u64> {
        self.segments.iter().skip(1).map(|s| s.start).collect()
    }

    /// Mean losses at round `t`; `None` for file schedules.
    pub fn mean_losses_at(&self, t: u64) -> Option<&[f64]> {
        let idx = self.segments.partition_point(|s| s.start <= t);
        idx.checked_sub(1)
            .map(|i| self.segments[i].mean_losses.as_slice())
    }

    /// Number of rounds a file schedule provides.
    pub fn fixed_rounds(&self) -> Option<u64> {
        self.table.as_ref().map(LossTable::rounds)
    }

    /// Fixes the loss table for `horizon` rounds.
    ///
    /// Each arm draws from its own stream of the seeded generator, so an
    /// arm's losses do not depend on how many other arms exist.
    pub fn materialize(&self, horizon: u64, seed: u64) -> Result<LossTable> {
        if horizon == 0 {
            return Err(Error::invalid("horizon must be positive"));
        }
        if let Some(table) = &self.table {
            if horizon > table.rounds() {
                return Err(Error::invalid(format!(
                    "horizon {horizon} exceeds the {} rounds in the loss file",
                    table.rounds()
                )));
            }
            let data = table.data[..horizon as usize * self.arms].to_vec();
            return LossTable::new(self.arms, data);
        }

        let n = self.arms;
        let mut data = vec![0.0; horizon as usize * n];
        for arm in 0..n {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(arm as u64);
            let mut seg = 0;
            for t in 0..horizon {
                while seg + 1 < self.segments.len() && self.segments[seg + 1].start <= t {
                    seg += 1;
                }
                let mean = self.segments[seg].mean_losses[arm];
                let u: f64 = rng.random();
                data[t as usize * n + arm] = if u < mean { 1.0 } else { 0.0 };
            }
        }
        LossTable::new(n, data)
    }
}

/// Random stationary instance: mean rewards uniform in `[0, 1]`, redrawn until
/// the K-th and (K+1)-th best rewards differ by at least `gap`.
pub fn experiment1_schedule<R: Rng + ?Sized>(
    arms: usize,
    players: usize,
    gap: f64,
    rng: &mut R,
) -> Result<LossSchedule> {
    if players == 0 || players >= arms {
        return Err(Error::invalid(format!(
            "need 1 <= K < N, got K={players}, N={arms}"
        )));
    }
    if !(0.0..1.0).contains(&gap) {
        return Err(Error::invalid(format!("gap {gap} outside [0, 1)")));
    }
    loop {
        let rewards: Vec<f64> = (0..arms).map(|_| rng.random::<f64>()).collect();
        if reward_gap(&rewards, players) >= gap {
            return LossSchedule::bernoulli(rewards.iter().map(|r| 1.0 - r).collect());
        }
    }
}

/// Gap between the K-th and (K+1)-th largest rewards.
pub fn reward_gap(rewards: &[f64], players: usize) -> f64 {
    let mut sorted = rewards.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted[players - 1] - sorted[players]
}

fn require_eight(arms: usize) -> Result<()> {
    if arms != 8 {
        return Err(Error::invalid(format!(
            "this scenario is defined for 8 arms, got {arms}"
        )));
    }
    Ok(())
}

/// Link failures: four good links (mean loss 0.1) and four mediocre ones
/// (0.3); link 0 fails (0.9) at `T/4`, link 2 at `T/3`.
pub fn experiment2_schedule(arms: usize, horizon: u64) -> Result<LossSchedule> {
    require_eight(arms)?;
    let initial = vec![0.1, 0.1, 0.1, 0.1, 0.3, 0.3, 0.3, 0.3];
    let mut first_fail = initial.clone();
    first_fail[0] = 0.9;
    let mut second_fail = first_fail.clone();
    second_fail[2] = 0.9;
    LossSchedule::piecewise(
        arms,
        vec![
            Segment {
                start: 0,
                mean_losses: initial,
            },
            Segment {
                start: horizon / 4,
                mean_losses: first_fail,
            },
            Segment {
                start: horizon / 3,
                mean_losses: second_fail,
            },
        ],
    )
}

/// Link improvement: link 0 starts bad (0.9) among mediocre links (0.7) and
/// becomes the best (0.1) at `T/4`.
pub fn experiment3_schedule(arms: usize, horizon: u64) -> Result<LossSchedule> {
    require_eight(arms)?;
    let mut initial = vec![0.7; 8];
    initial[0] = 0.9;
    let mut improved = initial.clone();
    improved[0] = 0.1;
    LossSchedule::piecewise(
        arms,
        vec![
            Segment {
                start: 0,
                mean_losses: initial,
            },
            Segment {
                start: horizon / 4,
                mean_losses: improved,
            },
        ],
    )
}

/// Reads a comma-separated loss file: one round per line, one column per arm,
/// every value in `[0, 1]`, no header.
pub fn load_schedule_file(path: &Path) -> Result<LossSchedule> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_loss_text(&text, path).map(LossSchedule::from_table)
}

pub(crate) fn parse_loss_text(text: &str, path: &Path) -> Result<LossTable> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let body = text.strip_suffix('\n').unwrap_or(text);
    let body = body.strip_suffix('\r').unwrap_or(body);
    if body.trim().is_empty() {
        return Err(parse_err(1, "file contains no rounds".into()));
    }
    let mut arms = None;
    let mut data = Vec::new();
    for (i, line) in body.split('\n').enumerate() {
        let lineno = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        let mut count = 0;
        for field in line.split(',') {
            let field = field.trim();
            let value: f64 = field
                .parse()
                .map_err(|_| parse_err(lineno, format!("cannot parse {field:?} as a number")))?;
            if !(0.0..=1.0).contains(&value) {
                return Err(parse_err(lineno, format!("loss {value} outside [0, 1]")));
            }
            data.push(value);
            count += 1;
        }
        match arms {
            None => arms = Some(count),
            Some(n) if n != count => {
                return Err(parse_err(lineno, format!("expected {n} columns, found {count}")))
            }
            Some(_) => {}
        }
    }
    LossTable::new(arms.unwrap_or(0), data)
}
