// The Musical Chairs baseline on a stationary instance: learn, grab an
// arm, keep it.

use coordinate_play::adversaries::LossSchedule;
use coordinate_play::baseline_mc::McPlayer;
use coordinate_play::engine::run_game;
use coordinate_play::rng::{derive_seed, rng_from_seed};

pub fn run_example() -> coordinate_play::Result<Vec<usize>> {
    let (arms, players, horizon) = (6, 3, 20_000);
    let schedule = LossSchedule::bernoulli(vec![0.2, 0.8, 0.3, 0.7, 0.1, 0.9])?;
    let losses = schedule.materialize(horizon, 5)?;
    let mut team = (0..players)
        .map(|p| McPlayer::new(arms, players, 1_000, rng_from_seed(derive_seed(5, p as u64))))
        .collect::<coordinate_play::Result<Vec<_>>>()?;
    let trace = run_game(&mut team, &losses, horizon, 5_000)?;
    for r in &trace.records {
        println!("t={:>6}  regret={:>8.1}", r.t, r.online_regret);
    }
    let owned: Vec<usize> = team
        .iter()
        .filter_map(|p| match p.phase() {
            coordinate_play::baseline_mc::McPhase::Fixed(arm) => Some(arm),
            _ => None,
        })
        .collect();
    println!("owned arms {owned:?}");
    Ok(owned)
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
