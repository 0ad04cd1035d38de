// How often the collision-based ranking phase ranks every player.

use coordinate_play::engine::{default_rank_rounds, resolve_round};
use coordinate_play::protocol::Ranking;
use coordinate_play::rng::{derive_seed, rng_from_seed};

pub fn run_example() -> coordinate_play::Result<f64> {
    let players = 4;
    let rank_rounds = default_rank_rounds(players, 240_000);
    let trials = 2_000;
    let losses = vec![0.5; players];
    let mut ranked = 0;
    let mut rounds_needed = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rngs: Vec<_> = (0..players)
            .map(|p| rng_from_seed(derive_seed(trial as u64, p as u64)))
            .collect();
        let mut ranks: Vec<Ranking> = (0..players).map(|_| Ranking::new(players)).collect();
        let mut done_at = None;
        for t in 0..rank_rounds {
            let actions: Vec<_> = ranks.iter_mut().zip(&mut rngs).map(|(r, g)| r.act(g)).collect();
            for (r, o) in ranks.iter_mut().zip(resolve_round(&actions, &losses)?) {
                r.observe(o);
            }
            if done_at.is_none() && ranks.iter().all(|r| r.rank().is_some()) {
                done_at = Some(t + 1);
            }
        }
        if let Some(t) = done_at {
            ranked += 1;
            rounds_needed.push(t);
        }
    }
    rounds_needed.sort_unstable();
    let rate = ranked as f64 / trials as f64;
    println!("rank rounds {rank_rounds}, success rate {rate:.4}");
    println!(
        "rounds to rank everyone: median {}, max {}",
        rounds_needed[rounds_needed.len() / 2],
        rounds_needed.last().copied().unwrap_or(0)
    );
    Ok(rate)
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
