// The fully-communicating metaplayer on a stochastic instance, checked
// against its regret bound.

use coordinate_play::adversaries::experiment1_schedule;
use coordinate_play::metaplayer::{self, IdealizedConfig};
use coordinate_play::rng::{derive_seed, rng_from_seed, stream};

pub fn run_example() -> coordinate_play::Result<f64> {
    let (arms, players, horizon) = (8, 4, 20_000);
    let seed = 11;
    let schedule = experiment1_schedule(
        arms,
        players,
        0.05,
        &mut rng_from_seed(derive_seed(seed, stream::INSTANCE)),
    )?;
    let losses = schedule.materialize(horizon, derive_seed(seed, stream::LOSSES))?;
    let config = IdealizedConfig {
        players,
        horizon,
        eta: metaplayer::per_round_eta(arms, horizon),
        record_every: horizon / 4,
    };
    let trace = metaplayer::run_idealized_metaplayer(
        &config,
        &losses,
        &mut rng_from_seed(derive_seed(seed, stream::METAPLAYER)),
    )?;
    for r in &trace.records {
        println!("t={:>6}  regret={:>9.1}", r.t, r.online_regret);
    }
    let bound = metaplayer::metaplayer_regret_bound(arms, players, horizon);
    println!("final regret {:.1}, bound {:.1}", trace.final_regret(), bound);
    Ok(trace.final_regret())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
