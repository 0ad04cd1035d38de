// Final regret against the horizon on a log-log scale.

use coordinate_play::experiment::{sweep_accumulated_regret, Algorithm, ExperimentSpec};

pub fn run_example() -> coordinate_play::Result<Option<f64>> {
    let spec = ExperimentSpec {
        algorithms: vec![Algorithm::Cp],
        runs: 2,
        t_grid: vec![5_000, 10_000, 20_000],
        record_every: 5_000,
        workers: 2,
        ..ExperimentSpec::default()
    };
    let sweeps = sweep_accumulated_regret(&spec)?;
    for sweep in &sweeps {
        for p in &sweep.points {
            println!("{} T={:>6}  mean={:>9.1}", sweep.algorithm.name(), p.horizon, p.mean_final_regret);
        }
        match sweep.fit {
            Some(fit) => println!("slope {:.3}", fit.slope),
            None => println!("slope absent"),
        }
    }
    Ok(sweeps[0].fit.map(|f| f.slope))
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
