// A bad link turns good after a quarter of the game.

use coordinate_play::experiment::{run_experiment, Algorithm, ExperimentSpec, Scenario};

pub fn run_example() -> coordinate_play::Result<(f64, f64)> {
    let horizon = 24_000;
    let spec = ExperimentSpec {
        scenario: Scenario::Exp3,
        algorithms: vec![Algorithm::Cp, Algorithm::CpQuietfree, Algorithm::Mc],
        horizon: Some(horizon),
        runs: 3,
        record_every: 1_000,
        workers: 3,
        ..ExperimentSpec::default()
    };
    let report = run_experiment(&spec)?;
    for result in &report.results {
        let (mean, std) = result.final_mean_std();
        println!("{:<13} final regret {mean:>9.1} +- {std:.1}", result.algorithm.name());
    }
    let cp = report.result(Algorithm::Cp).unwrap().final_mean_std().0;
    let mc = report.result(Algorithm::Mc).unwrap().final_mean_std().0;
    Ok((cp, mc))
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
