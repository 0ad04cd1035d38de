// Two good links fail mid-game. Coordinate & Play moves away from them;
// Musical Chairs stays put.

use coordinate_play::experiment::{run_experiment, Algorithm, ExperimentSpec, Scenario};

pub fn run_example() -> coordinate_play::Result<(f64, f64)> {
    let horizon = 24_000;
    let spec = ExperimentSpec {
        scenario: Scenario::Exp2,
        algorithms: vec![Algorithm::Cp, Algorithm::Mc],
        horizon: Some(horizon),
        runs: 3,
        record_every: 1_000,
        workers: 3,
        ..ExperimentSpec::default()
    };
    let report = run_experiment(&spec)?;
    println!("change points {:?}", report.change_points);
    for t in [horizon / 4, horizon / 3, horizon / 2, horizon] {
        let cp = report.result(Algorithm::Cp).and_then(|r| r.mean_regret_at(t)).unwrap();
        let mc = report.result(Algorithm::Mc).and_then(|r| r.mean_regret_at(t)).unwrap();
        println!("t={t:>6}  cp={cp:>9.1}  mc={mc:>9.1}");
    }
    let cp = report.result(Algorithm::Cp).unwrap().final_mean_std().0;
    let mc = report.result(Algorithm::Mc).unwrap().final_mean_std().0;
    Ok((cp, mc))
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
