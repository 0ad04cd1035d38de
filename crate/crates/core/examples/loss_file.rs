// Runs the experiment driver on an explicit loss table read from a file
// and writes the CSV artifacts next to it.

use std::fs;

use coordinate_play::experiment::{run_experiment, Algorithm, ExperimentSpec, Scenario};
use coordinate_play::Error;

pub fn run_example() -> coordinate_play::Result<Vec<String>> {
    let dir = std::env::temp_dir().join(format!("cnp-loss-file-{}", std::process::id()));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let path = dir.join("losses.txt");
    // One round per line, one comma-separated loss per arm, no header.
    let mut text = String::new();
    for t in 0..2_000 {
        let row = if t < 1_000 { "0.1,0.9,0.5,0.6" } else { "0.9,0.1,0.5,0.6" };
        text.push_str(row);
        text.push('\n');
    }
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;

    let spec = ExperimentSpec {
        scenario: Scenario::File,
        algorithms: vec![Algorithm::Cp, Algorithm::Mc],
        loss_file: Some(path),
        players: 2,
        runs: 2,
        mc_learn_rounds: 200,
        out: Some(dir.join("out")),
        ..ExperimentSpec::default()
    };
    let report = run_experiment(&spec)?;
    println!("horizon {} over {} arms", report.config.game.horizon, report.config.game.arms);
    let mut files: Vec<String> = fs::read_dir(dir.join("out"))
        .map_err(|e| Error::io(&dir, e))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    println!("wrote {files:?}");
    fs::remove_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(files)
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
