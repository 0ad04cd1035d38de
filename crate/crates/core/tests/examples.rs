#[allow(dead_code)]
mod kdpp_sampling {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/kdpp_sampling.rs"));
}

#[allow(dead_code)]
mod idealized_metaplayer {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/idealized_metaplayer.rs"));
}

#[allow(dead_code)]
mod ranking {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ranking.rs"));
}

#[allow(dead_code)]
mod coordinate_block {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/coordinate_block.rs"));
}

#[allow(dead_code)]
mod musical_chairs {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/musical_chairs.rs"));
}

#[allow(dead_code)]
mod link_failures {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/link_failures.rs"));
}

#[allow(dead_code)]
mod link_improvement {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/link_improvement.rs"));
}

#[allow(dead_code)]
mod regret_sweep {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/regret_sweep.rs"));
}

#[allow(dead_code)]
mod loss_file {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/loss_file.rs"));
}

#[test]
fn kdpp_sampling_example_runs() {
    let marginals = kdpp_sampling::run_example().expect("kdpp example should run");
    assert!((marginals.iter().sum::<f64>() - 3.0).abs() < 1e-9);
}

#[test]
fn idealized_metaplayer_example_stays_under_bound() {
    let regret = idealized_metaplayer::run_example().expect("metaplayer example should run");
    let bound = coordinate_play::metaplayer::metaplayer_regret_bound(8, 4, 20_000);
    assert!(regret <= bound, "{regret} > {bound}");
}

#[test]
fn ranking_example_runs() {
    let rate = ranking::run_example().expect("ranking example should run");
    assert!(rate > 0.99);
}

#[test]
fn coordinate_block_example_runs() {
    coordinate_block::run_example().expect("block example should run");
}

#[test]
fn musical_chairs_example_owns_distinct_arms() {
    let mut owned = musical_chairs::run_example().expect("musical chairs example should run");
    owned.sort_unstable();
    owned.dedup();
    assert_eq!(owned.len(), 3);
}

#[test]
fn link_failures_example_runs() {
    let (cp, mc) = link_failures::run_example().expect("link failure example should run");
    assert!(cp < mc);
}

#[test]
fn link_improvement_example_runs() {
    link_improvement::run_example().expect("link improvement example should run");
}

#[test]
fn regret_sweep_example_fits_a_slope() {
    let slope = regret_sweep::run_example().expect("sweep example should run");
    assert!(slope.is_some());
}

#[test]
fn loss_file_example_writes_artifacts() {
    let files = loss_file::run_example().expect("loss file example should run");
    assert_eq!(
        files,
        ["cp", "cp_aggregate.csv", "mc", "mc_aggregate.csv", "summary.txt"]
    );
}
