// One block of the coordination handshake: the coordinator assigns arms
// to three followers, who then play without colliding.

use coordinate_play::metaplayer::MetaArm;
use coordinate_play::protocol::{simulate_block, BlockSchedule, Variant};

pub fn run_example() -> coordinate_play::Result<()> {
    let schedule = BlockSchedule::new(8, 4, 60)?;
    let losses = [0.2, 0.6, 0.1, 0.5, 0.9, 0.3, 0.4, 0.7];
    for variant in [Variant::Quiet, Variant::QuietFree] {
        let meta = MetaArm::new(vec![5, 0, 2, 7], 8)?;
        let run = simulate_block(schedule, variant, meta, &losses)?;
        println!(
            "{variant:?}: play arms {:?}, coordinate collisions {}, quiet player-rounds {}, play collisions {}",
            run.assignments, run.coordinate_collisions, run.quiet_rounds, run.play_collisions
        );
        assert_eq!(run.assignments, vec![Some(5), Some(0), Some(2), Some(7)]);
        assert_eq!(run.play_collisions, 0);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
