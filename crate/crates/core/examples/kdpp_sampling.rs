// Draws K-subsets with product weights and compares the empirical
// inclusion frequencies with the exact marginals.

use coordinate_play::kdpp::{self, WeightVector};
use coordinate_play::rng::rng_from_seed;

pub fn run_example() -> coordinate_play::Result<Vec<f64>> {
    let weights = kdpp::stabilize(&[3.0, 0.5, 1.0, 0.0, 2.5, 4.0], 0.7)?;
    let k = 3;
    let exact = kdpp::marginals(&weights, k)?;
    let table = kdpp::build_esp_table(&weights, k)?;
    let draws = 20_000;
    let mut hits = vec![0usize; weights.len()];
    let mut rng = rng_from_seed(7);
    for _ in 0..draws {
        for arm in kdpp::sample_with_table(&weights, &table, &mut rng)? {
            hits[arm] += 1;
        }
    }
    println!("arm  weight    exact   empirical");
    for (arm, (w, p)) in weights.as_slice().iter().zip(&exact).enumerate() {
        println!(
            "{arm:>3}  {w:.4}   {p:.4}   {:.4}",
            hits[arm] as f64 / draws as f64
        );
    }
    println!("sum of marginals = {:.12}", exact.iter().sum::<f64>());

    // Zero weights are rejected; the weights always come from stabilize().
    assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
    Ok(exact)
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
