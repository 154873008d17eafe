//! Encode a voltage with a population of noisy junctions and decode it back.
//! The decoding error shrinks as the population grows.
//!
//!     cargo run --release --example population_round_trip

use popsim::device::JunctionParams;
use popsim::population::{Population, DEFAULT_OBSERVATION_TIME};
use popsim::stats;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> popsim::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in [10, 25, 50, 100, 200] {
        let pop = Population::linear(n, -0.15, 0.15, JunctionParams::default(), DEFAULT_OBSERVATION_TIME)?;
        let errors: Vec<f64> = (0..2000)
            .map(|_| {
                let v = rng.random_range(-0.1..=0.1);
                (pop.encode_check(v, &mut rng).volts - v).abs()
            })
            .collect();
        println!(
            "N = {n:>3}: mean |decoded - input| = {:.2} mV",
            stats::mean(&errors) * 1e3
        );
    }

    // Losing neurons degrades the code gracefully.
    let mut pop = Population::linear(100, -0.15, 0.15, JunctionParams::default(), DEFAULT_OBSERVATION_TIME)?;
    for i in (0..100).step_by(2) {
        pop.kill(i)?;
    }
    let decoded = pop.encode_check(0.03, &mut rng);
    println!(
        "\nwith {} of 100 alive, 30 mV decodes to {:.2} mV",
        pop.alive_count(),
        decoded.volts * 1e3
    );
    Ok(())
}
