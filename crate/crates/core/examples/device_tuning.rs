//! Tuning curve of a single junction: simulated flip counts in a 10 us window
//! against the closed-form mean rate.
//!
//!     cargo run --release --example device_tuning

use popsim::device::{self, JunctionParams};
use popsim::stats;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> popsim::Result<()> {
    let junction = JunctionParams::default();
    let t_obs = 1e-5;
    let windows = 20_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    println!("{:>8} {:>14} {:>14} {:>8}", "v (V)", "measured (Hz)", "analytic (Hz)", "z");
    for v in [-0.1, -0.05, -0.025, 0.0, 0.025, 0.05, 0.1] {
        let counts: Vec<f64> = (0..windows)
            .map(|_| device::simulate_window(&junction, v, t_obs, &mut rng) as f64)
            .collect();
        let measured = stats::mean(&counts) / t_obs;
        let analytic = device::mean_transition_rate(&junction, v);
        let z = (measured - analytic) / (stats::sem(&counts) / t_obs);
        println!("{v:>8.3} {measured:>14.5e} {analytic:>14.5e} {z:>8.2}");
    }

    let (p, ap) = junction.escape_rates(0.05);
    println!("\nescape rates at +50 mV: P {p:.4e} Hz, AP {ap:.4e} Hz");
    println!(
        "P(state P) at +50 mV: {:.4}",
        device::stationary_p_probability(&junction, 0.05)
    );
    println!(
        "probability that an AP junction flips within 1 ns at +50 mV: {:.6}",
        device::switch_probability(ap, 1e-9)?
    );
    Ok(())
}
