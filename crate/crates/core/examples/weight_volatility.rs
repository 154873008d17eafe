//! Learning with volatile weights: lower energy barriers lose stored bits
//! faster, and below some barrier the system cannot learn at all.
//!
//!     cargo run --release --example weight_volatility

use popsim::learning::SystemSpec;
use popsim::reliability::{reliability_threshold, run_weight_loss, summarize_weight_loss, WeightLossConfig};
use popsim::seeding::SeedTree;

fn main() -> popsim::Result<()> {
    let cfg = WeightLossConfig {
        barriers: vec![14.0, 18.0, 20.0, 22.0, 25.0, 30.0, f64::INFINITY],
        steps: 4000,
        eval_every: 100,
        instances: 8,
        tail_fraction: 0.2,
    };
    let outcomes = run_weight_loss(&SystemSpec::default(), &cfg, SeedTree::new(5))?;
    let summary = summarize_weight_loss(&outcomes, cfg.tail_fraction)?;
    println!("barrier (kT)   p_loss/step   steady error (%)   p vs no loss");
    for s in &summary {
        println!(
            "{:>12}   {:>11.3e}   {:>8.2} +/- {:.2}   {:>10.3}",
            s.barrier,
            s.p_loss,
            s.steady_mean,
            s.steady_sem,
            s.p_value_vs_no_loss.unwrap_or(f64::NAN)
        );
    }
    match reliability_threshold(&summary, 0.01) {
        Some(t) => println!("\nbarriers from {t} kT up behave like reliable weights"),
        None => println!("\nno finite barrier matched reliable weights"),
    }
    Ok(())
}
