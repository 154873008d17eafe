//! Trade-off between accuracy and write power over population size and weight
//! barrier. Power is normalized to the N = 100, 20 kT cell.
//!
//!     cargo run --release --example power_pareto

use popsim::learning::SystemSpec;
use popsim::reliability::{optimum_for_error, pareto_sweep, SweepConfig};
use popsim::seeding::SeedTree;

fn main() -> popsim::Result<()> {
    let cfg = SweepConfig {
        n_list: vec![25, 50, 100],
        barriers: vec![12.0, 16.0, 20.0],
        steps: 3000,
        eval_every: 100,
        instances: 4,
        tail_fraction: 0.2,
        bin_width: 0.5,
        reference_n: 100,
        reference_barrier: 20.0,
    };
    let result = pareto_sweep(&SystemSpec::default(), &cfg, SeedTree::new(2))?;
    println!("  N  barrier  error (%)  power");
    for p in &result.points {
        println!(
            "{:>3}  {:>7}  {:>9.2}  {:.3}",
            p.n_neurons, p.weight_barrier, p.error_pct, p.normalized_power
        );
    }
    println!("\nfrontier (error bin -> cheapest cell):");
    for f in &result.frontier {
        println!(
            "  {:>5.2}%  power {:.3}  N={} at {} kT",
            f.error_bin, f.power_min, f.n_opt, f.barrier_opt
        );
    }
    if let Some(p) = optimum_for_error(&result.points, 4.0) {
        println!("\ncheapest cell under 4% error: N={} at {} kT", p.n_neurons, p.weight_barrier);
    }
    Ok(())
}
