//! Kill a fraction of the neurons of a trained system and compare how fast it
//! recovers against training fresh weights on the same surviving neurons.
//!
//!     cargo run --release --example neuron_loss_recovery

use popsim::learning::SystemSpec;
use popsim::reliability::{run_loss_recovery, summarize_loss_recovery, BaselineLayout, LossRecoveryConfig};
use popsim::seeding::SeedTree;

fn main() -> popsim::Result<()> {
    let cfg = LossRecoveryConfig {
        fractions: vec![0.4, 0.8],
        pretrain_steps: 4000,
        recovery_steps: 3000,
        baseline_steps: 4000,
        baseline_layout: BaselineLayout::Survivors,
        eval_every: 50,
        instances: 8,
        tail_fraction: 0.2,
    };
    let result = run_loss_recovery(&SystemSpec::default(), &cfg, SeedTree::new(11))?;
    for s in summarize_loss_recovery(&result, cfg.tail_fraction, 1.0)? {
        println!("lost {:.0}% of neurons ({} left)", s.fraction * 100.0, s.n_alive);
        println!(
            "  error: untrained {:.1}%, trained {:.1}%, right after loss {:.1}%",
            s.initial_error, s.pretrained_error, s.post_loss_error
        );
        println!(
            "  steady: recovered {:.2}% vs fresh {:.2}%",
            s.recovery_steady, s.baseline_steady
        );
        println!(
            "  steps to reach it: recovered {:?} vs fresh {:?}",
            s.recovery_steps_to_level, s.baseline_steps_to_level
        );
    }
    Ok(())
}
