//! Train a 100 x 100 system to map v to V_max sin(pi v / V_max) by trial and
//! error, and print the learning curve and the learned transfer function.
//!
//!     cargo run --release --example learn_sine

use popsim::learning::SystemSpec;
use popsim::seeding::{Purpose, SeedTree};

fn main() -> popsim::Result<()> {
    let spec = SystemSpec::default();
    let mut rng = SeedTree::new(1).stream(Purpose::Learn, 0, 0);
    let mut state = spec.build(&mut rng)?;

    let trace = state.run_learning(4000, 500, &mut rng)?;
    println!("step   error (% of output range)");
    for e in &trace.evals {
        println!("{:>5}  {:.2}", e.step, e.error_pct);
    }
    let updates = trace.steps.iter().filter(|s| s.updated).count();
    println!("weights were written on {updates} of {} steps", trace.steps.len());

    println!("\n  v_in (mV)  target  output");
    for (v, target, out) in state.transfer_curve(&mut rng).into_iter().step_by(5) {
        println!("{:>10.1} {:>7.1} {:>7.1}", v * 1e3, target * 1e3, out * 1e3);
    }
    Ok(())
}
