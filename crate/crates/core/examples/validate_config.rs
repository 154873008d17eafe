//! Parse an experiment config, apply overrides and run the `validate`
//! command, which echoes the resolved settings and derived constants.
//!
//!     cargo run --release --example validate_config [path/to/config.toml]

use popsim::config::ExperimentConfig;
use popsim::harness::{self, Command, Overrides};

fn main() -> popsim::Result<()> {
    let mut cfg = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::load(path.as_ref())?,
        None => ExperimentConfig::from_toml_str(
            r#"
            [weights]
            delta_e_weight_kt = 22.0

            [run]
            instances = 10
            "#,
        )?,
    };
    Overrides {
        seed: Some(42),
        ..Default::default()
    }
    .apply(&mut cfg)?;

    let out = std::env::temp_dir().join("popsim-validate");
    let report = harness::run(Command::Validate, &cfg, &out)?;
    for line in &report.lines {
        println!("{line}");
    }
    println!("\noutputs in {}:", out.display());
    for (name, sha) in &report.outputs {
        println!("  {name}  {}", &sha[..16]);
    }

    match ExperimentConfig::from_toml_str("[run]\nstep = 10\n") {
        Err(e) => println!("\ntypos are rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
