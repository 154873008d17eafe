//! Monte Carlo simulator of a population-coding system built from stochastic
//! bistable junctions (the neurons) and volatile quantized memories (the
//! synaptic weights), trained continuously by trial and error.

pub mod config;
pub mod device;
pub mod error;
pub mod harness;
pub mod learning;
pub mod population;
pub mod reliability;
pub mod seeding;
pub mod stats;
pub mod synapse;

pub use error::{Error, Result};
