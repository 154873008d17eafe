//! End-to-end behaviour of the encoder and the learner at small scale.

use popsim::device::JunctionParams;
use popsim::learning::{steady_state_stats, SystemSpec};
use popsim::population::Population;
use popsim::seeding::{Purpose, SeedTree};
use popsim::stats;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn round_trip_error_shrinks_with_population_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let inputs: Vec<f64> = (0..3000).map(|_| rng.random_range(-0.1..=0.1)).collect();
    let errors: Vec<f64> = [25, 50, 100]
        .into_iter()
        .map(|n| {
            let pop = Population::linear(n, -0.15, 0.15, JunctionParams::default(), 1e-5).unwrap();
            let e: Vec<f64> = inputs
                .iter()
                .map(|&v| (pop.encode_check(v, &mut rng).volts - v).abs())
                .collect();
            stats::mean(&e)
        })
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn high_barrier_matches_reliable_weights() {
    let seeds = SeedTree::new(77);
    let steady = |barrier: f64| -> Vec<f64> {
        let spec = SystemSpec::default().with_size(40).with_weight_barrier(barrier);
        (0..20)
            .map(|k| {
                let mut rng = seeds.stream(Purpose::Learn, 0, k);
                let mut state = spec.build(&mut rng).unwrap();
                let trace = state.run_learning(3000, 100, &mut rng).unwrap();
                steady_state_stats(&trace, 0.2).unwrap().mean_error
            })
            .collect()
    };
    let reliable = steady(f64::INFINITY);
    let stable = steady(35.0);
    let p = stats::welch_p_value(&stable, &reliable);
    assert!(p > 0.01, "p = {p}");
    let volatile = steady(12.0);
    assert!(stats::welch_p_value(&volatile, &reliable) < 0.01);
    assert!(stats::mean(&volatile) > stats::mean(&reliable) + 5.0);
}

#[test]
fn learning_reduces_error_from_random_start() {
    let spec = SystemSpec::default().with_size(50);
    let mut rng = SeedTree::new(3).stream(Purpose::Learn, 0, 0);
    let mut state = spec.build(&mut rng).unwrap();
    let trace = state.run_learning(3000, 500, &mut rng).unwrap();
    let first = trace.evals.first().unwrap().error_pct;
    let last = trace.final_error().unwrap();
    assert!(first > 20.0, "{first}");
    assert!(last < 8.0, "{last}");
}

#[test]
fn analog_weights_learn_too() {
    let spec = SystemSpec {
        analog: true,
        ..SystemSpec::default().with_size(50)
    };
    let mut rng = SeedTree::new(4).stream(Purpose::Learn, 0, 0);
    let mut state = spec.build(&mut rng).unwrap();
    let trace = state.run_learning(3000, 500, &mut rng).unwrap();
    assert!(trace.final_error().unwrap() < 8.0);
}
