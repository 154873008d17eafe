//! Continuous trial-and-error learning of a nonlinear transformation.
//!
//! Each step draws a random input, runs it through the two populations, and
//! nudges the weights only when the decoded output misses the target by more
//! than the tolerance window. Weight volatility is applied after every step.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::device::JunctionParams;
use crate::error::{Error, Result};
use crate::population::{self, Decoded, Population, RateVector};
use crate::synapse::{self, LossParams, Quantizer, UpdateRule, WeightMatrix};

pub const DEFAULT_ALPHA: f64 = 0.001;
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.05;
pub const DEFAULT_V_MAX: f64 = 0.1;
pub const DEFAULT_EVAL_POINTS: usize = 50;

/// How the sine target is parenthesized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TargetConvention {
    /// `v_max * sin(pi * v / v_max)`: one full period over the input range.
    #[default]
    FullPeriod,
    /// `v_max * sin(v / (v_max * pi))`: nearly linear over the input range.
    Literal,
}

#[derive(Clone)]
pub enum TargetFunction {
    Sine {
        v_max: f64,
        convention: TargetConvention,
    },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl TargetFunction {
    pub fn eval(&self, v_in: f64) -> f64 {
        match self {
            TargetFunction::Sine {
                v_max,
                convention: TargetConvention::FullPeriod,
            } => v_max * (std::f64::consts::PI * v_in / v_max).sin(),
            TargetFunction::Sine {
                v_max,
                convention: TargetConvention::Literal,
            } => v_max * (v_in / (v_max * std::f64::consts::PI)).sin(),
            TargetFunction::Custom(f) => f(v_in),
        }
    }
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetFunction::Sine { v_max, convention } => f
                .debug_struct("Sine")
                .field("v_max", v_max)
                .field("convention", convention)
                .finish(),
            TargetFunction::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LearningConfig {
    pub alpha: f64,
    /// Tolerance half-width as a fraction of `output_range`.
    pub window_fraction: f64,
    /// Duration of one learning step, in seconds.
    pub step_duration: f64,
    /// Rate normalization in the update rule, in 1/s.
    pub f0: f64,
    /// Inputs are drawn from `[-v_max, v_max]`.
    pub v_max: f64,
    /// Width of the output codomain used for the window and the error, in volts.
    pub output_range: f64,
    pub target: TargetFunction,
    pub eval_points: usize,
}

impl LearningConfig {
    /// Defaults tied to the neuron junction: `f0` is its peak mean rate.
    pub fn for_junction(junction: &JunctionParams) -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            window_fraction: DEFAULT_WINDOW_FRACTION,
            step_duration: synapse::DEFAULT_STEP_DURATION,
            f0: junction.peak_rate(),
            v_max: DEFAULT_V_MAX,
            output_range: 2.0 * DEFAULT_V_MAX,
            target: TargetFunction::Sine {
                v_max: DEFAULT_V_MAX,
                convention: TargetConvention::FullPeriod,
            },
            eval_points: DEFAULT_EVAL_POINTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::invalid(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.window_fraction > 0.0 && self.window_fraction < 1.0) {
            return Err(Error::invalid(format!(
                "window_fraction must be in (0, 1), got {}",
                self.window_fraction
            )));
        }
        let positive = [
            ("step_duration", self.step_duration),
            ("f0", self.f0),
            ("v_max", self.v_max),
            ("output_range", self.output_range),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if self.eval_points < 2 {
            return Err(Error::invalid("eval_points must be at least 2"));
        }
        Ok(())
    }

    pub fn window(&self) -> f64 {
        self.window_fraction * self.output_range
    }

    pub fn target(&self, v_in: f64) -> f64 {
        self.target.eval(v_in)
    }

    /// Evenly spaced evaluation inputs spanning the input range.
    pub fn eval_grid(&self) -> Vec<f64> {
        let n = self.eval_points;
        (0..n)
            .map(|k| -self.v_max + 2.0 * self.v_max * k as f64 / (n - 1) as f64)
            .collect()
    }

    fn update_rule(&self) -> UpdateRule {
        UpdateRule {
            alpha: self.alpha,
            f0: self.f0,
            window: self.window(),
        }
    }
}

/// Everything needed to build a fresh system; experiments stamp out many of these.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub n_in: usize,
    pub n_out: usize,
    pub junction: JunctionParams,
    pub bias_min: f64,
    pub bias_max: f64,
    pub t_obs: f64,
    pub n_bits: u32,
    pub w_min: f64,
    pub w_max: f64,
    /// `f64::INFINITY` for non-volatile weights.
    pub weight_barrier: f64,
    pub analog: bool,
    pub learning: LearningConfig,
}

impl Default for SystemSpec {
    fn default() -> Self {
        let junction = JunctionParams::default();
        Self {
            n_in: 100,
            n_out: 100,
            junction,
            bias_min: population::DEFAULT_BIAS_MIN,
            bias_max: population::DEFAULT_BIAS_MAX,
            t_obs: population::DEFAULT_OBSERVATION_TIME,
            n_bits: synapse::DEFAULT_N_BITS,
            w_min: synapse::DEFAULT_W_MIN,
            w_max: synapse::DEFAULT_W_MAX,
            weight_barrier: f64::INFINITY,
            analog: false,
            learning: LearningConfig::for_junction(&junction),
        }
    }
}

impl SystemSpec {
    pub fn with_size(mut self, n: usize) -> Self {
        self.n_in = n;
        self.n_out = n;
        self
    }

    pub fn with_weight_barrier(mut self, barrier: f64) -> Self {
        self.weight_barrier = barrier;
        self
    }

    pub fn loss_params(&self) -> LossParams {
        LossParams {
            step_duration: self.learning.step_duration,
            n_bits: self.n_bits,
            attempt_frequency: self.junction.attempt_frequency,
            weight_barrier: self.weight_barrier,
        }
    }

    /// Builds a system with uniformly random initial weights.
    pub fn build<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SystemState> {
        let input = Population::linear(self.n_in, self.bias_min, self.bias_max, self.junction, self.t_obs)?;
        let output = Population::linear(self.n_out, self.bias_min, self.bias_max, self.junction, self.t_obs)?;
        let quantizer = Quantizer::new(self.n_bits, self.w_min, self.w_max)?;
        let weights = WeightMatrix::random(
            self.n_in,
            self.n_out,
            quantizer,
            self.analog,
            self.weight_barrier,
            rng,
        )?;
        SystemState::new(input, output, weights, self.learning.clone(), self.loss_params())
    }
}

/// Two populations joined by a weight matrix, plus the learning setup.
#[derive(Debug, Clone)]
pub struct SystemState {
    pub input: Population,
    pub output: Population,
    pub weights: WeightMatrix,
    pub config: LearningConfig,
    loss: LossParams,
    p_loss: f64,
    steps_done: u64,
}

/// Result of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    pub v_out: f64,
    pub degenerate: bool,
    pub r_in: RateVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub v_in: f64,
    pub v_out: f64,
    pub v_target: f64,
    pub degenerate: bool,
    /// The target was missed and the weights were written.
    pub updated: bool,
    pub loss_count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSample {
    /// Number of learning steps completed when the error was evaluated.
    pub step: u64,
    pub error_pct: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    pub steps: Vec<StepRecord>,
    pub evals: Vec<ErrorSample>,
}

impl RunTrace {
    /// Appends a later segment of the same run.
    pub fn extend(&mut self, other: RunTrace) {
        self.steps.extend(other.steps);
        self.evals.extend(other.evals);
    }

    pub fn final_error(&self) -> Option<f64> {
        self.evals.last().map(|e| e.error_pct)
    }

    /// CSV of the per-step records.
    pub fn write_steps_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "#step,v_in,v_out,v_target,missed,loss_count")?;
        for r in &self.steps {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.step, r.v_in, r.v_out, r.v_target, r.updated as u8, r.loss_count
            )?;
        }
        Ok(())
    }

    /// CSV of the periodic error evaluations.
    pub fn write_evals_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "#step,error_pct")?;
        for e in &self.evals {
            writeln!(out, "{},{}", e.step, e.error_pct)?;
        }
        Ok(())
    }
}

impl SystemState {
    pub fn new(
        input: Population,
        output: Population,
        weights: WeightMatrix,
        config: LearningConfig,
        loss: LossParams,
    ) -> Result<Self> {
        config.validate()?;
        loss.validate()?;
        if weights.dims() != (input.len(), output.len()) {
            return Err(Error::invalid(format!(
                "weight matrix {:?} does not match populations ({}, {})",
                weights.dims(),
                input.len(),
                output.len()
            )));
        }
        let p_loss = synapse::weight_loss_probability(&loss);
        Ok(Self {
            input,
            output,
            weights,
            config,
            loss,
            p_loss,
            steps_done: 0,
        })
    }

    pub fn loss_params(&self) -> &LossParams {
        &self.loss
    }

    /// Per-weight, per-step probability of losing the stored value.
    pub fn p_loss(&self) -> f64 {
        self.p_loss
    }

    pub fn steps_done(&self) -> u64 {
        self.steps_done
    }

    /// Observation phase (stochastic input rates), computing phase (weighted
    /// sum), then population decoding of the output rates.
    pub fn forward<R: Rng + ?Sized>(&self, v_in: f64, rng: &mut R) -> Forward {
        let r_in = self.input.measure_rates(v_in, rng);
        let r_out = self
            .weights
            .transform(&r_in, self.output.alive_mask())
            .expect("dimensions are checked at construction");
        let Decoded { volts, degenerate } = population::decode(self.output.biases(), &r_out);
        Forward {
            v_out: volts,
            degenerate,
            r_in,
        }
    }

    /// One learning step on a uniformly drawn input.
    pub fn learning_step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> StepRecord {
        let v_in = rng.random_range(-self.config.v_max..=self.config.v_max);
        let v_target = self.config.target(v_in);
        let fwd = self.forward(v_in, rng);
        let mut rule = self.config.update_rule();
        if fwd.degenerate {
            rule.window = f64::NEG_INFINITY;
        }
        let updated = self
            .weights
            .update_weights(&fwd.r_in, fwd.v_out, v_target, self.output.biases(), &rule, rng)
            .expect("validated rule and dimensions");
        let loss_count = self
            .weights
            .apply_weight_loss(self.p_loss, rng)
            .expect("p_loss is a probability") as u32;
        self.steps_done += 1;
        StepRecord {
            step: self.steps_done,
            v_in,
            v_out: fwd.v_out,
            v_target,
            degenerate: fwd.degenerate,
            updated,
            loss_count,
        }
    }

    /// Mean |output - target| over the evaluation grid, in percent of the
    /// output range. Never touches the weights.
    pub fn evaluate_error<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let pairs: Vec<(f64, f64)> = self
            .config
            .eval_grid()
            .into_iter()
            .map(|v| (self.forward(v, rng).v_out, self.config.target(v)))
            .collect();
        error_percent(&pairs, self.config.output_range)
    }

    /// Output against target over the evaluation grid: `(v_in, v_target, v_out)`.
    pub fn transfer_curve<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<(f64, f64, f64)> {
        self.config
            .eval_grid()
            .into_iter()
            .map(|v| (v, self.config.target(v), self.forward(v, rng).v_out))
            .collect()
    }

    /// Runs `n_steps` learning steps, evaluating the error before the first
    /// step, every `eval_every` steps, and after the last one.
    ///
    /// Evaluation draws from its own stream, seeded once from `rng`, so the
    /// evaluation cadence does not perturb the learning trajectory.
    pub fn run_learning<R: Rng + ?Sized>(
        &mut self,
        n_steps: u64,
        eval_every: u64,
        rng: &mut R,
    ) -> Result<RunTrace> {
        if n_steps == 0 || eval_every == 0 {
            return Err(Error::invalid("n_steps and eval_every must be > 0"));
        }
        let mut eval_rng = ChaCha8Rng::seed_from_u64(rng.next_u64());
        let mut trace = RunTrace {
            steps: Vec::with_capacity(n_steps as usize),
            evals: Vec::with_capacity((n_steps / eval_every) as usize + 2),
        };
        trace.evals.push(ErrorSample {
            step: self.steps_done,
            error_pct: self.evaluate_error(&mut eval_rng),
        });
        for k in 1..=n_steps {
            trace.steps.push(self.learning_step(rng));
            if k % eval_every == 0 || k == n_steps {
                trace.evals.push(ErrorSample {
                    step: self.steps_done,
                    error_pct: self.evaluate_error(&mut eval_rng),
                });
            }
        }
        Ok(trace)
    }
}

/// Mean absolute deviation of `(output, target)` pairs in percent of `output_range`.
pub fn error_percent(pairs: &[(f64, f64)], output_range: f64) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let total: f64 = pairs.iter().map(|(out, target)| (out - target).abs()).sum();
    100.0 * total / pairs.len() as f64 / output_range
}

/// Steady-state summary of the tail of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Mean evaluated error over the tail, in percent.
    pub mean_error: f64,
    /// Fraction of tail steps that wrote the weights.
    pub r_update: f64,
    pub tail_steps: usize,
    pub tail_evals: usize,
}

/// Mean error and update rate over the last `tail_fraction` of the steps.
pub fn steady_state_stats(trace: &RunTrace, tail_fraction: f64) -> Result<SteadyState> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::invalid(format!(
            "tail_fraction must be in (0, 1], got {tail_fraction}"
        )));
    }
    let n = trace.steps.len();
    let k = (n as f64 * tail_fraction).ceil() as usize;
    if k == 0 {
        return Err(Error::invalid("tail window is empty"));
    }
    let tail = &trace.steps[n - k..];
    // Evaluations taken once the first tail step has run.
    let boundary = tail[0].step - 1;
    let errors: Vec<f64> = trace
        .evals
        .iter()
        .filter(|e| e.step > boundary)
        .map(|e| e.error_pct)
        .collect();
    if errors.is_empty() {
        return Err(Error::invalid("no error evaluations inside the tail window"));
    }
    Ok(SteadyState {
        mean_error: errors.iter().sum::<f64>() / errors.len() as f64,
        r_update: tail.iter().filter(|r| r.updated).count() as f64 / k as f64,
        tail_steps: k,
        tail_evals: errors.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> LearningConfig {
        LearningConfig::for_junction(&JunctionParams::default())
    }

    #[test]
    fn sine_target_values() {
        let c = cfg();
        assert_eq!(c.target(0.0), 0.0);
        assert!((c.target(0.05) - 0.1).abs() < 1e-15);
        assert!(c.target(0.1).abs() < 1e-15);
        let literal = TargetFunction::Sine {
            v_max: 0.1,
            convention: TargetConvention::Literal,
        };
        assert!((literal.eval(0.1) - 0.1 * (1.0 / std::f64::consts::PI).sin()).abs() < 1e-15);
        let custom = TargetFunction::Custom(Arc::new(|v| 0.5 * v));
        assert_eq!(custom.eval(0.08), 0.04);
    }

    #[test]
    fn config_validation() {
        let mut c = cfg();
        assert!(c.validate().is_ok());
        c.window_fraction = 1.0;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.f0 = 0.0;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.eval_points = 1;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.alpha = -1e-3;
        assert!(c.validate().is_err());
    }

    #[test]
    fn f0_defaults_to_peak_rate() {
        assert!((cfg().f0 - 2.478_752_176_666_358e6).abs() < 1e-6);
        assert!((cfg().window() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn error_percent_oracles() {
        let c = cfg();
        let grid = c.eval_grid();
        assert_eq!(grid.len(), 50);
        assert_eq!(grid[0], -0.1);
        assert!((grid[49] - 0.1).abs() < 1e-15);
        let perfect: Vec<(f64, f64)> = grid.iter().map(|&v| (c.target(v), c.target(v))).collect();
        assert_eq!(error_percent(&perfect, 0.2), 0.0);
        // Output stuck at zero: mean |sin| = 2/pi over a full period.
        let n = 100_001;
        let zero: Vec<(f64, f64)> = (0..n)
            .map(|k| -0.1 + 0.2 * k as f64 / (n - 1) as f64)
            .map(|v| (0.0, c.target(v)))
            .collect();
        let e = error_percent(&zero, 0.2);
        assert!((e - 100.0 / std::f64::consts::PI).abs() < 1e-3, "e={e}");
    }

    #[test]
    fn evaluation_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let state = SystemSpec::default().with_size(30).build(&mut rng).unwrap();
        let before = state.weights.clone();
        let e = state.evaluate_error(&mut rng);
        assert!((0.0..=100.0).contains(&e));
        assert_eq!(state.weights, before);
    }

    #[test]
    fn dead_inputs_decode_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut state = SystemSpec::default().with_size(10).build(&mut rng).unwrap();
        for i in 0..10 {
            state.input.kill(i).unwrap();
        }
        let fwd = state.forward(0.02, &mut rng);
        assert!(fwd.degenerate);
        assert_eq!(fwd.v_out, 0.0);
        // A degenerate forward always counts as a miss.
        let rec = state.learning_step(&mut rng);
        assert!(rec.degenerate && rec.updated);
    }

    #[test]
    fn identity_weights_reproduce_input() {
        let spec = SystemSpec {
            w_min: 0.0,
            w_max: 1.0,
            ..SystemSpec::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut state = spec.build(&mut rng).unwrap();
        let eye: Vec<f64> = (0..100 * 100).map(|k| if k / 100 == k % 100 { 1.0 } else { 0.0 }).collect();
        state.weights =
            WeightMatrix::from_values(100, 100, &eye, state.weights.quantizer().clone(), false, f64::INFINITY)
                .unwrap();
        for v in [-0.08, 0.0, 0.03, 0.09] {
            let xs: Vec<f64> = (0..400).map(|_| state.forward(v, &mut rng).v_out).collect();
            let m = crate::stats::mean(&xs);
            let se = crate::stats::sem(&xs);
            // identity weights reduce to a plain population round trip
            let rates: Vec<f64> = state
                .input
                .biases()
                .iter()
                .map(|b| crate::device::mean_transition_rate(state.input.junction(), v - b))
                .collect();
            let oracle = population::decode(state.output.biases(), &RateVector::new(rates).unwrap()).volts;
            assert!((m - oracle).abs() < 4.0 * se, "v={v} mean={m} oracle={oracle}");
            assert!((m - v).abs() < 3e-3);
        }
    }

    #[test]
    fn same_seed_same_trace() {
        let spec = SystemSpec::default().with_size(20).with_weight_barrier(14.0);
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = spec.build(&mut rng).unwrap();
            s.run_learning(300, 50, &mut rng).unwrap()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn hits_without_loss_leave_weights_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let mut state = SystemSpec::default().with_size(40).build(&mut rng).unwrap();
        state.run_learning(1500, 500, &mut rng).unwrap();
        let mut hits = 0;
        for _ in 0..300 {
            let before = state.weights.clone();
            let rec = state.learning_step(&mut rng);
            assert_eq!(rec.loss_count, 0);
            if !rec.updated {
                hits += 1;
                assert_eq!(state.weights, before);
            }
            assert!((rec.v_out - rec.v_target).abs() <= state.config.window() || rec.updated);
        }
        assert!(hits > 0);
    }

    #[test]
    fn update_follows_sign_rule() {
        let spec = SystemSpec {
            analog: true,
            ..SystemSpec::default().with_size(30)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let mut state = spec.build(&mut rng).unwrap();
        let (alpha, f0) = (state.config.alpha, state.config.f0);
        let (lo, hi) = (spec.w_min, spec.w_max);
        let mut checked = 0;
        for _ in 0..200 {
            let before = state.weights.clone();
            let mut probe = rng.clone();
            let rec = state.learning_step(&mut rng);
            if !rec.updated || rec.degenerate {
                continue;
            }
            // Replay the forward pass to recover the measured input rates.
            let _ = probe.random_range(-0.1..=0.1);
            let r_in = state.input.measure_rates(rec.v_in, &mut probe);
            for (j, &b) in state.output.biases().iter().enumerate() {
                let sign = match (b > rec.v_out, b < rec.v_out, rec.v_out > rec.v_target) {
                    (true, _, true) | (_, true, false) => -1.0,
                    (_, true, true) | (true, _, false) => 1.0,
                    _ => 0.0,
                };
                for (i, &r) in r_in.as_slice().iter().enumerate() {
                    let old = before.get(i, j);
                    let expected = if sign == 0.0 {
                        old
                    } else {
                        ((old + sign * alpha * r / f0) / (1.0 + alpha)).clamp(lo, hi)
                    };
                    assert!((state.weights.get(i, j) - expected).abs() < 1e-15);
                    if sign < 0.0 && r > 0.0 {
                        assert!(state.weights.get(i, j) < old / (1.0 + alpha) || old <= lo + 1e-12);
                    }
                }
            }
            checked += 1;
        }
        assert!(checked > 10);
    }

    #[test]
    fn zero_learning_rate_does_not_learn() {
        let mut spec = SystemSpec::default().with_size(40);
        spec.learning.alpha = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let mut state = spec.build(&mut rng).unwrap();
        let trace = state.run_learning(1000, 100, &mut rng).unwrap();
        let first = trace.evals[0].error_pct;
        for e in &trace.evals {
            assert!((e.error_pct - first).abs() < 5.0, "{} vs {first}", e.error_pct);
        }
    }

    fn record(step: u64, updated: bool) -> StepRecord {
        StepRecord {
            step,
            v_in: 0.0,
            v_out: 0.0,
            v_target: 0.0,
            degenerate: false,
            updated,
            loss_count: 0,
        }
    }

    #[test]
    fn steady_state_counting() {
        let evals = (0..=10).map(|k| ErrorSample { step: 10 * k, error_pct: k as f64 }).collect();
        let all = RunTrace {
            steps: (1..=100).map(|s| record(s, true)).collect(),
            evals,
        };
        let s = steady_state_stats(&all, 0.2).unwrap();
        assert_eq!(s.r_update, 1.0);
        assert_eq!(s.tail_steps, 20);
        assert_eq!(s.tail_evals, 2);
        assert_eq!(s.mean_error, 9.5);

        let mut none = all.clone();
        none.steps.iter_mut().for_each(|r| r.updated = false);
        assert_eq!(steady_state_stats(&none, 0.2).unwrap().r_update, 0.0);

        let mut alt = all.clone();
        alt.steps.iter_mut().for_each(|r| r.updated = r.step % 2 == 0);
        assert_eq!(steady_state_stats(&alt, 0.2).unwrap().r_update, 0.5);

        assert!(steady_state_stats(&RunTrace::default(), 0.2).is_err());
        assert!(steady_state_stats(&all, 0.0).is_err());
    }

    #[test]
    fn trace_csv_headers() {
        let t = RunTrace {
            steps: vec![record(1, true)],
            evals: vec![ErrorSample { step: 0, error_pct: 12.5 }],
        };
        let mut a = Vec::new();
        t.write_steps_csv(&mut a).unwrap();
        assert_eq!(String::from_utf8(a).unwrap(), "#step,v_in,v_out,v_target,missed,loss_count\n1,0,0,0,1,0\n");
        let mut b = Vec::new();
        t.write_evals_csv(&mut b).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "#step,error_pct\n0,12.5\n");
    }
}
