//! Fault-injection experiments and the power/precision trade-off.
//!
//! Three drivers live here: neuron death followed by continued training,
//! learning with volatile weights of various barrier heights, and a sweep over
//! population size and weight barrier that feeds the write-power model and the
//! Pareto frontier.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learning::{steady_state_stats, RunTrace, SystemSpec, SystemState};
use crate::seeding::{Purpose, SeedTree};
use crate::stats;
use crate::synapse;

/// Loss of a fixed fraction of both populations at a given step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronLossEvent {
    pub at_step: u64,
    /// Fraction of each population's original size that dies.
    pub loss_fraction: f64,
}

/// Indices of the neurons killed in each population.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Victims {
    pub input: Vec<usize>,
    pub output: Vec<usize>,
}

/// Number of neurons removed from a population of `n` at `fraction`.
pub fn loss_count(n: usize, fraction: f64) -> usize {
    (fraction * n as f64).round() as usize
}

fn pick_victims<R: Rng + ?Sized>(alive: &[bool], count: usize, rng: &mut R) -> Result<Vec<usize>> {
    let candidates: Vec<usize> = (0..alive.len()).filter(|&i| alive[i]).collect();
    if count > candidates.len() {
        return Err(Error::invalid(format!(
            "cannot kill {count} neurons, only {} alive",
            candidates.len()
        )));
    }
    let mut picked: Vec<usize> = index::sample(rng, candidates.len(), count)
        .into_iter()
        .map(|k| candidates[k])
        .collect();
    picked.sort_unstable();
    Ok(picked)
}

/// Kills the same fraction of both populations, chosen uniformly without
/// replacement among the living. Weights are not touched.
pub fn inject_neuron_loss<R: Rng + ?Sized>(
    state: &mut SystemState,
    loss_fraction: f64,
    rng: &mut R,
) -> Result<Victims> {
    if !(0.0..1.0).contains(&loss_fraction) {
        return Err(Error::invalid(format!(
            "loss_fraction must be in [0, 1), got {loss_fraction}"
        )));
    }
    let input = pick_victims(
        state.input.alive_mask(),
        loss_count(state.input.len(), loss_fraction),
        rng,
    )?;
    let output = pick_victims(
        state.output.alive_mask(),
        loss_count(state.output.len(), loss_fraction),
        rng,
    )?;
    let victims = Victims { input, output };
    kill_neurons(state, &victims)?;
    Ok(victims)
}

/// Applies a known victim set. Idempotent.
pub fn kill_neurons(state: &mut SystemState, victims: &Victims) -> Result<()> {
    for &i in &victims.input {
        state.input.kill(i)?;
    }
    for &j in &victims.output {
        state.output.kill(j)?;
    }
    Ok(())
}

/// Mean error curve across instances at one evaluation checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub step: u64,
    pub mean: f64,
    pub sem: f64,
}

/// Averages the evaluation series of several runs that share a schedule.
pub fn mean_curve(traces: &[RunTrace]) -> Result<Vec<CurvePoint>> {
    let first = traces
        .first()
        .ok_or_else(|| Error::invalid("no traces to average"))?;
    let n = first.evals.len();
    if traces.iter().any(|t| t.evals.len() != n) {
        return Err(Error::invalid("traces have different evaluation schedules"));
    }
    Ok((0..n)
        .map(|k| {
            let xs: Vec<f64> = traces.iter().map(|t| t.evals[k].error_pct).collect();
            CurvePoint {
                step: first.evals[k].step,
                mean: stats::mean(&xs),
                sem: stats::sem(&xs),
            }
        })
        .collect())
}

/// First checkpoint, counted from the curve's first step, at which the mean
/// error is at or below `level`.
pub fn steps_to_level(curve: &[CurvePoint], level: f64) -> Option<u64> {
    let start = curve.first()?.step;
    curve.iter().find(|p| p.mean <= level).map(|p| p.step - start)
}

fn par_collect<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

fn steady_errors(traces: &[RunTrace], tail_fraction: f64) -> Result<Vec<f64>> {
    traces
        .iter()
        .map(|t| steady_state_stats(t, tail_fraction).map(|s| s.mean_error))
        .collect()
}

/// Which neurons a fresh reduced-population baseline keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineLayout {
    /// Fresh weights on the same surviving neurons as the matching recovery
    /// instance, so the two runs differ only in their starting weights.
    #[default]
    Survivors,
    /// Fresh system with `n_alive` neurons evenly spaced over the bias range.
    Even,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossRecoveryConfig {
    pub fractions: Vec<f64>,
    pub pretrain_steps: u64,
    pub recovery_steps: u64,
    /// Length of the fresh reduced-population baseline runs.
    pub baseline_steps: u64,
    pub baseline_layout: BaselineLayout,
    pub eval_every: u64,
    pub instances: u32,
    pub tail_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct FractionOutcome {
    pub fraction: f64,
    /// Alive neurons per population after the loss.
    pub n_alive: usize,
    /// Training continued after the loss, one per instance. The first
    /// evaluation is the error right after the loss.
    pub recovery: Vec<RunTrace>,
    /// Fresh systems built at the reduced size.
    pub baseline: Vec<RunTrace>,
}

#[derive(Debug, Clone)]
pub struct LossRecoveryResult {
    /// Pre-loss training, shared by every fraction.
    pub pretrain: Vec<RunTrace>,
    pub fractions: Vec<FractionOutcome>,
}

/// Pretrains full-size systems, then for each loss fraction kills neurons and
/// keeps training; alongside, trains fresh systems of the reduced size.
pub fn run_loss_recovery(
    spec: &SystemSpec,
    cfg: &LossRecoveryConfig,
    seeds: SeedTree,
) -> Result<LossRecoveryResult> {
    if cfg.instances == 0 {
        return Err(Error::invalid("instances must be > 0"));
    }
    if spec.n_in != spec.n_out {
        return Err(Error::invalid("loss recovery expects equal population sizes"));
    }
    let pretrained: Vec<(SystemState, RunTrace)> = par_collect(cfg.instances as usize, |k| {
        let mut rng = seeds.stream(Purpose::Learn, 0, k as u32);
        let mut state = spec.build(&mut rng)?;
        let trace = state.run_learning(cfg.pretrain_steps, cfg.eval_every, &mut rng)?;
        Ok((state, trace))
    })?;

    let mut fractions = Vec::with_capacity(cfg.fractions.len());
    for (f_idx, &fraction) in cfg.fractions.iter().enumerate() {
        let cell = f_idx as u64;
        let recovered = par_collect(cfg.instances as usize, |k| {
            let mut rng = seeds.stream(Purpose::Recovery, cell, k as u32);
            let mut state = pretrained[k].0.clone();
            let victims = inject_neuron_loss(&mut state, fraction, &mut rng)?;
            let trace = state.run_learning(cfg.recovery_steps, cfg.eval_every, &mut rng)?;
            Ok((trace, victims))
        })?;
        let n_alive = spec.n_in - loss_count(spec.n_in, fraction);
        let reduced = spec.clone().with_size(n_alive);
        let baseline = par_collect(cfg.instances as usize, |k| {
            let mut rng = seeds.stream(Purpose::Baseline, cell, k as u32);
            let mut state = match cfg.baseline_layout {
                BaselineLayout::Even => reduced.build(&mut rng)?,
                BaselineLayout::Survivors => {
                    let mut s = spec.build(&mut rng)?;
                    kill_neurons(&mut s, &recovered[k].1)?;
                    s
                }
            };
            state.run_learning(cfg.baseline_steps, cfg.eval_every, &mut rng)
        })?;
        let recovery = recovered.into_iter().map(|(t, _)| t).collect();
        fractions.push(FractionOutcome {
            fraction,
            n_alive,
            recovery,
            baseline,
        });
    }
    Ok(LossRecoveryResult {
        pretrain: pretrained.into_iter().map(|(_, t)| t).collect(),
        fractions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionSummary {
    pub fraction: f64,
    pub n_alive: usize,
    /// Untrained error of the full system.
    pub initial_error: f64,
    /// Error at the end of pretraining.
    pub pretrained_error: f64,
    /// Error right after the loss.
    pub post_loss_error: f64,
    pub recovery_steady: f64,
    pub baseline_steady: f64,
    /// Steps after the loss until the mean curve is within `margin` of the baseline steady state.
    pub recovery_steps_to_level: Option<u64>,
    /// Steps of fresh training until the baseline curve is within `margin` of its steady state.
    pub baseline_steps_to_level: Option<u64>,
}

pub fn summarize_loss_recovery(
    result: &LossRecoveryResult,
    tail_fraction: f64,
    margin: f64,
) -> Result<Vec<FractionSummary>> {
    let pre = mean_curve(&result.pretrain)?;
    let initial_error = pre.first().map(|p| p.mean).unwrap_or(f64::NAN);
    let pretrained_error = pre.last().map(|p| p.mean).unwrap_or(f64::NAN);
    result
        .fractions
        .iter()
        .map(|f| {
            let rec = mean_curve(&f.recovery)?;
            let base = mean_curve(&f.baseline)?;
            let recovery_steady = stats::mean(&steady_errors(&f.recovery, tail_fraction)?);
            let baseline_steady = stats::mean(&steady_errors(&f.baseline, tail_fraction)?);
            let level = baseline_steady + margin;
            Ok(FractionSummary {
                fraction: f.fraction,
                n_alive: f.n_alive,
                initial_error,
                pretrained_error,
                post_loss_error: rec[0].mean,
                recovery_steady,
                baseline_steady,
                recovery_steps_to_level: steps_to_level(&rec, level),
                baseline_steps_to_level: steps_to_level(&base, level),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightLossConfig {
    /// Weight barriers in units of k_B T; `f64::INFINITY` is the no-loss case.
    pub barriers: Vec<f64>,
    pub steps: u64,
    pub eval_every: u64,
    pub instances: u32,
    pub tail_fraction: f64,
}

#[derive(Debug, Clone)]
pub struct BarrierOutcome {
    pub barrier: f64,
    pub p_loss: f64,
    pub traces: Vec<RunTrace>,
}

/// Trains independent instances at each weight barrier. Instance `k` starts
/// from the same random stream at every barrier, so the no-loss case
/// reproduces a plain learning run exactly.
pub fn run_weight_loss(
    spec: &SystemSpec,
    cfg: &WeightLossConfig,
    seeds: SeedTree,
) -> Result<Vec<BarrierOutcome>> {
    if cfg.instances == 0 {
        return Err(Error::invalid("instances must be > 0"));
    }
    cfg.barriers
        .iter()
        .map(|&barrier| {
            let s = spec.clone().with_weight_barrier(barrier);
            let p_loss = synapse::weight_loss_probability(&s.loss_params());
            let traces = par_collect(cfg.instances as usize, |k| {
                let mut rng = seeds.stream(Purpose::Learn, 0, k as u32);
                let mut state = s.build(&mut rng)?;
                state.run_learning(cfg.steps, cfg.eval_every, &mut rng)
            })?;
            Ok(BarrierOutcome {
                barrier,
                p_loss,
                traces,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarrierSummary {
    pub barrier: f64,
    pub p_loss: f64,
    pub initial_error: f64,
    pub steady_errors: Vec<f64>,
    pub steady_mean: f64,
    pub steady_sem: f64,
    pub r_update: f64,
    /// Welch test against the no-loss steady errors, when a no-loss run is present.
    pub p_value_vs_no_loss: Option<f64>,
}

pub fn summarize_weight_loss(
    outcomes: &[BarrierOutcome],
    tail_fraction: f64,
) -> Result<Vec<BarrierSummary>> {
    let mut out: Vec<BarrierSummary> = outcomes
        .iter()
        .map(|o| {
            let steady: Vec<_> = o
                .traces
                .iter()
                .map(|t| steady_state_stats(t, tail_fraction))
                .collect::<Result<_>>()?;
            let errors: Vec<f64> = steady.iter().map(|s| s.mean_error).collect();
            let updates: Vec<f64> = steady.iter().map(|s| s.r_update).collect();
            let initial: Vec<f64> = o
                .traces
                .iter()
                .filter_map(|t| t.evals.first().map(|e| e.error_pct))
                .collect();
            Ok(BarrierSummary {
                barrier: o.barrier,
                p_loss: o.p_loss,
                initial_error: stats::mean(&initial),
                steady_mean: stats::mean(&errors),
                steady_sem: stats::sem(&errors),
                r_update: stats::mean(&updates),
                steady_errors: errors,
                p_value_vs_no_loss: None,
            })
        })
        .collect::<Result<_>>()?;
    if let Some(reference) = out.iter().find(|s| s.barrier.is_infinite()).cloned() {
        for s in out.iter_mut() {
            s.p_value_vs_no_loss = Some(stats::welch_p_value(&s.steady_errors, &reference.steady_errors));
        }
    }
    Ok(out)
}

/// Smallest finite barrier from which every higher finite barrier is
/// statistically indistinguishable from the no-loss case at level `alpha`.
pub fn reliability_threshold(summaries: &[BarrierSummary], alpha: f64) -> Option<f64> {
    let mut finite: Vec<&BarrierSummary> = summaries
        .iter()
        .filter(|s| s.barrier.is_finite() && s.p_value_vs_no_loss.is_some())
        .collect();
    finite.sort_by(|a, b| a.barrier.total_cmp(&b.barrier));
    let mut threshold = None;
    for s in finite.iter().rev() {
        if s.p_value_vs_no_loss.is_some_and(|p| p > alpha) {
            threshold = Some(s.barrier);
        } else {
            break;
        }
    }
    threshold
}

/// Write activity times synapse count times per-write cost: `R_update N^2 barrier^2`.
pub fn power_factor(r_update: f64, n_neurons: usize, barrier: f64) -> f64 {
    let n = n_neurons as f64;
    r_update * n * n * barrier * barrier
}

/// One cell of the size/barrier sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPoint {
    pub n_neurons: usize,
    pub weight_barrier: f64,
    /// Mean steady-state error, percent.
    pub error_pct: f64,
    /// Spread of the steady error across instances.
    pub error_std: f64,
    pub r_update: f64,
    pub normalized_power: f64,
}

/// Power of `point` relative to `reference`.
pub fn normalized_power(point: &PowerPoint, reference: &PowerPoint) -> Result<f64> {
    let denom = power_factor(reference.r_update, reference.n_neurons, reference.weight_barrier);
    if !(denom > 0.0) {
        return Err(Error::Degenerate(format!(
            "reference cell N={} barrier={} has zero update rate",
            reference.n_neurons, reference.weight_barrier
        )));
    }
    Ok(power_factor(point.r_update, point.n_neurons, point.weight_barrier) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierPoint {
    /// Lower edge of the error bin, percent.
    pub error_bin: f64,
    pub power_min: f64,
    pub n_opt: usize,
    pub barrier_opt: f64,
    pub error_pct: f64,
    pub error_std: f64,
}

/// Minimum-power configuration per error bin, restricted to non-dominated
/// points (no other point has both lower error and lower power).
pub fn extract_frontier(points: &[PowerPoint], bin_width: f64) -> Vec<FrontierPoint> {
    let mut sorted: Vec<&PowerPoint> = points.iter().collect();
    sorted.sort_by(|a, b| {
        a.error_pct
            .total_cmp(&b.error_pct)
            .then(a.normalized_power.total_cmp(&b.normalized_power))
    });
    let mut pareto: Vec<&PowerPoint> = Vec::new();
    let mut best_power = f64::INFINITY;
    for p in sorted {
        if p.normalized_power < best_power {
            best_power = p.normalized_power;
            pareto.push(p);
        }
    }
    let mut frontier: Vec<FrontierPoint> = Vec::new();
    for p in pareto {
        let bin = (p.error_pct / bin_width).floor() * bin_width;
        match frontier.last_mut() {
            Some(last) if last.error_bin == bin => {
                if p.normalized_power < last.power_min {
                    *last = frontier_point(bin, p);
                }
            }
            _ => frontier.push(frontier_point(bin, p)),
        }
    }
    frontier
}

fn frontier_point(bin: f64, p: &PowerPoint) -> FrontierPoint {
    FrontierPoint {
        error_bin: bin,
        power_min: p.normalized_power,
        n_opt: p.n_neurons,
        barrier_opt: p.weight_barrier,
        error_pct: p.error_pct,
        error_std: p.error_std,
    }
}

/// Cheapest swept configuration whose error does not exceed `max_error`.
pub fn optimum_for_error(points: &[PowerPoint], max_error: f64) -> Option<PowerPoint> {
    points
        .iter()
        .filter(|p| p.error_pct <= max_error)
        .min_by(|a, b| a.normalized_power.total_cmp(&b.normalized_power))
        .copied()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n_list: Vec<usize>,
    pub barriers: Vec<f64>,
    pub steps: u64,
    pub eval_every: u64,
    pub instances: u32,
    pub tail_fraction: f64,
    pub bin_width: f64,
    pub reference_n: usize,
    pub reference_barrier: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub points: Vec<PowerPoint>,
    pub reference: PowerPoint,
    pub frontier: Vec<FrontierPoint>,
}

/// Raw per-cell statistics before normalization.
fn sweep_cell(
    spec: &SystemSpec,
    n: usize,
    barrier: f64,
    cfg: &SweepConfig,
    seeds: SeedTree,
) -> Result<PowerPoint> {
    let s = spec.clone().with_size(n).with_weight_barrier(barrier);
    let steady = par_collect(cfg.instances as usize, |k| {
        // Keyed by N only: every barrier at a given size shares initial conditions.
        let mut rng = seeds.stream(Purpose::Sweep, n as u64, k as u32);
        let mut state = s.build(&mut rng)?;
        let trace = state.run_learning(cfg.steps, cfg.eval_every, &mut rng)?;
        steady_state_stats(&trace, cfg.tail_fraction)
    })?;
    let errors: Vec<f64> = steady.iter().map(|s| s.mean_error).collect();
    let updates: Vec<f64> = steady.iter().map(|s| s.r_update).collect();
    Ok(PowerPoint {
        n_neurons: n,
        weight_barrier: barrier,
        error_pct: stats::mean(&errors),
        error_std: stats::std_dev(&errors),
        r_update: stats::mean(&updates),
        normalized_power: f64::NAN,
    })
}

/// Runs every `(N, barrier)` cell to steady state, normalizes the power by the
/// reference cell and extracts the frontier.
pub fn pareto_sweep(spec: &SystemSpec, cfg: &SweepConfig, seeds: SeedTree) -> Result<SweepResult> {
    if cfg.n_list.is_empty() || cfg.barriers.is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    if cfg.instances == 0 {
        return Err(Error::invalid("instances must be > 0"));
    }
    if !(cfg.bin_width > 0.0) {
        return Err(Error::invalid("bin_width must be > 0"));
    }
    let mut points = Vec::with_capacity(cfg.n_list.len() * cfg.barriers.len());
    for &n in &cfg.n_list {
        for &barrier in &cfg.barriers {
            points.push(sweep_cell(spec, n, barrier, cfg, seeds)?);
        }
    }
    let mut reference = match points
        .iter()
        .find(|p| p.n_neurons == cfg.reference_n && p.weight_barrier == cfg.reference_barrier)
    {
        Some(p) => *p,
        None => sweep_cell(spec, cfg.reference_n, cfg.reference_barrier, cfg, seeds)?,
    };
    for p in points.iter_mut() {
        p.normalized_power = normalized_power(p, &reference)?;
    }
    reference.normalized_power = 1.0;
    let frontier = extract_frontier(&points, cfg.bin_width);
    Ok(SweepResult {
        points,
        reference,
        frontier,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn point(n: usize, barrier: f64, error: f64, r: f64) -> PowerPoint {
        PowerPoint {
            n_neurons: n,
            weight_barrier: barrier,
            error_pct: error,
            error_std: 0.1,
            r_update: r,
            normalized_power: f64::NAN,
        }
    }

    #[test]
    fn power_normalization() {
        let reference = point(100, 20.0, 2.0, 0.1);
        assert_eq!(normalized_power(&reference, &reference).unwrap(), 1.0);
        let p = normalized_power(&point(54, 12.0, 3.0, 0.1), &reference).unwrap();
        assert!((p - 0.104_976).abs() < 1e-12);
        assert_eq!(normalized_power(&point(54, 12.0, 3.0, 0.0), &reference).unwrap(), 0.0);
        assert!(normalized_power(&reference, &point(100, 20.0, 2.0, 0.0)).is_err());
    }

    #[test]
    fn single_point_frontier() {
        let mut p = point(50, 12.0, 3.1, 0.2);
        p.normalized_power = 0.4;
        let f = extract_frontier(&[p], 0.25);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].n_opt, 50);
        assert_eq!(f[0].barrier_opt, 12.0);
        assert_eq!(f[0].error_bin, 3.0);
        assert_eq!(f[0].power_min, 0.4);
    }

    #[test]
    fn frontier_drops_dominated_points() {
        let mk = |n, b, e, pw| {
            let mut p = point(n, b, e, 0.1);
            p.normalized_power = pw;
            p
        };
        let pts = [
            mk(100, 20.0, 2.0, 1.0),
            mk(50, 20.0, 2.6, 0.3),
            mk(50, 14.0, 2.7, 0.5), // dominated by the previous point
            mk(25, 12.0, 4.0, 0.05),
            mk(25, 14.0, 4.1, 0.06), // dominated
        ];
        let f = extract_frontier(&pts, 0.25);
        let ns: Vec<usize> = f.iter().map(|p| p.n_opt).collect();
        assert_eq!(ns, vec![100, 50, 25]);
        assert!(f.windows(2).all(|w| w[1].power_min <= w[0].power_min));
        assert_eq!(optimum_for_error(&pts, 3.0).unwrap().n_neurons, 50);
        assert!(optimum_for_error(&pts, 1.0).is_none());
    }

    #[test]
    fn neuron_loss_counts() {
        let spec = SystemSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut state = spec.build(&mut rng).unwrap();
        let untouched = state.clone();
        let v = inject_neuron_loss(&mut state, 0.0, &mut rng).unwrap();
        assert!(v.input.is_empty() && v.output.is_empty());
        assert_eq!(state.input, untouched.input);

        let v = inject_neuron_loss(&mut state, 0.8, &mut rng).unwrap();
        assert_eq!(state.input.alive_count(), 20);
        assert_eq!(state.output.alive_count(), 20);
        assert_eq!(v.input.len(), 80);
        assert_eq!(state.weights, untouched.weights);
        // a second 80 % loss needs 80 more alive neurons than remain
        assert!(inject_neuron_loss(&mut state, 0.8, &mut rng).is_err());
        assert!(inject_neuron_loss(&mut state, 1.0, &mut rng).is_err());
    }

    #[test]
    fn kill_is_idempotent() {
        let spec = SystemSpec::default().with_size(20);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut a = spec.build(&mut rng).unwrap();
        let victims = inject_neuron_loss(&mut a, 0.4, &mut rng).unwrap();
        let once = a.clone();
        kill_neurons(&mut a, &victims).unwrap();
        assert_eq!(a.input, once.input);
        assert_eq!(a.output, once.output);
    }

    #[test]
    fn steps_to_level_counts_from_segment_start() {
        let curve = [
            CurvePoint { step: 100, mean: 10.0, sem: 0.0 },
            CurvePoint { step: 150, mean: 5.0, sem: 0.0 },
            CurvePoint { step: 200, mean: 2.0, sem: 0.0 },
        ];
        assert_eq!(steps_to_level(&curve, 5.0), Some(50));
        assert_eq!(steps_to_level(&curve, 1.0), None);
    }

    #[test]
    fn threshold_scans_from_the_top() {
        let mk = |b: f64, p: f64| BarrierSummary {
            barrier: b,
            p_loss: 0.0,
            initial_error: 30.0,
            steady_errors: vec![],
            steady_mean: 0.0,
            steady_sem: 0.0,
            r_update: 0.0,
            p_value_vs_no_loss: Some(p),
        };
        let s = [mk(10.0, 0.0), mk(20.0, 0.5), mk(15.0, 0.001), mk(25.0, 0.3), mk(f64::INFINITY, 1.0)];
        assert_eq!(reliability_threshold(&s, 0.01), Some(20.0));
        assert_eq!(reliability_threshold(&s[..1], 0.01), None);
    }
}
