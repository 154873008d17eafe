//! Physics of a single stochastic bistable junction.
//!
//! The junction hops between a parallel (P) and an anti-parallel (AP)
//! orientation. Leaving either state is a Poisson process whose escape rate
//! depends exponentially on the barrier height and on the applied voltage:
//!
//! ```text
//! phi_P  = phi0 * exp(-barrier * (1 + v / v_c))
//! phi_AP = phi0 * exp(-barrier * (1 - v / v_c))
//! ```
//!
//! Positive voltage destabilizes P. Energies are always carried in units of
//! the thermal energy, so temperature never appears on its own.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Attempt frequency used throughout, in 1/s.
pub const DEFAULT_ATTEMPT_FREQUENCY: f64 = 1e9;
/// Barrier of the neuron junctions, in units of k_B T.
pub const DEFAULT_NEURON_BARRIER: f64 = 6.0;
/// Critical voltage of the neuron junctions, in volts.
pub const DEFAULT_CRITICAL_VOLTAGE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionParams {
    /// phi0, in 1/s.
    pub attempt_frequency: f64,
    /// Delta E / k_B T.
    pub barrier: f64,
    /// V_c, in volts.
    pub critical_voltage: f64,
}

impl JunctionParams {
    pub fn new(attempt_frequency: f64, barrier: f64, critical_voltage: f64) -> Result<Self> {
        let checks = [
            ("attempt_frequency", attempt_frequency),
            ("barrier", barrier),
            ("critical_voltage", critical_voltage),
        ];
        for (name, value) in checks {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(format!(
                    "{name} must be finite and > 0, got {value}"
                )));
            }
        }
        Ok(Self {
            attempt_frequency,
            barrier,
            critical_voltage,
        })
    }

    /// Escape rates `(phi_P, phi_AP)` at net voltage `v`.
    #[inline]
    pub fn escape_rates(&self, v: f64) -> (f64, f64) {
        let x = v / self.critical_voltage;
        let p = self.attempt_frequency * (-self.barrier * (1.0 + x)).exp();
        let ap = self.attempt_frequency * (-self.barrier * (1.0 - x)).exp();
        (p, ap)
    }

    /// Mean flip rate at zero voltage, `phi0 * exp(-barrier)`.
    pub fn peak_rate(&self) -> f64 {
        self.attempt_frequency * (-self.barrier).exp()
    }
}

impl Default for JunctionParams {
    fn default() -> Self {
        Self {
            attempt_frequency: DEFAULT_ATTEMPT_FREQUENCY,
            barrier: DEFAULT_NEURON_BARRIER,
            critical_voltage: DEFAULT_CRITICAL_VOLTAGE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum JunctionState {
    Parallel,
    AntiParallel,
}

impl JunctionState {
    pub fn flipped(self) -> Self {
        match self {
            JunctionState::Parallel => JunctionState::AntiParallel,
            JunctionState::AntiParallel => JunctionState::Parallel,
        }
    }
}

/// Escape rate out of `state` at voltage `v`. No capping at phi0: when
/// `|v| > v_c` the destabilized state escapes faster than the attempt frequency.
pub fn escape_rate(params: &JunctionParams, state: JunctionState, v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::invalid(format!("voltage must be finite, got {v}")));
    }
    let (p, ap) = params.escape_rates(v);
    Ok(match state {
        JunctionState::Parallel => p,
        JunctionState::AntiParallel => ap,
    })
}

/// Probability that a Poisson process with `rate` fires at least once in `dt`.
pub fn switch_probability(rate: f64, dt: f64) -> Result<f64> {
    if !(rate >= 0.0) || !(dt >= 0.0) {
        return Err(Error::invalid(format!(
            "rate and dt must be non-negative, got rate={rate}, dt={dt}"
        )));
    }
    // -expm1(-x) keeps precision for tiny rate*dt; an infinite product saturates at 1.
    let x = rate * dt;
    if x.is_nan() {
        return Ok(0.0);
    }
    Ok(-(-x).exp_m1())
}

/// Stationary probability of the P state, `phi_AP / (phi_P + phi_AP)`.
pub fn stationary_p_probability(params: &JunctionParams, v: f64) -> f64 {
    // phi_P / phi_AP = exp(-2 * barrier * v / v_c)
    let log_ratio = -2.0 * params.barrier * v / params.critical_voltage;
    1.0 / (1.0 + log_ratio.exp())
}

/// Stationary mean flip rate, `2 phi_P phi_AP / (phi_P + phi_AP)`.
///
/// Equivalent to `phi0 * exp(-barrier) / cosh(barrier * v / v_c)`: a
/// bell-shaped tuning curve peaked at zero voltage.
pub fn mean_transition_rate(params: &JunctionParams, v: f64) -> f64 {
    params.peak_rate() / (params.barrier * v / params.critical_voltage).cosh()
}

/// Counts the flips of one junction during an observation window of length `t_obs`.
///
/// The initial orientation is drawn from the stationary distribution, then
/// exponential dwell times are drawn with the escape rate of the current
/// state until the window is exhausted.
pub fn simulate_window<R: Rng + ?Sized>(
    params: &JunctionParams,
    v: f64,
    t_obs: f64,
    rng: &mut R,
) -> u32 {
    let (rate_p, rate_ap) = params.escape_rates(v);
    let p_parallel = stationary_p_probability(params, v);
    simulate_window_with_rates(rate_p, rate_ap, p_parallel, t_obs, rng)
}

#[inline]
pub(crate) fn simulate_window_with_rates<R: Rng + ?Sized>(
    rate_p: f64,
    rate_ap: f64,
    p_parallel: f64,
    t_obs: f64,
    rng: &mut R,
) -> u32 {
    if !(t_obs > 0.0) {
        return 0;
    }
    let mut in_parallel = rng.random::<f64>() < p_parallel;
    let mut t = 0.0;
    let mut count = 0u32;
    loop {
        let rate = if in_parallel { rate_p } else { rate_ap };
        if rate <= 0.0 {
            return count;
        }
        let dwell: f64 = rng.sample::<f64, _>(Exp1) / rate;
        t += dwell;
        if t > t_obs {
            return count;
        }
        count += 1;
        in_parallel = !in_parallel;
    }
}

/// Simulates one long trajectory until `n_events` flips have occurred and
/// returns the elapsed time. Used to check the stationary flip rate.
pub fn time_for_transitions<R: Rng + ?Sized>(
    params: &JunctionParams,
    v: f64,
    n_events: u64,
    rng: &mut R,
) -> f64 {
    let (rate_p, rate_ap) = params.escape_rates(v);
    let mut in_parallel = rng.random::<f64>() < stationary_p_probability(params, v);
    let mut t = 0.0;
    for _ in 0..n_events {
        let rate = if in_parallel { rate_p } else { rate_ap };
        t += rng.sample::<f64, _>(Exp1) / rate;
        in_parallel = !in_parallel;
    }
    t
}
