//! A population of junction neurons tuned by a linear grid of bias voltages.
//!
//! Neuron `i` sees the net voltage `v_in - bias_i`, so its tuning curve peaks
//! when the input equals its own bias. That bias is also the label used by
//! the population-vector decoder.

use rand::Rng;

use crate::device::{self, JunctionParams};
use crate::error::{Error, Result};

/// Observation window used to count switches, in seconds.
pub const DEFAULT_OBSERVATION_TIME: f64 = 1e-5;
pub const DEFAULT_BIAS_MIN: f64 = -0.15;
pub const DEFAULT_BIAS_MAX: f64 = 0.15;

/// Firing rates of a population, in 1/s. Dead neurons hold exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RateVector(Vec<f64>);

impl RateVector {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if let Some(bad) = rates.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(Error::invalid(format!("rates must be finite and >= 0, got {bad}")));
        }
        Ok(Self(rates))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub(crate) fn from_vec_unchecked(rates: Vec<f64>) -> Self {
        debug_assert!(rates.iter().all(|r| *r >= 0.0));
        Self(rates)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Result of population-vector decoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decoded {
    pub volts: f64,
    /// Set when every rate was zero; `volts` is then the midpoint of the bias range.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    bias: Vec<f64>,
    alive: Vec<bool>,
    junction: JunctionParams,
    t_obs: f64,
}

impl Population {
    /// `n` neurons with biases evenly spaced over `[bias_min, bias_max]`, endpoints included.
    pub fn linear(
        n: usize,
        bias_min: f64,
        bias_max: f64,
        junction: JunctionParams,
        t_obs: f64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("population needs at least 2 neurons, got {n}")));
        }
        if !(bias_min.is_finite() && bias_max.is_finite() && bias_min < bias_max) {
            return Err(Error::invalid(format!(
                "bias range must satisfy min < max, got [{bias_min}, {bias_max}]"
            )));
        }
        if !(t_obs.is_finite() && t_obs > 0.0) {
            return Err(Error::invalid(format!("t_obs must be > 0, got {t_obs}")));
        }
        let step = (bias_max - bias_min) / (n - 1) as f64;
        let mut bias: Vec<f64> = (0..n).map(|i| bias_min + step * i as f64).collect();
        bias[n - 1] = bias_max;
        Ok(Self {
            bias,
            alive: vec![true; n],
            junction,
            t_obs,
        })
    }

    pub fn len(&self) -> usize {
        self.bias.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bias.is_empty()
    }

    pub fn biases(&self) -> &[f64] {
        &self.bias
    }

    pub fn alive_mask(&self) -> &[bool] {
        &self.alive
    }

    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|a| **a).count()
    }

    pub fn junction(&self) -> &JunctionParams {
        &self.junction
    }

    pub fn observation_time(&self) -> f64 {
        self.t_obs
    }

    pub fn bias_range(&self) -> (f64, f64) {
        (self.bias[0], self.bias[self.bias.len() - 1])
    }

    /// Marks neuron `i` as dead. Killing an already dead neuron is a no-op.
    pub fn kill(&mut self, i: usize) -> Result<()> {
        match self.alive.get_mut(i) {
            Some(flag) => {
                *flag = false;
                Ok(())
            }
            None => Err(Error::invalid(format!(
                "neuron index {i} out of range for population of {}",
                self.bias.len()
            ))),
        }
    }

    /// Counts switches of every alive neuron over one observation window and
    /// converts the counts to rates.
    pub fn measure_rates<R: Rng + ?Sized>(&self, v_in: f64, rng: &mut R) -> RateVector {
        let j = &self.junction;
        let rates = self
            .bias
            .iter()
            .zip(&self.alive)
            .map(|(&bias, &alive)| {
                if !alive {
                    return 0.0;
                }
                let v = v_in - bias;
                let (rate_p, rate_ap) = j.escape_rates(v);
                let p_parallel = device::stationary_p_probability(j, v);
                let count =
                    device::simulate_window_with_rates(rate_p, rate_ap, p_parallel, self.t_obs, rng);
                count as f64 / self.t_obs
            })
            .collect();
        RateVector::from_vec_unchecked(rates)
    }

    /// Measures then decodes: a round-trip diagnostic of the encoding.
    pub fn encode_check<R: Rng + ?Sized>(&self, v_in: f64, rng: &mut R) -> Decoded {
        let rates = self.measure_rates(v_in, rng);
        decode(&self.bias, &rates)
    }
}

/// Population-vector decoding: the rate-weighted mean of the bias voltages.
pub fn decode(biases: &[f64], rates: &RateVector) -> Decoded {
    debug_assert_eq!(biases.len(), rates.len());
    let (num, den) = biases
        .iter()
        .zip(rates.as_slice())
        .fold((0.0, 0.0), |(num, den), (&b, &r)| (num + b * r, den + r));
    let (lo, hi) = biases
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &b| (lo.min(b), hi.max(b)));
    if den > 0.0 {
        // Clamp guards against last-ulp rounding past the grid ends.
        Decoded {
            volts: (num / den).clamp(lo, hi),
            degenerate: false,
        }
    } else {
        Decoded {
            volts: 0.5 * (lo + hi),
            degenerate: true,
        }
    }
}
