//! The volatile synaptic store.
//!
//! Weights live as `n_bits`-wide integer codes spread evenly over
//! `[w_min, w_max]`. Updates are computed in real-value space and written back
//! by stochastic rounding, since a single learning increment is usually smaller
//! than one code step. Thermal volatility replaces a whole weight by a uniformly
//! random code.

use std::io::Write;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::RateVector;

pub const DEFAULT_N_BITS: u32 = 8;
pub const DEFAULT_W_MIN: f64 = 0.0;
pub const DEFAULT_W_MAX: f64 = 1.0;
/// Duration of one learning step, in seconds.
pub const DEFAULT_STEP_DURATION: f64 = 1e-5;

// Above this loss probability a plain Bernoulli sweep beats geometric skipping.
const DENSE_LOSS_THRESHOLD: f64 = 0.2;

/// Mapping between integer codes and real weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantizer {
    n_bits: u32,
    w_min: f64,
    w_max: f64,
    lsb: f64,
    inv_lsb: f64,
    table: Arc<[f64]>,
}

/// Outcome of a nearest-code conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rounded {
    pub code: u16,
    /// The input lay outside `[w_min, w_max]` and was clamped first.
    pub clamped: bool,
}

impl Quantizer {
    pub fn new(n_bits: u32, w_min: f64, w_max: f64) -> Result<Self> {
        if !(1..=16).contains(&n_bits) {
            return Err(Error::invalid(format!("n_bits must be in 1..=16, got {n_bits}")));
        }
        if !(w_min.is_finite() && w_max.is_finite() && w_min < w_max) {
            return Err(Error::invalid(format!(
                "weight range must satisfy min < max, got [{w_min}, {w_max}]"
            )));
        }
        let max_code = (1u32 << n_bits) - 1;
        let span = w_max - w_min;
        let table: Arc<[f64]> = (0..=max_code)
            .map(|c| w_min + span * (c as f64 / max_code as f64))
            .collect();
        Ok(Self {
            n_bits,
            w_min,
            w_max,
            lsb: span / max_code as f64,
            inv_lsb: max_code as f64 / span,
            table,
        })
    }

    pub fn n_bits(&self) -> u32 {
        self.n_bits
    }

    pub fn max_code(&self) -> u16 {
        (self.table.len() - 1) as u16
    }

    pub fn lsb(&self) -> f64 {
        self.lsb
    }

    pub fn range(&self) -> (f64, f64) {
        (self.w_min, self.w_max)
    }

    #[inline]
    pub fn value(&self, code: u16) -> f64 {
        self.table[code as usize]
    }

    /// Nearest code; ties round away from zero in code space.
    pub fn nearest(&self, value: f64) -> Rounded {
        let clamped = !(value >= self.w_min && value <= self.w_max);
        let v = if value.is_nan() { self.w_min } else { value.clamp(self.w_min, self.w_max) };
        let x = ((v - self.w_min) / self.lsb).round();
        Rounded {
            code: (x as u32).min(self.max_code() as u32) as u16,
            clamped,
        }
    }

    /// Stochastic rounding: picks the upper neighbour with probability equal
    /// to the fractional position, so the written value is unbiased.
    #[inline]
    pub fn stochastic<R: Rng + ?Sized>(&self, value: f64, rng: &mut R) -> u16 {
        let v = value.clamp(self.w_min, self.w_max);
        let x = (v - self.w_min) * self.inv_lsb;
        let lower = x.floor();
        let frac = x - lower;
        let mut code = lower as u32;
        if frac > 0.0 && rng.random::<f64>() < frac {
            code += 1;
        }
        code.min(self.max_code() as u32) as u16
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Quantized(Vec<u16>),
    Analog(Vec<f64>),
}

/// Dense `n_in x n_out` weight matrix, row-major (row = input neuron).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n_in: usize,
    n_out: usize,
    quantizer: Quantizer,
    storage: Storage,
    weight_barrier: f64,
}

/// Parameters of the trial-and-error weight update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateRule {
    /// Learning rate.
    pub alpha: f64,
    /// Rate normalization, in 1/s.
    pub f0: f64,
    /// Half-width of the accepted band around the target, in volts.
    pub window: f64,
}

impl WeightMatrix {
    /// Matrix with every weight drawn uniformly. Quantized storage draws
    /// uniform codes; analog storage draws uniform reals.
    pub fn random<R: Rng + ?Sized>(
        n_in: usize,
        n_out: usize,
        quantizer: Quantizer,
        analog: bool,
        weight_barrier: f64,
        rng: &mut R,
    ) -> Result<Self> {
        Self::check_dims(n_in, n_out)?;
        check_barrier(weight_barrier)?;
        let n = n_in * n_out;
        let storage = if analog {
            let (lo, hi) = quantizer.range();
            Storage::Analog((0..n).map(|_| rng.random_range(lo..=hi)).collect())
        } else {
            let shift = 32 - quantizer.n_bits();
            Storage::Quantized((0..n).map(|_| (rng.next_u32() >> shift) as u16).collect())
        };
        Ok(Self {
            n_in,
            n_out,
            quantizer,
            storage,
            weight_barrier,
        })
    }

    /// Matrix from row-major real values. Quantized storage rounds each to the nearest code.
    pub fn from_values(
        n_in: usize,
        n_out: usize,
        values: &[f64],
        quantizer: Quantizer,
        analog: bool,
        weight_barrier: f64,
    ) -> Result<Self> {
        Self::check_dims(n_in, n_out)?;
        check_barrier(weight_barrier)?;
        if values.len() != n_in * n_out {
            return Err(Error::invalid(format!(
                "expected {} values, got {}",
                n_in * n_out,
                values.len()
            )));
        }
        let storage = if analog {
            let (lo, hi) = quantizer.range();
            Storage::Analog(values.iter().map(|v| v.clamp(lo, hi)).collect())
        } else {
            Storage::Quantized(values.iter().map(|&v| quantizer.nearest(v).code).collect())
        };
        Ok(Self {
            n_in,
            n_out,
            quantizer,
            storage,
            weight_barrier,
        })
    }

    fn check_dims(n_in: usize, n_out: usize) -> Result<()> {
        if n_in == 0 || n_out == 0 {
            return Err(Error::invalid("weight matrix dimensions must be non-zero"));
        }
        Ok(())
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n_in, self.n_out)
    }

    pub fn quantizer(&self) -> &Quantizer {
        &self.quantizer
    }

    pub fn is_analog(&self) -> bool {
        matches!(self.storage, Storage::Analog(_))
    }

    /// Delta E_w / k_B T of the storing junctions; infinite means non-volatile.
    pub fn weight_barrier(&self) -> f64 {
        self.weight_barrier
    }

    pub fn len(&self) -> usize {
        self.n_in * self.n_out
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let k = i * self.n_out + j;
        match &self.storage {
            Storage::Quantized(codes) => self.quantizer.value(codes[k]),
            Storage::Analog(values) => values[k],
        }
    }

    /// Raw codes, or `None` for analog storage.
    pub fn codes(&self) -> Option<&[u16]> {
        match &self.storage {
            Storage::Quantized(codes) => Some(codes),
            Storage::Analog(_) => None,
        }
    }

    /// All weights as real values, row-major.
    pub fn values(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Quantized(codes) => codes.iter().map(|&c| self.quantizer.value(c)).collect(),
            Storage::Analog(values) => values.clone(),
        }
    }

    /// Output rates from input rates: `r_out_j = max(0, sum_i W_ij r_in_i)`,
    /// zero for dead outputs.
    pub fn transform(&self, r_in: &RateVector, output_alive: &[bool]) -> Result<RateVector> {
        if r_in.len() != self.n_in || output_alive.len() != self.n_out {
            return Err(Error::invalid(format!(
                "dimension mismatch: matrix {}x{}, r_in {}, output mask {}",
                self.n_in,
                self.n_out,
                r_in.len(),
                output_alive.len()
            )));
        }
        let mut acc = vec![0.0; self.n_out];
        for (i, &r) in r_in.as_slice().iter().enumerate() {
            if r == 0.0 {
                continue;
            }
            let row = i * self.n_out..(i + 1) * self.n_out;
            match &self.storage {
                Storage::Quantized(codes) => {
                    for (a, &c) in acc.iter_mut().zip(&codes[row]) {
                        *a += self.quantizer.value(c) * r;
                    }
                }
                Storage::Analog(values) => {
                    for (a, &w) in acc.iter_mut().zip(&values[row]) {
                        *a += w * r;
                    }
                }
            }
        }
        for (a, &alive) in acc.iter_mut().zip(output_alive) {
            if !alive || !(*a > 0.0) {
                *a = 0.0;
            }
        }
        Ok(RateVector::from_vec_unchecked(acc))
    }

    /// One trial-and-error update. Returns `true` when the output missed the
    /// target window and the weights were written.
    ///
    /// When the output is above the target, columns whose bias lies above the
    /// output are decreased and those below are increased; the signs flip when
    /// the output is below the target. A column whose bias equals the output is
    /// left alone. Each touched entry becomes `(W ± alpha r_i / f0) / (1 + alpha)`.
    #[allow(clippy::too_many_arguments)]
    pub fn update_weights<R: Rng + ?Sized>(
        &mut self,
        r_in: &RateVector,
        v_out: f64,
        v_target: f64,
        output_biases: &[f64],
        rule: &UpdateRule,
        rng: &mut R,
    ) -> Result<bool> {
        if !(rule.alpha >= 0.0 && rule.f0 > 0.0) {
            return Err(Error::invalid(format!(
                "update rule needs alpha >= 0 and f0 > 0, got alpha={}, f0={}",
                rule.alpha, rule.f0
            )));
        }
        if r_in.len() != self.n_in || output_biases.len() != self.n_out {
            return Err(Error::invalid("dimension mismatch in update_weights"));
        }
        if (v_out - v_target).abs() <= rule.window {
            return Ok(false);
        }
        let too_high = v_out > v_target;
        let signs: Vec<f64> = output_biases
            .iter()
            .map(|&b| {
                let above = b > v_out;
                let below = b < v_out;
                match (above, below, too_high) {
                    (true, _, true) | (_, true, false) => -1.0,
                    (_, true, true) | (true, _, false) => 1.0,
                    _ => 0.0,
                }
            })
            .collect();
        let shrink = 1.0 / (1.0 + rule.alpha);
        let (lo, hi) = self.quantizer.range();
        let n_out = self.n_out;
        match &mut self.storage {
            Storage::Quantized(codes) => {
                let q = &self.quantizer;
                for (i, &r) in r_in.as_slice().iter().enumerate() {
                    let step = rule.alpha * r / rule.f0;
                    let row = &mut codes[i * n_out..(i + 1) * n_out];
                    for (c, &s) in row.iter_mut().zip(&signs) {
                        if s == 0.0 {
                            continue;
                        }
                        let target = ((q.value(*c) + s * step) * shrink).clamp(lo, hi);
                        *c = q.stochastic(target, rng);
                    }
                }
            }
            Storage::Analog(values) => {
                for (i, &r) in r_in.as_slice().iter().enumerate() {
                    let step = rule.alpha * r / rule.f0;
                    let row = &mut values[i * n_out..(i + 1) * n_out];
                    for (w, &s) in row.iter_mut().zip(&signs) {
                        if s == 0.0 {
                            continue;
                        }
                        *w = ((*w + s * step) * shrink).clamp(lo, hi);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Independently per weight, with probability `p_loss`, replaces it by a
    /// uniformly random value. Returns the number of randomized weights.
    pub fn apply_weight_loss<R: Rng + ?Sized>(&mut self, p_loss: f64, rng: &mut R) -> Result<usize> {
        if !(0.0..=1.0).contains(&p_loss) {
            return Err(Error::invalid(format!("p_loss must be in [0, 1], got {p_loss}")));
        }
        if p_loss == 0.0 {
            return Ok(0);
        }
        let n = self.len();
        let shift = 32 - self.quantizer.n_bits();
        let (lo, hi) = self.quantizer.range();
        // The code count is a power of two, so the top bits of a u32 are uniform over codes.
        let mut randomize = |k: usize, rng: &mut R| match &mut self.storage {
            Storage::Quantized(codes) => codes[k] = (rng.next_u32() >> shift) as u16,
            Storage::Analog(values) => values[k] = rng.random_range(lo..=hi),
        };
        if p_loss == 1.0 {
            for k in 0..n {
                randomize(k, rng);
            }
            return Ok(n);
        }
        if p_loss >= DENSE_LOSS_THRESHOLD {
            let mut count = 0;
            for k in 0..n {
                if rng.random::<f64>() < p_loss {
                    randomize(k, rng);
                    count += 1;
                }
            }
            return Ok(count);
        }
        // Gaps between successive Bernoulli successes are geometric.
        let log_q = (-p_loss).ln_1p();
        let mut k = 0usize;
        let mut count = 0usize;
        loop {
            let u: f64 = rng.random();
            let gap = ((1.0 - u).ln() / log_q).floor();
            if !(gap < (n - k) as f64) {
                break;
            }
            k += gap as usize;
            randomize(k, rng);
            count += 1;
            k += 1;
            if k >= n {
                break;
            }
        }
        Ok(count)
    }

    /// Writes decoded weights as CSV: one line per input neuron, one column per output neuron.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<String> = (0..self.n_out).map(|j| format!("out_{j}")).collect();
        writeln!(out, "#{}", header.join(","))?;
        for i in 0..self.n_in {
            let row: Vec<String> = (0..self.n_out).map(|j| self.get(i, j).to_string()).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn check_barrier(barrier: f64) -> Result<()> {
    if !(barrier > 0.0) {
        return Err(Error::invalid(format!("weight barrier must be > 0, got {barrier}")));
    }
    Ok(())
}

/// Inputs to the per-step weight loss probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossParams {
    /// Delta t, in seconds.
    pub step_duration: f64,
    /// Binary junctions per weight.
    pub n_bits: u32,
    /// phi0, in 1/s.
    pub attempt_frequency: f64,
    /// Delta E_w / k_B T. `f64::INFINITY` disables loss.
    pub weight_barrier: f64,
}

impl LossParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_duration > 0.0 && self.attempt_frequency > 0.0 && self.n_bits > 0) {
            return Err(Error::invalid(format!("loss parameters must be positive: {self:?}")));
        }
        check_barrier(self.weight_barrier)
    }
}

/// Probability that a weight loses its content during one learning step:
/// `1 - exp(-n_bits dt phi0 exp(-barrier))`.
pub fn weight_loss_probability(p: &LossParams) -> f64 {
    let hazard =
        p.n_bits as f64 * p.step_duration * p.attempt_frequency * (-p.weight_barrier).exp();
    -(-hazard).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q8() -> Quantizer {
        Quantizer::new(8, -1.0, 1.0).unwrap()
    }

    fn loss(barrier: f64) -> LossParams {
        LossParams {
            step_duration: 1e-5,
            n_bits: 8,
            attempt_frequency: 1e9,
            weight_barrier: barrier,
        }
    }

    #[test]
    fn loss_probability_closed_form() {
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        // 1 - exp(-8e4 * exp(-15)), 1 - exp(-8e4 * exp(-20))
        assert!(rel(weight_loss_probability(&loss(15.0)), 2.417_516_951_606_756e-2) < 1e-6);
        assert!(rel(weight_loss_probability(&loss(20.0)), 1.648_786_958_086_591_5e-4) < 1e-6);
        assert_eq!(weight_loss_probability(&loss(f64::INFINITY)), 0.0);
        assert!(weight_loss_probability(&loss(1e4)) < 1e-300);
    }

    #[test]
    fn quantizer_endpoints() {
        let q = q8();
        assert_eq!(q.nearest(-1.0).code, 0);
        assert_eq!(q.value(0), -1.0);
        assert_eq!(q.nearest(1.0).code, 255);
        assert_eq!(q.value(255), 1.0);
        let r = q.nearest(1.7);
        assert!(r.clamped);
        assert_eq!(r.code, 255);
        assert!(!q.nearest(0.3).clamped);
        assert!(Quantizer::new(0, -1.0, 1.0).is_err());
        assert!(Quantizer::new(8, 1.0, 1.0).is_err());
    }

    #[test]
    fn nearest_round_trip_within_half_lsb() {
        let q = q8();
        for k in 0..=2000 {
            let v = -1.0 + 2.0 * k as f64 / 2000.0;
            let back = q.value(q.nearest(v).code);
            assert!((back - v).abs() <= 0.5 * q.lsb() + 1e-15);
        }
    }

    #[test]
    fn stochastic_rounding_splits_midpoint() {
        let q = q8();
        let mid = 0.5 * (q.value(100) + q.value(101));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let ups = (0..n).filter(|_| q.stochastic(mid, &mut rng) == 101).count();
        // 99% binomial interval around n/2
        let sd = (n as f64 * 0.25).sqrt();
        assert!((ups as f64 - n as f64 / 2.0).abs() < 2.576 * sd, "ups={ups}");
        assert_eq!(q.stochastic(q.value(42), &mut rng), 42);
    }

    #[test]
    fn transform_examples() {
        let q = Quantizer::new(8, 0.0, 1.0).unwrap();
        let eye = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let w = WeightMatrix::from_values(3, 3, &eye, q.clone(), false, f64::INFINITY).unwrap();
        let r = RateVector::new(vec![1.5e6, 0.0, 2e6]).unwrap();
        assert_eq!(w.transform(&r, &[true; 3]).unwrap(), r);

        let zero = WeightMatrix::from_values(3, 3, &[0.0; 9], q.clone(), false, 1e9).unwrap();
        assert_eq!(zero.transform(&r, &[true; 3]).unwrap(), RateVector::zeros(3));

        let w = WeightMatrix::from_values(2, 1, &[0.5, 0.25], q8(), true, f64::INFINITY).unwrap();
        let out = w.transform(&RateVector::new(vec![2e6, 4e6]).unwrap(), &[true]).unwrap();
        assert_eq!(out.as_slice(), &[2e6]);

        assert!(w.transform(&RateVector::zeros(3), &[true]).is_err());
    }

    #[test]
    fn transform_clamps_negative_and_dead_outputs() {
        let w =
            WeightMatrix::from_values(1, 3, &[-0.5, 0.5, 0.5], q8(), true, f64::INFINITY).unwrap();
        let out = w.transform(&RateVector::new(vec![10.0]).unwrap(), &[true, true, false]).unwrap();
        assert_eq!(out.as_slice(), &[0.0, 5.0, 0.0]);
    }

    fn rule() -> UpdateRule {
        UpdateRule {
            alpha: 0.001,
            f0: 1.0,
            window: 0.01,
        }
    }

    #[test]
    fn inside_window_leaves_matrix_untouched() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut w = WeightMatrix::random(4, 3, q8(), false, f64::INFINITY, &mut rng).unwrap();
        let before = w.clone();
        let r = RateVector::new(vec![1.0; 4]).unwrap();
        let updated =
            w.update_weights(&r, 0.05, 0.045, &[-0.1, 0.0, 0.1], &rule(), &mut rng).unwrap();
        assert!(!updated);
        assert_eq!(w, before);
    }

    #[test]
    fn analog_update_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        // Two inputs (r/f0 = 1 and 0), three outputs with biases below, at and above v_out.
        let mut w = WeightMatrix::from_values(2, 3, &[0.5; 6], q8(), true, f64::INFINITY).unwrap();
        let r = RateVector::new(vec![1.0, 0.0]).unwrap();
        // Output above target.
        assert!(w.update_weights(&r, 0.0, -0.1, &[-0.1, 0.0, 0.1], &rule(), &mut rng).unwrap());
        assert!((w.get(0, 0) - 0.501 / 1.001).abs() < 1e-15);
        assert!((w.get(0, 0) - 0.500_499_500_499_500_5).abs() < 1e-12);
        assert_eq!(w.get(0, 1), 0.5);
        assert!((w.get(0, 2) - 0.499 / 1.001).abs() < 1e-15);
        // zero-rate row only decays
        assert!((w.get(1, 0) - 0.5 / 1.001).abs() < 1e-15);
        assert!((w.get(1, 2) - 0.5 / 1.001).abs() < 1e-15);

        // Output below target flips the signs.
        let mut w = WeightMatrix::from_values(2, 3, &[0.5; 6], q8(), true, f64::INFINITY).unwrap();
        w.update_weights(&r, 0.0, 0.1, &[-0.1, 0.0, 0.1], &rule(), &mut rng).unwrap();
        assert!((w.get(0, 0) - 0.499 / 1.001).abs() < 1e-15);
        assert!((w.get(0, 2) - 0.501 / 1.001).abs() < 1e-15);
    }

    #[test]
    fn quantized_update_is_unbiased() {
        let q = q8();
        let start = q.value(160);
        let r = RateVector::new(vec![1.0]).unwrap();
        let rule = UpdateRule {
            alpha: 0.001,
            f0: 1.0,
            window: 0.0,
        };
        let expected = (start + 0.001) / 1.001;
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let n = 50_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let mut w = WeightMatrix::from_values(1, 1, &[start], q.clone(), false, 1e9).unwrap();
            w.update_weights(&r, 0.0, -0.1, &[-0.1], &rule, &mut rng).unwrap();
            let v = w.get(0, 0);
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        let se = (var / n as f64).sqrt();
        assert!((mean - expected).abs() < 4.0 * se + 1e-12, "mean={mean} expected={expected}");
    }

    #[test]
    fn loss_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let mut w = WeightMatrix::random(10, 10, q8(), false, 15.0, &mut rng).unwrap();
        let before = w.clone();
        assert_eq!(w.apply_weight_loss(0.0, &mut rng).unwrap(), 0);
        assert_eq!(w, before);
        assert_eq!(w.apply_weight_loss(1.0, &mut rng).unwrap(), 100);
        assert!(w.apply_weight_loss(1.5, &mut rng).is_err());
        assert!(w.apply_weight_loss(-0.1, &mut rng).is_err());
    }

    #[test]
    fn full_randomization_centres_the_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let mut w = WeightMatrix::from_values(100, 100, &[1.0; 10_000], q8(), false, 1.0).unwrap();
        let mut total = 0.0;
        for _ in 0..20 {
            w.apply_weight_loss(1.0, &mut rng).unwrap();
            total += w.values().iter().sum::<f64>();
        }
        let mean = total / 200_000.0;
        // uniform codes: sd of one weight ~0.577
        assert!(mean.abs() < 4.0 * 0.578 / (200_000f64).sqrt(), "mean={mean}");
    }

    #[test]
    fn loss_count_matches_binomial() {
        let p = 0.024_175_169_516_067_56;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut w = WeightMatrix::random(100, 100, q8(), false, 15.0, &mut rng).unwrap();
        let count = w.apply_weight_loss(p, &mut rng).unwrap() as f64;
        let mean = 10_000.0 * p;
        let sd = (mean * (1.0 - p)).sqrt();
        assert!((count - mean).abs() < 2.576 * sd, "count={count}");
    }

    #[test]
    fn weight_csv_shape() {
        let w = WeightMatrix::from_values(2, 3, &[0.0; 6], q8(), true, 1.0).unwrap();
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "#out_0,out_1,out_2");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 3);
    }
}
