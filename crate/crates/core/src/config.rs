//! Experiment configuration files.
//!
//! Files are TOML (or the same structure in JSON when the name ends in
//! `.json`). Every section and key is optional and falls back to the
//! defaults below; unknown keys are rejected so typos fail loudly.
//!
//! ```toml
//! [device]
//! phi0_hz = 1e9
//! delta_e_neuron_kt = 6.0
//! v_c_volts = 0.1
//!
//! [weights]
//! n_bits = 8
//! delta_e_weight_kt = 25.0   # omit for non-volatile weights
//!
//! [run]
//! steps = 4050
//! instances = 50
//! seed = 1
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::device::{self, JunctionParams};
use crate::error::{Error, Result};
use crate::learning::{LearningConfig, SystemSpec, TargetConvention, TargetFunction};
use crate::population;
use crate::reliability::{BaselineLayout, LossRecoveryConfig, SweepConfig, WeightLossConfig};
use crate::synapse;

/// Step count used by the weight-loss and sweep experiments when unset.
pub const DEFAULT_LONG_RUN_STEPS: u64 = 6000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceSection {
    pub phi0_hz: f64,
    pub delta_e_neuron_kt: f64,
    pub v_c_volts: f64,
}

impl Default for DeviceSection {
    fn default() -> Self {
        Self {
            phi0_hz: device::DEFAULT_ATTEMPT_FREQUENCY,
            delta_e_neuron_kt: device::DEFAULT_NEURON_BARRIER,
            v_c_volts: device::DEFAULT_CRITICAL_VOLTAGE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PopulationSection {
    pub n_in: usize,
    pub n_out: usize,
    pub bias_min_v: f64,
    pub bias_max_v: f64,
    pub t_obs_s: f64,
}

impl Default for PopulationSection {
    fn default() -> Self {
        Self {
            n_in: 100,
            n_out: 100,
            bias_min_v: population::DEFAULT_BIAS_MIN,
            bias_max_v: population::DEFAULT_BIAS_MAX,
            t_obs_s: population::DEFAULT_OBSERVATION_TIME,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightsSection {
    pub n_bits: u32,
    pub w_min: f64,
    pub w_max: f64,
    /// Absent means non-volatile weights.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_e_weight_kt: Option<f64>,
    pub analog_mode: bool,
}

impl Default for WeightsSection {
    fn default() -> Self {
        Self {
            n_bits: synapse::DEFAULT_N_BITS,
            w_min: synapse::DEFAULT_W_MIN,
            w_max: synapse::DEFAULT_W_MAX,
            delta_e_weight_kt: None,
            analog_mode: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LearningSection {
    pub alpha: f64,
    pub window_fraction: f64,
    pub step_dt_s: f64,
    /// Absent means the neuron peak rate `phi0 exp(-delta_e_neuron)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0_hz: Option<f64>,
    pub v_max: f64,
    /// Absent means `2 v_max`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_range_v: Option<f64>,
    pub target_convention: TargetConvention,
    pub eval_points: usize,
}

impl Default for LearningSection {
    fn default() -> Self {
        Self {
            alpha: crate::learning::DEFAULT_ALPHA,
            window_fraction: crate::learning::DEFAULT_WINDOW_FRACTION,
            step_dt_s: synapse::DEFAULT_STEP_DURATION,
            f0_hz: None,
            v_max: crate::learning::DEFAULT_V_MAX,
            output_range_v: None,
            target_convention: TargetConvention::FullPeriod,
            eval_points: crate::learning::DEFAULT_EVAL_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub steps: u64,
    pub eval_every: u64,
    pub instances: u32,
    pub seed: u64,
    pub tail_fraction: f64,
    /// Worker threads; 0 uses every core. Results do not depend on it, so
    /// it is never written to outputs or manifests.
    #[serde(skip_serializing)]
    pub workers: usize,
    /// Write per-instance step and error traces.
    pub write_traces: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            steps: 4050,
            eval_every: 50,
            instances: 50,
            seed: 1,
            tail_fraction: 0.2,
            workers: 0,
            write_traces: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuningSection {
    pub v_min: f64,
    pub v_max: f64,
    pub points: usize,
    pub windows: u64,
}

impl Default for TuningSection {
    fn default() -> Self {
        Self {
            v_min: -0.2,
            v_max: 0.2,
            points: 41,
            windows: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NeuronLossSection {
    pub fractions: Vec<f64>,
    pub pretrain_steps: u64,
    pub recovery_steps: u64,
    /// Absent means `pretrain_steps + recovery_steps`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_steps: Option<u64>,
    pub baseline_layout: BaselineLayout,
    /// Distance to the baseline steady state that counts as recovered, in percentage points.
    pub margin_pct: f64,
}

impl Default for NeuronLossSection {
    fn default() -> Self {
        Self {
            fractions: vec![0.2, 0.4, 0.6, 0.8],
            pretrain_steps: 4000,
            recovery_steps: 4000,
            baseline_steps: None,
            baseline_layout: BaselineLayout::Survivors,
            margin_pct: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightLossSection {
    /// Finite barriers; a no-loss run is always added.
    pub barriers: Vec<f64>,
    pub steps: u64,
    /// Significance level of the no-loss equivalence test.
    pub significance: f64,
    /// Threshold barrier printed next to the measured one.
    pub compare_threshold_kt: f64,
}

impl Default for WeightLossSection {
    fn default() -> Self {
        Self {
            barriers: vec![10.0, 14.0, 18.0, 20.0, 22.0, 25.0, 30.0, 35.0],
            steps: DEFAULT_LONG_RUN_STEPS,
            significance: 0.01,
            compare_threshold_kt: 15.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub n_list: Vec<usize>,
    pub delta_e_list: Vec<f64>,
    pub bin_width: f64,
    pub steps: u64,
    pub instances: u32,
    pub reference_n: usize,
    pub reference_delta_e: f64,
    /// Target error and configuration printed as a side-by-side comparison.
    pub compare_error_pct: f64,
    pub compare_n: usize,
    pub compare_delta_e: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            n_list: (1..=15).map(|k| 10 * k).collect(),
            delta_e_list: (8..=20).map(f64::from).collect(),
            bin_width: 0.25,
            steps: DEFAULT_LONG_RUN_STEPS,
            instances: 50,
            reference_n: 100,
            reference_delta_e: 20.0,
            compare_error_pct: 3.0,
            compare_n: 54,
            compare_delta_e: 12.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub device: DeviceSection,
    pub population: PopulationSection,
    pub weights: WeightsSection,
    pub learning: LearningSection,
    pub run: RunSection,
    pub tuning: TuningSection,
    pub neuron_loss: NeuronLossSection,
    pub weight_loss: WeightLossSection,
    pub sweep: SweepSection,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(cfg_err(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err(format!("cannot read {}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.device;
        positive("device.phi0_hz", d.phi0_hz)?;
        positive("device.delta_e_neuron_kt", d.delta_e_neuron_kt)?;
        positive("device.v_c_volts", d.v_c_volts)?;

        let p = &self.population;
        if p.n_in < 2 || p.n_out < 2 {
            return Err(cfg_err("population.n_in and n_out must be >= 2"));
        }
        if !(p.bias_min_v.is_finite() && p.bias_max_v.is_finite() && p.bias_min_v < p.bias_max_v) {
            return Err(cfg_err("population.bias_min_v must be < bias_max_v"));
        }
        positive("population.t_obs_s", p.t_obs_s)?;

        let w = &self.weights;
        if !(1..=16).contains(&w.n_bits) {
            return Err(cfg_err(format!("weights.n_bits must be in 1..=16, got {}", w.n_bits)));
        }
        if !(w.w_min.is_finite() && w.w_max.is_finite() && w.w_min < w.w_max) {
            return Err(cfg_err("weights.w_min must be < w_max"));
        }
        if let Some(b) = w.delta_e_weight_kt {
            positive("weights.delta_e_weight_kt", b)?;
        }

        let l = &self.learning;
        if !(l.alpha.is_finite() && l.alpha >= 0.0) {
            return Err(cfg_err(format!("learning.alpha must be >= 0, got {}", l.alpha)));
        }
        if !(l.window_fraction > 0.0 && l.window_fraction < 1.0) {
            return Err(cfg_err("learning.window_fraction must be in (0, 1)"));
        }
        positive("learning.step_dt_s", l.step_dt_s)?;
        positive("learning.v_max", l.v_max)?;
        if let Some(f0) = l.f0_hz {
            positive("learning.f0_hz", f0)?;
        }
        if let Some(r) = l.output_range_v {
            positive("learning.output_range_v", r)?;
        }
        if l.eval_points < 2 {
            return Err(cfg_err("learning.eval_points must be >= 2"));
        }

        let r = &self.run;
        if r.steps == 0 || r.eval_every == 0 || r.instances == 0 {
            return Err(cfg_err("run.steps, run.eval_every and run.instances must be > 0"));
        }
        if !(r.tail_fraction > 0.0 && r.tail_fraction <= 1.0) {
            return Err(cfg_err("run.tail_fraction must be in (0, 1]"));
        }

        let t = &self.tuning;
        if t.windows == 0 {
            return Err(cfg_err("tuning.windows must be > 0"));
        }
        if t.points == 0 || !(t.v_min <= t.v_max) {
            return Err(cfg_err("tuning needs points > 0 and v_min <= v_max"));
        }

        let n = &self.neuron_loss;
        if n.fractions.iter().any(|f| !(0.0..1.0).contains(f)) {
            return Err(cfg_err("neuron_loss.fractions must lie in [0, 1)"));
        }
        if n.pretrain_steps == 0 || n.recovery_steps == 0 || n.baseline_steps == Some(0) {
            return Err(cfg_err("neuron_loss step counts must be > 0"));
        }
        if !(n.margin_pct >= 0.0) {
            return Err(cfg_err("neuron_loss.margin_pct must be >= 0"));
        }

        let wl = &self.weight_loss;
        for &b in &wl.barriers {
            positive("weight_loss.barriers[]", b)?;
        }
        if wl.steps == 0 {
            return Err(cfg_err("weight_loss.steps must be > 0"));
        }
        if !(wl.significance > 0.0 && wl.significance < 1.0) {
            return Err(cfg_err("weight_loss.significance must be in (0, 1)"));
        }

        let s = &self.sweep;
        if s.n_list.is_empty() || s.delta_e_list.is_empty() {
            return Err(cfg_err("sweep.n_list and sweep.delta_e_list must be non-empty"));
        }
        if s.n_list.iter().any(|&n| n < 2) || s.reference_n < 2 {
            return Err(cfg_err("sweep sizes must be >= 2"));
        }
        for &b in &s.delta_e_list {
            positive("sweep.delta_e_list[]", b)?;
        }
        positive("sweep.reference_delta_e", s.reference_delta_e)?;
        positive("sweep.bin_width", s.bin_width)?;
        if s.steps == 0 || s.instances == 0 {
            return Err(cfg_err("sweep.steps and sweep.instances must be > 0"));
        }
        self.system_spec().map(|_| ())
    }

    pub fn junction(&self) -> Result<JunctionParams> {
        let d = &self.device;
        JunctionParams::new(d.phi0_hz, d.delta_e_neuron_kt, d.v_c_volts)
            .map_err(|e| cfg_err(e.to_string()))
    }

    /// `f0` after applying the default.
    pub fn f0(&self) -> Result<f64> {
        Ok(match self.learning.f0_hz {
            Some(f0) => f0,
            None => self.junction()?.peak_rate(),
        })
    }

    pub fn system_spec(&self) -> Result<SystemSpec> {
        let junction = self.junction()?;
        let l = &self.learning;
        let learning = LearningConfig {
            alpha: l.alpha,
            window_fraction: l.window_fraction,
            step_duration: l.step_dt_s,
            f0: self.f0()?,
            v_max: l.v_max,
            output_range: l.output_range_v.unwrap_or(2.0 * l.v_max),
            target: TargetFunction::Sine {
                v_max: l.v_max,
                convention: l.target_convention,
            },
            eval_points: l.eval_points,
        };
        learning.validate().map_err(|e| cfg_err(e.to_string()))?;
        Ok(SystemSpec {
            n_in: self.population.n_in,
            n_out: self.population.n_out,
            junction,
            bias_min: self.population.bias_min_v,
            bias_max: self.population.bias_max_v,
            t_obs: self.population.t_obs_s,
            n_bits: self.weights.n_bits,
            w_min: self.weights.w_min,
            w_max: self.weights.w_max,
            weight_barrier: self.weights.delta_e_weight_kt.unwrap_or(f64::INFINITY),
            analog: self.weights.analog_mode,
            learning,
        })
    }

    pub fn loss_recovery(&self) -> LossRecoveryConfig {
        let n = &self.neuron_loss;
        LossRecoveryConfig {
            fractions: n.fractions.clone(),
            pretrain_steps: n.pretrain_steps,
            recovery_steps: n.recovery_steps,
            baseline_steps: n.baseline_steps.unwrap_or(n.pretrain_steps + n.recovery_steps),
            baseline_layout: n.baseline_layout,
            eval_every: self.run.eval_every,
            instances: self.run.instances,
            tail_fraction: self.run.tail_fraction,
        }
    }

    /// Weight-loss experiment; the no-loss case is appended last.
    pub fn weight_loss(&self) -> WeightLossConfig {
        let mut barriers = self.weight_loss.barriers.clone();
        barriers.sort_by(f64::total_cmp);
        barriers.dedup();
        barriers.push(f64::INFINITY);
        WeightLossConfig {
            barriers,
            steps: self.weight_loss.steps,
            eval_every: self.run.eval_every,
            instances: self.run.instances,
            tail_fraction: self.run.tail_fraction,
        }
    }

    pub fn sweep(&self) -> SweepConfig {
        let s = &self.sweep;
        SweepConfig {
            n_list: s.n_list.clone(),
            barriers: s.delta_e_list.clone(),
            steps: s.steps,
            eval_every: self.run.eval_every,
            instances: s.instances,
            tail_fraction: self.run.tail_fraction,
            bin_width: s.bin_width,
            reference_n: s.reference_n,
            reference_barrier: s.reference_delta_e,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.device.delta_e_neuron_kt, 6.0);
        assert_eq!(cfg.device.v_c_volts, 0.1);
        assert!((cfg.f0().unwrap() - 2.478_752_176_666_358e6).abs() < 1e-6);
        let spec = cfg.system_spec().unwrap();
        assert_eq!(spec.learning.output_range, 0.2);
        assert!(spec.weight_barrier.is_infinite());
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = ExperimentConfig::from_toml_str("[device]\nphi0 = 1e9\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(ExperimentConfig::from_toml_str("[devices]\n").is_err());
    }

    #[test]
    fn range_checks() {
        for bad in [
            "[device]\nv_c_volts = -0.1",
            "[population]\nn_in = 1",
            "[population]\nbias_min_v = 0.2",
            "[weights]\nn_bits = 0",
            "[weights]\ndelta_e_weight_kt = 0.0",
            "[learning]\nwindow_fraction = 1.5",
            "[run]\ninstances = 0",
            "[run]\ntail_fraction = 0.0",
            "[tuning]\nwindows = 0",
            "[neuron_loss]\nfractions = [1.0]",
            "[sweep]\nn_list = []",
        ] {
            assert!(ExperimentConfig::from_toml_str(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn toml_and_json_agree() {
        let toml_text = "[weights]\ndelta_e_weight_kt = 25.0\n[learning]\ntarget_convention = \"literal\"\n[run]\nseed = 9\n";
        let json_text = r#"{"weights": {"delta_e_weight_kt": 25.0}, "learning": {"target_convention": "literal"}, "run": {"seed": 9}}"#;
        let a = ExperimentConfig::from_toml_str(toml_text).unwrap();
        let b = ExperimentConfig::from_json_str(json_text).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.run.seed, 9);
        assert_eq!(a.weights.delta_e_weight_kt, Some(25.0));
    }

    #[test]
    fn serialized_config_round_trips() {
        let mut cfg = ExperimentConfig::default();
        cfg.weights.delta_e_weight_kt = Some(14.0);
        cfg.neuron_loss.baseline_steps = Some(500);
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
        // The worker count never reaches outputs.
        cfg.run.workers = 3;
        assert!(!cfg.to_toml_string().contains("workers"));
    }

    #[test]
    fn weight_loss_always_includes_no_loss() {
        let cfg = ExperimentConfig::from_toml_str("[weight_loss]\nbarriers = [20.0, 10.0, 20.0]").unwrap();
        assert_eq!(cfg.weight_loss().barriers, vec![10.0, 20.0, f64::INFINITY]);
    }
}
