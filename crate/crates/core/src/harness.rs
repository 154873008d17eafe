//! Experiment commands: run a configured experiment, write CSVs and a
//! manifest that can replay it.
//!
//! Every CSV uses `,` as delimiter and `.` as decimal mark, with a single
//! header line starting with `#`. Floats are written in shortest round-trip
//! form, so reruns can be compared byte for byte.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::device;
use crate::error::{Error, Result};
use crate::learning::{steady_state_stats, RunTrace, SystemSpec};
use crate::reliability::{self, CurvePoint};
use crate::seeding::{Purpose, SeedTree};
use crate::stats;
use crate::synapse::{self, LossParams};

/// Name of the manifest written next to the outputs.
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Tuning,
    Learn,
    NeuronLoss,
    WeightLoss,
    Pareto,
    Validate,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Tuning,
        Command::Learn,
        Command::NeuronLoss,
        Command::WeightLoss,
        Command::Pareto,
        Command::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Tuning => "tuning",
            Command::Learn => "learn",
            Command::NeuronLoss => "neuron-loss",
            Command::WeightLoss => "weight-loss",
            Command::Pareto => "pareto",
            Command::Validate => "validate",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown command {s:?}")))
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    /// Instances for every experiment, including the sweep.
    pub instances: Option<u32>,
    /// Main run length: learning, weight-loss, sweep and post-loss recovery.
    pub steps: Option<u64>,
    pub workers: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(seed) = self.seed {
            cfg.run.seed = seed;
        }
        if let Some(n) = self.instances {
            cfg.run.instances = n;
            cfg.sweep.instances = n;
        }
        if let Some(s) = self.steps {
            cfg.run.steps = s;
            cfg.weight_loss.steps = s;
            cfg.sweep.steps = s;
            cfg.neuron_loss.recovery_steps = s;
        }
        if let Some(w) = self.workers {
            cfg.run.workers = w;
        }
        cfg.validate()
    }
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: Command,
    pub out_dir: PathBuf,
    /// Relative output path to SHA-256 hex digest.
    pub outputs: BTreeMap<String, String>,
    /// Human-readable summary, one line per entry.
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: Command,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: Self = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        m.config.validate()?;
        Ok(m)
    }
}

struct Outputs {
    dir: PathBuf,
    files: BTreeMap<String, String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: BTreeMap::new(),
        })
    }

    fn write(&mut self, name: &str, fill: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        fill(&mut buf).expect("writing to memory");
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        std::fs::write(&path, &buf).map_err(|e| Error::io(&path, e))?;
        self.files.insert(name.to_string(), hex::encode(Sha256::digest(&buf)));
        Ok(())
    }
}

/// Runs `command` with a validated config and writes everything to `out_dir`,
/// manifest included.
pub fn run(command: Command, cfg: &ExperimentConfig, out_dir: &Path) -> Result<Report> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.workers)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let mut out = Outputs::new(out_dir)?;
    let lines = pool.install(|| match command {
        Command::Tuning => cmd_tuning(cfg, &mut out),
        Command::Learn => cmd_learn(cfg, &mut out),
        Command::NeuronLoss => cmd_neuron_loss(cfg, &mut out),
        Command::WeightLoss => cmd_weight_loss(cfg, &mut out),
        Command::Pareto => cmd_pareto(cfg, &mut out),
        Command::Validate => cmd_validate(cfg, &mut out),
    })?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        command,
        seed: cfg.run.seed,
        config: cfg.clone(),
        outputs: out.files.clone(),
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::invalid(format!("manifest: {e}")))?;
    let path = out_dir.join(MANIFEST_FILE);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(Report {
        command,
        out_dir: out_dir.to_path_buf(),
        outputs: out.files,
        lines,
    })
}

/// Output files whose checksum differs from the manifest (or is missing).
pub fn mismatches(manifest: &RunManifest, report: &Report) -> Vec<String> {
    let mut bad: Vec<String> = manifest
        .outputs
        .iter()
        .filter(|(name, sum)| report.outputs.get(*name) != Some(*sum))
        .map(|(name, _)| name.clone())
        .collect();
    bad.extend(
        report
            .outputs
            .keys()
            .filter(|name| !manifest.outputs.contains_key(*name))
            .cloned(),
    );
    bad
}

/// Reruns the experiment recorded in a manifest into `out_dir`. The worker
/// count may be changed; results must not depend on it.
pub fn replay(manifest: &RunManifest, out_dir: &Path, workers: Option<usize>) -> Result<Report> {
    let mut cfg = manifest.config.clone();
    if let Some(w) = workers {
        cfg.run.workers = w;
    }
    run(manifest.command, &cfg, out_dir)
}

fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn fmt_opt<T: fmt::Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn barrier_label(b: f64) -> String {
    if b.is_finite() {
        format!("dE{b}")
    } else {
        "no_loss".to_string()
    }
}

fn write_curve(w: &mut Vec<u8>, curve: &[CurvePoint], n: usize) -> std::io::Result<()> {
    writeln!(w, "#step,mean_error_pct,sem_error_pct,n_instances")?;
    for p in curve {
        writeln!(w, "{},{},{},{}", p.step, p.mean, p.sem, n)?;
    }
    Ok(())
}

fn write_traces(out: &mut Outputs, prefix: &str, traces: &[RunTrace]) -> Result<()> {
    for (k, t) in traces.iter().enumerate() {
        out.write(&format!("{prefix}/instance_{k:03}_steps.csv"), |w| t.write_steps_csv(w))?;
        out.write(&format!("{prefix}/instance_{k:03}_evals.csv"), |w| t.write_evals_csv(w))?;
    }
    Ok(())
}

fn cmd_tuning(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let junction = cfg.junction()?;
    let t = &cfg.tuning;
    let t_obs = cfg.population.t_obs_s;
    let seeds = SeedTree::new(cfg.run.seed);
    let voltages = linspace(t.v_min, t.v_max, t.points);
    let rows = par_map(voltages.len(), |i| {
        let mut rng = seeds.stream(Purpose::Tuning, i as u64, 0);
        let counts: Vec<f64> = (0..t.windows)
            .map(|_| device::simulate_window(&junction, voltages[i], t_obs, &mut rng) as f64)
            .collect();
        let measured = stats::mean(&counts) / t_obs;
        let stderr = if counts.len() > 1 { stats::sem(&counts) / t_obs } else { f64::NAN };
        Ok((voltages[i], measured, device::mean_transition_rate(&junction, voltages[i]), stderr))
    })?;
    out.write("tuning.csv", |w| {
        writeln!(w, "#v_net,rate_measured,rate_analytic,n_windows,rate_stderr")?;
        for (v, m, a, se) in &rows {
            writeln!(w, "{v},{m},{a},{},{se}", t.windows)?;
        }
        Ok(())
    })?;
    let worst = rows
        .iter()
        .map(|(_, m, a, se)| (m - a).abs() / se)
        .fold(0.0_f64, f64::max);
    Ok(vec![
        format!("tuning: {} voltages x {} windows of {t_obs} s", rows.len(), t.windows),
        format!("peak analytic rate {:.6e} Hz", junction.peak_rate()),
        format!("largest deviation from analytic: {worst:.2} standard errors"),
    ])
}

fn cmd_learn(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let spec = cfg.system_spec()?;
    let seeds = SeedTree::new(cfg.run.seed);
    let r = &cfg.run;
    let runs = par_map(r.instances as usize, |k| {
        let mut rng = seeds.stream(Purpose::Learn, 0, k as u32);
        let mut state = spec.build(&mut rng)?;
        let trace = state.run_learning(r.steps, r.eval_every, &mut rng)?;
        let transfer = state.transfer_curve(&mut rng);
        let steady = steady_state_stats(&trace, r.tail_fraction)?;
        let weights = if k == 0 { Some(state.weights.clone()) } else { None };
        Ok((trace, transfer, steady, weights))
    })?;
    let traces: Vec<RunTrace> = runs.iter().map(|r| r.0.clone()).collect();
    let curve = reliability::mean_curve(&traces)?;
    out.write("error_curve.csv", |w| write_curve(w, &curve, traces.len()))?;

    let grid: Vec<(f64, f64)> = runs[0].1.iter().map(|&(v, t, _)| (v, t)).collect();
    out.write("transfer.csv", |w| {
        writeln!(w, "#v_in,v_target,v_out_mean,v_out_std,v_out_instance0")?;
        for (i, (v, target)) in grid.iter().enumerate() {
            let outs: Vec<f64> = runs.iter().map(|r| r.1[i].2).collect();
            writeln!(w, "{v},{target},{},{},{}", stats::mean(&outs), stats::std_dev(&outs), outs[0])?;
        }
        Ok(())
    })?;
    out.write("summary.csv", |w| {
        writeln!(w, "#instance,initial_error_pct,final_error_pct,steady_error_pct,r_update")?;
        for (k, (trace, _, steady, _)) in runs.iter().enumerate() {
            let initial = trace.evals.first().map_or(f64::NAN, |e| e.error_pct);
            let last = trace.final_error().unwrap_or(f64::NAN);
            writeln!(w, "{k},{initial},{last},{},{}", steady.mean_error, steady.r_update)?;
        }
        Ok(())
    })?;
    if let Some(wm) = &runs[0].3 {
        out.write("weights_instance_000.csv", |w| wm.write_csv(w))?;
    }
    if r.write_traces {
        write_traces(out, "traces", &traces)?;
    }
    let steady: Vec<f64> = runs.iter().map(|r| r.2.mean_error).collect();
    Ok(vec![
        format!("learn: N={} x {}, {} instances, {} steps", spec.n_in, spec.n_out, r.instances, r.steps),
        format!("initial error {:.3}%", curve[0].mean),
        format!("final error {:.3}% (+/- {:.3})", curve[curve.len() - 1].mean, curve[curve.len() - 1].sem),
        format!("steady error {:.3}% over the last {}% of steps", stats::mean(&steady), r.tail_fraction * 100.0),
    ])
}

fn cmd_neuron_loss(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let spec = cfg.system_spec()?;
    let lr = cfg.loss_recovery();
    let result = reliability::run_loss_recovery(&spec, &lr, SeedTree::new(cfg.run.seed))?;
    let summary = reliability::summarize_loss_recovery(&result, lr.tail_fraction, cfg.neuron_loss.margin_pct)?;
    let n = lr.instances as usize;
    let pre = reliability::mean_curve(&result.pretrain)?;
    out.write("pretrain_curve.csv", |w| write_curve(w, &pre, n))?;
    for f in &result.fractions {
        let tag = format!("f{:.2}", f.fraction);
        let rec = reliability::mean_curve(&f.recovery)?;
        let base = reliability::mean_curve(&f.baseline)?;
        out.write(&format!("recovery_curve_{tag}.csv"), |w| write_curve(w, &rec, n))?;
        out.write(&format!("baseline_curve_{tag}.csv"), |w| write_curve(w, &base, n))?;
    }
    out.write("loss_summary.csv", |w| {
        writeln!(
            w,
            "#loss_fraction,n_alive,initial_error_pct,pretrained_error_pct,post_loss_error_pct,\
             recovery_steady_pct,baseline_steady_pct,recovery_steps_to_level,baseline_steps_to_level"
        )?;
        for s in &summary {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                s.fraction,
                s.n_alive,
                s.initial_error,
                s.pretrained_error,
                s.post_loss_error,
                s.recovery_steady,
                s.baseline_steady,
                fmt_opt(s.recovery_steps_to_level),
                fmt_opt(s.baseline_steps_to_level)
            )?;
        }
        Ok(())
    })?;
    if cfg.run.write_traces {
        write_traces(out, "traces/pretrain", &result.pretrain)?;
    }
    let mut lines = vec![format!(
        "neuron-loss: N={}, {} instances, pretrain {} steps, recovery {} steps",
        spec.n_in, lr.instances, lr.pretrain_steps, lr.recovery_steps
    )];
    for s in &summary {
        lines.push(format!(
            "loss {:.0}%: post-loss {:.2}%, recovered {:.2}% vs fresh {:.2}%, steps to level {} vs {}",
            s.fraction * 100.0,
            s.post_loss_error,
            s.recovery_steady,
            s.baseline_steady,
            fmt_opt(s.recovery_steps_to_level),
            fmt_opt(s.baseline_steps_to_level)
        ));
    }
    Ok(lines)
}

fn cmd_weight_loss(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let spec = cfg.system_spec()?;
    let wl = cfg.weight_loss();
    let outcomes = reliability::run_weight_loss(&spec, &wl, SeedTree::new(cfg.run.seed))?;
    let summary = reliability::summarize_weight_loss(&outcomes, wl.tail_fraction)?;
    let alpha = cfg.weight_loss.significance;
    let threshold = reliability::reliability_threshold(&summary, alpha);
    let n = wl.instances as usize;
    let mut long = Vec::new();
    for o in &outcomes {
        let curve = reliability::mean_curve(&o.traces)?;
        out.write(&format!("error_curve_{}.csv", barrier_label(o.barrier)), |w| write_curve(w, &curve, n))?;
        long.push((o.barrier, o.p_loss, curve));
    }
    out.write("curves.csv", |w| {
        writeln!(w, "#delta_e_w_kt,p_loss,step,mean_error_pct,sem_error_pct")?;
        for (b, p, curve) in &long {
            for c in curve {
                writeln!(w, "{b},{p},{},{},{}", c.step, c.mean, c.sem)?;
            }
        }
        Ok(())
    })?;
    out.write("summary.csv", |w| {
        writeln!(
            w,
            "#delta_e_w_kt,p_loss,initial_error_pct,steady_error_pct,steady_sem,r_update,p_value_vs_no_loss"
        )?;
        for s in &summary {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                s.barrier,
                s.p_loss,
                s.initial_error,
                s.steady_mean,
                s.steady_sem,
                s.r_update,
                fmt_opt(s.p_value_vs_no_loss)
            )?;
        }
        Ok(())
    })?;
    out.write("threshold.csv", |w| {
        writeln!(w, "#measured_threshold_kt,reference_threshold_kt,significance")?;
        writeln!(w, "{},{},{alpha}", fmt_opt(threshold), cfg.weight_loss.compare_threshold_kt)
    })?;
    let mut lines = vec![format!(
        "weight-loss: N={}, {} instances, {} steps",
        spec.n_in, wl.instances, wl.steps
    )];
    for s in &summary {
        lines.push(format!(
            "{:>8}: p_loss {:.4e}, steady {:.3}% +/- {:.3}, p vs no-loss {}",
            barrier_label(s.barrier),
            s.p_loss,
            s.steady_mean,
            s.steady_sem,
            s.p_value_vs_no_loss.map_or("-".into(), |p| format!("{p:.3}"))
        ));
    }
    lines.push(format!(
        "threshold barrier: measured {} kT, reference {} kT",
        threshold.map_or("none".into(), |t| t.to_string()),
        cfg.weight_loss.compare_threshold_kt
    ));
    Ok(lines)
}

fn cmd_pareto(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let spec = cfg.system_spec()?;
    let sc = cfg.sweep();
    let result = reliability::pareto_sweep(&spec, &sc, SeedTree::new(cfg.run.seed))?;
    out.write("sweep.csv", |w| {
        writeln!(w, "#n,delta_e_w_kt,error_pct,error_std,r_update,power_norm")?;
        for p in &result.points {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                p.n_neurons, p.weight_barrier, p.error_pct, p.error_std, p.r_update, p.normalized_power
            )?;
        }
        Ok(())
    })?;
    out.write("frontier.csv", |w| {
        writeln!(w, "#error_bin,power_min,n_opt,delta_e_w_opt,error_pct,error_std")?;
        for f in &result.frontier {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                f.error_bin, f.power_min, f.n_opt, f.barrier_opt, f.error_pct, f.error_std
            )?;
        }
        Ok(())
    })?;
    let s = &cfg.sweep;
    let best = reliability::optimum_for_error(&result.points, s.compare_error_pct);
    out.write("comparison.csv", |w| {
        writeln!(w, "#source,target_error_pct,n,delta_e_w_kt,error_pct,power_norm")?;
        writeln!(w, "reference,{},{},{},,", s.compare_error_pct, s.compare_n, s.compare_delta_e)?;
        match &best {
            Some(p) => writeln!(
                w,
                "measured,{},{},{},{},{}",
                s.compare_error_pct, p.n_neurons, p.weight_barrier, p.error_pct, p.normalized_power
            ),
            None => writeln!(w, "measured,{},,,,", s.compare_error_pct),
        }
    })?;
    let mut lines = vec![format!(
        "pareto: {} sizes x {} barriers, {} instances, {} steps",
        sc.n_list.len(),
        sc.barriers.len(),
        sc.instances,
        sc.steps
    )];
    lines.push(format!("frontier has {} bins", result.frontier.len()));
    lines.push(match best {
        Some(p) => format!(
            "cheapest cell at <= {}% error: N={} at {} kT (reference: N={} at {} kT)",
            s.compare_error_pct, p.n_neurons, p.weight_barrier, s.compare_n, s.compare_delta_e
        ),
        None => format!("no cell reaches {}% error", s.compare_error_pct),
    });
    Ok(lines)
}

fn cmd_validate(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<Vec<String>> {
    let spec: SystemSpec = cfg.system_spec()?;
    let junction = spec.junction;
    let peak = junction.peak_rate();
    let mut derived: Vec<(String, f64)> = vec![
        ("f0_hz".into(), spec.learning.f0),
        ("peak_rate_hz".into(), peak),
        ("expected_count_per_window".into(), peak * spec.t_obs),
        ("output_range_v".into(), spec.learning.output_range),
        ("window_half_width_v".into(), spec.learning.window()),
        ("weight_lsb".into(), (spec.w_max - spec.w_min) / ((1u64 << spec.n_bits) - 1) as f64),
    ];
    let mut barriers: Vec<f64> = vec![15.0, 20.0];
    barriers.extend(cfg.weights.delta_e_weight_kt);
    barriers.extend(&cfg.weight_loss.barriers);
    barriers.extend(&cfg.sweep.delta_e_list);
    barriers.sort_by(f64::total_cmp);
    barriers.dedup();
    for b in barriers {
        let p = synapse::weight_loss_probability(&LossParams {
            weight_barrier: b,
            ..spec.loss_params()
        });
        derived.push((format!("p_loss_{b}kt"), p));
    }
    let echo = cfg.to_toml_string();
    out.write("config.toml", |w| w.write_all(echo.as_bytes()))?;
    out.write("derived.csv", |w| {
        writeln!(w, "#quantity,value")?;
        for (k, v) in &derived {
            writeln!(w, "{k},{v}")?;
        }
        Ok(())
    })?;
    let mut lines: Vec<String> = echo.lines().map(str::to_string).collect();
    lines.push(String::new());
    lines.extend(derived.iter().map(|(k, v)| format!("{k} = {v:.6e}")));
    Ok(lines)
}
