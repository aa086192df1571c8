//! Monte Carlo success-probability experiments over circuit encodings.
//!
//! A run sweeps a list of evolution durations; for each duration it
//! evolves `trials` independent seeded initial states, decodes every
//! encoded branch and records per-branch correctness frequencies. Trials
//! run in parallel over immutable inputs with per-trial derived
//! sub-seeds, so concurrency never changes results.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adder::{carry_node, ripple_carry_adder, sum_node};
use crate::cluster::detect_clusters;
use crate::dynamics::{evolve, sample_initial, IntegratorConfig};
use crate::encoding::{
    decode_gate_outputs, decode_outputs, encode_branches, encode_gate_chain, BranchEncoding,
    GateChainEncoding,
};
use crate::error::{Error, Result};
use crate::gates::{and_or_gate, GateSpec};
use crate::network::SpinNetwork;
use crate::phase::{phase_distance, PhasePoint, Spin};

/// Execution mode of an adder experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Concurrent,
    Sequential,
}

/// Circuit description file: the experiment input format.
///
/// ```json
/// {
///   "type": "adder",
///   "N": 8,
///   "condition": true,
///   "seed": 7,
///   "inputs": {"x": "181", "y": "108", "c_in": "0"},
///   "order": [6, 3, 0],
///   "arc": [0.1, 1.9]
/// }
/// ```
///
/// For `"type": "and_or"` the inputs are single bits, `op` selects
/// "and" or "or", and `order` ranges over the input groups
/// 0 = f (the fixed auxiliary spin), 1 = x, 2 = y.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(rename = "N", default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub condition: bool,
    #[serde(default)]
    pub seed: u64,
    pub inputs: CircuitInputs,
    #[serde(default)]
    pub order: Vec<usize>,
    #[serde(default)]
    pub arc: Option<(f64, f64)>,
    #[serde(default)]
    pub op: Option<String>,
}

/// Input words as decimal strings, so wide operands survive JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitInputs {
    pub x: String,
    pub y: String,
    #[serde(default)]
    pub c_in: Option<String>,
}

pub const DEFAULT_ARC: (f64, f64) = (0.1, 1.9);

impl CircuitSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Data(format!("circuit schema: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Data(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
    }

    fn parse_u64(field: &str, text: &str) -> Result<u64> {
        text.trim()
            .parse()
            .map_err(|e| Error::Data(format!("{field} = {text:?}: {e}")))
    }

    pub fn build(&self) -> Result<BuiltCircuit> {
        let arc = self.arc.unwrap_or(DEFAULT_ARC);
        match self.kind.as_str() {
            "adder" => {
                let n = self.n.ok_or_else(|| Error::Data("adder needs N".into()))?;
                let x = Self::parse_u64("inputs.x", &self.inputs.x)?;
                let y = Self::parse_u64("inputs.y", &self.inputs.y)?;
                let c_in = match &self.inputs.c_in {
                    Some(text) => u8::try_from(Self::parse_u64("inputs.c_in", text)?)
                        .map_err(|_| Error::Data("c_in must be a bit".into()))?,
                    None => 0,
                };
                let adder = ripple_carry_adder(n, self.condition, self.seed)?;
                let (net, enc) = encode_branches(&adder, x, y, c_in, &self.order, arc)?;
                let mut placed = adder;
                placed.net = net;
                Ok(BuiltCircuit { gate: placed, kind: BuiltKind::Adder(Box::new(enc)) })
            }
            "and_or" => {
                let x: Spin = if Self::parse_u64("inputs.x", &self.inputs.x)? != 0 { 1 } else { -1 };
                let y: Spin = if Self::parse_u64("inputs.y", &self.inputs.y)? != 0 { 1 } else { -1 };
                let f: Spin = match self.op.as_deref() {
                    Some("and") | None => 1,
                    Some("or") => -1,
                    Some(other) => return Err(Error::Data(format!("unknown op {other:?}"))),
                };
                let gate = and_or_gate();
                // Group ids: 0 = f, 1 = x, 2 = y over argument positions
                // (x, y, f) = (0, 1, 2).
                let groups = vec![vec![2], vec![0], vec![1]];
                let (net, enc) = encode_gate_chain(&gate, &[x, y, f], &groups, &self.order, arc)?;
                let mut placed = gate;
                placed.net = net;
                Ok(BuiltCircuit { gate: placed, kind: BuiltKind::Gate(enc) })
            }
            other => Err(Error::Data(format!("unknown circuit type {other:?}"))),
        }
    }
}

/// A circuit ready to run: the placed network plus its branch structure.
#[derive(Debug, Clone)]
pub struct BuiltCircuit {
    pub gate: GateSpec,
    pub kind: BuiltKind,
}

#[derive(Debug, Clone)]
pub enum BuiltKind {
    Adder(Box<BranchEncoding>),
    Gate(GateChainEncoding),
}

impl BuiltCircuit {
    /// Scored branches: the forward half of the readout cycle (the
    /// second half mirrors it by inversion symmetry).
    pub fn branch_count(&self) -> usize {
        match &self.kind {
            BuiltKind::Adder(enc) => enc.forward_branches().len(),
            BuiltKind::Gate(enc) => enc.forward_len(),
        }
    }

    /// Cumulative flip set and expected output word per scored branch.
    pub fn branch_table(&self) -> Vec<(Vec<usize>, u64)> {
        match &self.kind {
            BuiltKind::Adder(enc) => enc
                .forward_branches()
                .iter()
                .map(|b| (b.flips.iter().copied().collect(), b.expected_sum))
                .collect(),
            BuiltKind::Gate(enc) => {
                let mut flips: Vec<usize> = Vec::new();
                let mut out = Vec::new();
                for position in 0..enc.forward_len() {
                    if position > 0 {
                        for &g in &enc.flip_sequence[position - 1] {
                            flips.push(g);
                        }
                    }
                    let expected =
                        crate::oracle::truth(self.gate.oracle, &enc.args[position]).unwrap_or_default();
                    let word = expected
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (i, &s)| acc | (u64::from(s > 0) << i));
                    let mut sorted = flips.clone();
                    sorted.sort_unstable();
                    out.push((sorted, word));
                }
                out
            }
        }
    }
}

/// Integration overrides applied on top of per-network defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IntegratorOverrides {
    pub dt: Option<f64>,
    pub epsilon: Option<f64>,
    pub cluster_tol: Option<f64>,
}

/// Experiment parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub circuit: CircuitSpec,
    /// t_max values; in sequential mode the duration of each FA stage.
    pub durations: Vec<f64>,
    /// Trials per duration.
    pub trials: usize,
    pub mode: Mode,
    #[serde(default)]
    pub integrator: IntegratorOverrides,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if self.durations.is_empty() {
            return Err(Error::InvalidInput("at least one duration required".into()));
        }
        if self.durations.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("durations must be strictly increasing".into()));
        }
        Ok(())
    }

    fn integrator_for(&self, net: &SpinNetwork, duration: f64, trial_seed: u64) -> IntegratorConfig {
        let mut cfg = IntegratorConfig::for_network(net);
        if let Some(dt) = self.integrator.dt {
            cfg.dt = dt;
        }
        if let Some(eps) = self.integrator.epsilon {
            cfg.epsilon = eps;
        }
        if let Some(tol) = self.integrator.cluster_tol {
            cfg.cluster_tol = tol;
        }
        cfg.t_max = duration;
        cfg.seed = trial_seed;
        cfg
    }
}

/// One (duration, branch) measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessCell {
    pub duration: f64,
    pub branch: usize,
    pub flips: Vec<usize>,
    pub expected: u64,
    pub trials: u64,
    pub successes: u64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub seed: u64,
    pub config_hash: String,
    pub version: String,
    pub mode: Mode,
    pub circuit: String,
}

/// Branches sharing one expected output word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchGroup {
    pub expected: u64,
    pub branches: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessReport {
    pub metadata: ReportMetadata,
    pub cells: Vec<SuccessCell>,
    pub groups: Vec<BranchGroup>,
}

impl SuccessReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn cell(&self, duration: f64, branch: usize) -> Option<&SuccessCell> {
        self.cells
            .iter()
            .find(|c| c.duration == duration && c.branch == branch)
    }

    /// CSV rows: duration, branch_id, flip_set, trials, successes,
    /// probability.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["duration", "branch_id", "flip_set", "trials", "successes", "probability"])
            .map_err(|e| Error::Data(e.to_string()))?;
        for cell in &self.cells {
            let flips = format!(
                "{{{}}}",
                cell.flips.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
            );
            w.write_record([
                cell.duration.to_string(),
                cell.branch.to_string(),
                flips,
                cell.trials.to_string(),
                cell.successes.to_string(),
                cell.probability.to_string(),
            ])
            .map_err(|e| Error::Data(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |acc, &b| (acc ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Sub-seed for one trial, derived so results do not depend on execution
/// order.
fn trial_seed(seed: u64, duration_index: usize, trial: usize) -> u64 {
    let mut bytes = Vec::with_capacity(24);
    bytes.extend_from_slice(&seed.to_le_bytes());
    bytes.extend_from_slice(&(duration_index as u64).to_le_bytes());
    bytes.extend_from_slice(&(trial as u64).to_le_bytes());
    fnv1a(&bytes)
}

fn config_hash(cfg: &ExperimentConfig) -> Result<String> {
    Ok(format!("{:016x}", fnv1a(serde_json::to_string(cfg)?.as_bytes())))
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn concurrent_trial(built: &BuiltCircuit, cfg: &IntegratorConfig) -> Result<Vec<bool>> {
    let net = &built.gate.net;
    let initial = sample_initial(net, cfg);
    let term = evolve(net, &initial, cfg)?;
    match &built.kind {
        BuiltKind::Adder(enc) => {
            let report = decode_outputs(&term, enc, &built.gate)?;
            Ok(report.outcomes[..enc.forward_branches().len()]
                .iter()
                .map(|o| o.correct)
                .collect())
        }
        BuiltKind::Gate(enc) => {
            let outcomes = decode_gate_outputs(&term, enc, &built.gate)?;
            Ok(outcomes[..enc.forward_len()].iter().map(|o| o.correct).collect())
        }
    }
}

/// Moves a point's crossing phase onto the nearest of `phases` by the
/// minimal circular shift; how a settled spin is committed to a cluster.
fn snap_to_phases(p: PhasePoint, phases: &[f64]) -> PhasePoint {
    let mut best: Option<(f64, f64)> = None;
    for &phase in phases {
        let probe = PhasePoint::from_parts(1, 1.0 - phase.rem_euclid(2.0));
        let d = phase_distance(p, probe);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, phase));
        }
    }
    match best {
        Some((_, phase)) => {
            let mut shift = (p.crossing_phase() - phase.rem_euclid(2.0)).rem_euclid(2.0);
            if shift > 1.0 {
                shift -= 2.0;
            }
            p.rotated(shift)
        }
        None => p,
    }
}

fn sequential_trial(
    built: &BuiltCircuit,
    enc: &BranchEncoding,
    cfg_for: impl Fn(&SpinNetwork) -> IntegratorConfig,
) -> Result<Vec<bool>> {
    let n = enc.n_bits;
    let base_net = &built.gate.net;
    let group_phases: Vec<f64> = enc
        .placement
        .iter()
        .map(|&(_, offset)| (2.0 - offset).rem_euclid(2.0))
        .collect();

    let template = cfg_for(base_net);
    let mut points = sample_initial(base_net, &template);
    let mut converged = true;
    for k in 1..=n {
        // Stage k runs as an isolated full adder: its inputs and the
        // carry committed by stage k−1 are clamped, only s_k and c_k
        // evolve, and the rest of the circuit is out of the picture.
        let globals = [
            crate::adder::x_node(k),
            crate::adder::y_node(k),
            carry_node(k - 1),
            sum_node(k),
            carry_node(k),
        ];
        let mut stage = SpinNetwork::new(5);
        for a in 0..5 {
            for b in (a + 1)..5 {
                let w = base_net.weight(globals[a], globals[b]);
                if w != 0.0 {
                    stage.set_weight(a, b, w)?;
                }
            }
        }
        let stage_points: Vec<PhasePoint> = globals.iter().map(|&g| points[g]).collect();
        for local in 0..3 {
            stage.clamp(local, stage_points[local])?;
        }
        let cfg = cfg_for(&stage);
        let term = evolve(&stage, &stage_points, &cfg)?;
        converged &= term.converged;
        // Commit the decoded stage outputs to their clusters before the
        // next stage consumes the carry.
        points[sum_node(k)] = snap_to_phases(term.points[3], &group_phases);
        points[carry_node(k)] = snap_to_phases(term.points[4], &group_phases);
    }

    let term = crate::dynamics::TerminalState {
        clusters: detect_clusters(&points, template.cluster_tol),
        points,
        elapsed: 0.0,
        lyapunov_trace: Vec::new(),
        converged,
    };
    let report = decode_outputs(&term, enc, &built.gate)?;
    Ok(report.outcomes[..enc.forward_branches().len()]
        .iter()
        .map(|o| o.correct)
        .collect())
}

fn run_trials(
    cfg: &ExperimentConfig,
    built: &BuiltCircuit,
    duration_index: usize,
    duration: f64,
) -> Result<Vec<u64>> {
    let outcomes: Vec<Result<Vec<bool>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(cfg.seed, duration_index, trial);
            match (&cfg.mode, &built.kind) {
                (Mode::Concurrent, _) => {
                    let icfg = cfg.integrator_for(&built.gate.net, duration, seed);
                    concurrent_trial(built, &icfg)
                }
                (Mode::Sequential, BuiltKind::Adder(enc)) => sequential_trial(built, enc, |net| {
                    let mut icfg = cfg.integrator_for(net, duration, seed);
                    icfg.seed = seed;
                    icfg
                }),
                (Mode::Sequential, BuiltKind::Gate(_)) => Err(Error::InvalidInput(
                    "sequential mode applies to adder circuits".into(),
                )),
            }
        })
        .collect();

    let branches = built.branch_count();
    let mut successes = vec![0u64; branches];
    for outcome in outcomes {
        let flags = outcome?;
        for (b, ok) in flags.iter().enumerate() {
            if *ok {
                successes[b] += 1;
            }
        }
    }
    Ok(successes)
}

fn run(cfg: &ExperimentConfig, mode: Mode) -> Result<SuccessReport> {
    if cfg.mode != mode {
        return Err(Error::InvalidInput("config mode does not match the entry point".into()));
    }
    cfg.validate()?;
    let built = cfg.circuit.build()?;
    let table = built.branch_table();

    let mut cells = Vec::new();
    for (di, &duration) in cfg.durations.iter().enumerate() {
        let successes = run_trials(cfg, &built, di, duration)?;
        for (branch, &s) in successes.iter().enumerate() {
            cells.push(SuccessCell {
                duration,
                branch,
                flips: table[branch].0.clone(),
                expected: table[branch].1,
                trials: cfg.trials as u64,
                successes: s,
                probability: s as f64 / cfg.trials as f64,
            });
        }
    }

    let mut by_expected: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (branch, (_, expected)) in table.iter().enumerate() {
        by_expected.entry(*expected).or_default().push(branch);
    }
    let groups = by_expected
        .into_iter()
        .map(|(expected, branches)| BranchGroup { expected, branches })
        .collect();

    Ok(SuccessReport {
        metadata: ReportMetadata {
            seed: cfg.seed,
            config_hash: config_hash(cfg)?,
            version: env!("CARGO_PKG_VERSION").to_string(),
            mode: cfg.mode,
            circuit: cfg.circuit.kind.clone(),
        },
        cells,
        groups,
    })
}

/// All branches decoded from one relaxation of the full network per
/// trial.
pub fn run_concurrent(cfg: &ExperimentConfig) -> Result<SuccessReport> {
    run(cfg, Mode::Concurrent)
}

/// Full-adder stages evolved one by one; each stage's decoded carry-out
/// is clamped as the next stage's carry-in. The duration applies per
/// stage.
pub fn run_sequential(cfg: &ExperimentConfig) -> Result<SuccessReport> {
    run(cfg, Mode::Sequential)
}

/// Per-group spread statistics at one duration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupStats {
    pub expected: u64,
    pub branches: Vec<usize>,
    pub duration: f64,
    pub min_probability: f64,
    pub max_probability: f64,
    pub mean_probability: f64,
    pub spread: f64,
}

/// Groups branches by expected output word and reports the probability
/// spread inside each group per duration.
pub fn group_analysis(report: &SuccessReport) -> Vec<GroupStats> {
    let mut durations: Vec<f64> = report.cells.iter().map(|c| c.duration).collect();
    durations.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    durations.dedup();

    let mut out = Vec::new();
    for group in &report.groups {
        for &duration in &durations {
            let probs: Vec<f64> = group
                .branches
                .iter()
                .filter_map(|&b| report.cell(duration, b).map(|c| c.probability))
                .collect();
            if probs.is_empty() {
                continue;
            }
            let min = probs.iter().copied().fold(f64::INFINITY, f64::min);
            let max = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            out.push(GroupStats {
                expected: group.expected,
                branches: group.branches.clone(),
                duration,
                min_probability: min,
                max_probability: max,
                mean_probability: probs.iter().sum::<f64>() / probs.len() as f64,
                spread: max - min,
            });
        }
    }
    out
}
