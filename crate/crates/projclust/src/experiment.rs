//! Reproducible experiment harness: projection ratio sweeps, the
//! low-vs-high doubling dimension comparison, and the structured
//! counterexample demos. Reports are deterministic given their configuration;
//! wall-clock timings are carried but excluded from the deterministic digest.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::facility::{
    compute_radii, evaluate_cost, mp_solve, radii_cost_estimate, FLConfig, Variant,
};
use crate::geometry::{closest_pair, PointSet};
use crate::instances::{
    gen_axis_gauss, gen_axis_grid, gen_pair_gadget, gen_prefix_gauss, gen_scaled_identity,
    gen_star_identity, gen_walk,
};
use crate::mst::{mst_exact, tree_cost_in};
use crate::projection::{apply, sample_projection, GAUSSIAN_PIPELINE_VERSION};

pub const REPORT_SCHEMA: u32 = 1;

/// What gets solved in the projected space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Fl,
    FlSquared,
    Mst,
}

impl Task {
    fn variant(self) -> Option<Variant> {
        match self {
            Task::Fl => Some(Variant::Linear),
            Task::FlSquared => Some(Variant::Squared),
            Task::Mst => None,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Fl => "fl",
            Task::FlSquared => "fl-squared",
            Task::Mst => "mst",
        })
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fl" => Task::Fl,
            "fl-squared" => Task::FlSquared,
            "mst" => Task::Mst,
            other => return Err(Error::InvalidInput(format!("unknown task: {other}"))),
        })
    }
}

/// Sweep configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub task: Task,
    /// Target dimensions, strictly ascending.
    pub d_values: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    /// Relative-error threshold used by minimal-dimension summaries.
    pub epsilon_target: f64,
    /// When set, opening costs are scaled by bisection until the solver opens
    /// a facility count within ±10% of this target.
    pub facility_budget: Option<usize>,
    /// Free-form description of the input (path or generator label).
    pub input_label: String,
}

impl ExperimentConfig {
    pub fn new(task: Task, d_values: Vec<usize>, trials: usize, base_seed: u64) -> Self {
        ExperimentConfig {
            task,
            d_values,
            trials,
            base_seed,
            epsilon_target: 0.1,
            facility_budget: None,
            input_label: String::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if self.d_values.is_empty() {
            return Err(Error::InvalidInput("d_values must be nonempty".into()));
        }
        if self.d_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("d_values must be strictly ascending".into()));
        }
        if self.d_values[0] == 0 {
            return Err(Error::InvalidInput("target dimensions must be at least 1".into()));
        }
        if !(self.epsilon_target > 0.0 && self.epsilon_target <= 1.0) {
            return Err(Error::InvalidInput("epsilon_target must lie in (0, 1]".into()));
        }
        Ok(())
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            task: self.task.to_string(),
            d_values: self.d_values.clone(),
            trials: self.trials,
            base_seed: self.base_seed,
            epsilon_target: self.epsilon_target,
            facility_budget: self.facility_budget,
            input: self.input_label.clone(),
            generator_version: GAUSSIAN_PIPELINE_VERSION.to_string(),
        }
    }
}

/// Configuration echo embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub task: String,
    pub d_values: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    pub epsilon_target: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub facility_budget: Option<usize>,
    pub input: String,
    pub generator_version: String,
}

/// One (dimension, trial) measurement.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub d: usize,
    pub trial: usize,
    pub seed: u64,
    /// Pullback cost divided by the original-space solution cost (or the
    /// demo-specific diagnostic ratio).
    pub ratio: f64,
    pub projected_cost: f64,
    pub original_cost: f64,
    /// Projection plus solve, milliseconds. Excluded from the digest.
    pub wall_time_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Per-dimension aggregate over the trials that produced a value.
#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub d: usize,
    pub ratio_mean: f64,
    pub ratio_std: f64,
    pub time_mean_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub config: ConfigEcho,
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<Aggregate>,
    pub deterministic_digest: String,
}

impl ExperimentReport {
    /// Mean of `ratio` at a given dimension, if present.
    pub fn ratio_mean_at(&self, d: usize) -> Option<f64> {
        self.aggregates.iter().find(|a| a.d == d).map(|a| a.ratio_mean)
    }

    /// Smallest probed dimension whose mean pullback relative error
    /// (`ratio_mean - 1`) is at most `epsilon`.
    pub fn minimal_d_within(&self, epsilon: f64) -> Option<usize> {
        self.aggregates.iter().find(|a| a.ratio_mean - 1.0 <= epsilon).map(|a| a.d)
    }

    /// Flattens records and aggregates into one CSV table.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# schema={} task={} input={} digest={}\n",
            self.schema, self.config.task, self.config.input, self.deterministic_digest
        ));
        out.push_str(
            "kind,d,trial,seed,ratio,projected_cost,original_cost,wall_time_ms,ratio_mean,ratio_std,time_mean_ms,error\n",
        );
        for r in &self.records {
            out.push_str(&format!(
                "record,{},{},{},{},{},{},{},,,,{}\n",
                r.d,
                r.trial,
                r.seed,
                r.ratio,
                r.projected_cost,
                r.original_cost,
                r.wall_time_ms,
                r.error.clone().unwrap_or_default()
            ));
        }
        for a in &self.aggregates {
            out.push_str(&format!(
                "aggregate,{},,,,,,,{},{},{},\n",
                a.d, a.ratio_mean, a.ratio_std, a.time_mean_ms
            ));
        }
        out
    }
}

/// Digest over every non-timing field: the report is serialized to canonical
/// JSON with `wall_time_ms`, `time_mean_ms`, and embedded digests removed,
/// then hashed with SHA-256.
pub fn deterministic_digest<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report serializes");
    strip_nondeterministic(&mut v);
    let canon = serde_json::to_string(&v).expect("value serializes");
    let mut hasher = Sha256::new();
    hasher.update(canon.as_bytes());
    let out = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in out {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

fn strip_nondeterministic(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("wall_time_ms");
            map.remove("time_mean_ms");
            map.remove("deterministic_digest");
            for (_, x) in map.iter_mut() {
                strip_nondeterministic(x);
            }
        }
        serde_json::Value::Array(items) => {
            for x in items.iter_mut() {
                strip_nondeterministic(x);
            }
        }
        _ => {}
    }
}

/// Trial seeds are `base + trial * |d_values| + index(d)`: distinct by
/// construction across the sweep.
fn trial_seed(base: u64, trial: usize, d_index: usize, num_d: usize) -> u64 {
    base.wrapping_add((trial * num_d + d_index) as u64)
}

/// Scales a uniform opening cost by bisection until the greedy solver opens a
/// facility count within ±10% of `budget`.
fn budget_config(
    ps: &PointSet,
    variant: Variant,
    budget: Option<usize>,
) -> std::result::Result<FLConfig, String> {
    let Some(k) = budget else {
        return Ok(FLConfig::uniform(variant));
    };
    let n = ps.len();
    if k == 0 || k > n {
        return Err(format!("facility budget {k} out of range for {n} points"));
    }
    let lo_target = ((0.9 * k as f64).ceil() as usize).max(1);
    let hi_target = ((1.1 * k as f64).floor() as usize).min(n).max(lo_target);
    let solve_count = |mu: f64| -> usize {
        let cfg = FLConfig::with_uniform_cost(variant, mu);
        let prof = compute_radii(ps, &cfg).expect("config validated");
        mp_solve(ps, &prof).expect("profile matches").facilities.len()
    };
    let within = |c: usize| c >= lo_target && c <= hi_target;

    let mut lo = 1e-9;
    let c_lo = solve_count(lo);
    if within(c_lo) {
        return Ok(FLConfig::with_uniform_cost(variant, lo));
    }
    if c_lo < lo_target {
        return Err(format!(
            "facility budget {k} unreachable: even near-zero opening cost opens only {c_lo}"
        ));
    }
    let mut hi = 1.0;
    loop {
        let c = solve_count(hi);
        if within(c) {
            return Ok(FLConfig::with_uniform_cost(variant, hi));
        }
        if c < lo_target {
            break;
        }
        hi *= 4.0;
        if hi > 1e15 {
            return Err(format!("facility budget {k} unreachable: opening cost diverged"));
        }
    }
    for _ in 0..100 {
        let mid = (lo * hi).sqrt();
        let c = solve_count(mid);
        if within(c) {
            return Ok(FLConfig::with_uniform_cost(variant, mid));
        }
        if c > hi_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(format!("facility budget {k} unreachable by opening-cost bisection"))
}

/// Budget matching: returns a uniform-cost configuration whose greedy
/// solution opens a facility count within ±10% of `budget` (the plain
/// uniform configuration when `budget` is `None`).
pub fn facility_budget_config(
    ps: &PointSet,
    variant: Variant,
    budget: Option<usize>,
) -> Result<FLConfig> {
    budget_config(ps, variant, budget).map_err(Error::InvalidInput)
}

enum Baseline {
    Mst { cost: f64 },
    Fl { config: FLConfig, cost: f64 },
}

/// Runs one ratio sweep: for each `(d, trial)` sample a fresh projection,
/// solve in the projected space, pull the solution back, and compare against
/// the solution computed once in the original space.
pub fn run_ratio_sweep(ps: &PointSet, config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let num_d = config.d_values.len();
    let m = ps.dim();

    let baseline = match config.task.variant() {
        None => {
            let tree = mst_exact(ps);
            Baseline::Mst { cost: tree_cost_in(&tree, ps)? }
        }
        Some(variant) => {
            let fl_config = budget_config(ps, variant, config.facility_budget)
                .map_err(Error::InvalidInput)?;
            let profile = compute_radii(ps, &fl_config)?;
            let solution = mp_solve(ps, &profile)?;
            Baseline::Fl { config: fl_config, cost: solution.total }
        }
    };

    let cells: Vec<(usize, usize)> = (0..num_d)
        .flat_map(|di| (0..config.trials).map(move |t| (di, t)))
        .collect();

    let records: Vec<TrialRecord> = cells
        .par_iter()
        .map(|&(di, trial)| {
            let d = config.d_values[di];
            let seed = trial_seed(config.base_seed, trial, di, num_d);
            let start = Instant::now();
            let outcome = run_one_trial(ps, m, d, seed, config, &baseline);
            let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
            let (ratio, projected_cost, original_cost, error) = match outcome {
                Ok(v) => v,
                Err(e) => (f64::NAN, f64::NAN, baseline_cost(&baseline), Some(e.to_string())),
            };
            TrialRecord { d, trial, seed, ratio, projected_cost, original_cost, wall_time_ms, error }
        })
        .collect();

    let aggregates = aggregate(&config.d_values, &records);
    let mut report = ExperimentReport {
        schema: REPORT_SCHEMA,
        config: config.echo(),
        records,
        aggregates,
        deterministic_digest: String::new(),
    };
    report.deterministic_digest = deterministic_digest(&report);
    Ok(report)
}

fn baseline_cost(baseline: &Baseline) -> f64 {
    match baseline {
        Baseline::Mst { cost } => *cost,
        Baseline::Fl { cost, .. } => *cost,
    }
}

type TrialOutcome = (f64, f64, f64, Option<String>);

fn run_one_trial(
    ps: &PointSet,
    m: usize,
    d: usize,
    seed: u64,
    config: &ExperimentConfig,
    baseline: &Baseline,
) -> Result<TrialOutcome> {
    let g = sample_projection(m, d, seed)?;
    let gx = apply(&g, ps)?;
    match baseline {
        Baseline::Mst { cost } => {
            let tree = mst_exact(&gx);
            let pullback = tree_cost_in(&tree, ps)?;
            let projected = tree_cost_in(&tree, &gx)?;
            let ratio = if *cost > 0.0 { pullback / cost } else { 1.0 };
            Ok((ratio, projected, *cost, None))
        }
        Baseline::Fl { config: orig_cfg, cost } => {
            let variant = orig_cfg.variant;
            match budget_config(&gx, variant, config.facility_budget) {
                Err(msg) => Ok((f64::NAN, f64::NAN, *cost, Some(msg))),
                Ok(proj_cfg) => {
                    let profile = compute_radii(&gx, &proj_cfg)?;
                    let solution = mp_solve(&gx, &profile)?;
                    let pullback = evaluate_cost(ps, &solution.facilities, orig_cfg)?;
                    Ok((pullback.total / cost, solution.total, *cost, None))
                }
            }
        }
    }
}

fn aggregate(d_values: &[usize], records: &[TrialRecord]) -> Vec<Aggregate> {
    d_values
        .iter()
        .map(|&d| {
            let ratios: Vec<f64> = records
                .iter()
                .filter(|r| r.d == d && r.error.is_none())
                .map(|r| r.ratio)
                .collect();
            let times: Vec<f64> =
                records.iter().filter(|r| r.d == d).map(|r| r.wall_time_ms).collect();
            let (mean, std) = mean_std(&ratios);
            let time_mean = if times.is_empty() {
                0.0
            } else {
                times.iter().sum::<f64>() / times.len() as f64
            };
            Aggregate { d, ratio_mean: mean, ratio_std: std, time_mean_ms: time_mean }
        })
        .collect()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// The paired sweep over the low- and high-doubling-dimension datasets, with
/// the per-dataset minimal dimension reaching the relative-error target.
#[derive(Debug, Clone, Serialize)]
pub struct DoublingComparisonReport {
    pub schema: u32,
    pub n: usize,
    pub epsilon_target: f64,
    pub prefix_gauss: ExperimentReport,
    pub axis_gauss: ExperimentReport,
    /// Smallest probed d with mean pullback relative error <= epsilon_target.
    pub minimal_d_prefix: Option<usize>,
    pub minimal_d_axis: Option<usize>,
    pub deterministic_digest: String,
}

impl DoublingComparisonReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# schema={} n={} epsilon={} minimal_d_prefix={:?} minimal_d_axis={:?} digest={}\n",
            self.schema,
            self.n,
            self.epsilon_target,
            self.minimal_d_prefix,
            self.minimal_d_axis,
            self.deterministic_digest
        ));
        out.push_str("dataset,kind,d,trial,seed,ratio,projected_cost,original_cost,wall_time_ms,ratio_mean,ratio_std,time_mean_ms\n");
        for (name, rep) in
            [("prefix-gauss", &self.prefix_gauss), ("axis-gauss", &self.axis_gauss)]
        {
            for r in &rep.records {
                out.push_str(&format!(
                    "{name},record,{},{},{},{},{},{},{},,,\n",
                    r.d, r.trial, r.seed, r.ratio, r.projected_cost, r.original_cost, r.wall_time_ms
                ));
            }
            for a in &rep.aggregates {
                out.push_str(&format!(
                    "{name},aggregate,{},,,,,,,{},{},{}\n",
                    a.d, a.ratio_mean, a.ratio_std, a.time_mean_ms
                ));
            }
        }
        out
    }
}

/// Runs the MST ratio sweep on the prefix-Gaussian and axis-Gaussian datasets
/// (same `g` draws) and reports the minimal dimension reaching the target
/// relative error for each.
pub fn run_doubling_comparison(
    n: usize,
    d_values: &[usize],
    trials: usize,
    base_seed: u64,
    epsilon_target: f64,
) -> Result<DoublingComparisonReport> {
    if n < 10 {
        return Err(Error::InvalidInput("doubling comparison needs n >= 10".into()));
    }
    let prefix = gen_prefix_gauss(n, base_seed)?;
    let axis = gen_axis_gauss(n, base_seed)?;

    let mut cfg = ExperimentConfig::new(Task::Mst, d_values.to_vec(), trials, base_seed);
    cfg.epsilon_target = epsilon_target;

    cfg.input_label = format!("prefix-gauss:size={n}:seed={base_seed}");
    let rep_prefix = run_ratio_sweep(&prefix, &cfg)?;
    cfg.input_label = format!("axis-gauss:size={n}:seed={base_seed}");
    let rep_axis = run_ratio_sweep(&axis, &cfg)?;

    let minimal_d_prefix = rep_prefix.minimal_d_within(epsilon_target);
    let minimal_d_axis = rep_axis.minimal_d_within(epsilon_target);
    let mut report = DoublingComparisonReport {
        schema: REPORT_SCHEMA,
        n,
        epsilon_target,
        prefix_gauss: rep_prefix,
        axis_gauss: rep_axis,
        minimal_d_prefix,
        minimal_d_axis,
        deterministic_digest: String::new(),
    };
    report.deterministic_digest = deterministic_digest(&report);
    Ok(report)
}

/// The structured instances whose behaviour under aggressive projection is
/// deliberately pathological.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CounterexampleKind {
    /// Scaled identity vectors: the projected radii sum collapses below the
    /// original optimum as the instance grows.
    FlIdentity,
    /// Star of identity vectors: the projected MST cost collapses.
    MstStar,
    /// Axis grid: the pulled-back MST blows up.
    MstGrid,
    /// Scaled basis walk: a near-optimal projected solution that drops one
    /// facility pulls back badly.
    Walk,
    /// Paired points: the projected closest pair undershoots the original.
    KmeansPairs,
}

impl fmt::Display for CounterexampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CounterexampleKind::FlIdentity => "fl-identity",
            CounterexampleKind::MstStar => "mst-star",
            CounterexampleKind::MstGrid => "mst-grid",
            CounterexampleKind::Walk => "walk",
            CounterexampleKind::KmeansPairs => "kmeans-pairs",
        })
    }
}

impl FromStr for CounterexampleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fl-identity" => CounterexampleKind::FlIdentity,
            "mst-star" => CounterexampleKind::MstStar,
            "mst-grid" => CounterexampleKind::MstGrid,
            "walk" => CounterexampleKind::Walk,
            "kmeans-pairs" => CounterexampleKind::KmeansPairs,
            other => {
                return Err(Error::InvalidInput(format!("unknown counterexample kind: {other}")))
            }
        })
    }
}

/// Grid resolution used by the mst-grid demo. The asymptotic choice collapses
/// below 1 at desk scale, so a small fixed resolution stands in.
const DEMO_GRID_RESOLUTION: usize = 5;

/// Generates the requested construction at the given size, projects it
/// `trials` times to dimension `d`, and reports that construction's
/// diagnostic ratio per trial (see [`CounterexampleKind`]).
pub fn run_counterexample_demo(
    kind: CounterexampleKind,
    size: usize,
    d: usize,
    trials: usize,
    base_seed: u64,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    if d == 0 {
        return Err(Error::InvalidInput("projection dimension must be at least 1".into()));
    }

    // Instance plus the trial-independent reference cost.
    let (ps, reference, label) = match kind {
        CounterexampleKind::FlIdentity => {
            // The asymptotic scale (ln n / (10 d))^(1/4) is below 1 at any
            // desk-scale n; clamp so all-open remains the optimum.
            let scale = ((size as f64).ln() / (10.0 * d as f64)).sqrt().sqrt().max(1.0);
            let ps = gen_scaled_identity(size, scale)?;
            (ps, size as f64, format!("fl-identity:m={size}:scale={scale}"))
        }
        CounterexampleKind::MstStar => {
            let ps = gen_star_identity(size)?;
            let cost = tree_cost_in(&mst_exact(&ps), &ps)?;
            (ps, cost, format!("mst-star:m={size}"))
        }
        CounterexampleKind::MstGrid => {
            let ps = gen_axis_grid(size, DEMO_GRID_RESOLUTION)?;
            let cost = tree_cost_in(&mst_exact(&ps), &ps)?;
            (ps, cost, format!("mst-grid:m={size}:c={DEMO_GRID_RESOLUTION}"))
        }
        CounterexampleKind::Walk => {
            let scale = (size as f64).powf(1.0 + 1.0 / (2.0 * d as f64));
            let ps = gen_walk(size, scale)?;
            // All-open cost: one unit opening cost per point, zero connection.
            (ps, size as f64, format!("walk:m={size}:scale={scale}"))
        }
        CounterexampleKind::KmeansPairs => {
            let ps = gen_pair_gadget(size, d)?;
            let (_, _, dist) = closest_pair(&ps)?;
            (ps, dist, format!("kmeans-pairs:t={size}:d-for-r={d}"))
        }
    };

    let m = ps.dim();
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = base_seed.wrapping_add(trial as u64);
            let start = Instant::now();
            let outcome = demo_trial(kind, &ps, m, d, seed, reference);
            let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
            let (ratio, projected_cost, error) = match outcome {
                Ok((r, p)) => (r, p, None),
                Err(e) => (f64::NAN, f64::NAN, Some(e.to_string())),
            };
            TrialRecord {
                d,
                trial,
                seed,
                ratio,
                projected_cost,
                original_cost: reference,
                wall_time_ms,
                error,
            }
        })
        .collect();

    let aggregates = aggregate(&[d], &records);
    let mut config = ExperimentConfig::new(Task::Mst, vec![d], trials, base_seed);
    config.input_label = label;
    let mut echo = config.echo();
    echo.task = format!("counterexample:{kind}");
    let mut report = ExperimentReport {
        schema: REPORT_SCHEMA,
        config: echo,
        records,
        aggregates,
        deterministic_digest: String::new(),
    };
    report.deterministic_digest = deterministic_digest(&report);
    Ok(report)
}

fn demo_trial(
    kind: CounterexampleKind,
    ps: &PointSet,
    m: usize,
    d: usize,
    seed: u64,
    reference: f64,
) -> Result<(f64, f64)> {
    let g = sample_projection(m, d, seed)?;
    let gx = apply(&g, ps)?;
    match kind {
        CounterexampleKind::FlIdentity => {
            let profile = compute_radii(&gx, &FLConfig::uniform(Variant::Linear))?;
            let sum = radii_cost_estimate(&profile);
            Ok((sum / reference, sum))
        }
        CounterexampleKind::MstStar => {
            let tree = mst_exact(&gx);
            let projected = tree_cost_in(&tree, &gx)?;
            Ok((projected / reference, projected))
        }
        CounterexampleKind::MstGrid => {
            let tree = mst_exact(&gx);
            let pullback = tree_cost_in(&tree, ps)?;
            let projected = tree_cost_in(&tree, &gx)?;
            Ok((pullback / reference, projected))
        }
        CounterexampleKind::Walk => {
            // Drop the facility whose projected nearest neighbor is closest;
            // the remaining set is a near-optimal projected solution.
            let n = gx.len();
            let mut drop = 0usize;
            let mut best = f64::INFINITY;
            for p in 0..n {
                let mut nn = f64::INFINITY;
                for q in 0..n {
                    if q != p {
                        nn = nn.min(gx.distance(p, q));
                    }
                }
                if nn < best {
                    best = nn;
                    drop = p;
                }
            }
            let facilities: Vec<usize> = (0..n).filter(|&p| p != drop).collect();
            let cfg = FLConfig::uniform(Variant::Linear);
            let projected = evaluate_cost(&gx, &facilities, &cfg)?.total;
            let pullback = evaluate_cost(ps, &facilities, &cfg)?.total;
            Ok((pullback / reference, projected))
        }
        CounterexampleKind::KmeansPairs => {
            let (_, _, dist) = closest_pair(&gx)?;
            Ok((dist / reference, dist))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::facility::brute_force_optimum;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_instance(seed: u64, n: usize, m: usize) -> PointSet {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> =
            (0..n).map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        PointSet::from_rows(&rows).unwrap()
    }

    #[test]
    fn mst_sweep_shape_and_floor() {
        let ps = random_instance(1, 30, 12);
        let cfg = ExperimentConfig::new(Task::Mst, vec![5, 10], 2, 7);
        let rep = run_ratio_sweep(&ps, &cfg).unwrap();
        assert_eq!(rep.records.len(), 4);
        assert!(rep.records.iter().all(|r| r.ratio >= 1.0 - 1e-9));
        assert_eq!(rep.aggregates.len(), 2);
        // Ordered merge: d-major, trial-minor.
        let order: Vec<(usize, usize)> = rep.records.iter().map(|r| (r.d, r.trial)).collect();
        assert_eq!(order, vec![(5, 0), (5, 1), (10, 0), (10, 1)]);
    }

    #[test]
    fn config_validation() {
        let ps = random_instance(2, 5, 3);
        let mut cfg = ExperimentConfig::new(Task::Mst, vec![], 2, 0);
        assert!(run_ratio_sweep(&ps, &cfg).is_err());
        cfg.d_values = vec![5, 5];
        assert!(run_ratio_sweep(&ps, &cfg).is_err());
        cfg.d_values = vec![5, 10];
        cfg.trials = 0;
        assert!(run_ratio_sweep(&ps, &cfg).is_err());
        cfg.trials = 1;
        cfg.epsilon_target = 0.0;
        assert!(run_ratio_sweep(&ps, &cfg).is_err());
        cfg.epsilon_target = 1.0;
        assert!(run_ratio_sweep(&ps, &cfg).is_ok());
    }

    #[test]
    fn fl_single_point_ratio_is_one() {
        let ps = PointSet::from_rows(&[vec![3.0, 4.0]]).unwrap();
        for task in [Task::Fl, Task::FlSquared] {
            let cfg = ExperimentConfig::new(task, vec![2, 6], 3, 11);
            let rep = run_ratio_sweep(&ps, &cfg).unwrap();
            assert!(rep.records.iter().all(|r| r.ratio == 1.0));
        }
    }

    #[test]
    fn reports_are_deterministic_modulo_timing() {
        let ps = random_instance(3, 25, 10);
        let cfg = ExperimentConfig::new(Task::Fl, vec![3, 6], 3, 99);
        let a = run_ratio_sweep(&ps, &cfg).unwrap();
        let b = run_ratio_sweep(&ps, &cfg).unwrap();
        assert_eq!(a.deterministic_digest, b.deterministic_digest);
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.ratio, rb.ratio);
            assert_eq!(ra.seed, rb.seed);
        }
        let mut cfg2 = cfg.clone();
        cfg2.base_seed = 100;
        let c = run_ratio_sweep(&ps, &cfg2).unwrap();
        assert_ne!(a.deterministic_digest, c.deterministic_digest);
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let ps = random_instance(4, 12, 6);
        let cfg = ExperimentConfig::new(Task::Mst, vec![2, 4, 8], 5, 1000);
        let rep = run_ratio_sweep(&ps, &cfg).unwrap();
        let mut seeds: Vec<u64> = rep.records.iter().map(|r| r.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), rep.records.len());
    }

    #[test]
    fn fl_pullback_never_beats_the_true_optimum() {
        for seed in 0..5 {
            let ps = random_instance(100 + seed, 9, 4);
            let cfg = ExperimentConfig::new(Task::Fl, vec![2, 4], 4, seed);
            let rep = run_ratio_sweep(&ps, &cfg).unwrap();
            let opt = brute_force_optimum(&ps, &FLConfig::uniform(Variant::Linear), 15).unwrap();
            let denom = rep.records[0].original_cost;
            for r in &rep.records {
                assert!(r.ratio >= opt.total / denom - 1e-9);
            }
        }
    }

    #[test]
    fn facility_budget_controls_open_count() {
        let ps = random_instance(8, 60, 6);
        for target in [30usize, 12, 6] {
            let cfg = budget_config(&ps, Variant::Linear, Some(target)).unwrap();
            let prof = compute_radii(&ps, &cfg).unwrap();
            let opened = mp_solve(&ps, &prof).unwrap().facilities.len();
            let lo = ((0.9 * target as f64).ceil()) as usize;
            let hi = ((1.1 * target as f64).floor()) as usize;
            assert!(opened >= lo && opened <= hi, "target {target}: opened {opened}");
        }
        assert!(budget_config(&ps, Variant::Linear, Some(0)).is_err());
        assert!(budget_config(&ps, Variant::Linear, Some(61)).is_err());
    }

    #[test]
    fn doubling_comparison_trivial_epsilon() {
        let rep = run_doubling_comparison(40, &[8, 16], 3, 5, 1.0).unwrap();
        assert_eq!(rep.minimal_d_prefix, Some(8));
        assert_eq!(rep.minimal_d_axis, Some(8));
        assert!(run_doubling_comparison(5, &[4], 1, 0, 0.5).is_err());
    }

    #[test]
    fn counterexample_reports_have_expected_shape() {
        let rep =
            run_counterexample_demo(CounterexampleKind::MstStar, 40, 4, 3, 2).unwrap();
        assert_eq!(rep.records.len(), 3);
        assert!(rep.records.iter().all(|r| r.error.is_none()));
        assert!(rep.records.iter().all(|r| r.original_cost == 40.0));

        let rep =
            run_counterexample_demo(CounterexampleKind::MstGrid, 6, 3, 2, 9).unwrap();
        assert!(rep.records.iter().all(|r| r.ratio >= 1.0 - 1e-9));

        let rep = run_counterexample_demo(CounterexampleKind::Walk, 30, 3, 2, 9).unwrap();
        // Dropping one facility always reconnects the dropped point to a
        // neighbor at exactly the step length, so the pullback cost has a
        // closed form: (m - 1) + m^(1 + 1/2d).
        let m = 30f64;
        let expect = (m - 1.0 + m.powf(1.0 + 1.0 / 6.0)) / m;
        for r in &rep.records {
            assert!((r.ratio - expect).abs() < 1e-9 * expect, "{} vs {expect}", r.ratio);
        }
    }

    #[test]
    fn budgeted_fl_sweep_completes_without_record_errors() {
        let ps = crate::instances::gen_prefix_gauss(60, 21).unwrap();
        let mut cfg = ExperimentConfig::new(Task::Fl, vec![4, 8], 3, 77);
        cfg.facility_budget = Some(12);
        let rep = run_ratio_sweep(&ps, &cfg).unwrap();
        assert!(rep.records.iter().all(|r| r.error.is_none()));
        assert!(rep.records.iter().all(|r| r.ratio.is_finite() && r.ratio > 0.0));
    }

    #[test]
    fn kmeans_pairs_demo_mostly_picks_a_unit_pair() {
        // At t = 512, d = 3 the squeezed pair is longer than the unit pairs,
        // and projection shrinks some unit pair well below it.
        let t = 512;
        let d = 3;
        let rep = run_counterexample_demo(CounterexampleKind::KmeansPairs, t, d, 20, 31).unwrap();
        let r = crate::instances::pair_gadget_r(t, d);
        let unit_hits = rep
            .records
            .iter()
            .filter(|rec| rec.ratio <= 1.0 / r + 1e-9)
            .count();
        assert!(unit_hits >= 10, "only {unit_hits}/20 trials within 1/R");
    }

    #[test]
    fn csv_flattening_contains_records() {
        let ps = random_instance(5, 10, 5);
        let cfg = ExperimentConfig::new(Task::Mst, vec![2], 2, 0);
        let rep = run_ratio_sweep(&ps, &cfg).unwrap();
        let csv = rep.to_csv();
        assert!(csv.contains("kind,d,trial"));
        assert_eq!(csv.lines().filter(|l| l.starts_with("record,")).count(), 2);
        assert_eq!(csv.lines().filter(|l| l.starts_with("aggregate,")).count(), 1);
    }
}
