//! Command-line surface: instance generation, radii/solver/MST runs with
//! optional projection, doubling estimation, the exhaustive optimum, and the
//! experiment harness. All outputs are deterministic given their flags and
//! carry a `deterministic_digest` over the non-timing fields.
//!
//! Exit codes: 0 success, 1 parse/config error, 2 size-guard refusal.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use projclust::{
    apply, brute_force_optimum, closest_pair, compute_radii, deterministic_digest, diameter,
    doubling_constant_estimate, evaluate_cost, facility_budget_config, instances, mp_solve,
    mst_exact, radii_cost_estimate, run_counterexample_demo, run_doubling_comparison,
    run_ratio_sweep, sample_projection, tree_cost_in, CounterexampleKind, Error,
    ExperimentConfig, FLConfig, FacilitySolution, GeneratorKind, InstanceSpec, PointSet, Task,
    Variant, GAUSSIAN_PIPELINE_VERSION,
};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(
    name = "projclust",
    version,
    about = "Random-projection experiments for Euclidean facility location and MST clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance (CSV by default)
    Gen(GenArgs),
    /// Compute per-point radii, optionally after projection
    Radii(RadiiArgs),
    /// Greedy facility location, optionally after projection
    Fl(FlArgs),
    /// Exact minimum spanning tree, optionally after projection
    Mst(MstArgs),
    /// Estimate the doubling constant
    Doubling(DoublingArgs),
    /// Exhaustive facility location optimum (size-guarded)
    Optimum(OptimumArgs),
    /// Experiment harness
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct GenArgs {
    /// Generator kind: prefix-gauss | axis-gauss | scaled-identity |
    /// star-identity | axis-grid | walk | comb | pair-gadget
    #[arg(long)]
    kind: String,
    /// Primary count (n, m, k, or t depending on the kind)
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scale parameter (scaled-identity, walk)
    #[arg(long)]
    scale: Option<f64>,
    /// Grid resolution (axis-grid)
    #[arg(long)]
    grid_c: Option<usize>,
    /// Dimension parameter tying the pair-gadget squeeze to a projection
    #[arg(long)]
    d_for_r: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct RadiiArgs {
    #[arg(long)]
    input: PathBuf,
    /// Use squared connection costs
    #[arg(long)]
    squared: bool,
    /// Project to this dimension before computing radii
    #[arg(long)]
    project: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct FlArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    squared: bool,
    #[arg(long)]
    project: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scale opening costs so roughly this many facilities open
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct MstArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    project: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct DoublingArgs {
    #[arg(long)]
    input: PathBuf,
    /// Ball centers to probe (0 = all points)
    #[arg(long, default_value_t = 0)]
    centers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct OptimumArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    squared: bool,
    /// Refuse instances with more points than this
    #[arg(long, default_value_t = 15)]
    max_n: usize,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Project, solve, pull back, and compare against the original-space
    /// solution over a grid of dimensions and trials
    RatioSweep(RatioSweepArgs),
    /// MST sweeps on the low- and high-doubling-dimension datasets
    DoublingCompare(DoublingCompareArgs),
    /// Structured instances with pathological projection behaviour
    Counterexample(CounterexampleArgs),
}

#[derive(Args)]
struct RatioSweepArgs {
    #[arg(long)]
    input: PathBuf,
    /// fl | fl-squared | mst
    #[arg(long)]
    task: String,
    /// Comma-separated dimensions; ranges like 2..40 are inclusive
    #[arg(long, value_parser = parse_d_values)]
    d_values: std::vec::Vec<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct DoublingCompareArgs {
    /// Number of points in each dataset
    #[arg(long)]
    size: usize,
    #[arg(long, value_parser = parse_d_values)]
    d_values: std::vec::Vec<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct CounterexampleArgs {
    /// fl-identity | mst-star | mst-grid | walk | kmeans-pairs
    #[arg(long)]
    kind: String,
    #[arg(long)]
    size: usize,
    /// Projection dimension
    #[arg(long)]
    project: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn parse_d_values(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
            if a > b {
                return Err(format!("empty range {a}..{b}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad dimension `{part}`"))?);
        }
    }
    if out.is_empty() {
        return Err("no dimensions given".into());
    }
    Ok(out)
}

fn main() -> ExitCode {
    configure_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::SizeGuard { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

/// `PROJCLUST_THREADS` caps rayon parallelism; unset or 0 means automatic.
fn configure_threads() {
    if let Ok(v) = std::env::var("PROJCLUST_THREADS") {
        if let Ok(k) = v.trim().parse::<usize>() {
            if k > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Radii(args) => cmd_radii(args),
        Command::Fl(args) => cmd_fl(args),
        Command::Mst(args) => cmd_mst(args),
        Command::Doubling(args) => cmd_doubling(args),
        Command::Optimum(args) => cmd_optimum(args),
        Command::Experiment(cmd) => match cmd {
            ExperimentCommand::RatioSweep(args) => cmd_ratio_sweep(args),
            ExperimentCommand::DoublingCompare(args) => cmd_doubling_compare(args),
            ExperimentCommand::Counterexample(args) => cmd_counterexample(args),
        },
    }
}

fn emit(text: String, output: Option<&PathBuf>) -> Result<(), Error> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, output: Option<&PathBuf>) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
    text.push('\n');
    emit(text, output)
}

fn csv_unsupported(cmd: &str) -> Error {
    Error::InvalidInput(format!("--format csv is not supported for `{cmd}`"))
}

#[derive(Serialize)]
struct ProjectionInfo {
    d: usize,
    seed: u64,
    generator_version: &'static str,
}

fn project_input(
    ps: &PointSet,
    project: Option<usize>,
    seed: u64,
) -> Result<(PointSet, Option<ProjectionInfo>), Error> {
    match project {
        None => Ok((ps.clone(), None)),
        Some(d) => {
            let g = sample_projection(ps.dim(), d, seed)?;
            let gx = apply(&g, ps)?;
            Ok((gx, Some(ProjectionInfo { d, seed, generator_version: GAUSSIAN_PIPELINE_VERSION })))
        }
    }
}

fn variant_of(squared: bool) -> Variant {
    if squared {
        Variant::Squared
    } else {
        Variant::Linear
    }
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Linear => "linear",
        Variant::Squared => "squared",
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), Error> {
    let kind = GeneratorKind::from_str(&args.kind)?;
    let mut spec = InstanceSpec::new(kind, args.size, args.seed);
    if let Some(s) = args.scale {
        spec = spec.with_param("scale", s);
    }
    if let Some(c) = args.grid_c {
        spec = spec.with_param("grid-c", c as f64);
    }
    if let Some(d) = args.d_for_r {
        spec = spec.with_param("d-for-r", d as f64);
    }
    let ps = spec.generate()?;
    match args.format {
        Format::Csv => {
            let mut buf = Vec::new();
            instances::write_csv(&ps, &mut buf)?;
            emit(String::from_utf8(buf).expect("csv is utf-8"), args.output.as_ref())
        }
        Format::Json => {
            #[derive(Serialize)]
            struct GenOutput {
                schema: u32,
                spec: InstanceSpec,
                n: usize,
                m: usize,
                points: Vec<Vec<f64>>,
                deterministic_digest: String,
            }
            let mut out = GenOutput {
                schema: SCHEMA,
                spec,
                n: ps.len(),
                m: ps.dim(),
                points: (0..ps.len()).map(|i| ps.point(i).to_vec()).collect(),
                deterministic_digest: String::new(),
            };
            out.deterministic_digest = deterministic_digest(&out);
            emit_json(&out, args.output.as_ref())
        }
    }
}

fn cmd_radii(args: RadiiArgs) -> Result<(), Error> {
    let original = instances::load_csv(&args.input)?;
    let (space, projected) = project_input(&original, args.project, args.seed)?;
    let variant = variant_of(args.squared);
    let profile = compute_radii(&space, &FLConfig::uniform(variant))?;

    match args.format {
        Format::Csv => {
            let mut text = String::from("index,radius\n");
            for (i, r) in profile.radii().iter().enumerate() {
                let _ = writeln!(text, "{i},{r:.16e}");
            }
            emit(text, args.output.as_ref())
        }
        Format::Json => {
            #[derive(Serialize)]
            struct RadiiOutput {
                schema: u32,
                input: String,
                variant: &'static str,
                n: usize,
                projected: Option<ProjectionInfo>,
                radii: Vec<f64>,
                radii_cost_estimate: f64,
                deterministic_digest: String,
            }
            let mut out = RadiiOutput {
                schema: SCHEMA,
                input: args.input.display().to_string(),
                variant: variant_name(variant),
                n: space.len(),
                projected,
                radii: profile.radii().to_vec(),
                radii_cost_estimate: radii_cost_estimate(&profile),
                deterministic_digest: String::new(),
            };
            out.deterministic_digest = deterministic_digest(&out);
            emit_json(&out, args.output.as_ref())
        }
    }
}

fn cmd_fl(args: FlArgs) -> Result<(), Error> {
    if args.format == Format::Csv {
        return Err(csv_unsupported("fl"));
    }
    let original = instances::load_csv(&args.input)?;
    let (space, projected) = project_input(&original, args.project, args.seed)?;
    let variant = variant_of(args.squared);
    // Budget matching happens in the space being solved; the found costs are
    // also used for the pullback evaluation.
    let config = facility_budget_config(&space, variant, args.budget)?;
    let profile = compute_radii(&space, &config)?;
    let solution = mp_solve(&space, &profile)?;
    let pullback = if projected.is_some() {
        Some(evaluate_cost(&original, &solution.facilities, &config)?)
    } else {
        None
    };

    #[derive(Serialize)]
    struct FlOutput {
        schema: u32,
        input: String,
        variant: &'static str,
        budget: Option<usize>,
        opening_cost: f64,
        projected: Option<ProjectionInfo>,
        solution: FacilitySolution,
        pullback: Option<FacilitySolution>,
        deterministic_digest: String,
    }
    let mut out = FlOutput {
        schema: SCHEMA,
        input: args.input.display().to_string(),
        variant: variant_name(variant),
        budget: args.budget,
        opening_cost: config.opening_cost(0),
        projected,
        solution,
        pullback,
        deterministic_digest: String::new(),
    };
    out.deterministic_digest = deterministic_digest(&out);
    emit_json(&out, args.output.as_ref())
}

fn cmd_mst(args: MstArgs) -> Result<(), Error> {
    if args.format == Format::Csv {
        return Err(csv_unsupported("mst"));
    }
    let original = instances::load_csv(&args.input)?;
    let (space, projected) = project_input(&original, args.project, args.seed)?;
    let tree = mst_exact(&space);
    let cost = tree_cost_in(&tree, &space)?;

    #[derive(Serialize)]
    struct PullbackInfo {
        pullback_cost: f64,
        original_mst_cost: f64,
        ratio_pullback: f64,
        ratio_cost: f64,
    }
    let pullback = if projected.is_some() {
        let original_tree = mst_exact(&original);
        let m = tree_cost_in(&original_tree, &original)?;
        let pullback_cost = tree_cost_in(&tree, &original)?;
        let (ratio_pullback, ratio_cost) = if m > 0.0 {
            (pullback_cost / m, cost / m)
        } else {
            (1.0, 1.0)
        };
        Some(PullbackInfo { pullback_cost, original_mst_cost: m, ratio_pullback, ratio_cost })
    } else {
        None
    };

    #[derive(Serialize)]
    struct MstOutput {
        schema: u32,
        input: String,
        n: usize,
        projected: Option<ProjectionInfo>,
        cost: f64,
        edges: Vec<(usize, usize)>,
        pullback: Option<PullbackInfo>,
        deterministic_digest: String,
    }
    let mut out = MstOutput {
        schema: SCHEMA,
        input: args.input.display().to_string(),
        n: space.len(),
        projected,
        cost,
        edges: tree.edges().to_vec(),
        pullback,
        deterministic_digest: String::new(),
    };
    out.deterministic_digest = deterministic_digest(&out);
    emit_json(&out, args.output.as_ref())
}

fn cmd_doubling(args: DoublingArgs) -> Result<(), Error> {
    if args.format == Format::Csv {
        return Err(csv_unsupported("doubling"));
    }
    let ps = instances::load_csv(&args.input)?;
    let centers = if args.centers == 0 { ps.len() } else { args.centers };
    let estimate = doubling_constant_estimate(&ps, centers, args.seed)?;

    #[derive(Serialize)]
    struct DoublingOutput {
        schema: u32,
        input: String,
        n: usize,
        centers_sampled: usize,
        seed: u64,
        lambda_hat: usize,
        ddim_hat: f64,
        scales_probed: Vec<f64>,
        diameter: f64,
        closest_pair: Option<(usize, usize, f64)>,
        deterministic_digest: String,
    }
    let mut out = DoublingOutput {
        schema: SCHEMA,
        input: args.input.display().to_string(),
        n: ps.len(),
        centers_sampled: centers.min(ps.len()),
        seed: args.seed,
        lambda_hat: estimate.lambda_hat,
        ddim_hat: estimate.ddim_hat,
        scales_probed: estimate.scales_probed,
        diameter: diameter(&ps),
        closest_pair: closest_pair(&ps).ok(),
        deterministic_digest: String::new(),
    };
    out.deterministic_digest = deterministic_digest(&out);
    emit_json(&out, args.output.as_ref())
}

fn cmd_optimum(args: OptimumArgs) -> Result<(), Error> {
    if args.format == Format::Csv {
        return Err(csv_unsupported("optimum"));
    }
    let ps = instances::load_csv(&args.input)?;
    let variant = variant_of(args.squared);
    let solution = brute_force_optimum(&ps, &FLConfig::uniform(variant), args.max_n)?;

    #[derive(Serialize)]
    struct OptimumOutput {
        schema: u32,
        input: String,
        variant: &'static str,
        max_n: usize,
        solution: FacilitySolution,
        deterministic_digest: String,
    }
    let mut out = OptimumOutput {
        schema: SCHEMA,
        input: args.input.display().to_string(),
        variant: variant_name(variant),
        max_n: args.max_n,
        solution,
        deterministic_digest: String::new(),
    };
    out.deterministic_digest = deterministic_digest(&out);
    emit_json(&out, args.output.as_ref())
}

fn cmd_ratio_sweep(args: RatioSweepArgs) -> Result<(), Error> {
    let ps = instances::load_csv(&args.input)?;
    let task = Task::from_str(&args.task)?;
    let mut config = ExperimentConfig::new(task, args.d_values.clone(), args.trials, args.seed);
    config.epsilon_target = args.epsilon;
    config.facility_budget = args.budget;
    config.input_label = args.input.display().to_string();
    let report = run_ratio_sweep(&ps, &config)?;
    match args.format {
        Format::Json => emit_json(&report, args.output.as_ref()),
        Format::Csv => emit(report.to_csv(), args.output.as_ref()),
    }
}

fn cmd_doubling_compare(args: DoublingCompareArgs) -> Result<(), Error> {
    let report =
        run_doubling_comparison(args.size, &args.d_values, args.trials, args.seed, args.epsilon)?;
    match args.format {
        Format::Json => emit_json(&report, args.output.as_ref()),
        Format::Csv => emit(report.to_csv(), args.output.as_ref()),
    }
}

fn cmd_counterexample(args: CounterexampleArgs) -> Result<(), Error> {
    let kind = CounterexampleKind::from_str(&args.kind)?;
    let report = run_counterexample_demo(kind, args.size, args.project, args.trials, args.seed)?;
    match args.format {
        Format::Json => emit_json(&report, args.output.as_ref()),
        Format::Csv => emit(report.to_csv(), args.output.as_ref()),
    }
}
