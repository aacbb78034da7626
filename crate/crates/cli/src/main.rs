//! `irbm`: train, evaluate, sample and inspect RBM, ordered RBM and infinite
//! RBM models from the command line.
//!
//! Exit codes: 0 on success, 2 for usage or validation errors (including
//! missing inputs), 1 for runtime failures.

mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use irbm::checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
use irbm::data_io::{encode_pgm_grid, load_dataset, synthetic_patterns, write_packed, Dataset};
use irbm::energy::exact_log_partition_small;
use irbm::evaluation::{ais_log_partition, estimate_nll, gradcheck, inspect_z, AisBase, AisConfig};
use irbm::model::{init_model, ModelParams, Variant, DEFAULT_BETA, DEFAULT_INIT_SCALE};
use irbm::sampling::{init_chain, run_chain, InitMode};
use irbm::training::{train_with, Method, RegKind, TrainConfig, TrainState};
use irbm::RngStream;
use thiserror::Error;

use crate::manifest::{DatasetInfo, RunManifest};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] irbm::Error),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use irbm::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
            CliError::Core(e) => match e {
                E::ShapeMismatch { .. }
                | E::InvalidDimensions(_)
                | E::BetaTooSmall(_)
                | E::DivergentTail(_)
                | E::ZOutOfRange { .. }
                | E::WrongVariant { .. }
                | E::EnumerationTooLarge { .. }
                | E::InvalidConfig(_)
                | E::OutOfRange { .. }
                | E::Parse { .. } => 2,
                _ => 1,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Wraps failures to read user-supplied inputs as usage errors.
fn input<T>(what: &str, r: irbm::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::Usage(format!("cannot load {what}: {e}")))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Runtime(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

#[derive(Debug, Parser)]
#[command(name = "irbm", version, about = "Ordered and infinite restricted Boltzmann machines")]
struct Cli {
    /// Worker threads for AIS (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a model and write a checkpoint directory.
    Train(TrainArgs),
    /// Estimate ln Z and the average negative log-likelihood.
    Eval(EvalArgs),
    /// Draw samples by Gibbs sampling and write a PGM grid.
    Sample(SampleArgs),
    /// Write P(z|v) tables and top-k examples per z interval.
    InspectZ(InspectArgs),
    /// Compare analytic free-energy gradients to finite differences.
    Gradcheck(GradcheckArgs),
    /// Write a synthetic binary dataset in the packed format.
    GenData(GenDataArgs),
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, value_parser = parse_variant)]
    model: Variant,
    /// Packed (GBZD) or IDX dataset.
    #[arg(long)]
    data: PathBuf,
    /// Hidden units (initial l for the infinite model).
    #[arg(long)]
    hidden: usize,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    #[arg(long, value_parser = parse_reg, default_value = "none")]
    reg: RegKind,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 64)]
    batch: usize,
    #[arg(long, default_value_t = 10)]
    cd_steps: usize,
    #[arg(long, value_parser = parse_method, default_value = "pcd")]
    method: Method,
    #[arg(long, default_value_t = 5000)]
    epochs: usize,
    #[arg(long, default_value_t = 1234)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_INIT_SCALE)]
    init_scale: f64,
    /// Cap on l for the infinite model (default 10·D).
    #[arg(long)]
    max_hidden: Option<usize>,
    /// Seed for binarizing IDX intensities.
    #[arg(long, default_value_t = 0)]
    binarize_seed: u64,
    /// Use only rows `START:END` of the dataset.
    #[arg(long)]
    rows: Option<String>,
    /// Also write `epoch_NNNNN/` checkpoints every N epochs (0 disables).
    #[arg(long, default_value_t = 0)]
    checkpoint_every: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BaseArg {
    Zero,
    Target,
    Data,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    ais_inter: usize,
    #[arg(long, default_value_t = 5000)]
    ais_chains: usize,
    #[arg(long, default_value_t = 0)]
    ais_seed: u64,
    #[arg(long, value_enum, default_value = "zero")]
    ais_base: BaseArg,
    /// Compute ln Z by enumerating all visible vectors.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = 0)]
    binarize_seed: u64,
    /// Use only rows `START:END` of the dataset.
    #[arg(long)]
    rows: Option<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InitArg {
    Random,
    #[value(name = "zK", alias = "zk")]
    ZK,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    #[arg(long, value_enum, default_value = "random")]
    init: InitArg,
    #[arg(long, default_value_t = 16)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    image: ImageArgs,
}

#[derive(Debug, Args)]
struct ImageArgs {
    /// Image width in pixels (default: √D when D is a square, else D).
    #[arg(long)]
    width: Option<usize>,
    /// Tiles per row of the output grid.
    #[arg(long)]
    columns: Option<usize>,
}

impl ImageArgs {
    fn shape(&self, dims: usize) -> CliResult<(usize, usize)> {
        let width = self.width.unwrap_or_else(|| {
            let s = (dims as f64).sqrt().round() as usize;
            if s * s == dims {
                s
            } else {
                dims
            }
        });
        if width == 0 || !dims.is_multiple_of(width) {
            return Err(CliError::Usage(format!("--width {width} does not divide {dims} pixels")));
        }
        Ok((width, dims / width))
    }

    fn columns(&self, count: usize) -> usize {
        self.columns.unwrap_or_else(|| ((count as f64).sqrt().ceil() as usize).max(1))
    }
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated half-open intervals `a:b` over z.
    #[arg(long, default_value = "1:2,2:5,5:10,10:20")]
    intervals: String,
    #[arg(long, default_value_t = 10)]
    top: usize,
    #[arg(long, default_value_t = 0)]
    binarize_seed: u64,
    /// Output directory for the CSV tables and image grids.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    image: ImageArgs,
}

#[derive(Debug, Args)]
struct GradcheckArgs {
    /// Check a saved model instead of a random one.
    #[arg(long, conflicts_with_all = ["model", "visible", "hidden"])]
    checkpoint: Option<PathBuf>,
    #[arg(long, value_parser = parse_variant, default_value = "irbm")]
    model: Variant,
    #[arg(long, default_value_t = 6)]
    visible: usize,
    #[arg(long, default_value_t = 4)]
    hidden: usize,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    /// Random parameters are drawn from U[-scale, scale].
    #[arg(long, default_value_t = 2.0)]
    scale: f64,
    #[arg(long, default_value_t = 10)]
    examples: usize,
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1e-5)]
    step: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct GenDataArgs {
    #[arg(long)]
    dims: usize,
    #[arg(long, default_value_t = 4)]
    patterns: usize,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: irbm::Error| e.to_string())
}

fn parse_reg(s: &str) -> Result<RegKind, String> {
    s.parse().map_err(|e: irbm::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: irbm::Error| e.to_string())
}

fn load_rows(path: &Path, binarize_seed: u64, rows: Option<&str>) -> CliResult<Dataset> {
    let dataset = input("dataset", load_dataset(path, binarize_seed))?;
    let Some(range) = rows else { return Ok(dataset) };
    let bad = || CliError::Usage(format!("bad --rows {range:?}: expected START:END within {} rows", dataset.len()));
    let (a, b) = range.split_once(':').ok_or_else(bad)?;
    let start: usize = a.trim().parse().map_err(|_| bad())?;
    let end: usize = b.trim().parse().map_err(|_| bad())?;
    if start >= end || end > dataset.len() {
        return Err(bad());
    }
    Ok(dataset.slice(start, end)?)
}

fn parse_intervals(s: &str) -> CliResult<Vec<(usize, usize)>> {
    s.split(',')
        .map(|part| {
            let bad = || CliError::Usage(format!("bad interval {part:?}: expected a:b with 1 ≤ a < b"));
            let (a, b) = part.trim().split_once(':').ok_or_else(bad)?;
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if a == 0 || a >= b {
                return Err(bad());
            }
            Ok((a, b))
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Sample(a) => cmd_sample(a),
        Command::InspectZ(a) => cmd_inspect_z(a),
        Command::Gradcheck(a) => cmd_gradcheck(a),
        Command::GenData(a) => cmd_gen_data(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn cmd_train(a: TrainArgs) -> CliResult<()> {
    let dataset = load_rows(&a.data, a.binarize_seed, a.rows.as_deref())?;
    let config = TrainConfig {
        lr: a.lr,
        reg: a.reg,
        lambda: a.lambda,
        batch_size: a.batch,
        gibbs_steps: a.cd_steps,
        epochs: a.epochs,
        method: a.method,
        seed: a.seed,
        beta: a.beta,
        max_hidden_cap: a.max_hidden,
        ..TrainConfig::default()
    };
    config.validate(a.model)?;
    if a.model != Variant::Irbm && a.hidden == 0 {
        return Err(CliError::Usage("--hidden must be positive".into()));
    }
    let mut params = init_model(a.model, dataset.dims(), a.hidden, a.beta, a.init_scale, a.seed)?;

    let manifest = RunManifest::new(
        "train",
        serde_json::json!({
            "model": a.model,
            "hidden": a.hidden,
            "init_scale": a.init_scale,
            "checkpoint_every": a.checkpoint_every,
            "binarize_seed": a.binarize_seed,
            "rows": a.rows,
            "train": config,
        }),
        vec![DatasetInfo::describe(&a.data, &dataset)?],
    );
    fs::create_dir_all(&a.out).map_err(|e| CliError::Runtime(format!("{}: {e}", a.out.display())))?;
    manifest.write(&a.out.join("manifest.json"))?;

    let mut state = TrainState::new(&params, &config);
    let mut history = Vec::new();
    let out = a.out.clone();
    let every = a.checkpoint_every;
    let snapshot = |params: &ModelParams, state: &TrainState, history: Vec<_>| Checkpoint {
        params: params.clone(),
        seed: a.seed,
        epoch: state.epoch,
        adagrad: Some(state.adagrad.clone()),
        pcd: state.pcd.clone(),
        history,
    };
    let records = train_with(&mut params, &dataset, &config, &mut state, |p, s, r| {
        history.push(r.clone());
        eprintln!("epoch {:>5}  F {:>12.6}  K {:>5}", r.epoch, r.mean_free_energy, r.num_hidden);
        if every > 0 && r.epoch % every == 0 {
            save_checkpoint(&out.join(format!("epoch_{:05}", r.epoch)), &snapshot(p, s, history.clone()))?;
        }
        Ok(())
    })?;
    save_checkpoint(&a.out, &snapshot(&params, &state, records.clone()))?;
    let final_f = records.last().map_or(f64::NAN, |r| r.mean_free_energy);
    println!("final K {}  mean free energy {final_f:.6}", params.num_hidden());
    Ok(())
}

fn load_model(path: &Path) -> CliResult<Checkpoint> {
    input("checkpoint", load_checkpoint(path))
}

fn cmd_eval(a: EvalArgs) -> CliResult<()> {
    let ckpt = load_model(&a.checkpoint)?;
    let params = &ckpt.params;
    let dataset = load_rows(&a.data, a.binarize_seed, a.rows.as_deref())?;
    if dataset.dims() != params.num_visible() {
        return Err(CliError::Usage(format!(
            "dataset has {} columns but the model has {} visible units",
            dataset.dims(),
            params.num_visible()
        )));
    }
    let (ln_z, lo, hi) = if a.exact {
        let z = exact_log_partition_small(params)?;
        (z, z, z)
    } else {
        let base = match a.ais_base {
            BaseArg::Zero => AisBase::Zero,
            BaseArg::Target => AisBase::Target,
            BaseArg::Data => AisBase::from_data_marginals(&dataset),
        };
        let cfg = AisConfig { num_intermediate: a.ais_inter, num_chains: a.ais_chains, seed: a.ais_seed, base };
        let r = ais_log_partition(params, &cfg).map_err(|e| match e {
            irbm::Error::AisDiverged { .. } => CliError::Runtime(e.to_string()),
            other => other.into(),
        })?;
        eprintln!("AIS effective sample size {:.1} of {}", r.ess, a.ais_chains);
        (r.ln_z_hat, r.ln_z_lo3sigma, r.ln_z_hi3sigma)
    };
    let (nll, ci) = estimate_nll(params, &dataset, ln_z)?;
    let model = params.variant.name();
    let size = params.num_hidden();
    println!("{:<6} {:>6} {:>14} {:>14} {:>14} {:>12} {:>10}", "model", "size", "lnZ", "lnZ_lo", "lnZ_hi", "nll", "ci");
    println!("{model:<6} {size:>6} {ln_z:>14.6} {lo:>14.6} {hi:>14.6} {nll:>12.6} {ci:>10.6}");
    if let Some(path) = &a.csv {
        let text = format!("model,size,lnZ,lnZ_lo,lnZ_hi,nll,ci\n{model},{size},{ln_z},{lo},{hi},{nll},{ci}\n");
        write_file(path, text.as_bytes())?;
    }
    Ok(())
}

fn cmd_sample(a: SampleArgs) -> CliResult<()> {
    let ckpt = load_model(&a.checkpoint)?;
    let params = &ckpt.params;
    if a.count == 0 {
        return Err(CliError::Usage("--count must be positive".into()));
    }
    let mode = match a.init {
        InitArg::Random => InitMode::RandomUniform,
        InitArg::ZK if params.variant.is_ordered() => InitMode::ZEqualsK,
        InitArg::ZK => return Err(CliError::Usage("--init zK needs an ordered model (orbm or irbm)".into())),
    };
    let (width, height) = a.image.shape(params.num_visible())?;
    let mut images = Vec::with_capacity(a.count);
    for chain in 0..a.count {
        let mut rng = RngStream::new(a.seed, chain as u64);
        let init = init_chain(params, &mode, &mut rng)?;
        images.push(run_chain(params, init, a.steps, &mut rng)?.v);
    }
    let pgm = encode_pgm_grid(&images, width, height, a.image.columns(a.count))?;
    write_file(&a.out, &pgm)?;
    println!("wrote {} samples after {} Gibbs steps to {}", a.count, a.steps, a.out.display());
    Ok(())
}

fn cmd_inspect_z(a: InspectArgs) -> CliResult<()> {
    let ckpt = load_model(&a.checkpoint)?;
    let params = &ckpt.params;
    if !params.variant.is_ordered() {
        return Err(CliError::Usage("inspect-z needs an ordered model (orbm or irbm)".into()));
    }
    let intervals = parse_intervals(&a.intervals)?;
    let dataset = input("dataset", load_dataset(&a.data, a.binarize_seed))?;
    if dataset.dims() != params.num_visible() {
        return Err(CliError::Usage("dataset and model disagree on the number of visible units".into()));
    }
    let report = inspect_z(params, &dataset, &intervals, a.top)?;

    let mut table = String::from("example,z,prob\n");
    for (i, dist) in report.distributions.iter().enumerate() {
        for (z, p) in dist.probs.iter().enumerate() {
            table.push_str(&format!("{i},{},{p}\n", z + 1));
        }
        if params.variant == Variant::Irbm {
            table.push_str(&format!("{i},tail,{}\n", dist.tail_mass));
        }
    }
    write_file(&a.out.join("p_z_given_v.csv"), table.as_bytes())?;

    let mut top = String::from("a,b,rank,example,mass\n");
    let shape = a.image.shape(params.num_visible()).ok();
    for r in &report.rankings {
        for (rank, (ex, mass)) in r.top.iter().enumerate() {
            top.push_str(&format!("{},{},{},{ex},{mass}\n", r.a, r.b, rank + 1));
        }
        println!("[{}, {})  mean top-{} mass {:.6}", r.a, r.b, r.top.len(), r.mean_top_mass());
        if let (Some((w, h)), false) = (shape, r.top.is_empty()) {
            let images: Vec<Vec<f64>> = r.top.iter().map(|&(ex, _)| dataset.row_f64(ex)).collect();
            let pgm = encode_pgm_grid(&images, w, h, a.image.columns.unwrap_or(images.len()))?;
            write_file(&a.out.join(format!("top_{}_{}.pgm", r.a, r.b)), &pgm)?;
        }
    }
    write_file(&a.out.join("top_intervals.csv"), top.as_bytes())?;
    Ok(())
}

fn random_params(a: &GradcheckArgs) -> CliResult<ModelParams> {
    let mut params = init_model(a.model, a.visible, a.hidden, a.beta, 0.0, a.seed)?;
    let mut rng = RngStream::new(a.seed, 0);
    let s = a.scale;
    for w in params.weights.as_mut_slice() {
        *w = rng.range(-s, s);
    }
    for b in params.visible_bias.iter_mut().chain(params.hidden_bias.iter_mut()) {
        *b = rng.range(-s, s);
    }
    Ok(params)
}

fn cmd_gradcheck(a: GradcheckArgs) -> CliResult<()> {
    let params = match &a.checkpoint {
        Some(path) => load_model(path)?.params,
        None => random_params(&a)?,
    };
    let mut rng = RngStream::new(a.seed, 1);
    let d = params.num_visible();
    let mut failures = 0;
    let mut worst = [0.0f64; 3];
    let names = ["W", "b_v", "b_h"];
    for ex in 0..a.examples {
        let v: Vec<f64> = (0..d).map(|_| rng.bernoulli(0.5)).collect();
        let report = gradcheck(&params, &v, a.rel_tol, a.step)?;
        for (slot, block) in worst.iter_mut().zip(&report.blocks) {
            *slot = slot.max(block.max_rel_err);
            if !block.passed {
                failures += 1;
                let at = if block.name == "W" {
                    format!("({}, {})", block.worst_index / d, block.worst_index % d)
                } else {
                    block.worst_index.to_string()
                };
                eprintln!("example {ex}: {} failed at {at}, max abs err {:.3e}", block.name, block.max_abs_err);
            }
        }
    }
    for (name, rel) in names.iter().zip(worst) {
        println!("{name:<4} max rel err {rel:.3e}");
    }
    if failures > 0 {
        println!("FAIL ({failures} block failures over {} examples)", a.examples);
        return Err(CliError::Runtime("gradient check failed".into()));
    }
    println!("PASS ({} examples, {} model)", a.examples, params.variant);
    Ok(())
}

fn cmd_gen_data(a: GenDataArgs) -> CliResult<()> {
    let dataset: Dataset = synthetic_patterns(a.dims, a.patterns, a.noise, a.n, a.seed)?;
    write_packed(&dataset, &a.out).map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("wrote {} × {} dataset to {}", dataset.len(), dataset.dims(), a.out.display());
    Ok(())
}
