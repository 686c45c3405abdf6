use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use exante_cli::output::{results_to_csv, results_to_sidecar, summary_lines};
use exante_cli::pipeline::load_network;
use exante_cli::spec::{
    dataset_preset, DatasetSource, ExperimentSpec, Hyperparameters, ImAlgorithm, Method,
};
use exante_cli::stats::dataset_stats;
use exante_cli::synthetic::{generate, SyntheticConfig};
use exante_core::events::BinScheme;
use exante_core::io::save_snapshots;

#[derive(Parser)]
#[command(
    name = "exante",
    version,
    about = "Ex ante influence maximization on temporal networks"
)]
struct Cli {
    /// Worker thread count (overrides the EXANTE_WORKERS environment variable).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print dataset summary statistics and temporal measures.
    Stats(StatsArgs),
    /// Run one experiment and emit its result row.
    Run(RunArgs),
    /// Run a methods x seed-sizes sweep and emit the results table.
    Sweep(SweepArgs),
    /// Write a synthetic stable-hub dataset in the snapshot format.
    GenSynthetic(GenArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    Events,
    Snapshots,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    EqualTime,
    EqualCount,
}

impl From<SchemeArg> for BinScheme {
    fn from(value: SchemeArg) -> Self {
        match value {
            SchemeArg::EqualTime => BinScheme::EqualTime,
            SchemeArg::EqualCount => BinScheme::EqualCount,
        }
    }
}

/// Dataset selection shared by `stats`, `run`, and `sweep`.
#[derive(Args, Clone)]
struct DataArgs {
    /// Dataset file; omit to use the bundled synthetic generator.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FileFormat::Events)]
    format: FileFormat,
    /// Snapshot count when aggregating an event file.
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long, value_enum, default_value_t = SchemeArg::EqualTime)]
    scheme: SchemeArg,
    /// Synthetic generator knobs (used when --data is omitted).
    #[arg(long, default_value_t = 100)]
    syn_n: usize,
    #[arg(long, default_value_t = 20)]
    syn_t: usize,
    #[arg(long, default_value_t = 5)]
    syn_hubs: usize,
    #[arg(long, default_value_t = 12)]
    syn_hub_degree: usize,
    #[arg(long, default_value_t = 60)]
    syn_churn: usize,
    #[arg(long, default_value_t = 1)]
    syn_seed: u64,
}

impl DataArgs {
    fn source(&self, preset: Option<&str>) -> Result<DatasetSource> {
        match &self.data {
            Some(path) => {
                let path = path.to_string_lossy().into_owned();
                match self.format {
                    FileFormat::Snapshots => Ok(DatasetSource::Snapshots { path }),
                    FileFormat::Events => {
                        let preset_bins =
                            preset.and_then(dataset_preset).map(|(_, _, t)| t);
                        let n_bins = self.bins.or(preset_bins).context(
                            "--bins is required for event files (or use --preset)",
                        )?;
                        Ok(DatasetSource::Events { path, n_bins, scheme: self.scheme.into() })
                    }
                }
            }
            None => Ok(DatasetSource::Synthetic(SyntheticConfig {
                n: self.syn_n,
                t: self.syn_t,
                hubs: self.syn_hubs,
                hub_degree: self.syn_hub_degree,
                churn_edges: self.syn_churn,
                seed: self.syn_seed,
            })),
        }
    }
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Emit machine-readable JSON instead of the text table.
    #[arg(long)]
    json: bool,
}

/// Experiment parameters shared by `run` and `sweep`.
#[derive(Args, Clone)]
struct ExperimentArgs {
    /// Fill lambda / p / bins from a named dataset protocol (reality,
    /// email4, hs1, hospital, office, copenb, college).
    #[arg(long)]
    preset: Option<String>,
    /// Observed snapshot count.
    #[arg(long)]
    p: Option<usize>,
    /// Infection probability per contact per step.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum, default_value_t = ImAlgorithm::Greedy)]
    im: ImAlgorithm,
    /// Evaluation Monte Carlo samples.
    #[arg(long, default_value_t = 1000)]
    mc_runs: usize,
    /// Master RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Density recency decay for binarization.
    #[arg(long, default_value_t = 0.9)]
    xi: f64,
    /// NMF attenuation.
    #[arg(long, default_value_t = 0.9)]
    phi: f64,
    /// NMF latent dimension (default: 5% of n).
    #[arg(long)]
    nmf_rank: Option<usize>,
    #[arg(long, default_value_t = 25)]
    nmf_restarts: usize,
    #[arg(long, default_value_t = 500)]
    nmf_max_iters: usize,
    /// Comma-separated L1 penalty grid (default: 20 points, 1e-4 to 10).
    #[arg(long, value_delimiter = ',')]
    alpha_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.25)]
    val_fraction: f64,
    #[arg(long, default_value_t = 0.05)]
    jc_add_frac: f64,
    #[arg(long, default_value_t = 0.05)]
    jc_remove_frac: f64,
    /// Monte Carlo samples per sigma evaluation inside greedy selection.
    #[arg(long, default_value_t = 200)]
    select_mc: usize,
    /// TOML config file; its keys override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the CSV table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a JSON sidecar with full specs and stage timings.
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    experiment: ExperimentArgs,
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Seed set size.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Methods to run (default: the full in-scope roster).
    #[arg(long, value_enum, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// Seed set sizes to sweep.
    #[arg(long, value_delimiter = ',')]
    ks: Option<Vec<usize>>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 20)]
    t: usize,
    #[arg(long, default_value_t = 5)]
    hubs: usize,
    #[arg(long, default_value_t = 12)]
    hub_degree: usize,
    #[arg(long, default_value_t = 60)]
    churn: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// Declarative overrides; any key present wins over the matching flag.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    p: Option<usize>,
    lambda: Option<f64>,
    k: Option<usize>,
    ks: Option<Vec<usize>>,
    method: Option<Method>,
    methods: Option<Vec<Method>>,
    im: Option<ImAlgorithm>,
    mc_runs: Option<usize>,
    seed: Option<u64>,
    xi: Option<f64>,
    phi: Option<f64>,
    nmf_rank: Option<usize>,
    nmf_restarts: Option<usize>,
    nmf_max_iters: Option<usize>,
    alpha_grid: Option<Vec<f64>>,
    val_fraction: Option<f64>,
    jc_add_frac: Option<f64>,
    jc_remove_frac: Option<f64>,
    select_mc: Option<usize>,
}

fn load_config(path: Option<&PathBuf>) -> Result<ConfigFile> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
        }
    }
}

struct ResolvedExperiment {
    p: usize,
    t: usize,
    lambda: f64,
    im: ImAlgorithm,
    mc_runs: usize,
    seed: u64,
    hyper: Hyperparameters,
}

fn resolve_experiment(
    args: &ExperimentArgs,
    cfg: &ConfigFile,
    source: &DatasetSource,
) -> Result<ResolvedExperiment> {
    // The horizon comes from the dataset itself.
    let net = load_network(source)?;
    let t = net.len();
    let preset = args.preset.as_deref().and_then(dataset_preset);
    let p = cfg
        .p
        .or(args.p)
        .or(preset.map(|(_, p, _)| p))
        .context("--p is required (or use --preset)")?;
    let lambda = cfg
        .lambda
        .or(args.lambda)
        .or(preset.map(|(lambda, _, _)| lambda))
        .context("--lambda is required (or use --preset)")?;
    let hyper = Hyperparameters {
        xi: cfg.xi.unwrap_or(args.xi),
        phi: cfg.phi.unwrap_or(args.phi),
        nmf_rank: cfg.nmf_rank.or(args.nmf_rank),
        nmf_restarts: cfg.nmf_restarts.unwrap_or(args.nmf_restarts),
        nmf_max_iters: cfg.nmf_max_iters.unwrap_or(args.nmf_max_iters),
        alpha_grid: cfg
            .alpha_grid
            .clone()
            .or_else(|| args.alpha_grid.clone())
            .unwrap_or_else(exante_cli::spec::default_alpha_grid),
        val_fraction: cfg.val_fraction.unwrap_or(args.val_fraction),
        jc_add_frac: cfg.jc_add_frac.unwrap_or(args.jc_add_frac),
        jc_remove_frac: cfg.jc_remove_frac.unwrap_or(args.jc_remove_frac),
        select_mc_runs: cfg.select_mc.unwrap_or(args.select_mc),
    };
    Ok(ResolvedExperiment {
        p,
        t,
        lambda,
        im: cfg.im.unwrap_or(args.im),
        mc_runs: cfg.mc_runs.unwrap_or(args.mc_runs),
        seed: cfg.seed.unwrap_or(args.seed),
        hyper,
    })
}

fn build_specs(
    source: &DatasetSource,
    resolved: &ResolvedExperiment,
    methods: &[Method],
    ks: &[usize],
) -> Vec<ExperimentSpec> {
    let mut specs = Vec::with_capacity(methods.len() * ks.len());
    for &method in methods {
        for &k in ks {
            specs.push(ExperimentSpec {
                dataset: source.clone(),
                p: resolved.p,
                t: resolved.t,
                lambda: resolved.lambda,
                k,
                method,
                im_algorithm: resolved.im,
                mc_runs: resolved.mc_runs,
                rng_seed: resolved.seed,
                hyper: resolved.hyper.clone(),
            });
        }
    }
    specs
}

fn emit(
    outcomes: &[(ExperimentSpec, std::result::Result<exante_cli::ResultRecord, String>)],
    out: Option<&PathBuf>,
    sidecar: Option<&PathBuf>,
) -> Result<i32> {
    let csv = results_to_csv(outcomes);
    match out {
        Some(path) => {
            std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{csv}"),
    }
    if let Some(path) = sidecar {
        std::fs::write(path, results_to_sidecar(outcomes))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    for line in summary_lines(outcomes) {
        eprintln!("{line}");
    }
    let failures = outcomes.iter().filter(|(_, r)| r.is_err()).count();
    Ok(if failures == 0 { 0 } else { 1 })
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let workers = cli
        .workers
        .or_else(|| std::env::var("EXANTE_WORKERS").ok().and_then(|v| v.parse().ok()));
    if let Some(workers) = workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .context("configuring the worker pool")?;
    }

    let code = match cli.command {
        Command::Stats(args) => {
            let source = args.data.source(None)?;
            let net = load_network(&source)?;
            let stats = dataset_stats(&net);
            if args.json {
                println!("{}", serde_json::to_string_pretty(&stats)?);
            } else {
                println!("dataset: {}", source.label());
                println!("n (nodes):            {}", stats.n);
                println!("m (unique links):     {}", stats.m);
                println!("T (snapshots):        {}", stats.t);
                println!("mean edge density:    {:.4}", stats.mean_density);
                println!("fNT (first half):     {:.2}", stats.f_nt);
                println!("fLT (first half):     {:.2}", stats.f_lt);
                println!("FNT (both 5% ends):   {:.2}", stats.f_nt_ends);
                println!("FLT (both 5% ends):   {:.2}", stats.f_lt_ends);
                match stats.degree_assortativity {
                    Some(da) => println!("degree assortativity: {da:.2}"),
                    None => println!("degree assortativity: undefined"),
                }
            }
            0
        }
        Command::Run(args) => {
            let cfg = load_config(args.experiment.config.as_ref())?;
            let source = args.data.source(args.experiment.preset.as_deref())?;
            let resolved = resolve_experiment(&args.experiment, &cfg, &source)?;
            let method = cfg.method.or(args.method).context("--method is required")?;
            let k = cfg.k.or(args.k).context("--k is required")?;
            let specs = build_specs(&source, &resolved, &[method], &[k]);
            let outcomes = exante_cli::run_sweep(&specs);
            emit(&outcomes, args.experiment.out.as_ref(), args.experiment.sidecar.as_ref())?
        }
        Command::Sweep(args) => {
            let cfg = load_config(args.experiment.config.as_ref())?;
            let source = args.data.source(args.experiment.preset.as_deref())?;
            let resolved = resolve_experiment(&args.experiment, &cfg, &source)?;
            let methods = cfg
                .methods
                .clone()
                .or_else(|| args.methods.clone())
                .unwrap_or_else(|| Method::ALL.to_vec());
            let ks = cfg.ks.clone().or_else(|| args.ks.clone()).context("--ks is required")?;
            if ks.is_empty() || methods.is_empty() {
                bail!("sweep needs at least one method and one k");
            }
            let specs = build_specs(&source, &resolved, &methods, &ks);
            let outcomes = exante_cli::run_sweep(&specs);
            emit(&outcomes, args.experiment.out.as_ref(), args.experiment.sidecar.as_ref())?
        }
        Command::GenSynthetic(args) => {
            let net = generate(&SyntheticConfig {
                n: args.n,
                t: args.t,
                hubs: args.hubs,
                hub_degree: args.hub_degree,
                churn_edges: args.churn,
                seed: args.seed,
            });
            save_snapshots(&net, &args.out)
                .with_context(|| format!("writing {}", args.out.display()))?;
            eprintln!(
                "wrote synthetic network (n = {}, T = {}) to {}",
                args.n,
                args.t,
                args.out.display()
            );
            0
        }
    };
    if code != 0 {
        std::process::exit(code);
    }
    Ok(())
}
