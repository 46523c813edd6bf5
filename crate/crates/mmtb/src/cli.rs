//! Command-line interface: simulate, fit, summarize, evaluate and
//! compare-samplers subcommands.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{Hyperparameters, RunConfig};
use crate::error::{Error, Result};
use crate::sampler::{run_chains, run_chains_from, InitStyle, SampleChain, SamplerVariant};
use crate::simulator::{simulate_scenario, Scenario};
use crate::summaries;
use crate::tensor::{apply_mode, DataTensor, Mode, SliceContext};
use crate::{figures, io};

#[derive(Debug, Parser)]
#[command(
    name = "mmtb",
    about = "Temporal biclustering of multi-subject multivariate time series",
    version
)]
pub struct Cli {
    /// Number of worker threads (default: all cores). Results are identical
    /// for any value.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic benchmark data set with known ground truth.
    Simulate {
        /// Scenario: time-dep, subject-dep or both.
        #[arg(long)]
        scenario: Scenario,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory (writes data.csv and truth.json).
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the model to a long-format CSV and write posterior samples.
    Fit(FitArgs),
    /// Summarize posterior samples: partition estimate, co-clustering,
    /// location sequences, changepoint probabilities, and figures.
    Summarize {
        /// Directory of sample files produced by `fit`.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score posterior samples against a simulation ground truth.
    Evaluate {
        #[arg(long)]
        samples: PathBuf,
        /// truth.json written by `simulate`.
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the same simulated data with the blocked and the marginal
    /// sampler and report both sets of evaluation metrics.
    CompareSamplers {
        #[arg(long)]
        scenario: Scenario,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
        #[arg(long, default_value_t = 500)]
        burn_in: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Long-format CSV with header subject,measurement,time,value.
    #[arg(long)]
    pub data: PathBuf,
    /// TOML run configuration; command-line flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Analysis mode: mmtb, smtc, mmb, mean-mmb or median-mmb.
    #[arg(long)]
    pub mode: Option<Mode>,
    /// State-sequence update: blocked (default) or marginal.
    #[arg(long, default_value = "blocked")]
    pub sampler: String,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub thinning: Option<usize>,
    /// Output directory (writes samples/ and config.toml).
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_variant(name: &str) -> Result<SamplerVariant> {
    match name.to_ascii_lowercase().as_str() {
        "blocked" => Ok(SamplerVariant::Blocked),
        "marginal" => Ok(SamplerVariant::Marginal),
        other => Err(Error::InvalidConfig(format!("unknown sampler `{other}`"))),
    }
}

fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Serde(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn slice_label(ctx: &SliceContext) -> String {
    match ctx {
        SliceContext::Full => "full".into(),
        SliceContext::Subject(i) => format!("subject_{}", i + 1),
        SliceContext::TimeStep(t) => format!("time_{}", t + 1),
        SliceContext::TimeCollapsed => "collapsed".into(),
    }
}

/// Runs the CLI; the caller maps errors to exit codes.
pub fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        // Ignore the error when a global pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match cli.command {
        Command::Simulate { scenario, seed, out } => cmd_simulate(scenario, seed, &out),
        Command::Fit(args) => cmd_fit(&args),
        Command::Summarize { samples, out } => cmd_summarize(&samples, &out),
        Command::Evaluate {
            samples,
            truth,
            out,
        } => cmd_evaluate(&samples, &truth, &out),
        Command::CompareSamplers {
            scenario,
            seed,
            iterations,
            burn_in,
            out,
        } => cmd_compare_samplers(scenario, seed, iterations, burn_in, &out),
    }
}

fn cmd_simulate(scenario: Scenario, seed: u64, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    let (data, truth) = simulate_scenario(scenario, seed);
    io::write_long_csv(&data, out.join("data.csv"))?;
    io::write_ground_truth(&truth, out.join("truth.json"))?;
    println!(
        "simulated scenario {} (seed {seed}): {} subjects x {} measurements x {} time steps",
        scenario.name(),
        data.n_subjects(),
        data.n_measurements(),
        data.n_timesteps()
    );
    Ok(())
}

fn resolve_config(args: &FitArgs, data: &DataTensor) -> Result<RunConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig {
            hyperparameters: Hyperparameters::simulation_default(data.n_subjects()),
            n_iterations: 1000,
            burn_in: 500,
            n_chains: 1,
            seed: 1,
            thinning: 1,
            mode: Mode::Mmtb,
        },
    };
    if let Some(mode) = args.mode {
        config.mode = mode;
    }
    if let Some(v) = args.iterations {
        config.n_iterations = v;
    }
    if let Some(v) = args.burn_in {
        config.burn_in = v;
    }
    if let Some(v) = args.chains {
        config.n_chains = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.thinning {
        config.thinning = v;
    }
    config.validate()?;
    Ok(config)
}

pub fn cmd_fit(args: &FitArgs) -> Result<()> {
    let variant = parse_variant(&args.sampler)?;
    let data = io::read_long_csv(&args.data)?;
    let config = resolve_config(args, &data)?;

    ensure_dir(&args.out)?;
    let samples_dir = args.out.join("samples");
    ensure_dir(&samples_dir)?;
    fs::write(args.out.join("config.toml"), config.to_toml())
        .map_err(|e| Error::io(args.out.join("config.toml"), e))?;

    for (slice, ctx) in apply_mode(&data, config.mode) {
        // Slices see the same config; profiles cap at the slice's subjects.
        let mut slice_config = config.clone();
        slice_config.hyperparameters.z = slice_config.hyperparameters.z.min(slice.n_subjects());
        let chains = run_chains(&slice, &slice_config, variant)?;
        let label = slice_label(&ctx);
        for (ci, chain) in chains.iter().enumerate() {
            let path = samples_dir.join(format!("{label}_chain{}.ndjson", ci + 1));
            io::write_samples(chain, &path)?;
        }
        println!(
            "fit slice {label}: {} chains x {} retained draws",
            slice_config.n_chains,
            slice_config.n_retained()
        );
    }
    Ok(())
}

/// Loads every `<slice>_chain<k>.ndjson` under a samples directory (or its
/// `samples/` child), grouped by slice label in sorted order.
fn load_sample_groups(dir: &Path) -> Result<BTreeMap<String, Vec<SampleChain>>> {
    let dir = if dir.join("samples").is_dir() {
        dir.join("samples")
    } else {
        dir.to_path_buf()
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(|e| Error::io(&dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "ndjson"))
        .collect();
    paths.sort();
    let mut groups: BTreeMap<String, Vec<SampleChain>> = BTreeMap::new();
    for path in paths {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default();
        let label = match stem.rfind("_chain") {
            Some(pos) => stem[..pos].to_string(),
            None => stem.to_string(),
        };
        groups.entry(label).or_default().push(io::read_samples(&path)?);
    }
    if groups.is_empty() {
        return Err(Error::EmptyDraws);
    }
    for (label, chains) in &groups {
        let first = &chains[0].config;
        for chain in &chains[1..] {
            if chain.config != *first {
                return Err(Error::IncompatibleChains {
                    context: format!("chains of slice `{label}` differ in configuration"),
                });
            }
        }
    }
    Ok(groups)
}

fn cmd_summarize(samples: &Path, out: &Path) -> Result<()> {
    let groups = load_sample_groups(samples)?;
    let summaries_dir = out.join("summaries");
    let figures_dir = out.join("figures");
    ensure_dir(&summaries_dir)?;
    ensure_dir(&figures_dir)?;
    for (label, chains) in &groups {
        let seed = chains[0].config.seed;
        let report = summaries::summarize(chains, seed)?;
        write_json(&report, &summaries_dir.join(format!("{label}.json")))?;

        let heatmap =
            figures::coclustering_heatmap(&report.coclustering, &report.subject_partition);
        fs::write(figures_dir.join(format!("{label}_coclustering.svg")), heatmap)
            .map_err(|e| Error::io(&figures_dir, e))?;

        let traces: Vec<Vec<f64>> = chains
            .iter()
            .map(|c| c.diagnostics.log_posterior_trace.clone())
            .collect();
        fs::write(
            figures_dir.join(format!("{label}_traceplot.svg")),
            figures::traceplot(&traces),
        )
        .map_err(|e| Error::io(&figures_dir, e))?;

        for (p, (locations, changepoints)) in report
            .profile_location_sequences
            .iter()
            .zip(&report.changepoint_probabilities)
            .enumerate()
        {
            let svg = figures::location_sequences(locations, changepoints);
            fs::write(
                figures_dir.join(format!("{label}_locations_profile{}.svg", p + 1)),
                svg,
            )
            .map_err(|e| Error::io(&figures_dir, e))?;
        }
        println!(
            "summarized slice {label}: {} draws, estimated {} profiles",
            report.n_draws,
            report.subject_partition.n_clusters()
        );
    }
    Ok(())
}

fn cmd_evaluate(samples: &Path, truth_path: &Path, out: &Path) -> Result<()> {
    let groups = load_sample_groups(samples)?;
    let chains = groups.get("full").ok_or(Error::IncompatibleChains {
        context: "evaluation requires a joint (mmtb-mode) fit with slice `full`".into(),
    })?;
    let truth = io::read_ground_truth(truth_path)?;
    let n = truth.subject_partition.len();
    let fitted = chains[0].draws[0].state.s.len();
    if fitted != n {
        return Err(Error::ShapeMismatch {
            context: format!("truth has {n} subjects, fit has {fitted}"),
        });
    }
    let metrics = summaries::evaluate(chains, &truth, chains[0].config.seed)?;
    let metrics_dir = out.join("metrics");
    ensure_dir(&metrics_dir)?;
    write_json(&metrics, &metrics_dir.join("metrics.json"))?;
    println!(
        "subject_bl={:.4} measurement_bl={:.4} mae={:.4} f_measure={:.4}",
        metrics.subject_bl, metrics.measurement_bl, metrics.mae, metrics.f_measure
    );
    Ok(())
}

fn cmd_compare_samplers(
    scenario: Scenario,
    seed: u64,
    iterations: usize,
    burn_in: usize,
    out: &Path,
) -> Result<()> {
    let (data, truth) = simulate_scenario(scenario, seed);
    let config = RunConfig {
        hyperparameters: Hyperparameters::simulation_default(data.n_subjects()),
        n_iterations: iterations,
        burn_in,
        n_chains: 1,
        seed,
        thinning: 1,
        mode: Mode::Mmtb,
    };
    config.validate()?;
    let mut comparison = BTreeMap::new();
    for (name, variant) in [
        ("blocked", SamplerVariant::Blocked),
        ("marginal", SamplerVariant::Marginal),
    ] {
        // Both variants start from the same random configuration, so the
        // comparison isolates how well each kernel mixes.
        let chains = run_chains_from(&data, &config, variant, InitStyle::Random)?;
        let metrics = summaries::evaluate(&chains, &truth, seed)?;
        println!(
            "{name}: subject_bl={:.4} measurement_bl={:.4} mae={:.4} f_measure={:.4}",
            metrics.subject_bl, metrics.measurement_bl, metrics.mae, metrics.f_measure
        );
        comparison.insert(name.to_string(), metrics);
    }
    let metrics_dir = out.join("metrics");
    ensure_dir(&metrics_dir)?;
    write_json(&comparison, &metrics_dir.join("sampler_comparison.json"))?;
    Ok(())
}
