//! Experiment driver for the mixture-model library: data generation,
//! exact posterior runs, Gibbs runs, and the verification suites, with
//! reproducible seeds and self-describing CSV/JSON outputs.
//!
//! Exit codes: 0 success, 1 usage or I/O, 2 domain, 3 capacity,
//! 4 verification failure.

mod config;
mod run;

use bnpmix::gibbs::DEFAULT_SUPPORT_FLOOR;
use bnpmix::posterior::ExactOptions;
use bnpmix::presets;
use bnpmix::verify::VerifyOptions;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use config::{Overlay, Resolved};
use std::path::PathBuf;

/// A command failure carrying its exit code.
pub struct Failure {
    pub code: i32,
    pub message: String,
}

pub fn usage(message: String) -> Failure {
    Failure { code: 1, message }
}

pub fn io_failure(message: String) -> Failure {
    Failure { code: 1, message }
}

pub fn domain(message: String) -> Failure {
    Failure { code: 2, message }
}

impl From<bnpmix::Error> for Failure {
    fn from(e: bnpmix::Error) -> Failure {
        let code = match e {
            bnpmix::Error::EnumerationLimit { .. } => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(
    name = "bnpmix",
    version,
    about = "Dirichlet and Pitman-Yor mixture experiments: generate data, \
             compute exact posteriors over the cluster count, run collapsed \
             Gibbs sampling, and verify the split-ratio bounds"
)]
struct Cli {
    /// Worker threads for parallel sections (env BNP_THREADS overrides)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic dataset and write it as one value per line
    Generate(GenerateCmd),
    /// Exact posterior over the cluster count by full partition enumeration
    Exact(ExactCmd),
    /// Collapsed Gibbs sampling of the cluster count posterior
    Gibbs(GibbsCmd),
    /// Randomized self-verification of the floor and identity suites
    Verify(VerifyCmd),
}

/// Settings shared by every config-resolving command.
#[derive(Args)]
struct CommonOpts {
    /// Start from a named preset (one-cluster-gaussian, two-cluster-uniform,
    /// dp-generative)
    #[arg(long)]
    preset: Option<String>,
    /// Read key=value settings from this file (overrides the preset)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of observations to generate (overrides preset and file)
    #[arg(long)]
    n: Option<usize>,
    /// Seed for every random draw in the command
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ModelOpts {
    /// Concentration parameter of the partition prior
    #[arg(long)]
    alpha: Option<f64>,
    /// Discount parameter in [0, 1); zero gives the Dirichlet process
    #[arg(long)]
    discount: Option<f64>,
    /// Component location prior: gaussian or uniform
    #[arg(long)]
    prior: Option<String>,
    /// Variance of the gaussian location prior
    #[arg(long)]
    sigma2: Option<f64>,
    /// Lower end of the uniform location prior
    #[arg(long)]
    lo: Option<f64>,
    /// Upper end of the uniform location prior
    #[arg(long)]
    hi: Option<f64>,
}

impl ModelOpts {
    fn overlay(&self, common: &CommonOpts) -> Overlay {
        Overlay {
            n: common.n,
            seed: common.seed,
            alpha: self.alpha,
            discount: self.discount,
            prior_kind: self.prior.clone(),
            sigma2: self.sigma2,
            lo: self.lo,
            hi: self.hi,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct GenerateCmd {
    #[command(flatten)]
    common: CommonOpts,
    /// Generator kind: gaussian-iid, uniform-union, finite-mixture,
    /// crp-generative
    #[arg(long)]
    kind: Option<String>,
    /// Mean of the gaussian-iid generator
    #[arg(long)]
    mean: Option<f64>,
    /// Observation spread of gaussian-iid and finite-mixture
    #[arg(long)]
    sd: Option<f64>,
    /// Intervals for uniform-union as lo,hi pairs joined by ';'
    #[arg(long)]
    intervals: Option<String>,
    /// Mixture weights, comma separated
    #[arg(long)]
    weights: Option<String>,
    /// Mixture component means, comma separated
    #[arg(long)]
    means: Option<String>,
    /// Concentration of the crp-generative seating draw
    #[arg(long)]
    gen_alpha: Option<f64>,
    /// Component location spread of crp-generative
    #[arg(long)]
    theta_sd: Option<f64>,
    /// Observation spread of crp-generative
    #[arg(long)]
    obs_sd: Option<f64>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactCmd {
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    model: ModelOpts,
    /// Read data from this file instead of generating
    #[arg(long)]
    input: Option<PathBuf>,
    /// Largest n the enumeration will accept
    #[arg(long)]
    enumeration_limit: Option<usize>,
    /// Accept observations outside the uniform prior support
    #[arg(long)]
    allow_outside_support: bool,
    /// Directory receiving posterior.csv and summary.json
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct GibbsCmd {
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    model: ModelOpts,
    /// Read data from this file instead of generating
    #[arg(long)]
    input: Option<PathBuf>,
    /// Sweeps discarded before recording
    #[arg(long)]
    burn_in: Option<u64>,
    /// Retained draws per chain
    #[arg(long)]
    samples: Option<u64>,
    /// Sweeps between retained draws
    #[arg(long)]
    thin: Option<u64>,
    /// Independent chains, merged into one histogram
    #[arg(long, default_value_t = 1)]
    chains: usize,
    /// Smallest count a histogram row needs to be flagged stable
    #[arg(long, default_value_t = DEFAULT_SUPPORT_FLOOR)]
    support_floor: u64,
    /// Visit data in a fresh random order each sweep
    #[arg(long)]
    randomize_sweep_order: bool,
    /// Run presets at the full published budget instead of the reduced one
    #[arg(long)]
    full_budget: bool,
    /// Directory receiving histogram.csv, trace.txt and summary.json
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct VerifyCmd {
    /// Random cluster pairs per floor suite
    #[arg(long, default_value_t = 1000)]
    cases: usize,
    /// Datasets per size and model in the identity suite
    #[arg(long, default_value_t = 2)]
    identity_datasets: usize,
    /// Largest n the identity suite enumerates
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    #[arg(long, default_value_t = 17)]
    seed: u64,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fault injection for exercising the failure path
    #[arg(long, hide = true, default_value_t = 0.0)]
    inject_marginal_bias: f64,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(failure) = dispatch(cli) {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    if let Some(t) = thread_count(cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| usage(format!("cannot size the thread pool: {e}")))?;
    }
    match cli.command {
        Command::Generate(cmd) => {
            let flags = Overlay {
                gen_kind: cmd.kind.clone(),
                n: cmd.common.n,
                seed: cmd.common.seed,
                mean: cmd.mean,
                sd: cmd.sd,
                intervals: cmd
                    .intervals
                    .as_deref()
                    .map(config::parse_intervals)
                    .transpose()
                    .map_err(usage)?,
                weights: cmd
                    .weights
                    .as_deref()
                    .map(|v| config::parse_list("weights", v))
                    .transpose()
                    .map_err(usage)?,
                means: cmd
                    .means
                    .as_deref()
                    .map(|v| config::parse_list("means", v))
                    .transpose()
                    .map_err(usage)?,
                gen_alpha: cmd.gen_alpha,
                theta_sd: cmd.theta_sd,
                obs_sd: cmd.obs_sd,
                ..Default::default()
            };
            let resolved = resolve_layers(&cmd.common, flags, false)?;
            run::cmd_generate(&resolved, cmd.out.as_deref())
        }
        Command::Exact(cmd) => {
            let resolved = resolve_layers(&cmd.common, cmd.model.overlay(&cmd.common), false)?;
            let mut options = ExactOptions::default();
            if let Some(limit) = cmd.enumeration_limit {
                options.enumeration_limit = limit;
            }
            options.allow_outside_support = cmd.allow_outside_support;
            run::cmd_exact(
                &resolved,
                &run::ExactIo { options, input: cmd.input, out_dir: cmd.out_dir },
            )
        }
        Command::Gibbs(cmd) => {
            let mut flags = cmd.model.overlay(&cmd.common);
            flags.burn_in = cmd.burn_in;
            flags.samples = cmd.samples;
            flags.thin = cmd.thin;
            let resolved = resolve_layers(&cmd.common, flags, cmd.full_budget)?;
            run::cmd_gibbs(
                &resolved,
                &run::GibbsIo {
                    input: cmd.input,
                    out_dir: cmd.out_dir,
                    chains: cmd.chains,
                    support_floor: cmd.support_floor,
                    randomize_sweep_order: cmd.randomize_sweep_order,
                },
            )
        }
        Command::Verify(cmd) => {
            let opts = VerifyOptions {
                floor_cases: cmd.cases,
                identity_datasets: cmd.identity_datasets,
                identity_n: cmd.max_n,
                seed: cmd.seed,
                marginal_bias: cmd.inject_marginal_bias,
            };
            run::cmd_verify(&opts, cmd.out.as_deref())
        }
    }
}

/// Assembles defaults, preset, config file, and flags, in that order.
fn resolve_layers(
    common: &CommonOpts,
    flags: Overlay,
    full_budget: bool,
) -> Result<Resolved, Failure> {
    let preset = common
        .preset
        .as_deref()
        .map(|name| {
            presets::by_name(name).ok_or_else(|| {
                usage(format!(
                    "unknown preset {name:?}; available: {}",
                    presets::NAMES.join(", ")
                ))
            })
        })
        .transpose()?;
    let file = common
        .config
        .as_ref()
        .map(|path| {
            let text = std::fs::read_to_string(path)
                .map_err(|e| io_failure(format!("cannot read {}: {e}", path.display())))?;
            Overlay::from_file_text(&text)
                .map_err(|e| usage(format!("{}: {e}", path.display())))
        })
        .transpose()?;
    config::resolve(preset.as_ref(), file, flags, full_budget).map_err(domain)
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    match std::env::var("BNP_THREADS") {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| usage(format!("BNP_THREADS must be a nonnegative integer, got {raw:?}"))),
        Err(_) => Ok(flag),
    }
}
