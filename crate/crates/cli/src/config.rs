use clap::{Args, Parser, Subcommand, ValueEnum};
use species_core::numerics::MIN_PRECISION;
use species_core::{ModelParams, SampleSummary};

use crate::error::CliError;

const MAX_PRECISION_BITS: u32 = 1 << 20;
pub use species_core::asymptotics::MIN_LIMIT_DRAWS as MIN_ASYMPTOTIC_DRAWS;

#[derive(Debug, Parser)]
#[command(name = "species", version, about = "Posterior inference on the number of new species in an additional sample")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact posterior PMF of the number of new species.
    Pmf(CommonArgs),
    /// Posterior point estimate and interval (exact, or limit-law Monte Carlo for large m).
    Estimate(CommonArgs),
    /// Highest posterior density interval at level 1 - alpha.
    Hpd(CommonArgs),
    /// Replications of the species-count chain over m further observations.
    Simulate(CommonArgs),
    /// Raw draws of the limit variable of K_m / m^σ.
    SampleLimit(CommonArgs),
    /// Run internal consistency checks at the given parameters.
    Validate(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Ngg,
    Pd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Discount / stability index in (0, 1).
    #[arg(long)]
    pub sigma: f64,
    /// NGG tilting parameter (≥ 0).
    #[arg(long)]
    pub beta: Option<f64>,
    /// PD strength parameter (> -σ).
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Size of the observed sample.
    #[arg(long)]
    pub n: usize,
    /// Distinct species in the observed sample.
    #[arg(long)]
    pub j: usize,
    /// Size of the additional sample.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 100_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 256)]
    pub precision_bits: u32,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    /// Use the exact engine even above the size cutoff.
    #[arg(long, conflicts_with = "force_asymptotic")]
    pub force_exact: bool,
    /// Use the limit-law approximation even below the size cutoff.
    #[arg(long)]
    pub force_asymptotic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Pmf,
    Estimate,
    Hpd,
    Simulate,
    SampleLimit,
    Validate,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Pmf => "pmf",
            CommandKind::Estimate => "estimate",
            CommandKind::Hpd => "hpd",
            CommandKind::Simulate => "simulate",
            CommandKind::SampleLimit => "sample-limit",
            CommandKind::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Auto,
    Exact,
    Asymptotic,
}

/// Fully validated run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub model: ModelParams,
    pub sample: SampleSummary,
    pub m: usize,
    pub alpha: f64,
    pub n_draws: usize,
    pub seed: u64,
    pub precision_bits: u32,
    pub output_format: OutputFormat,
    pub engine: Engine,
}

/// m used by `validate` when none is given.
const VALIDATE_DEFAULT_M: usize = 20;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let (command, args) = match cli.command {
            Command::Pmf(a) => (CommandKind::Pmf, a),
            Command::Estimate(a) => (CommandKind::Estimate, a),
            Command::Hpd(a) => (CommandKind::Hpd, a),
            Command::Simulate(a) => (CommandKind::Simulate, a),
            Command::SampleLimit(a) => (CommandKind::SampleLimit, a),
            Command::Validate(a) => (CommandKind::Validate, a),
        };
        let name = command.name();

        if !(args.sigma > 0.0 && args.sigma < 1.0) {
            return Err(usage(format!("--sigma must lie in (0, 1), got {}", args.sigma)));
        }
        let model = match args.model {
            ModelArg::Ngg => {
                if args.theta.is_some() {
                    return Err(usage("--theta does not apply to --model ngg (use --beta)"));
                }
                let beta = args.beta.ok_or_else(|| usage("--beta is required with --model ngg"))?;
                if !(beta >= 0.0 && beta.is_finite()) {
                    return Err(usage(format!("--beta must be finite and ≥ 0, got {beta}")));
                }
                ModelParams::ngg(args.sigma, beta)?
            }
            ModelArg::Pd => {
                if args.beta.is_some() {
                    return Err(usage("--beta does not apply to --model pd (use --theta)"));
                }
                let theta = args.theta.ok_or_else(|| usage("--theta is required with --model pd"))?;
                if !(theta > -args.sigma && theta.is_finite()) {
                    return Err(usage(format!("--theta must be finite and exceed -σ = {}, got {theta}", -args.sigma)));
                }
                ModelParams::pd(args.sigma, theta)?
            }
        };
        if args.n == 0 {
            return Err(usage("--n must be at least 1"));
        }
        if args.j == 0 || args.j > args.n {
            return Err(usage(format!("--j must satisfy 1 ≤ j ≤ n = {}, got {}", args.n, args.j)));
        }
        let sample = SampleSummary::new(args.n, args.j)?;

        let m = match (command, args.m) {
            (CommandKind::SampleLimit, Some(_)) => {
                return Err(usage("--m does not apply to sample-limit"));
            }
            (CommandKind::SampleLimit, None) => 0,
            (CommandKind::Validate, m) => m.unwrap_or(VALIDATE_DEFAULT_M),
            (_, Some(m)) => m,
            (_, None) => return Err(usage(format!("--m is required for {name}"))),
        };

        if !(args.alpha > 0.0 && args.alpha < 1.0) {
            return Err(usage(format!("--alpha must lie in (0, 1), got {}", args.alpha)));
        }
        if args.draws == 0 {
            return Err(usage("--draws must be at least 1"));
        }
        if !(MIN_PRECISION..=MAX_PRECISION_BITS).contains(&args.precision_bits) {
            return Err(usage(format!(
                "--precision-bits must lie in [{MIN_PRECISION}, {MAX_PRECISION_BITS}], got {}",
                args.precision_bits
            )));
        }

        let engine = match (args.force_exact, args.force_asymptotic) {
            (true, _) => {
                if !matches!(command, CommandKind::Pmf | CommandKind::Estimate | CommandKind::Hpd) {
                    return Err(usage(format!("--force-exact does not apply to {name}")));
                }
                Engine::Exact
            }
            (_, true) => {
                if command != CommandKind::Estimate {
                    return Err(usage(format!("--force-asymptotic does not apply to {name}")));
                }
                Engine::Asymptotic
            }
            _ => Engine::Auto,
        };

        Ok(RunConfig {
            command,
            model,
            sample,
            m,
            alpha: args.alpha,
            n_draws: args.draws,
            seed: args.seed,
            precision_bits: args.precision_bits,
            output_format: args.output,
            engine,
        })
    }
}
