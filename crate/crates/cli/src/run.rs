use std::io::Write;

use species_core::asymptotics::{approximate_posterior, limit_draws};
use species_core::posterior::{
    exact_pmf_uncapped, exact_pmf_with_precision, hpd_interval, posterior_mean, PosteriorPmf, EXACT_CUTOFF,
};
use species_core::samplers::{ChainSimulator, RandomState};

use crate::config::{CommandKind, Engine, OutputFormat, RunConfig, MIN_ASYMPTOTIC_DRAWS};
use crate::error::CliError;
use crate::output::{
    emit, EstimateDoc, Header, HpdDoc, Method, MonteCarloMeta, PmfDoc, PmfRow, SampleLimitDoc, SimulateDoc,
};
use crate::validate;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION_FAILED: u8 = 2;

/// Execute a validated configuration, writing the result document to `out`.
/// Returns the process exit status.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<u8, CliError> {
    match config.command {
        CommandKind::Pmf => pmf(config, out)?,
        CommandKind::Estimate => estimate(config, out)?,
        CommandKind::Hpd => hpd(config, out)?,
        CommandKind::Simulate => simulate(config, out)?,
        CommandKind::SampleLimit => sample_limit(config, out)?,
        CommandKind::Validate => {
            return Ok(if validate::run(config, out)? {
                EXIT_OK
            } else {
                EXIT_VALIDATION_FAILED
            })
        }
    }
    Ok(EXIT_OK)
}

fn exact(config: &RunConfig) -> Result<PosteriorPmf, CliError> {
    let pmf = if config.engine == Engine::Exact {
        exact_pmf_uncapped(&config.model, &config.sample, config.m, config.precision_bits)?
    } else {
        exact_pmf_with_precision(&config.model, &config.sample, config.m, config.precision_bits).map_err(|e| {
            match e {
                species_core::Error::ExactCutoff { .. } => {
                    CliError::Usage(format!("{e}; pass --force-exact to compute it anyway"))
                }
                other => other.into(),
            }
        })?
    };
    Ok(pmf)
}

/// Provenance for CSV output, which has no metadata slot.
fn note_seed(config: &RunConfig) {
    if config.output_format == OutputFormat::Csv {
        eprintln!("seed={} draws={}", config.seed, config.n_draws);
    }
}

fn pmf(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let pmf = exact(config)?;
    let rows: Vec<Vec<String>> = pmf
        .probs()
        .iter()
        .enumerate()
        .map(|(k, p)| vec![k.to_string(), p.to_string()])
        .collect();
    let doc = PmfDoc {
        header: Header::new(config),
        m: config.m,
        precision_bits: config.precision_bits,
        mean: posterior_mean(&pmf),
        pmf: pmf
            .probs()
            .iter()
            .enumerate()
            .map(|(k, &prob)| PmfRow { k, prob })
            .collect(),
    };
    emit(config, out, &doc, &["k", "prob"], rows)
}

fn estimate(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let asymptotic = match config.engine {
        Engine::Exact => false,
        Engine::Asymptotic => true,
        Engine::Auto => config.m > EXACT_CUTOFF,
    };
    let doc = if asymptotic {
        if config.m == 0 {
            return Err(CliError::Usage("--m must be at least 1 for the asymptotic estimate".into()));
        }
        if config.n_draws < MIN_ASYMPTOTIC_DRAWS {
            return Err(CliError::Usage(format!(
                "--draws must be at least {MIN_ASYMPTOTIC_DRAWS} for the asymptotic estimate"
            )));
        }
        let est = approximate_posterior(
            &config.model,
            &config.sample,
            config.m,
            config.alpha,
            config.n_draws,
            &RandomState::new(config.seed),
        )?;
        note_seed(config);
        EstimateDoc {
            header: Header::new(config),
            m: config.m,
            method: Method::Asymptotic,
            point: est.point,
            interval: [est.interval.0, est.interval.1],
            interval_kind: "equal-tailed",
            alpha: config.alpha,
            interval_mass: None,
            monte_carlo: Some(MonteCarloMeta {
                seed: config.seed,
                draws: est.mc_samples,
                mc_stderr: est.mc_stderr,
                bias_correction: "none",
            }),
        }
    } else {
        let pmf = exact(config)?;
        let hpd = hpd_interval(&pmf, 1.0 - config.alpha)?;
        EstimateDoc {
            header: Header::new(config),
            m: config.m,
            method: Method::Exact,
            point: posterior_mean(&pmf),
            interval: [hpd.lo as f64, hpd.hi as f64],
            interval_kind: "hpd",
            alpha: config.alpha,
            interval_mass: Some(hpd.mass),
            monte_carlo: None,
        }
    };
    let method = match doc.method {
        Method::Exact => "exact",
        Method::Asymptotic => "asymptotic",
    };
    let row = vec![
        method.to_string(),
        doc.m.to_string(),
        doc.point.to_string(),
        doc.interval[0].to_string(),
        doc.interval[1].to_string(),
        doc.interval_kind.to_string(),
        doc.alpha.to_string(),
    ];
    emit(
        config,
        out,
        &doc,
        &["method", "m", "point", "lo", "hi", "interval_kind", "alpha"],
        vec![row],
    )
}

fn hpd(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let pmf = exact(config)?;
    let level = 1.0 - config.alpha;
    let h = hpd_interval(&pmf, level)?;
    let doc = HpdDoc {
        header: Header::new(config),
        m: config.m,
        level,
        lo: h.lo,
        hi: h.hi,
        mass: h.mass,
    };
    let row = vec![h.lo.to_string(), h.hi.to_string(), h.mass.to_string(), level.to_string()];
    emit(config, out, &doc, &["lo", "hi", "mass", "level"], vec![row])
}

fn simulate(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let ks = ChainSimulator::new(&config.model, &config.sample, config.m)?
        .run(config.n_draws, &RandomState::new(config.seed))?;
    note_seed(config);
    let rows = ks
        .iter()
        .enumerate()
        .map(|(i, k)| vec![i.to_string(), k.to_string()])
        .collect();
    let doc = SimulateDoc {
        header: Header::new(config),
        m: config.m,
        seed: config.seed,
        draws: config.n_draws,
        k: ks,
    };
    emit(config, out, &doc, &["replication", "k"], rows)
}

fn sample_limit(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let z = limit_draws(&config.model, &config.sample, config.n_draws, &RandomState::new(config.seed))?;
    note_seed(config);
    let rows = z
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i.to_string(), v.to_string()])
        .collect();
    let doc = SampleLimitDoc {
        header: Header::new(config),
        seed: config.seed,
        draws: config.n_draws,
        z,
    };
    emit(config, out, &doc, &["draw", "z"], rows)
}
