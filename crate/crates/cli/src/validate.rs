//! Internal consistency checks run at the user's parameters.

use std::io::Write;

use species_core::asymptotics::limit_expectation;
use species_core::models::{gibbs_row, predictive_weights};
use species_core::numerics::BigReal;
use species_core::posterior::{dp_oracle_pmf, exact_pmf_with_precision, hpd_interval, EXACT_CUTOFF};
use species_core::Result;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{emit, CheckOut, Header, ValidateDoc};

/// Largest m at which the slow forward-recursion oracle is run.
const ORACLE_MAX_M: usize = 200;
/// Largest sample size for the Gibbs recursion check.
const GIBBS_MAX_N: usize = 40;

struct Check {
    pass: bool,
    detail: String,
}

fn pmf_normalization(c: &RunConfig) -> Result<Check> {
    if c.m > EXACT_CUTOFF {
        return Ok(skipped(format!("m = {} exceeds the exact cutoff", c.m)));
    }
    let pmf = exact_pmf_with_precision(&c.model, &c.sample, c.m, c.precision_bits)?;
    let gap = (pmf.total() - 1.0).abs();
    Ok(Check {
        pass: gap < 1e-9 && pmf.probs().iter().all(|&p| p >= 0.0),
        detail: format!("|Σp - 1| = {gap:.3e}"),
    })
}

fn oracle_agreement(c: &RunConfig) -> Result<Check> {
    if c.m > ORACLE_MAX_M {
        return Ok(skipped(format!("m = {} exceeds {ORACLE_MAX_M}", c.m)));
    }
    let a = exact_pmf_with_precision(&c.model, &c.sample, c.m, c.precision_bits)?;
    let b = dp_oracle_pmf(&c.model, &c.sample, c.m)?;
    let gap = a
        .probs()
        .iter()
        .zip(b.probs())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(Check {
        pass: gap < 1e-10,
        detail: format!("max entrywise gap = {gap:.3e}"),
    })
}

fn gibbs_recursion(c: &RunConfig) -> Result<Check> {
    let top = (c.sample.n() + c.m).min(GIBBS_MAX_N);
    let sigma = c.model.sigma();
    let mut worst = 0.0_f64;
    let mut next = gibbs_row(&c.model, 1)?;
    for n in 1..top {
        let row = next;
        next = gibbs_row(&c.model, n + 1)?;
        for k in 1..=n {
            let v = &row[k - 1];
            let bits = v.precision_bits();
            let rhs = &next[k] + &next[k - 1] * BigReal::from_f64(n as f64 - k as f64 * sigma, bits);
            worst = worst.max(v.relative_diff(&rhs));
        }
    }
    Ok(Check {
        pass: worst < 1e-10,
        detail: format!("n < {top}, max relative residual = {worst:.3e}"),
    })
}

fn weights_sum(c: &RunConfig) -> Result<Check> {
    let (n, j) = (c.sample.n(), c.sample.j());
    let mut freqs = vec![1; j];
    freqs[0] = n - j + 1;
    let w = predictive_weights(&c.model, &c.sample, &freqs)?;
    let gap = (w.total() - 1.0).abs();
    Ok(Check {
        pass: gap < 1e-12 && w.p_new > 0.0,
        detail: format!("p_new = {:.6}, |Σ - 1| = {gap:.3e}", w.p_new),
    })
}

fn hpd_mass(c: &RunConfig) -> Result<Check> {
    if c.m > EXACT_CUTOFF {
        return Ok(skipped(format!("m = {} exceeds the exact cutoff", c.m)));
    }
    let pmf = exact_pmf_with_precision(&c.model, &c.sample, c.m, c.precision_bits)?;
    let level = 1.0 - c.alpha;
    let h = hpd_interval(&pmf, level)?;
    Ok(Check {
        pass: h.mass >= level - 1e-12 && h.lo <= h.hi,
        detail: format!("[{}, {}] holds {:.6} ≥ {level}", h.lo, h.hi, h.mass),
    })
}

fn limit_normalization(c: &RunConfig) -> Result<Check> {
    let total = limit_expectation(&c.model, &c.sample, |_| 1.0)?;
    let gap = (total - 1.0).abs();
    Ok(Check {
        pass: gap < 1e-6,
        detail: format!("|∫f - 1| = {gap:.3e}"),
    })
}

fn skipped(reason: String) -> Check {
    Check {
        pass: true,
        detail: format!("skipped: {reason}"),
    }
}

/// Runs every check, writes the report and returns whether all passed.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> std::result::Result<bool, CliError> {
    let checks: [(&'static str, fn(&RunConfig) -> Result<Check>); 6] = [
        ("pmf_normalization", pmf_normalization),
        ("oracle_agreement", oracle_agreement),
        ("gibbs_recursion", gibbs_recursion),
        ("predictive_weights_sum", weights_sum),
        ("hpd_mass", hpd_mass),
        ("limit_density_normalization", limit_normalization),
    ];
    let results: Vec<CheckOut> = checks
        .iter()
        .map(|(name, check)| {
            let (pass, detail) = match check(config) {
                Ok(c) => (c.pass, c.detail),
                Err(e) => (false, format!("error: {e}")),
            };
            CheckOut { name, pass, detail }
        })
        .collect();
    let passed = results.iter().all(|c| c.pass);
    let rows = results
        .iter()
        .map(|c| vec![c.name.to_string(), c.pass.to_string(), c.detail.clone()])
        .collect();
    let doc = ValidateDoc {
        header: Header::new(config),
        m: config.m,
        passed,
        checks: results,
    };
    emit(config, out, &doc, &["check", "pass", "detail"], rows)?;
    Ok(passed)
}
