//! Exact conditional distribution of the number of new species K_m^(n)
//! given K_n = j, its mean and HPD intervals.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::models::{gibbs_vnk_with_precision, ModelParams, SampleSummary};
use crate::numerics::{
    gfc_row, ln_tilt_ratio, rising_factorial, tilted_gamma_rows, tilted_gamma_sums_adaptive, BigReal, DEFAULT_PRECISION,
};

/// Largest m the exact engine accepts.
pub const EXACT_CUTOFF: usize = 10_000;

/// Largest n + m evaluated by the alternating incomplete-gamma sums; larger
/// sizes use the quadrature form of the same masses.
pub const ALTERNATING_LIMIT: usize = 2048;

/// Slack allowed when comparing accumulated mass with a credibility level.
const MASS_TOLERANCE: f64 = 1e-12;

/// P[K_m^(n) = k | K_n = j] for k = 0..=m.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorPmf {
    m: usize,
    probs: Vec<f64>,
    params: ModelParams,
    sample: SampleSummary,
}

impl PosteriorPmf {
    /// Wraps an explicit probability vector (length m + 1).
    pub fn from_probs(params: ModelParams, sample: SampleSummary, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(domain("a PMF needs at least one entry"));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(domain("probabilities must be finite and nonnegative"));
        }
        Ok(PosteriorPmf {
            m: probs.len() - 1,
            probs,
            params,
            sample,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn sample(&self) -> &SampleSummary {
        &self.sample
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Forward pass of the species-count chain with closed-form new-species
/// probability `p_new(N, K)`; entry k is P(k new species after m steps).
fn chain_pass<F: Fn(usize, usize) -> f64>(sample: &SampleSummary, m: usize, p_new: F) -> Vec<f64> {
    let (n, j) = (sample.n(), sample.j());
    let mut q = vec![0.0; m + 1];
    q[0] = 1.0;
    for i in 0..m {
        for k in (0..=i).rev() {
            let p = p_new(n + i, j + k);
            let mass = q[k];
            q[k + 1] += mass * p;
            q[k] = mass * (1.0 - p);
        }
    }
    q
}

fn ensure_cutoff(m: usize) -> Result<()> {
    if m > EXACT_CUTOFF {
        Err(Error::ExactCutoff {
            m,
            cutoff: EXACT_CUTOFF,
        })
    } else {
        Ok(())
    }
}

pub fn exact_pmf(params: &ModelParams, sample: &SampleSummary, m: usize) -> Result<PosteriorPmf> {
    exact_pmf_with_precision(params, sample, m, DEFAULT_PRECISION)
}

/// Exact PMF; `precision_bits` is the starting precision for the
/// alternating sums (raised as needed).
///
/// NGG(σ, β):
/// P(k) = 𝒢(m, k; σ, n - jσ) / (n)_m · A(n+m, j+k) / A(n, j).
/// PD(σ, θ) (and the stable boundary β = 0): forward chain recursion with the
/// closed-form predictive weights.
pub fn exact_pmf_with_precision(
    params: &ModelParams,
    sample: &SampleSummary,
    m: usize,
    precision_bits: u32,
) -> Result<PosteriorPmf> {
    ensure_cutoff(m)?;
    exact_pmf_uncapped(params, sample, m, precision_bits)
}

/// As [`exact_pmf_with_precision`] but without the size cutoff; cost grows
/// like m² and memory like m.
pub fn exact_pmf_uncapped(
    params: &ModelParams,
    sample: &SampleSummary,
    m: usize,
    precision_bits: u32,
) -> Result<PosteriorPmf> {
    let sigma = params.sigma();
    let probs = if let Some(theta) = params.closed_form_theta() {
        chain_pass(sample, m, |nn, k| (theta + sigma * k as f64) / (theta + nn as f64))
    } else if m == 0 {
        vec![1.0]
    } else {
        let beta = params.beta().expect("generalized gamma prior");
        if sample.n() + m <= ALTERNATING_LIMIT {
            alternating_pmf(sigma, beta, sample, m, precision_bits)?
        } else {
            quadrature_pmf(sigma, beta, sample, m)?
        }
    };
    PosteriorPmf::from_probs(*params, *sample, probs)
}

fn alternating_pmf(sigma: f64, beta: f64, sample: &SampleSummary, m: usize, bits: u32) -> Result<Vec<f64>> {
    let (n, j) = (sample.n(), sample.j());
    let upper = tilted_gamma_sums_adaptive(n + m, j, j + m, sigma, beta, bits)?;
    let base = tilted_gamma_sums_adaptive(n, j, j, sigma, beta, upper.precision_bits)?;
    let w = base.precision_bits.max(upper.precision_bits);
    let s = BigReal::from_f64(sigma, w);
    let r = BigReal::from_i64(n as i64, w) - BigReal::from_i64(j as i64, w) * &s;
    let coefficients = gfc_row(m, &s, &r);
    let scale = rising_factorial(&BigReal::from_i64(n as i64, w), m) * &base.values[0];
    Ok(coefficients
        .iter()
        .zip(&upper.values)
        .map(|(c, a)| (c * a / &scale).to_f64())
        .collect())
}

/// P(k) = q(k) · a(n+m, j+k) / a(n, j) with q the stable-prior PMF and
/// a = A/Γ evaluated by quadrature.
fn quadrature_pmf(sigma: f64, beta: f64, sample: &SampleSummary, m: usize) -> Result<Vec<f64>> {
    let (n, j) = (sample.n(), sample.j());
    let q = chain_pass(sample, m, |nn, k| sigma * k as f64 / nn as f64);
    let ln_base = ln_tilt_ratio(n, j, sigma, beta)?;
    q.iter()
        .enumerate()
        .map(|(k, &qk)| {
            if qk == 0.0 {
                Ok(0.0)
            } else {
                Ok(qk * (ln_tilt_ratio(n + m, j + k, sigma, beta)? - ln_base).exp())
            }
        })
        .collect()
}

/// Independent PMF from the forward recursion on V-ratio transitions
/// P(new | N, K) = V_{N+1,K+1} / V_{N,K}, with every V evaluated afresh in
/// arbitrary precision.
pub fn dp_oracle_pmf(params: &ModelParams, sample: &SampleSummary, m: usize) -> Result<PosteriorPmf> {
    let (n, j) = (sample.n(), sample.j());
    // rows[i][k] = V_{n+i, j+k} (up to a factor constant in k and i for NGG)
    let mut rows: Vec<Vec<BigReal>> = Vec::with_capacity(m + 1);
    match params.beta() {
        Some(beta) if beta > 0.0 => {
            // V_{N,K} ∝ σ^K A(N, K) / Γ(N); the ratio needs A and the explicit factors.
            let table = tilted_gamma_rows(n..=n + m, j, j + m, params.sigma(), beta, DEFAULT_PRECISION)?;
            for (i, sums) in table.iter().enumerate() {
                let w = sums.precision_bits;
                let s = BigReal::from_f64(params.sigma(), w);
                let gamma_n = BigReal::from_i64((n + i) as i64, w).gamma();
                rows.push(
                    sums.values[..=i]
                        .iter()
                        .enumerate()
                        .map(|(k, a)| s.powi((j + k) as i32) * a / &gamma_n)
                        .collect(),
                );
            }
        }
        _ => {
            for i in 0..=m {
                rows.push(
                    (0..=i)
                        .map(|k| gibbs_vnk_with_precision(params, n + i, j + k, DEFAULT_PRECISION))
                        .collect::<Result<_>>()?,
                );
            }
        }
    }
    let mut q = vec![0.0; m + 1];
    q[0] = 1.0;
    for i in 0..m {
        for k in (0..=i).rev() {
            let p = (&rows[i + 1][k + 1] / &rows[i][k]).to_f64();
            let mass = q[k];
            q[k + 1] += mass * p;
            q[k] = mass * (1.0 - p);
        }
    }
    PosteriorPmf::from_probs(*params, *sample, q)
}

/// Bayes estimate under quadratic loss, Σ k P(k).
pub fn posterior_mean(pmf: &PosteriorPmf) -> f64 {
    pmf.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
}

/// Shortest contiguous interval of k values holding at least `alpha` mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HpdInterval {
    pub lo: usize,
    pub hi: usize,
    pub mass: f64,
    pub alpha: f64,
}

/// Shortest [lo, hi] with mass ≥ alpha (up to 1e-12 slack for accumulated
/// rounding); ties go to the smaller lo.
pub fn hpd_interval(pmf: &PosteriorPmf, alpha: f64) -> Result<HpdInterval> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!("credibility level must lie in (0, 1], got {alpha}")));
    }
    let mut prefix = Vec::with_capacity(pmf.probs.len() + 1);
    prefix.push(0.0);
    for p in &pmf.probs {
        prefix.push(prefix.last().copied().unwrap_or(0.0) + p);
    }
    let target = alpha - MASS_TOLERANCE;
    let len = pmf.probs.len();
    let mut best: Option<(usize, usize)> = None;
    let mut hi = 0;
    for lo in 0..len {
        if hi < lo {
            hi = lo;
        }
        while hi < len && prefix[hi + 1] - prefix[lo] < target {
            hi += 1;
        }
        if hi == len {
            break;
        }
        if best.is_none_or(|(bl, bh)| hi - lo < bh - bl) {
            best = Some((lo, hi));
        }
    }
    let (lo, hi) = best.ok_or_else(|| {
        Error::Consistency(format!("total mass {} is below the level {alpha}", prefix[len]))
    })?;
    Ok(HpdInterval {
        lo,
        hi,
        mass: (prefix[hi + 1] - prefix[lo]).min(1.0),
        alpha,
    })
}
