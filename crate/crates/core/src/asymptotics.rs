//! Large-m approximation through the limit law of K_m^(n) / m^σ.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Result};
use crate::models::{Family, ModelParams, SampleSummary};
use crate::numerics::stable::stable_density;
use crate::numerics::{ln_tilt_ratio, upper_incomplete_gamma, BigReal, Quadrature};
use crate::samplers::{mittag_leffler_mean, sample_limit, LimitLaw, RandomState};
use crate::stats::{mean_and_stderr, quantile_sorted};

const SERIES_PRECISION: u32 = 512;

fn quad() -> Quadrature {
    Quadrature {
        abs_tol: 0.0,
        rel_tol: 1e-11,
        max_segments: 4000,
    }
}

/// Density of the limit at z, choosing the finite incomplete-gamma sum for
/// NGG with σ = 1/2 and the mixture integral otherwise.
pub fn limit_density(z: f64, params: &ModelParams, sample: &SampleSummary) -> Result<f64> {
    if params.family() == Family::Ngg && params.sigma() == 0.5 {
        limit_density_half(z, params, sample)
    } else {
        limit_density_quadrature(z, params, sample)
    }
}

fn ln_normalizer(params: &ModelParams, sample: &SampleSummary) -> Result<f64> {
    match params.beta() {
        Some(beta) => ln_tilt_ratio(sample.n(), sample.j(), params.sigma(), beta),
        None => Ok(0.0),
    }
}

fn tilt_weight(z: f64, params: &ModelParams) -> f64 {
    match params.beta() {
        Some(beta) if beta > 0.0 => (-(beta / z).powf(1.0 / params.sigma())).exp(),
        _ => 1.0,
    }
}

/// Mixture-integral form, valid for every σ and both families:
///
/// ```text
/// g(z) = Γ(θ+n) / (Γ(a) Γ(b)) · z^{a-1} ∫_z^∞ (v - z)^{b-1} v^{-1/σ} f_σ(v^{-1/σ}) dv
/// ```
///
/// with a = j + θ/σ, b = n/σ - j (θ = 0 for NGG), times the NGG tilt
/// e^{-(β/z)^{1/σ}} / a(n, j).
pub fn limit_density_quadrature(z: f64, params: &ModelParams, sample: &SampleSummary) -> Result<f64> {
    if !(z > 0.0) {
        return if z == 0.0 { Ok(0.0) } else { Err(domain("limit density needs z > 0")) };
    }
    let sigma = params.sigma();
    let law_shape = LimitLaw::new(*params, *sample)?.shape();
    let (a, b) = (law_shape.beta_a, law_shape.beta_b);
    let theta = params.theta().unwrap_or(0.0);
    let inv = 1.0 / sigma;
    let mixing = |v: f64| v.powf(-inv) * stable_density(v.powf(-inv), sigma).unwrap_or(0.0);
    let scale = mittag_leffler_mean(law_shape.ml_index, sigma);
    let integral = if b < 1.0 {
        // t = (v - z)^b removes the endpoint singularity.
        quad()
            .integrate_to_infinity(|t| mixing(z + t.powf(1.0 / b)) / b, 0.0, scale.powf(b))?
            .value
    } else {
        quad()
            .integrate_to_infinity(|v| (v - z).powf(b - 1.0) * mixing(v), z, scale)?
            .value
    };
    if integral <= 0.0 {
        return Ok(0.0);
    }
    let ln_const = ln_gamma(theta + sample.n() as f64) - ln_gamma(a) - ln_gamma(b);
    let ln_g = ln_const + (a - 1.0) * z.ln() + integral.ln();
    Ok((ln_g - ln_normalizer(params, sample)?).exp() * tilt_weight(z, params))
}

/// NGG, σ = 1/2: with M = 2n - j - 1,
///
/// ```text
/// f(z) = e^{-(β/z)²} Γ(n) z^{j-1} / (A(n,j) Γ(2n-j) √π)
///        · Σ_{l=0}^{M} C(M,l) (-z)^l 2^{M-l} Γ(n - (j-1+l)/2; z²/4)
/// ```
///
/// The alternating sum is evaluated in arbitrary precision.
pub fn limit_density_half(z: f64, params: &ModelParams, sample: &SampleSummary) -> Result<f64> {
    if params.family() != Family::Ngg || params.sigma() != 0.5 {
        return Err(domain("the finite-sum density needs NGG with σ = 1/2"));
    }
    if !(z > 0.0) {
        return if z == 0.0 { Ok(0.0) } else { Err(domain("limit density needs z > 0")) };
    }
    let (n, j) = (sample.n(), sample.j());
    let m = 2 * n - j - 1;
    let bits = SERIES_PRECISION + 2 * m as u32;
    let zb = BigReal::from_f64(z, bits);
    let x = &zb * &zb / BigReal::from_i64(4, bits);
    let half = BigReal::from_f64(0.5, bits);
    let mut sum = BigReal::zero_with(bits);
    for l in 0..=m {
        let order = BigReal::from_i64(n as i64, bits) - BigReal::from_i64((j - 1 + l) as i64, bits) * &half;
        let g = upper_incomplete_gamma(&order, &x)?;
        let term = BigReal::binomial(m as u32, l as u32, bits)
            * zb.powi(l as i32)
            * BigReal::from_i64(2, bits).powi((m - l) as i32)
            * g;
        sum = if l % 2 == 0 { sum + term } else { sum - term };
    }
    let s = sum.to_f64();
    if s <= 0.0 {
        return Ok(0.0);
    }
    // Γ(n)/(Γ(2n-j)√π) with A(n,j) = Γ(j) a(n,j).
    let ln_pre = ln_gamma(n as f64) - ln_gamma((2 * n - j) as f64) - 0.5 * std::f64::consts::PI.ln()
        - ln_gamma(j as f64)
        - ln_normalizer(params, sample)?
        + (j as f64 - 1.0) * z.ln();
    Ok((ln_pre + s.ln()).exp() * tilt_weight(z, params))
}

/// ∫_0^∞ φ(z) f(z) dz by quadrature of the limit density.
pub fn limit_expectation<F: Fn(f64) -> f64>(params: &ModelParams, sample: &SampleSummary, phi: F) -> Result<f64> {
    let law = LimitLaw::new(*params, *sample)?.shape();
    let scale = law.beta_a / (law.beta_a + law.beta_b) * mittag_leffler_mean(law.ml_index, params.sigma());
    let q = Quadrature {
        abs_tol: 1e-13,
        rel_tol: 1e-10,
        max_segments: 2000,
    };
    Ok(q.integrate_to_infinity(|z| phi(z) * limit_density(z, params, sample).unwrap_or(f64::NAN), 0.0, scale)?
        .value)
}

/// P(Z ≤ z_i) for an increasing grid, by quadrature of the density.
pub fn limit_cdf_on_grid(params: &ModelParams, sample: &SampleSummary, grid: &[f64]) -> Result<Vec<f64>> {
    let q = Quadrature {
        abs_tol: 1e-14,
        rel_tol: 1e-10,
        max_segments: 2000,
    };
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(grid.len());
    for &z in grid {
        if z < prev {
            return Err(domain("grid must be increasing"));
        }
        acc += q.integrate(|t| limit_density(t, params, sample).unwrap_or(f64::NAN), prev, z)?.value;
        out.push(acc);
        prev = z;
    }
    Ok(out)
}

/// Large-m point estimate and interval for K_m^(n).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticEstimate {
    pub m: usize,
    /// m^σ · mean of the limit draws.
    pub point: f64,
    /// m^σ · (α/2, 1 - α/2) empirical quantiles.
    pub interval: (f64, f64),
    pub alpha: f64,
    pub mc_samples: usize,
    /// m^σ · standard error of the draw mean.
    pub mc_stderr: f64,
}

/// Draws of the limit variable; draw i uses `rng.split(i)`.
pub fn limit_draws(params: &ModelParams, sample: &SampleSummary, draws: usize, rng: &RandomState) -> Result<Vec<f64>> {
    let law = LimitLaw::new(*params, *sample)?;
    (0..draws)
        .into_par_iter()
        .map(|i| sample_limit(&law, &mut rng.split(i as u64)))
        .collect()
}

/// Fewest draws accepted by [`approximate_posterior`]; tail quantiles are
/// meaningless below this.
pub const MIN_LIMIT_DRAWS: usize = 1000;

/// Monte Carlo approximation of the posterior of K_m^(n) from the limit
/// law. No finite-m bias correction is applied.
pub fn approximate_posterior(
    params: &ModelParams,
    sample: &SampleSummary,
    m: usize,
    alpha: f64,
    n_draws: usize,
    rng: &RandomState,
) -> Result<AsymptoticEstimate> {
    if m == 0 {
        return Err(domain("the limit approximation needs m ≥ 1"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!("α must lie in (0, 1), got {alpha}")));
    }
    if n_draws < MIN_LIMIT_DRAWS {
        return Err(domain(format!("at least {MIN_LIMIT_DRAWS} limit draws are needed, got {n_draws}")));
    }
    let mut draws = limit_draws(params, sample, n_draws, rng)?;
    let (mean, se) = mean_and_stderr(&draws);
    draws.sort_by(f64::total_cmp);
    let scale = (m as f64).powf(params.sigma());
    Ok(AsymptoticEstimate {
        m,
        point: scale * mean,
        interval: (
            scale * quantile_sorted(&draws, alpha / 2.0),
            scale * quantile_sorted(&draws, 1.0 - alpha / 2.0),
        ),
        alpha,
        mc_samples: n_draws,
        mc_stderr: scale * se,
    })
}

/// E[e^{-λ T} | data] for the total mass T of a normalized σ-stable prior:
///
/// ```text
/// (1/Γ(j)) ∫_{λ^σ}^∞ y^{j-1} (1 - λ / y^{1/σ})^{n-1} e^{-y} dy,
/// ```
///
/// by adaptive quadrature. This is a(n, j) at β = λ^σ.
pub fn posterior_stable_laplace(sample: &SampleSummary, sigma: f64, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(domain(format!("λ must be finite and ≥ 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    Ok(ln_tilt_ratio(sample.n(), sample.j(), sigma, lambda.powf(sigma))?.exp())
}
