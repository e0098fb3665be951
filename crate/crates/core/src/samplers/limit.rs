//! Limits of K_m^(n) / m^σ as m → ∞.
//!
//! Under the stable prior the limit is S = B·Y with B ~ Beta(a, b) and
//! Y ~ Mittag-Leffler(q) independent. Under NGG(σ, β) the limit Z is S
//! exponentially tilted by e^{-(β/S)^{1/σ}}, whose mean is the normalizing
//! constant a(n, j) = A(n, j) / Γ(j); under PD(σ, θ) the Beta and
//! Mittag-Leffler parameters shift with θ.

use rand_distr::{Beta, Distribution};
use serde::Serialize;

use super::rng::RandomState;
use super::stable::{sample_mittag_leffler, TiltedDraw};
use crate::error::{domain, Result};
use crate::models::{Family, ModelParams, SampleSummary};
use crate::numerics::{tilted_gamma_sum, BigReal, DEFAULT_PRECISION};

/// Parameters of the limiting variable for a given prior and basic sample.
#[derive(Debug, Clone)]
pub struct LimitLaw {
    params: ModelParams,
    sample: SampleSummary,
    norm_const: BigReal,
}

/// Shapes of the Beta × Mittag-Leffler mixture behind a limit law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureShape {
    pub beta_a: f64,
    pub beta_b: f64,
    pub ml_index: f64,
}

impl LimitLaw {
    pub fn new(params: ModelParams, sample: SampleSummary) -> Result<Self> {
        let norm_const = match params.beta() {
            Some(beta) if beta > 0.0 => {
                let sum = tilted_gamma_sum(sample.n(), sample.j(), params.sigma(), beta, DEFAULT_PRECISION)?;
                let bits = sum.precision_bits();
                &sum / BigReal::from_i64(sample.j() as i64, bits).gamma()
            }
            _ => BigReal::one_with(DEFAULT_PRECISION),
        };
        Ok(LimitLaw {
            params,
            sample,
            norm_const,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn sample(&self) -> &SampleSummary {
        &self.sample
    }

    /// P(accept) of the tilting step: A(n, j) / Γ(j) for NGG, 1 otherwise.
    pub fn norm_const(&self) -> &BigReal {
        &self.norm_const
    }

    pub fn shape(&self) -> MixtureShape {
        let sigma = self.params.sigma();
        let n = self.sample.n() as f64;
        let j = self.sample.j() as f64;
        let theta = self.params.theta().unwrap_or(0.0);
        MixtureShape {
            beta_a: j + theta / sigma,
            beta_b: n / sigma - j,
            ml_index: (theta + n) / sigma,
        }
    }

    /// One draw of the untilted mixture B·Y.
    fn mixture(&self, rng: &mut RandomState) -> Result<f64> {
        let shape = self.shape();
        let b = Beta::new(shape.beta_a, shape.beta_b)
            .map_err(|e| domain(e.to_string()))?
            .sample(rng);
        let y = sample_mittag_leffler(shape.ml_index, self.params.sigma(), rng)?;
        Ok(b * y)
    }
}

/// NGG limit by rejection, reporting how many mixture proposals were used.
pub fn sample_limit_ngg_counted(law: &LimitLaw, rng: &mut RandomState) -> Result<TiltedDraw> {
    let beta = law
        .params
        .beta()
        .ok_or_else(|| domain("sample_limit_ngg needs a generalized gamma prior"))?;
    let inv = 1.0 / law.params.sigma();
    let mut proposals = 0;
    loop {
        proposals += 1;
        let s = law.mixture(rng)?;
        if beta == 0.0 || rng.exponential() >= (beta / s).powf(inv) {
            return Ok(TiltedDraw { value: s, proposals });
        }
    }
}

/// One draw of the NGG limit Z_{n,j}.
pub fn sample_limit_ngg(law: &LimitLaw, rng: &mut RandomState) -> Result<f64> {
    Ok(sample_limit_ngg_counted(law, rng)?.value)
}

/// One draw of the PD limit B_{j+θ/σ, n/σ-j} · Y_{(θ+n)/σ}.
pub fn sample_limit_pd(params: &ModelParams, sample: &SampleSummary, rng: &mut RandomState) -> Result<f64> {
    if params.family() != Family::Pd {
        return Err(domain("sample_limit_pd needs a Poisson–Dirichlet prior"));
    }
    LimitLaw::new(*params, *sample)?.mixture(rng)
}

/// Family-appropriate draw from a limit law.
pub fn sample_limit(law: &LimitLaw, rng: &mut RandomState) -> Result<f64> {
    match law.params.family() {
        Family::Ngg => sample_limit_ngg(law, rng),
        Family::Pd => law.mixture(rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::stable::mittag_leffler_mean;

    #[test]
    fn normalizer_single_term() {
        let law = LimitLaw::new(ModelParams::ngg(0.5, 1.0).unwrap(), SampleSummary::new(1, 1).unwrap()).unwrap();
        assert!((law.norm_const().to_f64() - (-1.0_f64).exp()).abs() < 1e-15);
        let stable = LimitLaw::new(ModelParams::ngg(0.5, 0.0).unwrap(), SampleSummary::new(4, 2).unwrap()).unwrap();
        assert_eq!(stable.norm_const().to_f64(), 1.0);
    }

    #[test]
    fn zero_tilt_always_accepts() {
        let law = LimitLaw::new(ModelParams::ngg(0.4, 0.0).unwrap(), SampleSummary::new(6, 2).unwrap()).unwrap();
        let mut rng = RandomState::new(9);
        for _ in 0..1000 {
            assert_eq!(sample_limit_ngg_counted(&law, &mut rng).unwrap().proposals, 1);
        }
    }

    #[test]
    fn pd_mean() {
        let (sigma, theta, n, j) = (0.5, 1.5, 6, 3);
        let params = ModelParams::pd(sigma, theta).unwrap();
        let sample = SampleSummary::new(n, j).unwrap();
        let mut rng = RandomState::new(4);
        let draws = 100_000;
        let mean = (0..draws)
            .map(|_| sample_limit_pd(&params, &sample, &mut rng).unwrap())
            .sum::<f64>()
            / draws as f64;
        let expected = (j as f64 * sigma + theta) / (n as f64 + theta)
            * mittag_leffler_mean((theta + n as f64) / sigma, sigma);
        assert!((mean / expected - 1.0).abs() < 0.01, "{mean} vs {expected}");
    }

    #[test]
    fn family_mismatch() {
        let pd = ModelParams::pd(0.5, 1.0).unwrap();
        let sample = SampleSummary::new(2, 1).unwrap();
        let law = LimitLaw::new(pd, sample).unwrap();
        let mut rng = RandomState::new(1);
        assert!(sample_limit_ngg(&law, &mut rng).is_err());
        assert!(sample_limit_pd(&ModelParams::ngg(0.5, 1.0).unwrap(), &sample, &mut rng).is_err());
    }
}
