//! Prior families, predictive weights and Gibbs weights V_{n,k}.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::stable::check_sigma;
use crate::numerics::{tilted_gamma_sums_adaptive, BigReal, DEFAULT_PRECISION};
use crate::samplers::{sample_exp_tilted_stable, sample_mittag_leffler, sample_positive_stable, RandomState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Ngg,
    Pd,
}

/// Prior configuration: NGG(σ, β) or PD(σ, θ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    family: Family,
    sigma: f64,
    /// β for NGG, θ for PD.
    tilt: f64,
}

impl ModelParams {
    /// Normalized generalized gamma prior; β = 0 is the normalized σ-stable case.
    pub fn ngg(sigma: f64, beta: f64) -> Result<Self> {
        check_sigma(sigma)?;
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(domain(format!("β must be finite and ≥ 0, got {beta}")));
        }
        Ok(ModelParams {
            family: Family::Ngg,
            sigma,
            tilt: beta,
        })
    }

    /// Two-parameter Poisson–Dirichlet prior.
    pub fn pd(sigma: f64, theta: f64) -> Result<Self> {
        check_sigma(sigma)?;
        if !(theta > -sigma && theta.is_finite()) {
            return Err(domain(format!("θ must be finite and > -σ = {}, got {theta}", -sigma)));
        }
        Ok(ModelParams {
            family: Family::Pd,
            sigma,
            tilt: theta,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn beta(&self) -> Option<f64> {
        (self.family == Family::Ngg).then_some(self.tilt)
    }

    pub fn theta(&self) -> Option<f64> {
        (self.family == Family::Pd).then_some(self.tilt)
    }

    /// NGG(σ, 0) and PD(σ, 0) are both the normalized σ-stable process.
    pub fn is_stable(&self) -> bool {
        self.tilt == 0.0
    }

    /// PD parameter θ governing the closed-form weights, if this prior has them.
    pub(crate) fn closed_form_theta(&self) -> Option<f64> {
        match self.family {
            Family::Pd => Some(self.tilt),
            Family::Ngg if self.tilt == 0.0 => Some(0.0),
            Family::Ngg => None,
        }
    }
}

/// Predictively sufficient summary of the basic sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSummary {
    n: usize,
    j: usize,
}

impl SampleSummary {
    pub fn new(n: usize, j: usize) -> Result<Self> {
        if n == 0 || j == 0 || j > n {
            return Err(Error::Consistency(format!(
                "need 1 ≤ j ≤ n, got n = {n}, j = {j}"
            )));
        }
        Ok(SampleSummary { n, j })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> usize {
        self.j
    }
}

/// Probability that the next draw is a new species, and that it repeats each
/// observed species.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictiveWeights {
    pub p_new: f64,
    pub p_old: Vec<f64>,
}

impl PredictiveWeights {
    pub fn total(&self) -> f64 {
        self.p_new + self.p_old.iter().sum::<f64>()
    }
}

/// Weights of the next observation given the species frequencies `freqs`
/// of a sample summarized by `sample`.
pub fn predictive_weights(
    params: &ModelParams,
    sample: &SampleSummary,
    freqs: &[usize],
) -> Result<PredictiveWeights> {
    let n = sample.n;
    if freqs.len() != sample.j {
        return Err(Error::Consistency(format!(
            "{} frequencies given for j = {} species",
            freqs.len(),
            sample.j
        )));
    }
    if freqs.contains(&0) {
        return Err(Error::Consistency("species frequencies must be ≥ 1".into()));
    }
    if freqs.iter().sum::<usize>() != n {
        return Err(Error::Consistency(format!("frequencies do not sum to n = {n}")));
    }
    let sigma = params.sigma;
    let (p_new, old_scale) = match params.closed_form_theta() {
        Some(theta) => {
            let denom = theta + n as f64;
            ((theta + sample.j as f64 * sigma) / denom, 1.0 / denom)
        }
        None => {
            let (p_new, stay) = ngg_step(params, n, sample.j)?;
            (p_new, stay / (n as f64 - sample.j as f64 * sigma))
        }
    };
    let p_old = freqs.iter().map(|&f| (f as f64 - sigma) * old_scale).collect();
    Ok(PredictiveWeights { p_new, p_old })
}

/// NGG one-step probabilities (new species, no new species) from the
/// alternating incomplete-gamma sums:
/// p_new = σ A(n+1, j+1) / (n A(n, j)), p_stay = (n - jσ) A(n+1, j) / (n A(n, j)).
fn ngg_step(params: &ModelParams, n: usize, j: usize) -> Result<(f64, f64)> {
    let (sigma, beta) = (params.sigma, params.tilt);
    let base = tilted_gamma_sums_adaptive(n, j, j, sigma, beta, DEFAULT_PRECISION)?;
    let next = tilted_gamma_sums_adaptive(n + 1, j, j + 1, sigma, beta, base.precision_bits)?;
    let bits = next.precision_bits;
    let denom = BigReal::from_i64(n as i64, bits) * &base.values[0];
    let s = BigReal::from_f64(sigma, bits);
    let p_new = (&s * &next.values[1] / &denom).to_f64();
    let stay_coef = BigReal::from_i64(n as i64, bits) - BigReal::from_i64(j as i64, bits) * &s;
    let p_stay = (stay_coef * &next.values[0] / &denom).to_f64();
    Ok((p_new, p_stay))
}

/// Gibbs weight V_{n,k} at `bits` of working precision.
pub fn gibbs_vnk_with_precision(params: &ModelParams, n: usize, k: usize, bits: u32) -> Result<BigReal> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::Index {
            n,
            k,
            reason: "need 1 ≤ k ≤ n".into(),
        });
    }
    let s = BigReal::from_f64(params.sigma, bits);
    if let Some(theta) = params.closed_form_theta() {
        // ∏_{i=1}^{k-1} (θ + iσ) / (θ + 1)_{n-1}
        let t = BigReal::from_f64(theta, bits);
        let one = BigReal::one_with(bits);
        let mut v = one.clone();
        for i in 1..k {
            v = v * (&t + BigReal::from_i64(i as i64, bits) * &s);
        }
        for i in 0..n - 1 {
            v = v / (&t + &one + BigReal::from_i64(i as i64, bits));
        }
        return Ok(v);
    }
    // e^β σ^{k-1} A(n, k) / Γ(n)
    let sums = tilted_gamma_sums_adaptive(n, k, k, params.sigma, params.tilt, bits)?;
    let w = sums.precision_bits;
    let beta = BigReal::from_f64(params.tilt, w);
    let gamma_n = BigReal::from_i64(n as i64, w).gamma();
    Ok(beta.exp() * s.with_precision(w).powi(k as i32 - 1) * &sums.values[0] / gamma_n)
}

pub fn gibbs_vnk(params: &ModelParams, n: usize, k: usize) -> Result<BigReal> {
    gibbs_vnk_with_precision(params, n, k, DEFAULT_PRECISION)
}

/// V_{n,1}, ..., V_{n,n}, sharing one precision schedule across the row.
pub fn gibbs_row(params: &ModelParams, n: usize) -> Result<Vec<BigReal>> {
    if n == 0 {
        return Err(Error::Index {
            n,
            k: 0,
            reason: "need n ≥ 1".into(),
        });
    }
    if params.closed_form_theta().is_some() {
        return (1..=n).map(|k| gibbs_vnk(params, n, k)).collect();
    }
    let sums = tilted_gamma_sums_adaptive(n, 1, n, params.sigma, params.tilt, DEFAULT_PRECISION)?;
    let w = sums.precision_bits;
    let s = BigReal::from_f64(params.sigma, w);
    let lead = BigReal::from_f64(params.tilt, w).exp() / BigReal::from_i64(n as i64, w).gamma();
    Ok(sums
        .values
        .iter()
        .enumerate()
        .map(|(i, a)| &lead * s.powi(i as i32) * a)
        .collect())
}

/// One draw of the σ-diversity: T_{σ,β}^{-σ} (NGG) or (T'_{σ,θ})^{-σ} (PD).
pub fn diversity_sample(params: &ModelParams, rng: &mut RandomState) -> Result<f64> {
    let sigma = params.sigma;
    let t = match params.family {
        Family::Ngg if params.tilt > 0.0 => sample_exp_tilted_stable(sigma, params.tilt, rng)?,
        // T' has density ∝ t^{-θ} f_σ(t), so T'^{-σ} is Mittag-Leffler with q = θ/σ.
        Family::Pd if params.tilt != 0.0 => return sample_mittag_leffler(params.tilt / sigma, sigma, rng),
        _ => sample_positive_stable(sigma, rng)?,
    };
    Ok(t.powf(-sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pd_single_observation() {
        let params = ModelParams::pd(0.5, 0.5).unwrap();
        let w = predictive_weights(&params, &SampleSummary::new(1, 1).unwrap(), &[1]).unwrap();
        assert_relative_eq!(w.p_new, 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(w.total(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn ngg_single_observation() {
        let params = ModelParams::ngg(0.5, 1.0).unwrap();
        let w = predictive_weights(&params, &SampleSummary::new(1, 1).unwrap(), &[1]).unwrap();
        assert_relative_eq!(w.p_new, 0.701_826_318_838_402_96, max_relative = 1e-14);
        assert_relative_eq!(w.total(), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn row_matches_pointwise() {
        for params in [ModelParams::ngg(0.4, 2.0).unwrap(), ModelParams::pd(0.4, 1.0).unwrap()] {
            let row = gibbs_row(&params, 7).unwrap();
            for (i, v) in row.iter().enumerate() {
                assert!(v.relative_diff(&gibbs_vnk(&params, 7, i + 1).unwrap()) < 1e-12);
            }
        }
    }

    #[test]
    fn frequency_validation() {
        let params = ModelParams::ngg(0.5, 1.0).unwrap();
        let sample = SampleSummary::new(3, 2).unwrap();
        assert!(matches!(predictive_weights(&params, &sample, &[3]), Err(Error::Consistency(_))));
        assert!(matches!(predictive_weights(&params, &sample, &[3, 0]), Err(Error::Consistency(_))));
        assert!(matches!(predictive_weights(&params, &sample, &[1, 1]), Err(Error::Consistency(_))));
        assert!(predictive_weights(&params, &sample, &[2, 1]).is_ok());
        assert!(SampleSummary::new(3, 4).is_err());
    }

    #[test]
    fn parameter_domains() {
        assert!(ModelParams::ngg(1.0, 1.0).is_err());
        assert!(ModelParams::ngg(0.5, -1.0).is_err());
        assert!(ModelParams::pd(0.5, -0.5).is_err());
        assert!(ModelParams::pd(0.5, -0.49).is_ok());
        let p = ModelParams::ngg(0.3, 2.0).unwrap();
        assert_eq!((p.beta(), p.theta()), (Some(2.0), None));
    }

    #[test]
    fn unit_weights_at_origin() {
        let pd = ModelParams::pd(0.4, 1.3).unwrap();
        assert_eq!(gibbs_vnk(&pd, 1, 1).unwrap().to_f64(), 1.0);
        let ngg = ModelParams::ngg(0.5, 1.0).unwrap();
        assert_relative_eq!(gibbs_vnk(&ngg, 1, 1).unwrap().to_f64(), 1.0, max_relative = 1e-15);
        assert!(matches!(gibbs_vnk(&ngg, 2, 3), Err(Error::Index { .. })));
    }
}
