//! Positive stable, exponentially tilted, polynomially tilted and
//! Mittag-Leffler variates.
//!
//! All of them start from Kanter's representation
//! T = (A(U) / E)^{(1-σ)/σ}, U ~ Unif(0, π), E ~ Exp(1),
//! with A the Zolotarev function.

use std::f64::consts::PI;

use rand_distr::{Distribution, Gamma};

use super::rng::RandomState;
use crate::error::{domain, Result};
use crate::numerics::quadrature::Quadrature;
use crate::numerics::stable::{check_sigma, ln_zolotarev, stable_density, zolotarev_floor};

/// Plain rejection is used up to this tilt; beyond it the draw is split
/// into a sum of less tilted pieces.
pub const PLAIN_REJECTION_MAX_BETA: f64 = 5.0;

fn kanter(sigma: f64, ln_a: f64, e: f64) -> f64 {
    ((ln_a - e.ln()) * (1.0 - sigma) / sigma).exp()
}

/// T with E[e^{-λT}] = e^{-λ^σ}.
pub fn sample_positive_stable(sigma: f64, rng: &mut RandomState) -> Result<f64> {
    check_sigma(sigma)?;
    let u = PI * rng.uniform();
    let e = rng.exponential();
    Ok(kanter(sigma, ln_zolotarev(u, sigma), e))
}

/// A tilted-stable draw together with the number of stable proposals it took.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedDraw {
    pub value: f64,
    pub proposals: u64,
}

/// Draw from the density ∝ e^{-β^{1/σ} t} f_σ(t) by plain rejection from
/// f_σ; the acceptance probability is e^{-β}.
pub fn sample_exp_tilted_stable_counted(sigma: f64, beta: f64, rng: &mut RandomState) -> Result<TiltedDraw> {
    check_sigma(sigma)?;
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(domain(format!("tilt must be finite and ≥ 0, got {beta}")));
    }
    let rate = beta.powf(1.0 / sigma);
    let mut proposals = 0;
    loop {
        proposals += 1;
        let t = sample_positive_stable(sigma, rng)?;
        if rng.exponential() >= rate * t {
            return Ok(TiltedDraw { value: t, proposals });
        }
    }
}

/// T_{σ,β}: density ∝ e^{-β^{1/σ} t} f_σ(t).
///
/// For β above [`PLAIN_REJECTION_MAX_BETA`] uses
/// T_{σ,β} = N^{-1/σ} Σ_{i=1}^N T^{(i)}_{σ,β/N} with N = ⌈β⌉, which keeps
/// each piece's acceptance rate above e^{-1}.
pub fn sample_exp_tilted_stable(sigma: f64, beta: f64, rng: &mut RandomState) -> Result<f64> {
    if beta <= PLAIN_REJECTION_MAX_BETA {
        return Ok(sample_exp_tilted_stable_counted(sigma, beta, rng)?.value);
    }
    let pieces = beta.ceil();
    let mut total = 0.0;
    for _ in 0..pieces as u64 {
        total += sample_exp_tilted_stable_counted(sigma, beta / pieces, rng)?.value;
    }
    Ok(total * pieces.powf(-1.0 / sigma))
}

fn check_poly(sigma: f64, gamma: f64) -> Result<()> {
    check_sigma(sigma)?;
    if !(gamma > -sigma && gamma.is_finite()) {
        return Err(domain(format!("polynomial tilt needs γ > -σ, got γ = {gamma}")));
    }
    Ok(())
}

/// Draw U on (0, π) with density ∝ A(u)^{-c}.
fn tilted_angle(sigma: f64, c: f64, rng: &mut RandomState) -> f64 {
    let ln_floor = zolotarev_floor(sigma).ln();
    if c == 0.0 {
        return PI * rng.uniform();
    }
    if c > 0.0 {
        // A^{-c} peaks at 0 and c·(ln A(u) - ln A(0)) ≥ cσu²/2, so a uniform
        // (small c) or half-normal (large c) envelope dominates it.
        let curvature = c * sigma;
        loop {
            if curvature < 1.0 {
                let u = PI * rng.uniform();
                let ln_accept = -c * (ln_zolotarev(u, sigma) - ln_floor);
                if rng.uniform().ln() <= ln_accept {
                    return u;
                }
            } else {
                let z: f64 = rand_distr::StandardNormal.sample(rng);
                let u = z.abs() / curvature.sqrt();
                if u >= PI || u == 0.0 {
                    continue;
                }
                let ln_accept = -c * (ln_zolotarev(u, sigma) - ln_floor) + 0.5 * curvature * u * u;
                if rng.uniform().ln() <= ln_accept {
                    return u;
                }
            }
        }
    }
    // c < 0: A^{|c|} = g^κ (π-u)^{-p} with g(u) = A(u)(π-u)^{1/(1-σ)}
    // decreasing, κ = |c|, p = κ/(1-σ) < 1. Propose from (π-u)^{-p}.
    let kappa = -c;
    let s1 = 1.0 - sigma;
    let p = kappa / s1;
    let ln_g = |u: f64| ln_zolotarev(u, sigma) + (PI - u).ln() / s1;
    let ln_g0 = ln_floor + PI.ln() / s1;
    loop {
        let w = PI * rng.uniform().powf(1.0 / (1.0 - p));
        let u = PI - w;
        if u <= 0.0 || u >= PI {
            continue;
        }
        if rng.uniform().ln() <= kappa * (ln_g(u) - ln_g0) {
            return u;
        }
    }
}

/// Draw from the density ∝ x^{-γ} f_σ(x), γ > -σ.
///
/// Tilting Kanter's (U, E) by T^{-γ} = (E / A(U))^c, c = γ(1-σ)/σ, makes
/// E ~ Gamma(1 + c) and U ∝ A(u)^{-c} independent; U is drawn by rejection.
pub fn sample_poly_tilted_stable(sigma: f64, gamma: f64, rng: &mut RandomState) -> Result<f64> {
    check_poly(sigma, gamma)?;
    let c = gamma * (1.0 - sigma) / sigma;
    let u = tilted_angle(sigma, c, rng);
    let e = if c == 0.0 {
        rng.exponential()
    } else {
        Gamma::new(1.0 + c, 1.0)
            .map_err(|e| domain(e.to_string()))?
            .sample(rng)
    };
    Ok(kanter(sigma, ln_zolotarev(u, sigma), e))
}

/// Mittag-Leffler variable Y_q = X^{-σ} with X ∝ x^{-qσ} f_σ(x); q > -1.
pub fn sample_mittag_leffler(q: f64, sigma: f64, rng: &mut RandomState) -> Result<f64> {
    if !(q > -1.0) {
        return Err(domain(format!("Mittag-Leffler index must exceed -1, got {q}")));
    }
    Ok(sample_poly_tilted_stable(sigma, q * sigma, rng)?.powf(-sigma))
}

/// E[Y_q] = (q+1) Γ(1+qσ) / Γ(1+qσ+σ).
pub fn mittag_leffler_mean(q: f64, sigma: f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    (q + 1.0) * (ln_gamma(1.0 + q * sigma) - ln_gamma(1.0 + q * sigma + sigma)).exp()
}

/// Slow inverse-CDF sampler for the density ∝ x^{-γ} f_σ(x), tabulated by
/// quadrature on a logarithmic grid. Used as an independent reference.
#[derive(Debug, Clone)]
pub struct PolyTiltedReference {
    ln_x: Vec<f64>,
    cdf: Vec<f64>,
}

impl PolyTiltedReference {
    pub fn new(sigma: f64, gamma: f64) -> Result<Self> {
        check_poly(sigma, gamma)?;
        // Density of ln X, up to normalization.
        let dens = |t: f64| {
            let x = t.exp();
            stable_density(x, sigma).map(|f| f * (t * (1.0 - gamma)).exp()).unwrap_or(0.0)
        };
        let peak = dens(0.0).max(1e-300);
        let mut lo = 0.0;
        while dens(lo) > 1e-18 * peak && lo > -200.0 {
            lo -= 0.5;
        }
        // Right tail decays like x^{-(σ+γ)}.
        let hi = 40.0 / (sigma + gamma);
        let cells = 4000;
        let h = (hi - lo) / cells as f64;
        let quad = Quadrature::with_rel_tol(1e-10);
        let mut ln_x = Vec::with_capacity(cells + 1);
        let mut cdf = Vec::with_capacity(cells + 1);
        let mut acc = 0.0;
        ln_x.push(lo);
        cdf.push(0.0);
        for i in 0..cells {
            let a = lo + i as f64 * h;
            acc += quad.integrate(dens, a, a + h)?.value;
            ln_x.push(a + h);
            cdf.push(acc);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Ok(PolyTiltedReference { ln_x, cdf })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let t = x.ln();
        let i = self.ln_x.partition_point(|&v| v <= t);
        if i == 0 {
            return 0.0;
        }
        if i >= self.ln_x.len() {
            return 1.0;
        }
        let (t0, t1) = (self.ln_x[i - 1], self.ln_x[i]);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        c0 + (c1 - c0) * (t - t0) / (t1 - t0)
    }

    pub fn sample(&self, rng: &mut RandomState) -> f64 {
        let u = rng.uniform();
        let i = self.cdf.partition_point(|&c| c < u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let (t0, t1) = (self.ln_x[i - 1], self.ln_x[i]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        (t0 + frac * (t1 - t0)).exp()
    }
}
