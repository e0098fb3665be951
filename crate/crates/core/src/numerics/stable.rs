//! Positive σ-stable law with Laplace transform e^{-λ^σ}.
//!
//! Everything here goes through Zolotarev's function
//! A(u) = [sin(σu)^σ sin((1-σ)u)^{1-σ} / sin u]^{1/(1-σ)}, u ∈ (0, π),
//! which is increasing from A(0+) = σ^{σ/(1-σ)}(1-σ) to +∞.

use std::f64::consts::PI;

use super::quadrature::Quadrature;
use crate::error::{domain, Result};

pub(crate) fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("stability index must lie in (0, 1), got {sigma}")))
    }
}

/// ln A(u).
pub fn ln_zolotarev(u: f64, sigma: f64) -> f64 {
    let s1 = 1.0 - sigma;
    (sigma * (sigma * u).sin().ln() + s1 * (s1 * u).sin().ln() - u.sin().ln()) / s1
}

pub fn zolotarev(u: f64, sigma: f64) -> f64 {
    ln_zolotarev(u, sigma).exp()
}

/// A(0+).
pub fn zolotarev_floor(sigma: f64) -> f64 {
    let s1 = 1.0 - sigma;
    sigma.powf(sigma / s1) * s1
}

fn quad() -> Quadrature {
    Quadrature {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_segments: 4000,
    }
}

/// Below this value of x^{-σ} the power series in x^{-σ} is used; the
/// Zolotarev integrand turns into a spike at π there.
const SERIES_THRESHOLD: f64 = 0.25;

/// Σ_{k≥1} (-1)^{k+1} Γ(kσ+1)/k! sin(πkσ) t^k w(k), t = x^{-σ}.
fn tail_series(t: f64, sigma: f64, weight: impl Fn(f64) -> f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let ln_t = t.ln();
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let mag = (ln_gamma(kf * sigma + 1.0) - ln_gamma(kf + 1.0) + kf * ln_t).exp() * weight(kf);
        let term = mag * (PI * kf * sigma).sin();
        sum += if k % 2 == 1 { term } else { -term };
        if mag < 1e-18 * sum.abs() {
            break;
        }
    }
    sum / PI
}

/// Density f_σ(x). σ = 1/2 uses the closed form.
pub fn stable_density(x: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if sigma == 0.5 {
        if !(x > 0.0) {
            return if x == 0.0 { Ok(0.0) } else { Err(domain("x must be positive")) };
        }
        return Ok((-0.25 / x).exp() / (2.0 * PI.sqrt() * x.powf(1.5)));
    }
    if x > 0.0 && x.is_finite() && x.powf(-sigma) <= SERIES_THRESHOLD {
        return Ok(tail_series(x.powf(-sigma), sigma, |_| 1.0) / x);
    }
    stable_density_quadrature(x, sigma)
}

/// Density f_σ(x) from the Zolotarev integral, for any σ (including 1/2).
pub fn stable_density_quadrature(x: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if x == 0.0 || x == f64::INFINITY {
        return Ok(0.0);
    }
    if !(x > 0.0) {
        return Err(domain("x must be positive"));
    }
    let s1 = 1.0 - sigma;
    let ln_c = -sigma / s1 * x.ln();
    let c = ln_c.exp();
    let floor = zolotarev_floor(sigma);
    let integrand = |u: f64| {
        let a = zolotarev(u, sigma);
        let e = -c * (a - floor);
        if e < -745.0 || !a.is_finite() {
            0.0
        } else {
            a * e.exp()
        }
    };
    let integral = quad().integrate(integrand, 0.0, PI)?.value;
    if integral <= 0.0 {
        return Ok(0.0);
    }
    let ln_f = (sigma / (s1 * PI)).ln() - x.ln() / s1 - c * floor + integral.ln();
    Ok(ln_f.exp())
}

/// Distribution function F_σ(x) = (1/π) ∫_0^π exp(-A(u) x^{-σ/(1-σ)}) du.
pub fn stable_cdf(x: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    if sigma == 0.5 {
        return Ok(statrs::function::erf::erfc(0.5 / x.sqrt()));
    }
    let t = x.powf(-sigma);
    if t <= SERIES_THRESHOLD {
        return Ok(1.0 - tail_series(t, sigma, |k| 1.0 / (k * sigma)));
    }
    let c = x.powf(-sigma / (1.0 - sigma));
    // Integrate whichever of F and 1 - F is the smaller quantity.
    let lower = quad()
        .integrate(|u| (-c * zolotarev(u, sigma)).exp(), 0.0, PI)?
        .value
        / PI;
    if lower < 0.5 {
        return Ok(lower);
    }
    let upper = quad()
        .integrate(
            |u| {
                let a = zolotarev(u, sigma);
                if a.is_finite() {
                    -(-c * a).exp_m1()
                } else {
                    1.0
                }
            },
            0.0,
            PI,
        )?
        .value
        / PI;
    Ok(1.0 - upper)
}
