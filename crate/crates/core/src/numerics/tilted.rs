//! Tilted gamma masses behind the generalized gamma weights.
//!
//! For N ≥ 1, K ≥ 1, σ ∈ (0,1), β > 0
//!
//! ```text
//! A(N, K) = Σ_{l=0}^{N-1} C(N-1, l) (-1)^l β^{l/σ} Γ(K - l/σ; β)
//!         = ∫_β^∞ y^{K-1} (1 - (β/y)^{1/σ})^{N-1} e^{-y} dy
//! ```
//!
//! The alternating form is what the closed-form weights are written in; it
//! cancels catastrophically, so it is evaluated in arbitrary precision. The
//! integral form is positive and gives a cheap log-space evaluation of
//! a(N, K) = A(N, K) / Γ(K) ∈ (0, 1] used for precision planning and for
//! sizes beyond reach of the alternating sum.

use rug::Float;
use statrs::function::gamma::ln_gamma;

use super::bigreal::BigReal;
use super::quadrature::Quadrature;
use super::special::upper_incomplete_gamma;
use super::stable::check_sigma;
use crate::error::{domain, Error, Result};

const MAX_PRECISION: u32 = 1 << 20;

/// Relative agreement demanded between successive precisions.
pub const AGREEMENT: f64 = 1e-12;

fn check(count: usize, k_lo: usize, sigma: f64, beta: f64) -> Result<()> {
    check_sigma(sigma)?;
    if count == 0 || k_lo == 0 {
        return Err(domain("tilted gamma mass needs N ≥ 1 and K ≥ 1"));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(domain(format!("tilting parameter must be positive, got {beta}")));
    }
    Ok(())
}

/// A(count, K) for K = k_lo..=k_hi by the alternating sum at `bits`.
///
/// For each l the incomplete gammas are produced by the downward recurrence
/// Γ(a-1; x) = (Γ(a; x) - x^{a-1} e^{-x}) / (a-1), which is the stable
/// direction; an exact zero order restarts from E₁(β).
pub fn tilted_gamma_sums(
    count: usize,
    k_lo: usize,
    k_hi: usize,
    sigma: f64,
    beta: f64,
    bits: u32,
) -> Result<Vec<BigReal>> {
    check(count, k_lo, sigma, beta)?;
    if k_hi < k_lo {
        return Ok(Vec::new());
    }
    let grid = GammaGrid::new(count, k_lo, k_hi, sigma, beta, bits)?;
    Ok(grid.row(count))
}

/// Γ(K - l/σ; β) for l < counts and K in a range, each scaled by
/// (-1)^l β^{l/σ}; rows A(N, ·) for any N ≤ counts are binomial mixes of it.
struct GammaGrid {
    bits: u32,
    /// terms[l][K - k_lo]
    terms: Vec<Vec<BigReal>>,
}

impl GammaGrid {
    fn new(counts: usize, k_lo: usize, k_hi: usize, sigma: f64, beta: f64, bits: u32) -> Result<Self> {
        let width = k_hi - k_lo + 1;
        let s = BigReal::from_f64(sigma, bits);
        let x = BigReal::from_f64(beta, bits);
        let ln_x = x.ln();
        let e1 = upper_incomplete_gamma(&BigReal::zero_with(bits), &x)?;
        let top = BigReal::from_i64(k_hi as i64, bits);
        let one = BigReal::one_with(bits);
        let mut terms = Vec::with_capacity(counts);
        for l in 0..counts {
            let shift = BigReal::from_i64(l as i64, bits) / &s;
            let coef = (&shift * &ln_x).exp();
            let coef = if l % 2 == 0 { coef } else { -coef };
            let mut a = &top - &shift;
            let mut g = if a.is_zero_value() {
                e1.clone()
            } else {
                upper_incomplete_gamma(&a, &x)?
            };
            // x^{a-1} e^{-x}
            let mut weight = ((&a - &one) * &ln_x - &x).exp();
            let mut column = vec![BigReal::zero_with(bits); width];
            for idx in (0..width).rev() {
                column[idx] = &coef * &g;
                if idx == 0 {
                    break;
                }
                a = &a - &one;
                g = if a.is_zero_value() {
                    e1.clone()
                } else {
                    (&g - &weight) / &a
                };
                weight = &weight / &x;
            }
            terms.push(column);
        }
        Ok(GammaGrid { bits, terms })
    }

    /// A(count, ·) over the K range.
    fn row(&self, count: usize) -> Vec<BigReal> {
        let width = self.terms[0].len();
        let mut acc: Vec<Float> = vec![Float::new(self.bits); width];
        for (l, column) in self.terms[..count].iter().enumerate() {
            let binom = BigReal::binomial((count - 1) as u32, l as u32, self.bits);
            for (slot, t) in acc.iter_mut().zip(column) {
                *slot += (&binom * t).as_float();
            }
        }
        acc.into_iter().map(BigReal::from_float).collect()
    }
}

/// A(N, K) for every N in `counts` and K = k_lo..=k_hi, sharing the
/// incomplete gammas across rows. Precision is planned over all rows and
/// doubled until successive evaluations agree to [`AGREEMENT`].
pub fn tilted_gamma_rows(
    counts: std::ops::RangeInclusive<usize>,
    k_lo: usize,
    k_hi: usize,
    sigma: f64,
    beta: f64,
    min_bits: u32,
) -> Result<Vec<TiltedSums>> {
    let (c_lo, c_hi) = (*counts.start(), *counts.end());
    check(c_lo, k_lo, sigma, beta)?;
    if c_hi < c_lo || k_hi < k_lo {
        return Ok(Vec::new());
    }
    let mut bits = min_bits;
    for c in counts.clone() {
        bits = bits.max(planned_precision(c, k_lo, k_hi, sigma, beta)?);
    }
    let eval = |bits: u32| -> Result<Vec<Vec<BigReal>>> {
        let grid = GammaGrid::new(c_hi, k_lo, k_hi, sigma, beta, bits)?;
        Ok(counts.clone().map(|c| grid.row(c)).collect())
    };
    let mut previous = eval(bits)?;
    while bits < MAX_PRECISION {
        bits *= 2;
        let current = eval(bits)?;
        let agree = previous.iter().flatten().zip(current.iter().flatten()).all(|(p, c)| {
            !c.is_sign_negative() && !c.is_zero_value() && p.relative_diff(c) < AGREEMENT
        });
        if agree {
            return Ok(current
                .into_iter()
                .map(|values| TiltedSums {
                    values,
                    precision_bits: bits,
                })
                .collect());
        }
        previous = current;
    }
    Err(Error::NonConvergence {
        what: "precision doubling for the tilted gamma sum".into(),
        iterations: MAX_PRECISION as usize,
    })
}

/// Precision (bits) expected to resolve A(count, K) for every K in range:
/// the log₂ ratio of the largest summand to the sum, plus 64 guard bits.
pub fn planned_precision(count: usize, k_lo: usize, k_hi: usize, sigma: f64, beta: f64) -> Result<u32> {
    check(count, k_lo, sigma, beta)?;
    let ln_beta = beta.ln();
    let ln_binom = |l: usize| ln_gamma(count as f64) - ln_gamma(l as f64 + 1.0) - ln_gamma((count - l) as f64);
    let mut worst = 0.0_f64;
    for k in [k_lo, k_hi] {
        let kf = k as f64;
        let mut max_term = f64::NEG_INFINITY;
        for l in 0..count {
            let a = kf - l as f64 / sigma;
            // Γ(a; x) ≈ x^a e^{-x} / (x + 1 - a) below the transition, ≤ Γ(a) above it.
            let ln_g = if a <= beta + 1.0 {
                a * ln_beta - beta - (beta + 1.0 - a).max(1.0).ln()
            } else {
                ln_gamma(a)
            };
            max_term = max_term.max(ln_binom(l) + l as f64 / sigma * ln_beta + ln_g);
        }
        let ln_sum = ln_tilt_ratio(count, k, sigma, beta)? + ln_gamma(kf);
        worst = worst.max((max_term - ln_sum) / std::f64::consts::LN_2);
    }
    let bits = worst.clamp(0.0, f64::from(MAX_PRECISION)).ceil() as u32 + 64;
    Ok(bits.div_ceil(64) * 64)
}

/// A(count, K) for K in range, with precision doubled from the larger of
/// `min_bits` and the planned precision until two successive evaluations
/// agree to [`AGREEMENT`] relative.
#[derive(Debug, Clone)]
pub struct TiltedSums {
    pub values: Vec<BigReal>,
    pub precision_bits: u32,
}

pub fn tilted_gamma_sums_adaptive(
    count: usize,
    k_lo: usize,
    k_hi: usize,
    sigma: f64,
    beta: f64,
    min_bits: u32,
) -> Result<TiltedSums> {
    let mut bits = planned_precision(count, k_lo, k_hi, sigma, beta)?.max(min_bits);
    let mut previous = tilted_gamma_sums(count, k_lo, k_hi, sigma, beta, bits)?;
    while bits < MAX_PRECISION {
        bits *= 2;
        let current = tilted_gamma_sums(count, k_lo, k_hi, sigma, beta, bits)?;
        let agree = previous.iter().zip(&current).all(|(p, c)| {
            !c.is_sign_negative() && !c.is_zero_value() && p.relative_diff(c) < AGREEMENT
        });
        if agree {
            return Ok(TiltedSums {
                values: current,
                precision_bits: bits,
            });
        }
        previous = current;
    }
    Err(Error::NonConvergence {
        what: "precision doubling for the tilted gamma sum".into(),
        iterations: MAX_PRECISION as usize,
    })
}

/// A(count, k) with adaptive precision.
pub fn tilted_gamma_sum(count: usize, k: usize, sigma: f64, beta: f64, min_bits: u32) -> Result<BigReal> {
    let mut sums = tilted_gamma_sums_adaptive(count, k, k, sigma, beta, min_bits)?;
    Ok(sums.values.pop().expect("one value requested"))
}

/// ln a(N, K) = ln A(N, K) - ln Γ(K), by quadrature of the integral form
/// around its mode. β = 0 gives 0.
pub fn ln_tilt_ratio(count: usize, k: usize, sigma: f64, beta: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if count == 0 || k == 0 {
        return Err(domain("tilted gamma mass needs N ≥ 1 and K ≥ 1"));
    }
    if beta == 0.0 {
        return Ok(0.0);
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(domain(format!("tilting parameter must be nonnegative, got {beta}")));
    }
    let kk = k as f64 - 1.0;
    let nn = count as f64 - 1.0;
    let inv = 1.0 / sigma;
    let ln_beta = beta.ln();
    let tail = |y: f64| ((ln_beta - y.ln()) * inv).exp();
    let h = |y: f64| {
        let u = tail(y);
        let body = if nn == 0.0 { 0.0 } else { nn * (-u).ln_1p() };
        kk * y.ln() + body - y
    };
    let dh = |y: f64| {
        let u = tail(y);
        kk / y + nn * inv * u / (y * (1.0 - u)) - 1.0
    };

    // Mode: h' decreases from +∞ (or (K-1)/β - 1) at β to -1 at ∞.
    let mode = if dh(beta * (1.0 + 1e-15)) <= 0.0 {
        beta
    } else {
        let mut lo = beta;
        let mut hi = (2.0 * beta).max(kk + nn * inv + 1.0);
        while dh(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if dh(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let peak = h(mode);
    let body_mode = if nn == 0.0 { 0.0 } else { nn * (-tail(mode)).ln_1p() };
    // h(y) - h(mode) without cancelling two large values.
    let excess = |y: f64| {
        let body = if nn == 0.0 { 0.0 } else { nn * (-tail(y)).ln_1p() };
        kk * ((y - mode) / mode).ln_1p() + (body - body_mode) - (y - mode)
    };
    let width = {
        let d = 1e-4 * mode.max(1e-3);
        let curv = if mode - d > beta {
            (dh(mode - d) - dh(mode + d)) / (2.0 * d)
        } else {
            f64::NAN
        };
        if curv.is_finite() && curv > 0.0 {
            (1.0 / curv.sqrt()).min(mode.max(1.0))
        } else {
            mode.max(1.0).sqrt()
        }
    };
    let f = |y: f64| {
        if y <= beta {
            return 0.0;
        }
        let e = excess(y);
        if e < -745.0 {
            0.0
        } else {
            e.exp()
        }
    };
    let q = Quadrature {
        abs_tol: 0.0,
        rel_tol: 1e-14,
        max_segments: 2000,
    };
    let mut total = q.integrate_to_infinity(f, mode, width)?.value;
    if mode > beta {
        let split = (mode - 40.0 * width).max(beta);
        total += q.integrate(f, split, mode)?.value;
        if split > beta {
            total += q.integrate(f, beta, split)?.value;
        }
    }
    if !(total > 0.0) {
        return Err(Error::NonConvergence {
            what: "tilted gamma quadrature".into(),
            iterations: 0,
        });
    }
    Ok(peak + total.ln() - ln_gamma(k as f64))
}

trait ExactZero {
    fn is_zero_value(&self) -> bool;
}

impl ExactZero for BigReal {
    fn is_zero_value(&self) -> bool {
        self.as_float().is_zero()
    }
}
