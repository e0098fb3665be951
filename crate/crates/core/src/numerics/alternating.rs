//! Correctly rounded summation of signed terms given in log-magnitude form.

use rug::Float;

use super::bigreal::BigReal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn alternating(l: usize) -> Sign {
        if l.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// ± exp(ln_magnitude).
#[derive(Debug, Clone)]
pub struct SignedTerm {
    pub sign: Sign,
    pub ln_magnitude: BigReal,
}

impl SignedTerm {
    pub fn new(sign: Sign, ln_magnitude: BigReal) -> Self {
        SignedTerm { sign, ln_magnitude }
    }
}

/// Σ ±exp(ln|t|), each term rounded to `precision` bits and the sum rounded
/// once (MPFR's correctly rounded sum), so exact cancellation yields exactly 0.
pub fn signed_alternating_sum(terms: &[SignedTerm], precision: u32) -> BigReal {
    let bits = precision.max(super::bigreal::MIN_PRECISION);
    let values: Vec<Float> = terms
        .iter()
        .map(|t| {
            let ln = t.ln_magnitude.with_precision(bits);
            let v = ln.exp().into_float();
            match t.sign {
                Sign::Plus => v,
                Sign::Minus => -v,
            }
        })
        .collect();
    BigReal::from_float(Float::with_val(bits, Float::sum(values.iter())))
}

/// Correctly rounded sum of already-evaluated terms.
pub fn exact_sum(values: &[BigReal], precision: u32) -> BigReal {
    let bits = precision.max(super::bigreal::MIN_PRECISION);
    BigReal::from_float(Float::with_val(
        bits,
        Float::sum(values.iter().map(BigReal::as_float)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn ln(x: f64) -> BigReal {
        BigReal::from_f64(x, 256).ln()
    }

    #[test]
    fn cancelling_pair_is_exactly_zero() {
        let terms = [SignedTerm::new(Sign::Plus, ln(1.0)), SignedTerm::new(Sign::Minus, ln(1.0))];
        assert!(signed_alternating_sum(&terms, 256).is_zero());
    }

    #[test]
    fn single_term() {
        let s = signed_alternating_sum(&[SignedTerm::new(Sign::Plus, ln(2.0))], 256);
        assert!(s.relative_diff(&BigReal::from_f64(2.0, 256)) < 1e-70);
    }

    #[test]
    fn huge_cancellation() {
        // 2^300 + 1 - 2^300 = 1 needs the exact sum, not 300-bit accumulation order luck.
        let big = BigReal::from_f64(2.0, 512).powi(300);
        let one = BigReal::from_f64(1.0, 512);
        let s = exact_sum(&[big.clone(), one, -big], 128);
        assert_eq!(s.to_f64(), 1.0);
    }
}
