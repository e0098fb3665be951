//! Arbitrary-precision real scalar backed by MPFR.
//!
//! Binary operations round to nearest at the larger of the two operand
//! precisions, so constants built at the minimum precision (small integers,
//! `0`, `1`) combine losslessly with working-precision values.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{FromPrimitive, Num, One, Zero};
use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Float, Integer};

/// Smallest precision a [`BigReal`] is ever created with.
pub const MIN_PRECISION: u32 = 64;

/// Working precision used when callers do not ask for one.
pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Clone)]
pub struct BigReal(Float);

fn clamp_prec(bits: u32) -> u32 {
    bits.max(MIN_PRECISION)
}

impl BigReal {
    pub fn from_f64(x: f64, bits: u32) -> Self {
        BigReal(Float::with_val(clamp_prec(bits), x))
    }

    pub fn from_float(x: Float) -> Self {
        if x.prec() < MIN_PRECISION {
            BigReal(Float::with_val(MIN_PRECISION, x))
        } else {
            BigReal(x)
        }
    }

    pub fn from_integer(x: &Integer, bits: u32) -> Self {
        BigReal(Float::with_val(clamp_prec(bits), x))
    }

    pub fn from_i64(x: i64, bits: u32) -> Self {
        BigReal(Float::with_val(clamp_prec(bits), x))
    }

    pub fn zero_with(bits: u32) -> Self {
        BigReal(Float::new(clamp_prec(bits)))
    }

    pub fn one_with(bits: u32) -> Self {
        BigReal(Float::with_val(clamp_prec(bits), 1))
    }

    pub fn pi(bits: u32) -> Self {
        BigReal(Float::with_val(clamp_prec(bits), Constant::Pi))
    }

    pub fn euler_gamma(bits: u32) -> Self {
        BigReal(Float::with_val(clamp_prec(bits), Constant::Euler))
    }

    /// Binomial coefficient C(n, k), exact before rounding to `bits`.
    pub fn binomial(n: u32, k: u32, bits: u32) -> Self {
        let c = Integer::from(Integer::binomial_u(n, k));
        Self::from_integer(&c, bits)
    }

    pub fn precision_bits(&self) -> u32 {
        self.0.prec()
    }

    /// Re-round to a new precision.
    pub fn with_precision(&self, bits: u32) -> Self {
        BigReal(Float::with_val(clamp_prec(bits), &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative()
    }

    pub fn abs(&self) -> Self {
        BigReal(self.0.clone().abs())
    }

    pub fn exp(&self) -> Self {
        BigReal(self.0.clone().exp())
    }

    pub fn ln(&self) -> Self {
        BigReal(self.0.clone().ln())
    }

    pub fn sqrt(&self) -> Self {
        BigReal(self.0.clone().sqrt())
    }

    pub fn gamma(&self) -> Self {
        BigReal(self.0.clone().gamma())
    }

    pub fn ln_gamma(&self) -> Self {
        BigReal(self.0.clone().ln_gamma())
    }

    pub fn erfc(&self) -> Self {
        BigReal(self.0.clone().erfc())
    }

    pub fn powf(&self, e: &BigReal) -> Self {
        let prec = self.precision_bits().max(e.precision_bits());
        BigReal(Float::with_val(prec, (&self.0).pow(&e.0)))
    }

    pub fn powi(&self, e: i32) -> Self {
        BigReal(Float::with_val(self.precision_bits(), (&self.0).pow(e)))
    }

    /// Relative difference |a - b| / max(|a|, |b|); zero when both are zero.
    pub fn relative_diff(&self, other: &BigReal) -> f64 {
        let scale = if self.0.clone().abs() > other.0.clone().abs() {
            self.abs()
        } else {
            other.abs()
        };
        if scale.0.is_zero() {
            return 0.0;
        }
        ((self - other).abs() / scale).to_f64()
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({:e}, {} bits)", self.0.to_f64(), self.0.prec())
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! bin_op {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let prec = self.0.prec().max(rhs.0.prec());
                BigReal(Float::with_val_round(prec, &self.0 $op &rhs.0, Round::Nearest).0)
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }
        impl $tr<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                self.$method(&rhs)
            }
        }
    };
}

bin_op!(Add, add, +);
bin_op!(Sub, sub, -);
bin_op!(Mul, mul, *);
bin_op!(Div, div, /);
bin_op!(Rem, rem, %);

impl AddAssign<&BigReal> for BigReal {
    fn add_assign(&mut self, rhs: &BigReal) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&BigReal> for BigReal {
    fn sub_assign(&mut self, rhs: &BigReal) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&BigReal> for BigReal {
    fn mul_assign(&mut self, rhs: &BigReal) {
        *self = &*self * rhs;
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0.clone())
    }
}

impl Zero for BigReal {
    fn zero() -> Self {
        BigReal::zero_with(MIN_PRECISION)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for BigReal {
    fn one() -> Self {
        BigReal::one_with(MIN_PRECISION)
    }
}

impl Num for BigReal {
    type FromStrRadixErr = String;

    fn from_str_radix(s: &str, radix: u32) -> std::result::Result<Self, String> {
        let radix = i32::try_from(radix).map_err(|e| e.to_string())?;
        Float::parse_radix(s, radix)
            .map(|p| BigReal(Float::with_val(DEFAULT_PRECISION, p)))
            .map_err(|e| e.to_string())
    }
}

impl FromPrimitive for BigReal {
    fn from_i64(n: i64) -> Option<Self> {
        Some(BigReal::from_i64(n, MIN_PRECISION))
    }
    fn from_u64(n: u64) -> Option<Self> {
        Some(BigReal(Float::with_val(MIN_PRECISION, n)))
    }
    fn from_f64(n: f64) -> Option<Self> {
        n.is_finite().then(|| BigReal::from_f64(n, MIN_PRECISION))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_is_clamped_and_promoted() {
        let a = BigReal::from_f64(0.1, 16);
        assert_eq!(a.precision_bits(), MIN_PRECISION);
        let b = BigReal::from_f64(3.0, 512);
        assert_eq!((&a * &b).precision_bits(), 512);
        assert_eq!((BigReal::one() + &b).precision_bits(), 512);
    }

    #[test]
    fn binomial_is_exact_before_rounding() {
        let c = BigReal::binomial(100, 50, 256);
        let expected = Integer::from_str_radix("100891344545564193334812497256", 10).unwrap();
        assert_eq!(c, BigReal::from_integer(&expected, 256));
    }

    #[test]
    fn exact_cancellation() {
        let x = BigReal::from_f64(1.0, 256).exp();
        let diff = &x - &x;
        assert!(diff.is_zero());
    }
}
