//! Scalar abstractions shared by the exact formulas.
//!
//! [`Scalar`] is the field-like surface needed by purely algebraic routines
//! (rising factorials, generalized factorial coefficients); it is satisfied by
//! `f32`, `f64`, [`BigReal`] and exact rationals. [`RealScalar`] adds the
//! transcendental functions needed by the incomplete gamma function.

use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{FromPrimitive, Num};

use super::bigreal::BigReal;

pub trait Scalar: Num + FromPrimitive + Clone + PartialOrd + Neg<Output = Self> + Debug {
    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable in scalar type")
    }
}

impl<T> Scalar for T where T: Num + FromPrimitive + Clone + PartialOrd + Neg<Output = T> + Debug {}

pub trait RealScalar: Scalar {
    /// `x` at the precision carried by `self`.
    fn lift(&self, x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Significand bits carried by this value.
    fn precision_bits(&self) -> u32;
    /// Same value, carried at `extra` more bits (no-op for hardware floats).
    fn widen(&self, extra: u32) -> Self;
    /// Round to the precision of `like`.
    fn narrow_to(&self, like: &Self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn powf(&self, e: &Self) -> Self;
    fn gamma(&self) -> Self;
    fn euler_gamma(&self) -> Self;
    fn abs(&self) -> Self;

    /// 2^-precision at the precision of `self`.
    fn epsilon(&self) -> Self {
        self.lift(2f64.powi(-(self.precision_bits() as i32)))
    }
}

macro_rules! impl_real_float {
    ($t:ty, $bits:expr) => {
        impl RealScalar for $t {
            fn lift(&self, x: f64) -> Self {
                x as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn precision_bits(&self) -> u32 {
                $bits
            }
            fn widen(&self, _extra: u32) -> Self {
                *self
            }
            fn narrow_to(&self, _like: &Self) -> Self {
                *self
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn powf(&self, e: &Self) -> Self {
                <$t>::powf(*self, *e)
            }
            fn gamma(&self) -> Self {
                statrs::function::gamma::gamma(*self as f64) as $t
            }
            fn euler_gamma(&self) -> Self {
                0.577_215_664_901_532_9_f64 as $t
            }
            fn abs(&self) -> Self {
                <$t>::abs(*self)
            }
        }
    };
}

impl_real_float!(f64, 53);
impl_real_float!(f32, 24);

impl RealScalar for BigReal {
    fn lift(&self, x: f64) -> Self {
        BigReal::from_f64(x, self.precision_bits())
    }
    fn to_f64(&self) -> f64 {
        BigReal::to_f64(self)
    }
    fn precision_bits(&self) -> u32 {
        BigReal::precision_bits(self)
    }
    fn widen(&self, extra: u32) -> Self {
        self.with_precision(self.precision_bits() + extra)
    }
    fn narrow_to(&self, like: &Self) -> Self {
        self.with_precision(like.precision_bits())
    }
    fn exp(&self) -> Self {
        BigReal::exp(self)
    }
    fn ln(&self) -> Self {
        BigReal::ln(self)
    }
    fn powf(&self, e: &Self) -> Self {
        BigReal::powf(self, e)
    }
    fn gamma(&self) -> Self {
        BigReal::gamma(self)
    }
    fn euler_gamma(&self) -> Self {
        BigReal::euler_gamma(self.precision_bits())
    }
    fn abs(&self) -> Self {
        BigReal::abs(self)
    }
    fn epsilon(&self) -> Self {
        // 2^-bits underflows f64 beyond ~1074 bits.
        let bits = self.precision_bits();
        BigReal::from_float(rug::Float::with_val(bits, 1) >> bits)
    }
}
