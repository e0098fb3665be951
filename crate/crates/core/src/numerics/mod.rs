//! Special functions, coefficients and summation machinery.

pub mod alternating;
pub mod bigreal;
pub mod gfc;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod stable;
pub mod tilted;

pub use alternating::{exact_sum, signed_alternating_sum, Sign, SignedTerm};
pub use bigreal::{BigReal, DEFAULT_PRECISION, MIN_PRECISION};
pub use gfc::{gfc, gfc_row, GfcTable};
pub use quadrature::{Estimate, Quadrature};
pub use scalar::{RealScalar, Scalar};
pub use special::{ln_rising_factorial, rising_factorial, upper_incomplete_gamma, upper_incomplete_gamma_big};
pub use stable::{stable_cdf, stable_density, stable_density_quadrature, zolotarev};
pub use tilted::{ln_tilt_ratio, tilted_gamma_rows, tilted_gamma_sum, tilted_gamma_sums, tilted_gamma_sums_adaptive, TiltedSums};
