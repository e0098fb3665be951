//! Bayesian prediction of the number of new species in an additional sample
//! under normalized generalized gamma and Poisson–Dirichlet priors.

pub mod asymptotics;
pub mod error;
pub mod models;
pub mod numerics;
pub mod posterior;
pub mod samplers;
pub mod stats;

pub use asymptotics::{approximate_posterior, limit_density, posterior_stable_laplace, AsymptoticEstimate};
pub use error::{Error, Result};
pub use models::{predictive_weights, Family, ModelParams, PredictiveWeights, SampleSummary};
pub use numerics::{BigReal, GfcTable};
pub use posterior::{exact_pmf, hpd_interval, HpdInterval, PosteriorPmf};
pub use samplers::{ChainSimulator, RandomState};

pub type GfcTableF32 = GfcTable<f32>;
pub type GfcTableF64 = GfcTable<f64>;
pub type GfcTableBig = GfcTable<BigReal>;
pub type GfcTableExact = GfcTable<num_rational::BigRational>;
