//! Exact random variate generation and chain simulation.

pub mod chain;
pub mod limit;
pub mod rng;
pub mod stable;

pub use chain::{simulate_additional_sample, ChainSimulator};
pub use limit::{
    sample_limit, sample_limit_ngg, sample_limit_ngg_counted, sample_limit_pd, LimitLaw, MixtureShape,
};
pub use rng::RandomState;
pub use stable::{
    mittag_leffler_mean, sample_exp_tilted_stable, sample_exp_tilted_stable_counted, sample_mittag_leffler,
    sample_poly_tilted_stable, sample_positive_stable, PolyTiltedReference, TiltedDraw,
};
