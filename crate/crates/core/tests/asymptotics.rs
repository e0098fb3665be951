use species_core::asymptotics::limit_expectation;
use species_core::{
    approximate_posterior, exact_pmf, posterior_stable_laplace, Error, ModelParams, RandomState, SampleSummary,
};

fn ngg_half() -> ModelParams {
    ModelParams::ngg(0.5, 1.0).unwrap()
}

#[test]
fn single_step_point_is_limit_mean() {
    let sample = SampleSummary::new(1, 1).unwrap();
    let mean = limit_expectation(&ngg_half(), &sample, |z| z).unwrap();
    let est = approximate_posterior(&ngg_half(), &sample, 1, 0.05, 200_000, &RandomState::new(17)).unwrap();
    let z = (est.point - mean) / est.mc_stderr;
    assert!(z.abs() < 4.0, "point {} vs E[Z] = {mean} (z = {z:.2})", est.point);
}

#[test]
fn interval_covers_exact_mass() {
    let sample = SampleSummary::new(10, 5).unwrap();
    let m = 500;
    let pmf = exact_pmf(&ngg_half(), &sample, m).unwrap();
    let est = approximate_posterior(&ngg_half(), &sample, m, 0.05, 100_000, &RandomState::new(3)).unwrap();
    let (lo, hi) = est.interval;
    let covered: f64 = pmf
        .probs()
        .iter()
        .enumerate()
        .filter(|&(k, _)| lo <= k as f64 && k as f64 <= hi)
        .map(|(_, p)| p)
        .sum();
    assert!(covered >= 0.9, "[{lo:.1}, {hi:.1}] holds {covered:.4}");
}

#[test]
fn too_few_draws_is_rejected() {
    let sample = SampleSummary::new(3, 2).unwrap();
    let err = approximate_posterior(&ngg_half(), &sample, 10, 0.05, 999, &RandomState::new(1)).unwrap_err();
    assert!(matches!(err, Error::Domain(_)), "{err}");
}

#[test]
fn stable_laplace_two_observations() {
    // e^{-1} - Γ(-1; 1)
    let sample = SampleSummary::new(2, 1).unwrap();
    let v = posterior_stable_laplace(&sample, 0.5, 1.0).unwrap();
    assert!((v - 0.219_383_934_395_520_3).abs() < 1e-10, "{v}");
}
