//! End-to-end checks, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines reach stdout; exits non-zero if any check fails.

use std::process::ExitCode;
use std::time::Instant;

use species_core::asymptotics::{
    approximate_posterior, limit_density_half, limit_density_quadrature, limit_draws, posterior_stable_laplace,
};
use species_core::models::gibbs_row;
use species_core::posterior::{dp_oracle_pmf, exact_pmf, exact_pmf_with_precision, posterior_mean};
use species_core::samplers::{sample_limit_ngg_counted, ChainSimulator, LimitLaw, RandomState};
use species_core::stats::{empirical_pmf, ks_two_sample, total_variation};
use species_core::{ModelParams, Result, SampleSummary};

struct Outcome {
    pass: bool,
    detail: String,
}

fn grid() -> Vec<(f64, f64, usize, usize)> {
    let mut cells = Vec::new();
    for &sigma in &[0.25, 0.5, 0.75] {
        for &beta in &[0.5, 1.0, 5.0] {
            for &n in &[1, 5, 10] {
                for j in 1..=n {
                    cells.push((sigma, beta, n, j));
                }
            }
        }
    }
    cells
}

fn normalization() -> Result<Outcome> {
    let mut worst = 0.0_f64;
    let mut count = 0;
    for (sigma, beta, n, j) in grid() {
        let params = ModelParams::ngg(sigma, beta)?;
        let sample = SampleSummary::new(n, j)?;
        for &m in &[1, 10, 50, 200] {
            let pmf = exact_pmf_with_precision(&params, &sample, m, 256)?;
            worst = worst.max((pmf.total() - 1.0).abs());
            count += 1;
        }
    }
    Ok(Outcome {
        pass: worst < 1e-9,
        detail: format!("{count} PMFs, max |Σp - 1| = {worst:.2e} (< 1e-9)"),
    })
}

fn dp_oracle_agreement() -> Result<Outcome> {
    let mut worst = 0.0_f64;
    let mut count = 0;
    for (sigma, beta, n, j) in grid() {
        let params = ModelParams::ngg(sigma, beta)?;
        let sample = SampleSummary::new(n, j)?;
        for &m in &[1, 10, 50] {
            let a = exact_pmf(&params, &sample, m)?;
            let b = dp_oracle_pmf(&params, &sample, m)?;
            for (x, y) in a.probs().iter().zip(b.probs()) {
                worst = worst.max((x - y).abs());
            }
            count += 1;
        }
    }
    Ok(Outcome {
        pass: worst < 1e-10,
        detail: format!("{count} PMF pairs, max entrywise gap = {worst:.2e} (< 1e-10)"),
    })
}

fn gibbs_recursion() -> Result<Outcome> {
    let mut models = Vec::new();
    for &sigma in &[0.25, 0.5, 0.75] {
        for &beta in &[0.5, 1.0, 5.0] {
            models.push(ModelParams::ngg(sigma, beta)?);
        }
        for &theta in &[-0.5 * sigma, 0.0, 1.0, 10.0] {
            models.push(ModelParams::pd(sigma, theta)?);
        }
    }
    let mut worst = 0.0_f64;
    for params in &models {
        let sigma = params.sigma();
        for n in 1..=30 {
            let row = gibbs_row(params, n)?;
            let next = gibbs_row(params, n + 1)?;
            for k in 1..=n {
                let v = &row[k - 1];
                let scale = n as f64 - k as f64 * sigma;
                let bits = v.precision_bits();
                let rhs = &next[k] + &next[k - 1] * species_core::BigReal::from_f64(scale, bits);
                worst = worst.max(v.relative_diff(&rhs));
            }
        }
    }
    Ok(Outcome {
        pass: worst < 1e-10,
        detail: format!("{} models, n ≤ 30, max relative residual = {worst:.2e} (< 1e-10)", models.len()),
    })
}

fn boundary_coincidence() -> Result<Outcome> {
    let sample = SampleSummary::new(5, 3)?;
    let mut worst = 0.0_f64;
    for &sigma in &[0.25, 0.5, 0.75] {
        let ngg = exact_pmf(&ModelParams::ngg(sigma, 1e-8)?, &sample, 20)?;
        let pd = exact_pmf(&ModelParams::pd(sigma, 0.0)?, &sample, 20)?;
        for (x, y) in ngg.probs().iter().zip(pd.probs()) {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(Outcome {
        pass: worst < 1e-5,
        detail: format!("β = 1e-8 vs θ = 0, max gap = {worst:.2e} (< 1e-5)"),
    })
}

fn chain_matches_exact() -> Result<Outcome> {
    let params = ModelParams::ngg(0.5, 2.0)?;
    let sample = SampleSummary::new(5, 3)?;
    let m = 30;
    let exact = exact_pmf(&params, &sample, m)?;
    let ks = ChainSimulator::new(&params, &sample, m)?.run(100_000, &RandomState::new(20_240_501))?;
    let tv = total_variation(&empirical_pmf(&ks, m), exact.probs());
    Ok(Outcome {
        pass: tv < 0.01,
        detail: format!("10^5 replications, TV = {tv:.4} (< 0.01)"),
    })
}

fn limit_in_distribution() -> Result<Outcome> {
    let params = ModelParams::ngg(0.5, 1.0)?;
    let sample = SampleSummary::new(10, 5)?;
    let m = 100_000;
    let reps = 10_000;
    let scale = (m as f64).powf(params.sigma());
    let ks = ChainSimulator::new(&params, &sample, m)?.run(reps, &RandomState::new(11))?;
    let mut scaled: Vec<f64> = ks.iter().map(|&k| k as f64 / scale).collect();
    let mut limit = limit_draws(&params, &sample, reps, &RandomState::new(12))?;
    let d = ks_two_sample(&mut scaled, &mut limit);
    Ok(Outcome {
        pass: d < 0.05,
        detail: format!("m = 10^5, 10^4 vs 10^4 draws, KS = {d:.4} (< 0.05)"),
    })
}

fn acceptance_rate() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for &(n, j, beta) in &[(1, 1, 1.0), (5, 3, 1.0), (10, 5, 2.0)] {
        let law = LimitLaw::new(ModelParams::ngg(0.5, beta)?, SampleSummary::new(n, j)?)?;
        let target = law.norm_const().to_f64();
        let mut rng = RandomState::new(7);
        let draws = 200_000;
        let mut proposals = 0u64;
        for _ in 0..draws {
            proposals += sample_limit_ngg_counted(&law, &mut rng)?.proposals;
        }
        let rate = draws as f64 / proposals as f64;
        let se = (target * (1.0 - target) / proposals as f64).sqrt();
        let z = (rate - target) / se;
        pass &= z.abs() < 3.0;
        parts.push(format!("(n={n},j={j},β={beta}) rate {rate:.5} vs {target:.5}, z = {z:+.2}"));
    }
    Ok(Outcome {
        pass,
        detail: format!("{} (|z| < 3)", parts.join("; ")),
    })
}

fn laplace_identity() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for &(n, j, sigma, beta) in &[(5, 3, 0.5, 1.0), (10, 5, 0.5, 2.0)] {
        let sample = SampleSummary::new(n, j)?;
        let lambda = f64::powf(beta, 1.0 / sigma);
        let stable = ModelParams::ngg(sigma, 0.0)?;
        let draws = limit_draws(&stable, &sample, 1_000_000, &RandomState::new(31))?;
        let mc = draws.iter().map(|s| (-lambda * s.powf(-1.0 / sigma)).exp()).sum::<f64>() / draws.len() as f64;
        let quad = posterior_stable_laplace(&sample, sigma, lambda)?;
        let rel = (mc / quad - 1.0).abs();
        pass &= rel < 0.005;
        parts.push(format!("({n},{j},{sigma},{beta}) MC {mc:.5} vs {quad:.5}, rel {rel:.1e}"));
    }
    Ok(Outcome {
        pass,
        detail: format!("{} (< 0.5%)", parts.join("; ")),
    })
}

fn half_closed_form() -> Result<Outcome> {
    let params = ModelParams::ngg(0.5, 1.0)?;
    let sample = SampleSummary::new(5, 3)?;
    let mut worst = 0.0_f64;
    for i in 1..=100 {
        let z = 0.06 * i as f64;
        let a = limit_density_half(z, &params, &sample)?;
        let b = limit_density_quadrature(z, &params, &sample)?;
        worst = worst.max((a - b).abs());
    }
    Ok(Outcome {
        pass: worst < 1e-6,
        detail: format!("100 points on (0, 6], sup gap = {worst:.2e} (< 1e-6)"),
    })
}

fn asymptotic_trend() -> Result<Outcome> {
    let params = ModelParams::ngg(0.5, 1.0)?;
    let sample = SampleSummary::new(10, 5)?;
    let rng = RandomState::new(99);
    let mut gaps = Vec::new();
    for &m in &[100, 1000, 10_000] {
        let exact = posterior_mean(&exact_pmf(&params, &sample, m)?);
        let approx = approximate_posterior(&params, &sample, m, 0.05, 1_000_000, &rng)?;
        gaps.push((m, (exact / approx.point - 1.0).abs(), approx.mc_stderr / approx.point));
    }
    let pass = gaps.windows(2).all(|w| w[1].1 < w[0].1);
    let detail = gaps
        .iter()
        .map(|(m, g, se)| format!("m={m}: {g:.2e} (MC rel se {se:.1e})"))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(Outcome {
        pass,
        detail: format!("{detail} (strictly decreasing)"),
    })
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Result<Outcome>); 10] = [
        ("normalization of the exact PMF", normalization),
        ("exact PMF vs forward-recursion oracle", dp_oracle_agreement),
        ("Gibbs weight recursion", gibbs_recursion),
        ("NGG β→0 vs PD θ=0", boundary_coincidence),
        ("chain simulation vs exact PMF", chain_matches_exact),
        ("K_m/m^σ vs limit draws", limit_in_distribution),
        ("limit rejection rate vs normalizer", acceptance_rate),
        ("Laplace transform of the stable posterior", laplace_identity),
        ("σ = 1/2 finite sum vs mixture quadrature", half_closed_form),
        ("asymptotic point estimate trend", asymptotic_trend),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        println!(
            "{} [{id:>2}] {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
