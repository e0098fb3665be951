//! Forward simulation of the species count along the additional sample.
//!
//! The state after N observations is the number K of distinct species; the
//! next observation is new with probability V_{N+1,K+1} / V_{N,K}. Under PD
//! that probability is (θ + Kσ)/(θ + N). Under NGG it is
//!
//! ```text
//! p(N, K) = w a(N+1, K+1) / a(N, K),   w = σK/N,
//! a(N, K) = w a(N+1, K+1) + (1 - w) a(N+1, K),
//! ```
//!
//! with a(N, K) = A(N, K)/Γ(K) from `numerics::tilted`. The table of p is
//! built backwards in N in ratio form, r(N, K) = a(N, K)/a(N, K+1):
//!
//! ```text
//! D(N, K) = w + (1 - w) r(N+1, K),  p(N, K) = w / D(N, K),
//! r(N, K) = D(N, K) / D(N, K+1) · r(N+1, K+1),
//! ```
//!
//! seeded by quadrature on the last row and on a cap column K_cap. Only
//! checkpoint rows are kept; each block of rows is rebuilt from its
//! checkpoint while replications are advanced through it. Within a block a
//! replication skips ahead geometrically using the column maximum of p and
//! thins candidate events, so the cost scales with the number of new species
//! rather than with m.

use rayon::prelude::*;

use super::rng::RandomState;
use crate::error::Result;
use crate::models::{ModelParams, SampleSummary};
use crate::numerics::ln_tilt_ratio;

const BLOCK_ROWS: usize = 1024;

/// Rows N of the table where a replication first exceeds K_cap fall back to
/// pointwise quadrature.
fn default_cap(sample: &SampleSummary, m: usize, sigma: f64) -> usize {
    let (n, j) = (sample.n() as f64, sample.j() as f64);
    let growth = ((n + m as f64) / n).powf(sigma);
    let cap = sample.j() + (5.0 * j * growth).ceil() as usize + 64;
    cap.min(sample.j() + m)
}

/// Number of failures before the first success of Bernoulli(p) trials.
fn geometric(p: f64, rng: &mut RandomState) -> usize {
    if p >= 1.0 {
        return 0;
    }
    if p <= 0.0 {
        return usize::MAX;
    }
    let g = (rng.uniform().ln() / (-p).ln_1p()).floor();
    if g >= usize::MAX as f64 / 2.0 {
        usize::MAX / 2
    } else {
        g as usize
    }
}

/// Node spacing of the cap column, relative to N.
const CAP_NODES_PER_E: f64 = 512.0;
/// Largest tolerated gap between interpolated and exact ln r(N, K_cap).
const CAP_INTERP_TOL: f64 = 1e-9;

fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut total = 0.0;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut w = yi;
        for (k, &xk) in xs.iter().enumerate() {
            if k != i {
                w *= (x - xk) / (xi - xk);
            }
        }
        total += w;
    }
    total
}

/// r(N, K_cap) for N = n+1 ..= n+m, or 1 where K_cap is unreachable.
///
/// ln r is smooth in N on the scale of N itself, so it is evaluated exactly
/// on nodes spaced ∝ N and filled by cubic interpolation; midpoints of
/// sampled intervals are checked against exact values and any miss falls
/// back to evaluating every row.
fn cap_column(sigma: f64, beta: f64, sample: &SampleSummary, m: usize, cap: usize) -> Result<Vec<f64>> {
    let (n, j) = (sample.n(), sample.j());
    let top = n + m;
    let mut column = vec![1.0; m];
    if cap >= j + m {
        return Ok(column);
    }
    let ln_r = |nn: usize| -> Result<f64> {
        Ok(ln_tilt_ratio(nn, cap, sigma, beta)? - ln_tilt_ratio(nn, cap + 1, sigma, beta)?)
    };
    // K_cap is first reachable at this row
    let first = (n + cap - j).max(n + 1);
    let mut nodes = vec![first];
    while let Some(&last) = nodes.last() {
        if last >= top {
            break;
        }
        let step = ((last as f64 / CAP_NODES_PER_E) as usize).max(1);
        nodes.push((last + step).min(top));
    }
    if nodes.len() * 2 < top - first + 1 {
        let xs: Vec<f64> = nodes.iter().map(|&x| x as f64).collect();
        let ys = nodes.iter().map(|&x| ln_r(x)).collect::<Result<Vec<_>>>()?;
        let window = |nn: usize| {
            let seg = nodes.partition_point(|&x| x <= nn).saturating_sub(1);
            let start = seg.saturating_sub(1).min(nodes.len() - 4);
            start..start + 4
        };
        let interp = |nn: usize| {
            let w = window(nn);
            lagrange(&xs[w.clone()], &ys[w], nn as f64)
        };
        let checks = (1..nodes.len()).step_by(16).filter(|&i| nodes[i] - nodes[i - 1] > 1);
        let mut trusted = true;
        for i in checks {
            let mid = (nodes[i] + nodes[i - 1]) / 2;
            if (interp(mid) - ln_r(mid)?).abs() > CAP_INTERP_TOL {
                trusted = false;
                break;
            }
        }
        if trusted {
            for nn in first..=top {
                column[nn - n - 1] = interp(nn).exp();
            }
            return Ok(column);
        }
    }
    for nn in first..=top {
        column[nn - n - 1] = ln_r(nn)?.exp();
    }
    Ok(column)
}

#[derive(Debug, Clone)]
struct TiltedTable {
    sigma: f64,
    beta: f64,
    n: usize,
    j: usize,
    top: usize,
    cap: usize,
    /// Ratio row r(end_b, ·) for each block b.
    checkpoints: Vec<Vec<f64>>,
    /// r(N, K_cap) for N = n+1 ..= top.
    cap_column: Vec<f64>,
}

impl TiltedTable {
    fn build(sigma: f64, beta: f64, sample: &SampleSummary, m: usize, cap: usize) -> Result<Self> {
        let (n, j) = (sample.n(), sample.j());
        let top = n + m;
        let ln_a = |nn: usize, k: usize| ln_tilt_ratio(nn, k, sigma, beta);
        let cap_column = cap_column(sigma, beta, sample, m, cap)?;
        let mut row = Vec::with_capacity(cap - j + 1);
        let mut upper = ln_a(top, j)?;
        for k in j..=cap {
            let next = ln_a(top, k + 1)?;
            row.push((upper - next).exp());
            upper = next;
        }
        let mut table = TiltedTable {
            sigma,
            beta,
            n,
            j,
            top,
            cap,
            checkpoints: Vec::new(),
            cap_column,
        };
        let blocks = m.div_ceil(BLOCK_ROWS);
        let mut checkpoints = vec![Vec::new(); blocks];
        checkpoints[blocks - 1] = row.clone();
        let mut d = vec![0.0; row.len()];
        let mut scratch = vec![0.0; row.len()];
        for nn in (n + 1..top).rev() {
            table.step(&row, nn, &mut d, &mut scratch, None);
            std::mem::swap(&mut row, &mut scratch);
            if (nn - n) % BLOCK_ROWS == 0 {
                checkpoints[(nn - n) / BLOCK_ROWS - 1] = row.clone();
            }
        }
        table.checkpoints = checkpoints;
        Ok(table)
    }

    /// From r(N+1, ·) produce r(N, ·) into `out` and, if asked, p(N, ·).
    fn step(&self, next: &[f64], nn: usize, d: &mut [f64], out: &mut [f64], p: Option<&mut [f64]>) {
        let inv_n = 1.0 / nn as f64;
        for (idx, (dv, &r)) in d.iter_mut().zip(next).enumerate() {
            let w = self.sigma * (self.j + idx) as f64 * inv_n;
            *dv = w + (1.0 - w) * r;
        }
        if let Some(p) = p {
            for (idx, (pv, &dv)) in p.iter_mut().zip(d.iter()).enumerate() {
                let w = self.sigma * (self.j + idx) as f64 * inv_n;
                *pv = w / dv;
            }
        }
        if nn > self.n {
            let last = out.len() - 1;
            for idx in 0..last {
                out[idx] = d[idx] / d[idx + 1] * next[idx + 1];
            }
            out[last] = self.cap_column[nn - self.n - 1];
        }
    }

    /// p(N, K) by quadrature, for states beyond the cap.
    fn pointwise(&self, nn: usize, k: usize) -> Result<f64> {
        let w = self.sigma * k as f64 / nn as f64;
        let ln_ratio = ln_tilt_ratio(nn + 1, k + 1, self.sigma, self.beta)? - ln_tilt_ratio(nn, k, self.sigma, self.beta)?;
        Ok((w * ln_ratio.exp()).min(1.0))
    }
}

#[derive(Debug, Clone)]
enum Transitions {
    Closed { sigma: f64, theta: f64 },
    Tilted(Box<TiltedTable>),
}

/// Simulator of K_m^(n) for a fixed prior, basic sample and m.
#[derive(Debug, Clone)]
pub struct ChainSimulator {
    sample: SampleSummary,
    m: usize,
    transitions: Transitions,
}

struct Replication {
    k: usize,
    rng: RandomState,
}

impl ChainSimulator {
    pub fn new(params: &ModelParams, sample: &SampleSummary, m: usize) -> Result<Self> {
        let sigma = params.sigma();
        let transitions = match params.closed_form_theta() {
            Some(theta) => Transitions::Closed { sigma, theta },
            None if m == 0 => Transitions::Closed { sigma, theta: 0.0 },
            None => {
                let beta = params.beta().expect("generalized gamma prior");
                let cap = default_cap(sample, m, sigma);
                Transitions::Tilted(Box::new(TiltedTable::build(sigma, beta, sample, m, cap)?))
            }
        };
        Ok(ChainSimulator {
            sample: *sample,
            m,
            transitions,
        })
    }

    /// Number of new species in each of `replications` independent runs;
    /// run `i` uses stream `rng.split(i)`, so output order and values do not
    /// depend on scheduling.
    pub fn run(&self, replications: usize, rng: &RandomState) -> Result<Vec<usize>> {
        let mut reps: Vec<Replication> = (0..replications)
            .map(|i| Replication {
                k: self.sample.j(),
                rng: rng.split(i as u64),
            })
            .collect();
        self.advance(&mut reps)?;
        Ok(reps.into_iter().map(|r| r.k - self.sample.j()).collect())
    }

    /// One run driven directly by `rng`.
    pub fn run_one(&self, rng: &mut RandomState) -> Result<usize> {
        let mut reps = vec![Replication {
            k: self.sample.j(),
            rng: rng.clone(),
        }];
        self.advance(&mut reps)?;
        let rep = reps.pop().expect("one replication");
        *rng = rep.rng;
        Ok(rep.k - self.sample.j())
    }

    fn advance(&self, reps: &mut [Replication]) -> Result<()> {
        let n = self.sample.n();
        let top = n + self.m;
        match &self.transitions {
            Transitions::Closed { sigma, theta } => {
                let p = |nn: usize, k: usize| (theta + sigma * k as f64) / (theta + nn as f64);
                reps.par_iter_mut().for_each(|rep| {
                    // p(N, K) decreases in N, so the current value bounds the rest.
                    let mut row = n;
                    while row < top {
                        let bound = p(row, rep.k);
                        let skip = geometric(bound, &mut rep.rng);
                        if skip >= top - row {
                            break;
                        }
                        row += skip;
                        if rep.rng.uniform() * bound < p(row, rep.k) {
                            rep.k += 1;
                        }
                        row += 1;
                    }
                });
                Ok(())
            }
            Transitions::Tilted(table) => self.advance_tilted(table, reps),
        }
    }

    fn advance_tilted(&self, table: &TiltedTable, reps: &mut [Replication]) -> Result<()> {
        let (n, j) = (table.n, table.j);
        let width = table.cap - j + 1;
        let mut probs = vec![0.0; BLOCK_ROWS * width];
        let mut bound = vec![0.0_f64; width];
        let mut d = vec![0.0; width];
        let mut row_buf = vec![0.0; width];
        let mut scratch = vec![0.0; width];
        for (b, checkpoint) in table.checkpoints.iter().enumerate() {
            let start = n + b * BLOCK_ROWS;
            let end = (start + BLOCK_ROWS).min(table.top);
            row_buf.copy_from_slice(checkpoint);
            bound.iter_mut().for_each(|v| *v = 0.0);
            for nn in (start..end).rev() {
                let offset = (nn - start) * width;
                table.step(&row_buf, nn, &mut d, &mut scratch, Some(&mut probs[offset..offset + width]));
                // Unreachable cells (K - j > N - n) can hold garbage, even infinities.
                let reachable = (nn - n + 1).min(width);
                for (bv, &pv) in bound[..reachable].iter_mut().zip(&probs[offset..offset + reachable]) {
                    *bv = bv.max(pv);
                }
                std::mem::swap(&mut row_buf, &mut scratch);
            }
            let probs = &probs;
            let bound = &bound;
            reps.par_iter_mut().try_for_each(|rep| -> Result<()> {
                let mut row = start;
                while row < end {
                    if rep.k > table.cap {
                        if rep.rng.uniform() < table.pointwise(row, rep.k)? {
                            rep.k += 1;
                        }
                        row += 1;
                        continue;
                    }
                    let col = rep.k - j;
                    let pbar = bound[col];
                    let skip = geometric(pbar, &mut rep.rng);
                    if skip >= end - row {
                        break;
                    }
                    row += skip;
                    if rep.rng.uniform() * pbar < probs[(row - start) * width + col] {
                        rep.k += 1;
                    }
                    row += 1;
                }
                Ok(())
            })?;
        }
        Ok(())
    }

    /// Largest species count covered by the precomputed table (NGG only).
    pub fn table_cap(&self) -> Option<usize> {
        match &self.transitions {
            Transitions::Tilted(t) => Some(t.cap),
            Transitions::Closed { .. } => None,
        }
    }
}

/// Number of new species among m further observations, one run.
pub fn simulate_additional_sample(
    params: &ModelParams,
    sample: &SampleSummary,
    m: usize,
    rng: &mut RandomState,
) -> Result<usize> {
    if m == 0 {
        return Ok(0);
    }
    ChainSimulator::new(params, sample, m)?.run_one(rng)
}
