//! Non-central generalized factorial coefficients.
//!
//! 𝒢(n, k; σ, r) is defined by the connection identity between rising
//! factorials
//!
//! ```text
//! (σt + r)_n = Σ_{k=0}^{n} 𝒢(n, k; σ, r) (t)_k
//! ```
//!
//! which yields the triangular recurrence
//! 𝒢(n+1, k) = σ 𝒢(n, k-1) + (r + n - kσ) 𝒢(n, k), 𝒢(0, 0) = 1.

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Rows 0..=max_n of the coefficient triangle for fixed (σ, r).
#[derive(Debug, Clone)]
pub struct GfcTable<T> {
    sigma: T,
    r: T,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> GfcTable<T> {
    pub fn new(max_n: usize, sigma: T, r: T) -> Self {
        let mut rows: Vec<Vec<T>> = Vec::with_capacity(max_n + 1);
        rows.push(vec![T::one()]);
        for n in 0..max_n {
            let prev = &rows[n];
            let mut next = Vec::with_capacity(n + 2);
            for k in 0..=n + 1 {
                let mut v = T::zero();
                if k >= 1 {
                    v = v + sigma.clone() * prev[k - 1].clone();
                }
                if k <= n {
                    let coeff = r.clone() + T::from_usize_exact(n)
                        - T::from_usize_exact(k) * sigma.clone();
                    v = v + coeff * prev[k].clone();
                }
                next.push(v);
            }
            rows.push(next);
        }
        GfcTable { sigma, r, rows }
    }

    pub fn sigma(&self) -> &T {
        &self.sigma
    }

    pub fn r(&self) -> &T {
        &self.r
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// Entry (n, k); zero for k > n.
    pub fn get(&self, n: usize, k: usize) -> Result<T> {
        if n > self.max_n() {
            return Err(Error::Index {
                n,
                k,
                reason: format!("table built to n = {}", self.max_n()),
            });
        }
        Ok(self.rows[n].get(k).cloned().unwrap_or_else(T::zero))
    }

    pub fn row(&self, n: usize) -> &[T] {
        &self.rows[n]
    }
}

/// A single coefficient 𝒢(n, k; σ, r).
pub fn gfc<T: Scalar>(n: usize, k: usize, sigma: T, r: T) -> Result<T> {
    if k > n {
        return Err(Error::Index {
            n,
            k,
            reason: "k must not exceed n".into(),
        });
    }
    GfcTable::new(n, sigma, r).get(n, k)
}

/// Row n of the triangle, keeping only one row in memory.
pub fn gfc_row<T: Scalar>(n: usize, sigma: &T, r: &T) -> Vec<T> {
    let mut row = vec![T::one()];
    for i in 0..n {
        let mut next = Vec::with_capacity(i + 2);
        for k in 0..=i + 1 {
            let mut v = T::zero();
            if k >= 1 {
                v = v + sigma.clone() * row[k - 1].clone();
            }
            if k <= i {
                let coeff =
                    r.clone() + T::from_usize_exact(i) - T::from_usize_exact(k) * sigma.clone();
                v = v + coeff * row[k].clone();
            }
            next.push(v);
        }
        row = next;
    }
    row
}
