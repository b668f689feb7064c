//! Multi-start search for the supremum of `rhs / lhs` over configurations.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Configuration, SymmetricMatrix};
use crate::seed::{restart_rng, DEFAULT_SEED};
use crate::Budget;

const ARMIJO: f64 = 1e-4;
const GRAD_TOL: f64 = 1e-10;
const MIN_STEP: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchOptions {
    pub budget: Budget,
    pub seed: u64,
    /// Restrict the search to traceless matrices.
    pub traceless: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            budget: Budget::new(50, 10_000),
            seed: DEFAULT_SEED,
            traceless: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestartRecord {
    pub restart: usize,
    pub iterations: usize,
    pub best_ratio: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub best_ratio: f64,
    /// Normalized to `Σ‖A_r‖² = 1`.
    pub argmax: Configuration,
    pub trace: Vec<RestartRecord>,
}

fn frob_sq(x: &DMatrix<f64>) -> f64 {
    x.norm_squared()
}

fn total_norm_sq(xs: &[DMatrix<f64>]) -> f64 {
    xs.iter().map(frob_sq).sum()
}

/// `2 Σ_{r<s} ‖[A_r, A_s]‖²` and its gradient `4 Σ_{s≠r} [[A_r, A_s], A_s]`.
fn rhs_and_gradient(xs: &[DMatrix<f64>]) -> (f64, Vec<DMatrix<f64>>) {
    let m = xs.len();
    let n = xs[0].nrows();
    let mut value = 0.0;
    let mut grad = vec![DMatrix::zeros(n, n); m];
    for r in 0..m {
        for s in (r + 1)..m {
            let k = &xs[r] * &xs[s] - &xs[s] * &xs[r];
            value += 2.0 * frob_sq(&k);
            let kr = &k * &xs[s] - &xs[s] * &k;
            let ks = &xs[r] * &k - &k * &xs[r];
            grad[r] += 4.0 * kr;
            grad[s] += 4.0 * ks;
        }
    }
    (value, grad)
}

/// Ratio `rhs / lhs` and its Frobenius gradient with respect to each matrix,
/// for an unnormalized configuration.
pub fn ratio_and_gradient(c: &Configuration) -> (f64, Vec<SymmetricMatrix>) {
    let xs: Vec<DMatrix<f64>> = c.matrices().iter().map(|a| a.as_matrix().clone()).collect();
    let norm_sq = total_norm_sq(&xs);
    if norm_sq == 0.0 {
        return (0.0, vec![SymmetricMatrix::zeros(c.n()); c.m()]);
    }
    let (rhs, grad) = rhs_and_gradient(&xs);
    let l2 = norm_sq * norm_sq;
    let ratio = rhs / l2;
    let grad = grad
        .iter()
        .zip(&xs)
        .map(|(g, x)| {
            let full = g / l2 - x * (4.0 * rhs / (l2 * norm_sq));
            SymmetricMatrix::from_upper_triangle(&full).expect("finite square gradient")
        })
        .collect();
    (ratio, grad)
}

fn remove_trace(x: &mut DMatrix<f64>) {
    let n = x.nrows();
    let mean = x.trace() / n as f64;
    for i in 0..n {
        x[(i, i)] -= mean;
    }
}

fn normalize(xs: &mut [DMatrix<f64>]) {
    let s = total_norm_sq(xs).sqrt();
    if s > 0.0 {
        xs.iter_mut().for_each(|x| *x /= s);
    }
}

struct Restart {
    record: RestartRecord,
    argmax: Vec<DMatrix<f64>>,
}

fn run_restart(n: usize, m: usize, opts: &SearchOptions, index: usize) -> Restart {
    let mut rng = restart_rng(opts.seed, index);
    let start = Configuration::random(n, m, opts.traceless, &mut rng);
    let mut xs: Vec<DMatrix<f64>> = start.into_matrices().into_iter().map(|a| a.into_matrix()).collect();
    normalize(&mut xs);

    let tangent = |xs: &[DMatrix<f64>], grad: Vec<DMatrix<f64>>| -> Vec<DMatrix<f64>> {
        let mut g = grad;
        if opts.traceless {
            g.iter_mut().for_each(remove_trace);
        }
        let radial: f64 = g.iter().zip(xs).map(|(a, b)| a.dot(b)).sum();
        g.iter_mut().zip(xs).for_each(|(a, b)| *a -= b * radial);
        g
    };

    let (mut value, grad) = rhs_and_gradient(&xs);
    let mut g = tangent(&xs, grad);
    let mut best = value;
    let mut best_x = xs.clone();
    let mut step = 0.25;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.budget.max_iters {
        let g_sq = total_norm_sq(&g);
        if g_sq.sqrt() < GRAD_TOL {
            converged = true;
            break;
        }
        iterations += 1;
        let mut accepted = None;
        while step >= MIN_STEP {
            let mut trial: Vec<DMatrix<f64>> = xs.iter().zip(&g).map(|(x, d)| x + d * step).collect();
            normalize(&mut trial);
            let (v, grad) = rhs_and_gradient(&trial);
            if v > best {
                best = v;
                best_x.clone_from(&trial);
            }
            if v >= value + ARMIJO * step * g_sq {
                accepted = Some((trial, v, grad));
                break;
            }
            step *= 0.5;
        }
        let Some((mut trial, mut v, mut grad)) = accepted else {
            break;
        };
        // Keep the half step when it does better.
        let mut half: Vec<DMatrix<f64>> = xs.iter().zip(&g).map(|(x, d)| x + d * (0.5 * step)).collect();
        normalize(&mut half);
        let (vh, grad_h) = rhs_and_gradient(&half);
        if vh > best {
            best = vh;
            best_x.clone_from(&half);
        }
        if vh > v {
            (trial, v, grad) = (half, vh, grad_h);
            step *= 0.5;
        }
        xs = trial;
        value = v;
        g = tangent(&xs, grad);
        step = (step * 2.0).min(1e3);
    }
    Restart {
        record: RestartRecord {
            restart: index,
            iterations,
            best_ratio: best,
            converged,
        },
        argmax: best_x,
    }
}

/// Maximizes `2Σ‖[A_r, A_s]‖²` on `Σ‖A_r‖² = 1` by projected gradient ascent
/// with Armijo backtracking, from `budget.restarts` random starts run in
/// parallel. The result does not depend on the number of worker threads.
pub fn ratio_maximize(n: usize, m: usize, opts: &SearchOptions) -> Result<SearchResult> {
    if n < 2 || m < 1 {
        return Err(Error::Precondition(format!(
            "ratio search needs n >= 2 and m >= 1, got n = {n}, m = {m}"
        )));
    }
    let restarts = opts.budget.restarts.max(1);
    let runs: Vec<Restart> = (0..restarts)
        .into_par_iter()
        .map(|i| run_restart(n, m, opts, i))
        .collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.record.best_ratio > runs[best].record.best_ratio {
            best = i;
        }
    }
    let argmax = Configuration::new(
        runs[best]
            .argmax
            .iter()
            .map(|x| SymmetricMatrix::from_upper_triangle(x).expect("finite iterate"))
            .collect(),
    )?;
    Ok(SearchResult {
        best_ratio: runs[best].record.best_ratio,
        argmax,
        trace: runs.into_iter().map(|r| r.record).collect(),
    })
}
