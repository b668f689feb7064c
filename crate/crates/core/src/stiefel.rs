//! Riemannian gradient ascent on the Stiefel manifold of orthonormal
//! `k`-frames in `R^d`, with multi-start driver.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::linalg::orthonormal_factor;
use crate::seed::restart_rng;
use crate::Budget;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-16;
/// Riemannian gradient norm below which an ascent counts as converged.
pub const GRADIENT_TOL: f64 = 1e-8;

/// A smooth function of a `d × k` matrix whose columns form the frame.
pub trait FrameObjective: Sync {
    fn dim(&self) -> usize;
    fn k(&self) -> usize;
    fn value(&self, x: &DMatrix<f64>) -> f64;
    /// Euclidean gradient with respect to the entries of `x`.
    fn gradient(&self, x: &DMatrix<f64>) -> DMatrix<f64>;
}

#[derive(Debug, Clone)]
pub struct AscentOutcome {
    pub frame: DMatrix<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct MultiStartOutcome {
    pub best: AscentOutcome,
    pub restarts_used: usize,
    /// Running maximum after each restart.
    pub trace: Vec<f64>,
}

pub fn random_frame<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(d, k, |_, _| rng.sample(StandardNormal));
    orthonormal_factor(g)
}

/// `max |XᵀX − I|`.
pub fn gram_residual(x: &DMatrix<f64>) -> f64 {
    let g = x.transpose() * x;
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let id = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - id).abs());
        }
    }
    worst
}

/// Projection of `g` onto the tangent space at `x`: `g − x sym(xᵀg)`.
pub fn tangent_projection(x: &DMatrix<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    let xtg = x.transpose() * g;
    let sym = (&xtg + xtg.transpose()) * 0.5;
    g - x * sym
}

pub fn ascend<O: FrameObjective + ?Sized>(obj: &O, start: DMatrix<f64>, max_iters: usize) -> AscentOutcome {
    let mut x = start;
    let mut value = obj.value(&x);
    let mut g = tangent_projection(&x, &obj.gradient(&x));
    let mut step = 0.5;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        let g_sq = g.norm_squared();
        if g_sq.sqrt() < GRADIENT_TOL {
            converged = true;
            break;
        }
        iterations += 1;
        let mut accepted = None;
        while step >= MIN_STEP {
            let trial = orthonormal_factor(&x + &g * step);
            let v = obj.value(&trial);
            if v >= value + ARMIJO * step * g_sq {
                accepted = Some((trial, v));
                break;
            }
            step *= 0.5;
        }
        let Some((mut trial, mut v)) = accepted else {
            break;
        };
        // Keep the half step when it does better.
        let half = orthonormal_factor(&x + &g * (0.5 * step));
        let vh = obj.value(&half);
        if vh > v {
            trial = half;
            v = vh;
            step *= 0.5;
        }
        x = trial;
        value = v;
        g = tangent_projection(&x, &obj.gradient(&x));
        step = (step * 2.0).min(1e3);
    }
    AscentOutcome {
        frame: x,
        value,
        iterations,
        converged,
    }
}

/// Runs [`ascend`] from `budget.restarts` random frames in parallel and keeps
/// the best (lowest restart index on ties). With a zero budget a single
/// random frame is evaluated without ascent.
pub fn maximize<O: FrameObjective + ?Sized>(obj: &O, budget: Budget, seed: u64) -> MultiStartOutcome {
    let (d, k) = (obj.dim(), obj.k());
    if budget.restarts == 0 || budget.max_iters == 0 {
        let frame = random_frame(d, k, &mut restart_rng(seed, 0));
        let value = obj.value(&frame);
        return MultiStartOutcome {
            best: AscentOutcome {
                frame,
                value,
                iterations: 0,
                converged: false,
            },
            restarts_used: 1,
            trace: vec![value],
        };
    }
    let runs: Vec<AscentOutcome> = (0..budget.restarts)
        .into_par_iter()
        .map(|i| {
            let start = random_frame(d, k, &mut restart_rng(seed, i));
            ascend(obj, start, budget.max_iters)
        })
        .collect();
    let mut trace = Vec::with_capacity(runs.len());
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
        trace.push(runs[best].value);
    }
    MultiStartOutcome {
        best: runs[best].clone(),
        restarts_used: runs.len(),
        trace,
    }
}
