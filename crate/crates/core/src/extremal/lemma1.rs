use serde::Serialize;

use crate::error::{Error, Result};

/// Extrema of `f(λ) = Σ λ_k² p_k` on `{Σλ_k = 0, Σλ_k² = 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma1Result {
    pub p: [f64; 3],
    pub s: f64,
    pub sigma: f64,
    pub f_min: f64,
    pub f_max: f64,
    /// Upper bound for `Σ_{i<j} (λ_i − λ_j)² p_k` with `k ∉ {i, j}`.
    pub bound_2_5: f64,
}

pub fn lemma1_extrema(p1: f64, p2: f64, p3: f64) -> Result<Lemma1Result> {
    let p = [p1, p2, p3];
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    if p.iter().any(|&v| v < 0.0) {
        return Err(Error::Precondition(format!(
            "weights must be nonnegative, got ({p1}, {p2}, {p3})"
        )));
    }
    let s = p1 + p2 + p3;
    let sigma = p1 * p2 + p2 * p3 + p3 * p1;
    // s² − 3σ = ½ Σ (p_i − p_j)², written to stay nonnegative in floating point.
    let disc = 0.5 * ((p1 - p2).powi(2) + (p2 - p3).powi(2) + (p3 - p1).powi(2));
    let root = disc.sqrt();
    Ok(Lemma1Result {
        p,
        s,
        sigma,
        f_min: (s - root) / 3.0,
        f_max: (s + root) / 3.0,
        bound_2_5: s + root,
    })
}

/// Point of the constraint circle `{Σλ = 0, Σλ² = 1}` at angle `theta`.
pub fn circle_point(theta: f64) -> [f64; 3] {
    let u = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
    let w = [1.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt()];
    let (c, s) = (theta.cos(), theta.sin());
    [c * u[0] + s * w[0], c * u[1] + s * w[1], c * u[2] + s * w[2]]
}
