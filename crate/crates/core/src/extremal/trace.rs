//! Step-by-step evaluation of the inequality chains behind the `m = 3` and
//! `m = 4` cases for 3×3 matrices.
//!
//! Inputs are replaced by their traceless parts and scaled to total squared
//! norm 1, so every slack is on a unit scale. Each step of the case analysis
//! is reported with its value; steps that do not apply on the branch taken
//! are marked [`SlackStatus::Vacuous`].

use serde::Serialize;

use super::lemma1::lemma1_extrema;
use super::structure::{build_p_xi, build_quad_p_xi, fourth_root, lemma2_check, sin_sum, QuadPXi};
use crate::ddvv::ddvv_gap;
use crate::error::{Error, Result};
use crate::linalg::{commutator_norm_sq, Configuration, SymmetricMatrix};
use crate::reduction::{diagonalize_first, reduce_lemma3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SlackStatus {
    Active,
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedSlack {
    pub name: &'static str,
    pub value: f64,
    pub status: SlackStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofTrace {
    /// Total squared norm of the traceless input before normalization.
    pub input_norm_sq: f64,
    /// `zero`, `nonnegative_coefficient`, `endpoint` or `window`.
    pub branch: &'static str,
    pub slacks: Vec<NamedSlack>,
}

impl ProofTrace {
    pub fn get(&self, name: &str) -> Option<&NamedSlack> {
        self.slacks.iter().find(|s| s.name == name)
    }

    pub fn terminal(&self) -> f64 {
        self.slacks.last().map_or(0.0, |s| s.value)
    }

    pub fn active(&self) -> impl Iterator<Item = &NamedSlack> {
        self.slacks.iter().filter(|s| s.status == SlackStatus::Active)
    }

    /// Active slacks below `−tol`.
    pub fn violations(&self, tol: f64) -> Vec<&NamedSlack> {
        self.active().filter(|s| s.value < -tol || s.value.is_nan()).collect()
    }
}

struct Recorder(Vec<NamedSlack>);

impl Recorder {
    fn push(&mut self, name: &'static str, value: f64, active: bool) {
        let status = if active {
            SlackStatus::Active
        } else {
            SlackStatus::Vacuous
        };
        self.0.push(NamedSlack { name, value, status });
    }
}

fn prepare(mats: &[&SymmetricMatrix]) -> Result<(Configuration, f64)> {
    for a in mats {
        if a.n() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: a.n() });
        }
    }
    let c = Configuration::new(mats.iter().map(|a| (*a).clone()).collect())?.traceless();
    let total = c.norm_sq();
    let c = if total > 0.0 { c.scaled(1.0 / total.sqrt()) } else { c };
    Ok((c, total))
}

/// Scale `t = ‖A‖` and normalized eigenvalues `η` of the diagonal matrix `a`.
fn scale_and_eta(a: &SymmetricMatrix) -> (f64, [f64; 3]) {
    let t = a.norm_sq().sqrt();
    let eta = if t > 0.0 {
        [a.get(0, 0) / t, a.get(1, 1) / t, a.get(2, 2) / t]
    } else {
        [0.0; 3]
    };
    (t, eta)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The one-variable quadratic `α s² − 2β s + γ` on `[0, √2·m^{1/4}]`,
/// recorded either through its endpoint values or through the window tests.
fn record_quadratic(rec: &mut Recorder, alpha: f64, beta: f64, gamma: f64, m: f64) -> &'static str {
    let q4 = fourth_root(m);
    let s_max = 2f64.sqrt() * q4;
    let quad = |s: f64| alpha * s * s - 2.0 * beta * s + gamma;
    let window = alpha > 0.0 && beta > 0.0 && beta < s_max * alpha;
    rec.push("endpoint_minimum", quad(0.0).min(quad(s_max)), !window);
    rec.push("window_discriminant", alpha * gamma - beta * beta, window);
    rec.push("window_sufficient", gamma - s_max * beta, window);
    if window {
        "window"
    } else {
        "endpoint"
    }
}

/// Chain of inequalities establishing the three-matrix case, evaluated on
/// `(a, b, c)` after diagonalizing `a`.
pub fn proof_trace_p33(a: &SymmetricMatrix, b: &SymmetricMatrix, c: &SymmetricMatrix) -> Result<ProofTrace> {
    let (cfg, input_norm_sq) = prepare(&[a, b, c])?;
    let reduced = diagonalize_first(&cfg)?.after;
    let (a, b, c) = (reduced.get(0), reduced.get(1), reduced.get(2));
    let (t, eta) = scale_and_eta(a);
    let tau = t * t;
    let px = build_p_xi(b, c)?;
    let r_sq = px.r.map(|v| v * v);
    let radius_sq = px.radius_sq_sum();
    let root_m0 = px.m0.sqrt();
    let mut rec = Recorder(Vec::new());

    let f: f64 = (0..3).map(|k| eta[k] * eta[k] * r_sq[k]).sum();
    let l1 = lemma1_extrema(r_sq[0], r_sq[1], r_sq[2])?;
    rec.push("lagrange_lower", f - l1.f_min, t > 0.0);

    let s = b.norm_sq() + c.norm_sq();
    let pair_slack = s * s - 2.0 * commutator_norm_sq(b, c);
    let mu_sq = dot(&px.mu, &px.mu);
    let coef = 2.0 * mu_sq - 4.0 * root_m0;
    rec.push("relaxed_quartic", tau * tau + tau * coef + pair_slack, true);

    let steep = coef < 0.0;
    rec.push("pair_bound", pair_slack, !steep);
    rec.push("completed_square", pair_slack - (2.0 * root_m0 - mu_sq).powi(2), steep);

    let mu_norm = mu_sq.sqrt();
    let x = if mu_norm > 0.0 { px.mu.map(|v| v / mu_norm) } else { [0.0; 6] };
    let px_x: Vec<f64> = px.p.iter().map(|row| dot(row, &x)).collect();
    let alpha = radius_sq + root_m0 - dot(&px_x, &px_x);
    let beta = dot(&px.xi, &px_x);
    let gamma = 3.0 * px.sigma0 - dot(&px.xi, &px.xi);
    rec.push(
        "normalized_quadratic",
        alpha * mu_sq - 2.0 * beta * mu_norm + gamma,
        steep,
    );
    let mut branch = if input_norm_sq == 0.0 { "zero" } else { "nonnegative_coefficient" };
    if steep {
        branch = record_quadratic(&mut rec, alpha, beta, gamma, px.m0);
    } else {
        let mut scratch = Recorder(Vec::new());
        record_quadratic(&mut scratch, alpha, beta, gamma, px.m0);
        rec.0.extend(scratch.0.into_iter().map(|s| NamedSlack { status: SlackStatus::Vacuous, ..s }));
    }

    let (xi_bound, pt_xi_bound) = lemma2_check(&px);
    rec.push("xi_bound", xi_bound, true);
    rec.push("pt_xi_bound", pt_xi_bound, true);
    let prod = px.r[0] * px.r[1] * px.r[2];
    let q4 = fourth_root(px.m0);
    rec.push(
        "product_bound",
        2.0 * px.sigma0 - 1.5 * 3f64.sqrt() * prod * 2f64.sqrt() * q4,
        true,
    );
    rec.push("sin_sum_bound", 2.25 - sin_sum(px.alpha), prod > 0.0);
    record_quartic_powers(&mut rec, r_sq, px.sigma0, px.m0);

    rec.push("gap", ddvv_gap(&reduced).gap, true);
    Ok(ProofTrace {
        input_norm_sq,
        branch,
        slacks: rec.0,
    })
}

/// `σ⁴ ≥ 14 Π⁴ Σw² ≥ 14 Π⁴ m` for squared weights `w`.
fn record_quartic_powers(rec: &mut Recorder, w: [f64; 3], sigma: f64, m: f64) {
    let prod_sq = (w[0] * w[1] * w[2]).powi(2);
    let w_sq: f64 = w.iter().map(|v| v * v).sum();
    rec.push("sigma_quartic", sigma.powi(4) - 14.0 * prod_sq * w_sq, true);
    rec.push("sigma_quartic_m", 14.0 * prod_sq * (w_sq - m), true);
}

fn zero_reduced_entries(c: &Configuration) -> Result<Configuration> {
    let mut mats = c.matrices().to_vec();
    let clear = |a: &SymmetricMatrix, slots: &[(usize, usize)]| {
        let mut m = a.as_matrix().clone();
        for &(i, j) in slots {
            m[(i, j)] = 0.0;
            m[(j, i)] = 0.0;
        }
        SymmetricMatrix::from_matrix(&m, 0.0)
    };
    mats[2] = clear(&mats[2], &[(0, 1)])?;
    mats[3] = clear(&mats[3], &[(0, 1), (0, 2)])?;
    Configuration::new(mats)
}

/// Chain of inequalities establishing the four-matrix case, evaluated on
/// `(a, b, c, d)` after the quadruple reduction.
pub fn proof_trace_p34(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    c: &SymmetricMatrix,
    d: &SymmetricMatrix,
) -> Result<ProofTrace> {
    let (cfg, input_norm_sq) = prepare(&[a, b, c, d])?;
    let reduced = zero_reduced_entries(&reduce_lemma3(&cfg)?.after)?;
    let m = reduced.matrices();
    let (a, b, c, d) = (&m[0], &m[1], &m[2], &m[3]);
    let t = a.norm_sq().sqrt();
    let tau = t * t;
    let q: QuadPXi = build_quad_p_xi(b, c, d)?;
    let w = q.p.map(|v| v * v);
    let weight_sq = q.weight_sq_sum();
    let root_m1 = q.m1.sqrt();
    let mut rec = Recorder(Vec::new());

    let a_unit = if t > 0.0 { a.scaled(1.0 / t) } else { a.clone() };
    let cross: f64 = [b, c, d].iter().map(|x| commutator_norm_sq(&a_unit, x)).sum();
    rec.push("lagrange_upper", 2.0 * (weight_sq + root_m1) - cross, t > 0.0);

    let s = b.norm_sq() + c.norm_sq() + d.norm_sq();
    let comm = commutator_norm_sq(b, c) + commutator_norm_sq(b, d) + commutator_norm_sq(c, d);
    let triple_slack = s * s - 2.0 * comm;
    let mu_sq = dot(&q.mu, &q.mu);
    let coef = 2.0 * mu_sq - 4.0 * root_m1;
    rec.push("relaxed_quartic", tau * tau + tau * coef + triple_slack, true);

    let steep = 2.0 * root_m1 - mu_sq > 0.0;
    rec.push("triple_bound", triple_slack, !steep);
    rec.push(
        "root_bound",
        triple_slack.max(0.0).sqrt() - (2.0 * root_m1 - mu_sq),
        steep,
    );

    let mu_norm = mu_sq.sqrt();
    let x = if mu_norm > 0.0 { q.mu.map(|v| v / mu_norm) } else { [0.0; 9] };
    let xi_p = q.xi_p_sum();
    let alpha = weight_sq + root_m1 - q.p_norm_sq_sum(&x);
    let beta = dot(&xi_p, &x);
    let gamma = 3.0 * q.sigma1 - q.xi_sq_sum();
    rec.push(
        "normalized_quadratic",
        alpha * mu_sq - 2.0 * beta * mu_norm + gamma,
        steep,
    );
    let mut branch = if input_norm_sq == 0.0 { "zero" } else { "nonnegative_coefficient" };
    if steep {
        branch = record_quadratic(&mut rec, alpha, beta, gamma, q.m1);
    } else {
        let mut scratch = Recorder(Vec::new());
        record_quadratic(&mut scratch, alpha, beta, gamma, q.m1);
        rec.0.extend(scratch.0.into_iter().map(|s| NamedSlack { status: SlackStatus::Vacuous, ..s }));
    }

    let prod = q.p[0] * q.p[1] * q.p[2];
    rec.push("xi_sum_bound", q.sigma1 - q.xi_sq_sum(), true);
    rec.push("xi_p_sum_bound", 7f64.sqrt() * prod - dot(&xi_p, &xi_p).sqrt(), true);
    rec.push(
        "product_bound",
        2.0 * q.sigma1 - 14f64.sqrt() * prod * fourth_root(q.m1),
        true,
    );
    record_quartic_powers(&mut rec, w, q.sigma1, q.m1);

    rec.push("gap", ddvv_gap(&reduced).gap, true);
    Ok(ProofTrace {
        input_norm_sq,
        branch,
        slacks: rec.0,
    })
}
