//! The DDVV inequality in matrix form and in second-fundamental-form form.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{commutator_norm_sq, Configuration, SymmetricMatrix};

/// Both sides of `(Σ‖A_r‖²)² ≥ 2 Σ_{r<s} ‖[A_r, A_s]‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    /// `rhs / lhs`, or 0 when `lhs == 0`.
    pub ratio: f64,
}

impl GapReport {
    fn from_sides(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            gap: lhs - rhs,
            ratio: if lhs > 0.0 { rhs / lhs } else { 0.0 },
        }
    }
}

/// `2 Σ_{r<s} ‖[A_r, A_s]‖²`.
pub fn commutator_sum(c: &Configuration) -> f64 {
    let a = c.matrices();
    let mut s = 0.0;
    for r in 0..a.len() {
        for t in (r + 1)..a.len() {
            s += commutator_norm_sq(&a[r], &a[t]);
        }
    }
    2.0 * s
}

pub fn ddvv_gap(c: &Configuration) -> GapReport {
    let total = c.norm_sq();
    GapReport::from_sides(total * total, commutator_sum(c))
}

/// Coefficients `h^r_ij` of a second fundamental form: one symmetric
/// `n × n` slice per normal direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SffTensor(Configuration);

impl SffTensor {
    pub fn new(slices: Vec<SymmetricMatrix>) -> Result<Self> {
        Configuration::new(slices).map(Self)
    }

    pub fn from_configuration(c: Configuration) -> Self {
        Self(c)
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn m(&self) -> usize {
        self.0.m()
    }

    pub fn slices(&self) -> &[SymmetricMatrix] {
        self.0.matrices()
    }

    pub fn as_configuration(&self) -> &Configuration {
        &self.0
    }

    /// `h^r_ij`.
    pub fn h(&self, r: usize, i: usize, j: usize) -> f64 {
        self.0.get(r).get(i, j)
    }
}

/// Normal-curvature weight `Σ_{r<s} Σ_{i<j} (Σ_k h^r_ik h^s_jk − h^s_ik h^r_jk)²`.
fn normal_curvature_sq(h: &SffTensor) -> f64 {
    let (n, m) = (h.n(), h.m());
    let mut total = 0.0;
    for r in 0..m {
        for s in (r + 1)..m {
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut v = 0.0;
                    for k in 0..n {
                        v += h.h(r, i, k) * h.h(s, j, k) - h.h(s, i, k) * h.h(r, j, k);
                    }
                    total += v * v;
                }
            }
        }
    }
    total
}

/// Left and right sides of the coordinate form of the inequality,
/// written directly in the coefficients `h^r_ij`.
pub fn inequality_1a_sides(h: &SffTensor) -> (f64, f64) {
    let (n, m) = (h.n(), h.m());
    let mut diag_term = 0.0;
    let mut off_term = 0.0;
    for r in 0..m {
        for i in 0..n {
            for j in (i + 1)..n {
                let d = h.h(r, i, i) - h.h(r, j, j);
                diag_term += d * d;
                off_term += h.h(r, i, j) * h.h(r, i, j);
            }
        }
    }
    let nf = n as f64;
    let lhs = diag_term + 2.0 * nf * off_term;
    let rhs = 2.0 * nf * normal_curvature_sq(h).sqrt();
    (lhs, rhs)
}

/// Normalized scalar curvatures of a submanifold of a space form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub rho: f64,
    pub rho_perp: f64,
    /// `|H|²` with `H = (1/n) tr h`.
    pub mean_h_sq: f64,
    pub c: f64,
    /// `|H|² + c − ρ − ρ⊥`; the conjectured inequality says this is ≥ 0.
    pub slack: f64,
}

/// Curvatures from the Gauss equation
/// `R(e_i,e_j,e_j,e_i) = c + Σ_r (h^r_ii h^r_jj − (h^r_ij)²)` and the Ricci
/// equation `⟨R⊥(e_i,e_j)ξ_r, ξ_s⟩ = Σ_k (h^r_ik h^s_kj − h^s_ik h^r_kj)`.
pub fn curvature_check(h: &SffTensor, c: f64) -> Result<CurvatureReport> {
    let (n, m) = (h.n(), h.m());
    if n < 2 {
        return Err(Error::Precondition(
            "normalized scalar curvature needs tangent dimension n >= 2".into(),
        ));
    }
    let norm = 2.0 / (n as f64 * (n as f64 - 1.0));
    let mut sectional = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut k = c;
            for r in 0..m {
                k += h.h(r, i, i) * h.h(r, j, j) - h.h(r, i, j) * h.h(r, i, j);
            }
            sectional += k;
        }
    }
    let rho = norm * sectional;
    let rho_perp = norm * normal_curvature_sq(h).sqrt();
    let mean_h_sq = h
        .slices()
        .iter()
        .map(|a| {
            let t = a.trace() / n as f64;
            t * t
        })
        .sum();
    Ok(CurvatureReport {
        rho,
        rho_perp,
        mean_h_sq,
        c,
        slack: mean_h_sq + c - rho - rho_perp,
    })
}
