use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;

type Row6 = [f64; 6];
type Row9 = [f64; 9];

/// `P` and `ξ` with `‖[x, y]‖² = 2‖P μ + ξ‖²`, where
/// `μ = (x11, x22, x33, y11, y22, y33)`.
fn pair_p_xi(x: &SymmetricMatrix, y: &SymmetricMatrix) -> ([Row6; 3], [f64; 3]) {
    let (x12, x13, x23) = (x.get(0, 1), x.get(0, 2), x.get(1, 2));
    let (y12, y13, y23) = (y.get(0, 1), y.get(0, 2), y.get(1, 2));
    let p = [
        [y12, -y12, 0.0, -x12, x12, 0.0],
        [y13, 0.0, -y13, -x13, 0.0, x13],
        [0.0, y23, -y23, 0.0, -x23, x23],
    ];
    let xi = [
        x13 * y23 - y13 * x23,
        x12 * y23 - y12 * x23,
        x12 * y13 - y12 * x13,
    ];
    (p, xi)
}

fn diag3(x: &SymmetricMatrix) -> [f64; 3] {
    [x.get(0, 0), x.get(1, 1), x.get(2, 2)]
}

fn apply<const K: usize>(p: &[[f64; K]; 3], v: &[f64; K]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (o, row) in out.iter_mut().zip(p) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

fn apply_t<const K: usize>(p: &[[f64; K]; 3], v: &[f64; 3]) -> [f64; K] {
    let mut out = [0.0; K];
    for (row, vi) in p.iter().zip(v) {
        for (o, a) in out.iter_mut().zip(row) {
            *o += a * vi;
        }
    }
    out
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// `(Σq)² − 3 Σ_{i<j} q_i q_j` for `q = (w1, w2, w3)`, as half the sum of
/// squared differences so that it is nonnegative in floating point.
fn spread(w: [f64; 3]) -> f64 {
    0.5 * ((w[0] - w[1]).powi(2) + (w[1] - w[2]).powi(2) + (w[2] - w[0]).powi(2))
}

fn pair_products(w: [f64; 3]) -> f64 {
    w[0] * w[1] + w[1] * w[2] + w[2] * w[0]
}

/// Decomposition of the commutator of two 3×3 symmetric matrices with the
/// off-diagonal entries in polar form
/// `(b23, c23) = r1 (cos α1, sin α1)`, `(b13, c13) = r2 (…α2)`, `(b12, c12) = r3 (…α3)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarPXi {
    pub r: [f64; 3],
    pub alpha: [f64; 3],
    pub p: [Row6; 3],
    pub xi: [f64; 3],
    pub mu: Row6,
    pub sigma0: f64,
    pub m0: f64,
}

impl PolarPXi {
    pub fn p_mu_plus_xi(&self) -> [f64; 3] {
        add3(apply(&self.p, &self.mu), self.xi)
    }

    pub fn pt_xi(&self) -> Row6 {
        apply_t(&self.p, &self.xi)
    }

    pub fn radius_sq_sum(&self) -> f64 {
        norm_sq(&self.r)
    }

    pub fn sin_sum(&self) -> f64 {
        sin_sum(self.alpha)
    }
}

pub fn build_p_xi(b: &SymmetricMatrix, c: &SymmetricMatrix) -> Result<PolarPXi> {
    if b.n() != 3 || c.n() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: if b.n() != 3 { b.n() } else { c.n() },
        });
    }
    let (p, xi) = pair_p_xi(b, c);
    let slots = [(1, 2), (0, 2), (0, 1)];
    let mut r = [0.0; 3];
    let mut alpha = [0.0; 3];
    for (k, &(i, j)) in slots.iter().enumerate() {
        r[k] = b.get(i, j).hypot(c.get(i, j));
        alpha[k] = c.get(i, j).atan2(b.get(i, j));
    }
    let (db, dc) = (diag3(b), diag3(c));
    let sq = [r[0] * r[0], r[1] * r[1], r[2] * r[2]];
    Ok(PolarPXi {
        r,
        alpha,
        p,
        xi,
        mu: [db[0], db[1], db[2], dc[0], dc[1], dc[2]],
        sigma0: pair_products(sq),
        m0: spread(sq),
    })
}

/// `m^{1/4}`, taken as 0 at `m = 0`.
pub(crate) fn fourth_root(m: f64) -> f64 {
    if m > 0.0 {
        m.sqrt().sqrt()
    } else {
        0.0
    }
}

/// Slacks `σ0 − ‖ξ‖²` and `2σ0 − √2 m0^{1/4} ‖Pᵀξ‖`.
pub fn lemma2_check(px: &PolarPXi) -> (f64, f64) {
    let a1 = px.sigma0 - norm_sq(&px.xi);
    let a2 = 2.0 * px.sigma0 - 2f64.sqrt() * fourth_root(px.m0) * norm_sq(&px.pt_xi()).sqrt();
    (a1, a2)
}

/// Decomposition of the three commutators among `B, C, D` in the reduced
/// form with `c12 = d12 = d13 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadPXi {
    pub p: [f64; 3],
    pub sigma1: f64,
    pub m1: f64,
    pub mu: Row9,
    pub p1: [Row9; 3],
    pub p2: [Row9; 3],
    pub p3: [Row9; 3],
    pub xi1: [f64; 3],
    pub xi2: [f64; 3],
    pub xi3: [f64; 3],
}

impl QuadPXi {
    pub fn blocks(&self) -> [(&[Row9; 3], &[f64; 3]); 3] {
        [(&self.p1, &self.xi1), (&self.p2, &self.xi2), (&self.p3, &self.xi3)]
    }

    /// `P_i μ + ξ_i` for `i = 1, 2, 3`.
    pub fn residual_vectors(&self) -> [[f64; 3]; 3] {
        self.blocks().map(|(p, xi)| add3(apply(p, &self.mu), *xi))
    }

    pub fn xi_sq_sum(&self) -> f64 {
        norm_sq(&self.xi1) + norm_sq(&self.xi2) + norm_sq(&self.xi3)
    }

    /// `ξ1ᵀP1 + ξ2ᵀP2 + ξ3ᵀP3`.
    pub fn xi_p_sum(&self) -> Row9 {
        let mut out = [0.0; 9];
        for (p, xi) in self.blocks() {
            for (o, v) in out.iter_mut().zip(apply_t(p, xi)) {
                *o += v;
            }
        }
        out
    }

    /// `Σ ‖P_i x‖²`.
    pub fn p_norm_sq_sum(&self, x: &Row9) -> f64 {
        self.blocks().iter().map(|(p, _)| norm_sq(&apply(p, x))).sum()
    }

    pub fn weight_sq_sum(&self) -> f64 {
        norm_sq(&self.p)
    }
}

/// Places a 3×6 pair block into columns `cols` of a 3×9 block.
fn widen(p: &[Row6; 3], cols: [usize; 6]) -> [Row9; 3] {
    let mut out = [[0.0; 9]; 3];
    for (o, row) in out.iter_mut().zip(p) {
        for (k, &c) in cols.iter().enumerate() {
            o[c] = row[k];
        }
    }
    out
}

pub fn build_quad_p_xi(b: &SymmetricMatrix, c: &SymmetricMatrix, d: &SymmetricMatrix) -> Result<QuadPXi> {
    for x in [b, c, d] {
        if x.n() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, found: x.n() });
        }
    }
    let scale = (b.norm_sq() + c.norm_sq() + d.norm_sq()).sqrt();
    let worst = d.get(0, 2).abs().max(d.get(0, 1).abs()).max(c.get(0, 1).abs());
    if worst > 1e-10 * scale {
        return Err(Error::NotReduced(format!(
            "expected c12 = d12 = d13 = 0 (largest entry {worst:e}); apply the quadruple reduction first"
        )));
    }
    let (p3, xi3) = pair_p_xi(b, c);
    let (p2, xi2) = pair_p_xi(b, d);
    let (p1, xi1) = pair_p_xi(c, d);
    let (db, dc, dd) = (diag3(b), diag3(c), diag3(d));
    let weights = [
        (b.get(1, 2).powi(2) + c.get(1, 2).powi(2) + d.get(1, 2).powi(2)).sqrt(),
        b.get(0, 2).hypot(c.get(0, 2)),
        b.get(0, 1).abs(),
    ];
    let sq = weights.map(|w| w * w);
    Ok(QuadPXi {
        p: weights,
        sigma1: pair_products(sq),
        m1: spread(sq),
        mu: [db[0], db[1], db[2], dc[0], dc[1], dc[2], dd[0], dd[1], dd[2]],
        p1: widen(&p1, [3, 4, 5, 6, 7, 8]),
        p2: widen(&p2, [0, 1, 2, 6, 7, 8]),
        p3: widen(&p3, [0, 1, 2, 3, 4, 5]),
        xi1,
        xi2,
        xi3,
    })
}

/// `(a+b+c)⁴ − 14(a²b² + b²c² + c²a²)` and
/// `σ⁴ − 14 a⁴b⁴c⁴ (a⁴ + b⁴ + c⁴)` with `σ = a²b² + b²c² + c²a²`.
pub fn quartic_oracles(a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(Error::Precondition(format!(
            "quartic oracle needs positive arguments, got ({a}, {b}, {c})"
        )));
    }
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let slack14 = (a + b + c).powi(4) - 14.0 * (a2 * b2 + b2 * c2 + c2 * a2);
    let sigma = a2 * b2 + b2 * c2 + c2 * a2;
    let prod4 = (a2 * b2 * c2).powi(2);
    let slack_pqr = sigma.powi(4) - 14.0 * prod4 * (a2 * a2 + b2 * b2 + c2 * c2);
    Ok((slack14, slack_pqr))
}

pub fn sin_sum(alpha: [f64; 3]) -> f64 {
    (alpha[0] - alpha[1]).sin().powi(2)
        + (alpha[1] - alpha[2]).sin().powi(2)
        + (alpha[2] - alpha[0]).sin().powi(2)
}

/// Maximum of [`sin_sum`] by gradient ascent from a grid of starts, with
/// `α1 = 0` fixed and Newton polishing.
pub fn sin_sum_max() -> f64 {
    let grad = |a: f64, b: f64| {
        // f(0, a, b); d sin²(x)/dx = sin 2x.
        let ga = (2.0 * a).sin() + (2.0 * (a - b)).sin();
        let gb = -(2.0 * (a - b)).sin() + (2.0 * b).sin();
        (ga, gb)
    };
    let hess = |a: f64, b: f64| {
        let haa = 2.0 * (2.0 * a).cos() + 2.0 * (2.0 * (a - b)).cos();
        let hab = -2.0 * (2.0 * (a - b)).cos();
        let hbb = 2.0 * (2.0 * (a - b)).cos() + 2.0 * (2.0 * b).cos();
        (haa, hab, hbb)
    };
    let grid = 12;
    let mut best = f64::NEG_INFINITY;
    for i in 0..grid {
        for j in 0..grid {
            let mut a = std::f64::consts::PI * i as f64 / grid as f64;
            let mut b = std::f64::consts::PI * j as f64 / grid as f64;
            for _ in 0..2000 {
                let (ga, gb) = grad(a, b);
                if ga.hypot(gb) < 1e-13 {
                    break;
                }
                a += 0.1 * ga;
                b += 0.1 * gb;
            }
            for _ in 0..5 {
                let (ga, gb) = grad(a, b);
                let (haa, hab, hbb) = hess(a, b);
                let det = haa * hbb - hab * hab;
                if det <= 0.0 || haa >= 0.0 {
                    break;
                }
                a -= (hbb * ga - hab * gb) / det;
                b -= (haa * gb - hab * ga) / det;
            }
            best = best.max(sin_sum([0.0, a, b]));
        }
    }
    best
}
