//! Canonical forms under `G = O(n) × O(m)` and classification of the
//! configurations where the DDVV inequality is an equality.
//!
//! Every reduction returns a [`ReductionCertificate`] carrying the group
//! element it applied, so the result can be re-checked independently with
//! [`act`].

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::ddvv::{ddvv_gap, SffTensor};
use crate::error::{Error, Result};
use crate::linalg::{
    act, commutator_norm_sq, max_offdiag_abs, orthogonal_with_row, spectral_decompose,
    traceless_part, Configuration, GroupElement, OrthogonalMatrix, SymmetricMatrix,
};

/// Relative tolerance for structural predicates on a reduced configuration.
pub const PREDICATE_TOL: f64 = 1e-10;
/// `gap ≤ EQUALITY_TOL · lhs` declares an equality configuration.
pub const EQUALITY_TOL: f64 = 1e-9;
/// Relative residual budget for fitting the canonical equality pair.
pub const CANONICAL_RESIDUAL_TOL: f64 = 1e-6;
/// Relative residual budget for the pointwise equality shape of a 3-fold.
pub const SHAPE_TOL: f64 = 1e-8;

/// Structural facts a reduction establishes about its output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predicate {
    FirstDiagonal,
    SecondDiagonal,
    FirstOrthogonalSecond,
    FirstSecondCommute,
    /// Entries `(1,3)` and `(1,2)` of the fourth matrix vanish.
    FourthUpperZero,
    /// Entry `(1,2)` of the third matrix vanishes.
    ThirdCornerZero,
}

impl Predicate {
    pub fn name(self) -> &'static str {
        match self {
            Predicate::FirstDiagonal => "A1 diagonal",
            Predicate::SecondDiagonal => "A2 diagonal",
            Predicate::FirstOrthogonalSecond => "A1⊥A2",
            Predicate::FirstSecondCommute => "[A1,A2]=0",
            Predicate::FourthUpperZero => "d13=d12=0",
            Predicate::ThirdCornerZero => "c12=0",
        }
    }

    /// Checks the predicate with `tol` relative to the configuration's scale.
    pub fn holds(self, c: &Configuration, tol: f64) -> bool {
        let scale_sq = c.norm_sq();
        let scale = scale_sq.sqrt();
        let entry = |r: usize, i: usize, j: usize| c.get(r).get(i, j).abs();
        match self {
            Predicate::FirstDiagonal => max_offdiag_abs(c.get(0).as_matrix()) <= tol * scale,
            Predicate::SecondDiagonal => {
                c.m() > 1 && max_offdiag_abs(c.get(1).as_matrix()) <= tol * scale
            }
            Predicate::FirstOrthogonalSecond => {
                c.m() > 1 && c.get(0).dot(c.get(1)).abs() <= tol * scale_sq
            }
            Predicate::FirstSecondCommute => {
                c.m() > 1 && commutator_norm_sq(c.get(0), c.get(1)) <= (tol * scale_sq).powi(2)
            }
            Predicate::FourthUpperZero => {
                c.m() > 3 && c.n() >= 3 && entry(3, 0, 2).max(entry(3, 0, 1)) <= tol * scale
            }
            Predicate::ThirdCornerZero => c.m() > 2 && c.n() >= 2 && entry(2, 0, 1) <= tol * scale,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Predicate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionCertificate {
    pub g: GroupElement,
    pub before: Configuration,
    pub after: Configuration,
    pub satisfied_predicates: Vec<Predicate>,
}

impl ReductionCertificate {
    fn build(g: GroupElement, before: &Configuration, claimed: &[Predicate]) -> Result<Self> {
        let after = act(&g, before)?;
        let satisfied_predicates = claimed
            .iter()
            .copied()
            .filter(|p| p.holds(&after, PREDICATE_TOL))
            .collect();
        Ok(Self {
            g,
            before: before.clone(),
            after,
            satisfied_predicates,
        })
    }

    /// Recomputes `act(g, before)` and compares it with `after`.
    pub fn verify(&self, tol: f64) -> bool {
        let Ok(again) = act(&self.g, &self.before) else {
            return false;
        };
        let Ok(d) = again.distance(&self.after) else {
            return false;
        };
        d <= tol * self.before.norm_sq().sqrt().max(f64::MIN_POSITIVE)
            && self
                .satisfied_predicates
                .iter()
                .all(|p| p.holds(&self.after, tol))
    }

    pub fn satisfies(&self, p: Predicate) -> bool {
        self.satisfied_predicates.contains(&p)
    }
}

/// Element of `O(m)` acting as the 2×2 block `block` on indices `(i, j)`.
fn plane_block(m: usize, i: usize, j: usize, block: [[f64; 2]; 2]) -> OrthogonalMatrix {
    let mut q = DMatrix::identity(m, m);
    q[(i, i)] = block[0][0];
    q[(i, j)] = block[0][1];
    q[(j, i)] = block[1][0];
    q[(j, j)] = block[1][1];
    OrthogonalMatrix::from_trusted(q)
}

/// Embeds a `k × k` orthogonal block at offset `at` of an `m × m` identity.
fn embed(m: usize, at: usize, block: &OrthogonalMatrix) -> OrthogonalMatrix {
    let mut q = DMatrix::identity(m, m);
    let b = block.as_matrix();
    for i in 0..b.nrows() {
        for j in 0..b.ncols() {
            q[(at + i, at + j)] = b[(i, j)];
        }
    }
    OrthogonalMatrix::from_trusted(q)
}

/// Conjugation that diagonalizes the first matrix (eigenvalues descending).
pub fn diagonalize_first(c: &Configuration) -> Result<ReductionCertificate> {
    let d = spectral_decompose(c.get(0))?;
    let g = GroupElement::new(d.eigenvectors.transpose(), OrthogonalMatrix::identity(c.m()));
    ReductionCertificate::build(g, c, &[Predicate::FirstDiagonal])
}

/// Unit vector spanning (approximately) the kernel of `rows` (`k × len`),
/// taken as the bottom eigenvector of `MᵀM`. Returns the vector and the
/// smallest singular value.
fn kernel_vector(rows: &[Vec<f64>], len: usize) -> Result<(Vec<f64>, f64)> {
    let mtm = SymmetricMatrix::from_upper_fn(len, |a, b| rows.iter().map(|r| r[a] * r[b]).sum());
    let d = spectral_decompose(&mtm)?;
    let v = d.eigenvectors.as_matrix().column(len - 1).iter().copied().collect();
    Ok((v, d.eigenvalues[len - 1].max(0.0).sqrt()))
}

/// Reduction from the induction step on `m`: afterwards `A_1` and `A_2` are
/// both diagonal (hence commute) and Frobenius-orthogonal.
///
/// Needs `m ≥ n(n−1)/2 + 2` so that some unit combination of `A_2, …, A_m`
/// has vanishing off-diagonal part.
pub fn reduce_thm3_pair(c: &Configuration) -> Result<ReductionCertificate> {
    let (n, m) = (c.n(), c.m());
    let slots = n * (n - 1) / 2;
    if m < slots + 2 {
        return Err(Error::Precondition(format!(
            "pair reduction needs m >= n(n-1)/2 + 2 = {}, got m = {m}",
            slots + 2
        )));
    }
    let first = diagonalize_first(c)?;
    let cur = &first.after;

    let mut rows = Vec::with_capacity(slots);
    for i in 0..n {
        for j in (i + 1)..n {
            rows.push((1..m).map(|r| cur.get(r).get(i, j)).collect::<Vec<_>>());
        }
    }
    let (alpha, smallest) = kernel_vector(&rows, m - 1)?;
    let scale = c.norm_sq().sqrt();
    if smallest > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!(
            "off-diagonal system has no kernel (smallest singular value {smallest:e})"
        )));
    }
    let mut v = vec![0.0; m];
    v[1..].copy_from_slice(&alpha);
    let q_kernel = orthogonal_with_row(&v, 1);
    let mixed = act(&GroupElement::new(OrthogonalMatrix::identity(n), q_kernel.clone()), cur)?;

    let (a1, a2) = (mixed.get(0), mixed.get(1));
    let theta = 0.5 * (2.0 * a1.dot(a2)).atan2(a1.norm_sq() - a2.norm_sq());
    let (cs, sn) = (theta.cos(), theta.sin());
    let q_rot = plane_block(m, 0, 1, [[cs, sn], [-sn, cs]]);

    let g = GroupElement::new(first.g.p.clone(), q_rot.compose(&q_kernel)?);
    ReductionCertificate::build(
        g,
        c,
        &[
            Predicate::FirstDiagonal,
            Predicate::SecondDiagonal,
            Predicate::FirstOrthogonalSecond,
            Predicate::FirstSecondCommute,
        ],
    )
}

fn cross(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

/// Reduction of a quadruple `(A, B, C, D)` of 3×3 matrices to the form with
/// `A` diagonal, `d13 = d12 = 0` and `c12 = 0`.
///
/// The pivot row whose two off-diagonal entries are cleared in `D` is chosen
/// among the three basis indices to maximize the conditioning of the 2×3
/// constraint system, then moved to index 1 by a permutation.
pub fn reduce_lemma3(c: &Configuration) -> Result<ReductionCertificate> {
    if c.n() != 3 || c.m() != 4 {
        return Err(Error::Precondition(format!(
            "quadruple reduction needs n = 3, m = 4, got n = {}, m = {}",
            c.n(),
            c.m()
        )));
    }
    let first = diagonalize_first(c)?;
    let cur = &first.after;

    let constraint = |i: usize, j: usize| -> [f64; 3] {
        [cur.get(1).get(i, j), cur.get(2).get(i, j), cur.get(3).get(i, j)]
    };
    let mut best: Option<([usize; 3], [f64; 3], f64)> = None;
    for pivot in 0..3 {
        let others: Vec<usize> = (0..3).filter(|&k| k != pivot).collect();
        let perm = [pivot, others[0], others[1]];
        // Rows of the system, in the permuted basis: entries (1,3) and (1,2).
        let x = cross(constraint(pivot, others[1]), constraint(pivot, others[0]));
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if best.as_ref().is_none_or(|b| norm > b.2) {
            best = Some((perm, x, norm));
        }
    }
    let (perm, x, norm) = best.expect("three pivots examined");
    let p_perm = OrthogonalMatrix::permutation(&perm)?;
    let permuted = act(&GroupElement::new(p_perm.clone(), OrthogonalMatrix::identity(4)), cur)?;

    let scale = c.norm_sq().sqrt();
    let alpha: Vec<f64> = if norm > 1e-12 * scale * scale {
        x.iter().map(|v| v / norm).collect()
    } else {
        let rows: Vec<Vec<f64>> = [(0, 2), (0, 1)]
            .iter()
            .map(|&(i, j)| (1..4).map(|r| permuted.get(r).get(i, j)).collect())
            .collect();
        kernel_vector(&rows, 3)?.0
    };
    // Rows (γ, β, α): the new D is the kernel combination.
    let q_kernel = embed(4, 1, &orthogonal_with_row(&alpha, 2));
    let mixed = act(&GroupElement::new(OrthogonalMatrix::identity(3), q_kernel.clone()), &permuted)?;

    let theta = mixed.get(2).get(0, 1).atan2(mixed.get(1).get(0, 1));
    let (cs, sn) = (theta.cos(), theta.sin());
    let q_rot = plane_block(4, 1, 2, [[cs, sn], [sn, -cs]]);

    let p = p_perm.compose(&first.g.p)?;
    let g = GroupElement::new(p, q_rot.compose(&q_kernel)?);
    ReductionCertificate::build(
        g,
        c,
        &[
            Predicate::FirstDiagonal,
            Predicate::FourthUpperZero,
            Predicate::ThirdCornerZero,
        ],
    )
}

/// The canonical equality pair `(diag(λ, −λ, 0, …), λ(E_12 + E_21))`.
pub fn canonical_pair(n: usize, lambda: f64) -> (SymmetricMatrix, SymmetricMatrix) {
    let mut diag = vec![0.0; n];
    diag[0] = lambda;
    if n > 1 {
        diag[1] = -lambda;
    }
    let a = SymmetricMatrix::diagonal(&diag);
    let b = if n > 1 {
        SymmetricMatrix::unit_offdiag(n, 0, 1, lambda)
    } else {
        SymmetricMatrix::zeros(n)
    };
    (a, b)
}

/// `(canonical pair, 0, …, 0)` with `m` slots.
pub fn canonical_configuration(n: usize, m: usize, lambda: f64) -> Configuration {
    let (a, b) = canonical_pair(n, lambda);
    let mut mats = vec![a];
    if m > 1 {
        mats.push(b);
        mats.extend(std::iter::repeat_n(SymmetricMatrix::zeros(n), m - 2));
    }
    Configuration::new(mats).expect("canonical configuration is well formed")
}

#[derive(Debug, Clone, Serialize)]
pub struct EqualityDiagnosis {
    pub is_equality: bool,
    pub lambda: f64,
    pub sign: i8,
    /// Maps the input onto the canonical configuration with parameter `lambda`.
    pub witness: GroupElement,
    /// Frobenius distance between `act(witness, input)` and the canonical configuration.
    pub residual: f64,
}

struct PairFit {
    p: OrthogonalMatrix,
    lambda: f64,
}

/// Conjugation taking `a` to `diag(λ, −λ, …)` with `b`'s `(1,2)` entry made nonnegative.
fn fit_pair(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<PairFit> {
    let n = a.n();
    let d = spectral_decompose(a)?;
    let v = d.eigenvectors.as_matrix();
    let mut order: Vec<usize> = vec![0];
    if n > 1 {
        order.push(n - 1);
        order.extend(1..n - 1);
    }
    let mut q = DMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    let lambda = if n > 1 {
        0.5 * (d.eigenvalues[0] - d.eigenvalues[n - 1])
    } else {
        0.0
    };
    if n > 1 {
        let b12 = (q.transpose() * b.as_matrix() * &q)[(0, 1)];
        if b12 < 0.0 {
            q.column_mut(1).neg_mut();
        }
    }
    Ok(PairFit {
        p: OrthogonalMatrix::from_trusted(q.transpose()),
        lambda,
    })
}

fn is_equality_gap(c: &Configuration, tol: f64) -> bool {
    let g = ddvv_gap(c);
    g.gap <= tol * g.lhs
}

/// Recognizes pairs attaining `(‖a‖² + ‖b‖²)² = 2‖[a, b]‖²` and fits the
/// canonical form `a = Q diag(λ, −λ, 0, …) Qᵀ`, `b = Q λ(E_12 + E_21) Qᵀ`.
pub fn classify_equality_pair(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<EqualityDiagnosis> {
    classify_equality_pair_with_tol(a, b, EQUALITY_TOL)
}

pub fn classify_equality_pair_with_tol(
    a: &SymmetricMatrix,
    b: &SymmetricMatrix,
    tol: f64,
) -> Result<EqualityDiagnosis> {
    let c = Configuration::new(vec![a.clone(), b.clone()])?;
    let g = ddvv_gap(&c);
    let fit = fit_pair(a, b)?;
    let witness = GroupElement::new(fit.p, OrthogonalMatrix::identity(2));
    let residual = act(&witness, &c)?.distance(&canonical_configuration(a.n(), 2, fit.lambda))?;
    Ok(EqualityDiagnosis {
        is_equality: g.gap.abs() <= tol * g.lhs,
        lambda: fit.lambda,
        sign: 1,
        witness,
        residual,
    })
}

/// Equality classification for a configuration of 3×3 matrices: finds
/// `γ ∈ G` with `γ·c = (canonical pair, 0, …, 0)`.
///
/// The normal mixing `q` is read off the Gram matrix of the configuration
/// (at equality it has rank two), then the leading pair is fitted to the
/// canonical form. Also accepted for `n = 2`.
pub fn classify_equality(c: &Configuration) -> Result<EqualityDiagnosis> {
    classify_equality_with_tol(c, EQUALITY_TOL)
}

pub fn classify_equality_with_tol(c: &Configuration, tol: f64) -> Result<EqualityDiagnosis> {
    let (n, m) = (c.n(), c.m());
    if !(2..=3).contains(&n) {
        return Err(Error::Precondition(format!(
            "equality classification is available for n = 2 or 3, got n = {n}"
        )));
    }
    let gram = spectral_decompose(&c.gram())?;
    let q = gram.eigenvectors.transpose();
    let mixed = act(&GroupElement::new(OrthogonalMatrix::identity(n), q.clone()), c)?;
    let second = if m > 1 {
        mixed.get(1).clone()
    } else {
        SymmetricMatrix::zeros(n)
    };
    let fit = fit_pair(mixed.get(0), &second)?;
    let witness = GroupElement::new(fit.p, q);
    let residual = if m > 1 {
        act(&witness, c)?.distance(&canonical_configuration(n, m, fit.lambda))?
    } else {
        let lone = act(&witness, c)?;
        let (ca, cb) = canonical_pair(n, fit.lambda);
        ((lone.get(0).as_matrix() - ca.as_matrix()).norm_squared() + cb.norm_sq()).sqrt()
    };
    Ok(EqualityDiagnosis {
        is_equality: is_equality_gap(c, tol),
        lambda: fit.lambda,
        sign: 1,
        witness,
        residual,
    })
}

/// Fitted pointwise shape of a 3-fold attaining equality: in suitable
/// frames the slices are `λ0 I`, `diag(λ1+μ, λ1−μ, λ1)`,
/// `λ2 I + μ(E_12 + E_21)` and zero beyond.
#[derive(Debug, Clone, Serialize)]
pub struct ShapeFit {
    pub matches: bool,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu: f64,
    /// Tangent frame change `p` and normal frame change `q`.
    pub frames: GroupElement,
    pub residual: f64,
}

/// Slices of the equality shape for `m` normal directions. With `m < 3` the
/// leading umbilical slot is dropped (and `λ0` must vanish).
pub fn shape_slices(m: usize, lambda0: f64, lambda1: f64, lambda2: f64, mu: f64) -> Vec<SymmetricMatrix> {
    let umbilic = SymmetricMatrix::identity(3).scaled(lambda0);
    let first = SymmetricMatrix::diagonal(&[lambda1 + mu, lambda1 - mu, lambda1]);
    let second = SymmetricMatrix::identity(3)
        .scaled(lambda2)
        .add_scaled(1.0, &SymmetricMatrix::unit_offdiag(3, 0, 1, mu));
    let mut out = match m {
        0 => vec![],
        1 => vec![first],
        2 => vec![first, second],
        _ => vec![umbilic, first, second],
    };
    while out.len() < m {
        out.push(SymmetricMatrix::zeros(3));
    }
    out
}

/// Tests whether `h` can be brought to the equality shape by orthonormal
/// changes of tangent and normal frames, and returns the fit.
///
/// `μ ≥ 0` and `λ0 ≥ 0` are reported; `(λ1, λ2)` is determined up to a
/// rotation of the plane of the two non-umbilical normals.
pub fn thm5_shape_check(h: &SffTensor) -> Result<ShapeFit> {
    let (n, m) = (h.n(), h.m());
    if n != 3 {
        return Err(Error::Precondition(format!(
            "shape check is for 3-folds, got n = {n}"
        )));
    }
    let traces: Vec<f64> = h.slices().iter().map(|a| a.trace() / 3.0).collect();
    let traceless = Configuration::new(h.slices().iter().map(traceless_part).collect())?;
    let scale = h.as_configuration().norm_sq().sqrt();

    let diag = classify_equality(&traceless)?;
    let mu = diag.lambda;
    let qm = diag.witness.q.as_matrix();
    let dot = |row: &[f64]| row.iter().zip(&traces).map(|(a, b)| a * b).sum::<f64>();

    let (p, q, l0, l1, l2) = if m >= 2 && mu > SHAPE_TOL * scale {
        let u1: Vec<f64> = qm.row(0).iter().copied().collect();
        let u2: Vec<f64> = qm.row(1).iter().copied().collect();
        let (l1, l2) = (dot(&u1), dot(&u2));
        let w: Vec<f64> = (0..m).map(|r| traces[r] - l1 * u1[r] - l2 * u2[r]).collect();
        let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let q = if m >= 3 {
            // Rows: u0 (umbilical direction), u1, u2, then the rest of the Gram basis.
            let u0: Vec<f64> = if wn > SHAPE_TOL * scale {
                w.iter().map(|x| x / wn).collect()
            } else {
                qm.row(2).iter().copied().collect()
            };
            let basis = complete_rows(&[u0, u1, u2], m);
            OrthogonalMatrix::from_trusted(basis)
        } else {
            diag.witness.q.clone()
        };
        (diag.witness.p.clone(), q, if m >= 3 { wn } else { 0.0 }, l1, l2)
    } else {
        // No traceless part: the whole tensor is umbilical along τ.
        let tn = traces.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut u0 = vec![0.0; m];
        if tn > 0.0 {
            u0.iter_mut().zip(&traces).for_each(|(u, t)| *u = t / tn);
        } else {
            u0[0] = 1.0;
        }
        (
            OrthogonalMatrix::identity(3),
            orthogonal_with_row(&u0, 0),
            tn,
            0.0,
            0.0,
        )
    };

    let frames = GroupElement::new(p, q);
    let rotated = act(&frames, h.as_configuration())?;
    let target = if m >= 3 || mu > SHAPE_TOL * scale {
        Configuration::new(shape_slices(m, l0, l1, l2, mu))?
    } else {
        let mut slices = vec![SymmetricMatrix::identity(3).scaled(l0)];
        slices.extend(std::iter::repeat_n(SymmetricMatrix::zeros(3), m - 1));
        Configuration::new(slices)?
    };
    let residual = rotated.distance(&target)?;
    Ok(ShapeFit {
        matches: residual <= SHAPE_TOL * scale.max(1.0),
        lambda0: l0,
        lambda1: l1,
        lambda2: l2,
        mu,
        frames,
        residual,
    })
}

/// Gram–Schmidt completion of orthonormal rows to an `m × m` orthogonal matrix.
fn complete_rows(rows: &[Vec<f64>], m: usize) -> DMatrix<f64> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let candidates = rows
        .iter()
        .cloned()
        .chain((0..m).map(|k| (0..m).map(|i| if i == k { 1.0 } else { 0.0 }).collect()));
    for mut v in candidates {
        if basis.len() == m {
            break;
        }
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-6 {
            basis.push(v.iter().map(|x| x / nv).collect());
        }
    }
    DMatrix::from_fn(m, m, |i, j| basis[i][j])
}

/// Mixed determinant `D(x, y, z)`, the full polarization of `det` on 3×3
/// matrices, so that `det(Σ ν_r h_r) = Σ ν_r ν_s ν_t D(h_r, h_s, h_t)`.
pub fn mixed_determinant(x: &SymmetricMatrix, y: &SymmetricMatrix, z: &SymmetricMatrix) -> f64 {
    let mats = [x, y, z];
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut total = 0.0;
    for p in perms {
        let m = DMatrix::from_fn(3, 3, |i, j| mats[p[i]].get(i, j));
        total += m.determinant();
    }
    total / 6.0
}

/// Austerity of a 3-fold at a point: minimal and `det(ν·II) = 0` for every
/// normal `ν`, i.e. all mixed determinants of the slices vanish.
pub fn is_austere(h: &SffTensor, tol: f64) -> Result<bool> {
    if h.n() != 3 {
        return Err(Error::Precondition("austerity test is for 3-folds".into()));
    }
    let s = h.slices();
    let scale = h.as_configuration().norm_sq().sqrt();
    if s.iter().any(|a| a.trace().abs() > tol * scale.max(f64::MIN_POSITIVE)) {
        return Ok(false);
    }
    for r in 0..s.len() {
        for t in r..s.len() {
            for u in t..s.len() {
                if mixed_determinant(&s[r], &s[t], &s[u]).abs() > tol * scale.powi(3) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_orthogonal, RECONSTRUCTION_TOL};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn diagonalize_first_on_diagonal_input() {
        let c = Configuration::new(vec![
            SymmetricMatrix::diagonal(&[1.0, 3.0, 2.0]),
            SymmetricMatrix::unit_offdiag(3, 0, 2, 1.0),
        ])
        .unwrap();
        let cert = diagonalize_first(&c).unwrap();
        assert!(cert.g.p.is_signed_permutation(1e-12));
        assert_eq!(cert.g.q, OrthogonalMatrix::identity(2));
        assert!(cert.satisfies(Predicate::FirstDiagonal));
        assert!(cert.verify(1e-9));
    }

    #[test]
    fn diagonalize_first_on_conjugated_canonical_pair() {
        let mut r = rng(1);
        let p = haar_orthogonal(3, &mut r);
        let c = act(
            &GroupElement::new(p, OrthogonalMatrix::identity(2)),
            &canonical_configuration(3, 2, 1.0),
        )
        .unwrap();
        let cert = diagonalize_first(&c).unwrap();
        assert!(cert.after.get(0).is_diagonal(1e-10));
        assert!(ddvv_gap(&cert.after).gap.abs() < 1e-12);
    }

    #[test]
    fn diagonalize_first_random() {
        let mut r = rng(2);
        for _ in 0..100 {
            let c = Configuration::random(3, 3, false, &mut r);
            let cert = diagonalize_first(&c).unwrap();
            assert!(max_offdiag_abs(cert.after.get(0).as_matrix()) < 1e-10 * c.norm_sq().sqrt());
            assert!(cert.verify(1e-9));
        }
    }

    #[test]
    fn thm3_pair_reduction() {
        let mut r = rng(3);
        for &(n, m) in &[(3, 5), (2, 3), (3, 6), (4, 8)] {
            for _ in 0..50 {
                let c = Configuration::random(n, m, false, &mut r);
                let cert = reduce_thm3_pair(&c).unwrap();
                assert_eq!(cert.satisfied_predicates.len(), 4, "n={n} m={m}");
                assert!(cert.verify(1e-9));
                assert!((ddvv_gap(&cert.after).ratio - ddvv_gap(&c).ratio).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn thm3_pair_precondition() {
        let c = Configuration::random(3, 4, false, &mut rng(4));
        assert!(matches!(reduce_thm3_pair(&c), Err(Error::Precondition(_))));
    }

    #[test]
    fn thm3_pair_fixed_point_is_signed_permutation() {
        let mut r = rng(5);
        // A1 = diag(3,2,1), A2 = diag(1,-2,1) (orthogonal to A1), others random.
        let mut mats = vec![
            SymmetricMatrix::diagonal(&[3.0, 2.0, 1.0]),
            SymmetricMatrix::diagonal(&[1.0, -2.0, 1.0]),
        ];
        for _ in 0..3 {
            mats.push(SymmetricMatrix::random(3, &mut r));
        }
        let c = Configuration::new(mats).unwrap();
        let cert = reduce_thm3_pair(&c).unwrap();
        assert!(cert.g.p.is_signed_permutation(1e-9));
        assert!(cert.g.q.is_signed_permutation(1e-9));
    }

    #[test]
    fn lemma3_reduction() {
        let mut r = rng(6);
        for _ in 0..200 {
            let c = Configuration::random(3, 4, r.random_bool(0.5), &mut r);
            let cert = reduce_lemma3(&c).unwrap();
            assert_eq!(cert.satisfied_predicates.len(), 3);
            assert!(cert.verify(1e-9));
            let again = reduce_lemma3(&cert.after).unwrap();
            assert_eq!(again.satisfied_predicates.len(), 3);
            assert!((ddvv_gap(&again.after).gap - ddvv_gap(&cert.after).gap).abs() < 1e-10 * ddvv_gap(&c).lhs);
        }
    }

    #[test]
    fn lemma3_round_trip_under_group_action() {
        let mut r = rng(7);
        for _ in 0..100 {
            let c = Configuration::random(3, 4, true, &mut r);
            let reduced = reduce_lemma3(&c).unwrap().after;
            let moved = act(&GroupElement::random(3, 4, &mut r), &reduced).unwrap();
            let back = reduce_lemma3(&moved).unwrap();
            assert_eq!(back.satisfied_predicates.len(), 3);
            assert!((ddvv_gap(&back.after).ratio - ddvv_gap(&c).ratio).abs() < 1e-9);
        }
    }

    #[test]
    fn lemma3_rejects_wrong_shape() {
        let c = Configuration::random(3, 3, false, &mut rng(8));
        assert!(reduce_lemma3(&c).is_err());
    }

    #[test]
    fn canonical_pair_classifies_exactly() {
        let (a, b) = canonical_pair(3, 1.0);
        let d = classify_equality_pair(&a, &b).unwrap();
        assert!(d.is_equality);
        assert_eq!(d.lambda, 1.0);
        assert_eq!(d.sign, 1);
        assert!(d.residual < 1e-12);
    }

    #[test]
    fn commuting_pair_is_not_equality() {
        let a = SymmetricMatrix::diagonal(&[1.0, -1.0, 0.0]);
        let d = classify_equality_pair(&a, &a).unwrap();
        assert!(!d.is_equality);
    }

    #[test]
    fn conjugated_scaled_pair() {
        let mut r = rng(9);
        for n in 2..=5 {
            let q0 = haar_orthogonal(n, &mut r);
            let (a, b) = canonical_pair(n, 2.5);
            let (a, b) = (a.conjugate(q0.as_matrix()), b.conjugate(q0.as_matrix()));
            let d = classify_equality_pair(&a, &b).unwrap();
            assert!(d.is_equality);
            assert_relative_eq!(d.lambda, 2.5, max_relative = 1e-12);
            assert!(d.residual < 1e-8, "residual {}", d.residual);
        }
    }

    #[test]
    fn pair_equality_flag_matches_direct_evaluation() {
        let mut r = rng(10);
        for _ in 0..200 {
            let (a, b) = if r.random_bool(0.5) {
                let q = haar_orthogonal(3, &mut r);
                let (a, b) = canonical_pair(3, r.random_range(0.1..3.0));
                let noise = if r.random_bool(0.5) { 1e-3 } else { 0.0 };
                (
                    a.conjugate(q.as_matrix()).add_scaled(noise, &SymmetricMatrix::random(3, &mut r)),
                    b.conjugate(q.as_matrix()),
                )
            } else {
                (SymmetricMatrix::random(3, &mut r), SymmetricMatrix::random(3, &mut r))
            };
            let s = a.norm_sq() + b.norm_sq();
            let direct = (s * s - 2.0 * commutator_norm_sq(&a, &b)).abs() <= EQUALITY_TOL * s * s;
            assert_eq!(classify_equality_pair(&a, &b).unwrap().is_equality, direct);
        }
    }

    #[test]
    fn classify_mixed_canonical_configuration() {
        let mut r = rng(11);
        for _ in 0..200 {
            let lambda = r.random_range(0.1..10.0);
            let g = GroupElement::random(3, 4, &mut r);
            let c = act(&g, &canonical_configuration(3, 4, lambda)).unwrap();
            let d = classify_equality(&c).unwrap();
            assert!(d.is_equality);
            assert_relative_eq!(d.lambda, lambda, max_relative = 1e-6);
            assert!(d.residual < 1e-6 * lambda);
            let image = act(&d.witness, &c).unwrap();
            assert!(image.distance(&canonical_configuration(3, 4, d.lambda)).unwrap() <= d.residual + 1e-12);
        }
    }

    #[test]
    fn classify_rejects_slack_and_accepts_zero() {
        let mut r = rng(12);
        for _ in 0..50 {
            let c = Configuration::random(3, 3, true, &mut r);
            let g = ddvv_gap(&c);
            if g.gap > 0.01 * g.lhs {
                assert!(!classify_equality(&c).unwrap().is_equality);
            }
        }
        let z = classify_equality(&Configuration::zeros(3, 3)).unwrap();
        assert!(z.is_equality);
        assert_eq!(z.lambda, 0.0);
        assert!(classify_equality(&Configuration::zeros(4, 2)).is_err());
    }

    fn rotated_shape(m: usize, params: (f64, f64, f64, f64), r: &mut ChaCha8Rng) -> SffTensor {
        let (l0, l1, l2, mu) = params;
        let base = Configuration::new(shape_slices(m, l0, l1, l2, mu)).unwrap();
        let g = GroupElement::random(3, m, r);
        SffTensor::from_configuration(act(&g, &base).unwrap())
    }

    #[test]
    fn shape_check_zero() {
        let fit = thm5_shape_check(&SffTensor::new(vec![SymmetricMatrix::zeros(3); 3]).unwrap()).unwrap();
        assert!(fit.matches);
        assert_eq!((fit.lambda0, fit.lambda1, fit.lambda2, fit.mu), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn shape_check_recovers_parameters() {
        let mut r = rng(13);
        for m in [3, 4, 5] {
            for _ in 0..50 {
                let h = rotated_shape(m, (0.3, -0.2, 0.1, 0.7), &mut r);
                let fit = thm5_shape_check(&h).unwrap();
                assert!(fit.matches, "residual {}", fit.residual);
                assert_relative_eq!(fit.mu, 0.7, max_relative = 1e-8);
                assert_relative_eq!(fit.lambda0, 0.3, max_relative = 1e-8);
                assert_relative_eq!(fit.lambda1.hypot(fit.lambda2), 0.05f64.sqrt(), max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn shape_check_umbilical_and_two_normals() {
        let mut r = rng(14);
        let h = rotated_shape(4, (1.3, 0.0, 0.0, 0.0), &mut r);
        let fit = thm5_shape_check(&h).unwrap();
        assert!(fit.matches);
        assert_relative_eq!(fit.lambda0, 1.3, max_relative = 1e-12);
        let h = rotated_shape(2, (0.0, 0.4, -0.3, 0.9), &mut r);
        let fit = thm5_shape_check(&h).unwrap();
        assert!(fit.matches, "residual {}", fit.residual);
        assert_relative_eq!(fit.lambda1.hypot(fit.lambda2), 0.5, max_relative = 1e-8);
    }

    #[test]
    fn shape_check_rejects_generic() {
        let mut r = rng(15);
        for _ in 0..50 {
            let c = Configuration::random(3, 3, false, &mut r);
            let h = SffTensor::from_configuration(c.clone());
            let slack = crate::ddvv::curvature_check(&h, 0.0).unwrap().slack;
            if slack > 1e-3 * c.norm_sq() {
                assert!(!thm5_shape_check(&h).unwrap().matches);
            }
        }
    }

    #[test]
    fn minimal_equality_shape_is_austere() {
        let mut r = rng(16);
        let h = rotated_shape(4, (0.0, 0.0, 0.0, 1.7), &mut r);
        assert!(is_austere(&h, 1e-9).unwrap());
        let h = rotated_shape(4, (0.0, 0.2, 0.0, 1.7), &mut r);
        assert!(!is_austere(&h, 1e-9).unwrap());
        let generic = SffTensor::from_configuration(Configuration::random(3, 2, true, &mut r));
        assert!(!is_austere(&generic, 1e-9).unwrap());
    }

    #[test]
    fn mixed_determinant_polarizes_det() {
        let mut r = rng(17);
        let (x, y, z) = (
            SymmetricMatrix::random(3, &mut r),
            SymmetricMatrix::random(3, &mut r),
            SymmetricMatrix::random(3, &mut r),
        );
        assert_relative_eq!(mixed_determinant(&x, &x, &x), x.as_matrix().determinant(), max_relative = 1e-12);
        // det(x + t y + s z) is a cubic whose xyz-coefficient is 6 D(x,y,z).
        let det = |a: f64, b: f64, c: f64| {
            x.scaled(a).add_scaled(b, &y).add_scaled(c, &z).as_matrix().determinant()
        };
        let mixed = (det(1.0, 1.0, 1.0) - det(1.0, 1.0, -1.0) - det(1.0, -1.0, 1.0) + det(1.0, -1.0, -1.0)
            - det(-1.0, 1.0, 1.0) + det(-1.0, 1.0, -1.0) + det(-1.0, -1.0, 1.0) - det(-1.0, -1.0, -1.0))
            / 8.0;
        assert_relative_eq!(mixed, 6.0 * mixed_determinant(&x, &y, &z), max_relative = 1e-9);
        let _ = RECONSTRUCTION_TOL;
    }
}
