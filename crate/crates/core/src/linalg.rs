//! Dense symmetric matrices, orthogonal matrices and the `O(n) × O(m)` action
//! on tuples of symmetric matrices.
//!
//! Everything here is a small dense value type backed by `nalgebra::DMatrix`.
//! Symmetric matrices are built from their upper triangle and mirrored, so a
//! constructed [`SymmetricMatrix`] is exactly symmetric.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};

/// Max-abs deviation of `QᵀQ` from the identity accepted for an orthogonal matrix.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;
/// Accepted deviation of `|det Q|` from one.
pub const DETERMINANT_TOL: f64 = 1e-8;
/// Relative reconstruction budget of a spectral decomposition.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

const JACOBI_MAX_SWEEPS: usize = 100;
const EIGEN_TIE_TOL: f64 = 1e-12;
const SIGN_PIVOT_TOL: f64 = 1e-8;

/// Sum of squares of all entries.
pub fn frob_sq(x: &DMatrix<f64>) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Frobenius inner product `tr(xᵀ y)`.
pub fn frob_dot(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| a * b).sum()
}

pub fn max_abs(x: &DMatrix<f64>) -> f64 {
    x.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Largest absolute off-diagonal entry of a square matrix.
pub fn max_offdiag_abs(x: &DMatrix<f64>) -> f64 {
    let n = x.nrows();
    let mut out = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                out = out.max(x[(i, j)].abs());
            }
        }
    }
    out
}

/// A real symmetric `n × n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    inner: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Builds a matrix from a generator evaluated on the upper triangle (`i <= j`).
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut inner = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                inner[(i, j)] = v;
                inner[(j, i)] = v;
            }
        }
        Self { inner }
    }

    /// Mirrors the upper triangle of `m` without checking the lower one.
    pub fn from_upper_triangle(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::from_upper_fn(m.nrows(), |i, j| m[(i, j)]))
    }

    /// Accepts `m` if it is symmetric within `tol` (relative to `1 + max|m_ij|`),
    /// then symmetrizes exactly from the upper triangle.
    pub fn from_matrix(m: &DMatrix<f64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let asym = max_abs(&(m - m.transpose()));
        if asym > tol * (1.0 + max_abs(m)) {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        Self::from_upper_triangle(m)
    }

    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::from_matrix(&m, tol)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_upper_fn(n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    /// Symmetric matrix whose only nonzero entries are `(i, j)` and `(j, i)`.
    pub fn unit_offdiag(n: usize, i: usize, j: usize, value: f64) -> Self {
        let mut inner = DMatrix::zeros(n, n);
        inner[(i, j)] = value;
        inner[(j, i)] = value;
        Self { inner }
    }

    /// Symmetric Gaussian matrix `(X + Xᵀ)/2` with `X` standard normal.
    /// The law is invariant under conjugation by `O(n)`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let x = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
        Self::from_upper_fn(n, |i, j| 0.5 * (x[(i, j)] + x[(j, i)]))
    }

    pub fn n(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    pub fn norm_sq(&self) -> f64 {
        frob_sq(&self.inner)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        frob_dot(&self.inner, &other.inner)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            inner: &self.inner * t,
        }
    }

    /// `self + t · other`.
    pub fn add_scaled(&self, t: f64, other: &Self) -> Self {
        Self {
            inner: &self.inner + &other.inner * t,
        }
    }

    /// `p · self · pᵀ`, re-symmetrized from the upper triangle.
    pub fn conjugate(&self, p: &DMatrix<f64>) -> Self {
        let m = p * &self.inner * p.transpose();
        Self::from_upper_fn(self.n(), |i, j| m[(i, j)])
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        max_offdiag_abs(&self.inner) <= tol
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| (0..self.n()).map(|j| self.inner[(i, j)]).collect())
            .collect()
    }
}

/// `ab − ba`, which is skew-symmetric for symmetric arguments.
pub fn commutator(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<DMatrix<f64>> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    let ab = a.as_matrix() * b.as_matrix();
    Ok(&ab - ab.transpose())
}

/// `‖[a, b]‖²` without materializing the commutator twice.
pub fn commutator_norm_sq(a: &SymmetricMatrix, b: &SymmetricMatrix) -> f64 {
    let ab = a.as_matrix() * b.as_matrix();
    let n = a.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let c = ab[(i, j)] - ab[(j, i)];
            s += c * c;
        }
    }
    2.0 * s
}

/// `a − (tr a / n) I`.
pub fn traceless_part(a: &SymmetricMatrix) -> SymmetricMatrix {
    let n = a.n();
    if n == 0 {
        return a.clone();
    }
    let mean = a.trace() / n as f64;
    SymmetricMatrix::from_upper_fn(n, |i, j| {
        if i == j {
            a.get(i, j) - mean
        } else {
            a.get(i, j)
        }
    })
}

/// An ordered tuple `(A_1, …, A_m)` of symmetric matrices of a common size.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    matrices: Vec<SymmetricMatrix>,
}

impl Configuration {
    pub fn new(matrices: Vec<SymmetricMatrix>) -> Result<Self> {
        let first = matrices
            .first()
            .ok_or_else(|| Error::Precondition("a configuration needs m >= 1 matrices".into()))?;
        let n = first.n();
        for a in &matrices {
            if a.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: a.n(),
                });
            }
        }
        Ok(Self { matrices })
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            matrices: vec![SymmetricMatrix::zeros(n); m.max(1)],
        }
    }

    /// `m` independent Gaussian matrices, optionally projected to trace zero.
    pub fn random<R: Rng + ?Sized>(n: usize, m: usize, traceless: bool, rng: &mut R) -> Self {
        let matrices = (0..m.max(1))
            .map(|_| {
                let a = SymmetricMatrix::random(n, rng);
                if traceless {
                    traceless_part(&a)
                } else {
                    a
                }
            })
            .collect();
        Self { matrices }
    }

    pub fn n(&self) -> usize {
        self.matrices[0].n()
    }

    pub fn m(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[SymmetricMatrix] {
        &self.matrices
    }

    pub fn into_matrices(self) -> Vec<SymmetricMatrix> {
        self.matrices
    }

    pub fn get(&self, r: usize) -> &SymmetricMatrix {
        &self.matrices[r]
    }

    /// `Σ_r ‖A_r‖²`.
    pub fn norm_sq(&self) -> f64 {
        self.matrices.iter().map(SymmetricMatrix::norm_sq).sum()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            matrices: self.matrices.iter().map(|a| a.scaled(t)).collect(),
        }
    }

    /// Rescaled so that `Σ_r ‖A_r‖² = 1`; the zero configuration is returned unchanged.
    pub fn normalized(&self) -> Self {
        let s = self.norm_sq();
        if s > 0.0 {
            self.scaled(1.0 / s.sqrt())
        } else {
            self.clone()
        }
    }

    pub fn traceless(&self) -> Self {
        Self {
            matrices: self.matrices.iter().map(traceless_part).collect(),
        }
    }

    /// Frobenius distance `sqrt(Σ_r ‖A_r − B_r‖²)`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.m() != other.m() || self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: other.m(),
            });
        }
        Ok(self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| frob_sq(&(a.as_matrix() - b.as_matrix())))
            .sum::<f64>()
            .sqrt())
    }

    /// Gram matrix `G_rs = ⟨A_r, A_s⟩`.
    pub fn gram(&self) -> SymmetricMatrix {
        let m = self.m();
        SymmetricMatrix::from_upper_fn(m, |r, s| self.matrices[r].dot(&self.matrices[s]))
    }
}

/// A `k × k` orthogonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMatrix {
    inner: DMatrix<f64>,
}

impl OrthogonalMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let q = Self { inner: m };
        let dev = q.orthogonality_residual();
        if dev > ORTHOGONALITY_TOL {
            return Err(Error::NotOrthogonal { deviation: dev });
        }
        let det = q.inner.determinant();
        if (det.abs() - 1.0).abs() > DETERMINANT_TOL {
            return Err(Error::NotOrthogonal {
                deviation: (det.abs() - 1.0).abs(),
            });
        }
        Ok(q)
    }

    /// Callers guarantee orthogonality by construction (products, eigenvectors, QR factors).
    pub(crate) fn from_trusted(m: DMatrix<f64>) -> Self {
        debug_assert!(
            max_abs(&(m.transpose() * &m - DMatrix::identity(m.nrows(), m.ncols()))) < 1e-8
        );
        Self { inner: m }
    }

    pub fn identity(k: usize) -> Self {
        Self {
            inner: DMatrix::identity(k, k),
        }
    }

    /// Permutation matrix sending basis vector `e_{perm[i]}` to `e_i`,
    /// i.e. row `i` is `e_{perm[i]}ᵀ`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        let k = perm.len();
        let mut seen = vec![false; k];
        for &p in perm {
            if p >= k || seen[p] {
                return Err(Error::Precondition(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(Self {
            inner: DMatrix::from_fn(k, k, |i, j| if perm[i] == j { 1.0 } else { 0.0 }),
        })
    }

    pub fn k(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn transpose(&self) -> Self {
        Self {
            inner: self.inner.transpose(),
        }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.k() != other.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                found: other.k(),
            });
        }
        Ok(Self {
            inner: &self.inner * &other.inner,
        })
    }

    pub fn orthogonality_residual(&self) -> f64 {
        let k = self.k();
        max_abs(&(self.inner.transpose() * &self.inner - DMatrix::identity(k, k)))
    }

    pub fn determinant(&self) -> f64 {
        self.inner.determinant()
    }

    /// True if every row and column has exactly one entry of magnitude ~1.
    pub fn is_signed_permutation(&self, tol: f64) -> bool {
        let k = self.k();
        (0..k).all(|i| {
            let big = (0..k)
                .filter(|&j| (self.inner[(i, j)].abs() - 1.0).abs() <= tol)
                .count();
            let small = (0..k).filter(|&j| self.inner[(i, j)].abs() <= tol).count();
            big == 1 && small == k - 1
        })
    }
}

/// Haar-distributed element of `O(k)`: QR of a Gaussian matrix with the
/// column signs fixed so that `R` has a positive diagonal.
pub fn haar_orthogonal<R: Rng + ?Sized>(k: usize, rng: &mut R) -> OrthogonalMatrix {
    assert!(k >= 1, "haar_orthogonal needs k >= 1");
    let g = DMatrix::<f64>::from_fn(k, k, |_, _| rng.sample(StandardNormal));
    OrthogonalMatrix::from_trusted(orthonormal_factor(g))
}

/// The `Q` factor of a thin QR factorization with `diag(R) > 0`.
pub(crate) fn orthonormal_factor(m: DMatrix<f64>) -> DMatrix<f64> {
    let qr = m.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Completes a unit vector `v ∈ R^k` to an orthogonal matrix whose row
/// `row` equals `v`, using a Householder reflection of `e_row`.
pub(crate) fn orthogonal_with_row(v: &[f64], row: usize) -> OrthogonalMatrix {
    let k = v.len();
    let mut w: Vec<f64> = v.iter().map(|x| -x).collect();
    w[row] += 1.0;
    let wn: f64 = w.iter().map(|x| x * x).sum();
    if wn < 1e-30 {
        return OrthogonalMatrix::identity(k);
    }
    let h = DMatrix::from_fn(k, k, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - 2.0 * w[i] * w[j] / wn
    });
    OrthogonalMatrix::from_trusted(h)
}

/// An element `(p, q)` of `O(n) × O(m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub p: OrthogonalMatrix,
    pub q: OrthogonalMatrix,
}

impl GroupElement {
    pub fn new(p: OrthogonalMatrix, q: OrthogonalMatrix) -> Self {
        Self { p, q }
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self {
            p: OrthogonalMatrix::identity(n),
            q: OrthogonalMatrix::identity(m),
        }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Self {
        Self {
            p: haar_orthogonal(n, rng),
            q: haar_orthogonal(m, rng),
        }
    }

    /// `(p1 p2, q1 q2)`, so that acting by the result equals acting by `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            p: self.p.compose(&other.p)?,
            q: self.q.compose(&other.q)?,
        })
    }
}

/// The action `A_r ↦ Σ_j q_rj · p A_j pᵀ`.
pub fn act(g: &GroupElement, c: &Configuration) -> Result<Configuration> {
    if g.p.k() != c.n() {
        return Err(Error::DimensionMismatch {
            expected: c.n(),
            found: g.p.k(),
        });
    }
    if g.q.k() != c.m() {
        return Err(Error::DimensionMismatch {
            expected: c.m(),
            found: g.q.k(),
        });
    }
    let p = g.p.as_matrix();
    let conj: Vec<DMatrix<f64>> = c
        .matrices()
        .iter()
        .map(|a| p * a.as_matrix() * p.transpose())
        .collect();
    let q = g.q.as_matrix();
    let n = c.n();
    let matrices = (0..c.m())
        .map(|r| {
            let mut acc = DMatrix::zeros(n, n);
            for (j, cj) in conj.iter().enumerate() {
                let w = q[(r, j)];
                if w != 0.0 {
                    acc += cj * w;
                }
            }
            SymmetricMatrix::from_upper_fn(n, |i, k| acc[(i, k)])
        })
        .collect();
    Configuration::new(matrices)
}

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: OrthogonalMatrix,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> SymmetricMatrix {
        let v = self.eigenvectors.as_matrix();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.eigenvalues));
        let m = v * d * v.transpose();
        SymmetricMatrix::from_upper_fn(v.nrows(), |i, j| m[(i, j)])
    }
}

/// Cyclic Jacobi eigensolver.
///
/// Output convention: eigenvalues descending; each eigenvector's first
/// component with magnitude above `1e-8` is positive; runs of equal
/// eigenvalues are ordered by descending lexicographic eigenvector.
pub fn spectral_decompose(a: &SymmetricMatrix) -> Result<SpectralDecomposition> {
    let n = a.n();
    let mut m = a.as_matrix().clone();
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = frob_sq(&m).sqrt();

    let off = |m: &DMatrix<f64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += m[(i, j)] * m[(i, j)];
            }
        }
        (2.0 * s).sqrt()
    };

    let mut converged = scale == 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        if off(&m) <= f64::EPSILON * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off(&m) > f64::EPSILON * scale {
        return Err(Error::SpectralNonConvergence { residual: off(&m) });
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|j| {
            let mut col: Vec<f64> = (0..n).map(|i| v[(i, j)]).collect();
            if let Some(first) = col.iter().find(|x| x.abs() > SIGN_PIVOT_TOL) {
                if *first < 0.0 {
                    col.iter_mut().for_each(|x| *x = -*x);
                }
            }
            (m[(j, j)], col)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));

    let tie = EIGEN_TIE_TOL * (1.0 + scale);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (pairs[end - 1].0 - pairs[end].0).abs() <= tie {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| lex_desc(&a.1, &b.1));
        start = end;
    }

    let eigenvalues = pairs.iter().map(|p| p.0).collect();
    let vecs = DMatrix::from_fn(n, n, |i, j| pairs[j].1[i]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: OrthogonalMatrix::from_trusted(vecs),
    })
}

fn lex_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > SIGN_PIVOT_TOL {
            return y.partial_cmp(x).unwrap_or(Ordering::Equal);
        }
    }
    Ordering::Equal
}

fn serialize_rows<S: Serializer>(m: &DMatrix<f64>, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<f64> = m.row(i).iter().copied().collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

/// Row-major nested arrays.
impl Serialize for SymmetricMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_rows(&self.inner, serializer)
    }
}

impl Serialize for OrthogonalMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_rows(&self.inner, serializer)
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrices.serialize(serializer)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("GroupElement", 2)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("q", &self.q)?;
        st.end()
    }
}
