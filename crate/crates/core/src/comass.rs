//! Constant-coefficient `p`-covectors, their values on `p`-planes, and
//! comass estimates by ascent over orthonormal frames.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::stiefel::{gram_residual, maximize, FrameObjective, MultiStartOutcome};
use crate::Budget;

/// Default restart and iteration budget for comass searches.
pub const DEFAULT_BUDGET: Budget = Budget::new(200, 1000);

/// `φ = Σ_I a_I e*_{i_1} ∧ ⋯ ∧ e*_{i_p}` on `R^d`, with 1-based strictly
/// increasing multi-indices.
#[derive(Debug, Clone, PartialEq)]
pub struct PCovector {
    d: usize,
    p: usize,
    coeffs: BTreeMap<Vec<usize>, f64>,
}

impl PCovector {
    pub fn new(d: usize, p: usize, terms: impl IntoIterator<Item = (Vec<usize>, f64)>) -> Result<Self> {
        if p == 0 || p > d {
            return Err(Error::Precondition(format!("degree must satisfy 1 <= p <= d, got p = {p}, d = {d}")));
        }
        let mut coeffs = BTreeMap::new();
        for (index, a) in terms {
            let ok = index.len() == p
                && index.iter().all(|&i| (1..=d).contains(&i))
                && index.windows(2).all(|w| w[0] < w[1]);
            if !ok {
                return Err(Error::InvalidMultiIndex { index, dim: d });
            }
            if !a.is_finite() {
                return Err(Error::NonFinite);
            }
            *coeffs.entry(index).or_insert(0.0) += a;
        }
        Ok(Self { d, p, coeffs })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.coeffs
    }
}

impl Serialize for PCovector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<(&Vec<usize>, f64)> = self.coeffs.iter().map(|(k, v)| (k, *v)).collect();
        let mut st = s.serialize_struct("PCovector", 3)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// Orthonormal tuple of `rows × cols` matrices under the Frobenius product;
/// plain vectors have `cols = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTuple {
    rows: usize,
    cols: usize,
    vectors: Vec<DMatrix<f64>>,
}

/// Largest deviation of a frame's Gram matrix from the identity.
pub const FRAME_TOL: f64 = 1e-10;

impl FrameTuple {
    pub fn new(vectors: Vec<DMatrix<f64>>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::Precondition("a frame needs at least one vector".into()));
        };
        let (rows, cols) = first.shape();
        if let Some(bad) = vectors.iter().find(|v| v.shape() != (rows, cols)) {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: bad.len(),
            });
        }
        let frame = Self { rows, cols, vectors };
        let dev = gram_residual(&frame.as_columns());
        if dev > FRAME_TOL {
            return Err(Error::NotOrthogonal { deviation: dev });
        }
        Ok(frame)
    }

    pub fn from_vectors(vectors: &[Vec<f64>]) -> Result<Self> {
        Self::new(vectors.iter().map(|v| DMatrix::from_column_slice(v.len(), 1, v)).collect())
    }

    fn from_columns(x: &DMatrix<f64>, rows: usize, cols: usize) -> Self {
        let vectors = x
            .column_iter()
            .map(|c| DMatrix::from_column_slice(rows, cols, c.as_slice()))
            .collect();
        Self { rows, cols, vectors }
    }

    /// `d × k` matrix whose columns are the flattened vectors.
    pub fn as_columns(&self) -> DMatrix<f64> {
        let d = self.rows * self.cols;
        DMatrix::from_fn(d, self.vectors.len(), |i, j| self.vectors[j].as_slice()[i])
    }

    pub fn k(&self) -> usize {
        self.vectors.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn vectors(&self) -> &[DMatrix<f64>] {
        &self.vectors
    }

    pub fn gram_residual(&self) -> f64 {
        gram_residual(&self.as_columns())
    }
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl Serialize for FrameTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let vecs: Vec<Vec<Vec<f64>>> = self.vectors.iter().map(rows_of).collect();
        let mut st = s.serialize_struct("FrameTuple", 2)?;
        st.serialize_field("k", &self.vectors.len())?;
        st.serialize_field("vectors", &vecs)?;
        st.end()
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ComassEstimate {
    pub value: f64,
    pub argmax: FrameTuple,
    pub restarts_used: usize,
    pub converged: bool,
    /// Best value after each restart.
    pub trace: Vec<f64>,
}

fn estimate(out: MultiStartOutcome, rows: usize, cols: usize) -> ComassEstimate {
    ComassEstimate {
        value: out.best.value,
        argmax: FrameTuple::from_columns(&out.best.frame, rows, cols),
        restarts_used: out.restarts_used,
        converged: out.best.converged,
        trace: out.trace,
    }
}

/// `{AB} = ABᵀ − BAᵀ`.
pub fn bracket(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let ab = a * b.transpose();
    Ok(&ab - ab.transpose())
}

fn br(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let ab = a * b.transpose();
    &ab - ab.transpose()
}

fn check_shapes(a: [&DMatrix<f64>; 4]) -> Result<()> {
    for x in &a[1..] {
        if x.shape() != a[0].shape() {
            return Err(Error::DimensionMismatch {
                expected: a[0].len(),
                found: x.len(),
            });
        }
    }
    Ok(())
}

/// First Pontryagin form
/// `−½ tr({A1A2}{A3A4} + {A3A1}{A2A4} + {A2A3}{A1A4})`.
pub fn pontryagin_phi(a1: &DMatrix<f64>, a2: &DMatrix<f64>, a3: &DMatrix<f64>, a4: &DMatrix<f64>) -> Result<f64> {
    check_shapes([a1, a2, a3, a4])?;
    Ok(phi_unchecked(a1, a2, a3, a4))
}

fn phi_unchecked(a1: &DMatrix<f64>, a2: &DMatrix<f64>, a3: &DMatrix<f64>, a4: &DMatrix<f64>) -> f64 {
    let t = (br(a1, a2) * br(a3, a4)).trace()
        + (br(a3, a1) * br(a2, a4)).trace()
        + (br(a2, a3) * br(a1, a4)).trace();
    -0.5 * t
}

/// `{zw}y − {yw}z + {yz}w`: the gradient of the form in its first slot.
fn slot_gradient(y: &DMatrix<f64>, z: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
    br(z, w) * y - br(y, w) * z + br(y, z) * w
}

/// Gradients of [`pontryagin_phi`] with respect to each argument.
pub fn pontryagin_gradient(a: [&DMatrix<f64>; 4]) -> Result<[DMatrix<f64>; 4]> {
    check_shapes(a)?;
    let [a1, a2, a3, a4] = a;
    Ok([
        slot_gradient(a2, a3, a4),
        -slot_gradient(a1, a3, a4),
        slot_gradient(a1, a2, a4),
        -slot_gradient(a1, a2, a3),
    ])
}

/// Determinant of the rows `index` (1-based) of `x`.
fn minor(x: &DMatrix<f64>, index: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(index.len(), x.ncols(), |a, j| x[(index[a] - 1, j)])
}

/// Cofactor matrix, computed from minors so that it is valid when `m` is singular.
fn cofactors(m: &DMatrix<f64>) -> DMatrix<f64> {
    let p = m.nrows();
    if p == 1 {
        return DMatrix::from_element(1, 1, 1.0);
    }
    DMatrix::from_fn(p, p, |i, j| {
        let sub = m.clone().remove_row(i).remove_column(j);
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        sign * sub.determinant()
    })
}

fn frame_matrix(phi: &PCovector, frame: &FrameTuple) -> Result<DMatrix<f64>> {
    let (rows, cols) = frame.shape();
    if cols != 1 || rows != phi.d || frame.k() != phi.p {
        return Err(Error::Precondition(format!(
            "expected {} vectors in dimension {}, got {} of shape {rows}×{cols}",
            phi.p,
            phi.d,
            frame.k()
        )));
    }
    Ok(frame.as_columns())
}

/// `φ(v_1 ∧ ⋯ ∧ v_p) = Σ_I a_I det(X[I, :])` for the frame matrix `X`.
pub fn eval_pcovector(phi: &PCovector, frame: &FrameTuple) -> Result<f64> {
    let x = frame_matrix(phi, frame)?;
    Ok(pcovector_value(phi, &x))
}

fn pcovector_value(phi: &PCovector, x: &DMatrix<f64>) -> f64 {
    phi.coeffs.iter().map(|(i, a)| a * minor(x, i).determinant()).sum()
}

fn pcovector_gradient(phi: &PCovector, x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(x.nrows(), x.ncols());
    for (index, a) in &phi.coeffs {
        let cof = cofactors(&minor(x, index));
        for (r, &row) in index.iter().enumerate() {
            for j in 0..x.ncols() {
                g[(row - 1, j)] += a * cof[(r, j)];
            }
        }
    }
    g
}

struct PCovectorObjective<'a>(&'a PCovector);

impl FrameObjective for PCovectorObjective<'_> {
    fn dim(&self) -> usize {
        self.0.d
    }
    fn k(&self) -> usize {
        self.0.p
    }
    fn value(&self, x: &DMatrix<f64>) -> f64 {
        pcovector_value(self.0, x)
    }
    fn gradient(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        pcovector_gradient(self.0, x)
    }
}

pub fn comass_pcovector(phi: &PCovector, budget: Budget, seed: u64) -> Result<ComassEstimate> {
    let out = maximize(&PCovectorObjective(phi), budget, seed);
    Ok(estimate(out, phi.d, 1))
}

/// The Pontryagin form on orthonormal 4-tuples of `rows × cols` matrices.
pub struct PontryaginObjective {
    rows: usize,
    cols: usize,
}

impl PontryaginObjective {
    /// Tangent model of the Grassmannian of `n`-planes in `R^m`: `(m − n) × n` matrices.
    pub fn grassmannian(n: usize, m: usize) -> Result<Self> {
        if n < 3 || m < 2 * n {
            return Err(Error::Precondition(format!(
                "Pontryagin comass needs n >= 3 and m >= 2n, got n = {n}, m = {m}"
            )));
        }
        Ok(Self { rows: m - n, cols: n })
    }

    fn unpack(&self, x: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
        x.column_iter()
            .map(|c| DMatrix::from_column_slice(self.rows, self.cols, c.as_slice()))
            .collect()
    }
}

impl FrameObjective for PontryaginObjective {
    fn dim(&self) -> usize {
        self.rows * self.cols
    }
    fn k(&self) -> usize {
        4
    }
    fn value(&self, x: &DMatrix<f64>) -> f64 {
        let a = self.unpack(x);
        phi_unchecked(&a[0], &a[1], &a[2], &a[3])
    }
    fn gradient(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let a = self.unpack(x);
        let g = pontryagin_gradient([&a[0], &a[1], &a[2], &a[3]]).expect("shapes agree");
        DMatrix::from_fn(self.dim(), 4, |i, j| g[j].as_slice()[i])
    }
}

/// Comass of the first Pontryagin form of the Grassmannian of `n`-planes in `R^m`.
pub fn comass_pontryagin(n: usize, m: usize, budget: Budget, seed: u64) -> Result<ComassEstimate> {
    let obj = PontryaginObjective::grassmannian(n, m)?;
    let out = maximize(&obj, budget, seed);
    Ok(estimate(out, obj.rows, obj.cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_orthogonal;
    use crate::stiefel::random_frame;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn gauss(r: usize, c: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
    }

    fn unit(d: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    }

    #[test]
    fn bracket_examples() {
        let a = DMatrix::from_row_slice(2, 1, &[1.0, 0.0]);
        let b = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
        assert_eq!(bracket(&a, &b).unwrap(), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        assert_eq!(bracket(&a, &a).unwrap(), DMatrix::zeros(2, 2));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (x, y) = (gauss(4, 3, &mut rng), gauss(4, 3, &mut rng));
        let k = bracket(&x, &y).unwrap();
        assert!((&k + k.transpose()).amax() < 1e-12);
        assert!(bracket(&x, &gauss(3, 3, &mut rng)).is_err());
    }

    #[test]
    fn phi_alternates() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let a: Vec<_> = (0..4).map(|_| gauss(3, 3, &mut rng)).collect();
            let v = pontryagin_phi(&a[0], &a[1], &a[2], &a[3]).unwrap();
            assert!(pontryagin_phi(&a[0], &a[0], &a[2], &a[3]).unwrap().abs() < 1e-12);
            for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
                let mut b = a.clone();
                b.swap(i, j);
                let w = pontryagin_phi(&b[0], &b[1], &b[2], &b[3]).unwrap();
                assert!((v + w).abs() <= 1e-12 * (1.0 + v.abs()));
            }
        }
    }

    #[test]
    fn phi_is_orthogonally_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a: Vec<_> = (0..4).map(|_| gauss(4, 3, &mut rng)).collect();
            let u = haar_orthogonal(4, &mut rng);
            let v = haar_orthogonal(3, &mut rng);
            let b: Vec<_> = a.iter().map(|x| u.as_matrix() * x * v.as_matrix().transpose()).collect();
            let p = pontryagin_phi(&a[0], &a[1], &a[2], &a[3]).unwrap();
            let q = pontryagin_phi(&b[0], &b[1], &b[2], &b[3]).unwrap();
            assert!((p - q).abs() <= 1e-10 * p.abs().max(1.0));
        }
    }

    #[test]
    fn pontryagin_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = 1e-5;
        for _ in 0..20 {
            let a: Vec<_> = (0..4).map(|_| gauss(3, 3, &mut rng)).collect();
            let g = pontryagin_gradient([&a[0], &a[1], &a[2], &a[3]]).unwrap();
            let v = pontryagin_phi(&a[0], &a[1], &a[2], &a[3]).unwrap();
            assert!((v - a[0].dot(&g[0])).abs() < 1e-10 * (1.0 + v.abs()));
            for s in 0..4 {
                for e in 0..9 {
                    let bump = |t: f64| {
                        let mut b = a.clone();
                        b[s].as_mut_slice()[e] += t;
                        pontryagin_phi(&b[0], &b[1], &b[2], &b[3]).unwrap()
                    };
                    let fd = (bump(h) - bump(-h)) / (2.0 * h);
                    let an = g[s].as_slice()[e];
                    assert!((fd - an).abs() <= 1e-5 * an.abs().max(1.0), "{fd} vs {an}");
                }
            }
        }
    }

    #[test]
    fn pcovector_validation() {
        assert!(PCovector::new(3, 2, [(vec![2, 1], 1.0)]).is_err());
        assert!(PCovector::new(3, 2, [(vec![1, 4], 1.0)]).is_err());
        assert!(PCovector::new(3, 2, [(vec![0, 1], 1.0)]).is_err());
        assert!(PCovector::new(3, 4, []).is_err());
    }

    #[test]
    fn pcovector_examples() {
        let phi = PCovector::new(2, 2, [(vec![1, 2], 1.0)]).unwrap();
        let f = FrameTuple::from_vectors(&[unit(2, 0), unit(2, 1)]).unwrap();
        assert_eq!(eval_pcovector(&phi, &f).unwrap(), 1.0);
        let f = FrameTuple::from_vectors(&[unit(2, 1), unit(2, 0)]).unwrap();
        assert_eq!(eval_pcovector(&phi, &f).unwrap(), -1.0);
        let phi = PCovector::new(4, 2, [(vec![1, 2], 1.0), (vec![3, 4], 1.0)]).unwrap();
        let f = FrameTuple::from_vectors(&[unit(4, 0), unit(4, 2)]).unwrap();
        assert_eq!(eval_pcovector(&phi, &f).unwrap(), 0.0);
    }

    #[test]
    fn frame_rotation_within_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let terms: Vec<_> = [vec![1, 2, 3], vec![1, 3, 5], vec![2, 4, 5], vec![3, 4, 5]]
            .into_iter()
            .map(|i| (i, rng.random_range(-1.0..1.0)))
            .collect();
        let phi = PCovector::new(5, 3, terms).unwrap();
        for _ in 0..100 {
            let x = random_frame(5, 3, &mut rng);
            let r = haar_orthogonal(3, &mut rng);
            let v = pcovector_value(&phi, &x);
            let w = pcovector_value(&phi, &(&x * r.as_matrix()));
            assert!((w - r.determinant() * v).abs() <= 1e-10 * v.abs().max(1e-3));
        }
    }

    #[test]
    fn pcovector_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let phi = PCovector::new(5, 3, [(vec![1, 2, 3], 0.7), (vec![2, 4, 5], -1.3), (vec![1, 3, 4], 0.4)]).unwrap();
        let h = 1e-5;
        for _ in 0..20 {
            let x = gauss(5, 3, &mut rng);
            let g = pcovector_gradient(&phi, &x);
            for i in 0..5 {
                for j in 0..3 {
                    let bump = |t: f64| {
                        let mut y = x.clone();
                        y[(i, j)] += t;
                        pcovector_value(&phi, &y)
                    };
                    let fd = (bump(h) - bump(-h)) / (2.0 * h);
                    assert!((fd - g[(i, j)]).abs() <= 1e-5 * g[(i, j)].abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn comass_of_simple_forms() {
        let budget = Budget::new(8, 1000);
        let phi = PCovector::new(4, 2, [(vec![1, 2], 1.0)]).unwrap();
        let est = comass_pcovector(&phi, budget, 1).unwrap();
        assert!((est.value - 1.0).abs() < 1e-6, "{est:?}");
        assert!(est.argmax.gram_residual() <= FRAME_TOL);
        let vol = PCovector::new(3, 3, [(vec![1, 2, 3], 1.0)]).unwrap();
        assert!((comass_pcovector(&vol, budget, 1).unwrap().value - 1.0).abs() < 1e-9);
        let kahler = PCovector::new(4, 2, [(vec![1, 2], 1.0), (vec![3, 4], 1.0)]).unwrap();
        assert!((comass_pcovector(&kahler, budget, 1).unwrap().value - 1.0).abs() < 1e-4);
    }

    #[test]
    fn degenerate_budget_gives_lower_bound() {
        let phi = PCovector::new(4, 2, [(vec![1, 2], 1.0)]).unwrap();
        let est = comass_pcovector(&phi, Budget::new(0, 0), 1).unwrap();
        assert!(!est.converged);
        assert!(est.value <= 1.0 + 1e-12);
        let f = est.argmax.clone();
        assert_eq!(eval_pcovector(&phi, &f).unwrap(), est.value);
    }

    #[test]
    fn pontryagin_preconditions() {
        assert!(comass_pontryagin(2, 6, Budget::new(1, 1), 0).is_err());
        assert!(comass_pontryagin(3, 5, Budget::new(1, 1), 0).is_err());
    }

    #[test]
    fn pontryagin_small_run_is_consistent() {
        let est = comass_pontryagin(3, 6, Budget::new(4, 300), 11).unwrap();
        let v = est.argmax.vectors();
        let direct = pontryagin_phi(&v[0], &v[1], &v[2], &v[3]).unwrap();
        assert!((direct - est.value).abs() <= 1e-12 * est.value.abs().max(1.0));
        assert!(est.argmax.gram_residual() <= FRAME_TOL);
        assert!(est.value <= 1.5f64.sqrt() + 5e-3);
        assert!(est.trace.windows(2).all(|w| w[0] <= w[1]));
    }
}
