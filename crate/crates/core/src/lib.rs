//! Numerical tools for the DDVV matrix inequality
//!
//! ```text
//! (Σ_r ‖A_r‖²)² ≥ 2 Σ_{r<s} ‖[A_r, A_s]‖²
//! ```
//!
//! on tuples of real symmetric matrices, its geometric form in terms of a
//! second fundamental form, the `O(n) × O(m)` reductions used to study it,
//! and comass computations for constant-coefficient p-forms including the
//! first Pontryagin form of a Grassmannian.

pub mod comass;
pub mod ddvv;
pub mod error;
pub mod extremal;
pub mod linalg;
pub mod reduction;
pub mod seed;
pub mod selftest;
pub mod stiefel;

pub use error::{Error, Result};
pub use linalg::{
    act, commutator, frob_sq, haar_orthogonal, spectral_decompose, traceless_part, Configuration,
    GroupElement, OrthogonalMatrix, SpectralDecomposition, SymmetricMatrix,
};

/// Iteration and restart limits shared by the optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Budget {
    pub restarts: usize,
    pub max_iters: usize,
}

impl Budget {
    pub const fn new(restarts: usize, max_iters: usize) -> Self {
        Self {
            restarts,
            max_iters,
        }
    }
}
