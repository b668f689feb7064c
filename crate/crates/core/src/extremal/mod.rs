//! Closed-form extrema, commutator decompositions and proof-chain slacks for
//! the `n = 3` cases, plus a global search for the supremum of the ratio.

mod lemma1;
mod search;
mod structure;
mod trace;

pub use lemma1::{circle_point, lemma1_extrema, Lemma1Result};
pub use search::{
    ratio_and_gradient, ratio_maximize, RestartRecord, SearchOptions, SearchResult,
};
pub use structure::{
    build_p_xi, build_quad_p_xi, lemma2_check, quartic_oracles, sin_sum, sin_sum_max, PolarPXi,
    QuadPXi,
};
pub use trace::{proof_trace_p33, proof_trace_p34, NamedSlack, ProofTrace, SlackStatus};
