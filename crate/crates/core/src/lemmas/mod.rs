//! Certificate-emitting checkers for the structural results the engine is
//! built around: the Reid-geometry divisibility argument, the copunctual
//! line-length facts, the affine-restriction trichotomy, the coextension
//! lift, and the two flat-search strategies.
//!
//! Every operation here returns a self-contained witness that
//! [`crate::cert::validate_certificate`] can re-check using only rank and
//! closure primitives.

mod kelly2;
mod lift;
mod reid;
mod unavoidable;

pub use kelly2::{
    kelly2_trichotomy, restriction_trichotomy, restriction_trichotomy_within, AgChainWitness,
    DisconnectedWitness, LiftedFlatWitness, RestrictionOutcome, TrichotomyError,
    TrichotomyOutcome,
};
pub use lift::{
    extend_affine_to_flat, lift_affine, lift_affine_with, ExtendCertificate, ExtendOutcome,
    LiftBlocks, LiftCertificate, LiftError, LiftFailure, LiftOutcome,
};
pub use reid::{
    verify_reid1, verify_reid2, verify_reid_characteristic, Reid1Verdict, Reid2Report,
    ReidCertificate, ReidEdge, ReidHypothesisError, ReidOutcome,
};
pub use unavoidable::{
    find_affine_candidates_within, unavoidable_search, SearchStrategy, UnavoidableFound,
    UnavoidableOutcome,
};

use serde::{Deserialize, Serialize};

/// The parameter tuple driving the trichotomy and recursion engines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    pub p: u8,
    pub k: usize,
    pub t: usize,
    pub n: usize,
    /// Recursion depth budget; `None` means rank(M).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_budget: Option<usize>,
}

impl SearchParams {
    pub fn new(p: u8, k: usize, t: usize, n: usize) -> Self {
        Self { p, k, t, n, depth_budget: None }
    }
}
