//! The two trichotomy engines.
//!
//! [`kelly2_trichotomy`] runs the proof construction for the three-way
//! outcome (affine restriction / all minor flats enlarged / disconnected
//! flat), emitting per-branch witnesses. [`restriction_trichotomy`] is the
//! search form: an affine restriction, or a rank-t flat that is small or
//! disconnected, or an explicit exhaustion transcript.

use super::SearchParams;
use crate::flats::{
    enumerate_flats, enumerate_flats_within, is_affine_restriction, AffineWitness,
};
use crate::matroid::Matroid;
use crate::subset::Subset;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrichotomyError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("rank {rank} below required {needed}")]
    RankTooLow { rank: usize, needed: usize },
    #[error("precondition fails: rank-{t} flat {flat:?} has {points} < {needed} points")]
    Precondition { t: usize, flat: Vec<usize>, points: usize, needed: usize },
    #[error("no outcome found after scanning {contracts_tried} contraction flats")]
    Exhausted { contracts_tried: usize },
}

/// Witness for the affine-restriction branch: the contraction flat, the
/// chain of closures minus the flat, and the affine recognition of the
/// final stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgChainWitness {
    pub params: SearchParams,
    /// The rank-(k−1) flat C the chain is built over.
    pub contracted_flat: Vec<usize>,
    /// Basis e_1..e_{k−1} of C used by the chain.
    pub basis: Vec<usize>,
    /// The element f outside C the chain starts from.
    pub outside: usize,
    /// S_i = closure({f, e_1..e_i}) ∖ C for i = 1..k−1.
    pub chain: Vec<Vec<usize>>,
    pub witness: AffineWitness,
}

impl AgChainWitness {
    pub fn restriction(&self) -> &[usize] {
        self.chain.last().expect("nonempty chain")
    }
}

/// Witness for the enlarged-minor branch: every rank-t flat of M/C has at
/// least n+1 points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedFlatWitness {
    pub params: SearchParams,
    pub flat: Vec<usize>,
    pub min_points: usize,
    pub flats_checked: usize,
}

/// Witness for the disconnected branch: a rank-t flat (of M, or of M/C
/// when `contracted` is nonempty) whose restriction splits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisconnectedWitness {
    pub params: SearchParams,
    pub contracted: Vec<usize>,
    pub flat: Vec<usize>,
    pub components: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrichotomyOutcome {
    AgRestriction(AgChainWitness),
    LiftedFlat(LiftedFlatWitness),
    Disconnected(DisconnectedWitness),
}

fn validate_params(m: &Matroid, params: &SearchParams) -> Result<(), TrichotomyError> {
    if params.p != m.p() {
        return Err(TrichotomyError::BadParams(format!(
            "params are for GF({}) but matroid is over GF({})",
            params.p,
            m.p()
        )));
    }
    if params.k < 2 || params.t < 2 || params.n < params.t {
        return Err(TrichotomyError::BadParams(format!(
            "need k >= 2 and n >= t >= 2, got k={} t={} n={}",
            params.k, params.t, params.n
        )));
    }
    Ok(())
}

/// The proof-guided three-way outcome.
///
/// First scans the rank-t flats of M itself: a disconnected one is the
/// disconnected branch outright; a connected one with fewer than n points
/// is a precondition failure. Then iterates rank-(k−1) flats C in
/// lexicographic order: if every rank-t flat of M/C has at least n+1
/// points the enlarged-minor branch holds; if one is disconnected that is
/// the disconnected branch; otherwise the chain construction is attempted
/// on C (all lines from C to the outside must have p+1 points, then
/// |S_{i+1}| = p·|S_i| is verified stage by stage).
pub fn kelly2_trichotomy(
    m: &Matroid,
    params: &SearchParams,
) -> Result<TrichotomyOutcome, TrichotomyError> {
    validate_params(m, params)?;
    let (k, t, n) = (params.k, params.t, params.n);
    let needed = t + k - 1;
    if m.rank() < needed {
        return Err(TrichotomyError::RankTooLow { rank: m.rank(), needed });
    }
    // Outcome (disconnected) scan and precondition verification in one pass.
    for f in enumerate_flats(m, t) {
        let comps = m.components_within(&f.elements);
        if comps.len() > 1 {
            return Ok(TrichotomyOutcome::Disconnected(DisconnectedWitness {
                params: params.clone(),
                contracted: Vec::new(),
                flat: f.elements.indices(),
                components: comps.iter().map(|c| c.indices()).collect(),
            }));
        }
        let points = m.point_count(&f.elements);
        if points < n {
            return Err(TrichotomyError::Precondition {
                t,
                flat: f.elements.indices(),
                points,
                needed: n,
            });
        }
    }
    let mut contracts_tried = 0usize;
    for c in enumerate_flats(m, k - 1) {
        contracts_tried += 1;
        let (minor, map) = m.contract_mapped(&c.elements).expect("flat within ground set");
        let mut min_points = usize::MAX;
        let mut flats_checked = 0usize;
        let mut disconnected: Option<(Subset, Vec<Subset>)> = None;
        for g in enumerate_flats(&minor, t) {
            flats_checked += 1;
            min_points = min_points.min(minor.point_count(&g.elements));
            if disconnected.is_none() {
                let comps = minor.components_within(&g.elements);
                if comps.len() > 1 {
                    disconnected = Some((g.elements.clone(), comps));
                }
            }
        }
        if flats_checked > 0 && min_points >= n + 1 {
            return Ok(TrichotomyOutcome::LiftedFlat(LiftedFlatWitness {
                params: params.clone(),
                flat: c.elements.indices(),
                min_points,
                flats_checked,
            }));
        }
        if let Some((g, comps)) = disconnected {
            let lift = |s: &Subset| -> Vec<usize> { s.iter().map(|i| map[i]).collect() };
            return Ok(TrichotomyOutcome::Disconnected(DisconnectedWitness {
                params: params.clone(),
                contracted: c.elements.indices(),
                flat: lift(&g),
                components: comps.iter().map(|c| lift(c)).collect(),
            }));
        }
        if let Some(w) = attempt_chain(m, &c.elements, params) {
            return Ok(TrichotomyOutcome::AgRestriction(w));
        }
    }
    Err(TrichotomyError::Exhausted { contracts_tried })
}

/// The S_i chain construction over a fixed rank-(k−1) flat C. Returns
/// None when any line from C to the outside is short or a stage size is
/// off; the caller then moves to the next C.
fn attempt_chain(m: &Matroid, c: &Subset, params: &SearchParams) -> Option<AgChainWitness> {
    let p = m.p() as usize;
    let k = params.k;
    let basis = m.greedy_basis(c);
    if basis.len() != k - 1 {
        return None;
    }
    let outside = (0..m.size()).find(|&e| !c.contains(e) && !m.is_loop(e))?;
    // the claim: every line from a point of C to a point outside is full
    for e in c.iter() {
        if m.is_loop(e) {
            continue;
        }
        for x in 0..m.size() {
            if c.contains(x) || m.is_loop(x) {
                continue;
            }
            let line = m.closure(&Subset::from_indices(m.size(), &[e, x]));
            if m.point_count(&line) != p + 1 {
                return None;
            }
        }
    }
    let mut chain: Vec<Vec<usize>> = Vec::with_capacity(k - 1);
    let mut prev_size = 1usize;
    for i in 1..k {
        let mut gen = Subset::from_indices(m.size(), &[outside]);
        for &b in &basis[..i] {
            gen.insert(b);
        }
        let s_i = m.closure(&gen).difference(c);
        let expect = prev_size * p;
        if s_i.len() != expect {
            return None;
        }
        prev_size = expect;
        chain.push(s_i.indices());
    }
    let last = Subset::from_indices(m.size(), chain.last().expect("k >= 2"));
    let witness = is_affine_restriction(m, &last)?;
    Some(AgChainWitness {
        params: params.clone(),
        contracted_flat: c.indices(),
        basis,
        outside,
        chain,
        witness,
    })
}

/// Outcome of the search form: an affine restriction, a flat witness
/// (small and/or disconnected), or an explicit exhaustion transcript.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RestrictionOutcome {
    AgRestriction {
        params: SearchParams,
        elements: Vec<usize>,
        witness: AffineWitness,
    },
    FlatWitness {
        params: SearchParams,
        flat: Vec<usize>,
        rank: usize,
        point_count: usize,
        components: Vec<Vec<usize>>,
        small: bool,
        disconnected: bool,
    },
    Exhausted {
        params: SearchParams,
        flats_scanned: usize,
        ag_candidates: usize,
    },
}

/// Search form of the trichotomy on the whole ground set.
pub fn restriction_trichotomy(
    m: &Matroid,
    params: &SearchParams,
) -> Result<RestrictionOutcome, TrichotomyError> {
    restriction_trichotomy_within(m, &m.ground_set(), params)
}

/// Search form within a scope (a flat of `m`, or the ground set): first a
/// lexicographic scan of rank-t flats for one that is disconnected or has
/// at most n points, then a scan for a rank-k affine restriction, then an
/// exhaustion transcript.
pub fn restriction_trichotomy_within(
    m: &Matroid,
    scope: &Subset,
    params: &SearchParams,
) -> Result<RestrictionOutcome, TrichotomyError> {
    if params.p != m.p() {
        return Err(TrichotomyError::BadParams(format!(
            "params are for GF({}) but matroid is over GF({})",
            params.p,
            m.p()
        )));
    }
    if params.k < 1 || params.t < 1 {
        return Err(TrichotomyError::BadParams("need k >= 1 and t >= 1".into()));
    }
    let (k, t, n) = (params.k, params.t, params.n);
    let mut flats_scanned = 0usize;
    for f in enumerate_flats_within(m, scope, t) {
        flats_scanned += 1;
        let comps = m.components_within(&f.elements);
        let points = m.point_count(&f.elements);
        let small = points <= n;
        let disconnected = comps.len() > 1;
        if small || disconnected {
            return Ok(RestrictionOutcome::FlatWitness {
                params: params.clone(),
                flat: f.elements.indices(),
                rank: t,
                point_count: points,
                components: comps.iter().map(|c| c.indices()).collect(),
                small,
                disconnected,
            });
        }
    }
    let (found, ag_candidates) = super::unavoidable::first_affine_restriction_within(m, scope, k);
    if let Some((set, witness)) = found {
        return Ok(RestrictionOutcome::AgRestriction {
            params: params.clone(),
            elements: set.indices(),
            witness,
        });
    }
    Ok(RestrictionOutcome::Exhausted { params: params.clone(), flats_scanned, ag_candidates })
}
