//! Flat enumeration and classification.
//!
//! A rank-k flat is classified by the tags that apply to it:
//! `Independent` when it has exactly k elements, `ProjectiveGeometry` when
//! it has the maximum possible (p^k−1)/(p−1) pairwise-non-parallel
//! elements, and `AffineGeometry` when it has p^(k−1) pairwise-non-parallel
//! elements and some hyperplane of its span avoids it entirely. Tags are a
//! set, not a single label: over GF(2) a two-element rank-2 flat is both
//! independent and AG(1,2).

use crate::gf::{self, EchelonBasis, GfMat, GfVec};
use crate::matroid::Matroid;
use crate::subset::Subset;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlatError {
    #[error("subset is not a flat: closure adds elements {0}")]
    NotAFlat(String),
    #[error("matroid is not simple")]
    NotSimple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FlatClass {
    Independent,
    AffineGeometry,
    ProjectiveGeometry,
}

impl std::fmt::Display for FlatClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FlatClass::Independent => "independent",
            FlatClass::AffineGeometry => "affine-geometry",
            FlatClass::ProjectiveGeometry => "projective-geometry",
        };
        f.write_str(s)
    }
}

/// A flat with its cached rank.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Flat {
    pub elements: Subset,
    pub rank: usize,
}

impl Flat {
    /// Wraps a set after checking it is closed.
    pub fn new(m: &Matroid, elements: Subset) -> Result<Flat, FlatError> {
        let cl = m.closure(&elements);
        if cl != elements {
            return Err(FlatError::NotAFlat(cl.difference(&elements).to_string()));
        }
        let rank = m.rank_of(&elements);
        Ok(Flat { elements, rank })
    }

    /// The closure of an arbitrary set, as a flat.
    pub fn closure_of(m: &Matroid, s: &Subset) -> Flat {
        let elements = m.closure(s);
        let rank = m.rank_of(&elements);
        Flat { elements, rank }
    }
}

/// The tag set applying to a flat; empty means "neither".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub tags: std::collections::BTreeSet<FlatClass>,
    /// For `AffineGeometry`: an ambient functional nonzero on every
    /// element of the flat (its kernel cuts the avoiding hyperplane).
    pub affine_witness: Option<GfVec>,
}

impl Classification {
    pub fn qualifies(&self) -> bool {
        !self.tags.is_empty()
    }
}

/// p^e with overflow capping (anything past u64 cannot match a set size).
fn pow_capped(p: u8, e: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(p as u64)?;
        if acc > (1 << 40) {
            return None;
        }
    }
    Some(acc)
}

/// Number of points of PG(k−1, p): (p^k − 1)/(p − 1).
pub fn pg_point_count(p: u8, k: usize) -> Option<u64> {
    pow_capped(p, k).map(|x| (x - 1) / (p as u64 - 1))
}

/// Number of points of AG(k−1, p): p^(k−1). `None` for k = 0 or overflow.
pub fn affine_point_count(p: u8, k: usize) -> Option<u64> {
    if k == 0 {
        return None;
    }
    pow_capped(p, k - 1)
}

/// Classifies a flat of `m`; errors when the input is not a flat.
pub fn classify_flat(m: &Matroid, flat: &Flat) -> Result<Classification, FlatError> {
    let cl = m.closure(&flat.elements);
    if cl != flat.elements {
        return Err(FlatError::NotAFlat(cl.difference(&flat.elements).to_string()));
    }
    let k = flat.rank;
    let count = flat.elements.len() as u64;
    let mut tags = std::collections::BTreeSet::new();
    let mut affine_witness = None;
    if count == k as u64 {
        tags.insert(FlatClass::Independent);
    }
    // Geometry tags require a simple restriction: no loops, no parallels.
    let simple_inside = flat.elements.iter().all(|e| !m.is_loop(e))
        && m.point_count(&flat.elements) == flat.elements.len();
    if k >= 1 && simple_inside {
        if pg_point_count(m.p(), k) == Some(count) {
            tags.insert(FlatClass::ProjectiveGeometry);
        }
        if pow_capped(m.p(), k - 1) == Some(count) {
            if let Some(w) = avoiding_hyperplane(m, &flat.elements) {
                tags.insert(FlatClass::AffineGeometry);
                affine_witness = Some(w);
            }
        }
    }
    Ok(Classification { tags, affine_witness })
}

/// Searches (in lexicographic order of span-coordinate functionals) for an
/// ambient functional nonzero on every element of `s`. Its kernel meets
/// span(s) in a hyperplane of span(s) avoiding `s`.
pub fn avoiding_hyperplane(m: &Matroid, s: &Subset) -> Option<GfVec> {
    let basis_idx = m.greedy_basis(s);
    let k = basis_idx.len();
    if k == 0 {
        return None;
    }
    let lifter = FunctionalLifter::new(m, &basis_idx);
    for psi in gf::hyperplanes_of(k, m.p()).ok()? {
        let f = lifter.lift(&psi);
        if s.iter().all(|e| {
            f.dot(m.field(), m.vector(e)).map(|d| d != 0).unwrap_or(false)
        }) {
            return Some(f);
        }
    }
    None
}

/// Lifts functionals on span-coordinates (w.r.t. a fixed basis of element
/// vectors) to ambient row functionals: finds P with P·B = I and maps
/// ψ ↦ ψᵀP.
pub struct FunctionalLifter<'a> {
    m: &'a Matroid,
    /// k×ambient matrix P with P·B = I.
    p_mat: GfMat,
}

impl<'a> FunctionalLifter<'a> {
    pub fn new(m: &'a Matroid, basis_idx: &[usize]) -> Self {
        let k = basis_idx.len();
        let dim = m.ambient_dim();
        // Solve Bᵀ·y_i = u_i for each unit functional u_i; rows of P are y_i.
        let bt_cols: Vec<GfVec> = (0..dim)
            .map(|j| {
                GfVec::new(m.p(), basis_idx.iter().map(|&e| m.vector(e).coords()[j]).collect())
                    .expect("residues")
            })
            .collect();
        let bt = GfMat::from_cols(m.p(), k, &bt_cols).expect("shape");
        let mut p_mat = GfMat::zeros(m.p(), k, dim).expect("shape");
        for i in 0..k {
            let mut unit = vec![0u8; k];
            unit[i] = 1;
            let u = GfVec::new(m.p(), unit).expect("unit");
            let y = gf::in_span(&bt, &u)
                .expect("shape")
                .expect("basis has full row rank");
            for j in 0..dim {
                p_mat.set(i, j, y.coords()[j]);
            }
        }
        Self { m, p_mat }
    }

    pub fn lift(&self, psi: &GfVec) -> GfVec {
        let k = self.p_mat.rows();
        let dim = self.p_mat.cols();
        debug_assert_eq!(psi.dim(), k);
        let field = self.m.field();
        let mut coords = vec![0u8; dim];
        for (j, slot) in coords.iter_mut().enumerate() {
            let mut acc = 0u8;
            for i in 0..k {
                acc = field.add(acc, field.mul(psi.coords()[i], self.p_mat.get(i, j)));
            }
            *slot = acc;
        }
        GfVec::new(self.m.p(), coords).expect("residues")
    }
}

/// Streams every rank-k flat of `m` exactly once, in lexicographic order
/// of element sets (equivalently, of minimum generating independent
/// k-sets; the two orders coincide for equal-rank flats).
pub fn enumerate_flats<'a>(m: &'a Matroid, k: usize) -> FlatEnumerator<'a> {
    let scope = m.ground_set();
    enumerate_flats_within(m, &scope, k)
}

/// Same, restricted to flats of M|scope (sets of the form closure ∩ scope).
/// When `scope` is a flat of `m`, these are exactly the flats of `m`
/// contained in it.
///
/// The generic path extends independent sets with an incremental echelon
/// basis; at k = rank and k = rank−1 it switches to the span itself and to
/// hyperplane kernels, which stay cheap when single flats have huge
/// generating families.
pub fn enumerate_flats_within<'a>(m: &'a Matroid, scope: &Subset, k: usize) -> FlatEnumerator<'a> {
    let state = if k == 0 {
        EnumState::Rank0 { done: false }
    } else {
        let scope_rank = m.rank_of(scope);
        if k > scope_rank {
            EnumState::Exhausted
        } else if k == scope_rank {
            EnumState::Single { done: false }
        } else if k + 1 == scope_rank {
            EnumState::Listed(hyperplane_flats(m, scope, k).into_iter())
        } else {
            EnumState::Dfs {
                stack: vec![Frame {
                    chosen: Vec::new(),
                    basis: EchelonBasis::new(m.field(), m.ambient_dim()),
                    next: 0,
                }],
            }
        }
    };
    FlatEnumerator { m, scope: scope.clone(), k, state }
}

/// Rank-(r−1) flats of M|scope as kernel traces of the canonical
/// functionals on span(scope), deduplicated and sorted.
fn hyperplane_flats(m: &Matroid, scope: &Subset, k: usize) -> Vec<Flat> {
    let basis_idx = m.greedy_basis(scope);
    let lifter = FunctionalLifter::new(m, &basis_idx);
    let mut seen = std::collections::BTreeSet::new();
    if let Ok(functionals) = gf::hyperplanes_of(basis_idx.len(), m.p()) {
        for psi in functionals {
            let f = lifter.lift(&psi);
            let mut trace = Subset::empty(m.size());
            for e in scope.iter() {
                if f.dot(m.field(), m.vector(e)).map(|d| d == 0).unwrap_or(false) {
                    trace.insert(e);
                }
            }
            if m.rank_of(&trace) == k {
                seen.insert(trace);
            }
        }
    }
    seen.into_iter().map(|elements| Flat { elements, rank: k }).collect()
}

struct Frame {
    chosen: Vec<usize>,
    basis: EchelonBasis,
    next: usize,
}

enum EnumState {
    Rank0 { done: bool },
    Single { done: bool },
    Listed(std::vec::IntoIter<Flat>),
    Dfs { stack: Vec<Frame> },
    Exhausted,
}

pub struct FlatEnumerator<'a> {
    m: &'a Matroid,
    scope: Subset,
    k: usize,
    state: EnumState,
}

impl Iterator for FlatEnumerator<'_> {
    type Item = Flat;

    fn next(&mut self) -> Option<Flat> {
        let n = self.m.size();
        match &mut self.state {
            EnumState::Exhausted => None,
            EnumState::Rank0 { done } => {
                if *done {
                    return None;
                }
                *done = true;
                let f = self.m.closure(&Subset::empty(n)).intersection(&self.scope);
                Some(Flat { elements: f, rank: 0 })
            }
            EnumState::Single { done } => {
                if *done {
                    return None;
                }
                *done = true;
                Some(Flat { elements: self.scope.clone(), rank: self.k })
            }
            EnumState::Listed(iter) => iter.next(),
            EnumState::Dfs { stack } => loop {
                let frame = stack.last_mut()?;
                if frame.next >= n {
                    stack.pop();
                    continue;
                }
                let e = frame.next;
                frame.next += 1;
                if !self.scope.contains(e) || self.m.is_loop(e) {
                    continue;
                }
                if frame.basis.contains_vec(self.m.vector(e)) {
                    continue;
                }
                let mut basis2 = frame.basis.clone();
                basis2.insert_vec(self.m.vector(e));
                let mut chosen2 = frame.chosen.clone();
                chosen2.push(e);
                if chosen2.len() == self.k {
                    let flat = {
                        let mut out = Subset::empty(n);
                        for el in self.scope.iter() {
                            if basis2.contains_vec(self.m.vector(el)) {
                                out.insert(el);
                            }
                        }
                        out
                    };
                    // emit each flat only at its lexicographically least
                    // independent generating k-set (scope elements only)
                    if self.m.greedy_basis(&flat.intersection(&self.scope)) == chosen2 {
                        return Some(Flat { elements: flat, rank: self.k });
                    }
                } else {
                    stack.push(Frame { chosen: chosen2, basis: basis2, next: e + 1 });
                }
            },
        }
    }
}

/// Outcome of the two-point-line search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwoPointLineOutcome {
    Found(Flat),
    /// No two-point line; the full line-size histogram as evidence.
    None { histogram: BTreeMap<usize, usize> },
}

/// First (lexicographic) rank-2 flat with exactly two elements, or an
/// explicit "none" carrying the line-size histogram.
pub fn find_two_point_line(m: &Matroid) -> Result<TwoPointLineOutcome, FlatError> {
    if !m.is_simple() {
        return Err(FlatError::NotSimple);
    }
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for line in enumerate_flats(m, 2) {
        if line.elements.len() == 2 {
            return Ok(TwoPointLineOutcome::Found(line));
        }
        *histogram.entry(line.elements.len()).or_insert(0) += 1;
    }
    Ok(TwoPointLineOutcome::None { histogram })
}

/// Witness that `M|S ≅ AG(k−1, p)`: the span basis used and the ambient
/// functional whose kernel is the avoided hyperplane.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineWitness {
    pub rank: usize,
    pub functional: GfVec,
}

/// Recognizes affine-geometry restrictions: succeeds iff the elements of
/// `s` are pairwise non-parallel non-loops, |s| = p^(k−1) for k = rank(s),
/// and some hyperplane of span(s) contains none of them.
pub fn is_affine_restriction(m: &Matroid, s: &Subset) -> Option<AffineWitness> {
    if s.is_empty() {
        return None;
    }
    if s.iter().any(|e| m.is_loop(e)) {
        return None;
    }
    if m.point_count(s) != s.len() {
        return None;
    }
    let k = m.rank_of(s);
    if pow_capped(m.p(), k - 1) != Some(s.len() as u64) {
        return None;
    }
    avoiding_hyperplane(m, s).map(|functional| AffineWitness { rank: k, functional })
}

/// Gaussian binomial [n choose k]_p: the number of k-dim subspaces of an
/// n-dim space over GF(p).
pub fn gaussian_binomial(n: usize, k: usize, p: u8) -> u64 {
    if k > n {
        return 0;
    }
    let p = p as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= p.pow((n - i) as u32) - 1;
        den *= p.pow((k - i) as u32) - 1;
    }
    (num / den) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_catalog, CatalogSpec};

    fn pg(n: usize, p: u8) -> Matroid {
        build_catalog(&CatalogSpec::Pg { n, p }).unwrap()
    }

    fn ag(n: usize, p: u8) -> Matroid {
        build_catalog(&CatalogSpec::Ag { n, p }).unwrap()
    }

    #[test]
    fn fano_has_seven_lines() {
        let m = pg(2, 2);
        let lines: Vec<Flat> = enumerate_flats(&m, 2).collect();
        assert_eq!(lines.len(), 7);
        assert!(lines.iter().all(|l| l.elements.len() == 3));
    }

    #[test]
    fn pg32_has_35_lines() {
        let m = pg(3, 2);
        assert_eq!(enumerate_flats(&m, 2).count(), 35);
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
    }

    #[test]
    fn free_matroid_flats_are_subsets() {
        let m = build_catalog(&CatalogSpec::Free { r: 4, p: 2 }).unwrap();
        assert_eq!(enumerate_flats(&m, 2).count(), 6);
    }

    #[test]
    fn enumeration_matches_brute_force_closures() {
        // oracle: closures of all k-subsets, deduplicated
        for (spec, kmax) in [("pg:2,2", 3), ("ag:2,3", 3), ("reid:2", 3), ("free:3,3", 3)] {
            let m = build_catalog(&spec.parse::<CatalogSpec>().unwrap()).unwrap();
            for k in 0..=kmax {
                let mut oracle = std::collections::BTreeSet::new();
                let n = m.size();
                for mask in 0u64..(1 << n) {
                    let s = Subset::from_mask(n, mask);
                    if s.len() == k && m.rank_of(&s) == k && m.is_independent(&s) {
                        oracle.insert(m.closure(&s));
                    }
                    if k == 0 && mask == 0 {
                        oracle.insert(m.closure(&s));
                    }
                }
                let got: Vec<Flat> = enumerate_flats(&m, k).collect();
                let got_sets: std::collections::BTreeSet<Subset> =
                    got.iter().map(|f| f.elements.clone()).collect();
                assert_eq!(got_sets.len(), got.len(), "duplicates for {spec} k={k}");
                assert_eq!(got_sets, oracle, "{spec} k={k}");
            }
        }
    }

    #[test]
    fn classify_fano_plane() {
        let m = pg(2, 2);
        let f = Flat::new(&m, m.ground_set()).unwrap();
        let c = classify_flat(&m, &f).unwrap();
        assert_eq!(
            c.tags.into_iter().collect::<Vec<_>>(),
            vec![FlatClass::ProjectiveGeometry]
        );
    }

    #[test]
    fn classify_ag23_whole() {
        let m = ag(2, 3);
        let f = Flat::new(&m, m.ground_set()).unwrap();
        let c = classify_flat(&m, &f).unwrap();
        assert!(c.tags.contains(&FlatClass::AffineGeometry));
        assert!(!c.tags.contains(&FlatClass::ProjectiveGeometry));
        assert!(!c.tags.contains(&FlatClass::Independent));
        let w = c.affine_witness.unwrap();
        for e in 0..m.size() {
            assert_ne!(w.dot(m.field(), m.vector(e)).unwrap(), 0);
        }
    }

    #[test]
    fn two_element_rank2_flat_over_gf2_is_independent_and_affine() {
        let m = build_catalog(&"sum:pg:1,2+pg:1,2".parse::<CatalogSpec>().unwrap()).unwrap();
        let f = Flat::new(&m, Subset::from_indices(6, &[0, 3])).unwrap();
        assert_eq!(f.rank, 2);
        let c = classify_flat(&m, &f).unwrap();
        assert!(c.tags.contains(&FlatClass::Independent));
        assert!(c.tags.contains(&FlatClass::AffineGeometry));
        assert!(!c.tags.contains(&FlatClass::ProjectiveGeometry));
    }

    #[test]
    fn classify_rejects_non_flat() {
        let m = pg(2, 2);
        let fake = Flat { elements: Subset::from_indices(7, &[0, 1]), rank: 2 };
        assert!(classify_flat(&m, &fake).is_err());
    }

    #[test]
    fn single_point_is_independent_and_ag0() {
        let m = pg(2, 3);
        let f = Flat::new(&m, Subset::from_indices(m.size(), &[0])).unwrap();
        let c = classify_flat(&m, &f).unwrap();
        assert!(c.tags.contains(&FlatClass::Independent));
        assert!(c.tags.contains(&FlatClass::AffineGeometry));
        assert!(c.tags.contains(&FlatClass::ProjectiveGeometry)); // PG(0,p) is a single point
    }

    #[test]
    fn fano_has_no_two_point_line() {
        match find_two_point_line(&pg(2, 2)).unwrap() {
            TwoPointLineOutcome::None { histogram } => {
                assert_eq!(histogram.get(&3), Some(&7));
                assert_eq!(histogram.len(), 1);
            }
            other => panic!("expected none, got {other:?}"),
        }
    }

    #[test]
    fn free_matroid_two_point_line() {
        let m = build_catalog(&CatalogSpec::Free { r: 3, p: 2 }).unwrap();
        match find_two_point_line(&m).unwrap() {
            TwoPointLineOutcome::Found(f) => assert_eq!(f.elements.indices(), vec![0, 1]),
            other => panic!("expected a two-point line, got {other:?}"),
        }
    }

    #[test]
    fn textbook_ag22_recognition() {
        // the 4 columns of GF(2)^3 with last coordinate 1
        let vecs = vec![
            GfVec::new(2, vec![0, 0, 1]).unwrap(),
            GfVec::new(2, vec![0, 1, 1]).unwrap(),
            GfVec::new(2, vec![1, 0, 1]).unwrap(),
            GfVec::new(2, vec![1, 1, 1]).unwrap(),
        ];
        let m = Matroid::new(2, 3, vecs).unwrap();
        let w = is_affine_restriction(&m, &m.ground_set()).unwrap();
        assert_eq!(w.rank, 3);
        assert_eq!(w.functional.coords(), &[0, 0, 1]);
    }

    #[test]
    fn full_line_is_not_affine() {
        let m = pg(1, 2);
        assert!(is_affine_restriction(&m, &m.ground_set()).is_none());
    }

    #[test]
    fn affine_witness_reruns_identically() {
        let m = ag(2, 3);
        let w1 = is_affine_restriction(&m, &m.ground_set()).unwrap();
        let w2 = is_affine_restriction(&m, &m.ground_set()).unwrap();
        assert_eq!(w1, w2);
    }

    #[test]
    fn pg_flat_counts_match_gaussian_binomials() {
        for (n, p) in [(2usize, 2u8), (3, 2), (2, 3)] {
            let m = pg(n, p);
            for k in 0..=(n + 1) {
                let expect = gaussian_binomial(n + 1, k, p);
                let got = enumerate_flats(&m, k).count() as u64;
                assert_eq!(got, expect, "pg({n},{p}) rank-{k} flats");
            }
        }
    }

    #[test]
    fn every_pg_line_is_full() {
        for (n, p) in [(2usize, 2u8), (3, 2), (2, 3)] {
            let m = pg(n, p);
            for line in enumerate_flats(&m, 2) {
                assert_eq!(line.elements.len(), p as usize + 1);
            }
        }
    }

    #[test]
    fn every_ag_line_has_p_points() {
        for (n, p) in [(2usize, 2u8), (3, 2), (2, 3)] {
            let m = ag(n, p);
            for line in enumerate_flats(&m, 2) {
                assert_eq!(line.elements.len(), p as usize);
            }
        }
    }

    #[test]
    fn ag_lines_through_count() {
        for (n, p) in [(2usize, 3u8), (3, 2)] {
            let m = ag(n, p);
            let expect = ((p as u64).pow(n as u32) - 1) / (p as u64 - 1);
            for e in 0..m.size() {
                assert_eq!(m.lines_through(e).unwrap().len() as u64, expect, "ag({n},{p}) e={e}");
            }
        }
    }

    #[test]
    fn enumerate_within_scope_matches_restriction() {
        let m = pg(3, 2);
        // scope = a plane (rank-3 flat)
        let plane = enumerate_flats(&m, 3).next().unwrap();
        let within: Vec<Flat> = enumerate_flats_within(&m, &plane.elements, 2).collect();
        assert_eq!(within.len(), 7);
        for f in &within {
            assert!(f.elements.is_subset_of(&plane.elements));
            assert!(m.is_flat(&f.elements));
        }
    }
}
