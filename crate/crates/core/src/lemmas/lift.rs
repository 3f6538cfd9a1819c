//! The coextension lift and the affine-to-flat extension.
//!
//! `lift_affine` realizes the block computation: change basis so an
//! independent set J carries an identity block, normalize the affine
//! block's first row to all-ones, color the affine elements by their
//! B-columns, and search the affine geometry for a monochromatic rank-k
//! flat. Zeroing B on such a flat exhibits it as an affine restriction of
//! the whole matroid.
//!
//! `extend_affine_to_flat` is the complementary step: given an affine
//! restriction, 2-color the virtual points at infinity of its span by
//! realization in the matroid and search for a monochromatic flat there;
//! joining it to one affine point yields a rank-k flat that is a full
//! affine or projective geometry.

use crate::flats::{
    classify_flat, enumerate_flats, enumerate_flats_within, is_affine_restriction, AffineWitness,
    Classification, Flat,
};
use crate::gf::{self, EchelonBasis, GfMat, GfVec};
use crate::matroid::{Matroid, MatroidError};
use crate::subset::Subset;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("the set J = {0:?} is dependent")]
    DependentSet(Vec<usize>),
    #[error("no affine-geometry restriction found in the contraction")]
    NoAffineRestriction,
    #[error("affine restriction has rank {ag_rank}, below the requested k = {k}")]
    AffineTooSmall { ag_rank: usize, k: usize },
    #[error("the supplied set is not an affine-geometry restriction")]
    NotAffine,
    #[error("internal re-check failed: {0}")]
    InternalCheckFailed(String),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

/// The block representation recorded in a lift certificate. Columns are
/// `element_order` = J ascending, then all non-J elements ascending; the
/// identity block over J is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftBlocks {
    pub element_order: Vec<usize>,
    /// |J| rows over the non-J columns.
    pub b_rows: Vec<Vec<u8>>,
    /// Remaining rows; the first row is all-ones on the affine part.
    pub d_rows: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftCertificate {
    pub j: Vec<usize>,
    pub k: usize,
    pub blocks: LiftBlocks,
    pub affine_part: Vec<usize>,
    /// element → its B-column, the color assigned to it.
    pub color_map: Vec<(usize, Vec<u8>)>,
    pub mono_flat: Vec<usize>,
    /// The affine restriction of M exhibited by the lift (same elements
    /// as `mono_flat`).
    pub result: Vec<usize>,
    pub final_witness: AffineWitness,
}

/// Explicit failure: the B-column coloring admits no monochromatic rank-k
/// flat at this scale. The coloring itself is the witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftFailure {
    pub j: Vec<usize>,
    pub k: usize,
    pub affine_part: Vec<usize>,
    pub color_map: Vec<(usize, Vec<u8>)>,
    pub color_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftOutcome {
    Lifted(LiftCertificate),
    NoMonochromaticFlat(LiftFailure),
}

/// Runs the lift, locating the affine restriction of M/J automatically
/// (the full set of non-loop contraction images).
pub fn lift_affine(m: &Matroid, j: &Subset, k: usize) -> Result<LiftOutcome, LiftError> {
    lift_affine_with(m, j, k, None)
}

/// Runs the lift with an explicitly supplied affine part (original element
/// indices, disjoint from J).
pub fn lift_affine_with(
    m: &Matroid,
    j: &Subset,
    k: usize,
    affine_part: Option<&Subset>,
) -> Result<LiftOutcome, LiftError> {
    if !m.is_independent(j) {
        return Err(LiftError::DependentSet(j.indices()));
    }
    let p = m.p();
    let field = m.field().clone();
    let r = m.ambient_dim();
    let m_sz = j.len();
    let j_idx = j.indices();
    // Invertible E = [J columns | completion units]; T = E^{-1} maps the J
    // columns to the first m unit vectors.
    let mut ext_cols: Vec<GfVec> = j_idx.iter().map(|&e| m.vector(e).clone()).collect();
    {
        let mut basis = EchelonBasis::new(&field, r);
        for v in &ext_cols {
            basis_insert(&mut basis, v);
        }
        for i in 0..r {
            let mut coords = vec![0u8; r];
            coords[i] = 1;
            let unit = GfVec::new(p, coords).expect("unit");
            if basis_insert(&mut basis, &unit) {
                ext_cols.push(unit);
            }
        }
    }
    let e_mat = GfMat::from_cols(p, r, &ext_cols).map_err(MatroidError::from)?;
    let t_mat = invert(&e_mat).ok_or_else(|| {
        LiftError::InternalCheckFailed("basis completion is singular".into())
    })?;
    let non_j: Vec<usize> = (0..m.size()).filter(|&e| !j.contains(e)).collect();
    let s_dim = r - m_sz;
    let mut b_cols: Vec<Vec<u8>> = Vec::with_capacity(non_j.len());
    let mut d_cols: Vec<Vec<u8>> = Vec::with_capacity(non_j.len());
    for &e in &non_j {
        let y = t_mat.mul_vec(m.vector(e)).map_err(MatroidError::from)?;
        b_cols.push(y.coords()[..m_sz].to_vec());
        d_cols.push(y.coords()[m_sz..].to_vec());
    }
    // The D block represents M/J.
    let d_vecs: Vec<GfVec> = d_cols
        .iter()
        .map(|c| GfVec::new(p, c.clone()).expect("residues"))
        .collect();
    let minor = Matroid::new(p, s_dim, d_vecs)?;
    let pos_of: std::collections::HashMap<usize, usize> =
        non_j.iter().enumerate().map(|(pos, &e)| (e, pos)).collect();
    let a_minor: Subset = match affine_part {
        Some(a) => {
            let mut s = Subset::empty(minor.size());
            for e in a.iter() {
                let &pos = pos_of.get(&e).ok_or(LiftError::NotAffine)?;
                s.insert(pos);
            }
            s
        }
        None => {
            let mut s = Subset::empty(minor.size());
            for pos in 0..minor.size() {
                if !minor.is_loop(pos) {
                    s.insert(pos);
                }
            }
            s
        }
    };
    let w = is_affine_restriction(&minor, &a_minor).ok_or(LiftError::NoAffineRestriction)?;
    if w.rank < k {
        return Err(LiftError::AffineTooSmall { ag_rank: w.rank, k });
    }
    // Normalize: an invertible U with first row the avoiding functional,
    // then column scalings making D's first row all-ones on the affine part.
    let u_mat = complete_to_invertible(&field, &w.functional)
        .ok_or_else(|| LiftError::InternalCheckFailed("functional is zero".into()))?;
    for (pos, d) in d_cols.iter_mut().enumerate() {
        let dv = GfVec::new(p, d.clone()).expect("residues");
        *d = u_mat.mul_vec(&dv).map_err(MatroidError::from)?.coords().to_vec();
        if a_minor.contains(pos) {
            let lead = d[0];
            debug_assert_ne!(lead, 0);
            let inv = field.inv(lead);
            for c in d.iter_mut() {
                *c = field.mul(*c, inv);
            }
            for c in b_cols[pos].iter_mut() {
                *c = field.mul(*c, inv);
            }
        }
    }
    let color_map: Vec<(usize, Vec<u8>)> =
        a_minor.iter().map(|pos| (non_j[pos], b_cols[pos].clone())).collect();
    let color_count = {
        let mut set: std::collections::BTreeSet<&Vec<u8>> = Default::default();
        for (_, c) in &color_map {
            set.insert(c);
        }
        set.len()
    };
    let color_of = |pos: usize| -> &Vec<u8> { &b_cols[pos] };
    let mono = enumerate_flats_within(&minor, &a_minor, k).find(|f| {
        let mut it = f.elements.iter();
        match it.next() {
            None => true,
            Some(first) => {
                let c0 = color_of(first);
                it.all(|e| color_of(e) == c0)
            }
        }
    });
    let blocks = LiftBlocks {
        element_order: j_idx.iter().copied().chain(non_j.iter().copied()).collect(),
        b_rows: transpose_cols(&b_cols, m_sz),
        d_rows: transpose_cols(&d_cols, s_dim),
    };
    match mono {
        Some(f) => {
            let result: Vec<usize> = f.elements.iter().map(|pos| non_j[pos]).collect();
            let result_set = Subset::from_indices(m.size(), &result);
            let final_witness = is_affine_restriction(m, &result_set).ok_or_else(|| {
                LiftError::InternalCheckFailed(
                    "lifted flat failed affine recognition in M".into(),
                )
            })?;
            Ok(LiftOutcome::Lifted(LiftCertificate {
                j: j_idx,
                k,
                blocks,
                affine_part: a_minor.iter().map(|pos| non_j[pos]).collect(),
                color_map,
                mono_flat: result.clone(),
                result,
                final_witness,
            }))
        }
        None => Ok(LiftOutcome::NoMonochromaticFlat(LiftFailure {
            j: j_idx,
            k,
            affine_part: a_minor.iter().map(|pos| non_j[pos]).collect(),
            color_map,
            color_count,
        })),
    }
}

fn basis_insert(basis: &mut EchelonBasis, v: &GfVec) -> bool {
    match basis {
        EchelonBasis::Bits { .. } => {
            let mut w = 0u64;
            for (i, &c) in v.coords().iter().enumerate() {
                if c != 0 {
                    w |= 1 << i;
                }
            }
            basis.insert_bits(w)
        }
        EchelonBasis::Bytes { .. } => basis.insert_bytes(v.coords()),
    }
}

/// Inverse of a square matrix, if it exists.
fn invert(m: &GfMat) -> Option<GfMat> {
    let n = m.rows();
    if m.cols() != n {
        return None;
    }
    let mut aug = GfMat::zeros(m.p(), n, 2 * n).ok()?;
    for i in 0..n {
        for jj in 0..n {
            aug.set(i, jj, m.get(i, jj));
        }
        aug.set(i, n + i, 1);
    }
    let out = aug.rref();
    if out.pivots.len() < n || out.pivots[n - 1] != n - 1 {
        return None;
    }
    let mut inv = GfMat::zeros(m.p(), n, n).ok()?;
    for i in 0..n {
        for jj in 0..n {
            inv.set(i, jj, out.matrix.get(i, n + jj));
        }
    }
    Some(inv)
}

/// An invertible matrix whose first row is the given nonzero functional.
fn complete_to_invertible(field: &gf::PrimeField, first_row: &GfVec) -> Option<GfMat> {
    let dim = first_row.dim();
    if first_row.is_zero() {
        return None;
    }
    let mut rows = vec![first_row.clone()];
    let mut basis = EchelonBasis::new(field, dim);
    basis_insert(&mut basis, first_row);
    for i in 0..dim {
        let mut coords = vec![0u8; dim];
        coords[i] = 1;
        let unit = GfVec::new(field.p(), coords).expect("unit");
        if basis_insert(&mut basis, &unit) {
            rows.push(unit);
        }
    }
    GfMat::from_rows(field.p(), dim, &rows).ok()
}

fn transpose_cols(cols: &[Vec<u8>], rows: usize) -> Vec<Vec<u8>> {
    (0..rows).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

/// Certificate for a successful extension of an affine restriction to an
/// unavoidable rank-k flat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendCertificate {
    pub affine_part: Vec<usize>,
    pub k: usize,
    pub ag_witness: AffineWitness,
    /// Canonical virtual points of span(A) on the hyperplane at infinity.
    pub infinity_points: Vec<GfVec>,
    /// Realization flags, parallel to `infinity_points`.
    pub infinity_in_m: Vec<bool>,
    /// The monochromatic rank-(k−1) flat found at infinity.
    pub mono_points: Vec<GfVec>,
    pub mono_in_m: bool,
    pub base_element: usize,
    pub result: Vec<usize>,
    pub result_rank: usize,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtendOutcome {
    Extended(ExtendCertificate),
    /// The 2-coloring at infinity has no monochromatic rank-(k−1) flat at
    /// this scale.
    NoMonochromaticFlat {
        k: usize,
        infinity_points: Vec<GfVec>,
        infinity_in_m: Vec<bool>,
    },
}

pub fn extend_affine_to_flat(
    m: &Matroid,
    a: &Subset,
    k: usize,
) -> Result<ExtendOutcome, LiftError> {
    extend_affine_to_flat_within(m, &m.ground_set(), a, k)
}

/// Scoped form; `scope` must be a flat of `m` (or the ground set) so the
/// produced set is a flat of `m`.
pub fn extend_affine_to_flat_within(
    m: &Matroid,
    scope: &Subset,
    a: &Subset,
    k: usize,
) -> Result<ExtendOutcome, LiftError> {
    let w = is_affine_restriction(m, a).ok_or(LiftError::NotAffine)?;
    if k < 1 {
        return Err(LiftError::InternalCheckFailed("k must be at least 1".into()));
    }
    let field = m.field().clone();
    let basis_idx = m.greedy_basis(a);
    let span_rank = basis_idx.len();
    // virtual points of span(A) on the avoided hyperplane
    let mut infinity: Vec<GfVec> = Vec::new();
    for psi in gf::hyperplanes_of(span_rank, m.p())
        .map_err(MatroidError::from)?
    {
        let mut coords = vec![0u8; m.ambient_dim()];
        for (i, &b) in basis_idx.iter().enumerate() {
            let c = psi.coords()[i];
            if c != 0 {
                for (slot, &v) in coords.iter_mut().zip(m.vector(b).coords()) {
                    *slot = field.add(*slot, field.mul(c, v));
                }
            }
        }
        let v = GfVec::new(m.p(), coords).expect("residues");
        if w.functional.dot(&field, &v).map_err(MatroidError::from)? == 0 {
            infinity.push(gf::canonical_point(&field, &v).map_err(MatroidError::from)?);
        }
    }
    infinity.sort();
    // realization flags within the scope
    let realized: std::collections::HashSet<GfVec> = scope
        .iter()
        .filter_map(|e| m.canonical_vector(e).cloned())
        .collect();
    let in_m: Vec<bool> = infinity.iter().map(|v| realized.contains(v)).collect();
    let virt = Matroid::new(m.p(), m.ambient_dim(), infinity.clone())?;
    let mono = enumerate_flats(&virt, k - 1).find(|f| {
        let mut it = f.elements.iter();
        match it.next() {
            None => true,
            Some(first) => it.all(|e| in_m[e] == in_m[first]),
        }
    });
    let Some(mono) = mono else {
        return Ok(ExtendOutcome::NoMonochromaticFlat {
            k,
            infinity_points: infinity,
            infinity_in_m: in_m,
        });
    };
    let mono_in_m = mono.elements.min_element().map(|e| in_m[e]).unwrap_or(true);
    let base = a.min_element().expect("affine restrictions are nonempty");
    // F = scope-elements inside span(mono ∪ {base})
    let mut span = EchelonBasis::new(&field, m.ambient_dim());
    for e in mono.elements.iter() {
        basis_insert(&mut span, &infinity[e]);
    }
    basis_insert(&mut span, m.vector(base));
    let mut result = Subset::empty(m.size());
    for e in scope.iter() {
        let inside = match &span {
            EchelonBasis::Bits { .. } => {
                let mut bits = 0u64;
                for (i, &c) in m.vector(e).coords().iter().enumerate() {
                    if c != 0 {
                        bits |= 1 << i;
                    }
                }
                span.contains_bits(bits)
            }
            EchelonBasis::Bytes { .. } => span.contains_bytes(m.vector(e).coords()),
        };
        if inside {
            result.insert(e);
        }
    }
    let result_rank = m.rank_of(&result);
    if result_rank != k {
        return Err(LiftError::InternalCheckFailed(format!(
            "extended flat has rank {result_rank}, expected {k}"
        )));
    }
    let flat = Flat { elements: result.clone(), rank: k };
    let classification = classify_flat(m, &flat)
        .map_err(|e| LiftError::InternalCheckFailed(e.to_string()))?;
    Ok(ExtendOutcome::Extended(ExtendCertificate {
        affine_part: a.indices(),
        k,
        ag_witness: w,
        infinity_points: infinity,
        infinity_in_m: in_m,
        mono_points: mono.elements.iter().map(|e| virt.vector(e).clone()).collect(),
        mono_in_m,
        base_element: base,
        result: result.indices(),
        result_rank,
        classification,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_catalog, CatalogSpec};
    use crate::flats::FlatClass;

    /// coextension of ag(n,2) by an independent set of size m_sz with the
    /// given B block (m_sz rows, one column per affine point)
    fn coextension(n: usize, m_sz: usize, b: &[Vec<u8>]) -> (Matroid, Subset) {
        let ag = build_catalog(&CatalogSpec::Ag { n, p: 2 }).unwrap();
        let r = m_sz + ag.ambient_dim();
        let mut cols = Vec::new();
        for i in 0..m_sz {
            let mut c = vec![0u8; r];
            c[i] = 1;
            cols.push(GfVec::new(2, c).unwrap());
        }
        for (j, v) in ag.vectors().iter().enumerate() {
            let mut c: Vec<u8> = (0..m_sz).map(|i| b[i][j]).collect();
            c.extend_from_slice(v.coords());
            cols.push(GfVec::new(2, c).unwrap());
        }
        let m = Matroid::new(2, r, cols).unwrap();
        let j_set = Subset::from_indices(m.size(), &(0..m_sz).collect::<Vec<_>>());
        (m, j_set)
    }

    #[test]
    fn zero_b_always_lifts() {
        let b = vec![vec![0u8; 8]];
        let (m, j) = coextension(3, 1, &b);
        match lift_affine(&m, &j, 3).unwrap() {
            LiftOutcome::Lifted(cert) => {
                assert_eq!(cert.result.len(), 4); // AG(2,2) has 4 points
                assert_eq!(cert.final_witness.rank, 3);
                // one color only
                let distinct: std::collections::BTreeSet<_> =
                    cert.color_map.iter().map(|(_, c)| c.clone()).collect();
                assert_eq!(distinct.len(), 1);
            }
            other => panic!("expected lift, got {other:?}"),
        }
    }

    #[test]
    fn split_b_still_lifts_rank2() {
        // B splits the 8 points of AG(3,2) into two classes of 4
        let b = vec![vec![0, 0, 0, 0, 1, 1, 1, 1]];
        let (m, j) = coextension(3, 1, &b);
        match lift_affine(&m, &j, 2).unwrap() {
            LiftOutcome::Lifted(cert) => {
                assert_eq!(cert.result.len(), 2); // AG(1,2) is two points
                let s = Subset::from_indices(m.size(), &cert.result);
                assert!(is_affine_restriction(&m, &s).is_some());
            }
            other => panic!("expected lift, got {other:?}"),
        }
    }

    #[test]
    fn nonconstant_b_at_full_rank_fails_explicitly() {
        // k = n: the only rank-k flat is the whole geometry, so any
        // nonconstant coloring defeats it
        let b = vec![vec![0, 1, 0, 0, 0, 0, 0, 0]];
        let (m, j) = coextension(3, 1, &b);
        match lift_affine(&m, &j, 4).unwrap() {
            LiftOutcome::NoMonochromaticFlat(fail) => {
                assert_eq!(fail.color_count, 2);
                assert_eq!(fail.affine_part.len(), 8);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn dependent_j_rejected() {
        let b = vec![vec![0u8; 8], vec![0u8; 8]];
        let (m, _) = coextension(3, 2, &b);
        // a dependent pair: an affine point and itself... use two parallel
        // directions instead: {2, 2} is not expressible, so take a loopy
        // set: element 2 and 3 plus their span closure check
        let dep = Subset::from_indices(m.size(), &[0, 1, 2, 3, 4]);
        if !m.is_independent(&dep) {
            assert!(matches!(
                lift_affine(&m, &dep, 2),
                Err(LiftError::DependentSet(_))
            ));
        } else {
            // rank 5 here means this set is independent; force dependence
            let dep2 = m.ground_set();
            assert!(matches!(
                lift_affine(&m, &dep2, 2),
                Err(LiftError::DependentSet(_))
            ));
        }
    }

    #[test]
    fn extend_full_pg_gives_projective_flat() {
        // inside pg(3,2), a 4-point affine plane extends to its closure,
        // a Fano plane, because every infinity point is realized
        let m = build_catalog(&CatalogSpec::Pg { n: 3, p: 2 }).unwrap();
        let out = crate::lemmas::restriction_trichotomy(
            &m,
            &crate::lemmas::SearchParams::new(2, 3, 2, 2),
        )
        .unwrap();
        let a = match out {
            crate::lemmas::RestrictionOutcome::AgRestriction { elements, .. } => {
                Subset::from_indices(m.size(), &elements)
            }
            other => panic!("expected AG restriction, got {other:?}"),
        };
        match extend_affine_to_flat(&m, &a, 3).unwrap() {
            ExtendOutcome::Extended(cert) => {
                assert!(cert.mono_in_m);
                assert_eq!(cert.result.len(), 7);
                assert!(cert.classification.tags.contains(&FlatClass::ProjectiveGeometry));
            }
            other => panic!("expected extension, got {other:?}"),
        }
    }

    #[test]
    fn extend_bare_ag_returns_itself() {
        // ag(2,3) alone: no infinity point is realized
        let m = build_catalog(&CatalogSpec::Ag { n: 2, p: 3 }).unwrap();
        match extend_affine_to_flat(&m, &m.ground_set(), 3).unwrap() {
            ExtendOutcome::Extended(cert) => {
                assert!(!cert.mono_in_m);
                assert_eq!(cert.result.len(), 9);
                assert!(cert.classification.tags.contains(&FlatClass::AffineGeometry));
                assert!(cert.infinity_in_m.iter().all(|&b| !b));
            }
            other => panic!("expected extension, got {other:?}"),
        }
    }

    #[test]
    fn extension_over_fano_infinity_always_succeeds() {
        // rank-4 affine geometry over GF(2): the infinity geometry is a
        // Fano plane; every 2-coloring of it has a monochromatic line, so
        // extension with k = 3 always produces a flat. Exercise a mixed
        // realization by adding some infinity points to the matroid.
        let ag = build_catalog(&CatalogSpec::Ag { n: 3, p: 2 }).unwrap();
        let mut cols: Vec<GfVec> = ag.vectors().to_vec();
        // realize two infinity points: (0,0,0,1) and (0,0,1,0)
        cols.push(GfVec::new(2, vec![0, 0, 0, 1]).unwrap());
        cols.push(GfVec::new(2, vec![0, 0, 1, 0]).unwrap());
        let m = Matroid::new(2, 4, cols).unwrap();
        let a = Subset::from_indices(m.size(), &(0..8).collect::<Vec<_>>());
        match extend_affine_to_flat(&m, &a, 3).unwrap() {
            ExtendOutcome::Extended(cert) => {
                assert_eq!(cert.result_rank, 3);
                assert!(cert.classification.qualifies());
                assert_eq!(cert.mono_points.len(), 3);
            }
            other => panic!("expected extension, got {other:?}"),
        }
    }
}
