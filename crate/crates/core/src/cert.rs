//! The certificate schema and its independent validator.
//!
//! Every search and lemma outcome serializes to a tagged JSON payload
//! bound to the content digest of the matroid it was computed on. The
//! validator re-checks each claim with rank/closure primitives only; it
//! never re-runs the search that produced the certificate, and it rejects
//! any tampered field it has teeth on.

use crate::flats::{classify_flat, enumerate_flats, Classification, Flat, FlatClass};
use crate::gf::{self, GfMat, GfVec};
use crate::lemmas::{
    LiftOutcome, Reid1Verdict, Reid2Report, ReidOutcome, RestrictionOutcome, TrichotomyOutcome,
    UnavoidableOutcome,
};
use crate::matroid::Matroid;
use crate::ramsey::{mono_flat_search, EnumerationReport, RamseyBounds};
use crate::subset::Subset;
use crate::textio::{matroid_digest, parse_matroid};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error("matroid digest mismatch: certificate has {expected}, input is {got}")]
    DigestMismatch { expected: String, got: String },
    #[error("{place}: {detail}")]
    Invalid { place: String, detail: String },
}

fn invalid(place: &str, detail: impl Into<String>) -> ValidationError {
    ValidationError::Invalid { place: place.into(), detail: detail.into() }
}

/// A classified flat as reported by `classify`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatReport {
    pub elements: Vec<usize>,
    pub rank: usize,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapWitnessCert {
    pub k: usize,
    pub size: usize,
    pub elements: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Certificate {
    Unavoidable(UnavoidableOutcome),
    FlatClassification { k: usize, flats: Vec<FlatReport> },
    ReidCharacteristic { apex: usize, lines: [Vec<usize>; 3], outcome: ReidOutcome },
    Reid1 { apex: usize, lines: [Vec<usize>; 3], verdict: Reid1Verdict },
    Reid2(Reid2Report),
    Trichotomy(TrichotomyOutcome),
    AffineLift(LiftOutcome),
    RestrictionTrichotomy(RestrictionOutcome),
    CapWitness(CapWitnessCert),
    RamseyReport(RamseyBounds),
    Census(EnumerationReport),
}

impl Certificate {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Certificate::Unavoidable(_) => "unavoidable",
            Certificate::FlatClassification { .. } => "flat_classification",
            Certificate::ReidCharacteristic { .. } => "reid_characteristic",
            Certificate::Reid1 { .. } => "reid1",
            Certificate::Reid2(_) => "reid2",
            Certificate::Trichotomy(_) => "trichotomy",
            Certificate::AffineLift(_) => "affine_lift",
            Certificate::RestrictionTrichotomy(_) => "restriction_trichotomy",
            Certificate::CapWitness(_) => "cap_witness",
            Certificate::RamseyReport(_) => "ramsey_report",
            Certificate::Census(_) => "census",
        }
    }
}

/// The on-disk wrapper binding a certificate to its input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema_version: u32,
    /// Digest of the matroid the certificate is about; reports over
    /// generated geometries bind to their base geometry.
    pub matroid_sha256: String,
    #[serde(flatten)]
    pub certificate: Certificate,
}

impl CertificateFile {
    pub fn new(m: &Matroid, certificate: Certificate) -> Self {
        Self { schema_version: SCHEMA_VERSION, matroid_sha256: matroid_digest(m), certificate }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificates serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Validates the file wrapper (schema version, digest) and the inner
/// certificate against the matroid.
pub fn validate_file(m: &Matroid, file: &CertificateFile) -> Result<(), ValidationError> {
    if file.schema_version != SCHEMA_VERSION {
        return Err(ValidationError::SchemaVersion(file.schema_version));
    }
    let got = matroid_digest(m);
    if file.matroid_sha256 != got {
        return Err(ValidationError::DigestMismatch {
            expected: file.matroid_sha256.clone(),
            got,
        });
    }
    validate_certificate(m, &file.certificate)
}

/// Re-verifies every claim in the certificate using rank and closure
/// primitives; returns the first failure found.
pub fn validate_certificate(m: &Matroid, cert: &Certificate) -> Result<(), ValidationError> {
    match cert {
        Certificate::Unavoidable(outcome) => validate_unavoidable(m, outcome),
        Certificate::FlatClassification { k, flats } => validate_classification(m, *k, flats),
        Certificate::ReidCharacteristic { apex, lines, outcome } => {
            validate_reid_char(m, *apex, lines, outcome)
        }
        Certificate::Reid1 { apex, lines, verdict } => validate_reid1(m, *apex, lines, verdict),
        Certificate::Reid2(report) => validate_reid2(m, report),
        Certificate::Trichotomy(outcome) => validate_trichotomy(m, outcome),
        Certificate::AffineLift(outcome) => validate_lift(m, outcome),
        Certificate::RestrictionTrichotomy(outcome) => validate_restriction(m, outcome),
        Certificate::CapWitness(cap) => validate_cap(m, cap),
        Certificate::RamseyReport(bounds) => validate_ramsey(bounds),
        Certificate::Census(report) => validate_census(report),
    }
}

fn subset_from(m: &Matroid, place: &str, indices: &[usize]) -> Result<Subset, ValidationError> {
    let mut s = Subset::empty(m.size());
    for &i in indices {
        if i >= m.size() {
            return Err(invalid(place, format!("element {i} outside ground set")));
        }
        if s.contains(i) {
            return Err(invalid(place, format!("duplicate element {i}")));
        }
        s.insert(i);
    }
    Ok(s)
}

fn check_flat(m: &Matroid, place: &str, s: &Subset, rank: usize) -> Result<(), ValidationError> {
    if m.closure(s) != *s {
        return Err(invalid(place, "set is not closed"));
    }
    let r = m.rank_of(s);
    if r != rank {
        return Err(invalid(place, format!("rank is {r}, certificate says {rank}")));
    }
    Ok(())
}

/// The stated functional must be nonzero on every element of the set; its
/// kernel meets the span in an avoiding hyperplane.
fn check_affine_witness(
    m: &Matroid,
    place: &str,
    s: &Subset,
    rank: usize,
    functional: &GfVec,
) -> Result<(), ValidationError> {
    let expected = crate::flats::affine_point_count(m.p(), rank)
        .ok_or_else(|| invalid(place, "affine size overflow"))?;
    if s.len() as u64 != expected {
        return Err(invalid(
            place,
            format!("affine part has {} elements, expected {expected}", s.len()),
        ));
    }
    if m.rank_of(s) != rank {
        return Err(invalid(place, "affine part has the wrong rank"));
    }
    if m.point_count(s) != s.len() {
        return Err(invalid(place, "affine part has parallel elements"));
    }
    if functional.dim() != m.ambient_dim() {
        return Err(invalid(place, "witness functional has the wrong dimension"));
    }
    for e in s.iter() {
        let d = functional
            .dot(m.field(), m.vector(e))
            .map_err(|err| invalid(place, err.to_string()))?;
        if d == 0 {
            return Err(invalid(place, format!("functional vanishes on element {e}")));
        }
    }
    Ok(())
}

fn check_classification(
    m: &Matroid,
    place: &str,
    flat: &Flat,
    stated: &Classification,
) -> Result<(), ValidationError> {
    let recomputed = classify_flat(m, flat).map_err(|e| invalid(place, e.to_string()))?;
    if recomputed.tags != stated.tags {
        return Err(invalid(
            place,
            format!("tags recompute to {:?}, certificate says {:?}", recomputed.tags, stated.tags),
        ));
    }
    match (&stated.affine_witness, stated.tags.contains(&FlatClass::AffineGeometry)) {
        (Some(w), true) => {
            check_affine_witness(m, place, &flat.elements, flat.rank, w)?;
        }
        (None, true) => return Err(invalid(place, "affine tag without witness functional")),
        (Some(_), false) => return Err(invalid(place, "witness functional without affine tag")),
        (None, false) => {}
    }
    Ok(())
}

fn validate_unavoidable(m: &Matroid, outcome: &UnavoidableOutcome) -> Result<(), ValidationError> {
    match outcome {
        UnavoidableOutcome::Found { k, found, .. } => {
            let place = "unavoidable.found";
            if found.flat.elements.universe() != m.size() {
                return Err(invalid(place, "flat universe mismatch"));
            }
            check_flat(m, place, &found.flat.elements, found.flat.rank)?;
            if found.flat.rank != *k {
                return Err(invalid(place, "flat rank differs from k"));
            }
            check_classification(m, place, &found.flat, &found.classification)?;
            if found.classification.tags.is_empty() {
                return Err(invalid(place, "flat qualifies for no class"));
            }
            Ok(())
        }
        UnavoidableOutcome::NoneAtThisRank { k, .. } => {
            // re-verifiable by a bounded rescan: no rank-k flat qualifies
            let place = "unavoidable.none";
            for f in enumerate_flats(m, *k) {
                let c = classify_flat(m, &f).map_err(|e| invalid(place, e.to_string()))?;
                if c.qualifies() {
                    return Err(invalid(
                        place,
                        format!("flat {} qualifies, certificate claims none", f.elements),
                    ));
                }
            }
            Ok(())
        }
    }
}

fn validate_classification(
    m: &Matroid,
    k: usize,
    flats: &[FlatReport],
) -> Result<(), ValidationError> {
    let place = "flat_classification";
    let expected: Vec<Flat> = enumerate_flats(m, k).collect();
    if expected.len() != flats.len() {
        return Err(invalid(
            place,
            format!("{} flats listed, enumeration finds {}", flats.len(), expected.len()),
        ));
    }
    for (stated, real) in flats.iter().zip(&expected) {
        let s = subset_from(m, place, &stated.elements)?;
        if s != real.elements || stated.rank != real.rank {
            return Err(invalid(place, format!("flat list diverges at {}", real.elements)));
        }
        check_classification(m, place, real, &stated.classification)?;
    }
    Ok(())
}

fn reid_lines(
    m: &Matroid,
    place: &str,
    apex: usize,
    lines: &[Vec<usize>; 3],
) -> Result<[Subset; 3], ValidationError> {
    if apex >= m.size() {
        return Err(invalid(place, "apex outside ground set"));
    }
    if !m.is_simple() {
        return Err(invalid(place, "matroid is not simple"));
    }
    if m.rank() != 3 {
        return Err(invalid(place, "matroid does not have rank 3"));
    }
    let l1 = subset_from(m, place, &lines[0])?;
    let l2 = subset_from(m, place, &lines[1])?;
    let l3 = subset_from(m, place, &lines[2])?;
    for (i, l) in [&l1, &l2, &l3].iter().enumerate() {
        check_flat(m, place, l, 2)
            .map_err(|_| invalid(place, format!("line {} is not a rank-2 flat", i + 1)))?;
        if !l.contains(apex) {
            return Err(invalid(place, format!("line {} misses the apex", i + 1)));
        }
    }
    for (a, b) in [(&l1, &l2), (&l1, &l3), (&l2, &l3)] {
        let meet = a.intersection(b);
        if meet.len() != 1 || !meet.contains(apex) {
            return Err(invalid(place, "lines do not meet exactly in the apex"));
        }
    }
    if l1.union(&l2).union(&l3) != m.ground_set() {
        return Err(invalid(place, "lines do not cover the ground set"));
    }
    Ok([l1, l2, l3])
}

fn two_point_line_exists(m: &Matroid) -> Option<Flat> {
    enumerate_flats(m, 2).find(|f| f.elements.len() == 2)
}

fn validate_reid_char(
    m: &Matroid,
    apex: usize,
    lines: &[Vec<usize>; 3],
    outcome: &ReidOutcome,
) -> Result<(), ValidationError> {
    let place = "reid_characteristic";
    let [l1, _l2, l3] = reid_lines(m, place, apex, lines)?;
    match outcome {
        ReidOutcome::TwoPointLine(f) => {
            check_flat(m, place, &f.elements, 2)?;
            if f.elements.len() != 2 {
                return Err(invalid(place, "claimed two-point line has the wrong cardinality"));
            }
            Ok(())
        }
        ReidOutcome::Certificate(c) => {
            if two_point_line_exists(m).is_some() {
                return Err(invalid(place, "a two-point line exists but was not reported"));
            }
            if c.apex != apex || c.lines != *lines {
                return Err(invalid(place, "certificate context mismatch"));
            }
            let (a, b) = c.pair;
            let l2 = subset_from(m, place, &lines[1])?;
            if !l2.contains(a) || !l2.contains(b) || a == b || a == apex || b == apex {
                return Err(invalid(place, "pair is not two distinct non-apex middle points"));
            }
            let mut degree: std::collections::BTreeMap<usize, usize> = Default::default();
            for e in &c.edges {
                if !l1.contains(e.x) || e.x == apex || !l3.contains(e.y) || e.y == apex {
                    return Err(invalid(place, "edge endpoints off the outer lines"));
                }
                if e.via != a && e.via != b {
                    return Err(invalid(place, "edge witness outside the chosen pair"));
                }
                let tri = Subset::from_indices(m.size(), &[e.x, e.via, e.y]);
                if tri.len() != 3 || m.rank_of(&tri) != 2 {
                    return Err(invalid(
                        place,
                        format!("({}, {}, {}) is not a triangle", e.x, e.via, e.y),
                    ));
                }
                *degree.entry(e.x).or_insert(0) += 1;
                *degree.entry(e.y).or_insert(0) += 1;
            }
            for v in l1.iter().chain(l3.iter()).filter(|&v| v != apex) {
                if degree.get(&v) != Some(&2) {
                    return Err(invalid(place, format!("vertex {v} does not have degree 2")));
                }
            }
            let mut adjacent = std::collections::BTreeSet::new();
            for e in &c.edges {
                adjacent.insert((e.x, e.y));
                adjacent.insert((e.y, e.x));
            }
            let mut seen = std::collections::BTreeSet::new();
            if c.cycles.len() != c.half_sizes.len() {
                return Err(invalid(place, "cycle and half-size lists differ in length"));
            }
            for (cycle, &half) in c.cycles.iter().zip(&c.half_sizes) {
                if cycle.len() != 2 * half || cycle.is_empty() {
                    return Err(invalid(place, "cycle length does not match its half size"));
                }
                for w in cycle.windows(2) {
                    if !adjacent.contains(&(w[0], w[1])) {
                        return Err(invalid(place, "cycle steps off the graph"));
                    }
                }
                if !adjacent.contains(&(*cycle.last().unwrap(), cycle[0])) {
                    return Err(invalid(place, "cycle does not close"));
                }
                for &v in cycle {
                    if !seen.insert(v) {
                        return Err(invalid(place, "cycles overlap"));
                    }
                }
            }
            let vertex_count = (l1.len() - 1) + (l3.len() - 1);
            if seen.len() != vertex_count {
                return Err(invalid(place, "cycles do not partition the vertex set"));
            }
            let p = m.p() as usize;
            let recomputed = c.half_sizes.iter().all(|h| h % p == 0)
                && (l1.len() - 1) % p == 0
                && l1.len() == lines[1].len()
                && lines[1].len() == lines[2].len();
            if recomputed != c.divisible {
                return Err(invalid(place, "divisibility flag does not recompute"));
            }
            if c.line_size != l1.len() {
                return Err(invalid(place, "line size mismatch"));
            }
            Ok(())
        }
    }
}

fn validate_reid1(
    m: &Matroid,
    apex: usize,
    lines: &[Vec<usize>; 3],
    verdict: &Reid1Verdict,
) -> Result<(), ValidationError> {
    let place = "reid1";
    let [l1, l2, l3] = reid_lines(m, place, apex, lines)?;
    match verdict {
        Reid1Verdict::TwoPointLine(f) => {
            check_flat(m, place, &f.elements, 2)?;
            if f.elements.len() != 2 {
                return Err(invalid(place, "claimed two-point line has the wrong cardinality"));
            }
            Ok(())
        }
        Reid1Verdict::Sizes { sizes, expected, confirmed } => {
            if two_point_line_exists(m).is_some() {
                return Err(invalid(place, "a two-point line exists but was not reported"));
            }
            if *sizes != [l1.len(), l2.len(), l3.len()] {
                return Err(invalid(place, "line sizes do not recompute"));
            }
            if *expected != m.p() as usize + 1 {
                return Err(invalid(place, "expected length is not p + 1"));
            }
            if *confirmed != sizes.iter().all(|s| s == expected) {
                return Err(invalid(place, "confirmation flag does not recompute"));
            }
            Ok(())
        }
    }
}

fn validate_reid2(m: &Matroid, report: &Reid2Report) -> Result<(), ValidationError> {
    let place = "reid2";
    let recomputed = crate::lemmas::verify_reid2(m, report.element)
        .map_err(|e| invalid(place, e.to_string()))?;
    if &recomputed != report {
        return Err(invalid(place, "report does not recompute identically"));
    }
    Ok(())
}

fn validate_trichotomy(m: &Matroid, outcome: &TrichotomyOutcome) -> Result<(), ValidationError> {
    match outcome {
        TrichotomyOutcome::AgRestriction(w) => {
            let place = "trichotomy.ag";
            let p = m.p() as usize;
            let k = w.params.k;
            if k < 2 {
                return Err(invalid(place, "k below 2"));
            }
            let c = subset_from(m, place, &w.contracted_flat)?;
            check_flat(m, place, &c, k - 1)?;
            let basis = subset_from(m, place, &w.basis)?;
            if !basis.is_subset_of(&c) || basis.len() != k - 1 || !m.is_independent(&basis) {
                return Err(invalid(place, "basis is not an independent basis of the flat"));
            }
            if w.outside >= m.size() || c.contains(w.outside) || m.is_loop(w.outside) {
                return Err(invalid(place, "outside element is not outside the flat"));
            }
            if w.chain.len() != k - 1 {
                return Err(invalid(place, "chain has the wrong length"));
            }
            let mut prev = 1usize;
            for (i, stage) in w.chain.iter().enumerate() {
                let mut gen = Subset::from_indices(m.size(), &[w.outside]);
                for &b in &w.basis[..=i] {
                    gen.insert(b);
                }
                let recomputed = m.closure(&gen).difference(&c);
                let stated = subset_from(m, place, stage)?;
                if recomputed != stated {
                    return Err(invalid(place, format!("stage {} does not recompute", i + 1)));
                }
                if stated.len() != prev * p {
                    return Err(invalid(
                        place,
                        format!("stage {} size {} breaks the p-fold chain", i + 1, stated.len()),
                    ));
                }
                prev = stated.len();
            }
            let last = subset_from(m, place, w.restriction())?;
            if w.witness.rank != k {
                return Err(invalid(place, "final witness rank differs from k"));
            }
            check_affine_witness(m, place, &last, w.witness.rank, &w.witness.functional)
        }
        TrichotomyOutcome::LiftedFlat(w) => {
            let place = "trichotomy.lifted";
            let c = subset_from(m, place, &w.flat)?;
            check_flat(m, place, &c, w.params.k - 1)?;
            let minor = m.contract(&c).map_err(|e| invalid(place, e.to_string()))?;
            let mut min_points = usize::MAX;
            let mut count = 0usize;
            for g in enumerate_flats(&minor, w.params.t) {
                count += 1;
                min_points = min_points.min(minor.point_count(&g.elements));
            }
            if count != w.flats_checked || count == 0 {
                return Err(invalid(place, "flat count does not recompute"));
            }
            if min_points != w.min_points || min_points < w.params.n + 1 {
                return Err(invalid(place, "minimum point count does not recompute"));
            }
            Ok(())
        }
        TrichotomyOutcome::Disconnected(w) => {
            let place = "trichotomy.disconnected";
            let contracted = subset_from(m, place, &w.contracted)?;
            let (minor, map) = if contracted.is_empty() {
                (m.clone(), (0..m.size()).collect::<Vec<_>>())
            } else {
                check_flat(m, place, &contracted, w.params.k - 1)?;
                m.contract_mapped(&contracted).map_err(|e| invalid(place, e.to_string()))?
            };
            let back: std::collections::HashMap<usize, usize> =
                map.iter().enumerate().map(|(new, &old)| (old, new)).collect();
            let to_minor = |idx: &[usize]| -> Result<Subset, ValidationError> {
                let mut s = Subset::empty(minor.size());
                for &e in idx {
                    let &pos = back
                        .get(&e)
                        .ok_or_else(|| invalid(place, format!("element {e} not in the minor")))?;
                    s.insert(pos);
                }
                Ok(s)
            };
            let flat = to_minor(&w.flat)?;
            check_flat(&minor, place, &flat, w.params.t)?;
            let comps = minor.components_within(&flat);
            if comps.len() < 2 {
                return Err(invalid(place, "flat restriction is connected"));
            }
            let stated: Vec<Subset> =
                w.components.iter().map(|c| to_minor(c)).collect::<Result<_, _>>()?;
            if stated != comps {
                return Err(invalid(place, "component partition does not recompute"));
            }
            Ok(())
        }
    }
}

/// Projective equivalence of the assembled block representation with the
/// matroid's own columns: coordinates w.r.t. a common greedy basis must be
/// parallel element by element.
fn check_remultiplication(
    m: &Matroid,
    place: &str,
    assembled: &[GfVec],
) -> Result<(), ValidationError> {
    if assembled.len() != m.size() {
        return Err(invalid(place, "assembled representation has the wrong element count"));
    }
    let p = m.p();
    let basis_idx = m.greedy_basis(&m.ground_set());
    let dim_a = assembled.first().map(|v| v.dim()).unwrap_or(0);
    let m_basis: Vec<GfVec> = basis_idx.iter().map(|&e| m.vector(e).clone()).collect();
    let a_basis: Vec<GfVec> = basis_idx.iter().map(|&e| assembled[e].clone()).collect();
    let m_mat = GfMat::from_cols(p, m.ambient_dim(), &m_basis)
        .map_err(|e| invalid(place, e.to_string()))?;
    let a_mat =
        GfMat::from_cols(p, dim_a, &a_basis).map_err(|e| invalid(place, e.to_string()))?;
    if a_mat.rank() != basis_idx.len() {
        return Err(invalid(place, "assembled basis columns are dependent"));
    }
    let field = m.field();
    for e in 0..m.size() {
        let cm = gf::in_span(&m_mat, m.vector(e))
            .map_err(|err| invalid(place, err.to_string()))?
            .ok_or_else(|| invalid(place, "matroid column outside its own basis span"))?;
        let ca = gf::in_span(&a_mat, &assembled[e])
            .map_err(|err| invalid(place, err.to_string()))?
            .ok_or_else(|| invalid(place, format!("assembled column {e} outside basis span")))?;
        let ok = match (cm.is_zero(), ca.is_zero()) {
            (true, true) => true,
            (false, false) => cm.parallel_to(field, &ca),
            _ => false,
        };
        if !ok {
            return Err(invalid(
                place,
                format!("column {e} is not parallel after re-multiplication"),
            ));
        }
    }
    Ok(())
}

fn validate_lift(m: &Matroid, outcome: &LiftOutcome) -> Result<(), ValidationError> {
    match outcome {
        LiftOutcome::Lifted(c) => {
            let place = "affine_lift";
            let j = subset_from(m, place, &c.j)?;
            if !m.is_independent(&j) {
                return Err(invalid(place, "J is dependent"));
            }
            let m_sz = j.len();
            let non_j: Vec<usize> = (0..m.size()).filter(|&e| !j.contains(e)).collect();
            let expected_order: Vec<usize> =
                c.j.iter().copied().chain(non_j.iter().copied()).collect();
            if c.blocks.element_order != expected_order {
                return Err(invalid(place, "element order is not J then the rest"));
            }
            if c.blocks.b_rows.len() != m_sz {
                return Err(invalid(place, "B block has the wrong row count"));
            }
            let s_dim = c.blocks.d_rows.len();
            if s_dim == 0 {
                return Err(invalid(place, "empty D block cannot carry a geometry"));
            }
            let width = non_j.len();
            for row in c.blocks.b_rows.iter().chain(&c.blocks.d_rows) {
                if row.len() != width {
                    return Err(invalid(place, "block rows are ragged"));
                }
                for &v in row {
                    if v >= m.p() {
                        return Err(invalid(place, "block entry out of range"));
                    }
                }
            }
            let mut assembled = vec![GfVec::zeros(m.p(), m_sz + s_dim); m.size()];
            for (pos, &e) in c.j.iter().enumerate() {
                let mut coords = vec![0u8; m_sz + s_dim];
                coords[pos] = 1;
                assembled[e] = GfVec::new(m.p(), coords).expect("unit");
            }
            for (col, &e) in non_j.iter().enumerate() {
                let mut coords = Vec::with_capacity(m_sz + s_dim);
                for row in &c.blocks.b_rows {
                    coords.push(row[col]);
                }
                for row in &c.blocks.d_rows {
                    coords.push(row[col]);
                }
                assembled[e] =
                    GfVec::new(m.p(), coords).map_err(|e| invalid(place, e.to_string()))?;
            }
            check_remultiplication(m, place, &assembled)?;
            let affine = subset_from(m, place, &c.affine_part)?;
            if !affine.is_disjoint_from(&j) {
                return Err(invalid(place, "affine part overlaps J"));
            }
            let col_of: std::collections::HashMap<usize, usize> =
                non_j.iter().enumerate().map(|(col, &e)| (e, col)).collect();
            for e in affine.iter() {
                if c.blocks.d_rows[0][col_of[&e]] != 1 {
                    return Err(invalid(place, format!("D first row is not 1 on element {e}")));
                }
            }
            if c.color_map.len() != affine.len() {
                return Err(invalid(place, "color map does not cover the affine part"));
            }
            for (e, color) in &c.color_map {
                if !affine.contains(*e) {
                    return Err(invalid(place, "color map strays outside the affine part"));
                }
                let col = col_of[e];
                let b_col: Vec<u8> = c.blocks.b_rows.iter().map(|r| r[col]).collect();
                if &b_col != color {
                    return Err(invalid(place, format!("color of {e} is not its B column")));
                }
            }
            if c.mono_flat != c.result {
                return Err(invalid(place, "result differs from the monochromatic flat"));
            }
            let result = subset_from(m, place, &c.result)?;
            if !result.is_subset_of(&affine) || result.is_empty() {
                return Err(invalid(place, "result is not inside the affine part"));
            }
            let colors: std::collections::BTreeSet<Vec<u8>> = result
                .iter()
                .map(|e| {
                    let col = col_of[&e];
                    c.blocks.b_rows.iter().map(|r| r[col]).collect()
                })
                .collect();
            if colors.len() > 1 {
                return Err(invalid(place, "result is not monochromatic"));
            }
            let (minor, map) =
                m.contract_mapped(&j).map_err(|e| invalid(place, e.to_string()))?;
            let back: std::collections::HashMap<usize, usize> =
                map.iter().enumerate().map(|(new, &old)| (old, new)).collect();
            let mut result_minor = Subset::empty(minor.size());
            for e in result.iter() {
                result_minor.insert(back[&e]);
            }
            let mut affine_minor = Subset::empty(minor.size());
            for e in affine.iter() {
                affine_minor.insert(back[&e]);
            }
            if minor.rank_of(&result_minor) != c.k {
                return Err(invalid(place, "result does not have rank k in the contraction"));
            }
            if minor.closure(&result_minor).intersection(&affine_minor) != result_minor {
                return Err(invalid(place, "result is not a flat of the restricted contraction"));
            }
            if c.final_witness.rank != c.k {
                return Err(invalid(place, "final witness rank differs from k"));
            }
            check_affine_witness(
                m,
                place,
                &result,
                c.final_witness.rank,
                &c.final_witness.functional,
            )
        }
        LiftOutcome::NoMonochromaticFlat(f) => {
            let place = "affine_lift.failure";
            let j = subset_from(m, place, &f.j)?;
            if !m.is_independent(&j) {
                return Err(invalid(place, "J is dependent"));
            }
            let (minor, map) =
                m.contract_mapped(&j).map_err(|e| invalid(place, e.to_string()))?;
            let back: std::collections::HashMap<usize, usize> =
                map.iter().enumerate().map(|(new, &old)| (old, new)).collect();
            let affine = subset_from(m, place, &f.affine_part)?;
            let mut affine_minor = Subset::empty(minor.size());
            for e in affine.iter() {
                affine_minor.insert(back[&e]);
            }
            if crate::flats::is_affine_restriction(&minor, &affine_minor).is_none() {
                return Err(invalid(
                    place,
                    "affine part fails affine recognition in the contraction",
                ));
            }
            if f.color_map.len() != affine.len() {
                return Err(invalid(place, "coloring does not cover the affine part"));
            }
            let mut classes: std::collections::BTreeMap<Vec<u8>, Subset> = Default::default();
            for (e, color) in &f.color_map {
                if !affine.contains(*e) {
                    return Err(invalid(place, "coloring strays outside the affine part"));
                }
                classes
                    .entry(color.clone())
                    .or_insert_with(|| Subset::empty(minor.size()))
                    .insert(back[e]);
            }
            if classes.len() != f.color_count {
                return Err(invalid(place, "color count does not recompute"));
            }
            for (color, class) in &classes {
                if crate::flats::enumerate_flats_within(&minor, class, f.k).next().is_some() {
                    return Err(invalid(
                        place,
                        format!("color class {color:?} contains a rank-{} flat", f.k),
                    ));
                }
            }
            Ok(())
        }
    }
}

fn validate_restriction(m: &Matroid, outcome: &RestrictionOutcome) -> Result<(), ValidationError> {
    match outcome {
        RestrictionOutcome::AgRestriction { params, elements, witness } => {
            let place = "restriction.ag";
            let s = subset_from(m, place, elements)?;
            if witness.rank != params.k {
                return Err(invalid(place, "witness rank differs from k"));
            }
            check_affine_witness(m, place, &s, witness.rank, &witness.functional)
        }
        RestrictionOutcome::FlatWitness {
            params,
            flat,
            rank,
            point_count,
            components,
            small,
            disconnected,
        } => {
            let place = "restriction.flat";
            let s = subset_from(m, place, flat)?;
            if *rank != params.t {
                return Err(invalid(place, "flat rank field differs from t"));
            }
            check_flat(m, place, &s, *rank)?;
            if m.point_count(&s) != *point_count {
                return Err(invalid(place, "point count does not recompute"));
            }
            let comps = m.components_within(&s);
            let stated: Vec<Subset> = components
                .iter()
                .map(|c| subset_from(m, place, c))
                .collect::<Result<_, _>>()?;
            if stated != comps {
                return Err(invalid(place, "components do not recompute"));
            }
            if *small != (*point_count <= params.n) || *disconnected != (comps.len() > 1) {
                return Err(invalid(place, "witness flags do not recompute"));
            }
            if !*small && !*disconnected {
                return Err(invalid(place, "flat is neither small nor disconnected"));
            }
            Ok(())
        }
        RestrictionOutcome::Exhausted { .. } => Ok(()),
    }
}

fn validate_cap(m: &Matroid, cap: &CapWitnessCert) -> Result<(), ValidationError> {
    let place = "cap_witness";
    let s = subset_from(m, place, &cap.elements)?;
    if s.len() != cap.size {
        return Err(invalid(place, "witness cardinality differs from the stated size"));
    }
    let flats: Vec<Flat> = enumerate_flats(m, cap.k).collect();
    if flats.iter().any(|f| f.elements.is_subset_of(&s)) {
        return Err(invalid(place, "witness contains a flat"));
    }
    // local maximality: every one-element extension traps a flat
    for e in 0..m.size() {
        if s.contains(e) {
            continue;
        }
        let bigger = s.with(e);
        if !flats.iter().any(|f| f.elements.is_subset_of(&bigger)) {
            return Err(invalid(
                place,
                format!("adding element {e} keeps the set flat-free; witness is not maximal"),
            ));
        }
    }
    Ok(())
}

fn validate_ramsey(bounds: &RamseyBounds) -> Result<(), ValidationError> {
    let place = "ramsey_report";
    if bounds.verdicts.is_empty() {
        return Err(invalid(place, "no verdicts"));
    }
    let mut expected_rank = bounds.t;
    for v in &bounds.verdicts {
        if v.rank != expected_rank {
            return Err(invalid(place, "ranks are not contiguous from t"));
        }
        expected_rank += 1;
        let geom =
            parse_matroid(&v.matroid_text).map_err(|e| invalid(place, e.to_string()))?;
        let spec = if bounds.affine {
            crate::catalog::CatalogSpec::Ag { n: v.rank - 1, p: bounds.q }
        } else {
            crate::catalog::CatalogSpec::Pg { n: v.rank - 1, p: bounds.q }
        };
        let reference = crate::catalog::build_catalog(&spec)
            .map_err(|e| invalid(place, e.to_string()))?;
        if geom.vectors() != reference.vectors() {
            return Err(invalid(place, format!("rank-{} geometry text is wrong", v.rank)));
        }
        match (&v.witness, v.holds) {
            (Some(w), false) => {
                let hit = mono_flat_search(&geom, w, bounds.t)
                    .map_err(|e| invalid(place, e.to_string()))?;
                if let Some(f) = hit {
                    return Err(invalid(
                        place,
                        format!(
                            "rank-{} witness coloring has a monochromatic flat {}",
                            v.rank, f.elements
                        ),
                    ));
                }
            }
            (None, false) => return Err(invalid(place, "failing rank without witness")),
            (Some(_), true) => return Err(invalid(place, "holding rank carries a witness")),
            (None, true) => {}
        }
    }
    let fails = bounds.verdicts.iter().rev().find(|v| !v.holds).map(|v| v.rank);
    let holds = bounds.verdicts.iter().find(|v| v.holds).map(|v| v.rank);
    if fails != bounds.fails_at || holds != bounds.holds_at {
        return Err(invalid(place, "threshold fields do not recompute"));
    }
    if bounds.max_rank + 1 != expected_rank {
        return Err(invalid(place, "max rank does not match the verdict list"));
    }
    Ok(())
}

fn validate_census(report: &EnumerationReport) -> Result<(), ValidationError> {
    let place = "census";
    let classified: u64 = report.class_counts.values().sum();
    if classified + report.counterexample_count != report.total {
        return Err(invalid(place, "counts do not sum to the total"));
    }
    if report.counterexample_count != report.counterexamples.len() as u64 {
        return Err(invalid(place, "counterexample count differs from the list"));
    }
    let base = crate::catalog::build_catalog(&crate::catalog::CatalogSpec::Pg {
        n: report.r - 1,
        p: 2,
    })
    .map_err(|e| invalid(place, e.to_string()))?;
    for cx in &report.counterexamples {
        let keep = Subset::from_mask(base.size(), cx.mask);
        let m = base.restrict(&keep).map_err(|e| invalid(place, e.to_string()))?;
        if crate::textio::emit_matroid(&m) != cx.text {
            return Err(invalid(place, format!("mask {:#x} text mismatch", cx.mask)));
        }
        if crate::ramsey::canonical_binary_columns(&m) != cx.canonical {
            return Err(invalid(place, format!("mask {:#x} canonical form mismatch", cx.mask)));
        }
        // the defining property: no qualifying rank-k flat
        for f in enumerate_flats(&m, report.k) {
            let c = classify_flat(&m, &f).map_err(|e| invalid(place, e.to_string()))?;
            if c.qualifies() {
                return Err(invalid(
                    place,
                    format!("mask {:#x} has a qualifying flat {}", cx.mask, f.elements),
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_catalog, CatalogSpec};
    use crate::lemmas::{
        lift_affine, restriction_trichotomy, unavoidable_search, SearchParams, SearchStrategy,
    };
    use crate::ramsey::{max_flatfree_set, small_ramsey_report};

    fn cat(spec: &str) -> Matroid {
        build_catalog(&spec.parse::<CatalogSpec>().unwrap()).unwrap()
    }

    #[test]
    fn unavoidable_cert_round_trip_and_validate() {
        let m = cat("pg:3,2");
        let out = unavoidable_search(&m, 2, SearchStrategy::Direct).unwrap();
        let file = CertificateFile::new(&m, Certificate::Unavoidable(out));
        let text = file.to_json();
        let back = CertificateFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        validate_file(&m, &back).unwrap();
    }

    #[test]
    fn tampered_flat_rejected() {
        let m = cat("pg:3,2");
        let out = unavoidable_search(&m, 2, SearchStrategy::Direct).unwrap();
        let mut file = CertificateFile::new(&m, Certificate::Unavoidable(out));
        if let Certificate::Unavoidable(UnavoidableOutcome::Found { found, .. }) =
            &mut file.certificate
        {
            let dropped = found.flat.elements.min_element().unwrap();
            found.flat.elements.remove(dropped);
        }
        assert!(validate_file(&m, &file).is_err());
    }

    #[test]
    fn digest_binds_certificate_to_input() {
        let m = cat("pg:3,2");
        let other = cat("pg:2,2");
        let out = unavoidable_search(&m, 2, SearchStrategy::Direct).unwrap();
        let file = CertificateFile::new(&m, Certificate::Unavoidable(out));
        assert!(matches!(
            validate_file(&other, &file),
            Err(ValidationError::DigestMismatch { .. })
        ));
    }

    #[test]
    fn cap_witness_validates_and_detects_shrink() {
        let m = cat("pg:2,2");
        let (size, witness) = max_flatfree_set(&m, 2).unwrap();
        let cert = CapWitnessCert { k: 2, size, elements: witness.indices() };
        validate_certificate(&m, &Certificate::CapWitness(cert.clone())).unwrap();
        let mut smaller = cert.clone();
        smaller.elements.pop();
        smaller.size -= 1;
        // removing one element breaks local maximality
        assert!(validate_certificate(&m, &Certificate::CapWitness(smaller)).is_err());
        let mut wrong_size = cert;
        wrong_size.size += 1;
        assert!(validate_certificate(&m, &Certificate::CapWitness(wrong_size)).is_err());
    }

    #[test]
    fn restriction_cert_validates() {
        let m = cat("pg:3,2");
        let out = restriction_trichotomy(&m, &SearchParams::new(2, 3, 2, 2)).unwrap();
        validate_certificate(&m, &Certificate::RestrictionTrichotomy(out)).unwrap();
    }

    #[test]
    fn lift_cert_validates_and_rejects_block_tamper() {
        let ag = cat("ag:3,2");
        let mut cols = vec![GfVec::new(2, vec![1, 0, 0, 0, 0]).unwrap()];
        for v in ag.vectors() {
            let mut c = vec![0u8];
            c.extend_from_slice(v.coords());
            cols.push(GfVec::new(2, c).unwrap());
        }
        let m = Matroid::new(2, 5, cols).unwrap();
        let j = Subset::from_indices(m.size(), &[0]);
        let out = lift_affine(&m, &j, 3).unwrap();
        validate_certificate(&m, &Certificate::AffineLift(out.clone())).unwrap();
        if let LiftOutcome::Lifted(mut c) = out {
            c.blocks.d_rows[0][0] ^= 1;
            assert!(validate_certificate(
                &m,
                &Certificate::AffineLift(LiftOutcome::Lifted(c))
            )
            .is_err());
        } else {
            panic!("expected a lift");
        }
    }

    #[test]
    fn ramsey_report_validates_and_rejects_witness_tamper() {
        let bounds = small_ramsey_report(2, 2, 3).unwrap();
        validate_certificate(&cat("pg:2,2"), &Certificate::RamseyReport(bounds.clone()))
            .unwrap();
        let mut bad = bounds;
        // claim the failing rank holds
        bad.verdicts[0].holds = true;
        bad.verdicts[0].witness = None;
        assert!(
            validate_certificate(&cat("pg:2,2"), &Certificate::RamseyReport(bad)).is_err()
        );
    }
}
