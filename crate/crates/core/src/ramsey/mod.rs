//! Coloring and cap searches: monochromatic-flat finding, the
//! all-colorings decision (raw exhaustion and the cap-based cover
//! argument), and maximum flat-free sets by branch and bound.
//!
//! Search spaces partition by prefix; parallel scans reduce to the least
//! witness, so results are independent of thread count.

mod census;
mod reports;

pub use census::{
    canonical_binary_columns, enumerate_simple_binary, sample_simple_binary, theorem_census,
    theorem_census_sampled, CensusCounterexample, EnumerationReport,
};
pub use reports::{small_hj_report, small_ramsey_report, RamseyBounds, RankVerdict};

use crate::flats::{enumerate_flats, enumerate_flats_within, Flat};
use crate::matroid::Matroid;
use crate::subset::Subset;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Work cap for raw exhaustion over colorings (palette^points).
const EXHAUSTIVE_WORK_CAP: u128 = 1 << 26;
/// Element cap for bitmask-based searches.
const MASK_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RamseyError {
    #[error("coloring has {got} entries for {expected} elements")]
    PartialColoring { expected: usize, got: usize },
    #[error("color {0} outside palette of size {1}")]
    BadColor(usize, usize),
    #[error("palette must have at least one color")]
    EmptyPalette,
    #[error("too large: {what} needs {requested} but the guard is {limit}")]
    ScaleRefusal { what: String, requested: u128, limit: u128 },
    #[error("matroid is not simple")]
    NotSimple,
    #[error("{0} is only supported for 2 colors")]
    TwoColorOnly(String),
}

/// A total coloring of the ground set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    palette: usize,
    colors: Vec<usize>,
}

impl Coloring {
    pub fn new(palette: usize, colors: Vec<usize>) -> Result<Self, RamseyError> {
        if palette == 0 {
            return Err(RamseyError::EmptyPalette);
        }
        for &c in &colors {
            if c >= palette {
                return Err(RamseyError::BadColor(c, palette));
            }
        }
        Ok(Self { palette, colors })
    }

    pub fn constant(n: usize, color: usize, palette: usize) -> Result<Self, RamseyError> {
        Self::new(palette, vec![color; n])
    }

    /// Two-coloring from a bitmask: bit e set means color 1.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self { palette: 2, colors: (0..n).map(|e| ((mask >> e) & 1) as usize).collect() }
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color_of(&self, e: usize) -> usize {
        self.colors[e]
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// True iff parallel elements always share a color, so the coloring
    /// descends to the points of `m`.
    pub fn is_point_consistent(&self, m: &Matroid) -> bool {
        m.points()
            .iter()
            .all(|cls| {
                let mut it = cls.iter();
                match it.next() {
                    None => true,
                    Some(first) => it.all(|e| self.colors[e] == self.colors[first]),
                }
            })
    }
}

/// Expands a coloring of the points (parallel classes, in their sorted
/// order) to a coloring of the elements. Loops get color 0.
pub fn point_coloring_to_elements(
    m: &Matroid,
    palette: usize,
    point_colors: &[usize],
) -> Result<Coloring, RamseyError> {
    let points = m.points();
    if point_colors.len() != points.len() {
        return Err(RamseyError::PartialColoring {
            expected: points.len(),
            got: point_colors.len(),
        });
    }
    let mut colors = vec![0usize; m.size()];
    for (cls, &c) in points.iter().zip(point_colors) {
        for e in cls.iter() {
            colors[e] = c;
        }
    }
    Coloring::new(palette, colors)
}

/// First rank-k flat all of whose elements share a color, or `None` after
/// exhausting the flat stream.
pub fn mono_flat_search(
    m: &Matroid,
    coloring: &Coloring,
    k: usize,
) -> Result<Option<Flat>, RamseyError> {
    if coloring.len() != m.size() {
        return Err(RamseyError::PartialColoring { expected: m.size(), got: coloring.len() });
    }
    Ok(mono_flat_search_within(m, &m.ground_set(), coloring.colors(), k))
}

/// Scoped monochromatic search used by the lift and extension engines.
pub fn mono_flat_search_within(
    m: &Matroid,
    scope: &Subset,
    colors: &[usize],
    k: usize,
) -> Option<Flat> {
    enumerate_flats_within(m, scope, k).find(|f| {
        let mut it = f.elements.iter();
        match it.next() {
            None => true,
            Some(first) => {
                let c = colors[first];
                it.all(|e| colors[e] == c)
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColoringSearchMode {
    /// Raw scan over all palette^n colorings with bit-parallel flat checks.
    Exhaustive,
    /// Two colors only: decide via maximum flat-free sets and exhaustive
    /// complement checks.
    CapBased,
    /// Exhaustive when the space fits the guard, cap-based otherwise.
    Auto,
}

/// Verdict of the all-colorings decision, with deterministic evidence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllColoringsReport {
    pub k: usize,
    pub palette: usize,
    /// True iff every coloring yields a monochromatic rank-k flat.
    pub holds: bool,
    pub witness: Option<Coloring>,
    pub modes: Vec<String>,
    pub evidence: Vec<String>,
}

/// Decides whether every palette-coloring of the points yields a
/// monochromatic rank-k flat. FALSE comes with the least violating
/// coloring.
pub fn all_colorings_mono(
    m: &Matroid,
    k: usize,
    palette: usize,
    mode: ColoringSearchMode,
) -> Result<AllColoringsReport, RamseyError> {
    if !m.is_simple() {
        return Err(RamseyError::NotSimple);
    }
    if palette == 0 {
        return Err(RamseyError::EmptyPalette);
    }
    let n = m.size();
    let space = (palette as u128).saturating_pow(n as u32);
    match mode {
        ColoringSearchMode::Exhaustive => exhaustive_all_colorings(m, k, palette, space),
        ColoringSearchMode::CapBased => {
            if palette != 2 {
                return Err(RamseyError::TwoColorOnly("cap-based mode".into()));
            }
            cap_based_all_colorings(m, k)
        }
        ColoringSearchMode::Auto => {
            if space <= EXHAUSTIVE_WORK_CAP {
                exhaustive_all_colorings(m, k, palette, space)
            } else if palette == 2 {
                cap_based_all_colorings(m, k)
            } else {
                Err(RamseyError::ScaleRefusal {
                    what: format!("{palette}-coloring space over {n} points"),
                    requested: space,
                    limit: EXHAUSTIVE_WORK_CAP,
                })
            }
        }
    }
}

fn flat_masks(m: &Matroid, k: usize) -> Result<Vec<u64>, RamseyError> {
    if m.size() > MASK_CAP {
        return Err(RamseyError::ScaleRefusal {
            what: format!("bitmask search over {} points", m.size()),
            requested: m.size() as u128,
            limit: MASK_CAP as u128,
        });
    }
    Ok(enumerate_flats(m, k).map(|f| f.elements.as_mask()).collect())
}

fn exhaustive_all_colorings(
    m: &Matroid,
    k: usize,
    palette: usize,
    space: u128,
) -> Result<AllColoringsReport, RamseyError> {
    if space > EXHAUSTIVE_WORK_CAP {
        return Err(RamseyError::ScaleRefusal {
            what: format!("{palette}-coloring space over {} points", m.size()),
            requested: space,
            limit: EXHAUSTIVE_WORK_CAP,
        });
    }
    let n = m.size();
    let flats = flat_masks(m, k)?;
    if flats.is_empty() {
        // no rank-k flats at all: any coloring is a witness
        return Ok(AllColoringsReport {
            k,
            palette,
            holds: false,
            witness: Some(Coloring::constant(n, 0, palette)?),
            modes: vec!["exhaustive".into()],
            evidence: vec![format!("no rank-{k} flats exist")],
        });
    }
    let witness = if palette == 2 {
        let total: u64 = 1u64 << n;
        const BLOCK: u64 = 1 << 14;
        let blocks: Vec<u64> = (0..total.div_ceil(BLOCK)).collect();
        blocks
            .par_iter()
            .filter_map(|&b| {
                let lo = b * BLOCK;
                let hi = (lo + BLOCK).min(total);
                (lo..hi).find(|&mask| {
                    !flats
                        .iter()
                        .any(|&f| (f & mask) == 0 || (f & mask) == f)
                })
            })
            .min()
            .map(|mask| Coloring::from_mask(n, mask))
    } else {
        let flat_indices: Vec<Vec<usize>> =
            flats.iter().map(|&f| Subset::from_mask(n, f).indices()).collect();
        let mut colors = vec![0usize; n];
        let mut found = None;
        'outer: loop {
            let mono = flat_indices.iter().any(|idx| match idx.split_first() {
                None => true,
                Some((first, rest)) => {
                    let c = colors[*first];
                    rest.iter().all(|&e| colors[e] == c)
                }
            });
            if !mono {
                found = Some(Coloring::new(palette, colors.clone())?);
                break;
            }
            // odometer
            let mut i = 0;
            loop {
                if i == n {
                    break 'outer;
                }
                colors[i] += 1;
                if colors[i] < palette {
                    break;
                }
                colors[i] = 0;
                i += 1;
            }
        }
        found
    };
    Ok(AllColoringsReport {
        k,
        palette,
        holds: witness.is_none(),
        witness,
        modes: vec!["exhaustive".into()],
        evidence: vec![format!("scanned {space} colorings against {} flats", flats.len())],
    })
}

fn cap_based_all_colorings(m: &Matroid, k: usize) -> Result<AllColoringsReport, RamseyError> {
    let n = m.size();
    let (cap, _witness) = max_flatfree_set(m, k)?;
    if 2 * cap < n {
        return Ok(AllColoringsReport {
            k,
            palette: 2,
            holds: true,
            witness: None,
            modes: vec!["cap-based".into()],
            evidence: vec![format!(
                "two flat-free classes cover at most {} < {n} points (max flat-free = {cap})",
                2 * cap
            )],
        });
    }
    // a violating 2-coloring is a partition into two flat-free sets; the
    // larger side has at least ceil(n/2) elements
    let flats = flat_masks(m, k)?;
    let threshold = n.div_ceil(2);
    let mut candidates = 0u64;
    let mut witness_mask: Option<u64> = None;
    enumerate_flatfree_at_least(&flats, n, threshold, &mut |s: u64| {
        candidates += 1;
        let comp = !s & ((1u64 << n) - 1);
        let comp_free = !flats.iter().any(|&f| (f & comp) == f);
        if comp_free {
            witness_mask = Some(comp); // elements of s get color 0
            false
        } else {
            true
        }
    });
    Ok(AllColoringsReport {
        k,
        palette: 2,
        holds: witness_mask.is_none(),
        witness: witness_mask.map(|w| Coloring::from_mask(n, w)),
        modes: vec!["cap-based".into()],
        evidence: vec![format!(
            "max flat-free = {cap}; checked complements of {candidates} flat-free sets of size >= {threshold}"
        )],
    })
}

/// Visits every flat-free subset of size >= `threshold` in lexicographic
/// (include-first) order; the visitor returns false to stop.
fn enumerate_flatfree_at_least(
    flats: &[u64],
    n: usize,
    threshold: usize,
    visit: &mut impl FnMut(u64) -> bool,
) {
    fn rec(
        flats: &[u64],
        n: usize,
        threshold: usize,
        next: usize,
        chosen: u64,
        count: usize,
        visit: &mut impl FnMut(u64) -> bool,
    ) -> bool {
        if next == n {
            if count >= threshold {
                return visit(chosen);
            }
            return true;
        }
        if count + (n - next) >= threshold {
            let with = chosen | (1u64 << next);
            let ok = !flats.iter().any(|&f| (f & with) == f);
            if ok && !rec(flats, n, threshold, next + 1, with, count + 1, visit) {
                return false;
            }
        }
        rec(flats, n, threshold, next + 1, chosen, count, visit)
    }
    rec(flats, n, threshold, 0, 0, 0, visit);
}

/// Maximum-cardinality subset containing no rank-k flat, with the
/// lexicographically least witness among the maximum sets.
///
/// Branch and bound: a first pass ordered by descending flat-degree
/// establishes the maximum size, then an index-ordered include-first pass
/// pinned to that size returns the lex-least witness.
pub fn max_flatfree_set(m: &Matroid, k: usize) -> Result<(usize, Subset), RamseyError> {
    let n = m.size();
    let flats = flat_masks(m, k)?;
    if flats.is_empty() {
        return Ok((n, m.ground_set()));
    }
    if flats.iter().any(|&f| f == 0) {
        // the empty flat is inside every set
        return Ok((0, Subset::empty(n)));
    }
    // order by descending degree in the flat hypergraph
    let mut order: Vec<usize> = (0..n).collect();
    let degree: Vec<usize> = (0..n)
        .map(|e| flats.iter().filter(|&&f| f & (1u64 << e) != 0).count())
        .collect();
    order.sort_by_key(|&e| (std::cmp::Reverse(degree[e]), e));
    let mut best = 0usize;
    fn bound_pass(
        flats: &[u64],
        order: &[usize],
        pos: usize,
        chosen: u64,
        count: usize,
        best: &mut usize,
    ) {
        if count > *best {
            *best = count;
        }
        if pos == order.len() || count + (order.len() - pos) <= *best {
            return;
        }
        let e = order[pos];
        let with = chosen | (1u64 << e);
        if !flats.iter().any(|&f| (f & with) == f) {
            bound_pass(flats, order, pos + 1, with, count + 1, best);
        }
        bound_pass(flats, order, pos + 1, chosen, count, best);
    }
    bound_pass(&flats, &order, 0, 0, 0, &mut best);
    // lex-least witness of the established size
    fn lex_pass(
        flats: &[u64],
        n: usize,
        next: usize,
        chosen: u64,
        count: usize,
        target: usize,
    ) -> Option<u64> {
        if count == target {
            return Some(chosen);
        }
        if next == n || count + (n - next) < target {
            return None;
        }
        let with = chosen | (1u64 << next);
        if !flats.iter().any(|&f| (f & with) == f) {
            if let Some(hit) = lex_pass(flats, n, next + 1, with, count + 1, target) {
                return Some(hit);
            }
        }
        lex_pass(flats, n, next + 1, chosen, count, target)
    }
    let witness = lex_pass(&flats, n, 0, 0, 0, best).expect("bound pass found this size");
    Ok((best, Subset::from_mask(n, witness)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_catalog, CatalogSpec};

    fn cat(spec: &str) -> Matroid {
        build_catalog(&spec.parse::<CatalogSpec>().unwrap()).unwrap()
    }

    #[test]
    fn mono_search_finds_planted_line() {
        let m = cat("pg:2,2");
        let line = enumerate_flats(&m, 2).next().unwrap();
        let colors: Vec<usize> =
            (0..7).map(|e| usize::from(!line.elements.contains(e))).collect();
        let col = Coloring::new(2, colors).unwrap();
        let hit = mono_flat_search(&m, &col, 2).unwrap().unwrap();
        assert_eq!(hit.elements, line.elements);
    }

    #[test]
    fn mono_search_majority_pair_in_free_matroid() {
        let m = cat("free:4,2");
        let col = Coloring::new(2, vec![0, 1, 0, 1]).unwrap();
        let hit = mono_flat_search(&m, &col, 2).unwrap().unwrap();
        assert_eq!(hit.elements.indices(), vec![0, 2]);
    }

    #[test]
    fn mono_search_rejects_partial_coloring() {
        let m = cat("pg:2,2");
        let col = Coloring::new(2, vec![0, 1]).unwrap();
        assert!(matches!(
            mono_flat_search(&m, &col, 2),
            Err(RamseyError::PartialColoring { expected: 7, got: 2 })
        ));
    }

    #[test]
    fn constant_coloring_mono_iff_flats_exist() {
        for spec in ["pg:2,2", "free:3,2", "ag:2,3"] {
            let m = cat(spec);
            for k in 0..=m.rank() + 1 {
                let col = Coloring::constant(m.size(), 0, 2).unwrap();
                let got = mono_flat_search(&m, &col, k).unwrap();
                let exists = enumerate_flats(&m, k).next().is_some();
                assert_eq!(got.is_some(), exists, "{spec} k={k}");
            }
        }
    }

    #[test]
    fn fano_two_colorings_always_mono() {
        let m = cat("pg:2,2");
        let rep = all_colorings_mono(&m, 2, 2, ColoringSearchMode::Exhaustive).unwrap();
        assert!(rep.holds);
        let rep2 = all_colorings_mono(&m, 2, 2, ColoringSearchMode::CapBased).unwrap();
        assert!(rep2.holds);
    }

    #[test]
    fn single_line_fails_with_witness() {
        let m = cat("pg:1,2");
        let rep = all_colorings_mono(&m, 2, 2, ColoringSearchMode::Exhaustive).unwrap();
        assert!(!rep.holds);
        let w = rep.witness.unwrap();
        assert!(mono_flat_search(&m, &w, 2).unwrap().is_none());
    }

    #[test]
    fn ag23_two_colorings_always_mono_both_modes() {
        let m = cat("ag:2,3");
        let a = all_colorings_mono(&m, 2, 2, ColoringSearchMode::Exhaustive).unwrap();
        let b = all_colorings_mono(&m, 2, 2, ColoringSearchMode::CapBased).unwrap();
        assert!(a.holds && b.holds);
    }

    #[test]
    fn three_colorings_of_small_line() {
        // three colors on a 4-point GF(3) line: color it 0,1,2,0 — the
        // only rank-2 flat is the whole line, not monochromatic
        let m = cat("pg:1,3");
        let rep = all_colorings_mono(&m, 2, 3, ColoringSearchMode::Exhaustive).unwrap();
        assert!(!rep.holds);
    }

    #[test]
    fn max_cap_fano_is_four() {
        let (size, witness) = max_flatfree_set(&cat("pg:2,2"), 2).unwrap();
        assert_eq!(size, 4);
        // complement of a line, lexicographically least
        let m = cat("pg:2,2");
        assert!(enumerate_flats(&m, 2).all(|l| !l.elements.is_subset_of(&witness)));
        // local maximality
        for e in 0..7 {
            if witness.contains(e) {
                continue;
            }
            let bigger = witness.with(e);
            assert!(enumerate_flats(&m, 2).any(|l| l.elements.is_subset_of(&bigger)));
        }
    }

    #[test]
    fn max_cap_ag23_is_four() {
        let (size, _) = max_flatfree_set(&cat("ag:2,3"), 2).unwrap();
        assert_eq!(size, 4);
    }

    #[test]
    fn max_cap_free_matroid_is_one() {
        let (size, witness) = max_flatfree_set(&cat("free:4,2"), 2).unwrap();
        assert_eq!(size, 1);
        assert_eq!(witness.indices(), vec![0]);
    }

    #[test]
    fn cap_and_exhaustive_agree_on_small_cases() {
        for (spec, k) in [("pg:2,2", 2), ("ag:2,2", 2), ("ag:2,3", 2), ("pg:1,2", 2), ("free:4,2", 2), ("pg:3,2", 3)] {
            let m = cat(spec);
            let a = all_colorings_mono(&m, k, 2, ColoringSearchMode::Exhaustive).unwrap();
            let b = all_colorings_mono(&m, k, 2, ColoringSearchMode::CapBased).unwrap();
            assert_eq!(a.holds, b.holds, "{spec} k={k}");
            if let Some(w) = &b.witness {
                assert!(mono_flat_search(&m, w, k).unwrap().is_none(), "{spec} cap witness");
            }
        }
    }

    #[test]
    fn point_coloring_expansion() {
        let m = Matroid::new(
            3,
            2,
            vec![
                crate::gf::GfVec::new(3, vec![1, 0]).unwrap(),
                crate::gf::GfVec::new(3, vec![2, 0]).unwrap(),
                crate::gf::GfVec::new(3, vec![0, 1]).unwrap(),
            ],
        )
        .unwrap();
        let col = point_coloring_to_elements(&m, 2, &[1, 0]).unwrap();
        assert_eq!(col.colors(), &[1, 1, 0]);
        assert!(col.is_point_consistent(&m));
        let bad = Coloring::new(2, vec![0, 1, 0]).unwrap();
        assert!(!bad.is_point_consistent(&m));
    }

    #[test]
    fn embedded_colorings_stay_mono() {
        // structural monotonicity: every 2-coloring of pg(3,2) restricted
        // to a plane has a monochromatic line inside that plane
        use rand::{Rng, SeedableRng};
        let m = cat("pg:3,2");
        let plane = enumerate_flats(&m, 3).next().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let colors: Vec<usize> = (0..m.size()).map(|_| rng.gen_range(0..2)).collect();
            let hit = mono_flat_search_within(&m, &plane.elements, &colors, 2);
            assert!(hit.is_some());
        }
    }
}
