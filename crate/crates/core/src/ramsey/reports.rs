//! Small-case Ramsey and Hales-Jewett rank sweeps over projective and
//! affine geometries, with per-rank verdicts and embedded extremal
//! witnesses.

use super::{
    all_colorings_mono, AllColoringsReport, Coloring, ColoringSearchMode, RamseyError,
    EXHAUSTIVE_WORK_CAP,
};
use crate::catalog::{build_catalog, CatalogSpec};
use crate::textio::emit_matroid;
use serde::{Deserialize, Serialize};

/// Verdict for one rank of the sweep. The geometry text is embedded so
/// the witness re-verifies standalone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankVerdict {
    pub rank: usize,
    /// True iff every coloring of the geometry has a monochromatic
    /// rank-t flat.
    pub holds: bool,
    pub modes: Vec<String>,
    pub witness: Option<Coloring>,
    pub matroid_text: String,
    pub evidence: Vec<String>,
}

/// Empirically verified rank thresholds for the geometric Ramsey /
/// Hales-Jewett questions at desk scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamseyBounds {
    pub q: u8,
    pub t: usize,
    pub colors: usize,
    /// Affine geometries (Hales-Jewett form) instead of projective.
    pub affine: bool,
    pub max_rank: usize,
    pub verdicts: Vec<RankVerdict>,
    /// Greatest rank where the property fails, within the sweep.
    pub fails_at: Option<usize>,
    /// Least rank where the property holds, within the sweep.
    pub holds_at: Option<usize>,
}

fn sweep(
    q: u8,
    t: usize,
    colors: usize,
    max_rank: usize,
    affine: bool,
) -> Result<RamseyBounds, RamseyError> {
    if colors < 2 {
        return Err(RamseyError::EmptyPalette);
    }
    let mut verdicts = Vec::new();
    for rank in t..=max_rank {
        let spec = if affine {
            CatalogSpec::Ag { n: rank - 1, p: q }
        } else {
            CatalogSpec::Pg { n: rank - 1, p: q }
        };
        let m = build_catalog(&spec).map_err(|e| RamseyError::ScaleRefusal {
            what: e.to_string(),
            requested: 0,
            limit: 0,
        })?;
        let space = (colors as u128).saturating_pow(m.size() as u32);
        let mut reports: Vec<AllColoringsReport> = Vec::new();
        if space <= EXHAUSTIVE_WORK_CAP {
            reports.push(all_colorings_mono(&m, t, colors, ColoringSearchMode::Exhaustive)?);
        }
        if colors == 2 {
            reports.push(all_colorings_mono(&m, t, colors, ColoringSearchMode::CapBased)?);
        }
        if reports.is_empty() {
            return Err(RamseyError::ScaleRefusal {
                what: format!("rank-{rank} sweep with {colors} colors over {} points", m.size()),
                requested: space,
                limit: EXHAUSTIVE_WORK_CAP,
            });
        }
        let holds = reports[0].holds;
        debug_assert!(
            reports.iter().all(|r| r.holds == holds),
            "modes disagree at rank {rank}"
        );
        let witness = reports.iter().find_map(|r| r.witness.clone());
        verdicts.push(RankVerdict {
            rank,
            holds,
            modes: reports.iter().flat_map(|r| r.modes.clone()).collect(),
            witness,
            matroid_text: emit_matroid(&m),
            evidence: reports.into_iter().flat_map(|r| r.evidence).collect(),
        });
    }
    let fails_at = verdicts.iter().rev().find(|v| !v.holds).map(|v| v.rank);
    let holds_at = verdicts.iter().find(|v| v.holds).map(|v| v.rank);
    Ok(RamseyBounds { q, t, colors, affine, max_rank, verdicts, fails_at, holds_at })
}

/// For each rank r in t..=max_rank, decides whether every 2-coloring of
/// PG(r−1, q) has a monochromatic rank-t flat.
pub fn small_ramsey_report(q: u8, t: usize, max_rank: usize) -> Result<RamseyBounds, RamseyError> {
    sweep(q, t, 2, max_rank, false)
}

/// Affine form with a configurable palette: colorings of AG(r−1, q).
pub fn small_hj_report(
    q: u8,
    t: usize,
    colors: usize,
    max_rank: usize,
) -> Result<RamseyBounds, RamseyError> {
    sweep(q, t, colors, max_rank, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ramsey::mono_flat_search;
    use crate::textio::parse_matroid;

    #[test]
    fn ramsey_q2_t2_fails_then_holds() {
        let b = small_ramsey_report(2, 2, 3).unwrap();
        assert_eq!(b.fails_at, Some(2));
        assert_eq!(b.holds_at, Some(3));
        let rank2 = &b.verdicts[0];
        assert!(!rank2.holds);
        let w = rank2.witness.as_ref().unwrap();
        let geom = parse_matroid(&rank2.matroid_text).unwrap();
        assert!(mono_flat_search(&geom, w, 2).unwrap().is_none());
    }

    #[test]
    fn ramsey_q3_t2_fails_at_rank_2() {
        let b = small_ramsey_report(3, 2, 2).unwrap();
        assert_eq!(b.fails_at, Some(2));
        assert_eq!(b.holds_at, None);
    }

    #[test]
    fn hj_q3_t2_holds_at_rank_3() {
        let b = small_hj_report(3, 2, 2, 3).unwrap();
        assert_eq!(b.fails_at, Some(2));
        assert_eq!(b.holds_at, Some(3));
    }

    #[test]
    fn hj_q2_t2_fails_at_rank_2() {
        let b = small_hj_report(2, 2, 2, 2).unwrap();
        assert_eq!(b.fails_at, Some(2));
        // AG(1,2) is two points; color them apart
        assert!(b.verdicts[0].witness.is_some());
    }

    #[test]
    fn fails_below_holds_when_both_present() {
        for b in [
            small_ramsey_report(2, 2, 4).unwrap(),
            small_hj_report(3, 2, 2, 3).unwrap(),
        ] {
            if let (Some(f), Some(h)) = (b.fails_at, b.holds_at) {
                assert!(f < h, "fails_at {f} >= holds_at {h}");
            }
        }
    }
}
