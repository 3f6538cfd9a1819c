//! Named fixture matroids and the spec-string syntax that builds them.
//!
//! Supported specs: `pg:n,p` `ag:n,p` `reid:p` `free:r,p`
//! `sum:<spec>+<spec>` `random:r,n,p,seed`. Construction is deterministic;
//! element order is lexicographic on coordinate vectors (units in column
//! order for `free`).

use crate::gf::{self, GfVec, PrimeField};
use crate::matroid::{Matroid, MatroidError};
use crate::subset::Subset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use thiserror::Error;

/// Hard cap on catalog ground sets; larger geometries are out of scope.
const MAX_POINTS: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("invalid catalog spec {0:?}: {1}")]
    Parse(String, String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CatalogSpec {
    Pg { n: usize, p: u8 },
    Ag { n: usize, p: u8 },
    Reid { p: u8 },
    Free { r: usize, p: u8 },
    Sum(Box<CatalogSpec>, Box<CatalogSpec>),
    Random { r: usize, n: usize, p: u8, seed: u64 },
}

impl std::fmt::Display for CatalogSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CatalogSpec::Pg { n, p } => write!(f, "pg:{n},{p}"),
            CatalogSpec::Ag { n, p } => write!(f, "ag:{n},{p}"),
            CatalogSpec::Reid { p } => write!(f, "reid:{p}"),
            CatalogSpec::Free { r, p } => write!(f, "free:{r},{p}"),
            CatalogSpec::Sum(a, b) => write!(f, "sum:{a}+{b}"),
            CatalogSpec::Random { r, n, p, seed } => write!(f, "random:{r},{n},{p},{seed}"),
        }
    }
}

impl FromStr for CatalogSpec {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, CatalogError> {
        let bad = |why: &str| CatalogError::Parse(s.to_string(), why.to_string());
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected <name>:<params>"))?;
        let nums = |rest: &str, n: usize| -> Result<Vec<u64>, CatalogError> {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != n {
                return Err(bad(&format!("expected {n} comma-separated parameters")));
            }
            parts
                .iter()
                .map(|t| t.trim().parse::<u64>().map_err(|e| bad(&e.to_string())))
                .collect()
        };
        match head {
            "pg" => {
                let v = nums(rest, 2)?;
                Ok(CatalogSpec::Pg { n: v[0] as usize, p: v[1] as u8 })
            }
            "ag" => {
                let v = nums(rest, 2)?;
                Ok(CatalogSpec::Ag { n: v[0] as usize, p: v[1] as u8 })
            }
            "reid" => {
                let v = nums(rest, 1)?;
                Ok(CatalogSpec::Reid { p: v[0] as u8 })
            }
            "free" => {
                let v = nums(rest, 2)?;
                Ok(CatalogSpec::Free { r: v[0] as usize, p: v[1] as u8 })
            }
            "random" => {
                let v = nums(rest, 4)?;
                Ok(CatalogSpec::Random {
                    r: v[0] as usize,
                    n: v[1] as usize,
                    p: v[2] as u8,
                    seed: v[3],
                })
            }
            "sum" => {
                // split at the first top-level '+' where both halves parse
                for (i, ch) in rest.char_indices() {
                    if ch != '+' {
                        continue;
                    }
                    if let (Ok(a), Ok(b)) =
                        (rest[..i].parse::<CatalogSpec>(), rest[i + 1..].parse::<CatalogSpec>())
                    {
                        return Ok(CatalogSpec::Sum(Box::new(a), Box::new(b)));
                    }
                }
                Err(bad("sum needs two '+'-separated sub-specs"))
            }
            other => Err(bad(&format!("unknown catalog kind {other:?}"))),
        }
    }
}

/// All canonical points of GF(p)^dim, lexicographically.
fn canonical_points(p: u8, dim: usize) -> Result<Vec<GfVec>, CatalogError> {
    let count = crate::flats::pg_point_count(p, dim)
        .filter(|&c| c <= MAX_POINTS)
        .ok_or_else(|| CatalogError::InvalidParams(format!("pg dimension {dim} too large")))?;
    let _ = count;
    gf::hyperplanes_of(dim, p)
        .map(|it| it.collect())
        .map_err(|e| CatalogError::InvalidParams(e.to_string()))
}

pub fn build_catalog(spec: &CatalogSpec) -> Result<Matroid, CatalogError> {
    match spec {
        CatalogSpec::Pg { n, p } => {
            let dim = n + 1;
            let points = canonical_points(*p, dim)?;
            Ok(Matroid::new(*p, dim, points)?)
        }
        CatalogSpec::Ag { n, p } => {
            let dim = n + 1;
            let count = (*p as u64)
                .checked_pow(*n as u32)
                .filter(|&c| c <= MAX_POINTS)
                .ok_or_else(|| CatalogError::InvalidParams(format!("ag:{n},{p} too large")))?;
            let mut points = Vec::with_capacity(count as usize);
            let mut tail = vec![0u8; *n];
            loop {
                let mut coords = vec![1u8];
                coords.extend_from_slice(&tail);
                points.push(
                    GfVec::new(*p, coords)
                        .map_err(|e| CatalogError::InvalidParams(e.to_string()))?,
                );
                if !bump(*p, &mut tail) {
                    break;
                }
            }
            Ok(Matroid::new(*p, dim, points)?)
        }
        CatalogSpec::Reid { p } => {
            // three concurrent full lines in PG(2,p): apex (0,0,1), line
            // directions (1,0,0), (0,1,0), (1,1,0)
            let field =
                PrimeField::new(*p).map_err(|e| CatalogError::InvalidParams(e.to_string()))?;
            let apex = GfVec::new(*p, vec![0, 0, 1]).expect("apex");
            let dirs = [[1u8, 0, 0], [0, 1, 0], [1, 1, 0]];
            let mut set = std::collections::BTreeSet::new();
            set.insert(apex.clone());
            for d in dirs {
                for c in 0..*p {
                    let v = GfVec::new(*p, vec![d[0], d[1], c]).expect("line point");
                    set.insert(gf::canonical_point(&field, &v).expect("nonzero"));
                }
            }
            let points: Vec<GfVec> = set.into_iter().collect();
            Ok(Matroid::new(*p, 3, points)?)
        }
        CatalogSpec::Free { r, p } => {
            let mut points = Vec::with_capacity(*r);
            for i in 0..*r {
                let mut coords = vec![0u8; *r];
                coords[i] = 1;
                points.push(
                    GfVec::new(*p, coords)
                        .map_err(|e| CatalogError::InvalidParams(e.to_string()))?,
                );
            }
            Ok(Matroid::new(*p, *r, points)?)
        }
        CatalogSpec::Sum(a, b) => {
            let ma = build_catalog(a)?;
            let mb = build_catalog(b)?;
            if ma.p() != mb.p() {
                return Err(CatalogError::InvalidParams(format!(
                    "sum of different fields GF({}) and GF({})",
                    ma.p(),
                    mb.p()
                )));
            }
            let dim = ma.ambient_dim() + mb.ambient_dim();
            let mut points = Vec::with_capacity(ma.size() + mb.size());
            for v in ma.vectors() {
                let mut coords = v.coords().to_vec();
                coords.resize(dim, 0);
                points.push(GfVec::new(ma.p(), coords).expect("pad"));
            }
            for v in mb.vectors() {
                let mut coords = vec![0u8; ma.ambient_dim()];
                coords.extend_from_slice(v.coords());
                points.push(GfVec::new(ma.p(), coords).expect("pad"));
            }
            Ok(Matroid::new(ma.p(), dim, points)?)
        }
        CatalogSpec::Random { r, n, p, seed } => {
            let pool = canonical_points(*p, *r)?;
            if *n < *r || *n > pool.len() {
                return Err(CatalogError::InvalidParams(format!(
                    "random:{r},{n},{p}: need r <= n <= {}",
                    pool.len()
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for _attempt in 0..1000 {
                let chosen = sample_distinct(&mut rng, pool.len(), *n);
                let mut vecs: Vec<GfVec> = chosen.iter().map(|&i| pool[i].clone()).collect();
                vecs.sort();
                let m = Matroid::new(*p, *r, vecs)?;
                if m.rank() == *r {
                    return Ok(m);
                }
            }
            Err(CatalogError::InvalidParams(format!(
                "random:{r},{n},{p},{seed}: no spanning sample found"
            )))
        }
    }
}

/// Convenience: the full ground set of a catalog matroid built from text.
pub fn ground_of(spec: &str) -> Result<(Matroid, Subset), CatalogError> {
    let m = build_catalog(&spec.parse()?)?;
    let g = m.ground_set();
    Ok((m, g))
}

fn bump(p: u8, v: &mut [u8]) -> bool {
    for i in (0..v.len()).rev() {
        if v[i] + 1 < p {
            v[i] += 1;
            for c in v.iter_mut().skip(i + 1) {
                *c = 0;
            }
            return true;
        }
    }
    false
}

/// Partial Fisher-Yates: k distinct indices from 0..n, order discarded.
fn sample_distinct(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flats::enumerate_flats;

    #[test]
    fn pg22_shape() {
        let m = build_catalog(&CatalogSpec::Pg { n: 2, p: 2 }).unwrap();
        assert_eq!((m.size(), m.rank()), (7, 3));
        assert!(m.is_simple());
    }

    #[test]
    fn ag_counts() {
        let m = build_catalog(&CatalogSpec::Ag { n: 2, p: 3 }).unwrap();
        assert_eq!((m.size(), m.rank()), (9, 3));
        for line in enumerate_flats(&m, 2) {
            assert_eq!(line.elements.len(), 3);
        }
    }

    #[test]
    fn sum_of_lines() {
        let m = build_catalog(&"sum:pg:1,2+pg:1,2".parse::<CatalogSpec>().unwrap()).unwrap();
        assert_eq!((m.size(), m.rank()), (6, 4));
        assert_eq!(m.connected_components().len(), 2);
    }

    #[test]
    fn reid_fixture_shape() {
        let r2 = build_catalog(&CatalogSpec::Reid { p: 2 }).unwrap();
        assert_eq!((r2.size(), r2.rank()), (7, 3)); // reid(2) is the Fano plane
        let r3 = build_catalog(&CatalogSpec::Reid { p: 3 }).unwrap();
        assert_eq!((r3.size(), r3.rank()), (10, 3));
        assert!(r3.is_simple());
        // apex (0,0,1) lies on three full 4-point lines
        let apex = r3
            .vectors()
            .iter()
            .position(|v| v.coords() == [0, 0, 1])
            .unwrap();
        let lines = r3.lines_through(apex).unwrap();
        let full: Vec<_> = lines.iter().filter(|l| l.len() == 4).collect();
        assert_eq!(full.len(), 3);
    }

    #[test]
    fn free_matroid() {
        let m = build_catalog(&CatalogSpec::Free { r: 5, p: 3 }).unwrap();
        assert_eq!((m.size(), m.rank()), (5, 5));
    }

    #[test]
    fn random_is_seed_deterministic_and_spanning() {
        let spec = CatalogSpec::Random { r: 4, n: 8, p: 3, seed: 42 };
        let a = build_catalog(&spec).unwrap();
        let b = build_catalog(&spec).unwrap();
        assert_eq!(a.vectors(), b.vectors());
        assert_eq!(a.rank(), 4);
        assert!(a.is_simple());
        let other = build_catalog(&CatalogSpec::Random { r: 4, n: 8, p: 3, seed: 43 }).unwrap();
        assert!(a.vectors() != other.vectors());
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in [
            "pg:2,2",
            "ag:3,2",
            "reid:3",
            "free:4,5",
            "sum:pg:1,2+pg:1,2",
            "sum:sum:pg:1,2+pg:1,2+free:2,2",
            "random:3,6,2,7",
        ] {
            let spec: CatalogSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            build_catalog(&spec).unwrap();
        }
    }

    #[test]
    fn bad_specs_rejected() {
        assert!("pg:2".parse::<CatalogSpec>().is_err());
        assert!("pg:2,4".parse::<CatalogSpec>().and_then(|s| build_catalog(&s)).is_err());
        assert!("nope:1".parse::<CatalogSpec>().is_err());
        assert!("random:5,3,2,1".parse::<CatalogSpec>().and_then(|s| build_catalog(&s)).is_err());
    }
}
