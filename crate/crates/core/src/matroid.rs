//! Represented matroids over GF(p).
//!
//! A [`Matroid`] is an ordered list of labeled column vectors over a prime
//! field. Zero columns (loops) are legal: contraction produces them
//! explicitly and [`Matroid::simplify`] removes them as a separate step,
//! so certificates can keep referring to original labels.
//!
//! All operations are pure; matroids are immutable after construction and
//! safe to share across threads.

use crate::gf::{self, EchelonBasis, GfError, GfMat, GfVec, PrimeField, MAX_DIM};
use crate::subset::Subset;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatroidError {
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error("element index {0} outside ground set of size {1}")]
    ElementOutOfRange(usize, usize),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("element {0} is a loop")]
    LoopElement(usize),
    #[error("contracted and deleted sets overlap")]
    OverlappingMinor,
    #[error("label count {0} does not match element count {1}")]
    LabelCountMismatch(usize, usize),
}

/// Size of a smallest circuit, or `Infinite` for free matroids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl std::fmt::Display for Girth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => write!(f, "infinite"),
        }
    }
}

/// Records how a simplification collapsed parallel classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointMap {
    /// Original index → index in the simplified matroid (None for loops).
    pub to_simplified: Vec<Option<usize>>,
    /// For each simplified element, the original indices of its class,
    /// ascending; the representative is the first.
    pub classes: Vec<Vec<usize>>,
}

/// A minor description: contract one subset, delete another.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorRecipe {
    pub contracted: Subset,
    pub deleted: Subset,
}

#[derive(Debug, Clone)]
pub struct Matroid {
    field: PrimeField,
    ambient_dim: usize,
    labels: Vec<String>,
    vectors: Vec<GfVec>,
    /// Packed rows for p = 2 (0 for loops); parallel to `vectors`.
    packed: Option<Vec<u64>>,
    /// Canonical point per element (None for loops).
    canonical: Vec<Option<GfVec>>,
    full_rank: usize,
}

impl Matroid {
    pub fn new(p: u8, ambient_dim: usize, vectors: Vec<GfVec>) -> Result<Self, MatroidError> {
        let labels = (0..vectors.len()).map(|i| format!("e{i}")).collect();
        Self::with_labels(p, ambient_dim, vectors, labels)
    }

    pub fn with_labels(
        p: u8,
        ambient_dim: usize,
        vectors: Vec<GfVec>,
        labels: Vec<String>,
    ) -> Result<Self, MatroidError> {
        if ambient_dim > MAX_DIM {
            return Err(GfError::DimOutOfRange(ambient_dim).into());
        }
        let field = PrimeField::new(p)?;
        if labels.len() != vectors.len() {
            return Err(MatroidError::LabelCountMismatch(labels.len(), vectors.len()));
        }
        {
            let mut seen = std::collections::HashSet::new();
            for l in &labels {
                if !seen.insert(l.as_str()) {
                    return Err(MatroidError::DuplicateLabel(l.clone()));
                }
            }
        }
        for v in &vectors {
            if v.p() != p {
                return Err(GfError::PrimeMismatch(p, v.p()).into());
            }
            if v.dim() != ambient_dim {
                return Err(
                    GfError::DimensionMismatch { expected: ambient_dim, got: v.dim() }.into()
                );
            }
        }
        let packed = (p == 2).then(|| vectors.iter().map(|v| pack_bits(v)).collect());
        let canonical = vectors
            .iter()
            .map(|v| gf::canonical_point(&field, v).ok())
            .collect();
        let mut m = Self {
            field,
            ambient_dim,
            labels,
            vectors,
            packed,
            canonical,
            full_rank: 0,
        };
        m.full_rank = m.rank_of(&Subset::full(m.size()));
        Ok(m)
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.field.p()
    }

    #[inline]
    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Number of ground-set elements.
    #[inline]
    pub fn size(&self) -> usize {
        self.vectors.len()
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.full_rank
    }

    pub fn vector(&self, e: usize) -> &GfVec {
        &self.vectors[e]
    }

    pub fn vectors(&self) -> &[GfVec] {
        &self.vectors
    }

    pub fn label(&self, e: usize) -> &str {
        &self.labels[e]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn ground_set(&self) -> Subset {
        Subset::full(self.size())
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.canonical[e].is_none()
    }

    pub fn loops(&self) -> Subset {
        let mut s = Subset::empty(self.size());
        for e in 0..self.size() {
            if self.is_loop(e) {
                s.insert(e);
            }
        }
        s
    }

    pub fn canonical_vector(&self, e: usize) -> Option<&GfVec> {
        self.canonical[e].as_ref()
    }

    /// True iff `a` and `b` are non-loop scalar multiples of each other.
    pub fn parallel(&self, a: usize, b: usize) -> bool {
        match (&self.canonical[a], &self.canonical[b]) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    /// No loops and no parallel pairs.
    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for c in &self.canonical {
            match c {
                None => return false,
                Some(v) => {
                    if !seen.insert(v.clone()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn check_subset(&self, s: &Subset) -> Result<(), MatroidError> {
        if s.universe() != self.size() {
            return Err(MatroidError::ElementOutOfRange(s.universe(), self.size()));
        }
        Ok(())
    }

    fn basis_of(&self, s: &Subset) -> EchelonBasis {
        let mut basis = EchelonBasis::new(&self.field, self.ambient_dim);
        match (&self.packed, &basis) {
            (Some(bits), EchelonBasis::Bits { .. }) => {
                for e in s.iter() {
                    basis.insert_bits(bits[e]);
                }
            }
            _ => {
                for e in s.iter() {
                    basis.insert_bytes(self.vectors[e].coords());
                }
            }
        }
        basis
    }

    /// Rank of the column set `s` over GF(p).
    pub fn rank_of(&self, s: &Subset) -> usize {
        debug_assert_eq!(s.universe(), self.size());
        self.basis_of(s).rank()
    }

    /// Lexicographically least basis (as element indices) of `span(s)`,
    /// chosen greedily within `s`.
    pub fn greedy_basis(&self, s: &Subset) -> Vec<usize> {
        let mut basis = EchelonBasis::new(&self.field, self.ambient_dim);
        let mut out = Vec::new();
        for e in s.iter() {
            let grew = match &self.packed {
                Some(bits) => basis.insert_bits(bits[e]),
                None => basis.insert_bytes(self.vectors[e].coords()),
            };
            if grew {
                out.push(e);
            }
        }
        out
    }

    /// All elements whose vectors lie in span(s); always contains the loops.
    pub fn closure(&self, s: &Subset) -> Subset {
        debug_assert_eq!(s.universe(), self.size());
        let basis = self.basis_of(s);
        let mut out = Subset::empty(self.size());
        match &self.packed {
            Some(bits) => {
                for e in 0..self.size() {
                    if basis.contains_bits(bits[e]) {
                        out.insert(e);
                    }
                }
            }
            None => {
                for e in 0..self.size() {
                    if basis.contains_bytes(self.vectors[e].coords()) {
                        out.insert(e);
                    }
                }
            }
        }
        out
    }

    pub fn is_independent(&self, s: &Subset) -> bool {
        self.rank_of(s) == s.len()
    }

    pub fn is_flat(&self, s: &Subset) -> bool {
        &self.closure(s) == s
    }

    /// Drops loops and merges parallel classes onto their least-index
    /// representative.
    pub fn simplify(&self) -> (Matroid, PointMap) {
        let mut class_of: std::collections::HashMap<GfVec, usize> = std::collections::HashMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut to_simplified = vec![None; self.size()];
        for e in 0..self.size() {
            let Some(c) = &self.canonical[e] else { continue };
            let idx = *class_of.entry(c.clone()).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[idx].push(e);
            to_simplified[e] = Some(idx);
        }
        let vectors: Vec<GfVec> =
            classes.iter().map(|cls| self.vectors[cls[0]].clone()).collect();
        let labels: Vec<String> =
            classes.iter().map(|cls| self.labels[cls[0]].clone()).collect();
        let simplified =
            Matroid::with_labels(self.p(), self.ambient_dim, vectors, labels).expect("simplify");
        (simplified, PointMap { to_simplified, classes })
    }

    /// General minor: contract one subset, then delete another.
    ///
    /// Returns the minor together with the map from its element indices to
    /// the parent's. Contracted spans become explicit zero columns (loops)
    /// on the surviving elements inside them.
    pub fn minor_mapped(&self, recipe: &MinorRecipe) -> Result<(Matroid, Vec<usize>), MatroidError> {
        self.check_subset(&recipe.contracted)?;
        self.check_subset(&recipe.deleted)?;
        if !recipe.contracted.is_disjoint_from(&recipe.deleted) {
            return Err(MatroidError::OverlappingMinor);
        }
        // Row-reduce a basis of span(contracted); reducing any vector by these
        // rows zeroes its pivot coordinates, and dropping the pivot
        // coordinates realizes the projection along span(contracted).
        let basis_idx = self.greedy_basis(&recipe.contracted);
        let rows: Vec<GfVec> = basis_idx.iter().map(|&e| self.vectors[e].clone()).collect();
        let rref = GfMat::from_rows(self.p(), self.ambient_dim, &rows)?.rref();
        let pivots = &rref.pivots;
        let keep_coords: Vec<usize> =
            (0..self.ambient_dim).filter(|c| !pivots.contains(c)).collect();
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        let mut map = Vec::new();
        for e in 0..self.size() {
            if recipe.contracted.contains(e) || recipe.deleted.contains(e) {
                continue;
            }
            let mut w: Vec<u8> = self.vectors[e].coords().to_vec();
            for (ri, &pc) in pivots.iter().enumerate() {
                let c = w[pc];
                if c != 0 {
                    let f = self.field.neg(c);
                    for j in 0..self.ambient_dim {
                        w[j] = self.field.add(w[j], self.field.mul(f, rref.matrix.get(ri, j)));
                    }
                }
            }
            let coords: Vec<u8> = keep_coords.iter().map(|&j| w[j]).collect();
            vectors.push(GfVec::new(self.p(), coords)?);
            labels.push(self.labels[e].clone());
            map.push(e);
        }
        let minor = Matroid::with_labels(self.p(), keep_coords.len(), vectors, labels)?;
        Ok((minor, map))
    }

    pub fn minor(&self, recipe: &MinorRecipe) -> Result<Matroid, MatroidError> {
        Ok(self.minor_mapped(recipe)?.0)
    }

    pub fn contract(&self, s: &Subset) -> Result<Matroid, MatroidError> {
        self.minor(&MinorRecipe { contracted: s.clone(), deleted: Subset::empty(self.size()) })
    }

    pub fn contract_mapped(&self, s: &Subset) -> Result<(Matroid, Vec<usize>), MatroidError> {
        self.minor_mapped(&MinorRecipe {
            contracted: s.clone(),
            deleted: Subset::empty(self.size()),
        })
    }

    pub fn delete(&self, s: &Subset) -> Result<Matroid, MatroidError> {
        self.minor(&MinorRecipe { contracted: Subset::empty(self.size()), deleted: s.clone() })
    }

    pub fn restrict(&self, s: &Subset) -> Result<Matroid, MatroidError> {
        self.delete(&s.complement())
    }

    pub fn restrict_mapped(&self, s: &Subset) -> Result<(Matroid, Vec<usize>), MatroidError> {
        self.minor_mapped(&MinorRecipe {
            contracted: Subset::empty(self.size()),
            deleted: s.complement(),
        })
    }

    /// Partition of the non-loop elements into connectivity classes.
    ///
    /// Components are generated by the fundamental circuits of a fixed
    /// greedy basis: for each non-basis element, union it with the basis
    /// elements appearing in its coordinate expansion. Sorted by minimum
    /// element.
    pub fn connected_components(&self) -> Vec<Subset> {
        let n = self.size();
        let mut dsu = Dsu::new(n);
        let basis_idx = self.greedy_basis(&self.ground_set());
        if !basis_idx.is_empty() {
            let cols: Vec<GfVec> = basis_idx.iter().map(|&e| self.vectors[e].clone()).collect();
            let basis_mat = GfMat::from_cols(self.p(), self.ambient_dim, &cols).expect("basis");
            for e in 0..n {
                if self.is_loop(e) || basis_idx.contains(&e) {
                    continue;
                }
                let coeffs = gf::in_span(&basis_mat, &self.vectors[e])
                    .expect("shape")
                    .expect("basis spans ground set");
                for (i, &c) in coeffs.coords().iter().enumerate() {
                    if c != 0 {
                        dsu.union(e, basis_idx[i]);
                    }
                }
            }
        }
        let mut by_root: std::collections::BTreeMap<usize, Subset> = Default::default();
        for e in 0..n {
            if self.is_loop(e) {
                continue;
            }
            let root = dsu.find(e);
            by_root.entry(root).or_insert_with(|| Subset::empty(n)).insert(e);
        }
        let mut out: Vec<Subset> = by_root.into_values().collect();
        out.sort();
        out
    }

    /// The whole matroid is connected (and has at least one non-loop element).
    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    pub fn is_coloop(&self, e: usize) -> Result<bool, MatroidError> {
        if e >= self.size() {
            return Err(MatroidError::ElementOutOfRange(e, self.size()));
        }
        let rest = self.ground_set().without(e);
        Ok(self.rank_of(&rest) + 1 == self.full_rank)
    }

    /// Size of a smallest circuit.
    ///
    /// Searched by increasing size with an independent-prefix DFS; circuits
    /// have at most rank+1 elements, so free matroids fall through to
    /// `Infinite`.
    pub fn girth(&self) -> Girth {
        let n = self.size();
        if !self.loops().is_empty() {
            return Girth::Finite(1);
        }
        {
            let mut seen = std::collections::HashSet::new();
            for c in self.canonical.iter().flatten() {
                if !seen.insert(c) {
                    return Girth::Finite(2);
                }
            }
        }
        for s in 3..=(self.full_rank + 1).min(n) {
            if self.has_dependent_subset_of_size(s) {
                return Girth::Finite(s);
            }
        }
        Girth::Infinite
    }

    fn has_dependent_subset_of_size(&self, s: usize) -> bool {
        // DFS over ascending indices; the first s-1 picks stay independent
        // (smaller dependent sets were ruled out by earlier sizes).
        fn rec(m: &Matroid, start: usize, chosen: &mut Vec<usize>, s: usize) -> bool {
            let n = m.size();
            if chosen.len() + (n - start) < s {
                return false;
            }
            let mut set = Subset::empty(n);
            for &c in chosen.iter() {
                set.insert(c);
            }
            for e in start..n {
                let r_new = m.rank_of(&set.with(e));
                if r_new == chosen.len() {
                    // e in span of chosen: dependent set of size |chosen|+1
                    if chosen.len() + 1 == s {
                        return true;
                    }
                    continue;
                }
                if chosen.len() + 1 < s {
                    chosen.push(e);
                    if rec(m, e + 1, chosen, s) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        rec(self, 0, &mut Vec::new(), s)
    }

    /// Rank-1 flats: the parallel classes of non-loop elements, sorted by
    /// minimum element.
    pub fn points(&self) -> Vec<Subset> {
        let mut by_canon: std::collections::BTreeMap<&GfVec, Subset> = Default::default();
        for e in 0..self.size() {
            if let Some(c) = &self.canonical[e] {
                by_canon.entry(c).or_insert_with(|| Subset::empty(self.size())).insert(e);
            }
        }
        let mut out: Vec<Subset> = by_canon.into_values().collect();
        out.sort();
        out
    }

    /// Number of rank-1 flats inside `s`.
    pub fn point_count(&self, s: &Subset) -> usize {
        let mut seen = std::collections::HashSet::new();
        for e in s.iter() {
            if let Some(c) = &self.canonical[e] {
                seen.insert(c);
            }
        }
        seen.len()
    }

    /// Every rank-2 flat containing the non-loop element `e`, sorted.
    pub fn lines_through(&self, e: usize) -> Result<Vec<Subset>, MatroidError> {
        if e >= self.size() {
            return Err(MatroidError::ElementOutOfRange(e, self.size()));
        }
        if self.is_loop(e) {
            return Err(MatroidError::LoopElement(e));
        }
        let point_e = self.closure(&Subset::empty(self.size()).with(e));
        let mut lines = std::collections::BTreeSet::new();
        for f in 0..self.size() {
            if self.is_loop(f) || point_e.contains(f) {
                continue;
            }
            let mut pair = Subset::empty(self.size());
            pair.insert(e);
            pair.insert(f);
            lines.insert(self.closure(&pair));
        }
        Ok(lines.into_iter().collect())
    }

    /// Restriction of `M` to a subset while keeping the parent's element
    /// indexing: rank, closure and connectivity restricted to `scope`.
    /// Valid for any scope; when `scope` is a flat, flats of the
    /// restriction within scope are exactly flats of `M` inside it.
    pub fn components_within(&self, scope: &Subset) -> Vec<Subset> {
        let (sub, map) = self
            .restrict_mapped(scope)
            .expect("scope within ground set");
        sub.connected_components()
            .into_iter()
            .map(|c| {
                let mut s = Subset::empty(self.size());
                for i in c.iter() {
                    s.insert(map[i]);
                }
                s
            })
            .collect()
    }
}

fn pack_bits(v: &GfVec) -> u64 {
    let mut w = 0u64;
    for (i, &c) in v.coords().iter().enumerate() {
        if c != 0 {
            w |= 1 << i;
        }
    }
    w
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // deterministic: smaller root wins
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_catalog, CatalogSpec};

    fn vecp(p: u8, coords: &[u8]) -> GfVec {
        GfVec::new(p, coords.to_vec()).unwrap()
    }

    fn pg(n: usize, p: u8) -> Matroid {
        build_catalog(&CatalogSpec::Pg { n, p }).unwrap()
    }

    #[test]
    fn rank_basics() {
        let m = pg(2, 2);
        assert_eq!(m.rank(), 3);
        assert_eq!(m.rank_of(&Subset::empty(7)), 0);
        let parallel =
            Matroid::new(3, 2, vec![vecp(3, &[1, 0]), vecp(3, &[2, 0]), vecp(3, &[0, 1])]).unwrap();
        assert_eq!(parallel.rank_of(&Subset::from_indices(3, &[0, 1])), 1);
    }

    #[test]
    fn closure_of_two_fano_points_is_their_line() {
        let m = pg(2, 2);
        // columns in lex vector order: index 0=(0,0,1), 1=(0,1,0), 2=(0,1,1), ...
        let cl = m.closure(&Subset::from_indices(7, &[0, 1]));
        assert_eq!(cl.indices(), vec![0, 1, 2]);
        assert_eq!(m.closure(&Subset::empty(7)).len(), 0);
    }

    #[test]
    fn closure_in_direct_sum_of_two_lines() {
        let m = build_catalog(&"sum:pg:1,2+pg:1,2".parse::<CatalogSpec>().unwrap()).unwrap();
        assert_eq!(m.size(), 6);
        // one element from each line: the span realizes only those two
        let cl = m.closure(&Subset::from_indices(6, &[0, 3]));
        assert_eq!(cl.indices(), vec![0, 3]);
    }

    #[test]
    fn independence_and_flats() {
        let m = pg(3, 2);
        let units = Subset::from_indices(15, &[0, 1, 3, 7]);
        assert_eq!(m.rank_of(&units), 4);
        assert!(m.is_independent(&units));
        let fano = pg(2, 2);
        let line = Subset::from_indices(7, &[0, 1, 2]);
        assert!(fano.is_flat(&line));
        assert!(!fano.is_independent(&line));
        let pair = Subset::from_indices(7, &[0, 1]);
        assert!(fano.is_independent(&pair));
        assert!(!fano.is_flat(&pair));
    }

    #[test]
    fn simplify_identity_on_simple() {
        let m = pg(2, 2);
        let (s, map) = m.simplify();
        assert_eq!(s.size(), 7);
        assert!(s.is_simple());
        assert_eq!(map.classes.len(), 7);
        assert!(map.to_simplified.iter().all(|x| x.is_some()));
    }

    #[test]
    fn simplify_merges_parallel_gf3() {
        let m =
            Matroid::new(3, 2, vec![vecp(3, &[1, 0]), vecp(3, &[2, 0]), vecp(3, &[0, 1])]).unwrap();
        let (s, map) = m.simplify();
        assert_eq!(s.size(), 2);
        assert_eq!(map.classes[0], vec![0, 1]);
        assert_eq!(map.to_simplified, vec![Some(0), Some(0), Some(1)]);
    }

    #[test]
    fn contract_point_of_fano() {
        let m = pg(2, 2);
        let minor = m.contract(&Subset::from_indices(7, &[0])).unwrap();
        assert_eq!(minor.size(), 6);
        assert_eq!(minor.rank(), 2);
        // 3 parallel pairs: one per line through the contracted point
        let (simple, map) = minor.simplify();
        assert_eq!(simple.size(), 3);
        assert_eq!(simple.rank(), 2);
        assert!(map.classes.iter().all(|c| c.len() == 2));
    }

    #[test]
    fn fano_contract_then_simplify_is_three_point_line() {
        let m = pg(2, 2);
        let minor = m.contract(&Subset::from_indices(7, &[3])).unwrap();
        let (simple, _) = minor.simplify();
        assert_eq!((simple.size(), simple.rank()), (3, 2));
        // U_{2,3}: every pair spans the third
        assert_eq!(simple.closure(&Subset::from_indices(3, &[0, 1])).len(), 3);
    }

    #[test]
    fn delete_everything() {
        let m = pg(2, 2);
        let empty = m.delete(&m.ground_set()).unwrap();
        assert_eq!(empty.size(), 0);
        assert_eq!(empty.rank(), 0);
        assert_eq!(empty.girth(), Girth::Infinite);
        assert!(empty.connected_components().is_empty());
    }

    #[test]
    fn restrict_fano_to_line_is_u23() {
        let m = pg(2, 2);
        let line = m.closure(&Subset::from_indices(7, &[0, 1]));
        let r = m.restrict(&line).unwrap();
        assert_eq!((r.size(), r.rank()), (3, 2));
    }

    #[test]
    fn contraction_rank_identity() {
        let m = pg(3, 2);
        for s in [
            Subset::from_indices(15, &[0]),
            Subset::from_indices(15, &[0, 1]),
            Subset::from_indices(15, &[0, 1, 3]),
            Subset::from_indices(15, &[2, 5, 9, 14]),
        ] {
            let minor = m.contract(&s).unwrap();
            assert_eq!(minor.rank(), m.rank() - m.rank_of(&s));
        }
    }

    #[test]
    fn components_of_direct_sum() {
        let m = build_catalog(&"sum:pg:1,2+pg:1,2".parse::<CatalogSpec>().unwrap()).unwrap();
        let comps = m.connected_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].indices(), vec![0, 1, 2]);
        assert_eq!(comps[1].indices(), vec![3, 4, 5]);
        assert!(pg(2, 2).is_connected());
        let free = build_catalog(&CatalogSpec::Free { r: 3, p: 2 }).unwrap();
        assert_eq!(free.connected_components().len(), 3);
    }

    #[test]
    fn component_ranks_add_up() {
        for spec in ["sum:pg:2,2+pg:1,2", "pg:2,3", "free:4,3", "sum:free:2,2+pg:1,2"] {
            let m = build_catalog(&spec.parse::<CatalogSpec>().unwrap()).unwrap();
            let total: usize = m.connected_components().iter().map(|c| m.rank_of(c)).sum();
            assert_eq!(total, m.rank(), "spec {spec}");
        }
    }

    #[test]
    fn coloops() {
        let free = build_catalog(&CatalogSpec::Free { r: 3, p: 2 }).unwrap();
        for e in 0..3 {
            assert!(free.is_coloop(e).unwrap());
        }
        let fano = pg(2, 2);
        for e in 0..7 {
            assert!(!fano.is_coloop(e).unwrap());
        }
        // a 3-point line plus one coloop column
        let m = build_catalog(&"sum:pg:1,2+free:1,2".parse::<CatalogSpec>().unwrap()).unwrap();
        assert!(!m.is_coloop(0).unwrap());
        assert!(m.is_coloop(3).unwrap());
    }

    #[test]
    fn girth_values() {
        let ag22 = build_catalog(&CatalogSpec::Ag { n: 2, p: 2 }).unwrap();
        assert_eq!(ag22.girth(), Girth::Finite(4));
        assert_eq!(pg(2, 2).girth(), Girth::Finite(3));
        let free = build_catalog(&CatalogSpec::Free { r: 4, p: 3 }).unwrap();
        assert_eq!(free.girth(), Girth::Infinite);
        let with_loop = Matroid::new(2, 2, vec![vecp(2, &[0, 0]), vecp(2, &[1, 0])]).unwrap();
        assert_eq!(with_loop.girth(), Girth::Finite(1));
        let with_parallel =
            Matroid::new(2, 2, vec![vecp(2, &[1, 0]), vecp(2, &[1, 0])]).unwrap();
        assert_eq!(with_parallel.girth(), Girth::Finite(2));
    }

    #[test]
    fn lines_through_fano_point() {
        let m = pg(2, 2);
        for e in 0..7 {
            let lines = m.lines_through(e).unwrap();
            assert_eq!(lines.len(), 3, "e={e}");
            assert!(lines.iter().all(|l| l.len() == 3 && l.contains(e)));
        }
    }

    #[test]
    fn lines_through_ag23_point() {
        let m = build_catalog(&CatalogSpec::Ag { n: 2, p: 3 }).unwrap();
        let lines = m.lines_through(0).unwrap();
        assert_eq!(lines.len(), 4);
        assert!(lines.iter().all(|l| l.len() == 3));
    }

    #[test]
    fn points_merge_parallel_pairs() {
        let m =
            Matroid::new(3, 2, vec![vecp(3, &[1, 0]), vecp(3, &[2, 0]), vecp(3, &[0, 1])]).unwrap();
        let pts = m.points();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].indices(), vec![0, 1]);
    }

    #[test]
    fn loops_stay_in_closures_and_out_of_components() {
        let m = Matroid::new(2, 2, vec![vecp(2, &[0, 0]), vecp(2, &[1, 0]), vecp(2, &[0, 1])])
            .unwrap();
        assert!(m.closure(&Subset::empty(3)).contains(0));
        let comps = m.connected_components();
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| !c.contains(0)));
    }
}
