//! Ground-set subsets as bitsets.
//!
//! All enumeration and tie-breaking in the crate is expressed through the
//! total order on [`Subset`]: lexicographic comparison of the ascending
//! element-index sequences. `{0,3} < {1,2}` and `{0,2} < {0,2,5}`.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    universe: usize,
    blocks: Vec<u64>,
}

impl Subset {
    pub fn empty(universe: usize) -> Self {
        Self { universe, blocks: vec![0; universe.div_ceil(64)] }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(universe: usize, indices: &[usize]) -> Self {
        let mut s = Self::empty(universe);
        for &i in indices {
            s.insert(i);
        }
        s
    }

    /// From a bitmask, for universes up to 64.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        assert!(universe <= 64);
        let mut s = Self::empty(universe);
        if !s.blocks.is_empty() {
            s.blocks[0] = mask;
        } else if mask != 0 {
            panic!("mask bits outside empty universe");
        }
        s
    }

    pub fn as_mask(&self) -> u64 {
        assert!(self.universe <= 64);
        self.blocks.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.blocks[i / 64] & (1u64 << (i % 64)) != 0
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.universe, "index {i} outside universe {}", self.universe);
        self.blocks[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        if i < self.universe {
            self.blocks[i / 64] &= !(1u64 << (i % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn union(&self, other: &Subset) -> Subset {
        assert_eq!(self.universe, other.universe);
        Subset {
            universe: self.universe,
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        assert_eq!(self.universe, other.universe);
        Subset {
            universe: self.universe,
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        assert_eq!(self.universe, other.universe);
        Subset {
            universe: self.universe,
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a & !b).collect(),
        }
    }

    pub fn complement(&self) -> Subset {
        let mut out = Subset::full(self.universe);
        for (o, s) in out.blocks.iter_mut().zip(&self.blocks) {
            *o &= !s;
        }
        out
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        assert_eq!(self.universe, other.universe);
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint_from(&self, other: &Subset) -> bool {
        assert_eq!(self.universe, other.universe);
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & b == 0)
    }

    /// Ascending element indices.
    pub fn iter(&self) -> SubsetIter<'_> {
        SubsetIter { set: self, block: 0, bits: self.blocks.first().copied().unwrap_or(0) }
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min_element(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn with(&self, i: usize) -> Subset {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    pub fn without(&self, i: usize) -> Subset {
        let mut s = self.clone();
        s.remove(i);
        s
    }
}

pub struct SubsetIter<'a> {
    set: &'a Subset,
    block: usize,
    bits: u64,
}

impl Iterator for SubsetIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.bits != 0 {
                let tz = self.bits.trailing_zeros() as usize;
                self.bits &= self.bits - 1;
                return Some(self.block * 64 + tz);
            }
            self.block += 1;
            if self.block >= self.set.blocks.len() {
                return None;
            }
            self.bits = self.set.blocks[self.block];
        }
    }
}

impl<'a> IntoIterator for &'a Subset {
    type Item = usize;
    type IntoIter = SubsetIter<'a>;
    fn into_iter(self) -> SubsetIter<'a> {
        self.iter()
    }
}

impl Ord for Subset {
    /// Lexicographic order on the ascending index sequences.
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.iter();
        let mut b = other.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) => match x.cmp(&y) {
                    Ordering::Equal => continue,
                    ord => return ord,
                },
            }
        }
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Subset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            universe: usize,
            elements: Vec<usize>,
        }
        Repr { universe: self.universe, elements: self.indices() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            universe: usize,
            elements: Vec<usize>,
        }
        let r = Repr::deserialize(de)?;
        for &i in &r.elements {
            if i >= r.universe {
                return Err(serde::de::Error::custom(format!(
                    "element {i} outside universe {}",
                    r.universe
                )));
            }
        }
        Ok(Subset::from_indices(r.universe, &r.elements))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let mut s = Subset::empty(10);
        s.insert(3);
        s.insert(7);
        assert!(s.contains(3) && s.contains(7) && !s.contains(0));
        assert_eq!(s.len(), 2);
        assert_eq!(s.indices(), vec![3, 7]);
        s.remove(3);
        assert_eq!(s.indices(), vec![7]);
    }

    #[test]
    fn lex_order_examples() {
        let u = 8;
        let s = |idx: &[usize]| Subset::from_indices(u, idx);
        assert!(s(&[0, 3]) < s(&[1, 2]));
        assert!(s(&[0, 2]) < s(&[0, 2, 5]));
        assert!(s(&[0, 2, 5]) < s(&[0, 3]));
        assert!(s(&[]) < s(&[0]));
    }

    #[test]
    fn large_universe() {
        let mut s = Subset::empty(200);
        s.insert(0);
        s.insert(64);
        s.insert(130);
        s.insert(199);
        assert_eq!(s.indices(), vec![0, 64, 130, 199]);
        assert_eq!(s.complement().len(), 196);
    }

    fn naive_cmp(a: &[usize], b: &[usize]) -> Ordering {
        a.cmp(b)
    }

    proptest! {
        #[test]
        fn ord_matches_naive(a in proptest::collection::btree_set(0usize..100, 0..12),
                             b in proptest::collection::btree_set(0usize..100, 0..12)) {
            let av: Vec<usize> = a.iter().copied().collect();
            let bv: Vec<usize> = b.iter().copied().collect();
            let sa = Subset::from_indices(100, &av);
            let sb = Subset::from_indices(100, &bv);
            prop_assert_eq!(sa.cmp(&sb), naive_cmp(&av, &bv));
        }

        #[test]
        fn set_algebra(a in proptest::collection::btree_set(0usize..70, 0..20),
                       b in proptest::collection::btree_set(0usize..70, 0..20)) {
            let av: Vec<usize> = a.iter().copied().collect();
            let bv: Vec<usize> = b.iter().copied().collect();
            let sa = Subset::from_indices(70, &av);
            let sb = Subset::from_indices(70, &bv);
            let uni: std::collections::BTreeSet<usize> = a.union(&b).copied().collect();
            let int: std::collections::BTreeSet<usize> = a.intersection(&b).copied().collect();
            prop_assert_eq!(sa.union(&sb).indices(), uni.into_iter().collect::<Vec<_>>());
            prop_assert_eq!(sa.difference(&sb).len() + int.len(), av.len());
            prop_assert_eq!(sa.intersection(&sb).indices(), int.into_iter().collect::<Vec<_>>());
        }
    }
}
