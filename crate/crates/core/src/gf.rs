//! Exact arithmetic and linear algebra over GF(p) for small primes.
//!
//! Everything here is table-driven: a [`PrimeField`] precomputes its
//! addition, multiplication, negation and inverse tables at construction,
//! so the elimination kernels stay branch-free. Matrices pack rows into
//! machine words for p = 2 and into byte arrays otherwise; the layout is
//! internal and never observable through the API.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Primes accepted by [`PrimeField::new`].
pub const SUPPORTED_PRIMES: [u8; 6] = [2, 3, 5, 7, 11, 13];

/// Largest ambient dimension the vector/matrix types accept.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("unsupported prime {0} (supported: 2, 3, 5, 7, 11, 13)")]
    UnsupportedPrime(u8),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u8, u8),
    #[error("zero vector has no canonical point")]
    ZeroVector,
    #[error("dimension {0} outside supported range 1..={MAX_DIM}")]
    DimOutOfRange(usize),
    #[error("entry {0} is not a residue mod {1}")]
    BadResidue(u8, u8),
}

/// GF(p) with all unary/binary operation tables precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeField {
    p: u8,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl PrimeField {
    pub fn new(p: u8) -> Result<Self, GfError> {
        if !SUPPORTED_PRIMES.contains(&p) {
            return Err(GfError::UnsupportedPrime(p));
        }
        let n = p as usize;
        let mut add = vec![0u8; n * n];
        let mut mul = vec![0u8; n * n];
        let mut neg = vec![0u8; n];
        let mut inv = vec![0u8; n];
        for a in 0..n {
            neg[a] = ((n - a) % n) as u8;
            for b in 0..n {
                add[a * n + b] = ((a + b) % n) as u8;
                mul[a * n + b] = ((a * b) % n) as u8;
            }
        }
        for a in 1..n {
            for b in 1..n {
                if (a * b) % n == 1 {
                    inv[a] = b as u8;
                }
            }
        }
        Ok(Self { p, add, mul, neg, inv })
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.p as usize + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.p as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse of a nonzero residue.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        debug_assert!(a != 0);
        self.inv[a as usize]
    }

    pub fn check_residue(&self, a: u8) -> Result<(), GfError> {
        if a < self.p {
            Ok(())
        } else {
            Err(GfError::BadResidue(a, self.p))
        }
    }
}

/// A fixed-length vector of residues mod p.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GfVec {
    p: u8,
    coords: Vec<u8>,
}

impl GfVec {
    pub fn new(p: u8, coords: Vec<u8>) -> Result<Self, GfError> {
        if coords.len() > MAX_DIM {
            return Err(GfError::DimOutOfRange(coords.len()));
        }
        for &c in &coords {
            if c >= p {
                return Err(GfError::BadResidue(c, p));
            }
        }
        Ok(Self { p, coords })
    }

    pub fn zeros(p: u8, dim: usize) -> Self {
        Self { p, coords: vec![0; dim] }
    }

    #[inline]
    pub fn p(&self) -> u8 {
        self.p
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[u8] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn scaled(&self, field: &PrimeField, c: u8) -> GfVec {
        GfVec {
            p: self.p,
            coords: self.coords.iter().map(|&x| field.mul(x, c)).collect(),
        }
    }

    /// Dot product; both vectors must share p and dimension.
    pub fn dot(&self, field: &PrimeField, other: &GfVec) -> Result<u8, GfError> {
        if self.p != other.p {
            return Err(GfError::PrimeMismatch(self.p, other.p));
        }
        if self.dim() != other.dim() {
            return Err(GfError::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let mut acc = 0u8;
        for (&a, &b) in self.coords.iter().zip(&other.coords) {
            acc = field.add(acc, field.mul(a, b));
        }
        Ok(acc)
    }

    /// True iff `other` is a nonzero scalar multiple of `self`.
    pub fn parallel_to(&self, field: &PrimeField, other: &GfVec) -> bool {
        if self.p != other.p || self.dim() != other.dim() || self.is_zero() || other.is_zero() {
            return false;
        }
        match (canonical_point(field, self), canonical_point(field, other)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

impl std::fmt::Display for GfVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The unique scalar multiple of `v` whose first nonzero coordinate is 1.
///
/// Two nonzero vectors are parallel iff their canonical points are equal.
pub fn canonical_point(field: &PrimeField, v: &GfVec) -> Result<GfVec, GfError> {
    let lead = v.coords.iter().copied().find(|&c| c != 0).ok_or(GfError::ZeroVector)?;
    Ok(v.scaled(field, field.inv(lead)))
}

enum MatStore {
    /// One u64 per row, bit j = entry (row, j). Only for p = 2.
    Bits(Vec<u64>),
    /// Row-major bytes.
    Bytes(Vec<u8>),
}

/// A dense matrix over GF(p).
pub struct GfMat {
    field: PrimeField,
    rows: usize,
    cols: usize,
    store: MatStore,
}

impl Clone for GfMat {
    fn clone(&self) -> Self {
        GfMat {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            store: match &self.store {
                MatStore::Bits(w) => MatStore::Bits(w.clone()),
                MatStore::Bytes(b) => MatStore::Bytes(b.clone()),
            },
        }
    }
}

impl std::fmt::Debug for GfMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "GfMat(p={}, {}x{})", self.field.p(), self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl PartialEq for GfMat {
    fn eq(&self, other: &Self) -> bool {
        if self.field.p() != other.field.p() || self.rows != other.rows || self.cols != other.cols
        {
            return false;
        }
        (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == other.get(i, j)))
    }
}

impl GfMat {
    pub fn zeros(p: u8, rows: usize, cols: usize) -> Result<Self, GfError> {
        if cols > MAX_DIM {
            return Err(GfError::DimOutOfRange(cols));
        }
        let field = PrimeField::new(p)?;
        let store = if p == 2 {
            MatStore::Bits(vec![0u64; rows])
        } else {
            MatStore::Bytes(vec![0u8; rows * cols])
        };
        Ok(Self { field, rows, cols, store })
    }

    pub fn identity(p: u8, n: usize) -> Result<Self, GfError> {
        let mut m = Self::zeros(p, n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    /// Builds a matrix whose rows are the given vectors.
    pub fn from_rows(p: u8, cols: usize, rows: &[GfVec]) -> Result<Self, GfError> {
        let mut m = Self::zeros(p, rows.len(), cols)?;
        for (i, r) in rows.iter().enumerate() {
            if r.p() != p {
                return Err(GfError::PrimeMismatch(p, r.p()));
            }
            if r.dim() != cols {
                return Err(GfError::DimensionMismatch { expected: cols, got: r.dim() });
            }
            for (j, &c) in r.coords().iter().enumerate() {
                m.set(i, j, c);
            }
        }
        Ok(m)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(p: u8, dim: usize, cols: &[GfVec]) -> Result<Self, GfError> {
        let mut m = Self::zeros(p, dim, cols.len())?;
        for (j, v) in cols.iter().enumerate() {
            if v.p() != p {
                return Err(GfError::PrimeMismatch(p, v.p()));
            }
            if v.dim() != dim {
                return Err(GfError::DimensionMismatch { expected: dim, got: v.dim() });
            }
            for (i, &c) in v.coords().iter().enumerate() {
                m.set(i, j, c);
            }
        }
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
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        debug_assert!(i < self.rows && j < self.cols);
        match &self.store {
            MatStore::Bits(w) => ((w[i] >> j) & 1) as u8,
            MatStore::Bytes(b) => b[i * self.cols + j],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        debug_assert!(i < self.rows && j < self.cols && v < self.field.p());
        match &mut self.store {
            MatStore::Bits(w) => {
                if v == 1 {
                    w[i] |= 1 << j;
                } else {
                    w[i] &= !(1 << j);
                }
            }
            MatStore::Bytes(b) => b[i * self.cols + j] = v,
        }
    }

    pub fn row(&self, i: usize) -> GfVec {
        GfVec {
            p: self.field.p(),
            coords: (0..self.cols).map(|j| self.get(i, j)).collect(),
        }
    }

    pub fn col(&self, j: usize) -> GfVec {
        GfVec {
            p: self.field.p(),
            coords: (0..self.rows).map(|i| self.get(i, j)).collect(),
        }
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &GfVec) -> Result<GfVec, GfError> {
        if v.dim() != self.cols {
            return Err(GfError::DimensionMismatch { expected: self.cols, got: v.dim() });
        }
        let mut out = vec![0u8; self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = 0u8;
            for j in 0..self.cols {
                acc = self.field.add(acc, self.field.mul(self.get(i, j), v.coords()[j]));
            }
            *slot = acc;
        }
        Ok(GfVec { p: self.field.p(), coords: out })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        match &mut self.store {
            MatStore::Bits(w) => w.swap(a, b),
            MatStore::Bytes(bytes) => {
                for j in 0..self.cols {
                    bytes.swap(a * self.cols + j, b * self.cols + j);
                }
            }
        }
    }

    /// row[dst] += c * row[src]
    fn add_scaled_row(&mut self, dst: usize, src: usize, c: u8) {
        if c == 0 {
            return;
        }
        match &mut self.store {
            MatStore::Bits(w) => w[dst] ^= w[src],
            MatStore::Bytes(bytes) => {
                for j in 0..self.cols {
                    let s = bytes[src * self.cols + j];
                    let d = &mut bytes[dst * self.cols + j];
                    *d = self.field.add(*d, self.field.mul(c, s));
                }
            }
        }
    }

    fn scale_row(&mut self, i: usize, c: u8) {
        match &mut self.store {
            MatStore::Bits(_) => {} // only c = 1 possible over GF(2)
            MatStore::Bytes(bytes) => {
                for j in 0..self.cols {
                    let d = &mut bytes[i * self.cols + j];
                    *d = self.field.mul(*d, c);
                }
            }
        }
    }

    /// Reduced row echelon form, together with pivot columns and rank.
    pub fn rref(&self) -> RrefOutcome {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for col in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, col) != 0) else {
                continue;
            };
            m.swap_rows(r, piv);
            let lead = m.get(r, col);
            if lead != 1 {
                m.scale_row(r, m.field.inv(lead));
            }
            for i in 0..m.rows {
                if i != r {
                    let c = m.get(i, col);
                    if c != 0 {
                        let factor = m.field.neg(c);
                        m.add_scaled_row(i, r, factor);
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        RrefOutcome { rank: pivots.len(), pivots, matrix: m }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }
}

/// Result of [`GfMat::rref`].
#[derive(Debug, Clone)]
pub struct RrefOutcome {
    pub matrix: GfMat,
    /// Strictly increasing pivot column indices.
    pub pivots: Vec<usize>,
    pub rank: usize,
}

/// Solves `basis_mat · c = v` for `c`, treating `basis_mat` columns as a
/// generating set.
///
/// Returns `Ok(Some(c))` when `v` lies in the column span, `Ok(None)` when
/// it does not, and an error for shape mismatches (a usage error, distinct
/// from "not in span").
pub fn in_span(basis_mat: &GfMat, v: &GfVec) -> Result<Option<GfVec>, GfError> {
    if v.p() != basis_mat.p() {
        return Err(GfError::PrimeMismatch(basis_mat.p(), v.p()));
    }
    if v.dim() != basis_mat.rows() {
        return Err(GfError::DimensionMismatch { expected: basis_mat.rows(), got: v.dim() });
    }
    let p = basis_mat.p();
    let n = basis_mat.cols();
    // Augment with v and reduce; a pivot in the last column means "not in span".
    let mut aug = GfMat::zeros(p, basis_mat.rows(), n + 1)?;
    for i in 0..basis_mat.rows() {
        for j in 0..n {
            aug.set(i, j, basis_mat.get(i, j));
        }
        aug.set(i, n, v.coords()[i]);
    }
    let out = aug.rref();
    if out.pivots.contains(&n) {
        return Ok(None);
    }
    let mut coeffs = vec![0u8; n];
    for (row, &pc) in out.pivots.iter().enumerate() {
        coeffs[pc] = out.matrix.get(row, n);
    }
    Ok(Some(GfVec { p, coords: coeffs }))
}

/// Streams the canonical nonzero functionals of GF(p)^dim, one per
/// hyperplane, in lexicographic order of their coordinate sequences.
///
/// Yields exactly (p^dim − 1)/(p − 1) functionals.
pub fn hyperplanes_of(dim: usize, p: u8) -> Result<CanonicalVectors, GfError> {
    if dim == 0 || dim > 16 {
        return Err(GfError::DimOutOfRange(dim));
    }
    let field = PrimeField::new(p)?;
    Ok(CanonicalVectors { field, dim, next: Some(vec![0; dim]), primed: false })
}

/// Iterator over canonical vectors (first nonzero coordinate = 1) of
/// GF(p)^dim in lexicographic order.
pub struct CanonicalVectors {
    field: PrimeField,
    dim: usize,
    next: Option<Vec<u8>>,
    primed: bool,
}

impl CanonicalVectors {
    /// Base-p increment with the rightmost coordinate least significant,
    /// matching lexicographic order on coordinate sequences.
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

    fn is_canonical(v: &[u8]) -> bool {
        match v.iter().find(|&&c| c != 0) {
            Some(&lead) => lead == 1,
            None => false,
        }
    }
}

impl Iterator for CanonicalVectors {
    type Item = GfVec;

    fn next(&mut self) -> Option<GfVec> {
        let p = self.field.p();
        loop {
            let mut v = self.next.take()?;
            debug_assert_eq!(v.len(), self.dim);
            if self.primed {
                if !Self::bump(p, &mut v) {
                    return None;
                }
            } else {
                self.primed = true;
            }
            let hit = Self::is_canonical(&v);
            let out = if hit { Some(GfVec { p, coords: v.clone() }) } else { None };
            self.next = Some(v);
            if out.is_some() {
                return out;
            }
        }
    }
}

/// Incremental row-echelon basis over GF(p); the hot kernel behind all
/// rank and closure computations.
///
/// For p = 2 rows are single machine words (dim ≤ 64); elimination is a
/// handful of xors. For p > 2 rows are byte arrays kept in echelon form.
#[derive(Debug, Clone)]
pub enum EchelonBasis {
    Bits {
        dim: usize,
        /// rows[k] has leading (lowest-index) bit strictly less than rows[k+1].
        rows: Vec<u64>,
    },
    Bytes {
        field: PrimeField,
        dim: usize,
        /// Rows normalized to leading coefficient 1, sorted by leading index.
        rows: Vec<Vec<u8>>,
        leads: Vec<usize>,
    },
}

impl EchelonBasis {
    /// Packs a vector for the bit path.
    pub fn pack(v: &GfVec) -> u64 {
        let mut w = 0u64;
        for (i, &c) in v.coords().iter().enumerate() {
            if c != 0 {
                w |= 1 << i;
            }
        }
        w
    }

    pub fn insert_vec(&mut self, v: &GfVec) -> bool {
        match self {
            EchelonBasis::Bits { .. } => {
                let w = Self::pack(v);
                self.insert_bits(w)
            }
            EchelonBasis::Bytes { .. } => self.insert_bytes(v.coords()),
        }
    }

    pub fn contains_vec(&self, v: &GfVec) -> bool {
        match self {
            EchelonBasis::Bits { .. } => self.contains_bits(Self::pack(v)),
            EchelonBasis::Bytes { .. } => self.contains_bytes(v.coords()),
        }
    }

    pub fn new(field: &PrimeField, dim: usize) -> Self {
        if field.p() == 2 {
            EchelonBasis::Bits { dim, rows: Vec::new() }
        } else {
            EchelonBasis::Bytes {
                field: field.clone(),
                dim,
                rows: Vec::new(),
                leads: Vec::new(),
            }
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            EchelonBasis::Bits { rows, .. } => rows.len(),
            EchelonBasis::Bytes { rows, .. } => rows.len(),
        }
    }

    /// Reduces `v` (packed bits for p = 2) against the basis; returns the
    /// residue. A zero residue means `v` is in the span.
    pub fn reduce_bits(&self, mut w: u64) -> u64 {
        let EchelonBasis::Bits { rows, .. } = self else {
            panic!("reduce_bits on byte basis");
        };
        for &r in rows {
            let lead = r.trailing_zeros();
            if w & (1u64 << lead) != 0 {
                w ^= r;
            }
        }
        w
    }

    pub fn reduce_bytes(&self, v: &[u8]) -> Vec<u8> {
        let EchelonBasis::Bytes { field, rows, leads, .. } = self else {
            panic!("reduce_bytes on bit basis");
        };
        let mut w = v.to_vec();
        for (row, &lead) in rows.iter().zip(leads) {
            let c = w[lead];
            if c != 0 {
                let f = field.neg(c);
                for (wj, rj) in w.iter_mut().zip(row) {
                    *wj = field.add(*wj, field.mul(f, *rj));
                }
            }
        }
        w
    }

    /// Inserts a vector; returns true iff it enlarged the span.
    pub fn insert_bits(&mut self, w: u64) -> bool {
        let red = self.reduce_bits(w);
        if red == 0 {
            return false;
        }
        let EchelonBasis::Bits { rows, .. } = self else { unreachable!() };
        let lead = red.trailing_zeros();
        let pos = rows.partition_point(|r| r.trailing_zeros() < lead);
        rows.insert(pos, red);
        true
    }

    pub fn insert_bytes(&mut self, v: &[u8]) -> bool {
        let red = self.reduce_bytes(v);
        let Some(lead) = red.iter().position(|&c| c != 0) else {
            return false;
        };
        let EchelonBasis::Bytes { field, rows, leads, .. } = self else { unreachable!() };
        let inv = field.inv(red[lead]);
        let norm: Vec<u8> = red.iter().map(|&c| field.mul(c, inv)).collect();
        let pos = leads.partition_point(|&l| l < lead);
        rows.insert(pos, norm);
        leads.insert(pos, lead);
        true
    }

    pub fn contains_bits(&self, w: u64) -> bool {
        self.reduce_bits(w) == 0
    }

    /// Allocation-free span test for the byte path (dim ≤ 64).
    pub fn contains_bytes(&self, v: &[u8]) -> bool {
        let EchelonBasis::Bytes { field, rows, leads, .. } = self else {
            panic!("contains_bytes on bit basis");
        };
        let mut buf = [0u8; MAX_DIM];
        let w = &mut buf[..v.len()];
        w.copy_from_slice(v);
        for (row, &lead) in rows.iter().zip(leads) {
            let c = w[lead];
            if c != 0 {
                let f = field.neg(c);
                for (wj, rj) in w.iter_mut().zip(row) {
                    *wj = field.add(*wj, field.mul(f, *rj));
                }
            }
        }
        w.iter().all(|&c| c == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vecp(p: u8, coords: &[u8]) -> GfVec {
        GfVec::new(p, coords.to_vec()).unwrap()
    }

    #[test]
    fn field_tables_invert() {
        for p in SUPPORTED_PRIMES {
            let f = PrimeField::new(p).unwrap();
            for a in 1..p {
                assert_eq!(f.mul(a, f.inv(a)), 1, "p={p} a={a}");
            }
        }
    }

    #[test]
    fn non_prime_rejected() {
        assert!(matches!(PrimeField::new(4), Err(GfError::UnsupportedPrime(4))));
        assert!(matches!(PrimeField::new(9), Err(GfError::UnsupportedPrime(9))));
        assert!(matches!(PrimeField::new(17), Err(GfError::UnsupportedPrime(17))));
    }

    #[test]
    fn rref_identity_is_fixed_point() {
        let m = GfMat::identity(2, 3).unwrap();
        let out = m.rref();
        assert_eq!(out.rank, 3);
        assert_eq!(out.matrix, m);
        assert_eq!(out.pivots, vec![0, 1, 2]);
    }

    #[test]
    fn rref_zero_matrix() {
        let m = GfMat::zeros(3, 2, 4).unwrap();
        let out = m.rref();
        assert_eq!(out.rank, 0);
        assert!(out.pivots.is_empty());
        assert_eq!(out.matrix, m);
    }

    #[test]
    fn rref_all_nonzero_gf2_columns() {
        // 3x7 matrix of all nonzero GF(2) columns.
        let cols: Vec<GfVec> = (1u8..8)
            .map(|x| vecp(2, &[(x >> 2) & 1, (x >> 1) & 1, x & 1]))
            .collect();
        let m = GfMat::from_cols(2, 3, &cols).unwrap();
        assert_eq!(m.rref().rank, 3);
    }

    #[test]
    fn rref_idempotent() {
        let cols = vec![vecp(3, &[1, 2, 0]), vecp(3, &[2, 1, 1]), vecp(3, &[0, 0, 2]), vecp(3, &[1, 0, 1])];
        let m = GfMat::from_cols(3, 3, &cols).unwrap();
        let once = m.rref();
        let twice = once.matrix.rref();
        assert_eq!(once.matrix, twice.matrix);
        assert_eq!(once.pivots, twice.pivots);
    }

    /// Rank by exhaustive Leibniz-determinant minors; the independent
    /// oracle for small matrices.
    fn rank_by_minors(m: &GfMat) -> usize {
        let p = m.p() as u64;
        let n = m.rows().min(m.cols());
        for k in (1..=n).rev() {
            for rows in combinations(m.rows(), k) {
                for cols in combinations(m.cols(), k) {
                    if det_leibniz(m, &rows, &cols, p) != 0 {
                        return k;
                    }
                }
            }
        }
        0
    }

    fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        rec(0, n, k, &mut cur, &mut out);
        out
    }

    fn det_leibniz(m: &GfMat, rows: &[usize], cols: &[usize], p: u64) -> u64 {
        let k = rows.len();
        let mut perm: Vec<usize> = (0..k).collect();
        let mut total: i64 = 0;
        permute(&mut perm, 0, &mut |perm, sign| {
            let mut prod: i64 = 1;
            for (i, &pi) in perm.iter().enumerate() {
                prod = (prod * m.get(rows[i], cols[pi]) as i64) % p as i64;
            }
            total = (total + sign * prod).rem_euclid(p as i64);
        });
        total as u64
    }

    fn permute(perm: &mut Vec<usize>, i: usize, f: &mut impl FnMut(&[usize], i64)) {
        // Heap's algorithm will not track sign easily; recurse with explicit sign.
        fn rec(avail: &mut Vec<usize>, cur: &mut Vec<usize>, sign: i64, f: &mut impl FnMut(&[usize], i64)) {
            if avail.is_empty() {
                f(cur, sign);
                return;
            }
            for idx in 0..avail.len() {
                let v = avail.remove(idx);
                cur.push(v);
                // removing from position idx costs idx transpositions
                let s = if idx % 2 == 0 { sign } else { -sign };
                rec(avail, cur, s, f);
                cur.pop();
                avail.insert(idx, v);
            }
        }
        let _ = i;
        let mut avail = perm.clone();
        let mut cur = Vec::new();
        rec(&mut avail, &mut cur, 1, f);
    }

    #[test]
    fn rref_rank_matches_minor_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for p in [2u8, 3, 5] {
            for _ in 0..40 {
                let rows = rng.gen_range(1..=5);
                let cols = rng.gen_range(1..=5);
                let mut m = GfMat::zeros(p, rows, cols).unwrap();
                for i in 0..rows {
                    for j in 0..cols {
                        m.set(i, j, rng.gen_range(0..p));
                    }
                }
                assert_eq!(m.rref().rank, rank_by_minors(&m), "p={p} m={m:?}");
            }
        }
    }

    #[test]
    fn in_span_identity_basis() {
        let basis = GfMat::identity(5, 2).unwrap();
        let v = vecp(5, &[2, 3]);
        let c = in_span(&basis, &v).unwrap().unwrap();
        assert_eq!(c.coords(), &[2, 3]);
    }

    #[test]
    fn in_span_negative() {
        let basis = GfMat::from_cols(2, 2, &[vecp(2, &[1, 0])]).unwrap();
        assert_eq!(in_span(&basis, &vecp(2, &[0, 1])).unwrap(), None);
    }

    #[test]
    fn in_span_gf3_coefficients() {
        // 2·(1,1) + 1·(0,1) = (2,3) = (2,0) mod 3
        let basis = GfMat::from_cols(3, 2, &[vecp(3, &[1, 1]), vecp(3, &[0, 1])]).unwrap();
        let c = in_span(&basis, &vecp(3, &[2, 0])).unwrap().unwrap();
        assert_eq!(c.coords(), &[2, 1]);
        // verify by direct evaluation
        let m = GfMat::from_cols(3, 2, &[vecp(3, &[1, 1]), vecp(3, &[0, 1])]).unwrap();
        assert_eq!(m.mul_vec(&c).unwrap(), vecp(3, &[2, 0]));
    }

    #[test]
    fn in_span_dimension_mismatch_is_distinct() {
        let basis = GfMat::identity(5, 2).unwrap();
        let v = vecp(5, &[1, 2, 3]);
        assert!(matches!(in_span(&basis, &v), Err(GfError::DimensionMismatch { .. })));
    }

    #[test]
    fn canonical_point_examples() {
        let f5 = PrimeField::new(5).unwrap();
        assert_eq!(canonical_point(&f5, &vecp(5, &[0, 2, 4])).unwrap(), vecp(5, &[0, 1, 2]));
        let f2 = PrimeField::new(2).unwrap();
        assert_eq!(canonical_point(&f2, &vecp(2, &[1, 0, 1])).unwrap(), vecp(2, &[1, 0, 1]));
        let f3 = PrimeField::new(3).unwrap();
        assert_eq!(canonical_point(&f3, &vecp(3, &[2, 2])).unwrap(), vecp(3, &[1, 1]));
        assert!(matches!(canonical_point(&f3, &vecp(3, &[0, 0])), Err(GfError::ZeroVector)));
    }

    #[test]
    fn canonical_point_scaling_invariant() {
        let f = PrimeField::new(7).unwrap();
        let v = vecp(7, &[0, 3, 5, 1]);
        let base = canonical_point(&f, &v).unwrap();
        for c in 1..7 {
            assert_eq!(canonical_point(&f, &v.scaled(&f, c)).unwrap(), base);
        }
    }

    #[test]
    fn hyperplane_counts() {
        assert_eq!(hyperplanes_of(2, 2).unwrap().count(), 3);
        assert_eq!(hyperplanes_of(3, 2).unwrap().count(), 7);
        assert_eq!(hyperplanes_of(2, 3).unwrap().count(), 4);
        assert_eq!(hyperplanes_of(3, 3).unwrap().count(), 13);
        assert_eq!(hyperplanes_of(2, 5).unwrap().count(), 6);
    }

    #[test]
    fn hyperplanes_dim2_gf2_contents() {
        let got: Vec<GfVec> = hyperplanes_of(2, 2).unwrap().collect();
        assert_eq!(got, vec![vecp(2, &[0, 1]), vecp(2, &[1, 0]), vecp(2, &[1, 1])]);
    }

    #[test]
    fn hyperplanes_are_canonical_and_sorted() {
        for (dim, p) in [(3, 2), (2, 3), (3, 3), (2, 5)] {
            let f = PrimeField::new(p).unwrap();
            let all: Vec<GfVec> = hyperplanes_of(dim, p).unwrap().collect();
            for w in all.windows(2) {
                assert!(w[0] < w[1], "not strictly sorted: {} {}", w[0], w[1]);
            }
            for v in &all {
                assert_eq!(&canonical_point(&f, v).unwrap(), v);
            }
            // pairwise non-parallel by canonical uniqueness
            let mut seen = std::collections::HashSet::new();
            for v in &all {
                assert!(seen.insert(v.clone()));
            }
        }
    }

    #[test]
    fn hyperplanes_dim_guard() {
        assert!(hyperplanes_of(0, 2).is_err());
        assert!(hyperplanes_of(17, 2).is_err());
    }

    #[test]
    fn echelon_basis_matches_rref_rank() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for p in [2u8, 3, 7] {
            let field = PrimeField::new(p).unwrap();
            for _ in 0..30 {
                let dim = rng.gen_range(1..=6);
                let n = rng.gen_range(0..=10);
                let vecs: Vec<GfVec> = (0..n)
                    .map(|_| {
                        GfVec::new(p, (0..dim).map(|_| rng.gen_range(0..p)).collect()).unwrap()
                    })
                    .collect();
                let mut basis = EchelonBasis::new(&field, dim);
                for v in &vecs {
                    if p == 2 {
                        let mut w = 0u64;
                        for (i, &c) in v.coords().iter().enumerate() {
                            if c == 1 {
                                w |= 1 << i;
                            }
                        }
                        basis.insert_bits(w);
                    } else {
                        basis.insert_bytes(v.coords());
                    }
                }
                let m = GfMat::from_cols(p, dim, &vecs).unwrap();
                assert_eq!(basis.rank(), m.rref().rank);
            }
        }
    }
}
