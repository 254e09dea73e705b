//! Packed linear algebra over GF(2).
//!
//! Rows are stored as little-endian `u64` words: bit `j` of a row lives in
//! word `j / 64` at position `j % 64`. Padding bits past the logical length
//! are always zero, so word-wise equality is logical equality.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest column count a [`BitMatrix`] accepts.
pub const MAX_COLS: usize = 4096;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// A packed vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from raw words, clearing padding bits.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        BitVector { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        xor_words(&mut self.words, &other.words);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn leading_one(&self) -> Option<usize> {
        leading_one(&self.words)
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        BitVector::ones_of(&self.words)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVector {
    type Err = Error;

    /// Parses a string of `0`/`1` characters, first character = bit 0.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BitVector::from_bits(&bits))
    }
}

#[inline]
fn xor_words(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

#[inline]
fn leading_one(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * WORD + w.trailing_zeros() as usize)
}

#[inline]
fn bit(words: &[u64], j: usize) -> bool {
    (words[j / WORD] >> (j % WORD)) & 1 == 1
}

/// A dense 0-1 matrix over GF(2) with packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n_rows: usize,
    n_cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    /// # Panics
    /// Panics if `n_cols` exceeds [`MAX_COLS`].
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        assert!(n_cols <= MAX_COLS, "BitMatrix supports at most {MAX_COLS} columns, got {n_cols}");
        let stride = words_for(n_cols);
        BitMatrix {
            n_rows,
            n_cols,
            stride,
            data: vec![0; n_rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn ones(n_rows: usize, n_cols: usize) -> Self {
        let mut m = BitMatrix::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m.set(i, j, true);
            }
        }
        m
    }

    /// Stacks vectors of equal length into a matrix.
    pub fn from_rows(n_cols: usize, rows: &[BitVector]) -> Result<Self> {
        let mut m = BitMatrix::zeros(rows.len(), n_cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_cols {
                return Err(Error::LengthMismatch {
                    expected: n_cols,
                    got: r.len(),
                });
            }
            m.row_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n_rows && j < self.n_cols, "entry ({i},{j}) out of range");
        bit(self.row(i), j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n_rows && j < self.n_cols, "entry ({i},{j}) out of range");
        let mask = 1u64 << (j % WORD);
        let w = &mut self.row_mut(i)[j / WORD];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row_vector(&self, i: usize) -> BitVector {
        BitVector {
            len: self.n_cols,
            words: self.row(i).to_vec(),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = BitVector> + '_ {
        (0..self.n_rows).map(|i| self.row_vector(i))
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.n_cols, self.n_rows);
        for i in 0..self.n_rows {
            for j in BitVector::ones_of(self.row(i)) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Largest number of nonzero entries in any single row or column.
    pub fn max_line_weight(&self) -> usize {
        let mut col_counts = vec![0usize; self.n_cols];
        let mut best = 0;
        for i in 0..self.n_rows {
            let mut row_count = 0;
            for j in BitVector::ones_of(self.row(i)) {
                col_counts[j] += 1;
                row_count += 1;
            }
            best = best.max(row_count);
        }
        col_counts.into_iter().fold(best, usize::max)
    }

    /// GF(2) rank. Works on a private copy.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        work.reduce_in_place().len()
    }

    /// Reduced row echelon form of the row space.
    pub fn echelonize(&self) -> Gf2Basis {
        let mut work = self.clone();
        let pivots = work.reduce_in_place();
        let vectors = (0..pivots.len()).map(|i| work.row_vector(i)).collect();
        Gf2Basis {
            len: self.n_cols,
            vectors,
            pivots,
        }
    }

    /// Gauss-Jordan elimination. Leaves the first `r` rows in reduced echelon
    /// form and returns their pivot columns.
    fn reduce_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.n_cols {
            if next == self.n_rows {
                break;
            }
            let Some(p) = (next..self.n_rows).find(|&r| bit(self.row(r), col)) else {
                continue;
            };
            self.swap_rows(p, next);
            let (head, tail) = self.data.split_at_mut((next + 1) * self.stride);
            let (above, pivot_row) = head.split_at_mut(next * self.stride);
            for row in above
                .chunks_exact_mut(self.stride)
                .chain(tail.chunks_exact_mut(self.stride))
            {
                if bit(row, col) {
                    xor_words(row, pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// Certified lower bound on the rank of a sparse matrix.
    ///
    /// Greedy elimination: take the first remaining nonzero row `w` (row index
    /// order), let `c` be its lowest nonzero column, keep `w` as a witness and
    /// drop every remaining row with a one in column `c` (including `w`).
    /// Each witness has a one in a column where all later witnesses are zero,
    /// so the witnesses are independent. Each step removes at most `M` rows of
    /// at most `M` ones each, where `M` is the largest row or column weight,
    /// hence at least `ceil(nnz / M^2)` steps.
    pub fn sparse_rank_lower_bound(&self) -> SparseRankBound {
        let nnz = self.nnz();
        let max_line_weight = self.max_line_weight();
        let mut alive: Vec<bool> = (0..self.n_rows)
            .map(|i| self.row(i).iter().any(|&w| w != 0))
            .collect();
        let mut witness_rows = Vec::new();
        let mut cursor = 0;
        while let Some(w) = (cursor..self.n_rows).find(|&i| alive[i]) {
            cursor = w;
            let col = leading_one(self.row(w)).expect("alive rows are nonzero");
            witness_rows.push(w);
            for (i, a) in alive.iter_mut().enumerate().skip(w) {
                if *a && bit(self.row(i), col) {
                    *a = false;
                }
            }
        }
        SparseRankBound {
            bound: witness_rows.len(),
            witness_rows,
            nnz,
            max_line_weight,
        }
    }
}

impl BitVector {
    fn ones_of(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
        words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.n_rows, self.n_cols)?;
        for r in self.rows() {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    /// Whitespace-separated rows of `0`/`1` characters, e.g. `"110 011"`.
    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .split_whitespace()
            .map(BitVector::from_str)
            .collect::<Result<Vec<_>>>()?;
        let n_cols = rows.first().map_or(0, BitVector::len);
        BitMatrix::from_rows(n_cols, &rows)
    }
}

/// Result of [`BitMatrix::sparse_rank_lower_bound`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseRankBound {
    pub bound: usize,
    /// Indices of linearly independent rows, in selection order.
    pub witness_rows: Vec<usize>,
    pub nnz: usize,
    /// `M`: maximum nonzeros in a row or column.
    pub max_line_weight: usize,
}

/// Reduced row-echelon basis of a subspace of GF(2)^len.
///
/// Vector `i` has its lowest set bit at `pivots[i]` and is zero at every
/// other pivot column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Basis {
    len: usize,
    vectors: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl Gf2Basis {
    pub fn empty(len: usize) -> Self {
        Gf2Basis {
            len,
            vectors: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Basis of the span of `vectors`, all of length `len`.
    pub fn spanned_by(len: usize, vectors: &[BitVector]) -> Result<Self> {
        Ok(BitMatrix::from_rows(len, vectors)?.echelonize())
    }

    /// Ambient dimension.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[BitVector] {
        &self.vectors
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the basis; zero remainder means membership.
    pub fn contains(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                got: v.len(),
            });
        }
        let mut rem = v.clone();
        for (b, &p) in self.vectors.iter().zip(&self.pivots) {
            if rem.get(p) {
                rem.xor_assign(b);
            }
        }
        Ok(rem.is_zero())
    }
}

/// Rank of at most 64-column vectors held in single words.
///
/// Used on the hot path of the width DPs; independent of [`BitMatrix::rank`].
pub fn rank_of_words<I: IntoIterator<Item = u64>>(rows: I) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for mut r in rows {
        while r != 0 {
            let top = 63 - r.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = r;
                rank += 1;
                break;
            }
            r ^= basis[top];
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> BitMatrix {
        s.parse().unwrap()
    }

    /// log2 of the span size, by enumerating all row combinations.
    fn brute_rank(mat: &BitMatrix) -> usize {
        if mat.n_rows() > mat.n_cols() {
            return brute_rank(&mat.transpose());
        }
        let rows: Vec<BitVector> = mat.rows().collect();
        let mut span = std::collections::HashSet::new();
        for mask in 0u32..(1 << rows.len()) {
            let mut acc = BitVector::zeros(mat.n_cols());
            for (i, r) in rows.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc.xor_assign(r);
                }
            }
            span.insert(acc);
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::zeros(2, 5).rank(), 0);
        assert_eq!(BitMatrix::ones(4, 6).rank(), 1);
        let dependent = m("1100 0110 1010");
        assert_eq!(brute_rank(&dependent), 2);
        assert_eq!(dependent.rank(), 2);
    }

    #[test]
    fn degenerate_shapes() {
        assert_eq!(BitMatrix::zeros(0, 7).rank(), 0);
        assert_eq!(BitMatrix::zeros(7, 0).rank(), 0);
        assert_eq!(BitMatrix::zeros(0, 0).echelonize().dimension(), 0);
    }

    #[test]
    fn rank_matches_span_enumeration_exhaustively() {
        for (r, c) in [(1, 16), (2, 8), (4, 4), (3, 5), (5, 3), (8, 2), (16, 1)] {
            let cells = r * c;
            for bits in 0u32..(1 << cells) {
                let mut mat = BitMatrix::zeros(r, c);
                for k in 0..cells {
                    if bits >> k & 1 == 1 {
                        mat.set(k / c, k % c, true);
                    }
                }
                assert_eq!(mat.rank(), brute_rank(&mat), "{mat:?}");
            }
        }
    }

    #[test]
    fn echelonize_examples() {
        assert_eq!(BitMatrix::zeros(3, 4).echelonize().dimension(), 0);
        let id = BitMatrix::identity(3).echelonize();
        assert_eq!(id.pivots(), &[0, 1, 2]);
        assert_eq!(id.vectors(), &BitMatrix::identity(3).rows().collect::<Vec<_>>()[..]);
        let b = m("11 01").echelonize();
        assert_eq!(b.pivots(), &[0, 1]);
        assert_eq!(b.dimension(), 2);
    }

    #[test]
    fn contains_examples() {
        let empty = Gf2Basis::empty(4);
        assert!(empty.contains(&BitVector::zeros(4)).unwrap());
        assert!(!empty.contains(&"0010".parse().unwrap()).unwrap());
        let b = m("1100 0011").echelonize();
        assert!(b.contains(&"1111".parse().unwrap()).unwrap());
        assert!(!b.contains(&"1000".parse().unwrap()).unwrap());
        assert!(matches!(
            b.contains(&BitVector::zeros(5)),
            Err(Error::LengthMismatch { expected: 4, got: 5 })
        ));
    }

    #[test]
    fn sparse_bound_examples() {
        let id = BitMatrix::identity(5).sparse_rank_lower_bound();
        assert_eq!((id.bound, id.nnz, id.max_line_weight), (5, 5, 1));

        let ones = BitMatrix::ones(4, 4).sparse_rank_lower_bound();
        assert_eq!((ones.bound, ones.nnz, ones.max_line_weight), (1, 16, 4));

        let blocks = m("110000 110000 001100 001100 000011 000011");
        let b = blocks.sparse_rank_lower_bound();
        assert_eq!((b.bound, b.nnz, b.max_line_weight), (3, 12, 2));
        assert_eq!(b.witness_rows, vec![0, 2, 4]);
        assert_eq!(blocks.rank(), 3);
        let w: Vec<BitVector> = b.witness_rows.iter().map(|&i| blocks.row_vector(i)).collect();
        assert_eq!(BitMatrix::from_rows(6, &w).unwrap().rank(), 3);

        let zero = BitMatrix::zeros(3, 3).sparse_rank_lower_bound();
        assert_eq!(zero.bound, 0);
        assert!(zero.witness_rows.is_empty());
    }

    #[test]
    fn word_rank_agrees_with_matrix_rank() {
        let mat = m("1100 0110 1010 0001");
        let words = (0..4).map(|i| mat.row(i)[0]);
        assert_eq!(rank_of_words(words), mat.rank());
    }

    #[test]
    fn padding_stays_clear() {
        let v = BitVector::from_words(3, vec![u64::MAX]);
        assert_eq!(v.count_ones(), 3);
        assert_eq!(v.to_string(), "111");
    }
}
