//! Bit-packed linear algebra over GF(2).
//!
//! A [`BitVector`] stores bit `i` in word `i / 64`, position `i % 64`. Bits at
//! positions `>= len` are kept at zero so that equality and hashing can work
//! on whole words.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{BitAnd, BitXor, BitXorAssign};
use std::str::FromStr;

use num_bigint::BigUint;
use smallvec::SmallVec;
use thiserror::Error;

/// Largest row or column count accepted by [`GF2Matrix`].
pub const MAX_DIMENSION: usize = 1023;

const WORD_BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("bit index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension {got} exceeds the cap of {max}")]
    TooLarge { got: usize, max: usize },
    #[error("row {row} has length {len}, expected {expected}")]
    RaggedRow { row: usize, len: usize, expected: usize },
    #[error("invalid bit character {0:?}")]
    InvalidChar(char),
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// Fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: SmallVec<[u64; 2]>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: SmallVec::from_elem(0, word_count(len)),
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: SmallVec::from_elem(!0, word_count(len)),
        };
        v.clear_tail();
        v
    }

    /// Builds a vector of length `len <= 64` from the low bits of `word`.
    pub fn from_word(len: usize, word: u64) -> Self {
        assert!(len <= WORD_BITS, "from_word needs len <= 64, got {len}");
        let mut v = Self {
            len,
            words: SmallVec::from_elem(word, word_count(len)),
        };
        v.clear_tail();
        v
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Result<Self, Gf2Error> {
        let mut v = Self::zeros(len);
        for &i in indices {
            if i >= len {
                return Err(Gf2Error::IndexOutOfRange { index: i, len });
            }
            v.set(i, true);
        }
        Ok(v)
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Reads bit `i`; positions past the end read as unset.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len && (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    /// # Panics
    /// Panics if `i >= len`.
    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn lowest_set_bit(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    /// Symmetric difference, i.e. addition over GF(2).
    pub fn xor(&self, other: &Self) -> Result<Self, Gf2Error> {
        self.check_len(other)?;
        Ok(self ^ other)
    }

    pub fn and(&self, other: &Self) -> Result<Self, Gf2Error> {
        self.check_len(other)?;
        Ok(self & other)
    }

    /// `weight(self & other)` without allocating.
    #[inline]
    pub fn and_weight(&self, other: &Self) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Bitwise complement within `len` positions.
    pub fn complement(&self) -> Self {
        let mut v = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        v.clear_tail();
        v
    }

    /// `true` iff every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Iterates over set positions in increasing order.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.ones_iter().collect()
    }

    /// Low 64 bits as an integer, bit `i` carrying weight `2^i`.
    pub fn low_word(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    fn check_len(&self, other: &Self) -> Result<(), Gf2Error> {
        if self.len != other.len {
            return Err(Gf2Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(())
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;

    /// # Panics
    /// Panics on a length mismatch; use [`BitVector::xor`] for a checked version.
    fn bitxor(self, rhs: &BitVector) -> BitVector {
        assert_eq!(self.len, rhs.len, "xor of vectors with different lengths");
        BitVector {
            len: self.len,
            words: self.words.iter().zip(&rhs.words).map(|(a, b)| a ^ b).collect(),
        }
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitAnd for &BitVector {
    type Output = BitVector;

    fn bitand(self, rhs: &BitVector) -> BitVector {
        assert_eq!(self.len, rhs.len, "and of vectors with different lengths");
        BitVector {
            len: self.len,
            words: self.words.iter().zip(&rhs.words).map(|(a, b)| a & b).collect(),
        }
    }
}

/// Lexicographic on the bit string `b_0 b_1 ... b_{len-1}` with `0 < 1`,
/// i.e. point 0 is the most significant position. Shorter vectors sort first.
impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words) {
                let diff = a ^ b;
                if diff != 0 {
                    let bit = diff.trailing_zeros();
                    return if (a >> bit) & 1 == 1 {
                        Ordering::Greater
                    } else {
                        Ordering::Less
                    };
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Renders as a `0`/`1` string, position 0 first.
impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Gf2Error::InvalidChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_bools(&bits))
    }
}

/// Dense matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GF2Matrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl GF2Matrix {
    pub fn new(cols: usize, rows: Vec<BitVector>) -> Result<Self, Gf2Error> {
        if cols > MAX_DIMENSION {
            return Err(Gf2Error::TooLarge {
                got: cols,
                max: MAX_DIMENSION,
            });
        }
        if rows.len() > MAX_DIMENSION {
            return Err(Gf2Error::TooLarge {
                got: rows.len(),
                max: MAX_DIMENSION,
            });
        }
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(Gf2Error::RaggedRow {
                row,
                len: r.len(),
                expected: cols,
            });
        }
        Ok(Self { cols, rows })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self, Gf2Error> {
        Self::new(cols, vec![BitVector::zeros(cols); rows])
    }

    pub fn identity(n: usize) -> Result<Self, Gf2Error> {
        let rows = (0..n)
            .map(|i| {
                let mut r = BitVector::zeros(n);
                r.set(i, true);
                r
            })
            .collect();
        Self::new(n, rows)
    }

    /// Parses rows written as `0`/`1` strings, e.g. `["1101", "0110"]`.
    pub fn from_strs(rows: &[&str]) -> Result<Self, Gf2Error> {
        let parsed = rows
            .iter()
            .map(|s| s.parse::<BitVector>())
            .collect::<Result<Vec<_>, _>>()?;
        let cols = parsed.first().map_or(0, BitVector::len);
        Self::new(cols, parsed)
    }

    #[inline]
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn col_count(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row].get(col)
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn transpose(&self) -> Self {
        let mut out = vec![BitVector::zeros(self.rows.len()); self.cols];
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.ones_iter() {
                out[j].set(i, true);
            }
        }
        Self {
            cols: self.rows.len(),
            rows: out,
        }
    }

    /// Dimension of the row space.
    ///
    /// Forward elimination only: rows are consumed in order and each pivot is
    /// the lowest set bit of the reduced row.
    pub fn rank(&self) -> usize {
        let mut basis: Vec<Option<BitVector>> = vec![None; self.cols];
        let mut rank = 0;
        for row in &self.rows {
            let mut r = row.clone();
            while let Some(p) = r.lowest_set_bit() {
                match &basis[p] {
                    Some(b) => r ^= b,
                    None => {
                        basis[p] = Some(r);
                        rank += 1;
                        break;
                    }
                }
            }
        }
        rank
    }

    /// Reduced row echelon form with zero rows dropped.
    ///
    /// Pivot columns strictly increase down the rows and each pivot column has
    /// exactly one set bit, so the result is unique per row space.
    pub fn rref(&self) -> Self {
        let mut rows = self.rows.clone();
        let mut r = 0;
        for col in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(col) {
                    *row ^= &pivot;
                }
            }
            r += 1;
        }
        rows.truncate(r);
        Self {
            cols: self.cols,
            rows,
        }
    }

    /// Number of vectors in the row space, `2^rank`.
    pub fn span_size(&self) -> BigUint {
        BigUint::from(1u8) << self.rank()
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BitVector) -> bool {
        if v.len() != self.cols {
            return false;
        }
        let reduced = self.rref();
        let mut r = v.clone();
        for row in reduced.rows() {
            let p = row.lowest_set_bit().expect("rref rows are nonzero");
            if r.get(p) {
                r ^= row;
            }
        }
        r.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn xor_examples() {
        assert_eq!(bv("1101").xor(&bv("0000")).unwrap(), bv("1101"));
        assert_eq!(bv("1101").xor(&bv("1101")).unwrap(), bv("0000"));
        assert_eq!(bv("1011000").xor(&bv("0110000")).unwrap(), bv("1101000"));
    }

    #[test]
    fn xor_length_mismatch() {
        assert_eq!(
            bv("101").xor(&bv("1010")),
            Err(Gf2Error::LengthMismatch { left: 3, right: 4 })
        );
    }

    #[test]
    fn xor_matches_bitwise_oracle() {
        let a = bv("1011000");
        let b = bv("0110000");
        let c = a.xor(&b).unwrap();
        for i in 0..7 {
            assert_eq!(c.get(i), a.get(i) != b.get(i));
        }
    }

    #[test]
    fn bits_past_the_end_read_absent() {
        let v = BitVector::ones(70);
        assert_eq!(v.weight(), 70);
        assert!(!v.get(70));
        assert!(!v.get(1000));
        assert_eq!(v.complement().weight(), 0);
    }

    #[test]
    fn ordering_puts_point_zero_first() {
        // 0010110 < 1110000 because position 0 dominates.
        assert!(bv("0010110") < bv("1110000"));
        assert!(bv("1000000") > bv("0111111"));
        let mut long = BitVector::zeros(130);
        long.set(129, true);
        let mut other = BitVector::zeros(130);
        other.set(64, true);
        assert!(long < other);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(GF2Matrix::identity(5).unwrap().rank(), 5);
        assert_eq!(GF2Matrix::zeros(0, 0).unwrap().rank(), 0);
        assert_eq!(GF2Matrix::zeros(3, 4).unwrap().rank(), 0);
    }

    #[test]
    fn rref_examples() {
        let m = GF2Matrix::from_strs(&["1101", "0110"]).unwrap();
        assert_eq!(m.rref(), GF2Matrix::from_strs(&["1011", "0110"]).unwrap());
        let z = GF2Matrix::from_strs(&["0000"]).unwrap();
        assert_eq!(z.rref().row_count(), 0);
        let d = GF2Matrix::from_strs(&["101", "101"]).unwrap();
        assert_eq!(d.rref(), GF2Matrix::from_strs(&["101"]).unwrap());
    }

    #[test]
    fn span_size_examples() {
        assert_eq!(GF2Matrix::zeros(0, 4).unwrap().span_size(), BigUint::from(1u8));
        assert_eq!(GF2Matrix::identity(3).unwrap().span_size(), BigUint::from(8u8));
    }

    #[test]
    fn construction_rejects_ragged_and_oversized() {
        assert!(matches!(
            GF2Matrix::new(3, vec![bv("101"), bv("10")]),
            Err(Gf2Error::RaggedRow { row: 1, len: 2, expected: 3 })
        ));
        assert!(matches!(
            GF2Matrix::zeros(1, 1024),
            Err(Gf2Error::TooLarge { got: 1024, .. })
        ));
    }

    #[test]
    fn row_space_membership() {
        let m = GF2Matrix::from_strs(&["1100", "0110"]).unwrap();
        assert!(m.row_space_contains(&bv("1010")));
        assert!(m.row_space_contains(&bv("0000")));
        assert!(!m.row_space_contains(&bv("0001")));
    }

    #[test]
    fn from_indices_rejects_out_of_range() {
        assert_eq!(
            BitVector::from_indices(4, &[1, 4]),
            Err(Gf2Error::IndexOutOfRange { index: 4, len: 4 })
        );
    }
}
