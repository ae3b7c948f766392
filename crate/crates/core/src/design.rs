//! Block designs over the point set `0..v`.

use std::fmt;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::gf2::{BitVector, GF2Matrix, Gf2Error, MAX_DIMENSION};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("a design needs at least one point")]
    NoPoints,
    #[error("{v} points exceeds the cap of {max}")]
    TooManyPoints { v: usize, max: usize },
    #[error("block {block} has length {len}, expected {v}")]
    BlockLength { block: usize, len: usize, v: usize },
    #[error("block {block} is empty")]
    EmptyBlock { block: usize },
    #[error("block {block} contains every point")]
    FullBlock { block: usize },
    #[error("t must satisfy 1 <= t <= k = {k}, got {t}")]
    BadStrength { t: usize, k: usize },
    #[error("blocks do not all have the same size")]
    NonUniform,
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// A simple block design: `v` points and a canonically ordered list of
/// distinct blocks.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Design {
    v: usize,
    blocks: Vec<BitVector>,
}

impl Design {
    /// Sorts and deduplicates `blocks`. Empty and full blocks are rejected.
    pub fn new(v: usize, blocks: Vec<BitVector>) -> Result<Self, DesignError> {
        let d = Self::raw(v, blocks)?;
        let full = BitVector::ones(v);
        for (i, b) in d.blocks.iter().enumerate() {
            if b.is_zero() {
                return Err(DesignError::EmptyBlock { block: i });
            }
            if *b == full {
                return Err(DesignError::FullBlock { block: i });
            }
        }
        Ok(d)
    }

    /// Like [`Design::new`] but keeps empty or full blocks.
    pub fn raw(v: usize, mut blocks: Vec<BitVector>) -> Result<Self, DesignError> {
        if v == 0 {
            return Err(DesignError::NoPoints);
        }
        if v > MAX_DIMENSION {
            return Err(DesignError::TooManyPoints {
                v,
                max: MAX_DIMENSION,
            });
        }
        if let Some((i, b)) = blocks.iter().enumerate().find(|(_, b)| b.len() != v) {
            return Err(DesignError::BlockLength {
                block: i,
                len: b.len(),
                v,
            });
        }
        blocks.sort_unstable();
        blocks.dedup();
        Ok(Self { v, blocks })
    }

    pub fn from_point_lists<B: AsRef<[usize]>>(v: usize, blocks: &[B]) -> Result<Self, DesignError> {
        let blocks = blocks
            .iter()
            .map(|b| BitVector::from_indices(v, b.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(v, blocks)
    }

    /// Builds a design from a `v x b` incidence matrix (column `j` = block `j`).
    pub fn from_incidence_matrix(m: &GF2Matrix) -> Result<Self, DesignError> {
        Self::new(m.row_count(), m.transpose().into_rows())
    }

    #[inline]
    pub fn v(&self) -> usize {
        self.v
    }

    #[inline]
    pub fn b(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[BitVector] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &BitVector {
        &self.blocks[i]
    }

    pub fn block_points(&self, i: usize) -> Vec<usize> {
        self.blocks[i].to_indices()
    }

    /// Index of `block` in canonical order.
    pub fn index_of(&self, block: &BitVector) -> Option<usize> {
        self.blocks.binary_search(block).ok()
    }

    pub fn contains_block(&self, block: &BitVector) -> bool {
        self.index_of(block).is_some()
    }

    /// `v x b` matrix whose column `j` is the characteristic vector of block `j`.
    pub fn incidence_matrix(&self) -> GF2Matrix {
        GF2Matrix::new(self.blocks.len(), self.point_rows()).expect("v and b are within the cap")
    }

    /// Row `i` lists the blocks through point `i`.
    pub(crate) fn point_rows(&self) -> Vec<BitVector> {
        let mut rows = vec![BitVector::zeros(self.blocks.len()); self.v];
        for (j, block) in self.blocks.iter().enumerate() {
            for p in block.ones_iter() {
                rows[p].set(j, true);
            }
        }
        rows
    }

    /// Replaces every block by its complement in the point set.
    pub fn complement(&self) -> Result<Self, DesignError> {
        Self::new(self.v, self.blocks.iter().map(BitVector::complement).collect())
    }

    /// Checks the balanced incomplete block design conditions and returns the
    /// parameters, or the first violation in scan order: block sizes, then the
    /// range of `k`, then point pairs in lexicographic order.
    pub fn verify_bibd(&self) -> Result<DesignParams, BibdRejection> {
        if self.v < 2 {
            return Err(BibdRejection::TooFewPoints { v: self.v });
        }
        let Some(first) = self.blocks.first() else {
            return Err(BibdRejection::NoBlocks);
        };
        let k = first.weight();
        if let Some((block, b)) = self.blocks.iter().enumerate().find(|(_, b)| b.weight() != k) {
            return Err(BibdRejection::NonUniformBlockSize {
                block,
                size: b.weight(),
                expected: k,
            });
        }
        if !(2..self.v).contains(&k) {
            return Err(BibdRejection::BlockSizeOutOfRange { k, v: self.v });
        }
        let rows = self.point_rows();
        let lambda = rows[0].and_weight(&rows[1]);
        for (a, b) in (0..self.v).tuple_combinations() {
            let count = rows[a].and_weight(&rows[b]);
            if count != lambda {
                return Err(BibdRejection::UnbalancedPair {
                    pair: (a, b),
                    count,
                    expected: lambda,
                });
            }
        }
        // Pair balance with k >= 2 forces a constant replication number.
        let r = rows[0].weight();
        let params = DesignParams {
            v: self.v,
            b: self.blocks.len(),
            k,
            r,
            lambda,
        };
        debug_assert!(params.counting_identities_hold());
        Ok(params)
    }

    /// `Some(intersection size)` iff the design is a symmetric BIBD.
    pub fn symmetry(&self) -> Result<Symmetry, BibdRejection> {
        let params = self.verify_bibd()?;
        if params.v != params.b {
            return Ok(Symmetry {
                symmetric: false,
                intersection_size: None,
            });
        }
        let constant = self
            .blocks
            .iter()
            .tuple_combinations()
            .all(|(x, y)| x.and_weight(y) == params.lambda);
        Ok(Symmetry {
            symmetric: constant,
            intersection_size: constant.then_some(params.lambda),
        })
    }

    /// Number of blocks through every `t`-subset of points, if constant.
    pub fn coverage_number(&self, t: usize) -> Result<Coverage, DesignError> {
        let k = self.blocks.first().map_or(0, BitVector::weight);
        if self.blocks.iter().any(|b| b.weight() != k) {
            return Err(DesignError::NonUniform);
        }
        if t == 0 || t > k {
            return Err(DesignError::BadStrength { t, k });
        }
        let rows = self.point_rows();
        let mut expected = None;
        for subset in (0..self.v).combinations(t) {
            let mut acc = rows[subset[0]].clone();
            for &p in &subset[1..] {
                acc = &acc & &rows[p];
            }
            let count = acc.weight();
            match expected {
                None => expected = Some(count),
                Some(e) if e != count => {
                    return Ok(Coverage::Unbalanced {
                        subset,
                        count,
                        expected: e,
                    })
                }
                Some(_) => {}
            }
        }
        Ok(Coverage::Balanced {
            t,
            lambda_t: expected.unwrap_or(0),
        })
    }
}

impl fmt::Debug for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Design")
            .field("v", &self.v)
            .field(
                "blocks",
                &self.blocks.iter().map(BitVector::to_indices).collect::<Vec<_>>(),
            )
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DesignParams {
    pub v: usize,
    pub b: usize,
    pub k: usize,
    pub r: usize,
    pub lambda: usize,
}

impl DesignParams {
    pub fn is_symmetric(&self) -> bool {
        self.v == self.b
    }

    /// `bk = vr` and `lambda (v - 1) = r (k - 1)`.
    pub fn counting_identities_hold(&self) -> bool {
        self.b * self.k == self.v * self.r && self.lambda * (self.v - 1) == self.r * (self.k - 1)
    }

    /// The `(2^n - 1, 2^(n-1), 2^(n-2))` symmetric parameters, for `n >= 2`.
    pub fn group_shape(n: usize) -> Option<Self> {
        if !(2..=62).contains(&n) {
            return None;
        }
        let v = (1usize << n) - 1;
        Some(Self {
            v,
            b: v,
            k: 1 << (n - 1),
            r: 1 << (n - 1),
            lambda: 1 << (n - 2),
        })
    }

    /// The `n` for which these are [`DesignParams::group_shape`] parameters.
    pub fn group_shape_exponent(&self) -> Option<usize> {
        let n = (self.v + 1).checked_ilog2()? as usize;
        (Self::group_shape(n) == Some(*self)).then_some(n)
    }
}

impl fmt::Display for DesignParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "v={} b={} k={} r={} lambda={}",
            self.v, self.b, self.k, self.r, self.lambda
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Error)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum BibdRejection {
    #[error("need at least 2 points, got {v}")]
    TooFewPoints { v: usize },
    #[error("design has no blocks")]
    NoBlocks,
    #[error("block {block} has size {size}, expected {expected}")]
    NonUniformBlockSize {
        block: usize,
        size: usize,
        expected: usize,
    },
    #[error("block size k={k} violates v > k >= 2 with v={v}")]
    BlockSizeOutOfRange { k: usize, v: usize },
    #[error("pair ({}, {}) covered {count} times, pair (0, 1) covered {expected} times", pair.0, pair.1)]
    UnbalancedPair {
        pair: (usize, usize),
        count: usize,
        expected: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Symmetry {
    pub symmetric: bool,
    pub intersection_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Coverage {
    Balanced {
        t: usize,
        lambda_t: usize,
    },
    Unbalanced {
        subset: Vec<usize>,
        count: usize,
        expected: usize,
    },
}

impl Coverage {
    pub fn lambda(&self) -> Option<usize> {
        match self {
            Coverage::Balanced { lambda_t, .. } => Some(*lambda_t),
            Coverage::Unbalanced { .. } => None,
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn fano() -> Design {
        Design::from_point_lists(
            7,
            &[
                [0, 1, 2],
                [0, 3, 4],
                [0, 5, 6],
                [1, 3, 5],
                [1, 4, 6],
                [2, 3, 6],
                [2, 4, 5],
            ],
        )
        .unwrap()
    }

    /// Pair counts by enumerating blocks point by point, independent of the
    /// packed incidence rows.
    fn pair_counts_oracle(d: &Design) -> Vec<usize> {
        let mut counts = Vec::new();
        for a in 0..d.v() {
            for b in a + 1..d.v() {
                counts.push(
                    (0..d.b())
                        .filter(|&j| {
                            let pts = d.block_points(j);
                            pts.contains(&a) && pts.contains(&b)
                        })
                        .count(),
                );
            }
        }
        counts
    }

    #[test]
    fn fano_parameters() {
        let d = fano();
        let counts = pair_counts_oracle(&d);
        assert_eq!(counts.len(), 21);
        assert!(counts.iter().all(|&c| c == 1));
        assert_eq!(
            d.verify_bibd().unwrap(),
            DesignParams {
                v: 7,
                b: 7,
                k: 3,
                r: 3,
                lambda: 1
            }
        );
    }

    #[test]
    fn unbalanced_rejection_names_first_pair() {
        let d = Design::from_point_lists(4, &[[0, 1], [2, 3]]).unwrap();
        assert_eq!(
            d.verify_bibd(),
            Err(BibdRejection::UnbalancedPair {
                pair: (0, 2),
                count: 0,
                expected: 1
            })
        );
    }

    #[test]
    fn non_uniform_and_k_range_rejections() {
        let d = Design::from_point_lists(4, &[vec![0, 1], vec![0, 1, 2]]).unwrap();
        assert!(matches!(
            d.verify_bibd(),
            Err(BibdRejection::NonUniformBlockSize { size: 3, expected: 2, .. })
        ));
        let d = Design::from_point_lists(3, &[[0], [1], [2]]).unwrap();
        assert_eq!(d.verify_bibd(), Err(BibdRejection::BlockSizeOutOfRange { k: 1, v: 3 }));
        let d = Design::from_point_lists(1, &[[0]]);
        assert!(matches!(d, Err(DesignError::FullBlock { .. })));
        let d = Design::new(3, vec![]).unwrap();
        assert_eq!(d.verify_bibd(), Err(BibdRejection::NoBlocks));
    }

    #[test]
    fn blocks_are_canonical_and_deduplicated() {
        let a = Design::from_point_lists(4, &[[0, 1], [2, 3], [0, 1]]).unwrap();
        let b = Design::from_point_lists(4, &[[2, 3], [1, 0]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.b(), 2);
        assert_eq!(a.block_points(0), vec![2, 3]);
    }

    #[test]
    fn fano_symmetry_and_coverage() {
        let d = fano();
        assert_eq!(
            d.symmetry().unwrap(),
            Symmetry {
                symmetric: true,
                intersection_size: Some(1)
            }
        );
        assert_eq!(d.coverage_number(1).unwrap().lambda(), Some(3));
        assert_eq!(d.coverage_number(2).unwrap().lambda(), Some(1));
        assert!(matches!(
            d.coverage_number(3).unwrap(),
            Coverage::Unbalanced { .. }
        ));
        assert_eq!(
            d.coverage_number(4),
            Err(DesignError::BadStrength { t: 4, k: 3 })
        );
    }

    #[test]
    fn complement_is_involution() {
        let d = fano();
        let c = d.complement().unwrap();
        assert_eq!(c.verify_bibd().unwrap().k, 4);
        assert_eq!(c.verify_bibd().unwrap().lambda, 2);
        assert_eq!(c.complement().unwrap(), d);
    }

    #[test]
    fn incidence_matrix_single_block() {
        let d = Design::from_point_lists(3, &[[0, 2]]).unwrap();
        let m = d.incidence_matrix();
        assert_eq!((m.row_count(), m.col_count()), (3, 1));
        assert!(m.get(0, 0) && !m.get(1, 0) && m.get(2, 0));
        assert_eq!(Design::from_incidence_matrix(&m).unwrap(), d);
    }

    #[test]
    fn fano_rank_matches_hand_elimination() {
        // Independent oracle: dense 0/1 elimination on plain vectors.
        let d = fano();
        let mut m: Vec<Vec<u8>> = (0..7)
            .map(|p| (0..7).map(|j| d.block(j).get(p) as u8).collect())
            .collect();
        let mut rank = 0;
        for col in 0..7 {
            if let Some(pr) = (rank..7).find(|&r| m[r][col] == 1) {
                m.swap(rank, pr);
                for r in 0..7 {
                    if r != rank && m[r][col] == 1 {
                        for c in 0..7 {
                            m[r][c] ^= m[rank][c];
                        }
                    }
                }
                rank += 1;
            }
        }
        assert_eq!(rank, 4);
        assert_eq!(d.incidence_matrix().rank(), 4);
    }

    #[test]
    fn group_shape_round_trip() {
        let p = DesignParams::group_shape(3).unwrap();
        assert_eq!((p.v, p.k, p.lambda), (7, 4, 2));
        assert_eq!(p.group_shape_exponent(), Some(3));
        assert_eq!(fano().verify_bibd().unwrap().group_shape_exponent(), None);
        assert_eq!(DesignParams::group_shape(1), None);
    }
}
