//! Exhaustive search for Δ-closed block sets on `v = 2^n - 1` points.
//!
//! A Δ-closed block set together with `∅` is an `n`-dimensional subspace of
//! GF(2)^v whose nonzero vectors all have weight `2^(n-1)`. Subspaces are
//! enumerated once each through their reduced row echelon basis, built row
//! by row in increasing order of the rows' integer encodings (bit `i` is
//! point `i`). A partial basis is abandoned as soon as a vector in its span
//! has the wrong weight.
//!
//! Every hit is re-verified as a BIBD and as Δ-closed, then bucketed into
//! isomorphism classes.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::constructions::pg_complement;
use crate::design::{Design, DesignParams};
use crate::gf2::BitVector;
use crate::iso::canonical_form;

/// Largest `n` searched without the long-run flag.
pub const MAX_DEFAULT_N: usize = 4;
/// Largest `n` searched at all.
pub const MAX_LONG_N: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("v = {0} is not 2^n - 1 for 2 <= n <= {MAX_LONG_N}")]
    BadPointCount(usize),
    #[error("v = {v} (n = {n}) needs the long-run flag")]
    NeedsLongRun { v: usize, n: usize },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EnumerationOptions {
    /// Permit `n = 5` (`v = 31`), which has no completion-time bound.
    pub allow_long: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub subtrees_done: usize,
    pub subtrees_total: usize,
    pub labeled_so_far: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerationResult {
    pub v: usize,
    pub n: usize,
    pub labeled_count: u64,
    #[serde(skip)]
    pub class_representatives: Vec<Design>,
    pub class_sizes: Vec<u64>,
    /// Every hit passed `verify_bibd`.
    pub all_bibd: bool,
    /// Every hit had parameters `(2^n - 1, 2^(n-1), 2^(n-2))`.
    pub all_group_shape: bool,
    /// Every hit re-checked as Δ-closed with dimension `n`.
    pub all_closed: bool,
    /// Basis of the first subspace found in scan order.
    #[serde(skip)]
    pub first_basis: Option<Vec<BitVector>>,
}

impl EnumerationResult {
    pub fn class_count(&self) -> usize {
        self.class_representatives.len()
    }
}

/// `n` with `v = 2^n - 1`, if any.
pub fn dimension_for(v: usize) -> Option<usize> {
    let n = (v + 1).checked_ilog2()? as usize;
    ((1usize << n) - 1 == v).then_some(n)
}

fn check_request(v: usize, options: EnumerationOptions) -> Result<usize, EnumerationError> {
    let n = dimension_for(v)
        .filter(|n| (2..=MAX_LONG_N).contains(n))
        .ok_or(EnumerationError::BadPointCount(v))?;
    if n > MAX_DEFAULT_N && !options.allow_long {
        return Err(EnumerationError::NeedsLongRun { v, n });
    }
    Ok(n)
}

/// Words of `v` bits with exactly `w` bits set, in increasing order.
fn words_of_weight(v: usize, w: usize) -> impl Iterator<Item = u64> {
    let limit = 1u64 << v;
    let start = if w == 0 { 0 } else { (1u64 << w) - 1 };
    std::iter::successors((w <= v).then_some(start), move |&x| {
        if x == 0 {
            return None;
        }
        // Gosper's hack: next word with the same popcount.
        let c = x & x.wrapping_neg();
        let r = x + c;
        let next = (((r ^ x) >> 2) / c) | r;
        (next < limit).then_some(next)
    })
}

struct BasisSearch<'f, F: FnMut(&[u64])> {
    n: usize,
    weight: u32,
    rows: Vec<u64>,
    span: Vec<u64>,
    visit: &'f mut F,
    count: u64,
}

impl<F: FnMut(&[u64])> BasisSearch<'_, F> {
    /// Tries each candidate as the next basis row; `cands` already satisfy the
    /// weight conditions against the current span.
    fn extend(&mut self, cands: &[u64]) {
        for &c in cands {
            let pivot = c.trailing_zeros();
            if self.rows.iter().any(|r| (r >> pivot) & 1 == 1) {
                continue;
            }
            self.push(c);
            if self.rows.len() == self.n {
                self.count += 1;
                (self.visit)(&self.rows);
            } else {
                let next = self.filter(cands, c);
                if !next.is_empty() {
                    self.extend(&next);
                }
            }
            self.pop();
        }
    }

    /// Candidates that can follow `c`: larger pivot, zero at `c`'s pivot
    /// (keeps the basis reduced), and weight `w` against every new span vector.
    fn filter(&self, cands: &[u64], c: u64) -> Vec<u64> {
        let pivot = c.trailing_zeros();
        let fresh = &self.span[self.span.len() / 2..];
        cands
            .iter()
            .copied()
            .filter(|&d| {
                d.trailing_zeros() > pivot && (c >> d.trailing_zeros()) & 1 == 0 && fresh.iter().all(|&s| (s ^ d).count_ones() == self.weight)
            })
            .collect()
    }

    fn push(&mut self, c: u64) {
        let old = self.span.len();
        for i in 0..old {
            let x = self.span[i] ^ c;
            self.span.push(x);
        }
        self.rows.push(c);
    }

    fn pop(&mut self) {
        self.rows.pop();
        let half = self.span.len() / 2;
        self.span.truncate(half);
    }
}

/// Walks the search subtree whose first basis row is `first`, calling `visit`
/// with each complete basis. Returns the number of bases visited.
fn search_subtree(v: usize, n: usize, first: u64, visit: &mut impl FnMut(&[u64])) -> u64 {
    let weight = 1u32 << (n - 1);
    let mut search = BasisSearch {
        n,
        weight,
        rows: Vec::with_capacity(n),
        span: Vec::with_capacity(1 << n),
        visit,
        count: 0,
    };
    search.span.push(0);
    search.push(first);
    if n == 1 {
        search.count = 1;
        (search.visit)(&search.rows);
        return 1;
    }
    let pivot = first.trailing_zeros();
    let second: Vec<u64> = words_of_weight(v, weight as usize)
        .filter(|&d| {
            d.trailing_zeros() > pivot && (first >> d.trailing_zeros()) & 1 == 0 && (d ^ first).count_ones() == weight
        })
        .collect();
    search.extend(&second);
    search.count
}

/// Streams every reduced basis of an `n`-dimensional subspace of GF(2)^v
/// whose nonzero vectors all have weight `2^(n-1)`, in scan order. Rows are
/// packed words, bit `i` = point `i`. Returns the number of bases.
pub fn weight_filtered_basis_search(v: usize, n: usize, mut visit: impl FnMut(&[u64])) -> u64 {
    assert!(v < 64 && n >= 1, "packed search needs v < 64");
    words_of_weight(v, 1 << (n - 1))
        .map(|first| search_subtree(v, n, first, &mut visit))
        .sum()
}

/// The block set spanned by a packed basis.
pub fn design_from_basis(v: usize, basis: &[u64]) -> Design {
    let mut span = vec![0u64];
    for &r in basis {
        let len = span.len();
        for i in 0..len {
            span.push(span[i] ^ r);
        }
    }
    let blocks = span[1..].iter().map(|&w| BitVector::from_word(v, w)).collect();
    Design::new(v, blocks).expect("span vectors are distinct, nonzero and not full")
}

/// The sorted nonzero vectors spanned by a packed basis.
fn span_words(basis: &[u64]) -> Vec<u64> {
    let mut span = Vec::with_capacity(1 << basis.len());
    span.push(0u64);
    for &r in basis {
        for i in 0..span.len() {
            span.push(span[i] ^ r);
        }
    }
    span.sort_unstable();
    span.remove(0);
    span
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PackedCheck {
    bibd: bool,
    group_shape: bool,
    closed: bool,
}

/// The BIBD and Δ-closure checks of [`Design::verify_bibd`] and
/// [`delta_closure_check`] on sorted distinct packed blocks (at most 64 of
/// them), without building a [`Design`].
fn packed_check(v: usize, n: usize, blocks: &[u64]) -> PackedCheck {
    let b = blocks.len();
    let k = blocks.first().map_or(0, |w| w.count_ones() as usize);
    let mut bibd = v >= 2 && b > 0 && b <= 64;
    bibd &= blocks.iter().all(|w| w.count_ones() as usize == k) && k >= 2 && k < v;
    let mut lambda = 0;
    if bibd {
        // Row `p` marks the blocks through point `p`.
        let mut rows = [0u64; 64];
        for (j, &w) in blocks.iter().enumerate() {
            for (p, row) in rows.iter_mut().enumerate().take(v) {
                *row |= ((w >> p) & 1) << j;
            }
        }
        lambda = (rows[0] & rows[1]).count_ones();
        bibd = (0..v).all(|i| (i + 1..v).all(|j| (rows[i] & rows[j]).count_ones() == lambda));
    }
    let shape = DesignParams::group_shape(n).expect("n >= 2");
    let group_shape = bibd && b == shape.b && k == shape.k && lambda as usize == shape.lambda;
    let closed = b + 1 == 1 << n
        && (0..b).all(|i| (i + 1..b).all(|j| blocks.binary_search(&(blocks[i] ^ blocks[j])).is_ok()));
    PackedCheck { bibd, group_shape, closed }
}

/// Sends point `j` to `c_j - 1`, where `c_j` is column `j` of the basis read
/// as an integer, and tests whether that carries `blocks` onto `reference`
/// (both packed, in increasing numeric order). When the columns are exactly
/// the nonzero vectors of GF(2)^n this is the coordinate map onto the
/// complement of PG(n-1, 2).
fn coordinate_certificate_holds(v: usize, basis: &[u64], blocks: &[u64], reference: &[u64]) -> bool {
    let mut image = [0usize; 64];
    let mut seen = 0u64;
    for (j, slot) in image.iter_mut().enumerate().take(v) {
        let c = basis
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, r)| acc | ((((r >> j) & 1) as usize) << i));
        if c == 0 || c > v || (seen >> (c - 1)) & 1 == 1 {
            return false;
        }
        seen |= 1 << (c - 1);
        *slot = c - 1;
    }
    let mut mapped = [0u64; 64];
    for (m, &w) in mapped.iter_mut().zip(blocks) {
        let mut x = w;
        while x != 0 {
            let p = x.trailing_zeros() as usize;
            *m |= 1 << image[p];
            x &= x - 1;
        }
    }
    let mapped = &mut mapped[..blocks.len()];
    mapped.sort_unstable();
    mapped == reference
}

struct Class {
    key: Design,
    representative: Design,
    size: u64,
}

struct Partial {
    labeled: u64,
    classes: Vec<Class>,
    all_bibd: bool,
    all_group_shape: bool,
    all_closed: bool,
    first_basis: Option<Vec<u64>>,
}

impl Partial {
    fn new() -> Self {
        Self {
            labeled: 0,
            classes: Vec::new(),
            all_bibd: true,
            all_group_shape: true,
            all_closed: true,
            first_basis: None,
        }
    }

    fn add(&mut self, key: &Design, representative: impl FnOnce() -> Design, size: u64) {
        match self.classes.iter_mut().find(|c| c.key == *key) {
            Some(c) => c.size += size,
            None => self.classes.push(Class {
                key: key.clone(),
                representative: representative(),
                size,
            }),
        }
    }

    fn merge(&mut self, other: Partial) {
        self.labeled += other.labeled;
        self.all_bibd &= other.all_bibd;
        self.all_group_shape &= other.all_group_shape;
        self.all_closed &= other.all_closed;
        if self.first_basis.is_none() {
            self.first_basis = other.first_basis;
        }
        for c in other.classes {
            let rep = c.representative;
            self.add(&c.key, || rep, c.size);
        }
    }
}

pub fn enumerate_delta_closed(v: usize, options: EnumerationOptions) -> Result<EnumerationResult, EnumerationError> {
    enumerate_delta_closed_with_progress(v, options, &|_| {})
}

/// As [`enumerate_delta_closed`], reporting after each first-row subtree.
/// Subtrees may run in parallel; the result is merged in scan order and does
/// not depend on the worker count.
pub fn enumerate_delta_closed_with_progress(
    v: usize,
    options: EnumerationOptions,
    progress: &(dyn Fn(Progress) + Sync),
) -> Result<EnumerationResult, EnumerationError> {
    let n = check_request(v, options)?;
    let reference = pg_complement(n).expect("n within construction range");
    let mut reference_words: Vec<u64> = reference.blocks().iter().map(BitVector::low_word).collect();
    reference_words.sort_unstable();
    let reference_key = canonical_form(&reference)
        .expect("v within canonical form cap")
        .design;

    let first_rows: Vec<u64> = words_of_weight(v, 1 << (n - 1)).collect();
    let done = AtomicUsize::new(0);
    let labeled = AtomicU64::new(0);

    let partials: Vec<Partial> = first_rows
        .par_iter()
        .map(|&first| {
            let mut partial = Partial::new();
            search_subtree(v, n, first, &mut |basis| {
                partial.labeled += 1;
                if partial.first_basis.is_none() {
                    partial.first_basis = Some(basis.to_vec());
                }
                let blocks = span_words(basis);
                let check = packed_check(v, n, &blocks);
                partial.all_bibd &= check.bibd;
                partial.all_group_shape &= check.group_shape;
                partial.all_closed &= check.closed;
                if coordinate_certificate_holds(v, basis, &blocks, &reference_words) {
                    partial.add(&reference_key, || design_from_basis(v, basis), 1);
                } else {
                    let design = design_from_basis(v, basis);
                    let key = canonical_form(&design).expect("v within cap").design;
                    partial.add(&key, || design, 1);
                }
            });
            let d = done.fetch_add(1, Ordering::Relaxed) + 1;
            let l = labeled.fetch_add(partial.labeled, Ordering::Relaxed) + partial.labeled;
            progress(Progress {
                subtrees_done: d,
                subtrees_total: first_rows.len(),
                labeled_so_far: l,
            });
            partial
        })
        .collect();

    let mut total = Partial::new();
    for p in partials {
        total.merge(p);
    }
    Ok(EnumerationResult {
        v,
        n,
        labeled_count: total.labeled,
        class_sizes: total.classes.iter().map(|c| c.size).collect(),
        class_representatives: total.classes.into_iter().map(|c| c.representative).collect(),
        all_bibd: total.all_bibd,
        all_group_shape: total.all_group_shape,
        all_closed: total.all_closed,
        first_basis: total
            .first_basis
            .map(|b| b.iter().map(|&w| BitVector::from_word(v, w)).collect()),
    })
}
