//! Design isomorphism by individualization and refinement.
//!
//! Points are kept in an ordered partition that is refined until equitable
//! with respect to the point/block incidence structure. A non-singleton cell
//! is then split by individualizing each of its points in turn. Every leaf
//! (discrete partition) gives a relabeling of the design; the canonical form
//! is the least relabeled design over all leaves.
//!
//! Two leaves with the same relabeled design differ by an automorphism. Those
//! automorphisms prune sibling subtrees lying in one orbit of the pointwise
//! stabilizer of the current prefix. A leaf matching the first leaf also
//! lets the search return straight to the level where it left the first path.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::design::Design;
use crate::gf2::BitVector;

/// Largest point count accepted by [`canonical_form`].
pub const MAX_CANONICAL_POINTS: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("{v} points exceeds the canonical form cap of {max}")]
    TooLarge { v: usize, max: usize },
    #[error("permutation has length {got}, design has {expected} points")]
    LengthMismatch { got: usize, expected: usize },
    #[error("mapping is not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("invalid certificate token {0:?}")]
    BadToken(String),
}

/// A bijection on `0..v`; point `i` maps to `mapping[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PointPermutation {
    mapping: Vec<usize>,
}

impl PointPermutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self, IsoError> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || std::mem::replace(&mut seen[m], true) {
                return Err(IsoError::NotPermutation(n));
            }
        }
        Ok(Self { mapping })
    }

    pub fn identity(v: usize) -> Self {
        Self {
            mapping: (0..v).collect(),
        }
    }

    pub fn transposition(v: usize, a: usize, b: usize) -> Self {
        let mut mapping: Vec<usize> = (0..v).collect();
        mapping.swap(a, b);
        Self { mapping }
    }

    #[inline]
    pub fn apply(&self, p: usize) -> usize {
        self.mapping[p]
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.mapping
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        Self { mapping: inv }
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &Self) -> Self {
        Self {
            mapping: self.mapping.iter().map(|&m| next.mapping[m]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &m)| i == m)
    }
}

/// One line of space-separated images.
impl fmt::Display for PointPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.mapping.iter().join(" "))
    }
}

impl FromStr for PointPermutation {
    type Err = IsoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mapping = s
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| IsoError::BadToken(t.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(mapping)
    }
}

/// Maps every block through `p` and re-sorts the blocks canonically.
pub fn apply_permutation(d: &Design, p: &PointPermutation) -> Result<Design, IsoError> {
    if p.len() != d.v() {
        return Err(IsoError::LengthMismatch {
            got: p.len(),
            expected: d.v(),
        });
    }
    Ok(permute_unchecked(d, p.as_slice()))
}

fn permute_unchecked(d: &Design, mapping: &[usize]) -> Design {
    let blocks = d
        .blocks()
        .iter()
        .map(|b| {
            let mut out = BitVector::zeros(d.v());
            for x in b.ones_iter() {
                out.set(mapping[x], true);
            }
            out
        })
        .collect();
    Design::raw(d.v(), blocks).expect("relabeling preserves validity")
}

/// Checks `apply_permutation(d1, p) == d2` as block sets, using plain point
/// lists rather than the packed representation.
pub fn verify_certificate(d1: &Design, d2: &Design, p: &PointPermutation) -> bool {
    if d1.v() != d2.v() || p.len() != d1.v() || PointPermutation::new(p.mapping.clone()).is_err() {
        return false;
    }
    let image: BTreeSet<Vec<usize>> = (0..d1.b())
        .map(|j| {
            let mut pts: Vec<usize> = d1.block_points(j).into_iter().map(|x| p.apply(x)).collect();
            pts.sort_unstable();
            pts
        })
        .collect();
    let target: BTreeSet<Vec<usize>> = (0..d2.b()).map(|j| d2.block_points(j)).collect();
    image.len() == d1.b() && image == target
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub design: Design,
    /// Maps input points to canonical points.
    pub labeling: PointPermutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Use discovered automorphisms to skip equivalent subtrees.
    pub prune_automorphisms: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            prune_automorphisms: true,
        }
    }
}

pub fn canonical_form(d: &Design) -> Result<CanonicalForm, IsoError> {
    canonical_form_with(d, SearchOptions::default())
}

pub fn canonical_form_with(d: &Design, options: SearchOptions) -> Result<CanonicalForm, IsoError> {
    let mut search = Search::new(d, options)?;
    search.run();
    let (design, labeling) = search.best.expect("the search tree has at least one leaf");
    Ok(CanonicalForm {
        design,
        labeling: PointPermutation { mapping: labeling },
    })
}

/// Order of the automorphism group, by counting every leaf of the unpruned
/// search tree that reproduces the first leaf's relabeled design.
pub fn automorphism_count(d: &Design) -> Result<u64, IsoError> {
    let mut search = Search::new(
        d,
        SearchOptions {
            prune_automorphisms: false,
        },
    )?;
    search.count_first_matches = true;
    search.run();
    Ok(search.first_matches)
}

/// A certificate `p` with `apply_permutation(d1, p) == d2`, or `None` when the
/// designs are not isomorphic.
pub fn are_isomorphic(d1: &Design, d2: &Design) -> Result<Option<PointPermutation>, IsoError> {
    are_isomorphic_with(d1, d2, SearchOptions::default())
}

pub fn are_isomorphic_with(
    d1: &Design,
    d2: &Design,
    options: SearchOptions,
) -> Result<Option<PointPermutation>, IsoError> {
    if d1.v() != d2.v() || d1.b() != d2.b() || block_sizes(d1) != block_sizes(d2) {
        return Ok(None);
    }
    let c1 = canonical_form_with(d1, options)?;
    let c2 = canonical_form_with(d2, options)?;
    if c1.design != c2.design {
        return Ok(None);
    }
    let cert = c1.labeling.then(&c2.labeling.inverse());
    debug_assert!(verify_certificate(d1, d2, &cert));
    Ok(Some(cert))
}

fn block_sizes(d: &Design) -> Vec<usize> {
    d.blocks().iter().map(BitVector::weight).sorted_unstable().collect()
}

enum Flow {
    Continue,
    /// Unwind to the node at this depth and resume its sibling loop.
    JumpTo(usize),
}

struct Search<'a> {
    design: &'a Design,
    point_blocks: Vec<Vec<usize>>,
    block_points: Vec<Vec<usize>>,
    options: SearchOptions,
    first: Option<(Design, Vec<usize>)>,
    first_path: Vec<usize>,
    best: Option<(Design, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
    count_first_matches: bool,
    first_matches: u64,
}

impl<'a> Search<'a> {
    fn new(design: &'a Design, options: SearchOptions) -> Result<Self, IsoError> {
        if design.v() > MAX_CANONICAL_POINTS {
            return Err(IsoError::TooLarge {
                v: design.v(),
                max: MAX_CANONICAL_POINTS,
            });
        }
        let block_points: Vec<Vec<usize>> = (0..design.b()).map(|j| design.block_points(j)).collect();
        let mut point_blocks = vec![Vec::new(); design.v()];
        for (j, pts) in block_points.iter().enumerate() {
            for &p in pts {
                point_blocks[p].push(j);
            }
        }
        Ok(Self {
            design,
            point_blocks,
            block_points,
            options,
            first: None,
            first_path: Vec::new(),
            best: None,
            automorphisms: Vec::new(),
            count_first_matches: false,
            first_matches: 0,
        })
    }

    fn run(&mut self) {
        let cells = self.initial_partition();
        let mut prefix = Vec::new();
        self.descend(cells, &mut prefix);
    }

    /// Cells ordered by (degree, co-occurrence multiset, block-size multiset).
    fn initial_partition(&self) -> Vec<Vec<usize>> {
        let v = self.design.v();
        let rows = self.design.point_rows();
        let signature = |p: usize| {
            let degree = self.point_blocks[p].len();
            let co: Vec<usize> = (0..v)
                .filter(|&q| q != p)
                .map(|q| rows[p].and_weight(&rows[q]))
                .sorted_unstable()
                .collect();
            let sizes: Vec<usize> = self.point_blocks[p]
                .iter()
                .map(|&j| self.block_points[j].len())
                .sorted_unstable()
                .collect();
            (degree, co, sizes)
        };
        let sigs: Vec<_> = (0..v).map(signature).collect();
        let mut order: Vec<usize> = (0..v).collect();
        order.sort_by(|&a, &b| sigs[a].cmp(&sigs[b]).then(a.cmp(&b)));
        order
            .into_iter()
            .chunk_by(|&p| &sigs[p])
            .into_iter()
            .map(|(_, g)| g.collect())
            .collect()
    }

    /// Splits cells by incidence counts until the partition is equitable.
    /// Sub-cells are ordered by signature, so the result depends only on the
    /// structure and the input cell order.
    fn refine(&self, cells: &mut Vec<Vec<usize>>) {
        let v = self.design.v();
        let mut cell_of = vec![0usize; v];
        loop {
            let before = cells.len();
            for (ci, cell) in cells.iter().enumerate() {
                for &p in cell {
                    cell_of[p] = ci;
                }
            }
            let block_sigs: Vec<Vec<u32>> = self
                .block_points
                .iter()
                .map(|pts| {
                    let mut s = vec![0u32; before];
                    for &p in pts {
                        s[cell_of[p]] += 1;
                    }
                    s
                })
                .collect();
            let distinct: Vec<&Vec<u32>> = block_sigs.iter().sorted_unstable().dedup().collect();
            let block_class: Vec<usize> = block_sigs
                .iter()
                .map(|s| distinct.binary_search(&s).expect("present"))
                .collect();
            let classes = distinct.len();
            let mut next = Vec::with_capacity(cells.len());
            for cell in cells.iter() {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let sigs: Vec<(Vec<u32>, usize)> = cell
                    .iter()
                    .map(|&p| {
                        let mut s = vec![0u32; classes];
                        for &j in &self.point_blocks[p] {
                            s[block_class[j]] += 1;
                        }
                        (s, p)
                    })
                    .sorted_unstable()
                    .collect();
                for (_, group) in &sigs.into_iter().chunk_by(|(s, _)| s.clone()) {
                    let mut sub: Vec<usize> = group.map(|(_, p)| p).collect();
                    sub.sort_unstable();
                    next.push(sub);
                }
            }
            *cells = next;
            if cells.len() == before {
                return;
            }
        }
    }

    fn descend(&mut self, mut cells: Vec<Vec<usize>>, prefix: &mut Vec<usize>) -> Flow {
        self.refine(&mut cells);
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            return self.leaf(&cells, prefix);
        };
        let depth = prefix.len();
        let candidates = cells[target].clone();
        let mut explored: Vec<usize> = Vec::new();
        for &c in &candidates {
            if self.options.prune_automorphisms && self.in_explored_orbit(prefix, &explored, c) {
                continue;
            }
            let mut child = Vec::with_capacity(cells.len() + 1);
            child.extend_from_slice(&cells[..target]);
            child.push(vec![c]);
            child.push(cells[target].iter().copied().filter(|&p| p != c).collect());
            child.extend_from_slice(&cells[target + 1..]);
            prefix.push(c);
            let flow = self.descend(child, prefix);
            prefix.pop();
            explored.push(c);
            if let Flow::JumpTo(level) = flow {
                if level < depth {
                    return flow;
                }
            }
        }
        Flow::Continue
    }

    fn leaf(&mut self, cells: &[Vec<usize>], prefix: &[usize]) -> Flow {
        let mut labeling = vec![0usize; self.design.v()];
        for (pos, cell) in cells.iter().enumerate() {
            labeling[cell[0]] = pos;
        }
        let encoded = permute_unchecked(self.design, &labeling);
        let Some((first_design, first_labeling)) = &self.first else {
            self.first = Some((encoded.clone(), labeling.clone()));
            self.first_path = prefix.to_vec();
            self.best = Some((encoded, labeling));
            self.first_matches = 1;
            return Flow::Continue;
        };
        if encoded == *first_design {
            self.first_matches += 1;
            if self.options.prune_automorphisms {
                let gamma = automorphism_between(first_labeling, &labeling);
                self.automorphisms.push(gamma);
                let diverge = prefix
                    .iter()
                    .zip(&self.first_path)
                    .position(|(a, b)| a != b)
                    .unwrap_or(prefix.len());
                return Flow::JumpTo(diverge);
            }
            return Flow::Continue;
        }
        let (best_design, best_labeling) = self.best.as_ref().expect("set with first");
        match encoded.cmp(best_design) {
            std::cmp::Ordering::Less => self.best = Some((encoded, labeling)),
            std::cmp::Ordering::Equal if self.options.prune_automorphisms => {
                let gamma = automorphism_between(best_labeling, &labeling);
                self.automorphisms.push(gamma);
            }
            _ => {}
        }
        Flow::Continue
    }

    /// Whether `c` shares an orbit with an explored sibling under the
    /// automorphisms found so far that fix `prefix` pointwise.
    fn in_explored_orbit(&self, prefix: &[usize], explored: &[usize], c: usize) -> bool {
        if explored.is_empty() || self.automorphisms.is_empty() {
            return false;
        }
        let mut uf = UnionFind::new(self.design.v());
        for g in self
            .automorphisms
            .iter()
            .filter(|g| prefix.iter().all(|&p| g[p] == p))
        {
            for (x, &y) in g.iter().enumerate() {
                uf.union(x, y);
            }
        }
        let root = uf.find(c);
        explored.iter().any(|&e| uf.find(e) == root)
    }
}

/// `first^{-1} ∘ other`: maps `p` to the point holding `other[p]`'s position
/// in the first labeling.
fn automorphism_between(first: &[usize], other: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; first.len()];
    for (p, &pos) in first.iter().enumerate() {
        inv[pos] = p;
    }
    other.iter().map(|&pos| inv[pos]).collect()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{pg_complement, pg_hyperplanes};
    use crate::design::tests::fano;

    #[test]
    fn permutation_validation() {
        assert!(PointPermutation::new(vec![0, 0]).is_err());
        assert!(PointPermutation::new(vec![0, 2]).is_err());
        let p: PointPermutation = "2 0 1".parse().unwrap();
        assert_eq!(p.to_string(), "2 0 1");
        assert!(p.then(&p.inverse()).is_identity());
    }

    #[test]
    fn identity_and_fixed_block() {
        let d = fano();
        assert_eq!(apply_permutation(&d, &PointPermutation::identity(7)).unwrap(), d);
        let swapped = apply_permutation(&d, &PointPermutation::transposition(7, 0, 1)).unwrap();
        assert!(swapped.contains_block(&BitVector::from_indices(7, &[0, 1, 2]).unwrap()));
        assert!(matches!(
            apply_permutation(&d, &PointPermutation::identity(6)),
            Err(IsoError::LengthMismatch { got: 6, expected: 7 })
        ));
    }

    #[test]
    fn wrong_certificate_fails() {
        let d = fano();
        let p = PointPermutation::identity(7);
        assert!(verify_certificate(&d, &d, &p));
        // (0 1) fixes line {0,1,2} but moves {0,3,4} to {1,3,4}, not a line.
        assert!(!verify_certificate(&d, &d, &PointPermutation::transposition(7, 0, 1)));
    }

    #[test]
    fn canonical_form_separates_parameters() {
        let a = canonical_form(&fano()).unwrap();
        let b = canonical_form(&pg_complement(3).unwrap()).unwrap();
        assert_ne!(a.design, b.design);
    }

    #[test]
    fn canonical_form_reproduces_from_labeling() {
        let d = pg_complement(3).unwrap();
        let c = canonical_form(&d).unwrap();
        assert_eq!(apply_permutation(&d, &c.labeling).unwrap(), c.design);
    }

    #[test]
    fn complement_constructions_share_a_form() {
        let a = canonical_form(&pg_complement(4).unwrap()).unwrap();
        let b = canonical_form(&pg_hyperplanes(4).unwrap().complement().unwrap()).unwrap();
        assert_eq!(a.design, b.design);
    }

    #[test]
    fn automorphism_group_orders() {
        assert_eq!(automorphism_count(&fano()).unwrap(), 168);
        assert_eq!(automorphism_count(&pg_complement(3).unwrap()).unwrap(), 168);
    }

    #[test]
    fn rejects_large_designs() {
        let d = Design::from_point_lists(64, &[[0, 1]]).unwrap();
        assert_eq!(
            canonical_form(&d).unwrap_err(),
            IsoError::TooLarge { v: 64, max: 63 }
        );
    }
}
