//! Group laws on blocks.
//!
//! The central question is whether `B ∪ {∅}` is closed under symmetric
//! difference. Closure forces `(4λ - 1, 2λ, λ)` parameters, and combined with
//! the 2-rank `n` of the incidence matrix it is equivalent to the design
//! having parameters `(2^n - 1, 2^(n-1), 2^(n-2))`. The Kantor (SDP) and
//! Kimberley (good block) group laws are implemented alongside.

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::design::{BibdRejection, Design, DesignParams};
use crate::gf2::BitVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("lambda must be at least 1")]
    ZeroLambda,
    #[error("not a BIBD: {0}")]
    NotBibd(#[from] BibdRejection),
    #[error("parameters {0} are not (2^n - 1, 2^(n-1), 2^(n-2)) for any n >= 2")]
    WrongShape(DesignParams),
    #[error("design lacks the symmetric difference property (blocks {0:?})")]
    NotSdp([usize; 3]),
    #[error("base block {base} out of range for {b} blocks")]
    BadBase { base: usize, b: usize },
    #[error("both B Δ X Δ Y and its complement are blocks for X = {x}, Y = {y}")]
    AmbiguousSum { x: usize, y: usize },
    #[error("neither B Δ X Δ Y nor its complement is a block for X = {x}, Y = {y}")]
    NoSum { x: usize, y: usize },
    #[error("complement of block {0} is not a block")]
    NotComplementClosed(usize),
    #[error("design is not a 3-design")]
    NotThreeDesign,
    #[error("no good block classes")]
    NoClasses,
    #[error("classes {0} and {1} compose outside the class set")]
    ClassClosure(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupCheckReport {
    pub closed: bool,
    /// Blocks whose symmetric difference is neither empty nor a block.
    pub witness: Option<(usize, usize)>,
    pub group_order: Option<usize>,
    pub dimension_n: Option<usize>,
    pub elementary_abelian: bool,
}

/// Tests whether every `B_i Δ B_j` (`i < j`) is again a block. The first
/// escaping pair in lexicographic order is reported as the witness.
pub fn delta_closure_check(d: &Design) -> GroupCheckReport {
    let blocks = d.blocks();
    for (i, j) in (0..blocks.len()).tuple_combinations() {
        let sum = &blocks[i] ^ &blocks[j];
        if !d.contains_block(&sum) {
            return GroupCheckReport {
                closed: false,
                witness: Some((i, j)),
                group_order: None,
                dimension_n: None,
                elementary_abelian: false,
            };
        }
    }
    let order = d.b() + 1;
    // A subgroup of an elementary abelian 2-group has power-of-two order.
    debug_assert!(order.is_power_of_two());
    GroupCheckReport {
        closed: true,
        witness: None,
        group_order: Some(order),
        dimension_n: Some(order.trailing_zeros() as usize),
        elementary_abelian: true,
    }
}

/// Parameters forced by closure: `(4λ - 1, 4λ - 1, 2λ, 2λ, λ)`.
pub fn forced_params(lambda: usize) -> Result<DesignParams, GroupError> {
    if lambda == 0 {
        return Err(GroupError::ZeroLambda);
    }
    Ok(DesignParams {
        v: 4 * lambda - 1,
        b: 4 * lambda - 1,
        k: 2 * lambda,
        r: 2 * lambda,
        lambda,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankCriterion {
    pub closed: bool,
    pub params_match: bool,
    pub n_from_rank: usize,
    pub consistent: bool,
}

/// Evaluates both sides of "closed ⟺ parameters are `(2^n - 1, 2^(n-1),
/// 2^(n-2))` with `n` the 2-rank". `consistent` must come out true for every
/// BIBD.
pub fn lemma2_predicate(d: &Design) -> Result<RankCriterion, GroupError> {
    let params = d.verify_bibd()?;
    let n = d.incidence_matrix().rank();
    let closed = delta_closure_check(d).closed;
    let params_match = DesignParams::group_shape(n) == Some(params);
    Ok(RankCriterion {
        closed,
        params_match,
        n_from_rank: n,
        consistent: closed == params_match,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankBound {
    pub n: usize,
    pub rank: usize,
    pub bound_holds: bool,
    pub equality: bool,
}

/// 2-rank of a `(2^n - 1, 2^(n-1), 2^(n-2))` design against the lower bound `n`.
pub fn hamada_bound_check(d: &Design) -> Result<RankBound, GroupError> {
    let params = d.verify_bibd()?;
    let n = params
        .group_shape_exponent()
        .ok_or(GroupError::WrongShape(params))?;
    let rank = d.incidence_matrix().rank();
    Ok(RankBound {
        n,
        rank,
        bound_holds: rank >= n,
        equality: rank == n,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SdpReport {
    pub is_sdp: bool,
    pub witness: Option<[usize; 3]>,
    /// Points of `B Δ C Δ D` for the witness triple.
    pub witness_set: Option<Vec<usize>>,
}

fn block_or_complement(d: &Design, s: &BitVector) -> (Option<usize>, Option<usize>) {
    (d.index_of(s), d.index_of(&s.complement()))
}

/// Symmetric difference property over all triples of distinct blocks.
///
/// Triples with a repeated block reduce to a single block (`B Δ B Δ D = D`) and
/// always pass, so only distinct triples are scanned.
pub fn sdp_check(d: &Design) -> SdpReport {
    let blocks = d.blocks();
    for (i, j, k) in (0..blocks.len()).tuple_combinations() {
        let mut s = &blocks[i] ^ &blocks[j];
        s ^= &blocks[k];
        if block_or_complement(d, &s) == (None, None) {
            return SdpReport {
                is_sdp: false,
                witness: Some([i, j, k]),
                witness_set: Some(s.to_indices()),
            };
        }
    }
    SdpReport {
        is_sdp: true,
        witness: None,
        witness_set: None,
    }
}

/// Addition table of a group law on block indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupTable {
    pub identity: usize,
    pub table: Vec<Vec<usize>>,
    pub order: usize,
    pub commutative: bool,
    pub associative: bool,
    pub exponent_two: bool,
    pub identity_ok: bool,
    pub valid: bool,
}

impl GroupTable {
    fn check(identity: usize, table: Vec<Vec<usize>>) -> Self {
        let order = table.len();
        let idx = 0..order;
        let commutative = idx
            .clone()
            .tuple_combinations()
            .all(|(x, y)| table[x][y] == table[y][x]);
        let identity_ok = idx.clone().all(|x| table[identity][x] == x && table[x][identity] == x);
        let exponent_two = idx.clone().all(|x| table[x][x] == identity);
        let associative = idx.clone().all(|x| {
            idx.clone()
                .all(|y| idx.clone().all(|z| table[table[x][y]][z] == table[x][table[y][z]]))
        });
        let valid = commutative && identity_ok && exponent_two && associative && order.is_power_of_two();
        Self {
            identity,
            table,
            order,
            commutative,
            associative,
            exponent_two,
            identity_ok,
            valid,
        }
    }
}

/// Kantor's law on an SDP design: with `base` as neutral element, `X + Y` is
/// whichever of `base Δ X Δ Y` and its complement is a block.
pub fn kantor_group(d: &Design, base: usize) -> Result<GroupTable, GroupError> {
    if base >= d.b() {
        return Err(GroupError::BadBase { base, b: d.b() });
    }
    let sdp = sdp_check(d);
    if let Some(w) = sdp.witness {
        return Err(GroupError::NotSdp(w));
    }
    let blocks = d.blocks();
    let mut table = vec![vec![0; blocks.len()]; blocks.len()];
    for x in 0..blocks.len() {
        for y in 0..blocks.len() {
            let mut s = &blocks[base] ^ &blocks[x];
            s ^= &blocks[y];
            table[x][y] = match block_or_complement(d, &s) {
                (Some(z), None) | (None, Some(z)) => z,
                (Some(_), Some(_)) => return Err(GroupError::AmbiguousSum { x, y }),
                (None, None) => return Err(GroupError::NoSum { x, y }),
            };
        }
    }
    Ok(GroupTable::check(base, table))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodBlockReport {
    pub good_flags: Vec<bool>,
    /// For a block that is not good, the first `C` with `B Δ C` not a block.
    pub witnesses: Vec<Option<usize>>,
    /// `(block, complement)` index pairs of good blocks, smaller index first.
    pub classes: Vec<(usize, usize)>,
    pub group_table_ok: bool,
    #[serde(skip)]
    design: Design,
}

impl GoodBlockReport {
    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn good_count(&self) -> usize {
        self.good_flags.iter().filter(|&&g| g).count()
    }
}

/// Flags good blocks of a complement-closed 3-design: `B` is good when
/// `B Δ C` is a block for every block `C` other than `B` and its complement.
pub fn good_block_classes(d: &Design) -> Result<GoodBlockReport, GroupError> {
    let blocks = d.blocks();
    let complements = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| d.index_of(&b.complement()).ok_or(GroupError::NotComplementClosed(i)))
        .collect::<Result<Vec<_>, _>>()?;
    match d.coverage_number(3) {
        Ok(c) if c.lambda().is_some() => {}
        _ => return Err(GroupError::NotThreeDesign),
    }
    let mut good_flags = Vec::with_capacity(blocks.len());
    let mut witnesses = Vec::with_capacity(blocks.len());
    for (i, b) in blocks.iter().enumerate() {
        let witness = (0..blocks.len())
            .filter(|&c| c != i && c != complements[i])
            .find(|&c| !d.contains_block(&(b ^ &blocks[c])));
        good_flags.push(witness.is_none());
        witnesses.push(witness);
    }
    for (i, &c) in complements.iter().enumerate() {
        assert_eq!(
            good_flags[i], good_flags[c],
            "goodness must agree within a complement pair"
        );
    }
    let classes = (0..blocks.len())
        .filter(|&i| good_flags[i] && i < complements[i])
        .map(|i| (i, complements[i]))
        .collect();
    let mut report = GoodBlockReport {
        good_flags,
        witnesses,
        classes,
        group_table_ok: false,
        design: d.clone(),
    };
    report.group_table_ok = kimberley_group(&report).map(|g| g.valid).unwrap_or(false);
    Ok(report)
}

/// Kimberley's law on good block classes plus the identity class `{X, ∅}`
/// (index 0; class `i` of the report is element `i + 1`):
/// `{B, B̄} ∘ {C, C̄}` is the class of `B Δ C`.
pub fn kimberley_group(report: &GoodBlockReport) -> Result<GroupTable, GroupError> {
    if report.classes.is_empty() {
        return Err(GroupError::NoClasses);
    }
    let d = &report.design;
    let class_of_block = |idx: usize| {
        report
            .classes
            .iter()
            .position(|&(a, b)| a == idx || b == idx)
            .map(|c| c + 1)
    };
    let reps: Vec<Option<&BitVector>> = std::iter::once(None)
        .chain(report.classes.iter().map(|&(a, _)| Some(d.block(a))))
        .collect();
    let order = reps.len();
    let mut table = vec![vec![0; order]; order];
    for x in 0..order {
        for y in 0..order {
            table[x][y] = match (reps[x], reps[y]) {
                (None, _) => y,
                (_, None) => x,
                (Some(b), Some(c)) => {
                    let s = b ^ c;
                    if s.is_zero() || s.complement().is_zero() {
                        0
                    } else {
                        d.index_of(&s)
                            .and_then(class_of_block)
                            .ok_or(GroupError::ClassClosure(x, y))?
                    }
                }
            };
        }
    }
    Ok(GroupTable::check(0, table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{
        hadamard_to_3design, pg_complement, sdp_biplane, sylvester_hadamard,
    };
    use crate::design::tests::fano;

    #[test]
    fn closure_of_pg_complement() {
        let r = delta_closure_check(&pg_complement(3).unwrap());
        assert!(r.closed && r.elementary_abelian);
        assert_eq!((r.group_order, r.dimension_n), (Some(8), Some(3)));
        let r = delta_closure_check(&pg_complement(4).unwrap());
        assert_eq!((r.group_order, r.dimension_n), (Some(16), Some(4)));
    }

    #[test]
    fn fano_is_not_closed() {
        let d = fano();
        let r = delta_closure_check(&d);
        assert!(!r.closed);
        let (i, j) = r.witness.unwrap();
        // |B Δ B'| = 2k - 2λ = 4 for any two Fano lines.
        assert_eq!((d.block(i) ^ d.block(j)).weight(), 4);
        assert_eq!((i, j), (0, 1));
    }

    #[test]
    fn single_block_is_order_two() {
        let d = Design::from_point_lists(3, &[[0, 1]]).unwrap();
        let r = delta_closure_check(&d);
        assert!(r.closed);
        assert_eq!((r.group_order, r.dimension_n), (Some(2), Some(1)));
    }

    #[test]
    fn forced_params_examples() {
        let p = forced_params(2).unwrap();
        assert_eq!((p.v, p.b, p.k, p.r, p.lambda), (7, 7, 4, 4, 2));
        let p = forced_params(1).unwrap();
        assert_eq!((p.v, p.b, p.k, p.r, p.lambda), (3, 3, 2, 2, 1));
        let p = forced_params(4).unwrap();
        assert_eq!((p.v, p.b, p.k, p.r, p.lambda), (15, 15, 8, 8, 4));
        assert_eq!(forced_params(0), Err(GroupError::ZeroLambda));
    }

    #[test]
    fn rank_criterion_examples() {
        let r = lemma2_predicate(&pg_complement(3).unwrap()).unwrap();
        assert_eq!(
            r,
            RankCriterion { closed: true, params_match: true, n_from_rank: 3, consistent: true }
        );
        let r = lemma2_predicate(&fano()).unwrap();
        assert_eq!(
            r,
            RankCriterion { closed: false, params_match: false, n_from_rank: 4, consistent: true }
        );
        let r = lemma2_predicate(&pg_complement(4).unwrap()).unwrap();
        assert!(r.closed && r.params_match && r.n_from_rank == 4);
    }

    #[test]
    fn rank_bound_examples() {
        let r = hamada_bound_check(&pg_complement(5).unwrap()).unwrap();
        assert_eq!(r, RankBound { n: 5, rank: 5, bound_holds: true, equality: true });
        assert!(matches!(hamada_bound_check(&fano()), Err(GroupError::WrongShape(_))));
    }

    #[test]
    fn sdp_examples() {
        assert!(sdp_check(&sdp_biplane()).is_sdp);
        let r = sdp_check(&pg_complement(3).unwrap());
        assert!(!r.is_sdp);
        assert_eq!(r.witness_set, Some(vec![]));
        assert!(!sdp_check(&fano()).is_sdp);
    }

    #[test]
    fn kantor_table_identities() {
        let d = sdp_biplane();
        let g = kantor_group(&d, 0).unwrap();
        assert!(g.valid);
        assert_eq!(g.order, 16);
        for x in 0..16 {
            assert_eq!(g.table[x][x], 0);
            assert_eq!(g.table[0][x], x);
        }
        assert!(matches!(
            kantor_group(&pg_complement(3).unwrap(), 0),
            Err(GroupError::NotSdp(_))
        ));
        assert_eq!(kantor_group(&d, 16), Err(GroupError::BadBase { base: 16, b: 16 }));
    }

    #[test]
    fn kimberley_on_sylvester_3design() {
        let d = hadamard_to_3design(&sylvester_hadamard(3).unwrap()).unwrap();
        let r = good_block_classes(&d).unwrap();
        assert_eq!(r.good_count(), 14);
        assert_eq!(r.classes.len(), 7);
        assert!(r.group_table_ok);
        let g = kimberley_group(&r).unwrap();
        assert!(g.valid);
        assert_eq!(g.order, 8);
        for x in 0..8 {
            assert_eq!(g.table[x][x], 0);
            assert_eq!(g.table[0][x], x);
        }
    }

    #[test]
    fn good_blocks_require_complement_closure() {
        assert_eq!(
            good_block_classes(&pg_complement(3).unwrap()).unwrap_err(),
            GroupError::NotComplementClosed(0)
        );
    }
}
