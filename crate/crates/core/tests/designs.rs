mod common;

use blockgroup::design::DesignError;
use blockgroup::group::GroupError;
use blockgroup::{
    delta_closure_check, forced_params, good_block_classes, hadamard_to_2design,
    hadamard_to_3design, kantor_group, kimberley_group, lemma2_predicate, parse_design,
    pg_complement, pg_hyperplanes, sdp_biplane, sdp_check, sylvester_hadamard, write_design,
    BibdRejection, BitVector, Coverage, Design, DesignParams,
};
use common::{base_corpus, fano, paley_12};
use proptest::prelude::*;

fn pg_block_index(n: usize, a: usize) -> BitVector {
    blockgroup::constructions::pg_complement_block(n, a)
}

#[test]
fn pg_complement_blocks_add_like_functionals() {
    for n in 2..=5 {
        let d = pg_complement(n).unwrap();
        let top = 1usize << n;
        for a in 1..top {
            for b in 1..top {
                let sum = &pg_block_index(n, a) ^ &pg_block_index(n, b);
                if a == b {
                    assert!(sum.is_zero());
                } else {
                    assert_eq!(sum, pg_block_index(n, a ^ b));
                    assert!(d.contains_block(&sum));
                }
            }
        }
    }
}

#[test]
fn pg_designs_are_mutual_complements() {
    for n in 2..=6 {
        assert_eq!(pg_hyperplanes(n).unwrap().complement().unwrap(), pg_complement(n).unwrap());
    }
}

#[test]
fn sylvester_2design_is_pg_complement() {
    for n in 3..=6 {
        let h = sylvester_hadamard(n).unwrap();
        assert_eq!(hadamard_to_2design(&h).unwrap(), pg_complement(n).unwrap());
    }
}

#[test]
fn hadamard_2design_ignores_sign_changes() {
    let h = sylvester_hadamard(3).unwrap();
    let mut rows = h.to_rows();
    for row in rows.iter_mut().skip(2).step_by(3) {
        row.iter_mut().for_each(|e| *e = -*e);
    }
    let flipped = blockgroup::HadamardMatrix::from_rows(rows).unwrap();
    assert_eq!(hadamard_to_2design(&flipped).unwrap(), hadamard_to_2design(&h).unwrap());
}

#[test]
fn sylvester_3design_parameters() {
    for n in 3..=5 {
        let d = hadamard_to_3design(&sylvester_hadamard(n).unwrap()).unwrap();
        let t = 1usize << (n - 2);
        assert_eq!(d.v(), 4 * t);
        assert_eq!(d.b(), 2 * (4 * t - 1));
        assert_eq!(d.coverage_number(3).unwrap(), Coverage::Balanced { t: 3, lambda_t: t - 1 });
        assert_eq!(d.complement().unwrap(), d);
    }
}

#[test]
fn paley_3design_has_no_good_blocks() {
    let d = hadamard_to_3design(&paley_12()).unwrap();
    assert_eq!(d.coverage_number(3).unwrap().lambda(), Some(2));
    let report = good_block_classes(&d).unwrap();
    assert_eq!(report.good_count(), 0);
    assert!(!report.group_table_ok);
    for (i, w) in report.witnesses.iter().enumerate() {
        let c = w.expect("every block has a witness");
        assert!(!d.contains_block(&(d.block(i) ^ d.block(c))));
    }
    assert_eq!(kimberley_group(&report).unwrap_err(), GroupError::NoClasses);
}

#[test]
fn kimberley_group_for_sylvester_orders() {
    for n in 3..=5 {
        let d = hadamard_to_3design(&sylvester_hadamard(n).unwrap()).unwrap();
        let report = good_block_classes(&d).unwrap();
        assert_eq!(report.good_count(), d.b());
        let g = kimberley_group(&report).unwrap();
        assert!(g.valid && g.commutative && g.exponent_two);
        assert_eq!(g.order, 1 << n);
    }
}

#[test]
fn good_blocks_need_complement_closure() {
    assert!(matches!(good_block_classes(&fano()), Err(GroupError::NotComplementClosed(_))));
}

#[test]
fn biplane_kantor_group_every_base() {
    let d = sdp_biplane();
    assert!(sdp_check(&d).is_sdp);
    for base in 0..d.b() {
        let g = kantor_group(&d, base).unwrap();
        assert!(g.valid && g.commutative && g.exponent_two);
        assert_eq!(g.order, 16);
    }
}

#[test]
fn fano_is_not_sdp() {
    let r = sdp_check(&fano());
    assert!(!r.is_sdp);
    let [i, j, k] = r.witness.unwrap();
    let d = fano();
    let s = &(d.block(i) ^ d.block(j)) ^ d.block(k);
    assert_eq!(r.witness_set.unwrap(), s.to_indices());
    assert!(!d.contains_block(&s) && !d.contains_block(&s.complement()));
}

#[test]
fn forced_params_match_group_shape() {
    for n in 2..=10 {
        let lambda = 1 << (n - 2);
        assert_eq!(Some(forced_params(lambda).unwrap()), DesignParams::group_shape(n));
    }
    assert_eq!(forced_params(0).unwrap_err(), GroupError::ZeroLambda);
}

#[test]
fn corpus_closure_and_rank_criterion() {
    for (name, d) in base_corpus() {
        let report = delta_closure_check(&d);
        let params = d.verify_bibd().unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(params.counting_identities_hold(), "{name}");
        if report.closed {
            assert_eq!(params, forced_params(params.lambda).unwrap(), "{name}");
            assert_eq!(report.group_order, Some(d.b() + 1), "{name}");
        } else {
            let (i, j) = report.witness.unwrap();
            assert!(!d.contains_block(&(d.block(i) ^ d.block(j))), "{name}");
        }
        let p = lemma2_predicate(&d).unwrap();
        assert!(p.consistent, "{name}: {p:?}");
    }
}

#[test]
fn rejection_witnesses() {
    let d = Design::from_point_lists(4, &[[0, 1], [2, 3]]).unwrap();
    assert_eq!(
        d.verify_bibd().unwrap_err(),
        BibdRejection::UnbalancedPair { pair: (0, 2), count: 0, expected: 1 }
    );
    let d = Design::from_point_lists(4, &[vec![0, 1], vec![1, 2, 3]]).unwrap();
    assert!(matches!(d.verify_bibd(), Err(BibdRejection::NonUniformBlockSize { .. })));
    assert!(matches!(
        Design::from_point_lists(3, &[[0, 1, 2]]),
        Err(DesignError::FullBlock { .. })
    ));
}

fn random_design() -> impl Strategy<Value = Design> {
    (3usize..20).prop_flat_map(|v| {
        proptest::collection::btree_set(1u64..(1u64 << v) - 1, 1..30).prop_map(move |words| {
            let blocks = words.into_iter().map(|w| BitVector::from_word(v, w)).collect();
            Design::new(v, blocks).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn complement_is_involution(d in random_design()) {
        prop_assert_eq!(d.complement().unwrap().complement().unwrap(), d);
    }

    #[test]
    fn complement_incidence_is_flipped(d in random_design()) {
        let m = d.incidence_matrix();
        let c = d.complement().unwrap();
        // Blocks of the complement come in their own canonical order.
        for (j, block) in d.blocks().iter().enumerate() {
            let cj = c.index_of(&block.complement()).unwrap();
            for i in 0..d.v() {
                prop_assert_eq!(c.incidence_matrix().get(i, cj), !m.get(i, j));
            }
        }
    }

    #[test]
    fn text_round_trip(d in random_design()) {
        prop_assert_eq!(parse_design(&write_design(&d)).unwrap(), d);
    }

    #[test]
    fn coverage_two_agrees_with_verify(d in random_design()) {
        if let Ok(p) = d.verify_bibd() {
            prop_assert_eq!(d.coverage_number(2).unwrap().lambda(), Some(p.lambda));
        }
    }
}
