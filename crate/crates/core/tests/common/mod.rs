#![allow(dead_code)]

use blockgroup::{
    hadamard_to_2design, hadamard_to_3design, parse_design, pg_complement, pg_hyperplanes,
    sdp_biplane, sylvester_hadamard, Design, HadamardMatrix, PointPermutation,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub const NONPG_15: &str = include_str!("../data/nonpg_15_8_4.txt");
pub const FANO: &str = include_str!("../data/fano.txt");

pub fn fano() -> Design {
    parse_design(FANO).unwrap()
}

/// A symmetric (15, 8, 4) design of 2-rank 5, hence not a PG complement.
pub fn nonpg_15() -> Design {
    parse_design(NONPG_15).unwrap()
}

pub fn random_permutation(v: usize, rng: &mut impl Rng) -> PointPermutation {
    let mut m: Vec<usize> = (0..v).collect();
    m.shuffle(rng);
    PointPermutation::new(m).unwrap()
}

/// Paley type I matrix of order 12 from the quadratic residues mod 11.
pub fn paley_12() -> HadamardMatrix {
    let q = 11i64;
    let residues: Vec<i64> = (1..q).map(|x| x * x % q).collect();
    let chi = |a: i64| -> i8 {
        let a = a.rem_euclid(q);
        if a == 0 {
            0
        } else if residues.contains(&a) {
            1
        } else {
            -1
        }
    };
    let n = 12;
    let mut rows = vec![vec![0i8; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            // S = [[0, 1], [-1, Q]] plus the identity.
            let s = match (i, j) {
                (0, 0) => 0,
                (0, _) => 1,
                (_, 0) => -1,
                _ => chi(j as i64 - i as i64),
            };
            *e = s + i8::from(i == j);
        }
    }
    HadamardMatrix::from_rows(rows).unwrap()
}

/// Every BIBD the crate can build, plus a few fixtures.
pub fn base_corpus() -> Vec<(String, Design)> {
    let mut out = Vec::new();
    for n in 3..=5 {
        out.push((format!("pg_complement({n})"), pg_complement(n).unwrap()));
        out.push((format!("pg_hyperplanes({n})"), pg_hyperplanes(n).unwrap()));
        let h = sylvester_hadamard(n).unwrap();
        out.push((format!("sylvester_2design({n})"), hadamard_to_2design(&h).unwrap()));
        out.push((format!("hadamard_3design({n})"), hadamard_to_3design(&h).unwrap()));
    }
    out.push(("sdp_biplane".into(), sdp_biplane()));
    out.push(("fano".into(), fano()));
    out.push(("nonpg_15".into(), nonpg_15()));
    let p = paley_12();
    out.push(("paley_2design(12)".into(), hadamard_to_2design(&p).unwrap()));
    out.push(("paley_3design(12)".into(), hadamard_to_3design(&p).unwrap()));
    out
}
