//! Block designs whose blocks, together with the empty set, form a group
//! under symmetric difference.
//!
//! The crate builds the relevant designs (PG(n-1, 2) and its complement,
//! Sylvester Hadamard designs, the (16, 6, 2) SDP biplane), checks their
//! group structure and 2-rank, decides isomorphism, and exhaustively
//! classifies Δ-closed block sets on `2^n - 1` points for small `n`.

pub mod cli;
pub mod constructions;
pub mod design;
pub mod enumerate;
pub mod format;
pub mod gf2;
pub mod group;
pub mod iso;

pub use constructions::{
    hadamard_to_2design, hadamard_to_3design, pg_complement, pg_hyperplanes, sdp_biplane,
    sylvester_hadamard, HadamardMatrix,
};
pub use design::{BibdRejection, Coverage, Design, DesignParams, Symmetry};
pub use enumerate::{enumerate_delta_closed, EnumerationOptions, EnumerationResult};
pub use format::{parse_design, write_design};
pub use gf2::{BitVector, GF2Matrix};
pub use group::{
    delta_closure_check, forced_params, good_block_classes, hamada_bound_check, kantor_group,
    kimberley_group, lemma2_predicate, sdp_check, GoodBlockReport, GroupCheckReport, GroupTable,
    SdpReport,
};
pub use iso::{
    apply_permutation, are_isomorphic, canonical_form, verify_certificate, CanonicalForm,
    PointPermutation,
};
