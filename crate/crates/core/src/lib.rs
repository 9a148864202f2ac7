//! Ternary self-dual codes built from pairs of negacirculant blocks.
//!
//! The crate covers GF(3) vector arithmetic, negacirculant construction,
//! minimum-weight computation, code equivalence, combinatorial designs
//! held by codeword supports, and the classification search.

pub mod canon;
pub mod checkpoint;
pub mod code;
pub mod designs;
pub mod equivalence;
pub mod error;
pub mod gf3;
pub mod infoset;
pub mod negacirculant;
pub mod records;
pub mod report;
pub mod search;

pub use code::{extremal_bound, min_weight_exhaustive, weight_distribution, LinearCode, WeightProfile};
pub use designs::{designs_isomorphic, support_design, verify_t_design, IncidenceStructure};
pub use equivalence::{
    apply_monomial, are_equivalent_exact, canonical_certificate, classify_up_to_equivalence, fingerprint, pair_orbit,
    CanonicalCertificate, CodeFingerprint, EquivalenceClass, MonomialMap,
};
pub use error::{Error, Result};
pub use gf3::{Trit, TritMatrix, TritVector};
pub use infoset::{
    codewords_up_to_weight, enumerate_min_weight_supports, min_weight, min_weight_bz, screen_min_weight,
    MinWeightBound, Screening,
};
pub use negacirculant::{build_generator, is_self_dual_pair, nega_from_row, NegaPair, TritRow};
pub use records::{read_records, write_records, CodeRecord, Source};
pub use search::{
    classify_length, enumerate_candidates, f_order, reduce_pair, restricted_search_56, ClassificationResult,
    Partition, SearchOptions, SearchSpec,
};
