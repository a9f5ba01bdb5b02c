//! Subset-function sequences on measured equivalence relations: weighted
//! sums, ratio averages, maximal audits, property checkers, skew products
//! and exact finite-model oracles.

mod automorphism;
mod finite_model;
mod horoball_seq;
mod maximal;
mod properties;
mod scalar;
mod seq;
mod skew;
mod sums;

pub use automorphism::PrefixAutomorphism;
pub use finite_model::{integrate, oracle_conditional_expectation, FiniteModel};
pub use horoball_seq::{HoroballSequence, TailCocycle};
pub use maximal::{
    audit_lp, audit_maximal, audit_weak_type, default_epsilon_grid, maximal_function, point_series, LpRow,
    MaximalAudit, WeakTypeRow,
};
pub use properties::{
    check_properties, PropertyOutcome, PropertyReport, PropertyRow, ANCHORED, BESICOVICH, INVARIANCE,
};
pub use scalar::{compensated_sum, Accumulator, Scalar};
pub use seq::{Capabilities, Cocycle, InnerAutomorphism, Member, SubsetFunctionSeq};
pub use skew::{
    random_skew_model, skew_extend, CoboundaryCocycle, SkewAutomorphism, SkewProduct,
};
pub use sums::{ratio_series, u_phi, weighted_sum, weighted_sum_pair, RatioRecord, RatioSeries};
