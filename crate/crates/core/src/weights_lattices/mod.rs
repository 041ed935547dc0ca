//! Lattices, exponent tuples and weights.

mod exponent;
mod lattice;
mod weight;

pub use exponent::{check_pq_conditions, conjugate_exponent, Exponent, MixedExponent, RECIP_TOL};
pub(crate) use exponent::recip_eq;
pub use lattice::Lattice;
pub use weight::{
    check_moderate, check_pair_weight_condition, sample_box, ConditionReport, ModerateReport,
    PairCondition, PairFn, PairWeight, Transposed, Weight,
};
