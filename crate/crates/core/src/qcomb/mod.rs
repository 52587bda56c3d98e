//! Combinatorial substrate: permutations with their inversion statistic,
//! minimal coset representatives (shuffles), pair partitions with crossings,
//! and q-integer arithmetic.
//!
//! Enumeration orders are lexicographic, so repeated floating-point
//! reductions over these streams are reproducible bit for bit.

mod pairing;
mod permutation;
mod qnum;

pub use pairing::{enumerate_pair_partitions, enumerate_pair_partitions_capped, PairPartition, PairPartitions, DEFAULT_PAIRING_CAP};
pub use permutation::{
    enumerate_permutations, enumerate_permutations_capped, enumerate_shuffles, inversions,
    Permutation, Permutations, Shuffles, DEFAULT_PERMUTATION_CAP,
};
pub use qnum::{
    binomial, catalan, double_factorial, q_binomial, q_factorial, q_int, QScalar,
};
