//! Combinatorial counts and q-number identities.

use proptest::prelude::*;
use qchaos::qcomb::{
    binomial, double_factorial, enumerate_pair_partitions, enumerate_permutations, enumerate_shuffles,
    q_factorial, PairPartition, QScalar,
};

#[test]
fn inversion_generating_function_is_q_factorial() {
    for q in [0.0f64, 0.3, 0.7, 1.0] {
        for m in 0..=6 {
            let sum: f64 = enumerate_permutations(m)
                .unwrap()
                .map(|p| q.powi(p.inversions() as i32))
                .sum();
            assert!((sum - q_factorial(m, QScalar::new(q).unwrap())).abs() < 1e-12, "m={m} q={q}");
        }
    }
}

#[test]
fn shuffle_counts_and_blocks() {
    for m in 0..=7 {
        for k in 0..=m {
            let shuffles: Vec<_> = enumerate_shuffles(k, m).unwrap().collect();
            assert_eq!(shuffles.len() as u128, binomial(m as u64, k as u64));
            let mut cosets = std::collections::BTreeSet::new();
            for s in &shuffles {
                let line = s.images();
                assert!(line[..k].windows(2).all(|w| w[0] < w[1]));
                assert!(line[k..].windows(2).all(|w| w[0] < w[1]));
                let mut head = line[..k].to_vec();
                head.sort_unstable();
                assert!(cosets.insert(head));
            }
        }
    }
}

#[test]
fn pair_partition_counts() {
    for r in 1..=5u64 {
        let count = enumerate_pair_partitions(2 * r as usize).unwrap().count() as u128;
        assert_eq!(count, double_factorial(2 * r - 1) as u128);
    }
}

proptest! {
    #[test]
    fn crossings_ignore_pair_order(r in 1usize..=5, seed in any::<u64>()) {
        let all: Vec<PairPartition> = enumerate_pair_partitions(2 * r).unwrap().collect();
        let pp = &all[(seed % all.len() as u64) as usize];
        let mut pairs = pp.pairs().to_vec();
        let rot = (seed / 7) as usize % pairs.len();
        pairs.rotate_left(rot);
        pairs.reverse();
        let shuffled = PairPartition::new(pairs).unwrap();
        prop_assert_eq!(shuffled.crossings(), pp.crossings());
    }
}
