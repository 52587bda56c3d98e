//! Algebraic properties of the free contraction.

use num_complex::Complex64;
use proptest::prelude::*;
use qchaos::random::{random_kernel, random_mirror, seeded};
use qchaos::QKernel;

fn close(a: &QKernel, b: &QKernel, tol: f64) -> bool {
    a.distance(b).unwrap() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn contraction_adjoint(m in 0usize..=4, n in 0usize..=4, dim in 1usize..=4, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let f = random_kernel(&mut rng, dim, m).unwrap();
        let g = random_kernel(&mut rng, dim, n).unwrap();
        for k in 0..=m.min(n) {
            let lhs = f.contract(k, &g).unwrap().star();
            let rhs = g.star().contract(k, &f.star()).unwrap();
            prop_assert!(close(&lhs, &rhs, 1e-12));
        }
    }

    #[test]
    fn contraction_bilinear(m in 1usize..=3, n in 1usize..=3, dim in 1usize..=4, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let f1 = random_kernel(&mut rng, dim, m).unwrap();
        let f2 = random_kernel(&mut rng, dim, m).unwrap();
        let g1 = random_kernel(&mut rng, dim, n).unwrap();
        let g2 = random_kernel(&mut rng, dim, n).unwrap();
        let (a, b) = (Complex64::new(0.7, -1.3), Complex64::new(-0.4, 0.2));
        let mut fc = f1.scaled(a);
        fc.axpy(b, &f2).unwrap();
        let mut gc = g1.scaled(a);
        gc.axpy(b, &g2).unwrap();
        for k in 0..=m.min(n) {
            let mut left = f1.contract(k, &g1).unwrap().scaled(a);
            left.axpy(b, &f2.contract(k, &g1).unwrap()).unwrap();
            prop_assert!(close(&fc.contract(k, &g1).unwrap(), &left, 1e-12));
            let mut right = f1.contract(k, &g1).unwrap().scaled(a);
            right.axpy(b, &f1.contract(k, &g2).unwrap()).unwrap();
            prop_assert!(close(&f1.contract(k, &gc).unwrap(), &right, 1e-12));
        }
    }

    #[test]
    fn zero_contraction_norm_factorizes(m in 0usize..=4, n in 0usize..=4, dim in 1usize..=3, seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let f = random_kernel(&mut rng, dim, m).unwrap();
        let g = random_kernel(&mut rng, dim, n).unwrap();
        let lhs = f.contract(0, &g).unwrap().norm();
        prop_assert!((lhs - f.norm() * g.norm()).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn flip_contraction(n in 1usize..=3, extra in 1usize..=2, dim in 1usize..=3, seed in any::<u64>()) {
        let m = n + extra;
        let mut rng = seeded(seed);
        let f = random_mirror(&mut rng, dim, m).unwrap();
        let g = random_mirror(&mut rng, dim, n).unwrap();
        let lhs = f.tensor(&g).unwrap().inner(&g.tensor(&f).unwrap()).unwrap();
        let rhs = g.contract(n, &f).unwrap().inner(&f.contract(n, &g).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }
}
