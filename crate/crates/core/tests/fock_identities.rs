//! Operator identities of the q-deformed layer on random kernels.

use num_complex::Complex64;
use qchaos::fock::{chaos_mul, tau_product, ChaosPoly, QContext};
use qchaos::qcomb::enumerate_permutations;
use qchaos::random::{random_kernel, random_mirror, random_symmetric, seeded};
use qchaos::QKernel;

const QS: [f64; 3] = [0.0, 0.3, 0.7];

fn rel(a: &QKernel, b: &QKernel) -> f64 {
    let scale = a.norm().max(b.norm()).max(f64::MIN_POSITIVE);
    a.distance(b).unwrap() / scale
}

fn poly_rel(a: &ChaosPoly, b: &ChaosPoly) -> f64 {
    let degrees: std::collections::BTreeSet<usize> =
        a.terms().keys().chain(b.terms().keys()).copied().collect();
    let mut diff = 0.0;
    let mut scale = 0.0f64;
    for d in degrees {
        let zero = QKernel::zeros(a.dim(), d).unwrap();
        let x = a.term(d).unwrap_or(&zero);
        let y = b.term(d).unwrap_or(&zero);
        diff += x.distance(y).unwrap().powi(2);
        scale = scale.max(x.norm()).max(y.norm());
    }
    diff.sqrt() / scale.max(f64::MIN_POSITIVE)
}

#[test]
fn symmetrizer_factorizes_through_shuffles() {
    let mut rng = seeded(100);
    for &q in &QS {
        let ctx = QContext::new(q).unwrap();
        for m in 1..=5 {
            let dim = if m >= 5 { 2 } else { 3 };
            let f = random_kernel(&mut rng, dim, m).unwrap();
            let p = ctx.p_q_apply_naive(&f).unwrap();
            for k in 0..=m {
                let left = ctx.r_apply(k, &ctx.p_q_blocks(&f, k).unwrap()).unwrap();
                let right = ctx.p_q_blocks(&ctx.r_adjoint_apply(k, &f).unwrap(), k).unwrap();
                assert!(rel(&left, &p) < 1e-11, "R(P⊗P) q={q} m={m} k={k}");
                assert!(rel(&right, &p) < 1e-11, "(P⊗P)R* q={q} m={m} k={k}");
            }
        }
    }
}

#[test]
fn naive_and_factored_symmetrizers_agree() {
    let mut rng = seeded(101);
    for &q in &[0.0, 0.3, 0.7, 1.0, -0.4] {
        let ctx = QContext::new(q).unwrap();
        for m in 0..=6 {
            let f = random_kernel(&mut rng, 2, m).unwrap();
            let a = ctx.p_q_apply_naive(&f).unwrap();
            let b = ctx.p_q_apply(&f).unwrap();
            assert!(rel(&a, &b) < 1e-11, "q={q} m={m}");
        }
    }
}

#[test]
fn r_adjoint_is_the_plain_adjoint() {
    let mut rng = seeded(102);
    for &q in &QS {
        let ctx = QContext::new(q).unwrap();
        for m in 0..=4 {
            for k in 0..=m {
                let f = random_kernel(&mut rng, 2, m).unwrap();
                let g = random_kernel(&mut rng, 2, m).unwrap();
                let lhs = ctx.r_apply(k, &f).unwrap().inner(&g).unwrap();
                let rhs = f.inner(&ctx.r_adjoint_apply(k, &g).unwrap()).unwrap();
                assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
            }
        }
    }
}

#[test]
fn q_contraction_adjoint_identity() {
    let mut rng = seeded(103);
    for &q in &QS {
        let ctx = QContext::new(q).unwrap();
        for m in 0..=4 {
            for n in 0..=4 {
                let f = random_kernel(&mut rng, 2, m).unwrap();
                let g = random_kernel(&mut rng, 2, n).unwrap();
                for k in 0..=m.min(n) {
                    let lhs = ctx.q_contract(&f, k, &g).unwrap().star();
                    let rhs = ctx.q_contract(&g.star(), k, &f.star()).unwrap();
                    assert!(rel(&lhs, &rhs) < 1e-11, "q={q} m={m} n={n} k={k}");
                }
            }
        }
    }
}

#[test]
fn symmetric_fast_path_matches_the_general_q_contraction() {
    let mut rng = seeded(104);
    for &q in &QS {
        let ctx = QContext::new(q).unwrap();
        for m in 1..=4 {
            for n in 1..=4 {
                let f = random_symmetric(&mut rng, 3, m).unwrap();
                let g = random_symmetric(&mut rng, 3, n).unwrap();
                for k in 0..=m.min(n) {
                    let general = ctx.q_contract(&f, k, &g).unwrap();
                    let fast = ctx.q_contract_symmetric(&f, k, &g).unwrap();
                    assert!(rel(&general, &fast) < 1e-11, "q={q} m={m} n={n} k={k}");
                }
            }
        }
    }
}

#[test]
fn chaos_product_is_associative_on_general_kernels() {
    let mut rng = seeded(105);
    for &q in &[0.0, 0.3, 0.7, -0.5] {
        let ctx = QContext::new(q).unwrap();
        for _ in 0..4 {
            let mk = |rng: &mut _, degrees: &[usize]| {
                ChaosPoly::from_kernels(2, degrees.iter().map(|&d| random_kernel(rng, 2, d).unwrap()))
                    .unwrap()
            };
            let a = mk(&mut rng, &[1, 2]);
            let b = mk(&mut rng, &[0, 2]);
            let c = mk(&mut rng, &[1, 3]);
            let left = chaos_mul(&ctx, &chaos_mul(&ctx, &a, &b).unwrap(), &c).unwrap();
            let right = chaos_mul(&ctx, &a, &chaos_mul(&ctx, &b, &c).unwrap()).unwrap();
            assert!(poly_rel(&left, &right) < 1e-11, "q={q}: {}", poly_rel(&left, &right));
        }
    }
}

#[test]
fn vacuum_state_is_tracial() {
    let mut rng = seeded(106);
    for &q in &QS {
        let ctx = QContext::new(q).unwrap();
        let a = ChaosPoly::from_kernels(2, [random_kernel(&mut rng, 2, 1).unwrap(), random_kernel(&mut rng, 2, 2).unwrap()]).unwrap();
        let b = ChaosPoly::from_kernels(2, [random_kernel(&mut rng, 2, 2).unwrap(), random_kernel(&mut rng, 2, 3).unwrap()]).unwrap();
        let ab = tau_product(&ctx, &a, &b).unwrap();
        let ba = tau_product(&ctx, &b, &a).unwrap();
        assert!((ab - ba).norm() < 1e-12 * (1.0 + ab.norm()));
    }
}

#[test]
fn products_of_selfadjoint_elements_have_real_moments() {
    let mut rng = seeded(107);
    for &q in &QS {
        let ctx = QContext::new(q).unwrap();
        let x = ChaosPoly::from_kernel(random_mirror(&mut rng, 3, 2).unwrap());
        let y = ChaosPoly::from_kernel(random_mirror(&mut rng, 3, 3).unwrap());
        let xy = chaos_mul(&ctx, &x, &y).unwrap();
        // τ(XYYX) = ‖XY‖² ≥ 0 and τ(XYXY) is real
        let xyyx = tau_product(&ctx, &xy, &xy.star()).unwrap();
        let xyxy = tau_product(&ctx, &xy, &xy).unwrap();
        assert!(xyyx.im.abs() < 1e-12 && xyyx.re > 0.0);
        assert!(xyxy.im.abs() < 1e-12 * (1.0 + xyxy.norm()));
    }
}

#[test]
fn symmetrizer_is_positive_for_subunit_q() {
    let mut rng = seeded(108);
    for &q in &[-0.7, 0.0, 0.5, 0.9] {
        let ctx = QContext::new(q).unwrap();
        for m in 1..=4 {
            let f = random_kernel(&mut rng, 2, m).unwrap();
            let z = ctx.q_inner(&f, &f).unwrap();
            assert!(z.re > 0.0 && z.im.abs() < 1e-12 * z.re);
        }
    }
    // permutation sum over S_m equals [m]_q! on the all-ones kernel
    let ctx = QContext::new(0.4).unwrap();
    let ones = QKernel::from_real(2, 3, &[1.0; 8]).unwrap();
    let p = ctx.p_q_apply(&ones).unwrap();
    let sum: f64 = enumerate_permutations(3).unwrap().map(|p| 0.4f64.powi(p.inversions() as i32)).sum();
    assert!((p.coeffs()[0] - Complex64::new(sum, 0.0)).norm() < 1e-14);
}
