//! The q-deformed layer: the symmetrizer `P_q^(m) = Σ_π q^{inv(π)} π`, the
//! shuffle operators `R_{k,m}` and their adjoints, the q-inner product, the
//! q-contraction `f ⌢^k_q g`, and arithmetic on finite chaos expansions.

mod chaos;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcomb::{
    enumerate_permutations_capped, enumerate_shuffles, q_binomial, q_factorial, Permutation,
    QScalar, DEFAULT_PERMUTATION_CAP,
};
use crate::tensor::QKernel;

pub use chaos::{chaos_mul, chaos_mul_truncated, center, moment, moments_up_to, read_chaos, tau, tau_product, write_chaos, ChaosPoly};

/// A permutation together with its weight `q^{inv}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPermutation {
    pub perm: Permutation,
    pub weight: f64,
}

type Plan = Arc<[WeightedPermutation]>;

/// The deformation parameter plus read-mostly caches of operator plans.
#[derive(Debug)]
pub struct QContext {
    q: QScalar,
    naive_cap: usize,
    shuffles: RwLock<HashMap<(usize, usize), Plan>>,
    symmetrizers: RwLock<HashMap<usize, Plan>>,
}

impl QContext {
    pub fn new(q: f64) -> Result<Self> {
        Ok(Self::with_q(QScalar::new(q)?))
    }

    pub fn with_q(q: QScalar) -> Self {
        Self {
            q,
            naive_cap: DEFAULT_PERMUTATION_CAP,
            shuffles: RwLock::new(HashMap::new()),
            symmetrizers: RwLock::new(HashMap::new()),
        }
    }

    /// Raises the largest degree for which `P_q` may be expanded over all of `S_m`.
    pub fn with_naive_cap(mut self, cap: usize) -> Self {
        self.naive_cap = cap;
        self
    }

    pub fn q(&self) -> QScalar {
        self.q
    }

    pub fn q_factorial(&self, m: usize) -> f64 {
        q_factorial(m, self.q)
    }

    pub fn q_binomial(&self, m: usize, k: usize) -> Result<f64> {
        q_binomial(m, k, self.q)
    }

    /// `(k, m-k)`-shuffles with weights `q^{inv}`, lexicographic order.
    pub fn shuffle_plan(&self, k: usize, m: usize) -> Result<Plan> {
        if let Some(plan) = self.shuffles.read().unwrap().get(&(k, m)) {
            return Ok(plan.clone());
        }
        let plan: Plan = enumerate_shuffles(k, m)?
            .map(|perm| WeightedPermutation {
                weight: self.q.pow(perm.inversions()),
                perm,
            })
            .collect();
        self.shuffles.write().unwrap().insert((k, m), plan.clone());
        Ok(plan)
    }

    /// All of `S_m` with weights `q^{inv}`, lexicographic order.
    pub fn symmetrizer_plan(&self, m: usize) -> Result<Plan> {
        if let Some(plan) = self.symmetrizers.read().unwrap().get(&m) {
            return Ok(plan.clone());
        }
        let plan: Plan = enumerate_permutations_capped(m, self.naive_cap)?
            .map(|perm| WeightedPermutation {
                weight: self.q.pow(perm.inversions()),
                perm,
            })
            .collect();
        self.symmetrizers.write().unwrap().insert(m, plan.clone());
        Ok(plan)
    }

    /// `P_q^(m) f` via the recursive factorization `R_{1,m}(1 ⊗ P_q^(m-1))`.
    pub fn p_q_apply(&self, f: &QKernel) -> Result<QKernel> {
        self.p_q_on_range(f, 0, f.degree())
    }

    /// `P_q^(m) f` by direct enumeration of `S_m`.
    pub fn p_q_apply_naive(&self, f: &QKernel) -> Result<QKernel> {
        let plan = self.symmetrizer_plan(f.degree())?;
        weighted_sum(f, plan.iter().map(|w| (w.weight, w.perm.clone())))
    }

    /// Applies `P_q^(len)` to tensor positions `start..start+len`, identity elsewhere.
    pub fn p_q_on_range(&self, f: &QKernel, start: usize, len: usize) -> Result<QKernel> {
        let m = f.degree();
        if start + len > m {
            return Err(Error::OutOfRange {
                what: "symmetrizer range end",
                value: start + len,
                range: format!("0..={m}"),
            });
        }
        if len <= 1 {
            return Ok(f.clone());
        }
        let tail = self.p_q_on_range(f, start + 1, len - 1)?;
        let plan = self.shuffle_plan(1, len)?;
        let terms = plan.iter().map(|w| {
            let p = w.perm.embed(start, m).expect("range checked above");
            (w.weight, p)
        });
        weighted_sum(&tail, terms)
    }

    /// `(P_q^(k) ⊗ P_q^(m-k)) f`.
    pub fn p_q_blocks(&self, f: &QKernel, k: usize) -> Result<QKernel> {
        let m = f.degree();
        check_block(k, m)?;
        let left = self.p_q_on_range(f, 0, k)?;
        self.p_q_on_range(&left, k, m - k)
    }

    /// `R_{k,m} f = Σ_σ q^{inv(σ)} σ(f)` over `(k, m-k)`-shuffles.
    pub fn r_apply(&self, k: usize, f: &QKernel) -> Result<QKernel> {
        check_block(k, f.degree())?;
        let plan = self.shuffle_plan(k, f.degree())?;
        weighted_sum(f, plan.iter().map(|w| (w.weight, w.perm.clone())))
    }

    /// `R*_{k,m} f = Σ_σ q^{inv(σ)} σ^{-1}(f)`.
    pub fn r_adjoint_apply(&self, k: usize, f: &QKernel) -> Result<QKernel> {
        check_block(k, f.degree())?;
        let plan = self.shuffle_plan(k, f.degree())?;
        weighted_sum(f, plan.iter().map(|w| (w.weight, w.perm.inverse())))
    }

    /// `⟨f, g⟩_q = δ_{m,n} ⟨f, P_q g⟩`.
    pub fn q_inner(&self, f: &QKernel, g: &QKernel) -> Result<Complex64> {
        if f.dim() != g.dim() && f.degree() > 0 && g.degree() > 0 {
            return Err(Error::DimMismatch {
                left: f.dim(),
                right: g.dim(),
            });
        }
        if f.degree() != g.degree() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        f.inner(&self.p_q_apply(g)?)
    }

    /// `‖f‖_q`; the real part of the q-inner square is clamped at zero.
    pub fn q_norm(&self, f: &QKernel) -> Result<f64> {
        Ok(self.q_inner(f, f)?.re.max(0.0).sqrt())
    }

    /// The q-contraction
    /// `f ⌢^k_q g = (1_{m-k} ⊗ Φ^q_k ⊗ 1_{n-k})(R*_{m-k,m} f ⊗ R*_{k,n} g)`
    /// with `Φ^q_k(a ⊗ b) = ⟨a, b*⟩_q`.
    pub fn q_contract(&self, f: &QKernel, k: usize, g: &QKernel) -> Result<QKernel> {
        f.check_contraction(k, g)?;
        let (m, n) = (f.degree(), g.degree());
        if k == 0 {
            return f.tensor(g);
        }
        let left = self.r_adjoint_apply(m - k, f)?;
        let right = self.r_adjoint_apply(k, g)?;
        // Φ^q_k(a ⊗ b) = Σ_u a[u] conj((P_q b*)[u]), applied slice by slice on
        // the leading k positions of the right factor.
        let reverse = Permutation::reversal(k).direct_sum(&Permutation::identity(n - k));
        let starred = right.permute(&reverse)?.conj();
        let paired = self.p_q_on_range(&starred, 0, k)?.conj();
        f.check_contraction(k, &paired)?;
        left.pair_leading(k, &paired)
    }

    /// `[k]_q! (m k)_q (n k)_q · f ⌢^k g`, valid for fully symmetric `f`, `g`.
    pub fn q_contract_symmetric(&self, f: &QKernel, k: usize, g: &QKernel) -> Result<QKernel> {
        let plain = f.contract(k, g)?;
        let c = self.q_factorial(k)
            * self.q_binomial(f.degree(), k)?
            * self.q_binomial(g.degree(), k)?;
        Ok(plain.scaled(Complex64::new(c, 0.0)))
    }
}

fn check_block(k: usize, m: usize) -> Result<()> {
    if k > m {
        return Err(Error::OutOfRange {
            what: "block size k",
            value: k,
            range: format!("0..={m}"),
        });
    }
    Ok(())
}

/// `Σ_i c_i π_i(f)`, skipping vanishing weights.
fn weighted_sum(
    f: &QKernel,
    terms: impl Iterator<Item = (f64, Permutation)>,
) -> Result<QKernel> {
    let mut acc = QKernel::zeros(f.dim(), f.degree())?;
    for (c, p) in terms {
        if c != 0.0 {
            acc.add_permuted(c, f, &p)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcomb::{enumerate_permutations, enumerate_shuffles};
    use crate::random::{random_kernel, random_symmetric, seeded};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn cached_plans_reproduce_enumeration() {
        let ctx = QContext::new(0.3).unwrap();
        for m in 0..=5 {
            let plan = ctx.symmetrizer_plan(m).unwrap();
            let direct: Vec<_> = enumerate_permutations(m).unwrap().collect();
            assert_eq!(plan.len(), direct.len());
            for (w, p) in plan.iter().zip(&direct) {
                assert_eq!(&w.perm, p);
                assert_eq!(w.weight, 0.3f64.powi(p.inversions() as i32));
            }
            for k in 0..=m {
                let again = ctx.shuffle_plan(k, m).unwrap();
                let direct: Vec<_> = enumerate_shuffles(k, m).unwrap().collect();
                assert!(again.iter().map(|w| &w.perm).eq(direct.iter()));
                // second lookup serves the cached plan
                assert!(Arc::ptr_eq(&again, &ctx.shuffle_plan(k, m).unwrap()));
            }
        }
    }

    #[test]
    fn p_q_examples() {
        let mut rng = seeded(1);
        let f = random_kernel(&mut rng, 3, 3).unwrap();
        let free = QContext::new(0.0).unwrap();
        assert_eq!(free.p_q_apply(&f).unwrap(), f);
        assert_eq!(free.p_q_apply_naive(&f).unwrap(), f);

        let ctx = QContext::new(0.5).unwrap();
        let e12 = QKernel::basis(2, &[0, 1]).unwrap();
        let expect = e12.add(&QKernel::basis(2, &[1, 0]).unwrap().scaled(c(0.5))).unwrap();
        assert_eq!(ctx.p_q_apply(&e12).unwrap(), expect);
        assert_eq!(ctx.p_q_apply_naive(&e12).unwrap(), expect);

        let s = random_symmetric(&mut rng, 3, 4).unwrap();
        let scaled = s.scaled(c(ctx.q_factorial(4)));
        assert!(ctx.p_q_apply(&s).unwrap().distance(&scaled).unwrap() < 1e-12);
    }

    #[test]
    fn naive_symmetrizer_respects_its_cap() {
        let ctx = QContext::new(0.2).unwrap();
        let f = QKernel::zeros(1, 9).unwrap();
        assert!(ctx.p_q_apply_naive(&f).is_err());
        assert!(ctx.p_q_apply(&f).is_ok());
    }

    #[test]
    fn r_examples() {
        let ctx = QContext::new(0.7).unwrap();
        let mut rng = seeded(2);
        let f = random_kernel(&mut rng, 2, 3).unwrap();
        for k in [0, 3] {
            assert_eq!(ctx.r_apply(k, &f).unwrap(), f);
            assert_eq!(ctx.r_adjoint_apply(k, &f).unwrap(), f);
        }
        let s = random_symmetric(&mut rng, 3, 4).unwrap();
        for k in 0..=4 {
            let expect = s.scaled(c(ctx.q_binomial(4, k).unwrap()));
            assert!(ctx.r_adjoint_apply(k, &s).unwrap().distance(&expect).unwrap() < 1e-12);
        }
        assert!(ctx.r_apply(4, &f).is_err());
    }

    #[test]
    fn q_inner_examples() {
        let ctx = QContext::new(0.5).unwrap();
        let e11 = QKernel::basis(2, &[0, 0]).unwrap();
        assert!((ctx.q_norm(&e11).unwrap().powi(2) - 1.5).abs() < 1e-15);
        let e1 = QKernel::basis(2, &[0]).unwrap();
        assert_eq!(ctx.q_inner(&e11, &e1).unwrap(), c(0.0));
        assert!(ctx.q_inner(&e11, &QKernel::basis(3, &[0, 0]).unwrap()).is_err());

        let mut rng = seeded(3);
        let f = random_kernel(&mut rng, 3, 2).unwrap();
        let g = random_kernel(&mut rng, 3, 2).unwrap();
        let free = QContext::new(0.0).unwrap();
        assert_eq!(free.q_inner(&f, &g).unwrap(), f.inner(&g).unwrap());
    }

    #[test]
    fn q_contract_examples() {
        let mut rng = seeded(4);
        let f = random_kernel(&mut rng, 3, 3).unwrap();
        let g = random_kernel(&mut rng, 3, 2).unwrap();
        let free = QContext::new(0.0).unwrap();
        for k in 0..=2 {
            let d = free
                .q_contract(&f, k, &g)
                .unwrap()
                .distance(&f.contract(k, &g).unwrap())
                .unwrap();
            assert!(d < 1e-12);
        }
        let ctx = QContext::new(0.4).unwrap();
        assert_eq!(ctx.q_contract(&f, 0, &g).unwrap(), f.tensor(&g).unwrap());
        assert!(ctx.q_contract(&f, 3, &g).is_err());
    }

    #[test]
    fn q_contraction_has_the_simplified_form() {
        // Φ^q pairing equals plain contraction against (P_q^(k) ⊗ 1) on the right
        let ctx = QContext::new(0.6).unwrap();
        let mut rng = seeded(8);
        let f = random_kernel(&mut rng, 2, 3).unwrap();
        let g = random_kernel(&mut rng, 2, 3).unwrap();
        for k in 1..=3 {
            let left = ctx.r_adjoint_apply(3 - k, &f).unwrap();
            let right = ctx.p_q_on_range(&ctx.r_adjoint_apply(k, &g).unwrap(), 0, k).unwrap();
            let alt = left.contract(k, &right).unwrap();
            let got = ctx.q_contract(&f, k, &g).unwrap();
            assert!(got.distance(&alt).unwrap() < 1e-12 * (1.0 + alt.norm()));
        }
    }
}
