use qchaos::fock::{chaos_mul, tau_product, ChaosPoly, QContext};
use qchaos::moments::{
    contraction_kappa4_identity, cross_term_bounds, kappa4_polarization_residual, mixed_q_gaussian_moment,
    q_fourth_moment_decomposition, real_part, shuffle_bridge, theorem_target, QGaussianSpec,
};
use qchaos::qcomb::{
    binomial, catalan, double_factorial, enumerate_pair_partitions, enumerate_permutations, enumerate_shuffles,
};
use qchaos::random::{random_kernel, random_mirror, random_symmetric, seeded, KernelRng};
use qchaos::{Complex64, QKernel};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Family};
use crate::error::Result;
use crate::family::{make_orthsum_family, Normalization};
use crate::sweep::{loglog_slope, run_convergence_sweep};

/// What a check depends on: pure algebra, the q ∈ [0, 1) hypotheses, or
/// the large-k behaviour of a family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckTag {
    Algebraic,
    Hypothesis,
    Convergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    ExpectedNonzero,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub module: String,
    pub tag: CheckTag,
    pub status: Status,
    pub instances: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub q: f64,
    pub seed: u64,
    pub instances: usize,
    pub warnings: Vec<String>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Outcome of one check body: instance count, largest residual, and an
/// optional note.
struct Outcome {
    instances: usize,
    residual: f64,
    detail: Option<String>,
}

impl Outcome {
    fn new(instances: usize, residual: f64) -> Self {
        Self { instances, residual, detail: None }
    }
}

struct Env<'a> {
    ctx: &'a QContext,
    free: &'a QContext,
    cfg: &'a ExperimentConfig,
    n: usize,
}

type Body = fn(&Env, &mut KernelRng) -> Result<Outcome>;

struct Check {
    name: &'static str,
    module: &'static str,
    tag: CheckTag,
    /// Tolerance at the default identity tolerance 1e-10; `--tol` rescales it.
    base_tol: f64,
    body: Body,
}

/// Instance used for the same-parity counter-demonstration at `(m, n) = (2, 2)`:
/// `f = e₁⊗e₁`, `g = (e₁⊗e₁ + e₂⊗e₂)/√2` in dimension 2. With `X = s₁² − 1`
/// and `s₁, s₂` free semicirculars the residual is
/// `4τ(X³Y) + 4τ(XY³) − 8τ(XY)(τX² + τY²) − 8τ(XY)² = 3√2 − 4`.
pub fn same_parity_instance() -> (QKernel, QKernel) {
    let f = QKernel::basis(2, &[0, 0]).expect("valid basis");
    let mut g = f.clone();
    g.axpy(Complex64::new(1.0, 0.0), &QKernel::basis(2, &[1, 1]).expect("valid basis"))
        .expect("same shape");
    (f, g.scaled(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
}

const OPPOSITE_PAIRS: [(usize, usize); 3] = [(1, 2), (2, 3), (1, 4)];

fn rel(a: &QKernel, b: &QKernel) -> Result<f64> {
    let scale = a.norm().max(b.norm());
    Ok(if scale == 0.0 { 0.0 } else { a.distance(b)? / scale })
}

fn rel_scalar(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn cplx(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn checks() -> Vec<Check> {
    use CheckTag::*;
    vec![
        Check { name: "contraction-adjoint", module: "tensor", tag: Algebraic, base_tol: 1e-10, body: contraction_adjoint },
        Check { name: "contraction-bilinear", module: "tensor", tag: Algebraic, base_tol: 1e-10, body: contraction_bilinear },
        Check { name: "zero-contraction-norm", module: "tensor", tag: Algebraic, base_tol: 1e-10, body: zero_contraction_norm },
        Check { name: "flip-contraction", module: "tensor", tag: Algebraic, base_tol: 1e-10, body: flip_contraction },
        Check { name: "inversion-generating-function", module: "qcomb", tag: Algebraic, base_tol: 1e-12, body: inversion_gf },
        Check { name: "combinatorial-counts", module: "qcomb", tag: Algebraic, base_tol: 0.0, body: counts },
        Check { name: "symmetrizer-factorization", module: "fock", tag: Algebraic, base_tol: 1e-10, body: factorization },
        Check { name: "naive-vs-factored-symmetrizer", module: "fock", tag: Algebraic, base_tol: 1e-10, body: naive_vs_factored },
        Check { name: "q-contraction-adjoint", module: "fock", tag: Algebraic, base_tol: 1e-10, body: q_contraction_adjoint },
        Check { name: "symmetric-fast-path", module: "fock", tag: Algebraic, base_tol: 1e-10, body: symmetric_fast_path },
        Check { name: "symmetric-norm-law", module: "fock", tag: Algebraic, base_tol: 1e-10, body: symmetric_norm_law },
        Check { name: "parity-orthogonality", module: "fock", tag: Algebraic, base_tol: 0.0, body: parity_orthogonality },
        Check { name: "opposite-parity-vanishing", module: "fock", tag: Algebraic, base_tol: 1e-12, body: opposite_parity },
        Check { name: "mixed-fourth-moment-contractions", module: "fock", tag: Algebraic, base_tol: 1e-10, body: mixed_fourth },
        Check { name: "polarization", module: "moments", tag: Algebraic, base_tol: 1e-10, body: polarization },
        Check { name: "polarization-nonnegativity", module: "moments", tag: Algebraic, base_tol: 1e-10, body: polarization_nonneg },
        Check { name: "kappa4-contraction-identity", module: "moments", tag: Algebraic, base_tol: 1e-10, body: kappa4_contractions },
        Check { name: "same-parity-polarization", module: "moments", tag: Algebraic, base_tol: 1e-10, body: same_parity },
        Check { name: "decomposition-identity", module: "moments", tag: Algebraic, base_tol: 1e-9, body: decomposition_identity },
        Check { name: "decomposition-nonnegativity", module: "moments", tag: Hypothesis, base_tol: 1e-10, body: decomposition_nonneg },
        Check { name: "cross-term-sub-inequalities", module: "moments", tag: Hypothesis, base_tol: 1e-10, body: sub_inequalities },
        Check { name: "shuffle-contraction-bridge", module: "moments", tag: Algebraic, base_tol: 1e-11, body: bridge },
        Check { name: "oracle-reductions", module: "moments", tag: Algebraic, base_tol: 1e-12, body: oracle_reductions },
        Check { name: "orthsum-contraction-law", module: "cli", tag: Algebraic, base_tol: 1e-12, body: orthsum_law },
        Check { name: "single-chaos-oracle-consistency", module: "moments", tag: Convergence, base_tol: 1e-9, body: oracle_consistency },
        Check { name: "orthsum-gap-rate", module: "cli", tag: Convergence, base_tol: 0.2, body: orthsum_rate },
    ]
}

/// Runs every invariant at the configured `q`, seed and instance count.
/// Convergence checks are skipped for `q ∉ [0, 1)`; hypothesis checks are
/// skipped when their range condition fails.
pub fn run_identity_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let mut warnings = Vec::new();
    if !cfg.q_in_theorem_range() {
        warnings.push(format!("q = {} is outside [0, 1): convergence and hypothesis checks are skipped", cfg.q));
    }
    let ctx = QContext::new(cfg.q)?;
    let free = QContext::new(0.0)?;
    let env = Env { ctx: &ctx, free: &free, cfg, n: cfg.instances.max(1) };
    let scale = cfg.tolerances.identity / 1e-10;
    let mut results = Vec::new();
    for (i, check) in checks().into_iter().enumerate() {
        let tolerance = if check.tag == CheckTag::Convergence { check.base_tol } else { check.base_tol * scale };
        let applicable = match check.tag {
            CheckTag::Algebraic => true,
            CheckTag::Convergence => cfg.q_in_theorem_range(),
            CheckTag::Hypothesis => {
                cfg.q_in_theorem_range() && (check.name != "cross-term-sub-inequalities" || cfg.q <= 0.9)
            }
        };
        let mut result = CheckResult {
            name: check.name.into(),
            module: check.module.into(),
            tag: check.tag,
            status: Status::Skipped,
            instances: 0,
            max_residual: 0.0,
            tolerance,
            detail: None,
        };
        if applicable {
            let mut rng = seeded(cfg.seed.wrapping_add((i as u64 + 1).wrapping_mul(0x2545_f491_4f6c_dd1d)));
            let out = (check.body)(&env, &mut rng)?;
            result.instances = out.instances;
            result.max_residual = out.residual;
            result.detail = out.detail;
            result.status = if check.name == "same-parity-polarization" {
                if out.residual > 10.0 * tolerance { Status::ExpectedNonzero } else { Status::Fail }
            } else if out.residual <= tolerance {
                Status::Pass
            } else {
                Status::Fail
            };
        }
        results.push(result);
    }
    let passed = results.iter().all(|c| c.status != Status::Fail);
    Ok(SuiteReport { q: cfg.q, seed: cfg.seed, instances: env.n, warnings, checks: results, passed })
}

fn contraction_adjoint(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..env.n {
        let (m, n, dim) = (rng.gen_range(0..=4), rng.gen_range(0..=4), rng.gen_range(1..=4));
        let f = random_kernel(rng, dim, m)?;
        let g = random_kernel(rng, dim, n)?;
        for k in 0..=m.min(n) {
            let lhs = f.contract(k, &g)?.star();
            let rhs = g.star().contract(k, &f.star())?;
            worst = worst.max(rel(&lhs, &rhs)?);
        }
    }
    Ok(Outcome::new(env.n, worst))
}

fn contraction_bilinear(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..env.n {
        let (m, n, dim) = (rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=3));
        let k = rng.gen_range(0..=m.min(n));
        let (f1, f2) = (random_kernel(rng, dim, m)?, random_kernel(rng, dim, m)?);
        let g = random_kernel(rng, dim, n)?;
        let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let b = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let mut comb = f1.scaled(a);
        comb.axpy(b, &f2)?;
        let mut expect = f1.contract(k, &g)?.scaled(a);
        expect.axpy(b, &f2.contract(k, &g)?)?;
        worst = worst.max(rel(&comb.contract(k, &g)?, &expect)?);
        let mut comb_g = g.scaled(a);
        comb_g.axpy(b, &random_kernel(rng, dim, n)?)?;
        let g2 = comb_g.sub(&g.scaled(a))?.scaled(b.inv());
        let mut expect = f1.contract(k, &g)?.scaled(a);
        expect.axpy(b, &f1.contract(k, &g2)?)?;
        worst = worst.max(rel(&f1.contract(k, &comb_g)?, &expect)?);
    }
    Ok(Outcome::new(env.n, worst))
}

fn zero_contraction_norm(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..env.n {
        let (m, n, dim) = (rng.gen_range(0..=4), rng.gen_range(0..=4), rng.gen_range(1..=3));
        let f = random_kernel(rng, dim, m)?;
        let g = random_kernel(rng, dim, n)?;
        let lhs = f.contract(0, &g)?.norm();
        let rhs = f.norm() * g.norm();
        worst = worst.max((lhs - rhs).abs() / rhs.max(f64::MIN_POSITIVE));
    }
    Ok(Outcome::new(env.n, worst))
}

fn flip_contraction(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..env.n {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(n + 1..=4);
        let dim = rng.gen_range(1..=3);
        let f = random_mirror(rng, dim, m)?;
        let g = random_mirror(rng, dim, n)?;
        let lhs = f.tensor(&g)?.inner(&g.tensor(&f)?)?;
        let rhs = g.contract(n, &f)?.inner(&f.contract(n, &g)?)?;
        worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
    }
    Ok(Outcome::new(env.n, worst))
}

fn inversion_gf(env: &Env, _rng: &mut KernelRng) -> Result<Outcome> {
    let q = env.ctx.q();
    let mut worst = 0.0f64;
    for m in 0..=6 {
        let sum: f64 = enumerate_permutations(m)?.map(|p| q.pow(p.inversions())).sum();
        let fact = env.ctx.q_factorial(m);
        worst = worst.max((sum - fact).abs() / fact.abs().max(1.0));
    }
    Ok(Outcome::new(7, worst))
}

fn counts(_env: &Env, _rng: &mut KernelRng) -> Result<Outcome> {
    let mut bad = 0usize;
    let mut total = 0usize;
    for m in 0..=7 {
        for k in 0..=m {
            total += 1;
            let shuffles: Vec<_> = enumerate_shuffles(k, m)?.collect();
            let mut heads = std::collections::BTreeSet::new();
            let ok = shuffles.len() as u128 == binomial(m as u64, k as u64)
                && shuffles.iter().all(|s| {
                    let l = s.images();
                    let mut head = l[..k].to_vec();
                    head.sort_unstable();
                    l[..k].windows(2).all(|w| w[0] < w[1]) && l[k..].windows(2).all(|w| w[0] < w[1]) && heads.insert(head)
                });
            bad += usize::from(!ok);
        }
    }
    for r in 1..=5u64 {
        total += 1;
        let pairings = enumerate_pair_partitions(2 * r as usize)?.count() as u128;
        bad += usize::from(pairings != double_factorial(2 * r - 1));
    }
    Ok(Outcome { instances: total, residual: bad as f64, detail: Some(format!("{bad} mismatched counts")) })
}

fn factorization(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..env.n {
        let m = rng.gen_range(2..=5);
        let dim = if m == 5 { 2 } else { rng.gen_range(1..=3) };
        let k = rng.gen_range(1..m);
        let f = random_kernel(rng, dim, m)?;
        let p = env.ctx.p_q_apply_naive(&f)?;
        let left = env.ctx.r_apply(k, &env.ctx.p_q_blocks(&f, k)?)?;
        let right = env.ctx.p_q_blocks(&env.ctx.r_adjoint_apply(k, &f)?, k)?;
        worst = worst.max(rel(&left, &p)?).max(rel(&right, &p)?);
    }
    Ok(Outcome::new(env.n, worst))
}

fn naive_vs_factored(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..env.n {
        let m = rng.gen_range(1..=6);
        let dim = if m >= 5 { 2 } else { rng.gen_range(1..=3) };
        let f = random_kernel(rng, dim, m)?;
        worst = worst.max(rel(&env.ctx.p_q_apply_naive(&f)?, &env.ctx.p_q_apply(&f)?)?);
    }
    Ok(Outcome::new(env.n, worst))
}

fn q_contraction_adjoint(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..env.n {
        let (m, n, dim) = (rng.gen_range(0..=4), rng.gen_range(0..=4), rng.gen_range(1..=4));
        let f = random_kernel(rng, dim, m)?;
        let g = random_kernel(rng, dim, n)?;
        let k = rng.gen_range(0..=m.min(n));
        let lhs = env.ctx.q_contract(&f, k, &g)?.star();
        let rhs = env.ctx.q_contract(&g.star(), k, &f.star())?;
        worst = worst.max(rel(&lhs, &rhs)?);
    }
    Ok(Outcome::new(env.n, worst))
}

fn symmetric_fast_path(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..env.n {
        let (m, n, dim) = (rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4));
        let f = random_symmetric(rng, dim, m)?;
        let g = random_symmetric(rng, dim, n)?;
        let k = rng.gen_range(0..=m.min(n));
        worst = worst.max(rel(&env.ctx.q_contract(&f, k, &g)?, &env.ctx.q_contract_symmetric(&f, k, &g)?)?);
    }
    Ok(Outcome::new(env.n, worst))
}

fn symmetric_norm_law(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..env.n {
        let (m, dim) = (rng.gen_range(0..=4), rng.gen_range(1..=4));
        let f = random_symmetric(rng, dim, m)?;
        let lhs = env.ctx.q_norm(&f)?.powi(2);
        let rhs = env.ctx.q_factorial(m) * f.norm_sqr();
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE));
    }
    Ok(Outcome::new(env.n, worst))
}

fn parity_orthogonality(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..env.n {
        let m = rng.gen_range(1..=3);
        let n = (m + rng.gen_range(1..=2) - 1) % 3 + 1;
        let n = if n == m { m % 3 + 1 } else { n };
        let x = ChaosPoly::from_kernel(random_kernel(rng, 2, m)?);
        let y = ChaosPoly::from_kernel(random_kernel(rng, 2, n)?);
        worst = worst.max(chaos_mul(env.ctx, &x, &y)?.tau().norm());
    }
    Ok(Outcome::new(env.n, worst))
}

fn opposite_parity(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for i in 0..env.n {
        let (m, n) = [(1, 2), (2, 1), (2, 3), (3, 2), (1, 4)][i % 5];
        let dim = if m + n > 4 { 2 } else { 3 };
        let x = ChaosPoly::from_kernel(random_mirror(rng, dim, m)?);
        let y = ChaosPoly::from_kernel(random_mirror(rng, dim, n)?);
        let x2 = chaos_mul(env.ctx, &x, &x)?;
        let y2 = chaos_mul(env.ctx, &y, &y)?;
        let x3y = tau_product(env.ctx, &chaos_mul(env.ctx, &x2, &x)?, &y)?;
        let xy3 = tau_product(env.ctx, &x, &chaos_mul(env.ctx, &y2, &y)?)?;
        worst = worst.max(x3y.norm()).max(xy3.norm());
    }
    Ok(Outcome::new(env.n, worst))
}

fn mixed_fourth(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..env.n {
        let (m, n, dim) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let f = random_mirror(rng, dim, m)?;
        let g = random_mirror(rng, dim, n)?;
        let x = ChaosPoly::from_kernel(f.clone());
        let y = ChaosPoly::from_kernel(g.clone());
        let lhs = tau_product(env.ctx, &chaos_mul(env.ctx, &x, &x)?, &chaos_mul(env.ctx, &y, &y)?)?;
        let mut rhs = 0.0;
        for k in 0..=m.min(n) {
            rhs += env.ctx.q_norm(&env.ctx.q_contract(&f, k, &g)?)?.powi(2);
        }
        worst = worst.max(rel_scalar(lhs, cplx(rhs)));
    }
    Ok(Outcome::new(env.n, worst))
}

fn polarization(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for i in 0..env.n {
        let (m, n) = OPPOSITE_PAIRS[i % 3];
        let dim = if n == 4 { 2 } else { rng.gen_range(1..=3) };
        let f = random_mirror(rng, dim, m)?;
        let g = random_mirror(rng, dim, n)?;
        let r = kappa4_polarization_residual(env.free, &f, &g)?;
        worst = worst.max(r.residual.abs() / r.scale);
    }
    Ok(Outcome::new(env.n, worst))
}

fn polarization_nonneg(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for i in 0..env.n {
        let (m, n) = OPPOSITE_PAIRS[i % 3];
        let dim = if n == 4 { 2 } else { rng.gen_range(1..=3) };
        let f = random_mirror(rng, dim, m)?;
        let g = random_mirror(rng, dim, n)?;
        let r = kappa4_polarization_residual(env.free, &f, &g)?;
        worst = worst.max(-r.kappa4_x).max(-r.kappa4_y).max(-r.cross_term);
    }
    Ok(Outcome::new(env.n, worst.max(0.0)))
}

fn kappa4_contractions(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..env.n {
        let (m, dim) = (rng.gen_range(1..=4), rng.gen_range(1..=3));
        let dim = if m == 4 { dim.min(2) } else { dim };
        let f = random_mirror(rng, dim, m)?;
        let (kappa, sum) = contraction_kappa4_identity(env.free, &f)?;
        worst = worst.max((kappa - sum).abs() / (1.0 + sum));
    }
    Ok(Outcome::new(env.n, worst))
}

fn same_parity(env: &Env, _rng: &mut KernelRng) -> Result<Outcome> {
    let (f, g) = same_parity_instance();
    let r = kappa4_polarization_residual(env.free, &f, &g)?;
    Ok(Outcome {
        instances: 1,
        residual: r.residual.abs() / r.scale,
        detail: Some(format!(
            "f = e1⊗e1, g = (e1⊗e1 + e2⊗e2)/√2: residual {:.12}, scale {:.12}",
            r.residual, r.scale
        )),
    })
}

fn symmetric_opposite_pair(rng: &mut KernelRng, i: usize) -> Result<(QKernel, QKernel)> {
    let (m, n) = OPPOSITE_PAIRS[i % 3];
    let dim = if n == 4 { 2 } else { rng.gen_range(1..=3) };
    Ok((random_symmetric(rng, dim, m)?, random_symmetric(rng, dim, n)?))
}

fn decomposition_identity(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for i in 0..env.n {
        let (f, g) = symmetric_opposite_pair(rng, i)?;
        let rep = q_fourth_moment_decomposition(env.ctx, &f, &g)?;
        worst = worst.max(rep.decomposition_residual.abs() / (1.0 + rep.tau4.abs()));
    }
    Ok(Outcome::new(env.n, worst))
}

fn decomposition_nonneg(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for i in 0..env.n {
        let (f, g) = symmetric_opposite_pair(rng, i)?;
        let rep = q_fourth_moment_decomposition(env.ctx, &f, &g)?;
        worst = worst.max(-rep.kappa_X).max(-rep.kappa_Y).max(-rep.kappa_XY);
    }
    Ok(Outcome::new(env.n, worst.max(0.0)))
}

fn sub_inequalities(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for _ in 0..env.n {
        let (m, n, dim) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let f = random_symmetric(rng, dim, m)?;
        let g = random_symmetric(rng, dim, n)?;
        let b = cross_term_bounds(env.ctx, &f, &g)?;
        worst = worst.max(b.norm_bound - b.norm_sqr_fg).max(b.inner_bound - b.inner_fg_gf);
    }
    Ok(Outcome::new(env.n, worst.max(0.0)))
}

fn bridge(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut terms = 0;
    for _ in 0..env.n {
        let (m, n, dim) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let f = random_symmetric(rng, dim, m)?;
        let g = random_symmetric(rng, dim, n)?;
        for t in shuffle_bridge(&f, &g)? {
            terms += 1;
            worst = worst.max((t.lhs - t.rhs).abs());
        }
    }
    Ok(Outcome { instances: env.n, residual: worst, detail: Some(format!("{terms} shuffles")) })
}

fn oracle_reductions(env: &Env, rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    let free = QGaussianSpec::single(0.0, 1.0)?;
    let classical = QGaussianSpec::single(1.0, 1.0)?;
    for k in 0..=5u64 {
        let n = 2 * k as usize;
        let gauss = if k == 0 { 1 } else { double_factorial(2 * k - 1) };
        worst = worst.max((mixed_q_gaussian_moment(&free, n)? - catalan(k) as f64).abs());
        worst = worst.max((mixed_q_gaussian_moment(&classical, n)? - gauss as f64).abs());
    }
    let q = env.cfg.q;
    for _ in 0..env.n {
        let (m, n) = OPPOSITE_PAIRS[rng.gen_range(0..3)];
        let (sx, sy) = (rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0));
        let spec = QGaussianSpec::double_chaos_limit(q, m, n, sx, sy)?;
        let closed = theorem_target(q, m, n, sx, sy);
        worst = worst.max((mixed_q_gaussian_moment(&spec, 4)? - closed).abs() / closed);
    }
    Ok(Outcome::new(env.n + 12, worst))
}

fn orthsum_law(env: &Env, _rng: &mut KernelRng) -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for m in 1..=4 {
        for k in 1..=6 {
            let f = make_orthsum_family(env.ctx, m, k, 6, Normalization::Plain, 1.0)?;
            for p in 1..m {
                count += 1;
                worst = worst.max((f.contract(p, &f)?.norm_sqr() - 1.0 / k as f64).abs());
            }
        }
    }
    Ok(Outcome::new(count, worst))
}

/// `k·|τ(X_k^r) − oracle|` must not grow with `k` for the unit single-chaos
/// orthsum family in degree 2; the residual is the largest increase.
fn oracle_consistency(env: &Env, _rng: &mut KernelRng) -> Result<Outcome> {
    let q = env.cfg.q;
    let m = 2;
    let spec = QGaussianSpec::single(q.powi((m * m) as i32), 1.0)?;
    let mut worst_increase = 0.0f64;
    let mut constants = Vec::new();
    for r in [2usize, 4, 6] {
        let oracle = mixed_q_gaussian_moment(&spec, r)?;
        let mut scaled = Vec::new();
        for k in [2usize, 4, 8, 16] {
            let f = make_orthsum_family(env.ctx, m, k, k, Normalization::Q, 1.0)?;
            let value = real_part(qchaos::fock::moment(env.ctx, &ChaosPoly::from_kernel(f), r)?)?;
            scaled.push(k as f64 * (value - oracle).abs() / oracle);
        }
        for w in scaled.windows(2) {
            worst_increase = worst_increase.max(w[1] - w[0]);
        }
        constants.push(format!("r={r}: k·rel gap at k=16 is {:.4}", scaled[3]));
    }
    Ok(Outcome { instances: 12, residual: worst_increase, detail: Some(constants.join("; ")) })
}

/// Log-log slope of the fourth-moment gap for a short `(1, 2)` orthsum sweep.
fn orthsum_rate(env: &Env, _rng: &mut KernelRng) -> Result<Outcome> {
    let cfg = ExperimentConfig {
        q: env.cfg.q,
        m: 1,
        n: 2,
        family: Family::Orthsum,
        k_max: 8,
        moments_up_to: 4,
        ..ExperimentConfig::default()
    };
    let rep = run_convergence_sweep(&cfg)?;
    let pts: Vec<(usize, f64)> = rep.rows.iter().filter(|r| r.k >= 2).map(|r| (r.k, r.residual.abs())).collect();
    let slope = loglog_slope(&pts).unwrap_or(f64::NAN);
    let dev = (slope + 1.0).abs();
    Ok(Outcome {
        instances: pts.len(),
        residual: if dev.is_nan() { f64::INFINITY } else { dev },
        detail: Some(format!("gap slope {slope:.4}")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let cfg = ExperimentConfig { instances: 6, ..Default::default() };
        let rep = run_identity_suite(&cfg).unwrap();
        for c in &rep.checks {
            assert_ne!(c.status, Status::Fail, "{c:?}");
            assert_ne!(c.status, Status::Skipped, "{c:?}");
        }
        assert!(rep.passed);
        assert_eq!(rep.check("same-parity-polarization").unwrap().status, Status::ExpectedNonzero);
    }

    #[test]
    fn same_parity_instance_matches_free_closed_form() {
        let (f, g) = same_parity_instance();
        let r = kappa4_polarization_residual(&QContext::new(0.0).unwrap(), &f, &g).unwrap();
        assert!((r.residual - (3.0 * 2f64.sqrt() - 4.0)).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn q_one_skips_convergence_checks() {
        let cfg = ExperimentConfig { q: 1.0, instances: 4, ..Default::default() };
        let rep = run_identity_suite(&cfg).unwrap();
        assert!(rep.passed, "{:?}", rep.checks.iter().filter(|c| c.status == Status::Fail).collect::<Vec<_>>());
        assert!(!rep.warnings.is_empty());
        for c in &rep.checks {
            let skipped = c.status == Status::Skipped;
            assert_eq!(skipped, c.tag != CheckTag::Algebraic, "{c:?}");
        }
    }

    #[test]
    fn report_serializes_statuses_in_kebab_case() {
        let cfg = ExperimentConfig { q: 1.0, instances: 2, ..Default::default() };
        let json = serde_json::to_string(&run_identity_suite(&cfg).unwrap()).unwrap();
        assert!(json.contains("\"expected-nonzero\""));
        assert!(json.contains("\"skipped\""));
    }
}
