use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{chaos_mul, moment, tau_product, ChaosPoly, QContext};
use crate::qcomb::{enumerate_shuffles, Permutation};
use crate::tensor::{QKernel, SymmetryClass};

/// Relative imaginary residue tolerated before a moment is declared non-real.
pub const REAL_TOLERANCE: f64 = 1e-10;

const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Real part of `z` after checking `|Im z| ≤ REAL_TOLERANCE · max(1, |z|)`.
pub fn real_part(z: Complex64) -> Result<f64> {
    let tolerance = REAL_TOLERANCE * z.norm().max(1.0);
    if z.im.abs() > tolerance {
        return Err(Error::NonReal { imag: z.im, tolerance });
    }
    Ok(z.re)
}

/// `c₄ = m₄ − 3 m₂²`.
pub fn classical_c4(m2: f64, m4: f64) -> f64 {
    m4 - 3.0 * m2 * m2
}

/// `κ₄(A) = τ(A⁴) − 2 τ(A²)²` for a centered selfadjoint `A`.
pub fn free_kappa4(ctx: &QContext, a: &ChaosPoly) -> Result<f64> {
    let m1 = a.tau();
    if m1.norm() > REAL_TOLERANCE * (1.0 + a.terms().values().map(|f| f.norm()).sum::<f64>()) {
        return Err(Error::Hypothesis(format!("free_kappa4 needs a centered input, τ(A) = {m1}")));
    }
    let m2 = real_part(moment(ctx, a, 2)?)?;
    let m4 = real_part(moment(ctx, a, 4)?)?;
    Ok(m4 - 2.0 * m2 * m2)
}

/// Free contraction norms `‖f ⌢^p f‖` for `p = 1..deg−1`.
pub fn contraction_norms(f: &QKernel) -> Result<Vec<f64>> {
    (1..f.degree().max(1)).map(|p| Ok(f.contract(p, f)?.norm())).collect()
}

/// Returns `(κ₄(I₀(f)), Σ_{k=1}^{m−1} ‖f ⌢^k f‖²)`; requires `q = 0`.
pub fn contraction_kappa4_identity(ctx: &QContext, f: &QKernel) -> Result<(f64, f64)> {
    require_free(ctx, "contraction_kappa4_identity")?;
    let kappa = free_kappa4(ctx, &ChaosPoly::from_kernel(f.clone()))?;
    let sum = contraction_norms(f)?.iter().map(|x| x * x).sum();
    Ok((kappa, sum))
}

fn require_free(ctx: &QContext, what: &str) -> Result<()> {
    if ctx.q().value() != 0.0 {
        return Err(Error::Hypothesis(format!(
            "{what} is the free (q = 0) identity, got q = {}",
            ctx.q().value()
        )));
    }
    Ok(())
}

/// Terms of `κ₄(X+Y) = κ₄(X) + κ₄(Y) + 4 cov(X², Y²) + 2 τ(XYXY)` at `q = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarizationReport {
    pub kappa4_sum: f64,
    pub kappa4_x: f64,
    pub kappa4_y: f64,
    pub cov_x2_y2: f64,
    pub tau_xyxy: f64,
    /// `4 cov(X², Y²) + 2 τ(XYXY)`.
    pub cross_term: f64,
    pub residual: f64,
    /// `1 + |κ₄(X+Y)|`, the scale for relative tolerances.
    pub scale: f64,
}

/// Evaluates both sides of the free polarization identity for `X = I₀(f)`,
/// `Y = I₀(g)`. Same-parity inputs are allowed; the residual is then
/// generally nonzero.
pub fn kappa4_polarization_residual(ctx: &QContext, f: &QKernel, g: &QKernel) -> Result<PolarizationReport> {
    require_free(ctx, "kappa4_polarization_residual")?;
    let x = ChaosPoly::from_kernel(f.clone());
    let y = ChaosPoly::from_kernel(g.clone());
    let s = x.add(&y)?;
    let kappa4_sum = {
        let m2 = real_part(moment(ctx, &s, 2)?)?;
        let m4 = real_part(moment(ctx, &s, 4)?)?;
        m4 - 2.0 * m2 * m2
    };
    let kappa4_x = free_kappa4(ctx, &x)?;
    let kappa4_y = free_kappa4(ctx, &y)?;
    let x2 = chaos_mul(ctx, &x, &x)?;
    let y2 = chaos_mul(ctx, &y, &y)?;
    let xy = chaos_mul(ctx, &x, &y)?;
    let cov_x2_y2 = real_part(tau_product(ctx, &x2, &y2)?)? - x2.tau().re * y2.tau().re;
    let tau_xyxy = real_part(tau_product(ctx, &xy, &xy)?)?;
    let cross_term = 4.0 * cov_x2_y2 + 2.0 * tau_xyxy;
    Ok(PolarizationReport {
        kappa4_sum,
        kappa4_x,
        kappa4_y,
        cov_x2_y2,
        tau_xyxy,
        cross_term,
        residual: kappa4_sum - kappa4_x - kappa4_y - cross_term,
        scale: 1.0 + kappa4_sum.abs(),
    })
}

/// `(2+q^{m²})σ_X⁴ + (2+q^{n²})σ_Y⁴ + (4+2q^{mn})σ_X²σ_Y²`.
pub fn theorem_target(q: f64, m: usize, n: usize, sigma_x: f64, sigma_y: f64) -> f64 {
    let p = |e: usize| q.powi(e as i32);
    let (sx2, sy2) = (sigma_x * sigma_x, sigma_y * sigma_y);
    (2.0 + p(m * m)) * sx2 * sx2 + (2.0 + p(n * n)) * sy2 * sy2 + (4.0 + 2.0 * p(m * n)) * sx2 * sy2
}

/// Fourth moment of `X + Y` split into the limit value and three
/// nonnegative excess terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct FourthMomentReport {
    pub q: f64,
    pub m: usize,
    pub n: usize,
    pub tau4: f64,
    pub target: f64,
    pub kappa_X: f64,
    pub kappa_Y: f64,
    pub kappa_XY: f64,
    pub contraction_norms_f: Vec<f64>,
    pub contraction_norms_g: Vec<f64>,
    pub sigma_X: f64,
    pub sigma_Y: f64,
    /// `tau4 − target − (kappa_X + kappa_Y + kappa_XY)`.
    pub decomposition_residual: f64,
    pub warnings: Vec<String>,
}

impl FourthMomentReport {
    /// `tau4 − target`.
    pub fn gap(&self) -> f64 {
        self.tau4 - self.target
    }
}

/// Computes `τ_q[(X+Y)⁴]`, `σ_X`, `σ_Y`, the excess terms `κ_X`, `κ_Y`,
/// `κ_{X,Y}` and the free contraction norms of `f` and `g`. Violated
/// hypotheses are collected as warnings.
pub fn q_fourth_moment_decomposition(ctx: &QContext, f: &QKernel, g: &QKernel) -> Result<FourthMomentReport> {
    let q = ctx.q().value();
    let (m, n) = (f.degree(), g.degree());
    let mut warnings = Vec::new();
    if !(0.0..1.0).contains(&q) {
        warnings.push(format!("q = {q} is outside [0, 1)"));
    }
    if (m + n) % 2 == 0 {
        warnings.push(format!("degrees m = {m}, n = {n} have the same parity"));
    }
    if m == 0 || n == 0 {
        warnings.push("degree-0 kernel: X or Y is not centered".into());
    }
    for (name, h) in [("f", f), ("g", g)] {
        if h.symmetry_class(SYMMETRY_TOLERANCE) != SymmetryClass::Full {
            warnings.push(format!("{name} is not fully symmetric"));
        }
    }

    let sigma_x = ctx.q_norm(f)?;
    let sigma_y = ctx.q_norm(g)?;
    let x = ChaosPoly::from_kernel(f.clone());
    let y = ChaosPoly::from_kernel(g.clone());
    let s = x.add(&y)?;
    let tau4 = real_part(moment(ctx, &s, 4)?)?;
    let tau_x4 = real_part(moment(ctx, &x, 4)?)?;
    let tau_y4 = real_part(moment(ctx, &y, 4)?)?;
    let x2 = chaos_mul(ctx, &x, &x)?;
    let y2 = chaos_mul(ctx, &y, &y)?;
    let xy = chaos_mul(ctx, &x, &y)?;
    let tau_x2y2 = real_part(tau_product(ctx, &x2, &y2)?)?;
    let tau_xyxy = real_part(tau_product(ctx, &xy, &xy)?)?;

    let p = |e: usize| q.powi(e as i32);
    let (sx2, sy2) = (sigma_x * sigma_x, sigma_y * sigma_y);
    let kappa_x = tau_x4 - (2.0 + p(m * m)) * sx2 * sx2;
    let kappa_y = tau_y4 - (2.0 + p(n * n)) * sy2 * sy2;
    let kappa_xy = 4.0 * tau_x2y2 + 2.0 * tau_xyxy - (4.0 + 2.0 * p(m * n)) * sx2 * sy2;
    let target = theorem_target(q, m, n, sigma_x, sigma_y);

    Ok(FourthMomentReport {
        q,
        m,
        n,
        tau4,
        target,
        kappa_X: kappa_x,
        kappa_Y: kappa_y,
        kappa_XY: kappa_xy,
        contraction_norms_f: contraction_norms(f)?,
        contraction_norms_g: contraction_norms(g)?,
        sigma_X: sigma_x,
        sigma_Y: sigma_y,
        decomposition_residual: tau4 - target - (kappa_x + kappa_y + kappa_xy),
        warnings,
    })
}

/// Both sides of `q_norm(f⊗g)² ≥ σ_X²σ_Y²` and
/// `⟨f⊗g, g⊗f⟩_q ≥ q^{mn} σ_X²σ_Y²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossTermBounds {
    pub norm_sqr_fg: f64,
    pub norm_bound: f64,
    pub inner_fg_gf: f64,
    pub inner_bound: f64,
}

pub fn cross_term_bounds(ctx: &QContext, f: &QKernel, g: &QKernel) -> Result<CrossTermBounds> {
    let q = ctx.q().value();
    let sx2 = ctx.q_norm(f)?.powi(2);
    let sy2 = ctx.q_norm(g)?.powi(2);
    let fg = f.tensor(g)?;
    let gf = g.tensor(f)?;
    let norm_sqr_fg = ctx.q_norm(&fg)?.powi(2);
    let inner_fg_gf = real_part(ctx.q_inner(&fg, &gf)?)?;
    Ok(CrossTermBounds {
        norm_sqr_fg,
        norm_bound: sx2 * sy2,
        inner_fg_gf,
        inner_bound: q.powi((f.degree() * g.degree()) as i32) * sx2 * sy2,
    })
}

/// Number of the first `m` output slots of `π` filled from the last block:
/// `#{i < m : π⁻¹(i) ≥ m}`.
pub fn alpha(pi: &Permutation, m: usize) -> usize {
    let inv = pi.inverse();
    (0..m).filter(|&i| inv.image(i) >= m).count()
}

/// One term of the shuffle/contraction bridge.
#[derive(Debug, Clone, PartialEq)]
pub struct ShuffleBridgeTerm {
    pub shuffle: Permutation,
    pub alpha: usize,
    /// `⟨f⊗g, π(f⊗g)⟩`.
    pub lhs: f64,
    /// `‖f ⌢^α g‖²`.
    pub rhs: f64,
}

/// Evaluates `⟨f⊗g, π(f⊗g)⟩` and `‖f ⌢^{α(π)} g‖²` for every
/// `(m, n)`-shuffle `π`.
pub fn shuffle_bridge(f: &QKernel, g: &QKernel) -> Result<Vec<ShuffleBridgeTerm>> {
    let (m, n) = (f.degree(), g.degree());
    let fg = f.tensor(g)?;
    enumerate_shuffles(m, m + n)?
        .map(|pi| {
            let a = alpha(&pi, m);
            let lhs = real_part(fg.inner(&fg.permute(&pi)?)?)?;
            let rhs = f.contract(a, g)?.norm_sqr();
            Ok(ShuffleBridgeTerm { shuffle: pi, alpha: a, lhs, rhs })
        })
        .collect()
}
