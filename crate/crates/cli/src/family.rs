use qchaos::fock::QContext;
use qchaos::random::{random_mirror, random_symmetric, seeded};
use qchaos::{Complex64, Error, QKernel};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Family};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Unit Hilbert–Schmidt norm.
    Plain,
    /// q-norm equal to the requested `σ`.
    Q,
}

/// `c·Σ_{i<k} e_i^{⊗m}` in dimension `dim`, with `c = 1/√k` (plain) or
/// `c = σ/√(k·[m]_q!)` (q-normalized).
pub fn make_orthsum_family(
    ctx: &QContext,
    m: usize,
    k: usize,
    dim: usize,
    normalize: Normalization,
    sigma: f64,
) -> Result<QKernel> {
    if k == 0 || k > dim {
        return Err(Error::OutOfRange {
            what: "orthsum size k",
            value: k,
            range: format!("1..={dim}"),
        }
        .into());
    }
    let mut f = QKernel::zeros(dim, m)?;
    let one = Complex64::new(1.0, 0.0);
    for i in 0..k {
        let idx = vec![i; m];
        let off = f.offset(&idx)?;
        f.coeffs_mut()[off] = one;
    }
    let c = match normalize {
        Normalization::Plain => 1.0 / (k as f64).sqrt(),
        Normalization::Q => sigma / (k as f64 * ctx.q_factorial(m)).sqrt(),
    };
    Ok(f.scaled(Complex64::new(c, 0.0)))
}

/// The pair `(f_k, g_k)` of row `k` of a sweep.
pub fn family_pair(ctx: &QContext, cfg: &ExperimentConfig, k: usize) -> Result<(QKernel, QKernel)> {
    let dim = cfg.family.dim(k, cfg.k_max);
    let q = Normalization::Q;
    match cfg.family {
        Family::Orthsum => Ok((
            make_orthsum_family(ctx, cfg.m, k, dim, q, cfg.sigma_x)?,
            make_orthsum_family(ctx, cfg.n, k, dim, q, cfg.sigma_y)?,
        )),
        Family::Fixed => Ok((
            make_orthsum_family(ctx, cfg.m, 1, dim, q, cfg.sigma_x)?,
            make_orthsum_family(ctx, cfg.n, 1, dim, q, cfg.sigma_y)?,
        )),
        Family::RandomSymmetric | Family::RandomMirror => {
            let mut rng = seeded(cfg.seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let draw = |rng: &mut _, deg| -> Result<QKernel> {
                Ok(if cfg.family == Family::RandomSymmetric {
                    random_symmetric(rng, dim, deg)?
                } else {
                    random_mirror(rng, dim, deg)?
                })
            };
            let f = draw(&mut rng, cfg.m)?;
            let g = draw(&mut rng, cfg.n)?;
            Ok((rescale(ctx, f, cfg.sigma_x)?, rescale(ctx, g, cfg.sigma_y)?))
        }
    }
}

fn rescale(ctx: &QContext, f: QKernel, sigma: f64) -> Result<QKernel> {
    let norm = ctx.q_norm(&f)?;
    Ok(f.scaled(Complex64::new(sigma / norm, 0.0)))
}
