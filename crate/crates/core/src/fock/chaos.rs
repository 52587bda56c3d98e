//! Finite chaos expansions `Σ_d I_q(f_d)` and their products.
//!
//! Through `I_q(f)Ω = f` the vacuum state `τ_q` of an expansion is its
//! degree-0 coefficient, and `τ_q(I_q(f) I_q(g)) = f ⌢^m_q g` for `m = deg f = deg g`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QContext;
use crate::error::{Error, Result};
use crate::tensor::{read_kernel, QKernel};

#[derive(Debug, Clone, PartialEq)]
pub struct ChaosPoly {
    dim: usize,
    terms: BTreeMap<usize, QKernel>,
}

impl ChaosPoly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// `I_q(f)`.
    pub fn from_kernel(f: QKernel) -> Self {
        let mut out = Self::zero(f.dim());
        out.insert(f);
        out
    }

    pub fn scalar(dim: usize, value: Complex64) -> Self {
        Self::from_kernel(QKernel::scalar(dim, value))
    }

    /// `I_q(f_1) + … + I_q(f_j)`.
    pub fn from_kernels<I: IntoIterator<Item = QKernel>>(dim: usize, kernels: I) -> Result<Self> {
        let mut out = Self::zero(dim);
        for k in kernels {
            out.add_kernel(Complex64::new(1.0, 0.0), &k)?;
        }
        Ok(out)
    }

    fn insert(&mut self, f: QKernel) {
        if !f.is_zero() {
            self.terms.insert(f.degree(), f);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<usize, QKernel> {
        &self.terms
    }

    pub fn term(&self, degree: usize) -> Option<&QKernel> {
        self.terms.get(&degree)
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `self += c · I_q(f)`.
    pub fn add_kernel(&mut self, c: Complex64, f: &QKernel) -> Result<()> {
        if f.degree() > 0 && f.dim() != self.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: f.dim(),
            });
        }
        let d = f.degree();
        match self.terms.get_mut(&d) {
            Some(existing) => {
                existing.axpy(c, f)?;
                if existing.is_zero() {
                    self.terms.remove(&d);
                }
            }
            None => {
                let mut k = f.scaled(c);
                if d == 0 {
                    k = QKernel::scalar(self.dim, k.coeffs()[0]);
                }
                self.insert(k);
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for f in other.terms.values() {
            out.add_kernel(Complex64::new(1.0, 0.0), f)?;
        }
        Ok(out)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.dim);
        for f in self.terms.values() {
            out.insert(f.scaled(c));
        }
        out
    }

    /// Adjoint expansion `Σ_d I_q(f_d*)`.
    pub fn star(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for f in self.terms.values() {
            out.insert(f.star());
        }
        out
    }

    /// Vacuum state: the degree-0 coefficient.
    pub fn tau(&self) -> Complex64 {
        self.terms
            .get(&0)
            .map(|k| k.coeffs()[0])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// `A - τ(A)`.
    pub fn centered(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&0);
        out
    }

    /// Drops all components above `max_degree`.
    pub fn truncated(&self, max_degree: usize) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .range(..=max_degree)
                .map(|(&d, k)| (d, k.clone()))
                .collect(),
        }
    }
}

pub fn tau(_ctx: &QContext, a: &ChaosPoly) -> Complex64 {
    a.tau()
}

pub fn center(_ctx: &QContext, a: &ChaosPoly) -> ChaosPoly {
    a.centered()
}

/// `A·B` through `I_q(f) I_q(g) = Σ_k I_q(f ⌢^k_q g)`.
pub fn chaos_mul(ctx: &QContext, a: &ChaosPoly, b: &ChaosPoly) -> Result<ChaosPoly> {
    chaos_mul_truncated(ctx, a, b, usize::MAX)
}

/// `A·B` with components above `max_degree` never formed. Exact on the
/// components that are kept.
pub fn chaos_mul_truncated(
    ctx: &QContext,
    a: &ChaosPoly,
    b: &ChaosPoly,
    max_degree: usize,
) -> Result<ChaosPoly> {
    if a.dim != b.dim {
        return Err(Error::DimMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let mut out = ChaosPoly::zero(a.dim);
    let one = Complex64::new(1.0, 0.0);
    for (&d, f) in &a.terms {
        for (&e, g) in &b.terms {
            let k_min = (d + e).saturating_sub(max_degree).div_ceil(2);
            for k in k_min..=d.min(e) {
                let h = ctx.q_contract(f, k, g)?;
                out.add_kernel(one, &h)?;
            }
        }
    }
    Ok(out)
}

/// `τ_q(A·B) = Σ_d f_d ⌢^d_q g_d`, pairing only matching degrees.
pub fn tau_product(ctx: &QContext, a: &ChaosPoly, b: &ChaosPoly) -> Result<Complex64> {
    if a.dim != b.dim {
        return Err(Error::DimMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (&d, f) in &a.terms {
        if let Some(g) = b.terms.get(&d) {
            let z = ctx.q_contract(f, d, g)?;
            total += z.coeffs()[0];
        }
    }
    Ok(total)
}

/// `τ_q(F_1 F_2 … F_j)`, multiplied left to right. Each partial product is
/// truncated to the total degree the remaining factors can still cancel.
fn tau_chain(ctx: &QContext, factors: &[&ChaosPoly]) -> Result<Complex64> {
    match factors {
        [] => Ok(Complex64::new(1.0, 0.0)),
        [a] => Ok(a.tau()),
        _ => {
            let degrees: Vec<usize> = factors.iter().map(|f| f.max_degree()).collect();
            let budget = |from: usize| degrees[from..].iter().sum::<usize>();
            let last = factors.len() - 1;
            let mut acc = factors[0].truncated(budget(1));
            for i in 1..last {
                acc = chaos_mul_truncated(ctx, &acc, factors[i], budget(i + 1))?;
            }
            tau_product(ctx, &acc, factors[last])
        }
    }
}

/// Plan for `τ_q(A^r)`: work with `S = A²` so the live degree stays near
/// `r·deg(A)/3` for `r ≤ 6`.
fn moment_with_square(ctx: &QContext, a: &ChaosPoly, square: &ChaosPoly, r: usize) -> Result<Complex64> {
    let mut factors: Vec<&ChaosPoly> = Vec::new();
    if r % 2 == 1 {
        factors.push(a);
    }
    factors.extend(std::iter::repeat_n(square, r / 2));
    tau_chain(ctx, &factors)
}

/// `τ_q(A^r)`.
pub fn moment(ctx: &QContext, a: &ChaosPoly, r: usize) -> Result<Complex64> {
    match r {
        0 => Ok(Complex64::new(1.0, 0.0)),
        1 => Ok(a.tau()),
        2 => tau_product(ctx, a, a),
        _ => {
            let square = chaos_mul(ctx, a, a)?;
            moment_with_square(ctx, a, &square, r)
        }
    }
}

/// `[τ_q(A^0), …, τ_q(A^{r_max})]`, sharing `A²` between orders.
pub fn moments_up_to(ctx: &QContext, a: &ChaosPoly, r_max: usize) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(r_max + 1);
    for r in 0..=r_max.min(2) {
        out.push(moment(ctx, a, r)?);
    }
    if r_max >= 3 {
        let square = chaos_mul(ctx, a, a)?;
        for r in 3..=r_max {
            out.push(moment_with_square(ctx, a, &square, r)?);
        }
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernel: Option<QKernel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernel_ref: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ChaosJson {
    dim: usize,
    terms: Vec<TermJson>,
}

impl ChaosPoly {
    /// JSON with every kernel inline.
    pub fn to_json(&self) -> Result<String> {
        let doc = ChaosJson {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(&degree, k)| TermJson {
                    degree,
                    kernel: Some(k.clone()),
                    kernel_ref: None,
                })
                .collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    /// Parses JSON; `kernel_ref` entries are resolved relative to `base`.
    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self> {
        let doc: ChaosJson = serde_json::from_str(text)?;
        let mut out = ChaosPoly::zero(doc.dim);
        for t in doc.terms {
            let k = match (t.kernel, t.kernel_ref) {
                (Some(k), None) => k,
                (None, Some(r)) => {
                    let path = base.map(|b| b.join(&r)).unwrap_or_else(|| PathBuf::from(&r));
                    read_kernel(&path)?
                }
                _ => {
                    return Err(Error::Format(format!(
                        "term of degree {} needs exactly one of kernel / kernel_ref",
                        t.degree
                    )))
                }
            };
            if k.degree() != t.degree {
                return Err(Error::DegreeMismatch {
                    left: t.degree,
                    right: k.degree(),
                });
            }
            out.add_kernel(Complex64::new(1.0, 0.0), &k)?;
        }
        Ok(out)
    }
}

pub fn read_chaos(path: &Path) -> Result<ChaosPoly> {
    ChaosPoly::from_json(&fs::read_to_string(path)?, path.parent())
}

pub fn write_chaos(path: &Path, a: &ChaosPoly) -> Result<()> {
    fs::write(path, a.to_json()?)?;
    Ok(())
}
