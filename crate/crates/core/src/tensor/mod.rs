//! Dense kernels over a finite orthonormal one-particle space and the
//! undeformed (`q = 0`) tensor calculus.
//!
//! A [`QKernel`] of degree `n` over dimension `N` stores the `N^n`
//! coordinates of `f ∈ H^{⊗n}` against `e_{t_1} ⊗ … ⊗ e_{t_n}` in row-major
//! multi-index order, the last index varying fastest. Slices over trailing
//! indices are therefore contiguous, and contractions are reshaped matrix
//! products.

mod gemm;
mod io;

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcomb::{enumerate_permutations, Permutation};

pub use io::{read_kernel, write_kernel};

/// Default limit on the number of complex entries of any materialized kernel.
pub const DEFAULT_ELEMENT_CAP: usize = 1 << 27;

static ELEMENT_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_ELEMENT_CAP);

/// Current process-wide element cap.
pub fn element_cap() -> usize {
    ELEMENT_CAP.load(Ordering::Relaxed)
}

pub fn set_element_cap(cap: usize) {
    ELEMENT_CAP.store(cap, Ordering::Relaxed);
}

/// `dim^degree`, or a [`Error::CapExceeded`] carrying the size arithmetic.
pub fn checked_len(what: &'static str, dim: usize, degree: usize) -> Result<usize> {
    let cap = element_cap();
    let requested = (dim as u128).checked_pow(degree as u32).unwrap_or(u128::MAX);
    if requested > cap as u128 {
        return Err(Error::CapExceeded {
            what,
            dim,
            degree,
            requested,
            cap,
        });
    }
    Ok(requested as usize)
}

/// Symmetry hypotheses a kernel may satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryClass {
    None,
    /// `f = f*`
    Mirror,
    /// real valued and `π(f) = f` for every permutation
    Full,
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct QKernel {
    degree: usize,
    dim: usize,
    coeffs: Vec<Complex64>,
}

impl QKernel {
    pub fn zeros(dim: usize, degree: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::OutOfRange {
                what: "dimension",
                value: 0,
                range: "1..".into(),
            });
        }
        let len = checked_len("kernel allocation", dim, degree)?;
        Ok(Self {
            degree,
            dim,
            coeffs: vec![ZERO; len],
        })
    }

    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Format("dimension must be positive".into()));
        }
        let len = checked_len("kernel allocation", dim, degree)?;
        if coeffs.len() != len {
            return Err(Error::Format(format!(
                "expected {len} coefficients for dim {dim}, degree {degree}, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            degree,
            dim,
            coeffs,
        })
    }

    pub fn from_real(dim: usize, degree: usize, coeffs: &[f64]) -> Result<Self> {
        Self::from_coeffs(
            dim,
            degree,
            coeffs.iter().map(|&re| Complex64::new(re, 0.0)).collect(),
        )
    }

    /// Degree-0 kernel holding a single scalar.
    pub fn scalar(dim: usize, value: Complex64) -> Self {
        Self {
            degree: 0,
            dim: dim.max(1),
            coeffs: vec![value],
        }
    }

    /// The basis tensor `e_{t_1} ⊗ … ⊗ e_{t_n}` (0-based indices).
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        let mut k = Self::zeros(dim, indices.len())?;
        let pos = k.offset(indices)?;
        k.coeffs[pos] = Complex64::new(1.0, 0.0);
        Ok(k)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Row-major offset of a multi-index.
    pub fn offset(&self, indices: &[usize]) -> Result<usize> {
        if indices.len() != self.degree {
            return Err(Error::DegreeMismatch {
                left: indices.len(),
                right: self.degree,
            });
        }
        let mut pos = 0;
        for &t in indices {
            if t >= self.dim {
                return Err(Error::OutOfRange {
                    what: "basis index",
                    value: t,
                    range: format!("0..{}", self.dim),
                });
            }
            pos = pos * self.dim + t;
        }
        Ok(pos)
    }

    pub fn get(&self, indices: &[usize]) -> Result<Complex64> {
        Ok(self.coeffs[self.offset(indices)?])
    }

    /// Scalar value of a degree-0 kernel.
    pub fn as_scalar(&self) -> Option<Complex64> {
        (self.degree == 0).then(|| self.coeffs[0])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|z| z.im == 0.0)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.scale_in_place(c);
        out
    }

    pub fn scale_in_place(&mut self, c: Complex64) {
        self.coeffs.iter_mut().for_each(|z| *z *= c);
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        Ok(())
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        // degree-0 scalars are dimension agnostic
        if self.dim != other.dim && self.degree > 0 && other.degree > 0 {
            return Err(Error::DimMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    /// `self += c · other`.
    pub fn axpy(&mut self, c: Complex64, other: &Self) -> Result<()> {
        if !(self.degree == 0 && other.degree == 0) {
            self.check_same_shape(other)?;
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other)?;
        Ok(out)
    }

    pub fn conj(&self) -> Self {
        Self {
            degree: self.degree,
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Entrywise real part as a kernel.
    pub fn real_part(&self) -> Self {
        Self {
            degree: self.degree,
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|z| Complex64::new(z.re, 0.0)).collect(),
        }
    }

    /// `f ⊗ g`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let dim = if self.degree > 0 { self.dim } else { other.dim };
        checked_len("tensor product", dim, self.degree + other.degree)?;
        let mut coeffs = Vec::with_capacity(self.coeffs.len() * other.coeffs.len());
        for a in &self.coeffs {
            coeffs.extend(other.coeffs.iter().map(|b| a * b));
        }
        Ok(Self {
            degree: self.degree + other.degree,
            dim,
            coeffs,
        })
    }

    /// `⟨f, g⟩ = Σ_t f[t] · conj(g[t])`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if !(self.degree == 0 && other.degree == 0) {
            self.check_same_shape(other)?;
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Euclidean distance `‖f - g‖`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if !(self.degree == 0 && other.degree == 0) {
            self.check_same_shape(other)?;
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The anti-linear adjoint: `f*[t_1..t_n] = conj(f[t_n..t_1])`.
    pub fn star(&self) -> Self {
        let mut out = self.permute_unchecked(&Permutation::reversal(self.degree));
        out.coeffs.iter_mut().for_each(|z| *z = z.conj());
        out
    }

    /// `π(f)`, with `π(f)[t_1..t_m] = f[t_{π(1)}..t_{π(m)}]`.
    pub fn permute(&self, p: &Permutation) -> Result<Self> {
        if p.len() != self.degree {
            return Err(Error::DegreeMismatch {
                left: p.len(),
                right: self.degree,
            });
        }
        Ok(self.permute_unchecked(p))
    }

    fn permute_unchecked(&self, p: &Permutation) -> Self {
        let mut out = vec![ZERO; self.coeffs.len()];
        permute_into(&self.coeffs, self.dim, p.images(), &mut out, None);
        Self {
            degree: self.degree,
            dim: self.dim,
            coeffs: out,
        }
    }

    /// `self += c · π(f)` without allocating the permuted kernel.
    pub fn add_permuted(&mut self, c: f64, f: &Self, p: &Permutation) -> Result<()> {
        self.check_same_shape(f)?;
        if p.len() != self.degree {
            return Err(Error::DegreeMismatch {
                left: p.len(),
                right: self.degree,
            });
        }
        permute_into(&f.coeffs, self.dim, p.images(), &mut self.coeffs, Some(c));
        Ok(())
    }

    /// The free contraction `f ⌢^k g`:
    /// `out[t, r] = Σ_{s_1..s_k} f[t, s_1..s_k] · g[s_k..s_1, r]`.
    pub fn contract(&self, k: usize, g: &Self) -> Result<Self> {
        self.check_contraction(k, g)?;
        let reversed = if k > 1 {
            let rev = Permutation::reversal(k).direct_sum(&Permutation::identity(g.degree - k));
            g.permute_unchecked(&rev)
        } else {
            g.clone()
        };
        self.pair_leading(k, &reversed)
    }

    pub(crate) fn check_contraction(&self, k: usize, g: &Self) -> Result<()> {
        self.check_same_dim(g)?;
        let max = self.degree.min(g.degree);
        if k > max {
            return Err(Error::OutOfRange {
                what: "contraction order k",
                value: k,
                range: format!("0..={max}"),
            });
        }
        Ok(())
    }

    /// `out[t, r] = Σ_u self[t, u] · g[u, r]`, pairing the last `k` indices of
    /// `self` with the first `k` of `g` in the same order.
    pub(crate) fn pair_leading(&self, k: usize, g: &Self) -> Result<Self> {
        self.check_contraction(k, g)?;
        if k == 0 {
            return self.tensor(g);
        }
        let dim = if self.degree > 0 { self.dim } else { g.dim };
        let degree = self.degree + g.degree - 2 * k;
        checked_len("contraction output", dim, degree)?;
        let inner = dim.pow(k as u32);
        let rows = self.coeffs.len() / inner;
        let cols = g.coeffs.len() / inner;
        let coeffs = gemm::matmul(&self.coeffs, &g.coeffs, rows, inner, cols);
        Ok(Self {
            degree,
            dim,
            coeffs,
        })
    }

    /// `(f + f*)/2`.
    pub fn mirror_symmetrize(&self) -> Self {
        let mut out = self.star();
        for (a, b) in out.coeffs.iter_mut().zip(&self.coeffs) {
            *a = (*a + b) * 0.5;
        }
        out
    }

    /// Real part of `(1/m!) Σ_π π(f)`.
    pub fn full_symmetrize(&self) -> Result<Self> {
        let mut acc = Self::zeros(self.dim, self.degree)?;
        let mut count = 0usize;
        for p in enumerate_permutations(self.degree)? {
            permute_into(&self.coeffs, self.dim, p.images(), &mut acc.coeffs, Some(1.0));
            count += 1;
        }
        let inv = 1.0 / count as f64;
        acc.coeffs
            .iter_mut()
            .for_each(|z| *z = Complex64::new(z.re * inv, 0.0));
        Ok(acc)
    }

    /// Strongest symmetry class satisfied to relative tolerance `tol`.
    pub fn symmetry_class(&self, tol: f64) -> SymmetryClass {
        let scale = self.norm().max(f64::MIN_POSITIVE);
        let real = self.coeffs.iter().all(|z| z.im.abs() <= tol * scale);
        if real {
            let full = (0..self.degree.saturating_sub(1)).all(|i| {
                let mut images: Vec<usize> = (0..self.degree).collect();
                images.swap(i, i + 1);
                let s = Permutation::new(images).expect("adjacent transposition");
                self.permute_unchecked(&s).distance(self).unwrap() <= tol * scale
            });
            if full {
                return SymmetryClass::Full;
            }
        }
        if self.star().distance(self).unwrap() <= tol * scale {
            SymmetryClass::Mirror
        } else {
            SymmetryClass::None
        }
    }
}

/// Writes `π(src)` into `dst` (overwriting, or accumulating `c·π(src)` when
/// `accumulate` is set).
fn permute_into(
    src: &[Complex64],
    dim: usize,
    images: &[usize],
    dst: &mut [Complex64],
    accumulate: Option<f64>,
) {
    let m = images.len();
    if m == 0 {
        match accumulate {
            Some(c) => dst[0] += src[0] * c,
            None => dst[0] = src[0],
        }
        return;
    }
    // output digit j contributes t_j · dim^{m-1-π^{-1}(j)} to the source offset
    let mut weight = vec![0usize; m];
    for (i, &j) in images.iter().enumerate() {
        weight[j] = dim.pow((m - 1 - i) as u32);
    }
    let inner_w = weight[m - 1];
    let mut digits = vec![0usize; m];
    let mut base = 0usize;
    let mut out = 0usize;
    let total = dst.len();
    while out < total {
        // innermost digit sweeps a strided source run
        match accumulate {
            Some(c) => {
                for t in 0..dim {
                    dst[out + t] += src[base + t * inner_w] * c;
                }
            }
            None => {
                for t in 0..dim {
                    dst[out + t] = src[base + t * inner_w];
                }
            }
        }
        out += dim;
        let mut j = m - 1;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            digits[j] += 1;
            base += weight[j];
            if digits[j] < dim {
                break;
            }
            digits[j] = 0;
            base -= dim * weight[j];
        }
    }
}
