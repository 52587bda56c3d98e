//! Seeded generators for test and experiment kernels.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::tensor::{checked_len, QKernel};

pub type KernelRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> KernelRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_kernel(rng: &mut KernelRng, dim: usize, degree: usize) -> Result<QKernel> {
    let len = checked_len("random kernel", dim, degree)?;
    let coeffs = (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    QKernel::from_coeffs(dim, degree, coeffs)
}

pub fn random_real_kernel(rng: &mut KernelRng, dim: usize, degree: usize) -> Result<QKernel> {
    let len = checked_len("random kernel", dim, degree)?;
    let coeffs: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
    QKernel::from_real(dim, degree, &coeffs)
}

/// Random complex kernel satisfying `f = f*`, scaled to unit norm.
pub fn random_mirror(rng: &mut KernelRng, dim: usize, degree: usize) -> Result<QKernel> {
    Ok(normalized(random_kernel(rng, dim, degree)?.mirror_symmetrize()))
}

/// Random fully symmetric real kernel, scaled to unit norm.
pub fn random_symmetric(rng: &mut KernelRng, dim: usize, degree: usize) -> Result<QKernel> {
    Ok(normalized(random_real_kernel(rng, dim, degree)?.full_symmetrize()?))
}

fn normalized(k: QKernel) -> QKernel {
    let n = k.norm();
    if n > 0.0 {
        k.scaled(Complex64::new(1.0 / n, 0.0))
    } else {
        k
    }
}
