//! Row-major matrix products behind contractions.

use matrixmultiply::{dgemm, zgemm, CGemmOption};
use num_complex::Complex64;

fn is_real(data: &[Complex64]) -> bool {
    data.iter().all(|z| z.im == 0.0)
}

/// `C = A·B` for row-major `A: rows×inner`, `B: inner×cols`.
///
/// Falls back to a real product when both operands have vanishing imaginary
/// parts; the result is identical up to rounding.
pub(crate) fn matmul(
    a: &[Complex64],
    b: &[Complex64],
    rows: usize,
    inner: usize,
    cols: usize,
) -> Vec<Complex64> {
    debug_assert_eq!(a.len(), rows * inner);
    debug_assert_eq!(b.len(), inner * cols);
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    if inner == 0 {
        return vec![Complex64::new(0.0, 0.0); rows * cols];
    }
    if is_real(a) && is_real(b) {
        let ar: Vec<f64> = a.iter().map(|z| z.re).collect();
        let br: Vec<f64> = b.iter().map(|z| z.re).collect();
        let mut cr = vec![0.0f64; rows * cols];
        // SAFETY: slices have the asserted lengths and row-major strides.
        unsafe {
            dgemm(
                rows,
                inner,
                cols,
                1.0,
                ar.as_ptr(),
                inner as isize,
                1,
                br.as_ptr(),
                cols as isize,
                1,
                0.0,
                cr.as_mut_ptr(),
                cols as isize,
                1,
            );
        }
        return cr.into_iter().map(|re| Complex64::new(re, 0.0)).collect();
    }
    let mut c = vec![Complex64::new(0.0, 0.0); rows * cols];
    // SAFETY: Complex64 is repr(C) {re, im}, layout-compatible with [f64; 2].
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            rows,
            inner,
            cols,
            [1.0, 0.0],
            a.as_ptr() as *const [f64; 2],
            inner as isize,
            1,
            b.as_ptr() as *const [f64; 2],
            cols as isize,
            1,
            [0.0, 0.0],
            c.as_mut_ptr() as *mut [f64; 2],
            cols as isize,
            1,
        );
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &[Complex64], b: &[Complex64], r: usize, k: usize, c: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); r * c];
        for i in 0..r {
            for j in 0..c {
                for l in 0..k {
                    out[i * c + j] += a[i * k + l] * b[l * c + j];
                }
            }
        }
        out
    }

    #[test]
    fn complex_and_real_paths_match_naive() {
        let a: Vec<Complex64> = (0..12).map(|i| Complex64::new(i as f64, 1.0 - i as f64 / 3.0)).collect();
        let b: Vec<Complex64> = (0..20).map(|i| Complex64::new((i % 7) as f64 - 2.0, 0.5 * i as f64)).collect();
        let got = matmul(&a, &b, 3, 4, 5);
        for (x, y) in got.iter().zip(naive(&a, &b, 3, 4, 5)) {
            assert!((x - y).norm() < 1e-12);
        }
        let ar: Vec<Complex64> = a.iter().map(|z| Complex64::new(z.re, 0.0)).collect();
        let br: Vec<Complex64> = b.iter().map(|z| Complex64::new(z.im, 0.0)).collect();
        let got = matmul(&ar, &br, 3, 4, 5);
        for (x, y) in got.iter().zip(naive(&ar, &br, 3, 4, 5)) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn degenerate_shapes() {
        let a = vec![Complex64::new(2.0, 0.0)];
        let b = vec![Complex64::new(0.0, 3.0)];
        assert_eq!(matmul(&a, &b, 1, 1, 1), vec![Complex64::new(0.0, 6.0)]);
        assert_eq!(matmul(&[], &[], 2, 0, 2), vec![Complex64::new(0.0, 0.0); 4]);
    }
}
