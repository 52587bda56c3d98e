use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcomb::{catalan, enumerate_pair_partitions};

/// Largest moment order the pair-partition oracle will expand by default.
pub const DEFAULT_ORACLE_CAP: usize = 12;

/// Semicircle moments: 0 for odd `n`, `Catalan(k) · variance^k` for `n = 2k`.
pub fn semicircle_moment(n: usize, variance: f64) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let k = n / 2;
    catalan(k as u64) as f64 * variance.powi(k as i32)
}

/// A symmetric interaction matrix `Q` with `max |q_ij| ≤ 1` and a coefficient
/// vector `v`, describing `X_v = Σ_i v_i X_i` for mixed-Q Gaussian `X_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QGaussianSpec {
    d: usize,
    #[serde(rename = "Q")]
    q: Vec<Vec<f64>>,
    v: Vec<f64>,
}

impl QGaussianSpec {
    pub fn new(q: Vec<Vec<f64>>, v: Vec<f64>) -> Result<Self> {
        let d = v.len();
        if d == 0 {
            return Err(Error::Hypothesis("mixed Q-Gaussian needs d ≥ 1".into()));
        }
        if q.len() != d || q.iter().any(|row| row.len() != d) {
            return Err(Error::Hypothesis(format!("Q must be {d}×{d} to match v")));
        }
        for i in 0..d {
            for j in 0..d {
                if q[i][j] != q[j][i] {
                    return Err(Error::Hypothesis(format!("Q is not symmetric at ({i},{j})")));
                }
                if q[i][j].is_nan() || q[i][j].abs() > 1.0 {
                    return Err(Error::Hypothesis(format!("|q_{i}{j}| = {} exceeds 1", q[i][j])));
                }
            }
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Hypothesis("v must be finite".into()));
        }
        Ok(Self { d, q, v })
    }

    /// One q-Gaussian of variance `sigma²`.
    pub fn single(q: f64, sigma: f64) -> Result<Self> {
        Self::new(vec![vec![q]], vec![sigma])
    }

    /// The limit law for chaos orders `(m, n)` with q-norms `(σ_X, σ_Y)`:
    /// `Q = [[q^{m²}, q^{mn}], [q^{mn}, q^{n²}]]`, `v = (σ_X, σ_Y)`.
    pub fn double_chaos_limit(q: f64, m: usize, n: usize, sigma_x: f64, sigma_y: f64) -> Result<Self> {
        let p = |e: usize| q.powi(e as i32);
        let cross = p(m * n);
        Self::new(
            vec![vec![p(m * m), cross], vec![cross, p(n * n)]],
            vec![sigma_x, sigma_y],
        )
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn q_matrix(&self) -> &[Vec<f64>] {
        &self.q
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }
}

/// `τ[X_v^n]` as the pair-partition sum with crossing weights `q_{α(i)α(j)}`.
///
/// Labelings `α` that are not constant on every pair contribute zero through
/// `δ_{α(i)α(j)}`, so only the `d^{n/2}` colorings of the blocks are visited.
pub fn mixed_q_gaussian_moment(spec: &QGaussianSpec, n: usize) -> Result<f64> {
    mixed_q_gaussian_moment_capped(spec, n, DEFAULT_ORACLE_CAP)
}

pub fn mixed_q_gaussian_moment_capped(spec: &QGaussianSpec, n: usize, cap: usize) -> Result<f64> {
    if n > cap {
        return Err(Error::EnumerationCap {
            what: "mixed Q-Gaussian moment order",
            size: n,
            cap,
        });
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    let r = n / 2;
    let d = spec.d;
    let v2: Vec<f64> = spec.v.iter().map(|x| x * x).collect();
    let mut total = 0.0;
    for pp in enumerate_pair_partitions(n)? {
        let crossings = pp.crossing_blocks();
        let mut color = vec![0usize; r];
        'colors: loop {
            let mut w: f64 = color.iter().map(|&c| v2[c]).product();
            for &(a, b) in &crossings {
                w *= spec.q[color[a]][color[b]];
            }
            total += w;
            let mut i = r;
            while i > 0 {
                i -= 1;
                color[i] += 1;
                if color[i] < d {
                    continue 'colors;
                }
                color[i] = 0;
            }
            break;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcomb::double_factorial;

    #[test]
    fn semicircle_values() {
        assert_eq!(semicircle_moment(2, 1.0), 1.0);
        assert_eq!(semicircle_moment(4, 1.0), 2.0);
        assert_eq!(semicircle_moment(6, 2.0), 40.0);
        assert_eq!(semicircle_moment(5, 3.0), 0.0);
        assert_eq!(semicircle_moment(0, 3.0), 1.0);
    }

    #[test]
    fn single_variable_reductions() {
        let free = QGaussianSpec::single(0.0, 1.0).unwrap();
        let classical = QGaussianSpec::single(1.0, 1.0).unwrap();
        for k in 0..=5usize {
            assert_eq!(mixed_q_gaussian_moment(&free, 2 * k).unwrap(), catalan(k as u64) as f64);
            let gauss = if k == 0 { 1 } else { double_factorial(2 * k as u64 - 1) };
            assert_eq!(mixed_q_gaussian_moment(&classical, 2 * k).unwrap(), gauss as f64);
        }
        assert_eq!(mixed_q_gaussian_moment(&free, 7).unwrap(), 0.0);
    }

    #[test]
    fn q_gaussian_fourth_and_sixth_moments() {
        let q = 0.35;
        let spec = QGaussianSpec::single(q, 1.0).unwrap();
        assert!((mixed_q_gaussian_moment(&spec, 4).unwrap() - (2.0 + q)).abs() < 1e-15);
        let six = 5.0 + 6.0 * q + 3.0 * q * q + q * q * q;
        assert!((mixed_q_gaussian_moment(&spec, 6).unwrap() - six).abs() < 1e-14);
    }

    #[test]
    fn double_chaos_fourth_moment_closed_form() {
        let (q, m, n, sx, sy) = (0.5f64, 1usize, 2usize, 0.8f64, 1.3f64);
        let spec = QGaussianSpec::double_chaos_limit(q, m, n, sx, sy).unwrap();
        let closed = (2.0 + q.powi(1)) * sx.powi(4)
            + (2.0 + q.powi(4)) * sy.powi(4)
            + (4.0 + 2.0 * q.powi(2)) * sx * sx * sy * sy;
        assert!((mixed_q_gaussian_moment(&spec, 4).unwrap() - closed).abs() < 1e-12);
    }

    #[test]
    fn free_sum_is_semicircular_with_added_variance() {
        let spec = QGaussianSpec::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]], vec![1.0, 2.0]).unwrap();
        for n in [2, 4, 6, 8] {
            let got = mixed_q_gaussian_moment(&spec, n).unwrap();
            assert!((got - semicircle_moment(n, 5.0)).abs() < 1e-9 * got);
        }
    }

    #[test]
    fn spec_validation_and_cap() {
        assert!(QGaussianSpec::new(vec![vec![0.0, 0.1], vec![0.2, 0.0]], vec![1.0, 1.0]).is_err());
        assert!(QGaussianSpec::new(vec![vec![1.5]], vec![1.0]).is_err());
        assert!(QGaussianSpec::new(vec![vec![0.5]], vec![1.0, 1.0]).is_err());
        assert!(QGaussianSpec::new(vec![], vec![]).is_err());
        let spec = QGaussianSpec::single(0.2, 1.0).unwrap();
        assert!(mixed_q_gaussian_moment(&spec, 14).is_err());
        assert!(mixed_q_gaussian_moment_capped(&spec, 14, 14).is_ok());
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"d":1,"Q":[[0.2]],"v":[1.0]}"#);
    }
}
