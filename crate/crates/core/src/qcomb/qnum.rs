use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The deformation parameter, constrained to `(-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct QScalar(f64);

impl QScalar {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > -1.0 && q <= 1.0 {
            Ok(Self(q))
        } else {
            Err(Error::InvalidQ(q))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True when theorem-backed fourth moment statements apply (`0 ≤ q < 1`).
    pub fn in_theorem_range(self) -> bool {
        (0.0..1.0).contains(&self.0)
    }

    /// `q^e` with the convention `0^0 = 1`.
    pub fn pow(self, e: usize) -> f64 {
        self.0.powi(e as i32)
    }
}

impl TryFrom<f64> for QScalar {
    type Error = Error;
    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<QScalar> for f64 {
    fn from(q: QScalar) -> f64 {
        q.0
    }
}

/// `[m]_q = 1 + q + … + q^{m-1}`; `[0]_q = 0`.
pub fn q_int(m: usize, q: QScalar) -> f64 {
    let mut total = 0.0;
    let mut power = 1.0;
    for _ in 0..m {
        total += power;
        power *= q.0;
    }
    total
}

/// `[m]_q! = [m]_q [m-1]_q … [1]_q`, with `[0]_q! = 1`.
pub fn q_factorial(m: usize, q: QScalar) -> f64 {
    (1..=m).map(|j| q_int(j, q)).product()
}

/// Gaussian binomial `[m]_q! / ([k]_q! [m-k]_q!)`.
pub fn q_binomial(m: usize, k: usize, q: QScalar) -> Result<f64> {
    if k > m {
        return Err(Error::OutOfRange {
            what: "q-binomial lower index",
            value: k,
            range: format!("0..={m}"),
        });
    }
    Ok(q_factorial(m, q) / (q_factorial(k, q) * q_factorial(m - k, q)))
}

pub fn binomial(m: u64, k: u64) -> u128 {
    if k > m {
        return 0;
    }
    (0..k.min(m - k)).fold(1u128, |acc, i| acc * (m - i) as u128 / (i + 1) as u128)
}

/// `n!! = n (n-2) (n-4) …`, with `0!! = (-1)!! = 1` (pass 0 for the latter).
pub fn double_factorial(n: u64) -> u128 {
    (1..=n).rev().step_by(2).map(|v| v as u128).product()
}

pub fn catalan(k: u64) -> u128 {
    binomial(2 * k, k) / (k as u128 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> QScalar {
        QScalar::new(v).unwrap()
    }

    #[test]
    fn q_integers() {
        for v in [-0.5, 0.0, 0.3, 1.0] {
            assert_eq!(q_int(1, q(v)), 1.0);
        }
        assert_eq!(q_int(3, q(0.5)), 1.75);
        assert_eq!(q_int(4, q(1.0)), 4.0);
        assert_eq!(q_factorial(4, q(1.0)), 24.0);
        assert_eq!(q_factorial(0, q(0.3)), 1.0);
        assert_eq!(q_factorial(2, q(0.5)), 1.5);
    }

    #[test]
    fn q_binomials() {
        assert_eq!(q_binomial(4, 2, q(1.0)).unwrap(), 6.0);
        // [4 choose 2]_q = 1 + q + 2q^2 + q^3 + q^4
        let v = 0.3f64;
        let expect = 1.0 + v + 2.0 * v * v + v.powi(3) + v.powi(4);
        assert!((q_binomial(4, 2, q(v)).unwrap() - expect).abs() < 1e-14);
        assert_eq!(q_binomial(5, 0, q(0.7)).unwrap(), 1.0);
        assert!(q_binomial(2, 3, q(0.5)).is_err());
    }

    #[test]
    fn q_range() {
        assert!(QScalar::new(-1.0).is_err());
        assert!(QScalar::new(1.0001).is_err());
        assert!(QScalar::new(f64::NAN).is_err());
        assert!(QScalar::new(1.0).is_ok());
        assert!(!q(1.0).in_theorem_range());
        assert!(q(0.0).in_theorem_range());
        assert_eq!(q(0.0).pow(0), 1.0);
    }

    #[test]
    fn integer_combinatorics() {
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(double_factorial(9), 945);
        assert_eq!(double_factorial(0), 1);
        let cat: Vec<u128> = (0..7).map(catalan).collect();
        assert_eq!(cat, vec![1, 1, 2, 5, 14, 42, 132]);
    }
}
