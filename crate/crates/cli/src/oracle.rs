use std::fmt::Write as _;

use qchaos::moments::{mixed_q_gaussian_moment, QGaussianSpec};
use serde::Serialize;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleTable {
    pub spec: QGaussianSpec,
    /// `moments[r] = τ[X_v^r]`.
    pub moments: Vec<f64>,
}

/// Moments `r = 0..=r_max` of `X_v` for `spec`.
pub fn print_oracle(spec: &QGaussianSpec, r_max: usize) -> Result<OracleTable> {
    let moments = (0..=r_max).map(|r| mixed_q_gaussian_moment(spec, r)).collect::<qchaos::Result<_>>()?;
    Ok(OracleTable { spec: spec.clone(), moments })
}

impl OracleTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,moment\n");
        for (r, m) in self.moments.iter().enumerate() {
            let _ = writeln!(out, "{r},{m}");
        }
        out
    }

    pub fn to_text(&self) -> String {
        let cells: Vec<String> = self.moments.iter().map(|m| format!("{m}")).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(0).max("moment".len());
        let mut out = format!("{:>3}  {:>width$}\n", "r", "moment");
        for (r, c) in cells.iter().enumerate() {
            let _ = writeln!(out, "{r:>3}  {c:>width$}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_row() {
        let t = print_oracle(&QGaussianSpec::single(0.0, 1.0).unwrap(), 8).unwrap();
        assert_eq!(t.moments, vec![1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0]);
        assert_eq!(t.to_csv().lines().nth(9), Some("8,14"));
        assert!(t.to_text().lines().all(|l| l.len() == 11));
    }

    #[test]
    fn gaussian_sixth_moment() {
        let t = print_oracle(&QGaussianSpec::single(1.0, 1.0).unwrap(), 6).unwrap();
        assert_eq!(t.moments[6], 15.0);
    }

    #[test]
    fn cap_is_reported() {
        assert!(print_oracle(&QGaussianSpec::single(0.5, 1.0).unwrap(), 14).is_err());
    }
}
