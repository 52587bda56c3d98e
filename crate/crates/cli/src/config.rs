use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `c·Σ_{i≤k} e_i^{⊗m}`, contractions decay like `1/k`.
    Orthsum,
    /// The `k = 1` orthsum element for every `k`; a negative control.
    Fixed,
    /// Fresh random fully symmetric kernels at each `k`.
    RandomSymmetric,
    /// Fresh random mirror-symmetric kernels at each `k`.
    RandomMirror,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Orthsum => "orthsum",
            Family::Fixed => "fixed",
            Family::RandomSymmetric => "random-symmetric",
            Family::RandomMirror => "random-mirror",
        }
    }

    /// Ambient dimension used for row `k` of a sweep up to `k_max`.
    pub fn dim(self, k: usize, k_max: usize) -> usize {
        match self {
            Family::Orthsum => k_max,
            Family::Fixed => 1,
            Family::RandomSymmetric | Family::RandomMirror => k.clamp(1, 4),
        }
    }
}

/// One line of the desk-scale envelope: the largest `k_max` a sweep at
/// `(m, n)` is expected to finish in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnvelopeEntry {
    pub m: usize,
    pub n: usize,
    pub k_max: usize,
}

pub const ENVELOPE: &[EnvelopeEntry] = &[
    EnvelopeEntry { m: 1, n: 2, k_max: 32 },
    EnvelopeEntry { m: 2, n: 3, k_max: 12 },
];

pub fn envelope_limit(m: usize, n: usize) -> Option<usize> {
    let (a, b) = (m.min(n), m.max(n));
    ENVELOPE.iter().find(|e| e.m == a && e.n == b).map(|e| e.k_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative tolerance for algebraic identities.
    pub identity: f64,
    /// A sweep converges when `final gap < convergence · initial gap`.
    pub convergence: f64,
    /// Allowed distance of fitted log-log slopes from −1.
    pub slope: f64,
    /// Moments must satisfy `relative gap ≤ moment_constant / k`.
    pub moment_constant: f64,
    /// Smallest `k` used in slope fits.
    pub fit_from: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-10,
            convergence: 0.05,
            slope: 0.2,
            moment_constant: 5.0,
            fit_from: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub q: f64,
    pub m: usize,
    pub n: usize,
    pub family: Family,
    pub k_max: usize,
    pub moments_up_to: usize,
    pub seed: u64,
    /// Target q-norms of `f_k` and `g_k` for q-normalized families.
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub tolerances: Tolerances,
    /// Random instances per identity-suite check.
    pub instances: usize,
    pub allow_same_parity: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            q: 0.5,
            m: 1,
            n: 2,
            family: Family::Orthsum,
            k_max: 32,
            moments_up_to: 6,
            seed: 0,
            sigma_x: 1.0,
            sigma_y: 1.0,
            tolerances: Tolerances::default(),
            instances: 50,
            allow_same_parity: false,
        }
    }
}

impl ExperimentConfig {
    /// Checks the configuration and returns warnings for runs outside the
    /// theorem hypotheses or the desk-scale envelope.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if !(-1.0..=1.0).contains(&self.q) {
            return bad(format!("q = {} must lie in [-1, 1]", self.q));
        }
        if self.m == 0 || self.n == 0 {
            return bad("m and n must be positive".into());
        }
        if self.k_max == 0 {
            return bad("k_max must be positive".into());
        }
        if self.moments_up_to % 2 == 1 || self.moments_up_to > 8 {
            return bad(format!("moments_up_to = {} must be even and at most 8", self.moments_up_to));
        }
        if !(self.sigma_x > 0.0 && self.sigma_y > 0.0) {
            return bad("sigma_x and sigma_y must be positive".into());
        }
        let t = &self.tolerances;
        if !(t.identity > 0.0 && t.convergence > 0.0 && t.slope > 0.0 && t.moment_constant > 0.0) {
            return bad("tolerances must be positive".into());
        }
        let mut warnings = Vec::new();
        if (self.m + self.n).is_multiple_of(2) {
            if !self.allow_same_parity {
                return bad(format!(
                    "m = {} and n = {} have the same parity; pass --allow-same-parity for a counter-demonstration",
                    self.m, self.n
                ));
            }
            warnings.push("same-parity degrees: the fourth moment decomposition does not apply".into());
        }
        if !self.q_in_theorem_range() {
            warnings.push(format!("q = {} is outside [0, 1); convergence results do not apply", self.q));
        }
        match envelope_limit(self.m, self.n) {
            Some(limit) if self.k_max > limit => warnings.push(format!(
                "k_max = {} exceeds the desk-scale envelope {limit} for (m, n) = ({}, {})",
                self.k_max, self.m, self.n
            )),
            None => warnings.push(format!("(m, n) = ({}, {}) is outside the desk-scale envelope", self.m, self.n)),
            _ => {}
        }
        Ok(warnings)
    }

    pub fn q_in_theorem_range(&self) -> bool {
        (0.0..1.0).contains(&self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_and_quiet() {
        assert!(ExperimentConfig::default().validate().unwrap().is_empty());
    }

    #[test]
    fn parity_gate() {
        let cfg = ExperimentConfig { m: 2, n: 2, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig { allow_same_parity: true, ..cfg };
        assert!(!cfg.validate().unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_values() {
        for cfg in [
            ExperimentConfig { q: 1.5, ..Default::default() },
            ExperimentConfig { m: 0, ..Default::default() },
            ExperimentConfig { moments_up_to: 5, ..Default::default() },
            ExperimentConfig { moments_up_to: 10, ..Default::default() },
            ExperimentConfig { k_max: 0, ..Default::default() },
        ] {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn warnings_for_q_and_envelope() {
        let w = ExperimentConfig { q: 1.0, ..Default::default() }.validate().unwrap();
        assert!(w.iter().any(|s| s.contains("outside [0, 1)")));
        let w = ExperimentConfig { m: 2, n: 3, k_max: 13, ..Default::default() }.validate().unwrap();
        assert!(w.iter().any(|s| s.contains("envelope")));
        assert_eq!(envelope_limit(3, 2), Some(12));
    }
}
