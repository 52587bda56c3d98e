//! Experiment harness for the q-Wigner chaos library: kernel families,
//! identity suites, convergence sweeps and oracle tables.

pub mod config;
pub mod error;
pub mod family;
pub mod oracle;
pub mod suite;
pub mod svg;
pub mod sweep;

pub use config::{ExperimentConfig, Family, Tolerances};
pub use error::{HarnessError, Result};
pub use family::{make_orthsum_family, Normalization};
pub use sweep::{run_convergence_sweep, SweepReport, SweepRow};
pub use suite::{run_identity_suite, CheckResult, CheckTag, Status, SuiteReport};
pub use oracle::{print_oracle, OracleTable};
pub use svg::sweep_svg;
