//! Fourth cumulants, their polarization decompositions for sums of two
//! chaoses, and closed-form moment oracles used as independent ground truth.

mod cumulants;
mod oracle;

pub use cumulants::{
    alpha, classical_c4, contraction_kappa4_identity, contraction_norms, cross_term_bounds,
    free_kappa4, kappa4_polarization_residual, q_fourth_moment_decomposition, real_part,
    shuffle_bridge, theorem_target, CrossTermBounds, FourthMomentReport, PolarizationReport,
    ShuffleBridgeTerm, REAL_TOLERANCE,
};
pub use oracle::{
    mixed_q_gaussian_moment, mixed_q_gaussian_moment_capped, semicircle_moment, QGaussianSpec,
    DEFAULT_ORACLE_CAP,
};
