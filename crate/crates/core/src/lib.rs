//! Numerical calculus on finite-dimensional q-deformed Fock spaces.
//!
//! Kernels are dense coefficient tensors over an orthonormal basis `e_1..e_N`
//! of the one-particle space. On top of that the crate provides
//!
//! * [`qcomb`]: permutations, inversion counts, shuffles, pair partitions
//!   and q-integers;
//! * [`tensor`]: the undeformed calculus (adjoint, permutation action,
//!   inner product, contraction `f ⌢^k g`);
//! * [`fock`]: the q-symmetrizer `P_q`, the shuffle operators `R_{k,m}`, the
//!   q-inner product, q-contractions and products of finite chaos expansions;
//! * [`moments`]: fourth cumulants and their polarization decompositions, and
//!   closed-form moment oracles (semicircle, mixed Q-Gaussian).
//!
//! Everything is exact up to floating point: no sampling and no quadrature.

pub mod error;
pub mod fock;
pub mod moments;
pub mod qcomb;
pub mod random;
pub mod tensor;

pub use error::{Error, Result};
pub use fock::{ChaosPoly, QContext};
pub use moments::{FourthMomentReport, QGaussianSpec};
pub use num_complex::Complex64;
pub use qcomb::{PairPartition, Permutation, QScalar};
pub use tensor::{QKernel, SymmetryClass};
