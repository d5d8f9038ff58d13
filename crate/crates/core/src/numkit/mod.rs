//! Quadrature rules, special functions and the tabulated Bessel integrals.

mod identities;
mod oscillatory;
mod quadrature;
mod special;

use thiserror::Error;

pub use identities::{
    gr_3876_1_check, gr_6677_6_check, identity_lattice, theta, IdentityCheck, LatticePoint,
    GR_3876_1_TOL, GR_6677_6_TOL,
};
pub use oscillatory::{euler_sum, integrate_oscillatory_tail, MonotonePhase};
pub use quadrature::{
    integrate_1d, integrate_semi_infinite, integrate_semi_infinite_with, Integrand,
    QuadratureRule, RuleKind, SemiInfinite, SemiInfiniteOptions,
};
pub use special::{bessel_j0, bessel_j1, erfi, BESSEL_SWITCH, ERFI_MAX_ARG};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integrand not finite at node {node}")]
    NonFinite { node: f64 },
    #[error("integrand does not decay: tail segment {tail:e} of total {total:e}")]
    NotDecaying { tail: f64, total: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
}
