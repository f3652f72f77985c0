//! Floating-point plumbing shared by the rest of the crate.

mod gauss;
mod logscale;
mod principal;
pub mod quadrature;
mod special;
mod sum;

pub use gauss::{adaptive_integrate, gauss_legendre, GaussRule};
pub use logscale::LogScaleReal;
pub use principal::{principal_arg, principal_log, principal_pow, principal_pow_parts, PrincipalComplex};
pub use quadrature::{integrate_fd, integrate_fd_vec, CuspDecay, FdDomain, QuadResult};
pub use special::{ln_gamma, ln_gamma_signed, sin_pi};
pub use sum::{pairwise_sum, pairwise_sum_complex};

/// Default absolute tolerance for quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
