//! Numerical laboratory for holomorphic cusp forms of real weight on finite
//! index subgroups of SL2(Z).
//!
//! The crate is layered bottom-up:
//!
//! * [`numerics`]: principal-branch powers, log-scale reals, quadrature over
//!   the standard fundamental domain.
//! * [`bessel`]: J, Y, I, K of real order with regime dispatch and bound
//!   certification.
//! * [`modgroup`]: SL2(Z) elements, congruence subgroups, cosets, cusps.
//! * [`multiplier`]: multiplier systems of real weight and the sigma cocycle.
//! * [`forms`]: eta-product cusp forms, Petersson products, orthonormal bases.
//! * [`spectral`]: generalized Kloosterman sums and Poincare coefficients.
//! * [`bergman`]: the Bergman kernel and its diagonal.
//! * [`supnorm`]: verifiers for the sup-norm bound chain.

pub mod bergman;
pub mod bessel;
pub mod error;
pub mod forms;
pub mod modgroup;
pub mod multiplier;
pub mod numerics;
pub mod report;
pub mod spectral;
pub mod supnorm;

pub use error::{Error, Result};
pub use num_complex::Complex64;
