//! Generalized Kloosterman sums, Poincare series and their Fourier
//! coefficients, and the coefficient square sums they produce.

mod kloosterman;
mod poincare;

pub use kloosterman::{classical_kloosterman, kloosterman, KloostermanContext, KloostermanSpec};
pub use poincare::{
    coeff_square_sum, delta_tau, poincare_coeff, poincare_fourier, poincare_series, CoeffSquareSum, PoincareCase, PoincareCoefficient,
};

#[cfg(test)]
mod tests;
