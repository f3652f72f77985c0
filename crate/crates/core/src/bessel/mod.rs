//! Bessel functions of real order and the regime bounds they satisfy.
//!
//! Evaluation paths:
//! - power series (log-scale, with a tail bound) when `rho >= 2 x^2`;
//! - Miller's backward recurrence elsewhere;
//! - integral representations as an independent reference;
//! - Langer's uniform approximation, kept for its error law.

mod certify;
mod definitional;
mod langer;
mod miller;
mod reference;
mod regime;
mod series;

use serde::{Deserialize, Serialize};

pub use certify::{certify_regime_bounds, XRule};
pub use definitional::{bessel_definitional, POLE_OFFSET};
pub use langer::{bessel_langer, LangerValue};
pub use reference::{bessel_ref, bessel_ref_log};
pub use regime::{classify, classify_with, BesselRegime, RegimeTag, Thresholds, C_PRIME, C_PRIME_CALIBRATION_RHO_MAX};
pub use series::{bessel_series, SeriesKind, SeriesValue};

use crate::error::{domain, Result};
use crate::numerics::LogScaleReal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BesselKind {
    J,
    Y,
    I,
    K,
}

impl std::str::FromStr for BesselKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "J" => Ok(Self::J),
            "Y" => Ok(Self::Y),
            "I" => Ok(Self::I),
            "K" => Ok(Self::K),
            other => Err(crate::Error::Parse(format!("unknown Bessel kind '{other}'"))),
        }
    }
}

fn check_args(rho: f64, x: f64) -> Result<()> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return domain(format!("order must be finite and non-negative, got {rho}"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("argument must be finite and non-negative, got {x}"));
    }
    Ok(())
}

/// `J_rho(x)` in log-scale, dispatched by regime.
pub fn bessel_j_log(rho: f64, x: f64) -> Result<LogScaleReal> {
    check_args(rho, x)?;
    if x == 0.0 {
        return Ok(if rho == 0.0 { LogScaleReal::ONE } else { LogScaleReal::ZERO });
    }
    if Thresholds::default().is_series_small(rho, x) {
        return Ok(series::series_converged(SeriesKind::J, rho, x, 1e-17));
    }
    Ok(miller::miller_j(rho, x))
}

/// `J_rho(x)`; underflows to zero for extremely small values.
pub fn bessel_j(rho: f64, x: f64) -> Result<f64> {
    Ok(bessel_j_log(rho, x)?.to_f64())
}

/// `I_rho(x)` in log-scale from its positive power series.
pub fn bessel_i_log(rho: f64, x: f64) -> Result<LogScaleReal> {
    check_args(rho, x)?;
    Ok(series::series_converged(SeriesKind::I, rho, x, 1e-17))
}
