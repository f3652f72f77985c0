//! Y and K from their defining combinations of signed-order series. Slow and
//! only accurate for moderate arguments; used to cross-check the integrals.

use std::f64::consts::PI;

use super::series::{series_converged, SeriesKind};
use super::BesselKind;
use crate::error::{domain, Result};
use crate::numerics::sin_pi;

/// Offset used to step around the removable singularity at integer orders.
pub const POLE_OFFSET: f64 = 1e-6;

fn combination(kind: BesselKind, rho: f64, x: f64) -> f64 {
    let s = sin_pi(rho);
    match kind {
        BesselKind::Y => {
            let jp = series_converged(SeriesKind::J, rho, x, 1e-17);
            let jm = series_converged(SeriesKind::J, -rho, x, 1e-17);
            (jp.to_f64() * sin_pi(rho + 0.5) - jm.to_f64()) / s
        }
        BesselKind::K => {
            let ip = series_converged(SeriesKind::I, rho, x, 1e-17);
            let im = series_converged(SeriesKind::I, -rho, x, 1e-17);
            0.5 * PI * im.sub(ip).to_f64() / s
        }
        _ => unreachable!(),
    }
}

/// `Y_rho(x)` or `K_rho(x)` from the defining formulas, averaging
/// `rho +- POLE_OFFSET` when `sin(rho pi)` vanishes.
pub fn bessel_definitional(kind: BesselKind, rho: f64, x: f64) -> Result<f64> {
    if !matches!(kind, BesselKind::Y | BesselKind::K) {
        return domain("definitional route covers Y and K only");
    }
    if !(x > 0.0) {
        return domain("Y and K have a pole at x = 0");
    }
    if sin_pi(rho).abs() < 1e-3 {
        let lo = combination(kind, rho - POLE_OFFSET, x);
        let hi = combination(kind, rho + POLE_OFFSET, x);
        return Ok(0.5 * (lo + hi));
    }
    Ok(combination(kind, rho, x))
}

