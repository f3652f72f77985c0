use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::reference::bessel_ref;
use super::BesselKind;
use crate::error::{domain, Result};

/// Langer approximation of `J_rho(x)` together with its auxiliary variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LangerValue {
    pub value: f64,
    pub w: f64,
    pub z: f64,
}

/// `w - atan(w)`, accurate for small `w`.
fn w_minus_atan(w: f64) -> f64 {
    if w < 0.05 {
        let w2 = w * w;
        let mut term = w * w2;
        let mut s = 0.0;
        for n in 1..12 {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            s += sign * term / (2 * n + 1) as f64;
            term *= w2;
        }
        s
    } else {
        w - w.atan()
    }
}

/// `artanh(w) - w`, accurate for small `w`.
fn artanh_minus_w(w: f64) -> f64 {
    if w < 0.05 {
        let w2 = w * w;
        let mut term = w * w2;
        let mut s = 0.0;
        for n in 1..12 {
            s += term / (2 * n + 1) as f64;
            term *= w2;
        }
        s
    } else {
        w.atanh() - w
    }
}

/// Langer's uniform approximation. Valid for `rho >= 1`, `x != rho`.
pub fn bessel_langer(rho: f64, x: f64) -> Result<LangerValue> {
    if !(rho >= 1.0) || !rho.is_finite() {
        return domain(format!("Langer formula needs rho >= 1, got {rho}"));
    }
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("Langer formula needs x > 0, got {x}"));
    }
    if x == rho {
        return domain("Langer formula is singular at the turning point x = rho (w = 0)");
    }
    let third = 1.0 / 3.0;
    if x > rho {
        let w = ((x - rho) * (x + rho)).sqrt() / rho;
        let a = w_minus_atan(w);
        let z = rho * a;
        let j = bessel_ref(BesselKind::J, third, z)?;
        let y = bessel_ref(BesselKind::Y, third, z)?;
        let value = (a / w).sqrt() * (0.75f64.sqrt() * j - 0.5 * y);
        Ok(LangerValue { value, w, z })
    } else {
        let w = ((rho - x) * (rho + x)).sqrt() / rho;
        let a = artanh_minus_w(w);
        let z = rho * a;
        let k = bessel_ref(BesselKind::K, third, z)?;
        let value = (a / w).sqrt() * k / PI;
        Ok(LangerValue { value, w, z })
    }
}
