use num_complex::Complex64;

use super::phase::{from_turns, reduce_turns};
use crate::error::{Error, Result};
use crate::modgroup::GroupElement;
use crate::numerics::principal_arg;

/// Probe points for z-independence checks.
pub const PROBES: [Complex64; 2] = [Complex64::new(0.0, 1.0), Complex64::new(0.5, 2.0)];

/// Integer `w` with `arg j(t, gz) + arg j(g, z) - arg j(tg, z) = 2 pi w`.
fn winding_at(t: &GroupElement, g: &GroupElement, z: Complex64) -> Result<i64> {
    let s = principal_arg(t.j(g.act(z))) + principal_arg(g.j(z)) - principal_arg((*t * *g).j(z));
    let w = s / std::f64::consts::TAU;
    let r = w.round();
    if (w - r).abs() > 1e-6 {
        return Err(Error::Consistency(format!("non-integral winding {w} for sigma({t}, {g})")));
    }
    Ok(r as i64)
}

/// The branch winding of the sigma cocycle, checked at both probe points.
pub fn sigma_winding(t: &GroupElement, g: &GroupElement) -> Result<i64> {
    let w0 = winding_at(t, g, PROBES[0])?;
    let w1 = winding_at(t, g, PROBES[1])?;
    if w0 != w1 {
        return Err(Error::Consistency(format!(
            "sigma({t}, {g}) depends on z: windings {w0} and {w1}"
        )));
    }
    Ok(w0)
}

/// `sigma(t, g)` in turns, `k w mod 1`.
pub fn sigma_turns(t: &GroupElement, g: &GroupElement, k: f64) -> Result<f64> {
    let w = sigma_winding(t, g)?;
    if w == 0 {
        return Ok(0.0);
    }
    Ok(reduce_turns(k * w as f64))
}

/// `sigma(t, g) = j(t, gz)^k j(g, z)^k / j(tg, z)^k` with principal powers.
pub fn sigma(t: &GroupElement, g: &GroupElement, k: f64) -> Result<Complex64> {
    Ok(from_turns(sigma_turns(t, g, k)?))
}
