use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::phase::{from_turns, reduce_turns, to_turns, turn_distance};
use super::sigma::PROBES;
use super::system::MultiplierSystem;
use crate::error::{Error, Result};
use crate::modgroup::{Cusp, CuspPoint, GroupElement};
use crate::numerics::principal_pow;

/// Probe-point agreement tolerance (in turns).
const PROBE_TOL: f64 = 1e-10;

/// `nu^t(g', z) / j(g', z)^k` evaluated from the definition
/// `nu^t(g', z) = nu(g, t z) j(t, z)^k / j(t, g' z)^k` with `g = t g' t^{-1}`.
fn conjugate_at(sys: &MultiplierSystem, t: &GroupElement, gp: &GroupElement, z: Complex64) -> Result<f64> {
    let k = sys.weight();
    let g = t.conjugate(gp);
    let nu = sys.nu(&g, t.act(z))?;
    let val = nu * principal_pow(t.j(z), k)? / principal_pow(t.j(gp.act(z)), k)? / principal_pow(gp.j(z), k)?;
    Ok(to_turns(val))
}

/// The multiplier of the conjugate system at `g'`, in turns, from the
/// definition of `nu^t`; independence of `z` is checked at two probe points.
pub fn conjugate_upsilon_turns(sys: &MultiplierSystem, t: &GroupElement, gp: &GroupElement) -> Result<f64> {
    let g = t.conjugate(gp);
    if !sys.group().contains(&g) {
        return Err(Error::Membership {
            element: format!("{t} {gp} {t}^-1"),
            group: sys.group().to_string(),
        });
    }
    let a = conjugate_at(sys, t, gp, PROBES[0])?;
    let b = conjugate_at(sys, t, gp, PROBES[1])?;
    if turn_distance(a, b) > PROBE_TOL {
        return Err(Error::Consistency(format!(
            "conjugate multiplier of {sys} by {t} at {gp} depends on z ({a} vs {b} turns)"
        )));
    }
    Ok(a)
}

pub fn conjugate_upsilon(sys: &MultiplierSystem, t: &GroupElement, gp: &GroupElement) -> Result<Complex64> {
    Ok(from_turns(conjugate_upsilon_turns(sys, t, gp)?))
}

/// Cusp parameter and decay floor at one cusp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspParameterData {
    pub cusp: Cusp,
    /// In `[0, 1)`.
    pub kappa: f64,
    /// `kappa` if positive, else 1.
    pub eta_floor: f64,
}

/// Phases within this distance of a whole turn are snapped to 0.
const KAPPA_SNAP: f64 = 1e-10;

/// `kappa` with `e^{2 pi i kappa} = v^t(U^n)` for the cusp's scaling matrix
/// `t` and width `n`. The value from the cocycle formula is cross-checked
/// against the definition of the conjugate factor.
pub fn cusp_parameter(sys: &MultiplierSystem, cusp: &Cusp) -> Result<CuspParameterData> {
    let t = cusp.scaling;
    let un = GroupElement::u(cusp.width as i64);
    let conj = sys.conjugate(&t);
    let by_cocycle = conj.upsilon_turns(&un)?;
    let by_definition = conjugate_upsilon_turns(sys, &t, &un)?;
    if turn_distance(by_cocycle, by_definition) > PROBE_TOL {
        return Err(Error::Consistency(format!(
            "cusp parameter routes disagree at {}: {by_cocycle} vs {by_definition}",
            cusp.representative
        )));
    }
    let mut kappa = reduce_turns(by_cocycle);
    if kappa < KAPPA_SNAP || 1.0 - kappa < KAPPA_SNAP {
        kappa = 0.0;
    }
    let eta_floor = if kappa > 0.0 { kappa } else { 1.0 };
    Ok(CuspParameterData { cusp: cusp.clone(), kappa, eta_floor })
}

/// Cusp data at the cusp `t inf` with `t` itself as scaling matrix.
pub fn cusp_parameter_at(sys: &MultiplierSystem, t: &GroupElement) -> Result<CuspParameterData> {
    let representative = if t.c == 0 {
        CuspPoint::Infinity
    } else {
        let s = if t.c < 0 { -1 } else { 1 };
        CuspPoint::Rational { p: s * t.a, q: s * t.c }
    };
    let cusp = Cusp { representative, scaling: *t, width: sys.group().width_of(t) };
    cusp_parameter(sys, &cusp)
}

/// Cusp data for every cusp of the system's group.
pub fn cusp_data(sys: &MultiplierSystem) -> Result<Vec<CuspParameterData>> {
    sys.group().cusps().iter().map(|c| cusp_parameter(sys, c)).collect()
}
