use num_complex::Complex64;

use super::element::{complete_bottom_row, gcd, GroupElement};
use crate::error::{Error, Result};

/// Default cap on the number of elements a ball enumeration may produce.
pub const DEFAULT_BALL_BUDGET: usize = 5_000_000;

/// All `g` with `|j(g, z)| <= radius`, one per signed coprime bottom row
/// `(c, d)`, with the top row chosen so that `Re(g z) - Re z` lies in
/// `[-1/2, 1/2)`. Other left translates `U^b g` share the bottom row.
pub fn ball(z: Complex64, radius: f64) -> Result<Vec<GroupElement>> {
    ball_with_budget(z, radius, DEFAULT_BALL_BUDGET)
}

pub fn ball_with_budget(z: Complex64, radius: f64, budget: usize) -> Result<Vec<GroupElement>> {
    let mut out = Vec::new();
    for_each_bottom_row(z, 0.0, radius, |c, d| {
        if out.len() + 2 > budget {
            return Err(Error::Resource(format!("ball of radius {radius} exceeds the element budget {budget}")));
        }
        let g = centred_completion(c, d, z);
        out.push(g);
        out.push(-g);
        Ok(())
    })?;
    Ok(out)
}

/// Completes `(c, d)` (with `c > 0`, or `c == 0, d == 1`) and shifts by a power
/// of `U` so that `Re(g z) - Re z` lies in `[-1/2, 1/2)`.
pub(crate) fn centred_completion(c: i64, d: i64, z: Complex64) -> GroupElement {
    let g = complete_bottom_row(c, d).expect("coprime bottom row");
    let shift = (g.act(z).re - z.re + 0.5).floor() as i64;
    GroupElement::u(-shift) * g
}

/// Visits each coprime `(c, d)` with `c > 0` or `(c, d) = (0, 1)` and
/// `r_min < |cz + d| <= r_max`. Only one of each `+-` pair is visited.
pub(crate) fn for_each_bottom_row(
    z: Complex64,
    r_min: f64,
    r_max: f64,
    mut visit: impl FnMut(i64, i64) -> Result<()>,
) -> Result<()> {
    if r_min < 1.0 && 1.0 <= r_max {
        visit(0, 1)?;
    }
    let (x, y) = (z.re, z.im);
    let c_max = (r_max / y).floor() as i64;
    for c in 1..=c_max {
        let cf = c as f64;
        let h2 = r_max * r_max - cf * cf * y * y;
        if h2 < 0.0 {
            continue;
        }
        let h = h2.sqrt();
        let lo = (-cf * x - h).ceil() as i64;
        let hi = (-cf * x + h).floor() as i64;
        for d in lo..=hi {
            if gcd(c, d) != 1 {
                continue;
            }
            let r = ((cf * x + d as f64).powi(2) + cf * cf * y * y).sqrt();
            if r > r_min && r <= r_max {
                visit(c, d)?;
            }
        }
    }
    Ok(())
}

/// Upper bound for `sum |cz + d|^{-s}` over all nonzero lattice points
/// `(c, d)` with `|cz + d| > radius`, by comparison with an integral. Requires
/// `s > 2`; returns infinity when the radius is too small for the estimate.
pub fn lattice_tail_bound(z: Complex64, radius: f64, s: f64) -> f64 {
    let diam = 1.0 + z.norm();
    let r = radius - 2.0 * diam;
    if r <= 0.0 || s <= 2.0 {
        return f64::INFINITY;
    }
    2.0 * std::f64::consts::PI / z.im * (r.powf(2.0 - s) / (s - 2.0) + diam * r.powf(1.0 - s) / (s - 1.0))
}
