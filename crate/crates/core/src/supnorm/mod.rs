//! Verifiers for the chain of sup-norm bounds: the sums `S(alpha, beta, eta)`
//! and their lemmas, the envelope of the coefficient square sums, the two
//! pointwise methods, and the scaling scans in the weight.
//!
//! Explicit inequalities are checked with ratio at most 1. Bounds with
//! unspecified constants are checked as scans whose maximal ratio (the
//! fitted constant) is finite and stable under grid refinement.

mod aenv;
mod props;
mod ssum;
mod stability;
mod theorems;

#[cfg(test)]
mod tests;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use aenv::{
    a_coefficient, a_envelope, aest_scan, ln_abs_a, ln_aest_envelope, ln_region_envelopes, region_bounds, region_checks, region_of,
    region_ranges, region_scan, AEnvelope, RegionRange, MIN_ENVELOPE_WEIGHT, REGION_ALPHA,
};
pub use props::{
    bergman_trivial_scan, bergman_trivial_sum, method1_chain, verify_prop_method1, verify_prop_method2, Method1Chain,
    Regime, TrivialSum,
};
pub use ssum::{
    check_expdecay, check_lemma_bounds, lemma_sample, lemma_suite, ln_s_sum, ln_sabest_general, ln_sabest_tail, s_sum,
    LemmaChecks, SumSpec, LEMMA_SLACK,
};
pub use stability::{
    bergman_trivial_stability, method1_stability, method2_stability, region_stability, stability_suite, StabilityCheck,
    STABILITY_TOL,
};
pub use theorems::{
    theorem12_report, theorem3_lower_bound, theorem3_scan, LowerBound, Theorem3Config, THEOREM2_EPSILON,
};

use crate::error::Result;
use crate::modgroup::{GroupElement, Subgroup};
use crate::multiplier::{cusp_data, cusp_parameter_at, MultiplierSystem};
use crate::report::{BoundCheck, ScanReport, ScanRow};

/// Width, parameter and decay floor of the cusp `tau inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspInfo {
    pub width: u64,
    pub kappa: f64,
    /// `kappa` if positive, else 1.
    pub eta: f64,
}

pub fn cusp_at(sys: &MultiplierSystem, tau: &GroupElement) -> Result<CuspInfo> {
    let d = cusp_parameter_at(sys, tau)?;
    Ok(CuspInfo { width: d.cusp.width, kappa: d.kappa, eta: d.eta_floor })
}

/// `(max n_tau, min eta_tau)` over all cusps.
pub fn cusp_extremes(sys: &MultiplierSystem) -> Result<(u64, f64)> {
    let data = cusp_data(sys)?;
    let n = data.iter().map(|d| d.cusp.width).max().unwrap_or(1);
    let eta = data.iter().map(|d| d.eta_floor).fold(f64::INFINITY, f64::min);
    Ok((n, eta))
}

/// Grid on the standard fundamental domain with `density` points per unit
/// length in `x` and `y`: `x` from -1/2 to 1/2, `y` from `y_min` to `y_max`,
/// dropping points inside the unit circle and adding the arc points.
pub fn fd_grid(density: usize, y_min: f64, y_max: f64) -> Vec<Complex64> {
    let density = density.max(1);
    let h = 1.0 / density as f64;
    let mut out = Vec::new();
    for j in 0..=density {
        let x = -0.5 + j as f64 * h;
        let arc = (1.0 - x * x).sqrt();
        if arc >= y_min && arc <= y_max {
            out.push(Complex64::new(x, arc));
        }
        let mut i = 0;
        loop {
            let y = y_min + i as f64 * h;
            if y > y_max + 1e-12 {
                break;
            }
            if y > arc + 1e-12 {
                out.push(Complex64::new(x, y));
            }
            i += 1;
        }
    }
    out
}

/// Relative change of each fitted constant between two reports.
pub fn fitted_drift(coarse: &ScanReport, fine: &ScanReport) -> BTreeMap<String, f64> {
    coarse
        .fitted
        .iter()
        .map(|(name, &a)| {
            let b = fine.max_ratio(name);
            (name.clone(), ((b - a) / a).abs())
        })
        .collect()
}

/// `n_tau <= [SL2(Z) : G]` for every cusp of every group.
pub fn width_within_index(groups: &[Subgroup]) -> ScanReport {
    let mut rows = Vec::new();
    for g in groups {
        let mu = g.index() as f64;
        for (i, c) in g.cusps().iter().enumerate() {
            let check = BoundCheck::new("width_index", c.width as f64, mu);
            rows.push(ScanRow::from_check(&check, 0.0, mu, i as f64));
        }
    }
    let mut r = ScanReport::new("width_index", rows);
    if r.rows.iter().any(|row| row.ratio > 1.0) {
        r.fail("a cusp width exceeds the index");
    }
    r
}
