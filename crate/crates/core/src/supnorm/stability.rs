//! Density-doubling scans for the checks whose constants are unspecified:
//! each suite runs at a base density and at twice that density, and the
//! fitted constants must move by less than [`STABILITY_TOL`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{bergman_trivial_scan, fd_grid, fitted_drift, region_scan, verify_prop_method1, verify_prop_method2, Regime};
use crate::error::Result;
use crate::modgroup::{GroupElement, Subgroup};
use crate::multiplier::MultiplierSystem;
use crate::report::ScanReport;

/// Largest accepted relative change of a fitted constant.
pub const STABILITY_TOL: f64 = 0.05;

/// One suite evaluated at two densities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityCheck {
    pub suite: String,
    pub density: usize,
    pub coarse: ScanReport,
    pub fine: ScanReport,
    /// Relative change of each fitted constant.
    pub drift: BTreeMap<String, f64>,
}

impl StabilityCheck {
    fn run(suite: &str, density: usize, scan: impl Fn(usize) -> Result<ScanReport>) -> Result<Self> {
        let coarse = scan(density)?;
        let fine = scan(2 * density)?;
        let drift = fitted_drift(&coarse, &fine);
        Ok(Self { suite: suite.into(), density, coarse, fine, drift })
    }

    pub fn max_drift(&self) -> f64 {
        self.drift.values().copied().fold(0.0, f64::max)
    }

    /// Both scans passed and every constant moved by less than the tolerance.
    pub fn passed(&self) -> bool {
        self.coarse.passed && self.fine.passed && !self.drift.is_empty() && self.drift.values().all(|d| *d < STABILITY_TOL)
    }
}

fn full(k: f64) -> Result<MultiplierSystem> {
    MultiplierSystem::trivial(k, Subgroup::full())
}

/// Heights `y0, y0 + 1/d, ...` up to `y0 + span` on the line `x = 0`.
fn height_line(y0: f64, span: f64, d: usize) -> Vec<Complex64> {
    (0..=(span as usize) * d).map(|i| Complex64::new(0.0, y0 + i as f64 / d as f64)).collect()
}

/// Kernel method on `F_I` for `k` in {12, 24, 48} with `eta = 1/4`, heights up to 3.
pub fn method2_stability() -> Result<StabilityCheck> {
    StabilityCheck::run("method2", 4, |d| {
        let grid = fd_grid(d, 3f64.sqrt() / 2.0, 3.0);
        let parts = [12.0, 24.0, 48.0]
            .iter()
            .map(|&k| verify_prop_method2(&full(k)?, &GroupElement::identity(), &grid, 0.25))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScanReport::merge("method2", parts))
    })
}

/// Fourier method for `k` in {24, 36}: heights 1 to 10 in the low regime,
/// and ten units above `3 k / pi` in the large regime.
pub fn method1_stability(regime: Regime) -> Result<StabilityCheck> {
    StabilityCheck::run(regime.name(), 2, |d| {
        let parts = [24.0, 36.0]
            .iter()
            .map(|&k| {
                let grid = match regime {
                    Regime::Low => height_line(1.0, 9.0, d),
                    Regime::Large => height_line(3.0 * k / PI, 10.0, d),
                };
                verify_prop_method1(&full(k)?, &GroupElement::identity(), &grid, regime, 0.0, 2000)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScanReport::merge(regime.name(), parts))
    })
}

/// The crude majorant for `k` in {6, 12, 24, 48} on `|x| <= 1/2`, `y` in `[1, 50]`
/// (geometric in `y`).
pub fn bergman_trivial_stability() -> Result<StabilityCheck> {
    StabilityCheck::run("bergman_trivial", 2, |d| {
        let grid: Vec<Complex64> = (0..=d)
            .flat_map(|j| {
                let x = -0.5 + j as f64 / d as f64;
                (0..=6 * d).map(move |i| Complex64::new(x, 50f64.powf(i as f64 / (6 * d) as f64)))
            })
            .collect();
        bergman_trivial_scan(&[6.0, 12.0, 24.0, 48.0], &grid, 1e-4)
    })
}

/// Region envelopes on the lattice `k` even in `[20, 80]`, `m` in `[1, 17]`
/// (`n = 1`, `kappa = 0`). Density 1 takes every second `k` and `m`.
pub fn region_stability() -> Result<StabilityCheck> {
    StabilityCheck::run("regions", 1, |d| {
        let ks: Vec<f64> = (20..=80).step_by(4 / d).map(f64::from).collect();
        let ms: Vec<f64> = (1..=17).step_by(2 / d).map(f64::from).collect();
        region_scan(&ks, &ms, 20_000)
    })
}

/// All density-doubling suites.
pub fn stability_suite() -> Result<Vec<StabilityCheck>> {
    Ok(vec![
        method2_stability()?,
        method1_stability(Regime::Low)?,
        method1_stability(Regime::Large)?,
        bergman_trivial_stability()?,
        region_stability()?,
    ])
}
