use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::reference::bessel_ref_log;
use super::regime::Thresholds;
use super::{bessel_j_log, BesselKind};
use crate::error::{domain, Result};
use crate::numerics::ln_gamma;
use crate::report::{BoundCheck, ScanReport, ScanRow};

/// How arguments are sampled inside each regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XRule {
    /// Samples per regime and order.
    pub points: usize,
    /// Allowed growth of a max ratio from the lower to the upper half of the
    /// order grid.
    pub slack: f64,
    pub thresholds: Thresholds,
}

impl Default for XRule {
    fn default() -> Self {
        Self { points: 16, slack: 1.25, thresholds: Thresholds::default() }
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

fn row(c: BoundCheck, rho: f64, x: f64) -> ScanRow {
    ScanRow::from_check(&c, rho, 0.0, x)
}

fn abs_j(rho: f64, x: f64) -> Result<f64> {
    Ok(bessel_j_log(rho, x)?.abs().to_f64())
}

/// All bound rows for one order `rho >= 1`.
fn rows_for_order(rho: f64, rule: &XRule) -> Result<Vec<ScanRow>> {
    let th = rule.thresholds;
    let n = rule.points.max(2);
    let r3 = rho.cbrt();
    let mut out = Vec::new();

    // rho >= 2 x^2: |J| against (x/2)^rho / Gamma(rho+1), compared in logs.
    let x_hi = (rho / 2.0).sqrt();
    for x in logspace(1e-2 * x_hi, x_hi, n) {
        let j = bessel_j_log(rho, x)?;
        let env = rho * (0.5 * x).ln() - ln_gamma(rho + 1.0);
        out.push(row(BoundCheck::from_ln("verysmall", j.ln_abs(), env), rho, x));
    }

    let lo = x_hi;
    let edge = th.decay_edge(rho);
    if edge > lo {
        for x in linspace(lo, edge, n) {
            let env = rho.powf(-4.0 / 3.0);
            out.push(row(BoundCheck::new("small", abs_j(rho, x)?, env), rho, x));
        }
    }
    let gap_hi = rho - th.c * r3;
    if gap_hi > edge.max(lo) {
        for x in linspace(edge.max(lo), gap_hi, n) {
            out.push(row(BoundCheck::new("gap", abs_j(rho, x)?, rho.powf(-1.0 / 3.0)), rho, x));
        }
    }
    for x in linspace((rho - th.c * r3).max(lo), rho + th.c * r3, n) {
        out.push(row(BoundCheck::new("med", abs_j(rho, x)?, rho.powf(-1.0 / 3.0)), rho, x));
    }
    // Oscillatory band: x = rho + C rho^a with a between 1/3 and alpha, bounded
    // by rho^{-(a+1)/4}.
    if th.alpha > 1.0 / 3.0 && rho > 1.0 {
        for a in linspace(1.0 / 3.0, th.alpha, n) {
            let x = rho + th.c * rho.powf(a);
            let env = rho.powf(-(a + 1.0) / 4.0);
            out.push(row(BoundCheck::new("large", abs_j(rho, x)?, env).with("a", a), rho, x));
        }
    }
    let far = rho + th.c * rho.powf(th.alpha);
    for x in logspace(far, 4.0 * far, n) {
        let env = rho.powf(-(th.alpha + 1.0) / 4.0);
        out.push(row(BoundCheck::new("farlarge", abs_j(rho, x)?, env), rho, x));
    }
    Ok(out)
}

/// Fixed-order decay `x^{-1/2}` for J and Y, `x^{-1/2} e^{-x}` for K, at
/// order one third on `x in [1, 1000]`.
fn fixed_order_rows(points: usize) -> Result<Vec<ScanRow>> {
    let rho = 1.0 / 3.0;
    let xs = logspace(1.0, 1000.0, points.max(2) * 8);
    let per_x: Vec<Result<Vec<ScanRow>>> = xs
        .par_iter()
        .map(|&x| {
            let j = bessel_j_log(rho, x)?.abs().ln_abs();
            let y = bessel_ref_log(BesselKind::Y, rho, x)?.abs().ln_abs();
            let k = bessel_ref_log(BesselKind::K, rho, x)?.abs().ln_abs();
            let env = -0.5 * x.ln();
            Ok(vec![
                row(BoundCheck::from_ln("besselslarge_j", j, env), rho, x),
                row(BoundCheck::from_ln("besselslarge_y", y, env), rho, x),
                row(BoundCheck::from_ln("besselslarge_k", k, env - x), rho, x),
            ])
        })
        .collect();
    let mut out = Vec::new();
    for r in per_x {
        out.extend(r?);
    }
    Ok(out)
}

/// Max ratio per bound name over the given orders.
fn max_by_name(rows: &[ScanRow], keep: impl Fn(f64) -> bool) -> std::collections::BTreeMap<String, f64> {
    let mut m = std::collections::BTreeMap::new();
    for r in rows.iter().filter(|r| keep(r.k)) {
        let e = m.entry(r.name.clone()).or_insert(f64::NEG_INFINITY);
        *e = f64::max(*e, r.ratio);
    }
    m
}

/// Scans every regime bound over `rho_grid` and reports max ratios. The
/// report passes when all ratios are finite and no max ratio grows by more
/// than `rule.slack` from the lower half of the grid to the upper half.
pub fn certify_regime_bounds(rho_grid: &[f64], rule: &XRule) -> Result<ScanReport> {
    if rho_grid.is_empty() {
        return domain("certify_regime_bounds needs a nonempty order grid");
    }
    if rho_grid.iter().any(|r| !(*r >= 1.0) || !r.is_finite()) {
        return domain("regime bounds are stated for orders rho >= 1");
    }
    let mut grid = rho_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let per_rho: Vec<Result<Vec<ScanRow>>> = grid.par_iter().map(|&r| rows_for_order(r, rule)).collect();
    let mut rows = Vec::new();
    for r in per_rho {
        rows.extend(r?);
    }
    rows.extend(fixed_order_rows(rule.points)?);
    let mut report = ScanReport::new("bessel", rows);

    if grid.len() >= 2 {
        let split = grid[grid.len() / 2 - 1];
        let lower = max_by_name(&report.rows, |k| k >= 1.0 && k <= split);
        let upper = max_by_name(&report.rows, |k| k > split);
        for (name, hi) in &upper {
            if let Some(lo) = lower.get(name) {
                if *hi > rule.slack * lo {
                    report.fail(format!(
                        "{name}: max ratio grows from {lo:.6e} to {hi:.6e} across the order grid"
                    ));
                }
            }
        }
    }
    if !report.passed && report.notes.is_empty() {
        report.note("non-finite ratio in scan");
    }
    Ok(report)
}
