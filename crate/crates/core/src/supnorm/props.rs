//! The two pointwise methods for `y^k sum_j |(f_j|tau)(z)|^2` and the crude
//! majorant of the kernel diagonal.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::aenv::{a_coefficient, ln_abs_a};
use super::cusp_at;
use super::ssum::{ln_s_sum, SumSpec};
use crate::bergman::basis_sum_diag;
use crate::error::{Error, Result};
use crate::modgroup::{complete_bottom_row, for_each_bottom_row, lattice_tail_bound, GroupElement};
use crate::multiplier::MultiplierSystem;
use crate::report::{BoundCheck, ScanReport, ScanRow};

/// Relative tolerance of the kernel diagonal inside the scans.
const DIAG_TOL: f64 = 1e-8;

/// The `m`-sum of the first Cauchy-Schwarz factor stops once terms fall
/// below this fraction of the largest one, past the peak.
const CHAIN_REL: f64 = 1e-18;

fn check_point(z: Complex64) -> Result<()> {
    if !(z.im > 0.0) || !z.re.is_finite() {
        return Err(Error::Domain(format!("grid point {z} is not in the upper half plane")));
    }
    Ok(())
}

/// Checks `y^k sum_j |(f_j|tau)(z)|^2 << mu k (1 + y / k^{1/2 - eta})` with
/// the left side from the kernel diagonal.
pub fn verify_prop_method2(sys: &MultiplierSystem, tau: &GroupElement, grid: &[Complex64], eta: f64) -> Result<ScanReport> {
    let k = sys.weight();
    if k < 6.0 {
        return Err(Error::Domain(format!("the kernel method is stated for k >= 6, got {k}")));
    }
    if !(eta > 0.0 && eta < 0.5) {
        return Err(Error::Domain(format!("eta must lie in (0, 1/2), got {eta}")));
    }
    let mu = sys.group().index() as f64;
    let rows: Vec<Result<ScanRow>> = grid
        .par_iter()
        .map(|&z| {
            check_point(z)?;
            let d = basis_sum_diag(sys, tau, z, DIAG_TOL)?;
            let y = z.im;
            let ln_lhs = k * y.ln() + d.value.ln();
            let ln_env = mu.ln() + k.ln() + (y / k.powf(0.5 - eta)).ln_1p();
            let c = BoundCheck::from_ln("method2", ln_lhs, ln_env);
            Ok(ScanRow::from_check(&c, k, y, z.re))
        })
        .collect();
    Ok(ScanReport::new("method2", rows.into_iter().collect::<Result<Vec<_>>>()?))
}

/// Which form of the Fourier method is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Low,
    Large,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Low => "method1low",
            Regime::Large => "method1large",
        }
    }
}

/// The Cauchy-Schwarz majorant
/// `(sum lambda_m^{-1} A(m) y^{k/2} e^{-2 pi (m+kappa) y/n}) (sum lambda_m y^{k/2} e^{-2 pi (m+kappa) y/n})`
/// with `lambda_m = (m + kappa)^{k/2 + delta}`, for `y` at least `y_min`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Method1Chain {
    pub k: f64,
    pub delta: f64,
    pub width: u64,
    pub kappa: f64,
    pub eta: f64,
    pub mu: f64,
    pub y_min: f64,
    /// `(m + kappa, ln A(m))` for the indices kept.
    pub coefficients: Vec<(f64, f64)>,
}

/// Computes `A(m)` for every index that can matter at heights `>= y_min`.
pub fn method1_chain(sys: &MultiplierSystem, tau: &GroupElement, delta: f64, y_min: f64, c_max: i64) -> Result<Method1Chain> {
    let k = sys.weight();
    if delta.abs() + 1.0 > k / 2.0 {
        return Err(Error::Domain(format!("the exponent shift needs |delta| + 1 <= k/2, got delta = {delta} at k = {k}")));
    }
    if !(y_min > 0.0) {
        return Err(Error::Domain(format!("heights must be positive, got {y_min}")));
    }
    let cusp = cusp_at(sys, tau)?;
    let n = cusp.width as f64;
    let rate = 2.0 * PI * y_min / n;
    // A(m) grows at most like (m + kappa)^k, so the terms peak before this.
    let peak = (k / 2.0 - delta).max(1.0) / rate;
    let m0 = if cusp.kappa > 0.0 { 0 } else { 1 };
    let mut coefficients = Vec::new();
    let mut top = f64::NEG_INFINITY;
    let mut m = m0;
    loop {
        let mk = m as f64 + cusp.kappa;
        let ln_a = ln_abs_a(&a_coefficient(sys, tau, m, c_max)?);
        let ln_t = ln_a - (k / 2.0 + delta) * mk.ln() - rate * mk;
        coefficients.push((mk, ln_a));
        top = top.max(ln_t);
        if mk > 2.0 * peak + 2.0 && (ln_t == f64::NEG_INFINITY || ln_t < top + CHAIN_REL.ln()) {
            break;
        }
        m += 1;
    }
    Ok(Method1Chain {
        k,
        delta,
        width: cusp.width,
        kappa: cusp.kappa,
        eta: cusp.eta,
        mu: sys.group().index() as f64,
        y_min,
        coefficients,
    })
}

impl Method1Chain {
    /// `ln` of the majorant at height `y`.
    pub fn ln_value(&self, y: f64) -> Result<f64> {
        if y < self.y_min {
            return Err(Error::Domain(format!("chain prepared for y >= {}, got {y}", self.y_min)));
        }
        let (k, d) = (self.k, self.delta);
        let rate = 2.0 * PI * y / self.width as f64;
        let lns: Vec<f64> = self
            .coefficients
            .iter()
            .map(|&(mk, ln_a)| ln_a - (k / 2.0 + d) * mk.ln() - rate * mk)
            .collect();
        let top = lns.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Ok(top);
        }
        let first = top + lns.iter().map(|t| (t - top).exp()).sum::<f64>().ln();
        let second = ln_s_sum(&SumSpec::new(k / 2.0 + d, rate, self.eta)?)?;
        Ok(k * y.ln() + first + second)
    }

    /// `ln` of the envelope of the given regime at height `y`.
    pub fn ln_envelope(&self, regime: Regime, y: f64) -> f64 {
        let (k, n, eta) = (self.k, self.width as f64, self.eta);
        let base = self.mu.ln() + n.ln() + 1.5 * k.ln() - y.ln();
        let first = match regime {
            Regime::Low => 2.0 * (y * k.powf(-0.5) / n).ln_1p(),
            Regime::Large => 2.0 * (k.sqrt() / eta * (-eta * PI * y / n).exp()).ln_1p(),
        };
        let last = (n * k.powf(-k / 2.0) + n / y * k.powf(-7.0 / 15.0)).ln_1p();
        base + first + last
    }

    /// Smallest height of the large regime, `3 n k / (eta pi)`.
    pub fn large_threshold(&self) -> f64 {
        3.0 * self.width as f64 * self.k / (self.eta * PI)
    }
}

/// Checks the Fourier-method envelope of `regime` on `grid`. The left side
/// is the Cauchy-Schwarz majorant (an upper bound for the basis sum) built
/// from `A(m)` and `S`; it depends on `y` only.
pub fn verify_prop_method1(
    sys: &MultiplierSystem,
    tau: &GroupElement,
    grid: &[Complex64],
    regime: Regime,
    delta: f64,
    c_max: i64,
) -> Result<ScanReport> {
    for &z in grid {
        check_point(z)?;
    }
    let y_min = grid.iter().map(|z| z.im).fold(f64::INFINITY, f64::min);
    if grid.is_empty() {
        return Ok(ScanReport::new(regime.name(), vec![]));
    }
    let chain = method1_chain(sys, tau, delta, y_min, c_max)?;
    if regime == Regime::Large && y_min < chain.large_threshold() {
        return Err(Error::Domain(format!(
            "the large regime needs y >= 3 n k / (eta pi) = {}, got {y_min}",
            chain.large_threshold()
        )));
    }
    let rows: Vec<Result<ScanRow>> = grid
        .par_iter()
        .map(|&z| {
            let lhs = chain.ln_value(z.im)?;
            let c = BoundCheck::from_ln(regime.name(), lhs, chain.ln_envelope(regime, z.im)).with("delta", delta);
            Ok(ScanRow::from_check(&c, chain.k, z.im, z.re))
        })
        .collect();
    Ok(ScanReport::new(regime.name(), rows.into_iter().collect::<Result<Vec<_>>>()?))
}

/// The majorant `sum over SL2(Z)` of `(y y')^{k/2} / (((x-x')/2)^2 + ((y+y')/2)^2)^{k/2}`
/// with `x' + i y' = g z`, and a bound for the omitted terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrivialSum {
    pub value: f64,
    pub tail_bound: f64,
    pub radius: f64,
}

/// `sum_b (y y'')^{k/2} / (((u-b)/2)^2 + q^2)^{k/2}` over all integers `b`
/// and a bound for the terms left out, which lie at `|u - b| >= B`.
fn translate_sum(yy: f64, u: f64, q: f64, k: f64, rel: f64) -> (f64, f64) {
    let term = |t: f64| (yy / (t * t / 4.0 + q * q)).powf(k / 2.0);
    let b0 = u.round();
    let mut sum = term(u - b0);
    let mut j = 1.0;
    loop {
        sum += term(u - (b0 + j)) + term(u - (b0 - j));
        // Every omitted |u - b| is at least j + 1/2.
        let big_b = j + 0.5;
        let tail = 2.0 * yy.powf(k / 2.0) * 2f64.powf(k) * ((big_b - 1.0).max(0.5)).powf(1.0 - k) / (k - 1.0);
        if big_b > 2.0 * q && tail <= rel * sum {
            return (sum, tail);
        }
        j += 1.0;
    }
}

/// Evaluates the majorant to relative accuracy `tol` for `k > 2`.
pub fn bergman_trivial_sum(z: Complex64, k: f64, tol: f64) -> Result<TrivialSum> {
    check_point(z)?;
    if k <= 2.0 {
        return Err(Error::Domain(format!("the majorant converges for k > 2, got {k}")));
    }
    let y = z.im;
    // Row sums for |cz + d| = r are at most 2^k r^{-k} (4y + 3 + 2y/(k-1)),
    // counting both signs through the lattice tail.
    let row_major = 2f64.powf(k) * (4.0 * y + 3.0 + 2.0 * y / (k - 1.0));
    let rel = 1e-3 * tol;
    let mut value = 0.0;
    let mut b_tails = 0.0;
    let mut inner = 0.0;
    let mut radius = 2.0 * (1.0 + z.norm()) + 2.0;
    loop {
        let mut rows = Vec::new();
        for_each_bottom_row(z, inner, radius, |c, d| {
            rows.push((c, d));
            Ok(())
        })?;
        let parts: Vec<(f64, f64)> = rows
            .par_iter()
            .map(|&(c, d)| {
                let g = complete_bottom_row(c, d).expect("coprime bottom row");
                let w = g.act(z);
                translate_sum(y * w.im, z.re - w.re, (y + w.im) / 2.0, k, rel)
            })
            .collect();
        for (s, t) in parts {
            // g and -g move z alike.
            value += 2.0 * s;
            b_tails += 2.0 * t;
        }
        let tail = row_major * lattice_tail_bound(z, radius, k) + b_tails;
        if tail <= tol * value {
            return Ok(TrivialSum { value, tail_bound: tail, radius });
        }
        if radius > 1e5 {
            return Err(Error::Accuracy {
                message: format!("majorant at {z} did not converge by radius {radius}"),
                estimate: value,
                error: tail,
            });
        }
        inner = radius;
        radius *= 1.5;
    }
}

/// Checks the majorant against `y (1 + 1/(k-2))` over `k_list` and `grid`.
pub fn bergman_trivial_scan(k_list: &[f64], grid: &[Complex64], tol: f64) -> Result<ScanReport> {
    let mut rows = Vec::new();
    for &k in k_list {
        for &z in grid {
            let s = bergman_trivial_sum(z, k, tol)?;
            let c = BoundCheck::new("bergman_trivial", s.value, z.im * (1.0 + 1.0 / (k - 2.0)));
            rows.push(ScanRow::from_check(&c, k, z.im, z.re));
        }
    }
    Ok(ScanReport::new("bergman_trivial", rows))
}
