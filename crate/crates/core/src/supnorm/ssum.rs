//! The exponential moment sums `S(alpha, beta, eta)` and their two lemmas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ln_gamma, pairwise_sum};
use crate::report::{BoundCheck, ScanReport, ScanRow};

/// Lemma checks allow this much rounding above 1.
pub const LEMMA_SLACK: f64 = 1e-12;

/// Terms are summed until the geometric tail is below this fraction.
const TAIL_REL: f64 = 1e-17;

/// Parameters of `S(alpha, beta, eta) = sum_{m + eta > 0} (m + eta)^alpha e^{-beta (m + eta)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumSpec {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
}

impl SumSpec {
    pub fn new(alpha: f64, beta: f64, eta: f64) -> Result<Self> {
        let s = Self { alpha, beta, eta };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0 && self.eta > 0.0) || !self.alpha.is_finite() || !self.beta.is_finite() || !self.eta.is_finite() {
            return Err(Error::Domain(format!(
                "S(alpha, beta, eta) needs positive finite parameters, got ({}, {}, {})",
                self.alpha, self.beta, self.eta
            )));
        }
        Ok(())
    }

    /// Smallest point of `eta + Z` that is positive.
    pub fn first_point(&self) -> f64 {
        let f = self.eta - self.eta.floor();
        if f > 0.0 {
            f
        } else {
            1.0
        }
    }
}

/// `x ln x` with the convention `0 ln 0 = 0`.
fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn ln_add(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// `ln S(alpha, beta, eta)`, summed relative to the largest term. Past the
/// peak `alpha/beta` the term ratio `(1 + 1/x)^alpha e^{-beta}` is below 1
/// and decreasing, which bounds the rest by a geometric series.
pub fn ln_s_sum(spec: &SumSpec) -> Result<f64> {
    spec.validate()?;
    let (a, b) = (spec.alpha, spec.beta);
    let ln_t = |x: f64| a * x.ln() - b * x;
    let x0 = spec.first_point();
    let peak = a / b;
    let ln_ref = ln_t(x0.max(peak));
    let mut terms = Vec::new();
    let mut acc = 0.0;
    let mut j = 0u64;
    loop {
        let x = x0 + j as f64;
        let t = (ln_t(x) - ln_ref).exp();
        terms.push(t);
        acc += t;
        if x > peak {
            let ratio = (a * (1.0 / x).ln_1p() - b).exp();
            if t * ratio / (1.0 - ratio) <= TAIL_REL * acc {
                break;
            }
        }
        j += 1;
    }
    Ok(ln_ref + pairwise_sum(&terms).ln())
}

pub fn s_sum(spec: &SumSpec) -> Result<f64> {
    Ok(ln_s_sum(spec)?.exp())
}

/// `ln` of `beta^{-alpha-1} Gamma(alpha+1) + beta^{-alpha} alpha^alpha e^{-alpha}`.
pub fn ln_sabest_general(alpha: f64, beta: f64) -> f64 {
    ln_add(-(alpha + 1.0) * beta.ln() + ln_gamma(alpha + 1.0), -alpha * beta.ln() + xlnx(alpha) - alpha)
}

/// `ln` of `beta^{-alpha-1} Gamma(alpha+1) + eta^alpha e^{-beta eta}`.
pub fn ln_sabest_tail(alpha: f64, beta: f64, eta: f64) -> f64 {
    ln_add(-(alpha + 1.0) * beta.ln() + ln_gamma(alpha + 1.0), alpha * eta.ln() - beta * eta)
}

/// The lemma checks for one parameter triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaChecks {
    /// The bound valid for all parameters.
    pub sabest_general: BoundCheck,
    /// The sharper bound, present when `alpha <= beta eta`.
    pub sabest_tail: Option<BoundCheck>,
    /// The worst point of the pointwise decay inequality on an `x`-grid
    /// starting at `6 alpha / beta`.
    pub expdecay: BoundCheck,
}

impl LemmaChecks {
    pub fn all(&self) -> Vec<&BoundCheck> {
        let mut v = vec![&self.sabest_general];
        v.extend(self.sabest_tail.iter());
        v.push(&self.expdecay);
        v
    }
}

fn enforce(check: BoundCheck) -> Result<BoundCheck> {
    if check.ratio > 1.0 + LEMMA_SLACK || check.ratio.is_nan() {
        return Err(Error::LemmaViolation(format!(
            "{} fails: lhs {:e} against bound {:e} (ratio {})",
            check.name, check.lhs, check.envelope, check.ratio
        )));
    }
    Ok(check)
}

/// `x^alpha e^{-beta x} <= alpha^alpha beta^{-alpha} e^{-alpha} e^{-beta x / 2}`
/// at one `x >= 6 alpha / beta`.
pub fn check_expdecay(alpha: f64, beta: f64, x: f64) -> Result<BoundCheck> {
    if !(alpha >= 0.0 && beta > 0.0) {
        return Err(Error::Domain(format!("decay lemma needs alpha >= 0, beta > 0, got ({alpha}, {beta})")));
    }
    if x < 6.0 * alpha / beta {
        return Err(Error::Domain(format!("decay lemma needs x >= 6 alpha / beta = {}, got {x}", 6.0 * alpha / beta)));
    }
    let lhs = if alpha == 0.0 { -beta * x } else { alpha * x.ln() - beta * x };
    let env = xlnx(alpha) - alpha * beta.ln() - alpha - beta * x / 2.0;
    enforce(
        BoundCheck::from_ln("expdecay", lhs, env)
            .with("alpha", alpha)
            .with("beta", beta)
            .with("x", x),
    )
}

/// Multiples of `6 alpha / beta` at which the decay lemma is probed.
const EXPDECAY_GRID: [f64; 8] = [1.0, 1.05, 1.2, 1.5, 2.0, 3.0, 5.0, 10.0];

/// Evaluates both bounds on `S` and the decay lemma. The sharper bound uses
/// the first positive point of `eta + Z` in place of `eta`, which is `eta`
/// itself for `eta` in `(0, 1]`.
pub fn check_lemma_bounds(spec: &SumSpec) -> Result<LemmaChecks> {
    let ln_s = ln_s_sum(spec)?;
    let (a, b) = (spec.alpha, spec.beta);
    let tag = |c: BoundCheck| c.with("alpha", a).with("beta", b).with("eta", spec.eta);
    let general = enforce(tag(BoundCheck::from_ln("sabest_general", ln_s, ln_sabest_general(a, b))))?;
    let e = spec.first_point();
    let tail = if a <= b * e {
        Some(enforce(tag(BoundCheck::from_ln("sabest_tail", ln_s, ln_sabest_tail(a, b, e))))?)
    } else {
        None
    };
    let start = 6.0 * a / b;
    let mut worst: Option<BoundCheck> = None;
    for f in EXPDECAY_GRID {
        // At alpha -> 0 the grid collapses to 0; probe unit steps instead.
        let x = if start > 0.0 { start * f } else { f - 1.0 };
        let c = check_expdecay(a, b, x)?;
        if worst.as_ref().map_or(true, |w| c.ratio > w.ratio) {
            worst = Some(c);
        }
    }
    Ok(LemmaChecks { sabest_general: general, sabest_tail: tail, expdecay: worst.expect("non-empty grid") })
}

/// Radical inverse of `i` in base `b`.
fn halton(mut i: u64, b: u64) -> f64 {
    let (mut f, mut r) = (1.0, 0.0);
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// A deterministic low-discrepancy sample of `(alpha, beta, eta, x)`:
/// `alpha` in `(0, 60]` (including values near 0), `beta` log-uniform in
/// `[0.05, 20]`, `eta` in `(0, 1]` and `x` between 6 and 30 times
/// `alpha / beta`.
pub fn lemma_sample(count: usize) -> Vec<(SumSpec, f64)> {
    (1..=count as u64)
        .map(|i| {
            let u = halton(i, 2);
            let alpha = if i % 10 == 1 { 1e-12 * (1.0 + u) } else { 60.0 * u.powi(2) + 1e-9 };
            let beta = (0.05f64.ln() + (20.0f64 / 0.05).ln() * halton(i, 3)).exp();
            let eta = 1.0 - halton(i, 5) * (1.0 - 1e-3);
            let x = (6.0 + 24.0 * halton(i, 7)) * alpha / beta;
            (SumSpec { alpha, beta, eta }, x)
        })
        .collect()
}

/// Runs the lemma checks over [`lemma_sample`]. Rows carry `alpha` in the
/// `k` column, `beta` in `y` and `eta` (or `x` for the decay lemma) in `x`.
/// Any violation fails the report.
pub fn lemma_suite(count: usize) -> ScanReport {
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for (spec, x) in lemma_sample(count) {
        match check_lemma_bounds(&spec).and_then(|l| Ok((l, check_expdecay(spec.alpha, spec.beta, x)?))) {
            Ok((l, point)) => {
                for c in l.all() {
                    let xcol = if c.name == "expdecay" { c.param("x") } else { spec.eta };
                    rows.push(ScanRow::from_check(c, spec.alpha, spec.beta, xcol));
                }
                rows.push(ScanRow::from_check(&point, spec.alpha, spec.beta, x));
            }
            Err(e) => notes.push(format!("alpha = {}, beta = {}, eta = {}: {e}", spec.alpha, spec.beta, spec.eta)),
        }
    }
    let mut report = ScanReport::new("lemmas", rows);
    for n in notes {
        report.fail(n);
    }
    if report.rows.iter().any(|r| r.ratio > 1.0 + LEMMA_SLACK) {
        report.fail("a lemma ratio exceeds 1");
    }
    report
}
