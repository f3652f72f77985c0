use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numerics::{ln_gamma, ln_gamma_signed, LogScaleReal};

/// Which power series to sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesKind {
    J,
    I,
}

/// Truncated series value with a bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: LogScaleReal,
    pub truncation_bound: LogScaleReal,
}

/// `log |t_m|` and sign of `t_m = (-+1)^m (x/2)^{2m+order} / (m! Gamma(m+order+1))`.
fn term(kind: SeriesKind, order: f64, ln_half_x: f64, m: usize) -> LogScaleReal {
    let (lg, sg) = ln_gamma_signed(m as f64 + order + 1.0);
    if sg == 0 {
        return LogScaleReal::ZERO;
    }
    let mut sign = sg;
    if kind == SeriesKind::J && m % 2 == 1 {
        sign = -sign;
    }
    let ln = (2.0 * m as f64 + order) * ln_half_x - ln_gamma(m as f64 + 1.0) - lg;
    LogScaleReal::new(sign, ln)
}

/// Partial sum of the first `terms` summands of the J or I power series, for
/// any real order (negative orders are used by the definitional Y/K route).
pub(crate) fn series_any_order(kind: SeriesKind, order: f64, x: f64, terms: usize) -> Result<SeriesValue> {
    if terms == 0 {
        return domain("series needs at least one term");
    }
    if x < 0.0 || !x.is_finite() {
        return domain(format!("series argument must be finite and non-negative, got {x}"));
    }
    if x == 0.0 {
        let value = if order == 0.0 { LogScaleReal::ONE } else { LogScaleReal::ZERO };
        return Ok(SeriesValue { value, truncation_bound: LogScaleReal::ZERO });
    }
    let mut gen = Terms::new(kind, order, x);
    let mut acc = LogScaleReal::ZERO;
    for _ in 0..terms {
        acc = gen.push_next(acc);
    }
    let value = gen.finish(acc);
    Ok(SeriesValue { value, truncation_bound: tail_bound(kind, order, x, terms) })
}

/// Bound on `|sum_{m >= M} t_m|`. Once the term ratio
/// `q_m = (x/2)^2 / ((m+1)(m+1+order))` is below one it stays below one, so the
/// J tail is bounded by its first term (alternating, decreasing) and the I tail
/// by a geometric series. Before that point the terms are summed explicitly.
fn tail_bound(kind: SeriesKind, order: f64, x: f64, start: usize) -> LogScaleReal {
    let lhx = (0.5 * x).ln();
    let q = |m: usize| 0.25 * x * x / ((m as f64 + 1.0) * (m as f64 + 1.0 + order)).abs();
    let positive_from = |m: usize| m as f64 + 1.0 + order > 0.0;
    let mut acc = LogScaleReal::ZERO;
    let mut m = start;
    loop {
        let t = term(kind, order, lhx, m).abs();
        let qm = q(m);
        if qm < 1.0 && positive_from(m) {
            let closing = match kind {
                SeriesKind::J => t,
                SeriesKind::I => t / LogScaleReal::from_f64(1.0 - qm),
            };
            return acc.add(closing);
        }
        acc = acc.add(t);
        m += 1;
        if m > start + 1_000_000 {
            return LogScaleReal::new(1, f64::INFINITY);
        }
    }
}

/// The J or I power series of non-negative order truncated after `terms`
/// summands, in log-scale, with a bound from the first omitted term.
pub fn bessel_series(kind: SeriesKind, order: f64, x: f64, terms: usize) -> Result<SeriesValue> {
    if order < 0.0 {
        return domain(format!("order must be non-negative, got {order}"));
    }
    series_any_order(kind, order, x, terms)
}

/// Term generator: the first term in log form, later ones by the exact ratio
/// `t_{m+1}/t_m = -+ (x/2)^2 / ((m+1)(m+1+order))`, accumulated in plain
/// doubles relative to a moving log offset.
struct Terms {
    ratio_num: f64,
    order: f64,
    m: usize,
    /// Current term is `cur * exp(offset)`.
    cur: f64,
    offset: f64,
    partial: f64,
}

const RESCALE: f64 = 1e200;

impl Terms {
    fn new(kind: SeriesKind, order: f64, x: f64) -> Self {
        let t0 = term(kind, order, (0.5 * x).ln(), 0);
        let q = 0.25 * x * x;
        Self {
            ratio_num: if kind == SeriesKind::J { -q } else { q },
            order,
            m: 0,
            cur: f64::from(t0.sign),
            offset: if t0.is_zero() { 0.0 } else { t0.log_abs },
            partial: 0.0,
        }
    }

    /// Adds the current term to the running sum and advances. The `acc`
    /// argument carries sums that were flushed on rescaling.
    fn push_next(&mut self, acc: LogScaleReal) -> LogScaleReal {
        self.partial += self.cur;
        let mf = self.m as f64;
        let den = (mf + 1.0) * (mf + 1.0 + self.order);
        self.cur = if den == 0.0 { 0.0 } else { self.cur * self.ratio_num / den };
        self.m += 1;
        if self.cur.abs() > RESCALE || self.partial.abs() > RESCALE {
            let flushed = acc.add(LogScaleReal::from_f64(self.partial) * LogScaleReal::from_ln(self.offset));
            self.partial = 0.0;
            self.cur /= RESCALE;
            self.offset += RESCALE.ln();
            return flushed;
        }
        acc
    }

    fn current_ln_abs(&self) -> f64 {
        self.cur.abs().ln() + self.offset
    }

    fn finish(&self, acc: LogScaleReal) -> LogScaleReal {
        acc.add(LogScaleReal::from_f64(self.partial) * LogScaleReal::from_ln(self.offset))
    }
}

/// Sums the series until the next term is below `rel * |partial sum|`.
pub(crate) fn series_converged(kind: SeriesKind, order: f64, x: f64, rel: f64) -> LogScaleReal {
    if x == 0.0 {
        return if order == 0.0 { LogScaleReal::ONE } else { LogScaleReal::ZERO };
    }
    let mut gen = Terms::new(kind, order, x);
    let mut acc = LogScaleReal::ZERO;
    loop {
        acc = gen.push_next(acc);
        let m = gen.m as f64;
        let q = 0.25 * x * x / (m * (m + order)).abs();
        if q < 0.5 && m + order > 0.0 {
            let partial = gen.finish(acc);
            if partial.is_zero() || gen.cur == 0.0 || gen.current_ln_abs() - partial.ln_abs() < rel.ln() {
                return partial;
            }
        }
        if gen.m > 100_000 {
            return gen.finish(acc);
        }
    }
}
