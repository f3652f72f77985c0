//! Integral representations used as an independent reference for the
//! series and recurrence paths. Every integrand is normalised by its peak so
//! that results are returned in log-scale without overflow.

use std::f64::consts::PI;

use super::BesselKind;
use crate::error::{domain, Result};
use crate::numerics::{adaptive_integrate, gauss_legendre, ln_gamma, sin_pi, LogScaleReal};

const REL_TOL: f64 = 1e-14;
/// Integrands below `exp(-CUTOFF)` relative to the peak are dropped.
const CUTOFF: f64 = 745.0;

/// `(1/pi) int_0^pi g(theta) d theta` by composite 20-point Gauss-Legendre,
/// with enough panels to resolve an oscillation of total phase `~ x + rho`.
fn oscillatory_integral(x: f64, rho: f64, g: impl Fn(f64) -> f64) -> f64 {
    let panels = ((x + rho) / 2.0).ceil() as usize + 4;
    let rule = gauss_legendre(20);
    let h = PI / panels as f64;
    let parts: Vec<f64> =
        (0..panels).map(|i| rule.integrate(i as f64 * h, (i + 1) as f64 * h, &g)).collect();
    crate::numerics::pairwise_sum(&parts) / PI
}

/// Integral over `[lo, inf)` of a non-negative integrand whose maximum is
/// near `peak` and equals about one. The upper limit is found by doubling.
fn peak_integral(f: &dyn Fn(f64) -> f64, lo: f64, peak: f64) -> f64 {
    let floor = (-CUTOFF).exp();
    let mut step = 1e-3;
    let mut hi = peak + step;
    while f(hi) > floor && step < 1e6 {
        step *= 2.0;
        hi = peak + step;
    }
    let left = if peak > lo { adaptive_integrate(f, lo, peak, 1e-300, REL_TOL).value } else { 0.0 };
    left + adaptive_integrate(f, peak.max(lo), hi, 1e-300, REL_TOL).value
}

/// `theta - sin(theta)` without cancellation near zero.
fn theta_minus_sin(t: f64) -> f64 {
    if t < 0.1 {
        let t2 = t * t;
        t * t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0 * (1.0 - t2 / 72.0 * (1.0 - t2 / 110.0))))
    } else {
        t - t.sin()
    }
}

/// `acosh(1 + e)` and `sinh(acosh(1 + e))` for `e >= 0`.
fn acosh1p(e: f64) -> (f64, f64) {
    let s = (e * (2.0 + e)).sqrt();
    ((e + s).ln_1p(), s)
}

/// J below the turning point: integral along the steepest-descent path
/// `Im(x sinh w - rho w) = 0`, which joins `inf - i pi` to `inf + i pi`
/// through the saddle on the real axis. The integrand is positive.
fn j_below(rho: f64, x: f64) -> LogScaleReal {
    let (u0, s0) = acosh1p((rho - x) / x);
    let phi0 = x * s0 - rho * u0;
    let f = |t: f64| -> f64 {
        let sinc = if t == 0.0 { 1.0 } else { t.sin() / t };
        if sinc <= 0.0 {
            return 0.0;
        }
        let e = ((rho - x) + x * theta_minus_sin(t) / t.max(f64::MIN_POSITIVE)) / (x * sinc);
        if !e.is_finite() {
            return 0.0;
        }
        let (u, s) = acosh1p(e.max(0.0));
        (x * s * t.cos() - rho * u - phi0).exp()
    };
    let v = adaptive_integrate(&f, 0.0, PI, 1e-300, REL_TOL).value / PI;
    LogScaleReal::from_ln(phi0) * LogScaleReal::from_f64(v)
}

/// J above the turning point: the Schlaefli representation.
fn j_above(rho: f64, x: f64) -> LogScaleReal {
    let osc = oscillatory_integral(x, rho, |t| (rho * t - x * t.sin()).cos());
    let s = sin_pi(rho);
    let tail = if s == 0.0 {
        0.0
    } else {
        let f = |t: f64| (-x * t.sinh() - rho * t).exp();
        s / PI * peak_integral(&f, 0.0, 0.0)
    };
    LogScaleReal::from_f64(osc - tail)
}

/// `K_rho(x) = int_0^inf exp(-x cosh t) cosh(rho t) dt`.
fn k_ref(rho: f64, x: f64) -> LogScaleReal {
    let ln_cosh = |a: f64| a.abs() + (-2.0 * a.abs()).exp().ln_1p() - std::f64::consts::LN_2;
    let phi = |t: f64| -x * t.cosh() + ln_cosh(rho * t);
    let peak = (rho / x).asinh();
    let p = phi(peak);
    let f = |t: f64| (phi(t) - p).exp();
    LogScaleReal::from_ln(p) * LogScaleReal::from_f64(peak_integral(&f, 0.0, peak))
}

/// `Y_rho(x) = (1/pi) int_0^pi sin(x sin t - rho t) dt
///   - (1/pi) int_0^inf (e^{rho t} + e^{-rho t} cos(rho pi)) e^{-x sinh t} dt`.
/// The second integrand is non-negative.
fn y_ref(rho: f64, x: f64) -> LogScaleReal {
    let osc = oscillatory_integral(x, rho, |t| (x * t.sin() - rho * t).sin());
    let c = sin_pi(rho + 0.5);
    let psi = |t: f64| rho * t - x * t.sinh();
    let peak = if rho > x { (rho / x).acosh() } else { 0.0 };
    let p = psi(peak);
    let f = |t: f64| (psi(t) - p).exp() * (1.0 + (-2.0 * rho * t).exp() * c);
    let tail = LogScaleReal::from_ln(p) * LogScaleReal::from_f64(peak_integral(&f, 0.0, peak) / PI);
    LogScaleReal::from_f64(osc).sub(tail)
}

/// Poisson form `I_rho(x) = (x/2)^rho / (sqrt(pi) Gamma(rho+1/2))
///   int_0^pi sin(t)^{2 rho} e^{x cos t} dt`.
fn i_ref(rho: f64, x: f64) -> LogScaleReal {
    let ln_g = |t: f64| {
        let s = t.sin();
        if s <= 0.0 {
            if rho == 0.0 {
                x * t.cos()
            } else {
                f64::NEG_INFINITY
            }
        } else {
            2.0 * rho * s.ln() + x * t.cos()
        }
    };
    let c = (-rho + (rho * rho + x * x).sqrt()) / x;
    let peak = c.clamp(-1.0, 1.0).acos();
    let p = ln_g(peak);
    let f = |t: f64| (ln_g(t) - p).exp();
    let mut v = 0.0;
    if peak > 0.0 {
        v += adaptive_integrate(&f, 0.0, peak, 1e-300, REL_TOL).value;
    }
    v += adaptive_integrate(&f, peak, PI, 1e-300, REL_TOL).value;
    let pre = rho * (0.5 * x).ln() - 0.5 * PI.ln() - ln_gamma(rho + 0.5);
    LogScaleReal::from_ln(pre + p) * LogScaleReal::from_f64(v)
}

/// Reference value in log-scale.
pub fn bessel_ref_log(kind: BesselKind, rho: f64, x: f64) -> Result<LogScaleReal> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return domain(format!("order must be finite and non-negative, got {rho}"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("argument must be finite and non-negative, got {x}"));
    }
    if x == 0.0 {
        return match kind {
            BesselKind::J | BesselKind::I => {
                Ok(if rho == 0.0 { LogScaleReal::ONE } else { LogScaleReal::ZERO })
            }
            BesselKind::Y | BesselKind::K => domain("Y and K have a pole at x = 0"),
        };
    }
    Ok(match kind {
        BesselKind::J if x <= rho => j_below(rho, x),
        BesselKind::J => j_above(rho, x),
        BesselKind::Y => y_ref(rho, x),
        BesselKind::I => i_ref(rho, x),
        BesselKind::K => k_ref(rho, x),
    })
}

/// Reference value from an integral representation; see [`bessel_ref_log`].
pub fn bessel_ref(kind: BesselKind, rho: f64, x: f64) -> Result<f64> {
    Ok(bessel_ref_log(kind, rho, x)?.to_f64())
}
