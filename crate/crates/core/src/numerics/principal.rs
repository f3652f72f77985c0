use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};

/// Complex numbers carry no extra state; the branch convention lives in the
/// functions below.
pub type PrincipalComplex = Complex64;

/// Argument in `(-pi, pi]`. The negative real axis (including `-0.0` imaginary
/// part) maps to `+pi`.
pub fn principal_arg(w: Complex64) -> f64 {
    let a = w.im.atan2(w.re);
    if a <= -PI {
        PI
    } else if w.im == 0.0 && w.re < 0.0 {
        PI
    } else {
        a
    }
}

/// `log|w| + i arg w` with the principal argument.
pub fn principal_log(w: Complex64) -> Complex64 {
    Complex64::new(w.norm().ln(), principal_arg(w))
}

/// `w^k = exp(k log w)` on the principal branch.
pub fn principal_pow(w: Complex64, k: f64) -> Result<Complex64> {
    if w.re == 0.0 && w.im == 0.0 {
        if k > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return domain(format!("zero base raised to non-positive power {k}"));
    }
    let (log_abs, phase) = principal_pow_parts(w, k);
    Ok(Complex64::from_polar(log_abs.exp(), phase))
}

/// `w^k` split as `(log |w^k|, arg)` with the phase left unreduced, for use in
/// log-scale products. `w` must be nonzero.
pub fn principal_pow_parts(w: Complex64, k: f64) -> (f64, f64) {
    (k * w.norm().ln(), k * principal_arg(w))
}
