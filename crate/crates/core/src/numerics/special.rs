use std::f64::consts::PI;

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `sin(pi x)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if x == x.floor() {
        return 0.0;
    }
    let r = x - 2.0 * (x / 2.0).floor();
    // r in [0, 2)
    if r <= 0.5 {
        (PI * r).sin()
    } else if r <= 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

/// `(ln |Gamma(x)|, sign Gamma(x))` for any real `x`. At the poles
/// (non-positive integers) returns `(inf, 0)`, so that `1/Gamma` is zero.
pub fn ln_gamma_signed(x: f64) -> (f64, i8) {
    if x > 0.0 {
        return (ln_gamma(x), 1);
    }
    if x == x.floor() {
        return (f64::INFINITY, 0);
    }
    // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
    let s = sin_pi(x);
    let lg = PI.ln() - s.abs().ln() - ln_gamma(1.0 - x);
    (lg, if s > 0.0 { 1 } else { -1 })
}
