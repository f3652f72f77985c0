//! Unit complex numbers stored as a fraction of a full turn.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::numerics::principal_arg;

/// Reduces a phase (in turns) to `[0, 1)`.
pub fn reduce_turns(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `e^{2 pi i t}`.
pub fn from_turns(t: f64) -> Complex64 {
    let r = reduce_turns(t);
    Complex64::from_polar(1.0, TAU * r)
}

/// Phase of a unit complex number in `[0, 1)` turns.
pub fn to_turns(w: Complex64) -> f64 {
    reduce_turns(principal_arg(w) / TAU)
}

/// Distance between two phases on the circle, in turns.
pub fn turn_distance(a: f64, b: f64) -> f64 {
    let d = reduce_turns(a - b);
    d.min(1.0 - d)
}

/// Exact rational phase `num / den` turns, reduced.
pub fn rational_turns(num: i128, den: i128) -> f64 {
    debug_assert!(den > 0);
    num.rem_euclid(den) as f64 / den as f64
}
