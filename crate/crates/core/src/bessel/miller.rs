//! Backward recurrence for J with the Neumann normalisation
//! `(x/2)^nu / Gamma(nu+1) = sum_k c_k J_{nu+2k}(x)`, where `nu` is the
//! fractional part of the order.

use crate::numerics::{ln_gamma, LogScaleReal};

const RESCALE: f64 = 1e250;

/// Starting index for the recurrence.
fn start_index(n0: usize, rho: f64, x: f64) -> usize {
    let base = n0.max(x.ceil() as usize);
    base + 40 + (10.0 * rho.max(x).cbrt()).ceil() as usize
}

/// `J_rho(x)` for `x > 0` by Miller's algorithm.
pub(crate) fn miller_j(rho: f64, x: f64) -> LogScaleReal {
    debug_assert!(x > 0.0 && rho >= 0.0);
    let nu = rho - rho.floor();
    let n0 = rho.floor() as usize;
    let big_n = start_index(n0, rho, x);

    // f_{k} ~ J_{nu+k}; iterate k from big_n down to 0.
    let mut f_next = 0.0f64; // f_{k+1}
    let mut f_cur = 1.0f64; // f_{k}
    let mut ln_scale = 0.0f64; // true f values are stored values * exp(-ln_scale)
    let mut target: Option<(f64, f64)> = None; // (value, ln_scale at capture)
    let mut sum = 0.0f64;

    // c_k for even offsets, computed from the top in log form.
    let c_of = |j: usize| -> f64 {
        // c_j = (nu+2j) Gamma(nu+j) / (j! Gamma(nu+1)), with c_0 = 1.
        if j == 0 {
            1.0
        } else {
            let jf = j as f64;
            ((nu + 2.0 * jf).ln() + ln_gamma(nu + jf) - ln_gamma(jf + 1.0) - ln_gamma(nu + 1.0)).exp()
        }
    };

    let mut k = big_n;
    loop {
        if k == n0 {
            target = Some((f_cur, ln_scale));
        }
        if k % 2 == 0 {
            sum += c_of(k / 2) * f_cur;
        }
        if k == 0 {
            break;
        }
        let order = nu + k as f64;
        let f_prev = 2.0 * order / x * f_cur - f_next;
        f_next = f_cur;
        f_cur = f_prev;
        if f_cur.abs() > RESCALE {
            f_cur /= RESCALE;
            f_next /= RESCALE;
            sum /= RESCALE;
            ln_scale -= RESCALE.ln();
        }
        k -= 1;
    }
    let (t, t_scale) = target.expect("target index visited");
    // Normalisation: true J_{nu} scale factor is norm / sum.
    let ln_norm = nu * (0.5 * x).ln() - ln_gamma(nu + 1.0);
    // The target was captured when the running scale was t_scale; later
    // rescalings divided sum by exp(t_scale - ln_scale), so bring t to the same
    // footing.
    let shift = ln_scale - t_scale;
    LogScaleReal::from_f64(t) * LogScaleReal::from_ln(shift + ln_norm) / LogScaleReal::from_f64(sum)
}

