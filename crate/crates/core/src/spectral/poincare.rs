use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kloosterman::KloostermanContext;
use crate::bessel::{bessel_i_log, bessel_j_log};
use crate::error::{Error, Result};
use crate::modgroup::{complete_bottom_row, for_each_bottom_row, lattice_tail_bound, GroupElement};
use crate::multiplier::{cusp_parameter_at, from_turns, sigma_turns, MultiplierSystem};
use crate::numerics::{ln_gamma, pairwise_sum_complex, principal_pow};

/// The `c`-sum stops once its remaining tail bound falls below this fraction
/// of the partial sum; such terms can not change a double.
const STOP_REL: f64 = 1e-20;

/// Moduli evaluated per parallel block.
const BLOCK: i64 = 64;

/// Which closed form the coefficient uses, by the sign of `m + kappa'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PoincareCase {
    KappaZero,
    Positive,
    Negative,
}

/// A Fourier coefficient of a Poincare series, with a rigorous bound for the
/// moduli beyond the last one evaluated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoincareCoefficient {
    pub value: Complex64,
    pub case: PoincareCase,
    pub c_max: i64,
    pub c_evaluated: i64,
    pub tail_bound: f64,
}

/// `sum_j |a_j(m)|^2` over an orthonormal basis at the cusp `tau^{-1} inf`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoeffSquareSum {
    pub value: f64,
    pub tail_bound: f64,
    pub c_max: i64,
    pub c_evaluated: i64,
    pub kappa: f64,
    pub width: u64,
    pub index: u64,
    /// `ln` of the factor in front of the bracket.
    pub ln_prefactor: f64,
    /// `1 + 2 pi i^{-k} sum_c ...`; real up to rounding.
    pub bracket: Complex64,
}

struct CSum {
    sum: Complex64,
    c_evaluated: i64,
}

/// `sum_{c=1}^{c_max} W(r, m; c) w(c)`, stopping early once `tail(c)` (a
/// bound for the terms beyond `c`) is negligible against the partial sum or
/// `floor`.
fn c_sum(
    ctx: &KloostermanContext,
    r: i64,
    m: i64,
    c_max: i64,
    weight: impl Fn(i64) -> Result<f64> + Sync,
    tail: impl Fn(i64) -> f64,
    floor: f64,
) -> Result<CSum> {
    let mut terms: Vec<Complex64> = Vec::new();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut start = 1;
    while start <= c_max {
        let end = (start + BLOCK - 1).min(c_max);
        let block: Vec<Result<Complex64>> = (start..=end)
            .into_par_iter()
            .map(|c| {
                let w = weight(c)?;
                if w == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                Ok(ctx.sum(r, m, c)? * w)
            })
            .collect();
        for (c, t) in (start..=end).zip(block) {
            let t = t?;
            acc += t;
            terms.push(t);
            if tail(c) <= STOP_REL * acc.norm().max(floor) {
                return Ok(CSum { sum: pairwise_sum_complex(&terms), c_evaluated: c });
            }
        }
        start = end + 1;
    }
    Ok(CSum { sum: pairwise_sum_complex(&terms), c_evaluated: c_max })
}

fn check_weight(k: f64) -> Result<()> {
    if k <= 2.0 {
        return Err(Error::Domain(format!("Poincare series need weight > 2, got {k}")));
    }
    Ok(())
}

fn check_c_max(c_max: i64) -> Result<()> {
    if c_max < 1 {
        return Err(Error::Domain(format!("c_max must be at least 1, got {c_max}")));
    }
    Ok(())
}

/// `ln` of `sum_{c > C} c^{-s}` bounded by the integral `C^{1-s}/(s-1)`.
fn ln_zeta_tail(big_c: i64, s: f64) -> f64 {
    (1.0 - s) * (big_c as f64).ln() - (s - 1.0).ln()
}

/// Bessel sums `sum_c W/(n c) B(X/c)` with `B` = `J_nu` or `I_nu`, scaled by
/// `e^{-L}`. Returns the scaled sum, `L` and the scaled tail bound.
fn bessel_c_sum(
    ctx: &KloostermanContext,
    r: i64,
    m: i64,
    c_max: i64,
    nu: f64,
    big_x: f64,
    modified: bool,
    floor: f64,
) -> Result<(CSum, f64, f64)> {
    let n = ctx.width_at_infinity() as f64;
    let n_cusp = ctx.width_at_cusp() as f64;
    // ln of the power-series majorant (X/2c)^nu / Gamma(nu+1) at c = 1.
    let ln_major = nu * (big_x / 2.0).ln() - ln_gamma(nu + 1.0);
    let shift = if modified { bessel_i_log(nu, big_x)?.ln_abs() } else { ln_major.min(0.0) };
    let ln_b = |c: i64| -> Result<f64> {
        let x = big_x / c as f64;
        let v = if modified { bessel_i_log(nu, x)? } else { bessel_j_log(nu, x)? };
        if v.is_zero() {
            return Ok(0.0);
        }
        Ok(f64::from(v.sign) * (v.ln_abs() - shift).exp())
    };
    let weight = |c: i64| -> Result<f64> { Ok(ln_b(c)? / (n * c as f64)) };
    // |W| <= n n' c, so each term is at most n' |B(X/c)|.
    let tail = |c: i64| -> f64 {
        let mut ln_t = n_cusp.ln() + ln_major + ln_zeta_tail(c, nu) - shift;
        if modified {
            ln_t += (big_x / c as f64).powi(2) / 4.0;
        }
        ln_t.exp()
    };
    let s = c_sum(ctx, r, m, c_max, weight, &tail, floor)?;
    let t = tail(s.c_evaluated);
    Ok((s, shift, t))
}

/// The coefficient `a(r, m; tau)` of `e^{2 pi i (r + kappa) z / n}` in the
/// Poincare series attached to the cusp `tau^{-1} inf` and index `m`.
pub fn poincare_coeff(sys: &MultiplierSystem, tau: &GroupElement, m: i64, r: i64, c_max: i64) -> Result<PoincareCoefficient> {
    let k = sys.weight();
    check_weight(k)?;
    check_c_max(c_max)?;
    let ctx = KloostermanContext::new(sys, tau)?;
    let n = ctx.width_at_infinity() as f64;
    let n_cusp = ctx.width_at_cusp() as f64;
    let rk = r as f64 + ctx.kappa_at_infinity();
    let mk = m as f64 + ctx.kappa_at_cusp();
    if rk <= 0.0 {
        return Err(Error::Domain(format!("coefficient index needs r + kappa > 0, got {rk}")));
    }
    let i_k = from_turns(-k / 4.0);
    if mk == 0.0 {
        let weight = |c: i64| -> Result<f64> { Ok((n * c as f64).powf(-k)) };
        let tail = |c: i64| n_cusp * n.powf(1.0 - k) * (c as f64).powf(2.0 - k) / (k - 2.0);
        let s = c_sum(&ctx, r, m, c_max, weight, tail, 0.0)?;
        let ln_pref = k * TAU.ln() - ln_gamma(k) + (k - 1.0) * rk.ln();
        let pref = ln_pref.exp();
        return Ok(PoincareCoefficient {
            value: i_k * s.sum * pref,
            case: PoincareCase::KappaZero,
            c_max,
            c_evaluated: s.c_evaluated,
            tail_bound: pref * tail(s.c_evaluated),
        });
    }
    let modified = mk < 0.0;
    let nu = k - 1.0;
    let big_x = 4.0 * PI * (rk * mk.abs() / (n * n_cusp)).sqrt();
    let (s, shift, tail) = bessel_c_sum(&ctx, r, m, c_max, nu, big_x, modified, 0.0)?;
    let ln_pref = TAU.ln() + nu / 2.0 * (n_cusp * rk / (n * mk.abs())).ln() + shift;
    let pref = ln_pref.exp();
    Ok(PoincareCoefficient {
        value: i_k * s.sum * pref,
        case: if modified { PoincareCase::Negative } else { PoincareCase::Positive },
        c_max,
        c_evaluated: s.c_evaluated,
        tail_bound: pref * tail,
    })
}

/// The leading coefficient `delta_tau`: nonzero only when `tau^{-1} inf` is
/// equivalent to infinity, in which case it is
/// `e^{2 pi i s (m + kappa)/n} / (v(tau^{-1} U^s) sigma(tau, tau^{-1}))`.
pub fn delta_tau(sys: &MultiplierSystem, tau: &GroupElement, m: i64) -> Result<Complex64> {
    let inf = cusp_parameter_at(sys, &GroupElement::identity())?;
    let n = inf.cusp.width as i64;
    let tau_inv = tau.inverse();
    for s in 0..n {
        let g = tau_inv * GroupElement::u(s);
        if sys.group().contains(&g) {
            let turns = s as f64 * (m as f64 + inf.kappa) / n as f64
                - sys.upsilon_turns(&g)?
                - sigma_turns(tau, &tau_inv, sys.weight())?;
            return Ok(from_turns(turns));
        }
    }
    Ok(Complex64::new(0.0, 0.0))
}

/// `sum_j |(f_j | tau^{-1})^(m)|^2` over an orthonormal basis, from the
/// Kloosterman-Bessel expansion of the `m`-th Poincare series of the
/// conjugate system at its cusp at infinity.
pub fn coeff_square_sum(sys: &MultiplierSystem, tau: &GroupElement, m: i64, c_max: i64) -> Result<CoeffSquareSum> {
    let k = sys.weight();
    check_weight(k)?;
    check_c_max(c_max)?;
    let tau_inv = tau.inverse();
    let conj = sys.conjugate(&tau_inv);
    let ctx = KloostermanContext::new(&conj, &GroupElement::identity())?;
    let direct = cusp_parameter_at(sys, &tau_inv)?;
    if direct.cusp.width != ctx.width_at_infinity() || direct.kappa != ctx.kappa_at_infinity() {
        return Err(Error::Consistency(format!(
            "cusp data of the conjugate system ({}, {}) differ from the cusp {} of the original ({}, {})",
            ctx.width_at_infinity(),
            ctx.kappa_at_infinity(),
            direct.cusp.representative,
            direct.cusp.width,
            direct.kappa
        )));
    }
    let n = ctx.width_at_infinity() as f64;
    let kappa = ctx.kappa_at_infinity();
    let mk = m as f64 + kappa;
    let index = sys.group().index();
    let base = CoeffSquareSum {
        value: 0.0,
        tail_bound: 0.0,
        c_max,
        c_evaluated: 0,
        kappa,
        width: ctx.width_at_infinity(),
        index,
        ln_prefactor: f64::NEG_INFINITY,
        bracket: Complex64::new(1.0, 0.0),
    };
    if mk < 0.0 {
        return Err(Error::Domain(format!("coefficient index needs m + kappa >= 0, got {mk}")));
    }
    if mk == 0.0 {
        return Ok(base);
    }
    let nu = k - 1.0;
    let big_x = 4.0 * PI * mk / n;
    // The bracket is 1 + 2 pi i^{-k} sum; stop relative to the leading 1.
    let floor_unscaled = 1.0 / TAU;
    let ln_major = nu * (big_x / 2.0).ln() - ln_gamma(nu + 1.0);
    let floor = floor_unscaled / ln_major.min(0.0).exp();
    let (s, shift, tail) = bessel_c_sum(&ctx, m, m, c_max, nu, big_x, false, floor)?;
    let scale = shift.exp();
    let bracket = Complex64::new(1.0, 0.0) + from_turns(-k / 4.0) * s.sum * (TAU * scale);
    let ln_prefactor = (index as f64).ln() + nu * (4.0 * PI * mk).ln() - k * n.ln() - ln_gamma(k - 1.0);
    let pref = ln_prefactor.exp();
    let tail_bound = pref * TAU * scale * tail;
    let value = pref * bracket.re;
    let slack = tail_bound + 1e-12 * pref;
    if pref * bracket.im.abs() > slack + 1e-9 * value.abs() {
        return Err(Error::Consistency(format!(
            "coefficient square sum is not real: bracket {bracket} at m = {m}"
        )));
    }
    if value < -slack {
        return Err(Error::Consistency(format!("coefficient square sum is negative: {value:e} at m = {m}")));
    }
    Ok(CoeffSquareSum { value, tail_bound, c_evaluated: s.c_evaluated, ln_prefactor, bracket, ..base })
}

/// Evaluates the Poincare series at the cusp `tau^{-1} inf` with index `m`
/// at `z` by direct summation over `Gamma_{tau^{-1} inf} \ Gamma`, i.e. over
/// bottom rows of `tau g`. Returns the value and a bound for the omitted terms.
pub fn poincare_series(sys: &MultiplierSystem, tau: &GroupElement, m: i64, z: Complex64, tol: f64) -> Result<(Complex64, f64)> {
    let k = sys.weight();
    check_weight(k)?;
    if z.im <= 0.0 {
        return Err(Error::Domain(format!("point {z} is not in the upper half plane")));
    }
    let tau_inv = tau.inverse();
    let cusp = cusp_parameter_at(sys, &tau_inv)?;
    let n_cusp = cusp.cusp.width as i64;
    let mk = m as f64 + cusp.kappa;
    let group = sys.group();
    // Outside |cz + d| > R, Im(g z) < y / R^2 bounds the exponential.
    let tail_at = |radius: f64| -> f64 {
        let growth = (TAU * (-mk).max(0.0) * z.im / (n_cusp as f64 * radius * radius)).exp();
        growth * lattice_tail_bound(z, radius, k)
    };
    let mut radius = 2.0 * (1.0 + z.norm()) + 2.0;
    while tail_at(radius) > tol {
        radius *= 1.25;
        if radius > 1e5 {
            return Err(Error::Resource(format!("Poincare series at {z} needs too many terms for tolerance {tol:e}")));
        }
    }
    let mut terms = Vec::new();
    for_each_bottom_row(z, 0.0, radius, |c, d| {
        let g0 = complete_bottom_row(c, d).expect("coprime bottom row");
        for t in 0..n_cusp {
            let gp = GroupElement::u(t) * g0;
            let gamma = tau_inv * gp;
            if group.contains(&gamma) {
                let w = gp.act(z);
                let e = Complex64::new(0.0, TAU * mk / n_cusp as f64 * w.re).exp()
                    * (-TAU * mk / n_cusp as f64 * w.im).exp();
                let denom = principal_pow(tau.j(gamma.act(z)), k)? * sys.nu(&gamma, z)?;
                terms.push(e / denom);
                break;
            }
        }
        Ok(())
    })?;
    Ok((pairwise_sum_complex(&terms), tail_at(radius)))
}

/// The Poincare series from its Fourier expansion at infinity,
/// `delta_tau e((m + kappa) z/n) + sum_{0 < r + kappa, r <= r_max} a(r, m; tau) e((r + kappa) z/n)`.
pub fn poincare_fourier(sys: &MultiplierSystem, tau: &GroupElement, m: i64, z: Complex64, r_max: i64, c_max: i64) -> Result<Complex64> {
    if z.im <= 0.0 {
        return Err(Error::Domain(format!("point {z} is not in the upper half plane")));
    }
    let inf = cusp_parameter_at(sys, &GroupElement::identity())?;
    let (n, kappa) = (inf.cusp.width as f64, inf.kappa);
    let e = |x: f64| (Complex64::new(0.0, TAU * x / n) * z).exp();
    let mut terms = vec![delta_tau(sys, tau, m)? * e(m as f64 + kappa)];
    let r0 = if kappa > 0.0 { 0 } else { 1 };
    for r in r0..=r_max {
        terms.push(poincare_coeff(sys, tau, m, r, c_max)?.value * e(r as f64 + kappa));
    }
    Ok(pairwise_sum_complex(&terms))
}
