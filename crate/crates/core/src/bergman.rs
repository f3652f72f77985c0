//! The Bergman kernel
//! `h(z, w) = sum_{g in G} ((w + g z)/2i)^{-k} / nu(g, z)`,
//! its diagonal (the orthonormal-basis sum) and the reproducing property.
//!
//! The elements of `G` with a given bottom row form one coset
//! `{U^{nb} g : b in Z}` of the stabilizer of infinity (width `n`, cusp
//! parameter `kappa`). Each coset is summed in closed form by the Lipschitz
//! formula
//! `sum_b (-i(xi + b))^{-k} e^{-2 pi i kappa b} = (2pi)^k/Gamma(k) sum_{m+kappa>0} (m+kappa)^{k-1} e^{2 pi i (m+kappa) xi}`,
//! which leaves an absolutely convergent sum over bottom rows.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{cusp_decay_rate, gram_fn, CuspForm, FormValue};
use crate::modgroup::{complete_bottom_row, for_each_bottom_row, lattice_tail_bound, GroupElement};
use crate::multiplier::{cusp_parameter_at, MultiplierSystem};
use crate::numerics::{ln_gamma, pairwise_sum_complex};
use crate::spectral::{delta_tau, poincare_coeff, poincare_fourier};

/// Largest truncation radius tried before giving up.
pub const MAX_RADIUS: f64 = 2_000.0;

/// Terms of the Lipschitz series below this fraction of the running sum
/// (past the peak) end the series.
const SERIES_REL: f64 = 1e-18;

/// A truncated kernel value.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: Complex64,
    /// Bottom rows with `|cz + d| <= truncation_radius` were summed.
    pub truncation_radius: f64,
    /// Bound for the omitted rows.
    pub tail_bound: f64,
    /// Bound for the floating-point error of the summed rows.
    pub rounding_bound: f64,
}

/// `sum_j |(f_j|tau)(z)|^2` from the kernel of the conjugate system.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DiagValue {
    pub value: f64,
    pub tail_bound: f64,
    pub rounding_bound: f64,
    pub radius: f64,
    pub imag_residue: f64,
}

/// Both sides of the reproducing identity
/// `<f, h(., -conj w)> = 8 pi / (mu (k - 1)) f(w)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReproduceCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub quad_error: f64,
}

impl ReproduceCheck {
    pub fn relative_error(&self) -> f64 {
        (self.lhs - self.rhs).norm() / self.rhs.norm()
    }
}

/// `(2pi)^k/Gamma(k) sum_{m+kappa>0} (m+kappa)^{k-1} e^{2 pi i (m+kappa) xi}`.
struct Lipschitz {
    k: f64,
    first: f64,
    ln_pref: f64,
}

struct SeriesValue {
    value: Complex64,
    abs_sum: f64,
}

impl Lipschitz {
    fn new(k: f64, kappa: f64) -> Self {
        let first = if kappa > 0.0 { kappa } else { 1.0 };
        Self { k, first, ln_pref: k * TAU.ln() - ln_gamma(k) }
    }

    fn eval(&self, xi: Complex64) -> Result<SeriesValue> {
        let y = xi.im;
        debug_assert!(y > 0.0);
        let peak = (self.k - 1.0) / (TAU * y);
        // q^e by recurrence from q^first; magnitudes carry the prefactor.
        let q = Complex64::from_polar((-TAU * y).exp(), TAU * xi.re.fract());
        let mut qe = Complex64::from_polar(
            (self.ln_pref - TAU * self.first * y).exp(),
            TAU * (self.first * xi.re).fract(),
        );
        let mut value = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for j in 0..10_000_000u64 {
            let e = self.first + j as f64;
            let t = qe * e.powf(self.k - 1.0);
            let mag = t.norm();
            value += t;
            abs_sum += mag;
            if e > peak {
                // Ratio of consecutive terms, decreasing from here on.
                let ratio = ((e + 1.0) / e).powf(self.k - 1.0) * (-TAU * y).exp();
                if ratio < 1.0 {
                    let tail = mag * ratio / (1.0 - ratio);
                    if tail <= SERIES_REL * abs_sum {
                        return Ok(SeriesValue { value, abs_sum: abs_sum + tail });
                    }
                }
            }
            qe *= q;
        }
        Err(Error::Resource(format!("Lipschitz series at xi = {xi} does not settle")))
    }
}

struct KernelSetup {
    sys: MultiplierSystem,
    k: f64,
    n: i64,
    lip: Lipschitz,
    /// `(n/2)^{-k}`.
    scale: f64,
    /// Bound for `(n/2)^{-k} |L(xi)|` over all rows.
    row_major: f64,
    has_minus_identity: bool,
}

impl KernelSetup {
    fn new(sys: &MultiplierSystem, w: Complex64) -> Result<Self> {
        let k = sys.weight();
        if k <= 2.0 {
            return Err(Error::Domain(format!("the Bergman kernel needs weight > 2, got {k}")));
        }
        if w.im <= 0.0 {
            return Err(Error::Domain(format!("second argument {w} is not in the upper half plane")));
        }
        let inf = cusp_parameter_at(sys, &GroupElement::identity())?;
        let n = inf.cusp.width as i64;
        let lip = Lipschitz::new(k, inf.kappa);
        let scale = (n as f64 / 2.0).powf(-k);
        let row_major = scale * lip.eval(Complex64::new(0.0, w.im / n as f64))?.abs_sum;
        let has_minus_identity = sys.group().contains(&GroupElement::minus_identity());
        Ok(Self { sys: sys.clone(), k, n, lip, scale, row_major, has_minus_identity })
    }

    /// The element of the group with bottom row `(c, d)` and top row reduced
    /// modulo the width, if any.
    fn coset_rep(&self, c: i64, d: i64) -> Option<GroupElement> {
        let g0 = complete_bottom_row(c, d)?;
        (0..self.n).map(|t| GroupElement::u(t) * g0).find(|g| self.sys.group().contains(g))
    }

    /// Sum over the cosets with bottom rows `+-(c, d)`: value and absolute sum.
    fn row(&self, c: i64, d: i64, z: Complex64, w: Complex64) -> Result<(Complex64, f64)> {
        let mut value = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        // With -I in the group, nu(-I, .) = v(-I) (-1)^k = 1 makes the cosets
        // of (c, d) and (-c, -d) contribute equally.
        let signs: &[i64] = if self.has_minus_identity { &[1] } else { &[1, -1] };
        for &s in signs {
            let Some(g) = self.coset_rep(s * c, s * d) else { continue };
            let xi = (w + g.act(z)) / self.n as f64;
            let series = self.lip.eval(xi)?;
            let nu = self.sys.nu(&g, z)?;
            value += series.value * self.scale / nu;
            abs += series.abs_sum * self.scale / nu.norm();
        }
        if self.has_minus_identity {
            value *= 2.0;
            abs *= 2.0;
        }
        Ok((value, abs))
    }
}

fn check_point(z: Complex64) -> Result<()> {
    if z.im <= 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("point {z} is not in the upper half plane")));
    }
    Ok(())
}

struct Partial {
    terms: Vec<Complex64>,
    abs_sum: f64,
}

impl Partial {
    fn add_annulus(&mut self, setup: &KernelSetup, z: Complex64, w: Complex64, r_min: f64, r_max: f64) -> Result<()> {
        let mut rows = Vec::new();
        for_each_bottom_row(z, r_min, r_max, |c, d| {
            rows.push((c, d));
            if rows.len() > crate::modgroup::DEFAULT_BALL_BUDGET {
                return Err(Error::Resource(format!("kernel ball of radius {r_max} is too large")));
            }
            Ok(())
        })?;
        let vals: Vec<Result<(Complex64, f64)>> = rows.par_iter().map(|&(c, d)| setup.row(c, d, z, w)).collect();
        for v in vals {
            let (t, a) = v?;
            self.terms.push(t);
            self.abs_sum += a;
        }
        Ok(())
    }

    fn value(&self) -> Complex64 {
        pairwise_sum_complex(&self.terms)
    }

    fn rounding(&self) -> f64 {
        // A few roundings per term: the phase, the series and the division.
        16.0 * f64::EPSILON * self.abs_sum
    }
}

fn initial_radius(z: Complex64) -> f64 {
    2.0 * (1.0 + z.norm()) + 2.0
}

/// The kernel summed over bottom rows with `|cz + d| <= radius`.
pub fn kernel_at_radius(sys: &MultiplierSystem, z: Complex64, w: Complex64, radius: f64) -> Result<KernelValue> {
    check_point(z)?;
    let setup = KernelSetup::new(sys, w)?;
    let mut p = Partial { terms: Vec::new(), abs_sum: 0.0 };
    p.add_annulus(&setup, z, w, 0.0, radius)?;
    Ok(KernelValue {
        value: p.value(),
        truncation_radius: radius,
        tail_bound: setup.row_major * lattice_tail_bound(z, radius, setup.k),
        rounding_bound: p.rounding(),
    })
}

/// The kernel with the radius grown until the tail bound is at most
/// `tol |h|`, or below the rounding error of the summed part (beyond which a
/// larger radius can not help).
pub fn kernel(sys: &MultiplierSystem, z: Complex64, w: Complex64, tol: f64) -> Result<KernelValue> {
    check_point(z)?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let setup = KernelSetup::new(sys, w)?;
    let mut p = Partial { terms: Vec::new(), abs_sum: 0.0 };
    let mut radius = initial_radius(z);
    p.add_annulus(&setup, z, w, 0.0, radius)?;
    loop {
        let value = p.value();
        let tail = setup.row_major * lattice_tail_bound(z, radius, setup.k);
        let rounding = p.rounding();
        if tail <= tol * value.norm() || tail <= rounding {
            return Ok(KernelValue { value, truncation_radius: radius, tail_bound: tail, rounding_bound: rounding });
        }
        let next = radius * 1.3;
        if next > MAX_RADIUS {
            return Err(Error::Resource(format!(
                "kernel at ({z}, {w}) needs a radius beyond {MAX_RADIUS} for tolerance {tol:e}"
            )));
        }
        p.add_annulus(&setup, z, w, radius, next)?;
        radius = next;
    }
}

/// `sum_j |(f_j|tau)(z)|^2 = mu (k-1)/(8 pi) h^tau(z, -conj z)` for an
/// orthonormal basis `f_j`, with `h^tau` the kernel of the conjugate system.
/// Errors when the imaginary part or the rounding error exceed `tol` relative.
pub fn basis_sum_diag(sys: &MultiplierSystem, tau: &GroupElement, z: Complex64, tol: f64) -> Result<DiagValue> {
    check_point(z)?;
    let conj = sys.conjugate(tau);
    let h = kernel(&conj, z, -z.conj(), tol)?;
    let factor = sys.group().index() as f64 * (sys.weight() - 1.0) / (8.0 * PI);
    let value = factor * h.value.re;
    let out = DiagValue {
        value,
        tail_bound: factor * h.tail_bound,
        rounding_bound: factor * h.rounding_bound,
        radius: h.truncation_radius,
        imag_residue: factor * h.value.im.abs(),
    };
    let allowed = tol * value.abs();
    if out.rounding_bound > allowed {
        return Err(Error::Accuracy {
            message: format!("cancellation in the kernel diagonal at {z}"),
            estimate: value,
            error: out.rounding_bound,
        });
    }
    if out.imag_residue > allowed + out.tail_bound + out.rounding_bound {
        return Err(Error::Consistency(format!(
            "kernel diagonal at {z} has imaginary part {} against real part {value}",
            out.imag_residue
        )));
    }
    if value <= -(out.tail_bound + out.rounding_bound) {
        return Err(Error::Consistency(format!("kernel diagonal at {z} is negative: {value}")));
    }
    Ok(out)
}

/// Pairs `f` with `h(., -conj w)` by quadrature over the coset translates of
/// the standard domain (`lhs`) and evaluates `8 pi / (mu (k-1)) f(w)` (`rhs`).
/// `tol` is the relative accuracy asked of the kernel and, relative to
/// `|rhs|`, of the quadrature.
pub fn reproduce_check(f: &CuspForm, w: Complex64, tol: f64) -> Result<ReproduceCheck> {
    check_point(w)?;
    let sys = f.system();
    let k = sys.weight();
    let mu = sys.group().index() as f64;
    let rhs = f.eval(w)? * (8.0 * PI / (mu * (k - 1.0)));
    let w_bar = -w.conj();
    let ef = |z: Complex64| f.eval_scaled(z);
    let eh = |z: Complex64| -> Result<FormValue> {
        let h = kernel(sys, z, w_bar, tol)?;
        Ok(FormValue { mantissa: h.value, log_scale: 0.0, tail: h.tail_bound + h.rounding_bound })
    };
    let rate = cusp_decay_rate(sys)?;
    let (g, err) = gram_fn(sys.group(), k, &[&ef, &eh], rate, tol * rhs.norm())?;
    Ok(ReproduceCheck { lhs: g[(0, 1)], rhs, quad_error: err })
}

/// The same diagonal from Fourier coefficients alone, valid when the cusp
/// form space is one-dimensional: with `G` the `m`-th Poincare series at
/// infinity and `P = mu (4 pi (m + kappa))^{k-1} / (n^k Gamma(k-1))`, the
/// identity `sum_j conj(a_j(m)) f_j = P G` gives `|f(z)|^2 = P |G(z)|^2 / G^(m)`.
pub fn diag_fourier_dim_one(sys: &MultiplierSystem, m: i64, z: Complex64, r_max: i64, c_max: i64) -> Result<f64> {
    let id = GroupElement::identity();
    let inf = cusp_parameter_at(sys, &id)?;
    let (n, kappa) = (inf.cusp.width as f64, inf.kappa);
    let k = sys.weight();
    let mk = m as f64 + kappa;
    if mk <= 0.0 {
        return Err(Error::Domain(format!("index needs m + kappa > 0, got {mk}")));
    }
    let g = poincare_fourier(sys, &id, m, z, r_max, c_max)?;
    let g_m = delta_tau(sys, &id, m)? + poincare_coeff(sys, &id, m, m, c_max)?.value;
    let ln_p = (sys.group().index() as f64).ln() + (k - 1.0) * (4.0 * PI * mk).ln() - k * n.ln() - ln_gamma(k - 1.0);
    Ok(ln_p.exp() * g.norm_sqr() / g_m.re)
}

#[cfg(test)]
mod tests;
