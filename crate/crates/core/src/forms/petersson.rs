//! Petersson products `(1/mu) int_{F_G} f conj(g) y^k dmu` by quadrature over
//! the coset translates of the standard domain.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::form::{CuspForm, FormValue};
use crate::error::{Error, Result};
use crate::modgroup::Subgroup;
use crate::multiplier::{cusp_data, MultiplierSystem};
use crate::numerics::{integrate_fd_vec, CuspDecay, FdDomain};

/// A function to be paired: returns `f(z)` in scaled form.
pub type Evaluator<'a> = dyn Fn(Complex64) -> Result<FormValue> + Sync + 'a;

/// Smallest `4 pi eta_t / n_t` over the cusps: the decay rate of `|f|^2 y^k`.
pub fn cusp_decay_rate(system: &MultiplierSystem) -> Result<f64> {
    Ok(cusp_data(system)?
        .iter()
        .map(|d| 4.0 * PI * d.eta_floor / d.cusp.width as f64)
        .fold(f64::INFINITY, f64::min))
}

/// Gram matrix `G_ab = <f_a, f_b>` on `group` for weight `k`, together with
/// the quadrature error estimate (absolute, largest over entries).
pub fn gram_fn(
    group: &Subgroup,
    k: f64,
    evals: &[&Evaluator],
    decay_rate: f64,
    tol: f64,
) -> Result<(DMatrix<Complex64>, f64)> {
    let n = evals.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
    let failure: OnceLock<Error> = OnceLock::new();
    let integrand = |z: Complex64, out: &mut [f64]| {
        let mut vals = Vec::with_capacity(n);
        for e in evals {
            match e(z) {
                Ok(v) => vals.push(v),
                Err(err) => {
                    let _ = failure.set(err);
                    out.iter_mut().for_each(|o| *o = 0.0);
                    return;
                }
            }
        }
        let lny = k * z.im.ln();
        for (p, &(a, b)) in pairs.iter().enumerate() {
            let (fa, fb) = (&vals[a], &vals[b]);
            let w = fa.mantissa * fb.mantissa.conj() * (lny + fa.log_scale + fb.log_scale).exp();
            out[2 * p] = w.re;
            out[2 * p + 1] = w.im;
        }
    };
    let domain = FdDomain::union(group.cosets().to_vec(), CuspDecay::exponential(decay_rate, k));
    let mu = group.index() as f64;
    let r = integrate_fd_vec(2 * pairs.len(), &integrand, &domain, tol * mu);
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let r = r?;
    let mut g = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (p, &(a, b)) in pairs.iter().enumerate() {
        let v = Complex64::new(r.value[2 * p], r.value[2 * p + 1]) / mu;
        g[(a, b)] = v;
        g[(b, a)] = v.conj();
    }
    Ok((g, r.error / mu))
}

fn check_same_space(f: &CuspForm, g: &CuspForm) -> Result<()> {
    if f.system() != g.system() {
        return Err(Error::Domain(format!("forms for {} and {} cannot be paired", f.system(), g.system())));
    }
    Ok(())
}

/// `<f, g>` on the group of `f`.
pub fn petersson_inner(f: &CuspForm, g: &CuspForm, tol: f64) -> Result<Complex64> {
    check_same_space(f, g)?;
    let ef = |z: Complex64| f.eval_scaled(z);
    let eg = |z: Complex64| g.eval_scaled(z);
    let rate = cusp_decay_rate(f.system())?;
    let (m, _) = gram_fn(f.group(), f.weight(), &[&ef, &eg], rate, tol)?;
    Ok(m[(0, 1)])
}

/// `<f, f>`, strictly positive for a nonzero form. Absolute error `tol`.
pub fn petersson_norm(f: &CuspForm, tol: f64) -> Result<f64> {
    let ef = |z: Complex64| f.eval_scaled(z);
    let rate = cusp_decay_rate(f.system())?;
    let (m, _) = gram_fn(f.group(), f.weight(), &[&ef], rate, tol)?;
    let v = m[(0, 0)].re;
    if !(v > 0.0) {
        return Err(Error::Consistency(format!("Petersson norm {v} of a cusp form is not positive")));
    }
    Ok(v)
}

/// `<f|t, f|t>` on the conjugate group `t^{-1} G t`.
pub fn petersson_norm_slashed(f: &CuspForm, t: &crate::modgroup::GroupElement, tol: f64) -> Result<f64> {
    let conj = f.system().conjugate(t);
    let ef = |z: Complex64| f.slash_eval(t, z);
    let rate = cusp_decay_rate(&conj)?;
    let (m, _) = gram_fn(conj.group(), f.weight(), &[&ef], rate, tol)?;
    Ok(m[(0, 0)].re)
}
