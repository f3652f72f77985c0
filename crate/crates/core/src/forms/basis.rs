//! Cusp forms for the full modular group and orthonormal bases.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::form::{monomial_form, CuspForm};
use super::petersson::{cusp_decay_rate, gram_fn, Evaluator};
use crate::error::{Error, Result};
use crate::numerics::ln_gamma;

/// Largest accepted condition number of the scaled Gram matrix.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

/// `dim S_k(SL2(Z))` for even `k`, 0 otherwise.
pub fn cusp_form_dimension_full(k: i64) -> usize {
    if k < 12 || k % 2 != 0 {
        return 0;
    }
    let m = k / 12 + if k % 12 == 2 { 0 } else { 1 };
    (m - 1) as usize
}

/// `Delta^a E4^b E6^c` for `a = 1..dim` with `c` in `{0, 1}`: a basis of
/// `S_k(SL2(Z))`, triangular in `q`.
pub fn monomial_basis_full(k: u32, count: usize) -> Result<Vec<CuspForm>> {
    let dim = cusp_form_dimension_full(i64::from(k));
    let mut out = Vec::with_capacity(dim);
    for a in 1..=dim as u32 {
        let w = k - 12 * a;
        let c = if w % 4 == 0 { 0 } else { 1 };
        let b = (w - 6 * c) / 4;
        out.push(monomial_form(a, b, c, count)?);
    }
    Ok(out)
}

/// An orthonormal basis together with the conditioning of its construction.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis {
    pub forms: Vec<CuspForm>,
    pub gram_condition: f64,
}

impl OrthonormalBasis {
    pub fn dim(&self) -> usize {
        self.forms.len()
    }

    pub fn weight(&self) -> f64 {
        self.forms.first().map(|f| f.weight()).unwrap_or(0.0)
    }

    /// `ln(y^k sum_j |f_j(z)|^2)`.
    pub fn ln_weighted_sum_sq(&self, z: Complex64) -> Result<f64> {
        let k = self.weight();
        let mut terms = Vec::with_capacity(self.dim());
        for f in &self.forms {
            terms.push(f.eval_scaled(z)?.ln_weighted_sq(k, z.im));
        }
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Ok(top);
        }
        Ok(top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln())
    }

    pub fn weighted_sum_sq(&self, z: Complex64) -> Result<f64> {
        Ok(self.ln_weighted_sum_sq(z)?.exp())
    }

    /// `sum_j |hat f_j(i)|^2` for coefficient index `i`.
    pub fn coefficient_square_sum(&self, i: usize) -> f64 {
        self.forms.iter().map(|f| f.coefficients().get(i).map_or(0.0, |a| a.norm_sqr())).sum()
    }
}

/// Rough size of `<f, f>` from the leading term over the strip:
/// `|a|^2 Gamma(k-1) / (4 pi l / n)^{k-1}`.
fn strip_estimate(f: &CuspForm) -> Option<f64> {
    let (i, a) = f.coefficients().iter().enumerate().find(|(_, a)| a.norm() > 0.0)?;
    let k = f.weight();
    let l = f.exponent(i) / f.width() as f64;
    Some((2.0 * a.norm().ln() + ln_gamma(k - 1.0) - (k - 1.0) * (4.0 * PI * l).ln()).exp())
}

/// Orthonormalises `forms` (all in one space) under the Petersson product:
/// each form is first rescaled to unit norm, then the Gram matrix is
/// factored `G = L L*` and the basis is `L^{-1}` applied to the forms.
pub fn orthonormal_basis(forms: &[CuspForm], rel_tol: f64) -> Result<OrthonormalBasis> {
    let Some(first) = forms.first() else {
        return Ok(OrthonormalBasis { forms: vec![], gram_condition: 1.0 });
    };
    let k = first.weight();
    let rate = cusp_decay_rate(first.system())?;
    let group = first.group().clone();

    // Unit-norm rescaling: strip estimate, then two refinements of the norm.
    let mut scaled = Vec::with_capacity(forms.len());
    for f in forms {
        if f.system() != first.system() {
            return Err(Error::Domain("basis forms must share one multiplier system".into()));
        }
        let mut est = strip_estimate(f).ok_or_else(|| Error::Domain("zero form in basis".into()))?;
        for _ in 0..2 {
            let ef = |z: Complex64| f.eval_scaled(z);
            let (m, _) = gram_fn(&group, k, &[&ef], rate, 1e-3 * est)?;
            est = m[(0, 0)].re;
            if !(est > 0.0) {
                return Err(Error::Numeric { message: "non-positive norm in basis construction".into(), condition: f64::INFINITY });
            }
        }
        scaled.push(f.scaled(Complex64::new(est.powf(-0.5), 0.0)));
    }

    let evals: Vec<Box<Evaluator>> = scaled
        .iter()
        .map(|f| Box::new(move |z: Complex64| f.eval_scaled(z)) as Box<Evaluator>)
        .collect();
    let refs: Vec<&Evaluator> = evals.iter().map(|b| b.as_ref()).collect();
    let (g, _) = gram_fn(&group, k, &refs, rate, rel_tol)?;

    let eig = g.clone().symmetric_eigen();
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(Error::Numeric { message: "Gram matrix is ill-conditioned".into(), condition });
    }
    let chol = g.cholesky().ok_or(Error::Numeric { message: "Gram matrix is not positive definite".into(), condition })?;
    let n = scaled.len();
    let l_inv = chol
        .l()
        .solve_lower_triangular(&DMatrix::<Complex64>::identity(n, n))
        .ok_or(Error::Numeric { message: "singular Cholesky factor".into(), condition })?;
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let w: Vec<Complex64> = (0..n).map(|b| l_inv[(j, b)]).collect();
        out.push(CuspForm::combination(&scaled, &w)?);
    }
    Ok(OrthonormalBasis { forms: out, gram_condition: condition })
}

/// Orthonormal basis of `S_k(SL2(Z))` from the monomial basis.
pub fn orthonormal_basis_full(k: u32, count: usize, rel_tol: f64) -> Result<OrthonormalBasis> {
    orthonormal_basis(&monomial_basis_full(k, count)?, rel_tol)
}

/// `f / |f|` together with `<f, f>`, the norm computed to relative accuracy
/// `rel_tol`. Errors on the zero form.
pub fn normalized(f: &CuspForm, rel_tol: f64) -> Result<(CuspForm, f64)> {
    let mut est = strip_estimate(f).ok_or_else(|| Error::Domain("the zero form can not be normalized".into()))?;
    let ef = |z: Complex64| f.eval_scaled(z);
    let rate = cusp_decay_rate(f.system())?;
    for tol in [1e-3, rel_tol] {
        let (m, _) = gram_fn(f.group(), f.weight(), &[&ef], rate, tol * est)?;
        est = m[(0, 0)].re;
        if !(est > 0.0) {
            return Err(Error::Consistency(format!("Petersson norm {est} of a cusp form is not positive")));
        }
    }
    Ok((f.scaled(Complex64::new(est.powf(-0.5), 0.0)), est))
}
