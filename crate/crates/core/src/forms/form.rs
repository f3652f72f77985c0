use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::qseries::{eisenstein, euler_product, mul_f64, pow_exact, pow_f64};
use crate::error::{Error, Result};
use crate::modgroup::{GroupElement, Subgroup};
use crate::multiplier::{cusp_parameter_at, MultiplierSystem};
use crate::numerics::principal_pow_parts;

/// Default number of stored coefficients.
pub const DEFAULT_COEFFS: usize = 200;

/// Evaluation fails when the certified tail exceeds this fraction of
/// `sum |a_m q^(m+kappa)|`.
pub const EVAL_REL_TAIL: f64 = 1e-8;

/// Summation stops once the remaining tail is below this fraction.
const STOP_REL_TAIL: f64 = 1e-17;

/// A cusp form given by its expansion at infinity,
/// `f(z) = sum_i a_i e^{2 pi i (eta + i) z / n}` with `eta` the decay floor
/// (`kappa`, or 1 when `kappa = 0`) and `n` the width at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspForm {
    system: MultiplierSystem,
    kappa: f64,
    width: u64,
    coefficients: Vec<Complex64>,
    /// `ln max_i |a_i| / (eta + i)^{k/2}`, the fitted growth constant.
    ln_growth: f64,
}

/// `f(z) = mantissa * e^{log_scale}`, with the certified truncation tail in
/// the same scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormValue {
    pub mantissa: Complex64,
    pub log_scale: f64,
    pub tail: f64,
}

impl FormValue {
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    /// `ln(y^k |f|^2)`.
    pub fn ln_weighted_sq(&self, k: f64, y: f64) -> f64 {
        k * y.ln() + 2.0 * (self.log_scale + self.mantissa.norm().ln())
    }
}

impl CuspForm {
    /// Coefficient `i` multiplies `e^{2 pi i (eta + i) z / n}`.
    pub fn new(system: MultiplierSystem, coefficients: Vec<Complex64>) -> Result<Self> {
        let data = cusp_parameter_at(&system, &GroupElement::identity())?;
        let k = system.weight();
        let eta = data.eta_floor;
        let ln_growth = coefficients
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 0.0)
            .map(|(i, a)| a.norm().ln() - 0.5 * k * (eta + i as f64).ln())
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { kappa: data.kappa, width: data.cusp.width, system, coefficients, ln_growth })
    }

    pub fn system(&self) -> &MultiplierSystem {
        &self.system
    }

    pub fn group(&self) -> &Subgroup {
        self.system.group()
    }

    pub fn weight(&self) -> f64 {
        self.system.weight()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn width(&self) -> u64 {
        self.width
    }

    pub fn eta_floor(&self) -> f64 {
        if self.kappa > 0.0 {
            self.kappa
        } else {
            1.0
        }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `m + kappa` for coefficient `i`.
    pub fn exponent(&self, i: usize) -> f64 {
        self.eta_floor() + i as f64
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|a| a.norm() == 0.0)
    }

    pub fn truncated(&self, count: usize) -> Result<Self> {
        Self::new(self.system.clone(), self.coefficients[..count.min(self.coefficients.len())].to_vec())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let coefficients: Vec<Complex64> = self.coefficients.iter().map(|a| a * c).collect();
        let ln_growth = if c.norm() == 0.0 { f64::NEG_INFINITY } else { self.ln_growth + c.norm().ln() };
        Self { coefficients, ln_growth, ..self.clone() }
    }

    /// `sum_j w_j f_j` over forms sharing one multiplier system.
    pub fn combination(forms: &[CuspForm], weights: &[Complex64]) -> Result<Self> {
        let first = forms.first().ok_or_else(|| Error::Domain("empty linear combination".into()))?;
        let len = forms.iter().map(|f| f.coefficients.len()).min().unwrap_or(0);
        let mut coefficients = vec![Complex64::new(0.0, 0.0); len];
        for (f, w) in forms.iter().zip(weights) {
            if f.system != first.system {
                return Err(Error::Domain("linear combination of forms with different multiplier systems".into()));
            }
            for (c, a) in coefficients.iter_mut().zip(&f.coefficients) {
                *c += w * a;
            }
        }
        Self::new(first.system.clone(), coefficients)
    }

    /// The same function seen as a form on a subgroup. The expansion at
    /// infinity is reused, so the subgroup must have the same width there.
    pub fn restrict(&self, group: Subgroup) -> Result<Self> {
        let system = self.system.restrict(group)?;
        let f = Self::new(system, self.coefficients.clone())?;
        if f.width != self.width {
            return Err(Error::Domain(format!(
                "restriction changes the width at infinity from {} to {}",
                self.width, f.width
            )));
        }
        Ok(f)
    }

    /// Truncated expansion with a certified tail from the fitted growth
    /// `|a_i| <= C (eta + i)^{k/2}`.
    pub fn eval_scaled(&self, z: Complex64) -> Result<FormValue> {
        if !(z.im > 0.0) {
            return Err(Error::Domain(format!("cusp forms are evaluated in the upper half plane, got {z}")));
        }
        let k = self.weight();
        let n = self.width as f64;
        let eta = self.eta_floor();
        let log_scale = -2.0 * PI * eta * z.im / n;
        let ln_q = -2.0 * PI * z.im / n;
        let step = Complex64::from_polar(1.0, 2.0 * PI * z.re / n);
        let mut phase = Complex64::from_polar(1.0, 2.0 * PI * eta * z.re / n);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut tail = 0.0;
        let count = self.coefficients.len();
        for (i, a) in self.coefficients.iter().enumerate() {
            let mag = (i as f64 * ln_q).exp();
            sum += a * phase * mag;
            abs_sum += a.norm() * mag;
            phase *= step;
            tail = self.tail_from(i + 1, ln_q, k);
            if tail <= STOP_REL_TAIL * abs_sum && i >= 2 {
                break;
            }
        }
        if count == 0 {
            tail = self.tail_from(0, ln_q, k);
        }
        if tail > EVAL_REL_TAIL * abs_sum {
            return Err(Error::Accuracy {
                message: format!("q-expansion of weight {k} truncated at {count} terms is too short at {z}"),
                estimate: sum.norm(),
                error: tail,
            });
        }
        Ok(FormValue { mantissa: sum, log_scale, tail })
    }

    /// Bound for `sum_{j >= i} C (eta+j)^{k/2} |q|^j`, which dominates the
    /// unsummed stored terms as well as the unknown ones. The term ratio
    /// decreases in `j`, so once it is below 1 the rest is geometric;
    /// otherwise the bound is infinite.
    fn tail_from(&self, i: usize, ln_q: f64, k: f64) -> f64 {
        if self.ln_growth == f64::NEG_INFINITY {
            return 0.0;
        }
        let l = self.exponent(i);
        let ratio = (0.5 * k * ((l + 1.0) / l).ln() + ln_q).exp();
        if ratio >= 1.0 {
            return f64::INFINITY;
        }
        (self.ln_growth + 0.5 * k * l.ln() + i as f64 * ln_q).exp() / (1.0 - ratio)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_scaled(z)?.value())
    }

    /// `(f|_k t)(z) = j(t, z)^{-k} f(t z)`.
    pub fn slash_eval(&self, t: &GroupElement, z: Complex64) -> Result<FormValue> {
        let v = self.eval_scaled(t.act(z))?;
        let (ln_abs, arg) = principal_pow_parts(t.j(z), -self.weight());
        let phase = Complex64::from_polar(1.0, arg);
        Ok(FormValue { mantissa: v.mantissa * phase, log_scale: v.log_scale + ln_abs, tail: v.tail })
    }

    pub fn to_record(&self) -> FormRecord {
        FormRecord {
            group: self.group().descriptor(),
            system: self.system.to_string(),
            weight: self.weight(),
            kappa: self.kappa,
            n: self.width,
            coefficients: self.coefficients.iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn from_record(r: &FormRecord) -> Result<Self> {
        let group: Subgroup = r.group.parse()?;
        let system = MultiplierSystem::parse(&r.system, Some(&group))?;
        if (system.weight() - r.weight).abs() > 1e-12 {
            return Err(Error::Parse(format!("weight {} does not match system {}", r.weight, r.system)));
        }
        let f = Self::new(system, r.coefficients.iter().map(|c| Complex64::new(c[0], c[1])).collect())?;
        if (f.kappa - r.kappa).abs() > 1e-12 || f.width != r.n {
            return Err(Error::Parse(format!(
                "record kappa/width ({}, {}) disagree with the system ({}, {})",
                r.kappa, r.n, f.kappa, f.width
            )));
        }
        Ok(f)
    }
}

/// Serialized form: expansion data at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormRecord {
    pub group: String,
    pub system: String,
    pub weight: f64,
    pub kappa: f64,
    pub n: u64,
    pub coefficients: Vec<[f64; 2]>,
}

impl Serialize for CuspForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CuspForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FormRecord::deserialize(d)?;
        CuspForm::from_record(&r).map_err(serde::de::Error::custom)
    }
}

/// Coefficients of `prod (1 - q^n)^p`; exact when the `i128` computation
/// does not overflow.
fn eta_power_series(p: u32, count: usize) -> Vec<f64> {
    let base = euler_product(count);
    match pow_exact(&base, p, count) {
        Some(v) => v.iter().map(|&x| x as f64).collect(),
        None => pow_f64(&base.iter().map(|&x| x as f64).collect::<Vec<_>>(), p, count),
    }
}

/// `eta(z)^p`: weight `p/2` on the full group with the eta multiplier to the
/// power `p`, `count` stored coefficients.
pub fn eta_form(p: u32, count: usize) -> Result<CuspForm> {
    if p == 0 {
        return Err(Error::Domain("eta power form needs a positive power".into()));
    }
    let system = MultiplierSystem::eta_power(p)?;
    let series = eta_power_series(p, count);
    // Leading exponent p/24 = eta_floor + lead.
    let lead_exponent = f64::from(p) / 24.0;
    let kappa = lead_exponent.fract();
    let eta = if kappa > 1e-12 { kappa } else { 1.0 };
    let lead = (lead_exponent - eta).round() as usize;
    let mut coefficients = vec![Complex64::new(0.0, 0.0); lead];
    coefficients.extend(series.iter().take(count.saturating_sub(lead)).map(|&x| Complex64::new(x, 0.0)));
    CuspForm::new(system, coefficients)
}

/// `eta(z)^{2r}`, of weight `r`.
pub fn eta_power_form(r: u32, count: usize) -> Result<CuspForm> {
    eta_form(2 * r, count)
}

/// Ramanujan's `Delta = eta^24`.
pub fn delta(count: usize) -> Result<CuspForm> {
    eta_power_form(12, count)
}

/// `Delta^a E4^b E6^c` with `a >= 1`, a cusp form of weight `12a + 4b + 6c`
/// on the full group.
pub fn monomial_form(a: u32, b: u32, c: u32, count: usize) -> Result<CuspForm> {
    if a == 0 {
        return Err(Error::Domain("monomial needs a positive power of Delta to be cuspidal".into()));
    }
    let k = f64::from(12 * a + 4 * b + 6 * c);
    let d: Vec<f64> = eta_power_series(24, count);
    let mut series = pow_f64(&d, a, count);
    series = mul_f64(&series, &pow_f64(&eisenstein(4, count), b, count), count);
    series = mul_f64(&series, &pow_f64(&eisenstein(6, count), c, count), count);
    // Delta^a starts at q^a; coefficient index i is exponent 1 + i.
    let mut coefficients = vec![Complex64::new(0.0, 0.0); (a - 1) as usize];
    coefficients.extend(series.iter().take(count.saturating_sub((a - 1) as usize)).map(|&x| Complex64::new(x, 0.0)));
    CuspForm::new(MultiplierSystem::trivial(k, Subgroup::full())?, coefficients)
}
