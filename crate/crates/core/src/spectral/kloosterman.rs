use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modgroup::{gcd, mod_inverse, GroupElement};
use crate::multiplier::{cusp_parameter_at, from_turns, reduce_turns, sigma_turns, MultiplierSystem};
use crate::numerics::pairwise_sum_complex;

/// Inputs of one generalized Kloosterman sum `W(r, m; c)` attached to the
/// cusp `tau^{-1} inf`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KloostermanSpec {
    pub system: MultiplierSystem,
    pub tau: GroupElement,
    pub r: i64,
    pub m: i64,
    pub c: i64,
}

/// Cusp data and cached phases shared by all sums for one `(system, tau)`.
#[derive(Debug, Clone)]
pub struct KloostermanContext {
    system: MultiplierSystem,
    tau: GroupElement,
    tau_inv: GroupElement,
    n_inf: u64,
    kappa_inf: f64,
    n_cusp: u64,
    kappa_cusp: f64,
    sigma_tau_turns: f64,
    integral_weight: bool,
}

impl KloostermanContext {
    pub fn new(system: &MultiplierSystem, tau: &GroupElement) -> Result<Self> {
        let inf = cusp_parameter_at(system, &GroupElement::identity())?;
        let tau_inv = tau.inverse();
        let cusp = cusp_parameter_at(system, &tau_inv)?;
        let k = system.weight();
        Ok(Self {
            system: system.clone(),
            tau: *tau,
            tau_inv,
            n_inf: inf.cusp.width,
            kappa_inf: inf.kappa,
            n_cusp: cusp.cusp.width,
            kappa_cusp: cusp.kappa,
            sigma_tau_turns: sigma_turns(tau, &tau_inv, k)?,
            integral_weight: k.fract() == 0.0,
        })
    }

    pub fn system(&self) -> &MultiplierSystem {
        &self.system
    }

    pub fn tau(&self) -> &GroupElement {
        &self.tau
    }

    /// Width of the cusp at infinity.
    pub fn width_at_infinity(&self) -> u64 {
        self.n_inf
    }

    pub fn kappa_at_infinity(&self) -> f64 {
        self.kappa_inf
    }

    /// Width of the cusp `tau^{-1} inf`.
    pub fn width_at_cusp(&self) -> u64 {
        self.n_cusp
    }

    pub fn kappa_at_cusp(&self) -> f64 {
        self.kappa_cusp
    }

    /// Number of terms of `W(., .; c)` can not exceed this.
    pub fn trivial_bound(&self, c: i64) -> f64 {
        (self.n_inf * self.n_cusp) as f64 * c as f64
    }

    /// Matrices `(a b; c d)` in `tau G` with `a mod n' c`, `d mod n c`,
    /// where `n'` is the width of `tau^{-1} inf` and `n` the width at infinity.
    pub fn representatives(&self, c: i64) -> Result<Vec<GroupElement>> {
        if c < 1 {
            return Err(Error::Domain(format!("Kloosterman modulus must be positive, got {c}")));
        }
        let group = self.system.group();
        let d_range = self.n_inf as i64 * c;
        let mut out = Vec::new();
        for d in 0..d_range {
            if gcd(d, c) != 1 {
                continue;
            }
            let dbar = mod_inverse(d, c).expect("coprime");
            for j in 0..self.n_cusp as i64 {
                let a = dbar + j * c;
                let b = (i128::from(a) * i128::from(d) - 1) / i128::from(c);
                let g = GroupElement::new(a, b as i64, c, d)?;
                if group.contains(&(self.tau_inv * g)) {
                    out.push(g);
                }
            }
        }
        Ok(out)
    }

    /// `W(r, m; c)`: the sum over the representatives of
    /// `e((m + k')a/(n'c) + (r + k)d/(nc)) sigma(tau^{-1}, g) / (v(tau^{-1} g) sigma(tau, tau^{-1}))`.
    pub fn sum(&self, r: i64, m: i64, c: i64) -> Result<Complex64> {
        let reps = self.representatives(c)?;
        let k = self.system.weight();
        let trivial = self.system.is_trivial();
        let na = i128::from(self.n_cusp as i64) * i128::from(c);
        let nd = i128::from(self.n_inf as i64) * i128::from(c);
        let mut terms = Vec::with_capacity(reps.len());
        for g in &reps {
            let (a, d) = (i128::from(g.a), i128::from(g.d));
            // Integer parts exactly, the cusp parameters in floating point.
            let mut t = (i128::from(m) * a).rem_euclid(na) as f64 / na as f64
                + self.kappa_cusp * a as f64 / na as f64
                + (i128::from(r) * d).rem_euclid(nd) as f64 / nd as f64
                + self.kappa_inf * d as f64 / nd as f64;
            if !trivial {
                t -= self.system.upsilon_turns(&(self.tau_inv * *g))?;
            }
            if !self.integral_weight {
                t += sigma_turns(&self.tau_inv, g, k)? - self.sigma_tau_turns;
            }
            terms.push(from_turns(reduce_turns(t)));
        }
        Ok(pairwise_sum_complex(&terms))
    }
}

/// `W(r, m; c)` for a single specification.
pub fn kloosterman(spec: &KloostermanSpec) -> Result<Complex64> {
    KloostermanContext::new(&spec.system, &spec.tau)?.sum(spec.r, spec.m, spec.c)
}

/// The classical sum `S(m, n; c) = sum e((m dbar + n d)/c)` over `d mod c`
/// coprime to `c`.
pub fn classical_kloosterman(m: i64, n: i64, c: i64) -> Result<Complex64> {
    if c < 1 {
        return Err(Error::Domain(format!("Kloosterman modulus must be positive, got {c}")));
    }
    let c128 = i128::from(c);
    let terms: Vec<Complex64> = (0..c)
        .filter(|&d| gcd(d, c) == 1)
        .map(|d| {
            let dbar = i128::from(mod_inverse(d, c).expect("coprime"));
            let num = (i128::from(m) * dbar + i128::from(n) * i128::from(d)).rem_euclid(c128);
            from_turns(num as f64 / c as f64)
        })
        .collect();
    Ok(pairwise_sum_complex(&terms))
}
