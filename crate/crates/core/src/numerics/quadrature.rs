//! Adaptive quadrature over the standard fundamental domain
//! `F = {|x| <= 1/2, |z| >= 1}` against `dx dy / y^2`.
//!
//! The domain is cut into a curved strip `sqrt(1-x^2) <= y <= 1` and
//! rectangular bands `[y_i, y_{i+1}]` up to a height `Y`; above `Y` the
//! integral is closed with the caller's decay model `C y^p e^{-rate y}`.
//! Each top-level cell is refined independently (in parallel) by 4-way
//! splitting with a tensor Gauss rule, and the cell results are combined by a
//! fixed pairwise reduction.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gauss::{adaptive_integrate, gauss_legendre, GaussRule};
use super::sum::pairwise_sum;
use crate::error::{Error, Result};
use crate::modgroup::GroupElement;

/// Declared cusp behaviour of an integrand: `|g(x+iy)| ~ C y^power e^{-rate y}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspDecay {
    pub rate: f64,
    pub power: f64,
}

impl CuspDecay {
    pub fn exponential(rate: f64, power: f64) -> Self {
        Self { rate, power }
    }

    /// Bounded integrand with no decay; valid because `dy/y^2` is integrable.
    pub fn none() -> Self {
        Self { rate: 0.0, power: 0.0 }
    }
}

/// A union of translates `g F` of the standard domain.
#[derive(Debug, Clone)]
pub struct FdDomain {
    pub translates: Vec<GroupElement>,
    pub decay: CuspDecay,
}

impl FdDomain {
    pub fn standard(decay: CuspDecay) -> Self {
        Self { translates: vec![GroupElement::identity()], decay }
    }

    pub fn union(translates: Vec<GroupElement>, decay: CuspDecay) -> Self {
        Self { translates, decay }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub converged: bool,
}

const RULE_ORDER: usize = 10;
const MAX_DEPTH: u32 = 9;
const BREAKPOINTS: [f64; 6] = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0];
const CURVED_PIECES: usize = 8;
const BAND_PIECES: usize = 4;
const TAIL_SHARE: f64 = 0.05;

#[derive(Debug, Clone, Copy)]
enum Shape {
    /// `y = yb(x) + t (1 - yb(x))`, `t` in `[t0, t1]` within `[0, 1]`.
    Curved,
    /// `y = t` directly.
    Rect,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    shape: Shape,
    x0: f64,
    x1: f64,
    t0: f64,
    t1: f64,
}

impl Cell {
    fn split(&self) -> [Cell; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let tm = 0.5 * (self.t0 + self.t1);
        let c = |x0, x1, t0, t1| Cell { shape: self.shape, x0, x1, t0, t1 };
        [c(self.x0, xm, self.t0, tm), c(xm, self.x1, self.t0, tm), c(self.x0, xm, tm, self.t1), c(xm, self.x1, tm, self.t1)]
    }

    /// Maps rule coordinates to `(z, jacobian / y^2)`.
    fn point(&self, x: f64, t: f64) -> (Complex64, f64) {
        match self.shape {
            Shape::Curved => {
                let yb = (1.0 - x * x).sqrt();
                let y = yb + t * (1.0 - yb);
                (Complex64::new(x, y), (1.0 - yb) / (y * y))
            }
            Shape::Rect => (Complex64::new(x, t), 1.0 / (t * t)),
        }
    }
}

struct Integrator<'a> {
    f: &'a (dyn Fn(Complex64, &mut [f64]) + Sync),
    translates: &'a [GroupElement],
    dim: usize,
    rule: &'a GaussRule,
}

impl Integrator<'_> {
    /// Sum of the integrand over all translates at a point of F.
    fn eval(&self, z: Complex64, acc: &mut [f64], scratch: &mut [f64], weight: f64) {
        for g in self.translates {
            scratch.iter_mut().for_each(|s| *s = 0.0);
            let gz = g.act(z);
            (self.f)(gz, scratch);
            for (a, s) in acc.iter_mut().zip(scratch.iter()) {
                *a += weight * s;
            }
        }
    }

    /// Tensor rule on a cell: returns the integral vector and the hyperbolic area.
    fn cell_rule(&self, c: &Cell) -> (Vec<f64>, f64) {
        let mut acc = vec![0.0; self.dim];
        let mut scratch = vec![0.0; self.dim];
        let hx = 0.5 * (c.x1 - c.x0);
        let cx = 0.5 * (c.x1 + c.x0);
        let ht = 0.5 * (c.t1 - c.t0);
        let ct = 0.5 * (c.t1 + c.t0);
        let mut area = 0.0;
        for (xi, wi) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let x = cx + hx * xi;
            for (tj, wj) in self.rule.nodes.iter().zip(&self.rule.weights) {
                let t = ct + ht * tj;
                let (z, jac) = c_point(c, x, t);
                let w = wi * wj * hx * ht * jac;
                area += w;
                self.eval(z, &mut acc, &mut scratch, w);
            }
        }
        (acc, area)
    }

    /// Returns (value, error, converged).
    fn refine(&self, cell: &Cell, whole: Vec<f64>, area: f64, tol: f64, depth: u32) -> (Vec<f64>, f64, bool) {
        let kids = cell.split();
        let evals: Vec<(Vec<f64>, f64)> = kids.iter().map(|k| self.cell_rule(k)).collect();
        let mut both = vec![0.0; self.dim];
        for (v, _) in &evals {
            for (b, x) in both.iter_mut().zip(v) {
                *b += x;
            }
        }
        let err = both.iter().zip(&whole).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if err <= tol {
            return (both, err, true);
        }
        if depth >= MAX_DEPTH {
            return (both, err, false);
        }
        let mut value = vec![0.0; self.dim];
        let mut total_err = 0.0;
        let mut ok = true;
        for (k, (v, a)) in kids.iter().zip(evals) {
            let share = if area > 0.0 { a / area } else { 0.25 };
            let (cv, ce, cok) = self.refine(k, v, a, tol * share, depth + 1);
            for (x, y) in value.iter_mut().zip(cv) {
                *x += y;
            }
            total_err += ce;
            ok &= cok;
        }
        (value, total_err, ok)
    }
}

fn c_point(c: &Cell, x: f64, t: f64) -> (Complex64, f64) {
    c.point(x, t)
}

/// Bands used below height `top`.
fn band_edges(top: f64) -> Vec<f64> {
    let mut edges: Vec<f64> = BREAKPOINTS.iter().copied().filter(|&b| b < top).collect();
    let mut b = 8.0;
    while b < top {
        edges.push(b);
        edges.push(1.5 * b);
        b *= 2.0;
    }
    edges.retain(|&e| e < top);
    edges.push(top);
    edges.dedup();
    edges
}

fn candidate_heights() -> Vec<f64> {
    let mut v = vec![2.0, 3.0, 4.0, 6.0];
    let mut b = 8.0;
    while b <= 65536.0 {
        v.push(b);
        v.push(1.5 * b);
        b *= 2.0;
    }
    v
}

/// `T(Y) = int_Y^inf (y/Y)^p e^{-rate (y - Y)} y^{-2} dy`.
fn tail_profile(decay: CuspDecay, top: f64) -> f64 {
    let p = decay.power;
    if decay.rate <= 0.0 {
        return 1.0 / ((1.0 - p) * top);
    }
    let l = 1.0 / decay.rate;
    let f = move |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let u = l * s / (1.0 - s);
        let y = top + u;
        let ln = p * (y / top).ln() - decay.rate * u - 2.0 * y.ln();
        ln.exp() * l / ((1.0 - s) * (1.0 - s))
    };
    adaptive_integrate(&f, 0.0, 1.0, 1e-300, 1e-12).value
}

/// Integral over the domain of a vector-valued integrand (`dim` components).
pub fn integrate_fd_vec(
    dim: usize,
    integrand: &(dyn Fn(Complex64, &mut [f64]) + Sync),
    domain: &FdDomain,
    tol: f64,
) -> Result<QuadResult<Vec<f64>>> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("quadrature tolerance must be positive, got {tol}")));
    }
    if domain.decay.rate <= 0.0 && domain.decay.power >= 1.0 {
        return Err(Error::Domain("non-decaying integrand with power >= 1 is not integrable at the cusp".into()));
    }
    let rule = gauss_legendre(RULE_ORDER);
    let integ = Integrator { f: integrand, translates: &domain.translates, dim, rule: &rule };

    // Height of the analytic tail closure and the tail value itself.
    let line_rule = gauss_legendre(32);
    let line = |y: f64| -> (Vec<f64>, f64) {
        let mut acc = vec![0.0; dim];
        let mut abs_acc = vec![0.0; dim];
        let mut scratch = vec![0.0; dim];
        let mut single = vec![0.0; dim];
        for (xi, wi) in line_rule.nodes.iter().zip(&line_rule.weights) {
            let z = Complex64::new(0.5 * xi, y);
            single.iter_mut().for_each(|s| *s = 0.0);
            integ.eval(z, &mut single, &mut scratch, 1.0);
            for j in 0..dim {
                acc[j] += 0.5 * wi * single[j];
                abs_acc[j] += 0.5 * wi * single[j].abs();
            }
        }
        let mag = abs_acc.iter().copied().fold(0.0, f64::max);
        (acc, mag)
    };
    let (top, tail) = if domain.decay.rate <= 0.0 {
        let top = 4.0;
        let (avg, _) = line(top);
        let t = tail_profile(domain.decay, top);
        (top, avg.iter().map(|a| a * t).collect::<Vec<_>>())
    } else {
        let mut chosen = None;
        for y in candidate_heights() {
            let (avg, mag) = line(y);
            let t = tail_profile(domain.decay, y);
            if mag * t <= TAIL_SHARE * tol {
                chosen = Some((y, avg.iter().map(|a| a * t).collect::<Vec<_>>()));
                break;
            }
        }
        match chosen {
            Some(c) => c,
            None => {
                return Err(Error::Accuracy {
                    message: "cusp tail does not fall below tolerance within height budget".into(),
                    estimate: f64::NAN,
                    error: f64::INFINITY,
                })
            }
        }
    };

    let mut cells = Vec::new();
    let w = 1.0 / CURVED_PIECES as f64;
    for i in 0..CURVED_PIECES {
        let x0 = -0.5 + i as f64 * w;
        cells.push(Cell { shape: Shape::Curved, x0, x1: x0 + w, t0: 0.0, t1: 1.0 });
    }
    let edges = band_edges(top);
    let wb = 1.0 / BAND_PIECES as f64;
    for pair in edges.windows(2) {
        for i in 0..BAND_PIECES {
            let x0 = -0.5 + i as f64 * wb;
            cells.push(Cell { shape: Shape::Rect, x0, x1: x0 + wb, t0: pair[0], t1: pair[1] });
        }
    }
    // Domain hyperbolic area below `top` distributes the tolerance.
    let total_area = std::f64::consts::PI / 3.0 - 1.0 / top;
    let budget = (1.0 - 2.0 * TAIL_SHARE) * tol;

    let results: Vec<(Vec<f64>, f64, bool)> = cells
        .par_iter()
        .map(|c| {
            let (v, a) = integ.cell_rule(c);
            integ.refine(c, v, a, budget * a / total_area, 0)
        })
        .collect();

    let mut value = Vec::with_capacity(dim);
    for j in 0..dim {
        let parts: Vec<f64> = results.iter().map(|r| r.0[j]).collect();
        value.push(pairwise_sum(&parts) + tail[j]);
    }
    let tail_err = if domain.decay.rate <= 0.0 { 0.0 } else { TAIL_SHARE * tol };
    let error = pairwise_sum(&results.iter().map(|r| r.1).collect::<Vec<_>>()) + tail_err;
    let converged = results.iter().all(|r| r.2);
    if !converged {
        return Err(Error::Accuracy {
            message: "adaptive refinement hit the depth limit".into(),
            estimate: value.first().copied().unwrap_or(f64::NAN),
            error,
        });
    }
    Ok(QuadResult { value, error, converged })
}

/// Scalar version of [`integrate_fd_vec`].
pub fn integrate_fd(
    integrand: &(dyn Fn(Complex64) -> f64 + Sync),
    domain: &FdDomain,
    tol: f64,
) -> Result<QuadResult<f64>> {
    let f = |z: Complex64, out: &mut [f64]| out[0] = integrand(z);
    let r = integrate_fd_vec(1, &f, domain, tol)?;
    Ok(QuadResult { value: r.value[0], error: r.error, converged: r.converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn area_of_fundamental_domain() {
        let r = integrate_fd(&|_| 1.0, &FdDomain::standard(CuspDecay::none()), 1e-12).unwrap();
        assert!((r.value - PI / 3.0).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn indicator_above_two() {
        let r = integrate_fd(
            &|z| if z.im > 2.0 { 1.0 } else { 0.0 },
            &FdDomain::standard(CuspDecay::none()),
            1e-12,
        )
        .unwrap();
        assert!((r.value - 0.5).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn exponential_tail_is_closed() {
        // int_F e^{-y} y^2 dmu = int_{F} e^{-y} dx dy; above y=1 it is e^{-1}.
        let f = |z: Complex64| (-z.im).exp() * z.im * z.im;
        let r = integrate_fd(&f, &FdDomain::standard(CuspDecay::exponential(1.0, 2.0)), 1e-12).unwrap();
        let below = adaptive_integrate(
            &|x: f64| {
                let yb = (1.0 - x * x).sqrt();
                (-yb).exp() - (-1.0f64).exp()
            },
            -0.5,
            0.5,
            1e-15,
            1e-14,
        )
        .value;
        assert!((r.value - ((-1.0f64).exp() + below)).abs() < 1e-11);
    }

    #[test]
    fn bad_tolerance_is_rejected() {
        assert!(integrate_fd(&|_| 1.0, &FdDomain::standard(CuspDecay::none()), 0.0).is_err());
    }
}
