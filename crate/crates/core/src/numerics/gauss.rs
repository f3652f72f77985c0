use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use super::quadrature::QuadResult;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    fn compute(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = ((i as f64 + 0.75) / (n as f64 + 0.5) * PI).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached `n`-point rule.
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("gauss cache poisoned");
    guard.entry(n).or_insert_with(|| Arc::new(GaussRule::compute(n))).clone()
}

const ADAPT_ORDER: usize = 20;
const ADAPT_MAX_INTERVALS: usize = 4000;

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn estimate(f: &dyn Fn(f64) -> f64, rule: &GaussRule, a: f64, b: f64) -> Piece {
    let m = 0.5 * (a + b);
    let whole = rule.integrate(a, b, f);
    let value = rule.integrate(a, m, f) + rule.integrate(m, b, f);
    Piece { a, b, value, error: (value - whole).abs() }
}

/// Global adaptive quadrature with a 20-point Gauss rule: the interval with
/// the largest error estimate (rule against the sum over its halves) is
/// bisected until the total estimate is below `max(abs_tol, rel_tol * |I|)`
/// or the interval budget runs out, in which case `converged` is false.
pub fn adaptive_integrate(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult<f64> {
    let rule = gauss_legendre(ADAPT_ORDER);
    let mut pieces = vec![estimate(f, &rule, a, b)];
    loop {
        let value: f64 = pieces.iter().map(|p| p.value).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        let tol = abs_tol.max(rel_tol * value.abs());
        if error <= tol {
            return QuadResult { value, error, converged: true };
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("at least one interval");
        let p = pieces.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if pieces.len() + 2 > ADAPT_MAX_INTERVALS || m <= p.a || m >= p.b {
            pieces.push(p);
            let value: f64 = pieces.iter().map(|p| p.value).sum();
            let error: f64 = pieces.iter().map(|p| p.error).sum();
            // Roundoff-limited: accept when the error is at the noise level.
            let noise = 64.0 * f64::EPSILON * pieces.iter().map(|p| p.value.abs()).sum::<f64>();
            return QuadResult { value, error, converged: error <= tol.max(noise) };
        }
        pieces.push(estimate(f, &rule, p.a, m));
        pieces.push(estimate(f, &rule, m, p.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_integrate_polynomials_exactly() {
        for n in [1usize, 2, 5, 10, 20, 33] {
            let r = gauss_legendre(n);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n}");
            let deg = 2 * n - 1;
            let v = r.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn adaptive_handles_endpoint_peak() {
        let r = adaptive_integrate(&|x| (-1000.0 * x).exp(), 0.0, 1.0, 1e-18, 1e-14);
        assert!(r.converged);
        assert!((r.value - (1.0 - (-1000.0f64).exp()) / 1000.0).abs() < 1e-16);
    }
}
