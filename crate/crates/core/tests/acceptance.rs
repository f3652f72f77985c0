//! End-to-end acceptance suite. Each criterion runs in turn and reports one
//! PASS/FAIL line on stderr (written directly, so it shows without
//! `--nocapture`); the test fails if any criterion fails.

use std::f64::consts::TAU;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use holosup::bergman::{basis_sum_diag, diag_fourier_dim_one, reproduce_check};
use holosup::bessel::{bessel_j_log, bessel_langer, bessel_ref, bessel_ref_log, BesselKind};
use holosup::forms::{delta, normalized, petersson_norm, DEFAULT_COEFFS};
use holosup::modgroup::{complete_bottom_row, GroupElement, Subgroup};
use holosup::multiplier::{cusp_parameter, sigma_turns, turn_distance, upsilon, MultiplierSystem};
use holosup::numerics::gauss_legendre;
use holosup::spectral::{coeff_square_sum, KloostermanContext};
use holosup::supnorm::{lemma_suite, stability_suite, theorem3_scan, Theorem3Config, LEMMA_SLACK, STABILITY_TOL};
use holosup::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(label: &str, elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, format!("{label} took {elapsed:?}, limit {limit:?}"))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn full(k: f64) -> MultiplierSystem {
    MultiplierSystem::trivial(k, Subgroup::full()).unwrap()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Fitted bound for `|Langer - J| rho^{4/3}` over `x in [0.3 rho, 3 rho]`.
const LANGER_CONSTANT: f64 = 0.005;

fn bessel_oracle() -> Outcome {
    let start = Instant::now();
    let mut rhos = vec![0.0];
    rhos.extend(logspace(0.1, 300.0, 19));
    let xs = logspace(0.01, 1000.0, 10);
    let (mut worst, mut points) = (0.0f64, 0);
    for &rho in &rhos {
        for &x in &xs {
            let a = bessel_j_log(rho, x).map_err(|e| e.to_string())?;
            let b = bessel_ref_log(BesselKind::J, rho, x).map_err(|e| e.to_string())?;
            points += 1;
            if b.ln_abs() < -280.0 * std::f64::consts::LN_10 {
                ensure((a.to_f64() - b.to_f64()).abs() <= 1e-12, format!("rho {rho}, x {x}: absolute error"))?;
            } else {
                let e = (a.sub(b).ln_abs() - b.ln_abs()).exp();
                worst = worst.max(e);
                ensure(e <= 1e-8, format!("rho {rho}, x {x}: relative error {e:e}"))?;
            }
        }
    }
    ensure(points == 200, format!("{points} grid points"))?;
    let mut scaled = Vec::new();
    for rho in [30.0f64, 60.0, 120.0, 240.0] {
        let mut m = 0.0f64;
        for i in 0..61 {
            let x = rho * (0.3 + 2.7 * i as f64 / 60.0);
            if (x - rho).abs() < 1e-9 {
                continue;
            }
            let l = bessel_langer(rho, x).map_err(|e| e.to_string())?.value;
            let r = bessel_ref(BesselKind::J, rho, x).map_err(|e| e.to_string())?;
            m = m.max((l - r).abs() * rho.powf(4.0 / 3.0));
        }
        scaled.push(m);
    }
    ensure(scaled.iter().all(|e| *e < LANGER_CONSTANT), format!("Langer scaled errors {scaled:?}"))?;
    within("Bessel suite", start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "200 points, worst relative error {worst:.2e}; Langer error * rho^(4/3) = {:?} < {LANGER_CONSTANT}; {:.1?}",
        scaled.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>(),
        start.elapsed()
    ))
}

/// `q prod (1 - q^n)^24` with exact integers.
fn tau_coefficients(count: usize) -> Vec<i128> {
    let mut p = vec![0i128; count + 1];
    p[1] = 1;
    for n in 1..=count {
        for _ in 0..24 {
            for i in (n..=count).rev() {
                p[i] -= p[i - n];
            }
        }
    }
    p
}

fn delta_product(z: Complex64) -> Complex64 {
    let q = (c(0.0, TAU) * z).exp();
    let (mut p, mut qn) = (q, q);
    while qn.norm() > 1e-20 {
        p *= (c(1.0, 0.0) - qn).powi(24);
        qn *= q;
    }
    p
}

/// `<Delta, Delta>` by a tensor Gauss rule over the standard domain, with
/// `Delta` from its product.
fn delta_norm_quadrature(n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let f = |x: f64, y: f64| delta_product(c(x, y)).norm_sqr() * y.powi(10);
    let xs: Vec<f64> = (0..=8).map(|i| -0.5 + i as f64 / 8.0).collect();
    let mut total = 0.0;
    for w in xs.windows(2) {
        total += rule.integrate(w[0], w[1], |x| rule.integrate((1.0 - x * x).sqrt(), 1.0, |y| f(x, y)));
    }
    let ys = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 9.0];
    for w in ys.windows(2) {
        for v in xs.windows(2) {
            total += rule.integrate(v[0], v[1], |x| rule.integrate(w[0], w[1], |y| f(x, y)));
        }
    }
    total
}

fn petersson_identity() -> Outcome {
    let start = Instant::now();
    let tau = tau_coefficients(4);
    ensure(tau[1..=3] == [1, -24, 252], format!("tau oracle {tau:?}"))?;
    let norm = delta_norm_quadrature(30);
    let mut worst = 0.0f64;
    for m in 1..=3i64 {
        let s = coeff_square_sum(&full(12.0), &GroupElement::identity(), m, 10_000).map_err(|e| e.to_string())?;
        let want = (tau[m as usize] * tau[m as usize]) as f64 / norm;
        let e = ((s.value - want) / want).abs();
        worst = worst.max(e);
        ensure(e < 1e-6, format!("m = {m}: {} vs {want}", s.value))?;
    }
    within("Petersson identity", start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("m = 1..3, worst relative error {worst:.2e}, <Delta,Delta> = {norm:.12e}; {:.1?}", start.elapsed()))
}

fn reproducing_property() -> Outcome {
    let (f, _) = normalized(&delta(DEFAULT_COEFFS).map_err(|e| e.to_string())?, 1e-12).map_err(|e| e.to_string())?;
    let points = [c(0.0, 1.0), c(0.0, 2.0), c(0.5, 1.0), c(-1.0 / 3.0, 1.5), c(0.0, 3.0)];
    let mut worst = 0.0f64;
    let mut doubled = f64::INFINITY;
    for w in points {
        let r = reproduce_check(&f, w, 1e-6).map_err(|e| e.to_string())?;
        worst = worst.max(r.relative_error());
        // A prefactor off by two must be caught.
        doubled = doubled.min((r.lhs - r.rhs * 2.0).norm() / (r.rhs * 2.0).norm());
    }
    ensure(worst <= 1e-3, format!("worst relative error {worst:e}"))?;
    ensure(doubled > 1e-3, format!("a doubled prefactor passes with error {doubled:e}"))?;
    Ok(format!("5 points, worst relative error {worst:.2e}; doubled prefactor would give {doubled:.2}"))
}

fn route_agreement() -> Outcome {
    let sys = full(12.0);
    let mut worst = 0.0f64;
    let mut n = 0;
    for x in [-0.5, -0.25, 0.0, 0.25, 0.5] {
        for y in [1.0, 1.3, 2.0, 3.0] {
            let z = c(x, y);
            let kernel = basis_sum_diag(&sys, &GroupElement::identity(), z, 1e-8).map_err(|e| e.to_string())?.value;
            let fourier = diag_fourier_dim_one(&sys, 1, z, 40, 2_000).map_err(|e| e.to_string())?;
            let e = ((kernel - fourier) / fourier).abs();
            worst = worst.max(e);
            n += 1;
            ensure(e < 1e-4, format!("z = {z}: {kernel} vs {fourier}"))?;
        }
    }
    Ok(format!("{n} points of F, worst relative disagreement {worst:.2e}"))
}

fn lemma_criterion() -> Outcome {
    let r = lemma_suite(100);
    let max = r.rows.iter().map(|row| row.ratio).fold(0.0, f64::max);
    ensure(r.passed && max <= 1.0 + LEMMA_SLACK, format!("max ratio {max}, notes {:?}", r.notes))?;
    Ok(format!("100 samples, {} checks, max ratio {max:.15}", r.rows.len()))
}

fn theorem3_band() -> Outcome {
    let start = Instant::now();
    let r = theorem3_scan(&Theorem3Config::default()).map_err(|e| e.to_string())?;
    let sups: Vec<_> = r.rows.iter().filter(|row| row.name == "theorem3_sup").collect();
    let lows: Vec<_> = r.rows.iter().filter(|row| row.name == "theorem3_lower").collect();
    ensure(sups.len() == 13 && lows.len() == 13, format!("{} weights scanned", sups.len()))?;
    let lo = sups.iter().map(|row| row.ratio).fold(f64::INFINITY, f64::min);
    let hi = sups.iter().map(|row| row.ratio).fold(0.0, f64::max);
    ensure(hi / lo <= 10.0, format!("band [{lo}, {hi}]"))?;
    for (s, l) in sups.iter().zip(&lows) {
        ensure(l.lhs <= s.lhs, format!("k = {}: lower bound {} above sup {}", s.k, l.lhs, s.lhs))?;
    }
    ensure(r.passed, format!("{:?}", r.notes))?;
    within("Theorem 3 scan", start.elapsed(), Duration::from_secs(600))?;
    Ok(format!("k = 12..60, sup/k^1.5 in [{lo:.4}, {hi:.4}] (range {:.2}), lower <= sup at all k; {:.1?}", hi / lo, start.elapsed()))
}

fn classical_oracle(m: i64, r: i64, cc: i64) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for a in 0..cc {
        for d in 0..cc {
            if (a * d) % cc == 1 % cc {
                let x = TAU * (m * a + r * d) as f64 / cc as f64;
                acc += c(x.cos(), x.sin());
            }
        }
    }
    acc
}

fn random_element(rng: &mut ChaCha8Rng, span: i64) -> GroupElement {
    loop {
        let (cc, d) = (rng.gen_range(-span..=span), rng.gen_range(-span..=span));
        if let Some(g) = complete_bottom_row(cc, d) {
            let g = g * GroupElement::u(rng.gen_range(-3..=3));
            return if rng.gen_bool(0.5) { -g } else { g };
        }
    }
}

fn kloosterman_reduction() -> Outcome {
    let ctx = KloostermanContext::new(&full(12.0), &GroupElement::identity()).map_err(|e| e.to_string())?;
    let mut exact = 0;
    for m in 0..=3 {
        for r in 0..=3 {
            for cc in 1..=20 {
                let w = ctx.sum(r, m, cc).map_err(|e| e.to_string())?;
                let o = classical_oracle(m, r, cc);
                ensure((w - o).norm() < 1e-12, format!("W({r},{m};{cc}) = {w} vs {o}"))?;
                exact += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut systems = vec![
        MultiplierSystem::theta(),
        MultiplierSystem::trivial(12.0, Subgroup::gamma0(4).unwrap()).unwrap(),
        MultiplierSystem::trivial(6.0, Subgroup::gamma0(6).unwrap()).unwrap(),
        MultiplierSystem::theta().conjugate(&GroupElement::s()),
    ];
    systems.extend([1, 2, 5, 7, 13, 23].map(|r| MultiplierSystem::eta_power(r).unwrap()));
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let sys = &systems[rng.gen_range(0..systems.len())];
        let tau = random_element(&mut rng, 6);
        let ctx = KloostermanContext::new(sys, &tau).map_err(|e| e.to_string())?;
        let (r, m, cc) = (rng.gen_range(-4..=4), rng.gen_range(-4..=4), rng.gen_range(1..=30));
        let w = ctx.sum(r, m, cc).map_err(|e| e.to_string())?;
        let bound = (ctx.width_at_infinity() * ctx.width_at_cusp()) as f64 * cc as f64;
        worst = worst.max(w.norm() / bound);
        ensure(w.norm() <= bound * (1.0 + 1e-12), format!("{sys} tau {tau}: |W({r},{m};{cc})| = {} > {bound}", w.norm()))?;
    }
    Ok(format!("{exact} classical sums exact; 500 random specs with max |W|/(n n' c) = {worst:.3}"))
}

fn stability() -> Outcome {
    let start = Instant::now();
    let checks = stability_suite().map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for s in &checks {
        for (name, d) in &s.drift {
            ensure(s.passed(), format!("{name}: drift {d:.4} (limit {STABILITY_TOL})"))?;
            parts.push(format!("{name} {:.3e} ({:.1}%)", s.fine.max_ratio(name), 100.0 * d));
        }
    }
    ensure(parts.len() == 8, format!("{} fitted constants", parts.len()))?;
    Ok(format!("{}; {:.1?}", parts.join(", "), start.elapsed()))
}

fn structural() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // Cocycle law on the full group and on Gamma0(4).
    let mut systems = vec![full(12.0), MultiplierSystem::custom(2.5, -5.0 / 8.0, 5.0 / 24.0).map_err(|e| e.to_string())?];
    systems.extend([1, 3, 11, 17].map(|r| MultiplierSystem::eta_power(r).unwrap()));
    let theta = MultiplierSystem::theta();
    let gens = theta.group().generators();
    let mut cocycles = 0;
    for i in 0..600 {
        let (sys, t, g) = if i % 4 == 3 {
            let pick = |rng: &mut ChaCha8Rng| {
                (0..3).fold(GroupElement::identity(), |acc, _| acc * gens[rng.gen_range(0..gens.len())])
            };
            (&theta, pick(&mut rng), pick(&mut rng))
        } else {
            (&systems[rng.gen_range(0..systems.len())], random_element(&mut rng, 30), random_element(&mut rng, 30))
        };
        let lhs = sys.upsilon_turns(&(t * g)).map_err(|e| e.to_string())?;
        let rhs = sigma_turns(&t, &g, sys.weight()).map_err(|e| e.to_string())?
            + sys.upsilon_turns(&t).map_err(|e| e.to_string())?
            + sys.upsilon_turns(&g).map_err(|e| e.to_string())?;
        ensure(turn_distance(lhs, rhs) < 1e-10, format!("cocycle law fails for {sys} at {t}, {g}"))?;
        ensure((upsilon(sys, &t).map_err(|e| e.to_string())?.norm() - 1.0).abs() < 1e-12, "multiplier off the unit circle")?;
        cocycles += 1;
    }
    // kappa does not depend on the scaling matrix of a cusp.
    let kappa_systems = [
        MultiplierSystem::theta(),
        MultiplierSystem::eta_power(2).unwrap().restrict(Subgroup::gamma0(6).unwrap()).unwrap(),
        MultiplierSystem::eta_power(5).unwrap().restrict(Subgroup::gamma0(4).unwrap()).unwrap(),
        MultiplierSystem::trivial(6.0, Subgroup::gamma1(5).unwrap()).unwrap(),
    ];
    let mut kappas = 0;
    for sys in &kappa_systems {
        let gens = sys.group().generators();
        for cusp in sys.group().cusps() {
            let base = cusp_parameter(sys, cusp).map_err(|e| e.to_string())?.kappa;
            for (i, h) in gens.iter().take(6).enumerate() {
                let mut other = cusp.clone();
                other.scaling = *h * cusp.scaling * GroupElement::u(i as i64 - 2);
                let k = cusp_parameter(sys, &other).map_err(|e| e.to_string())?.kappa;
                ensure(turn_distance(k, base) < 1e-10, format!("{sys}: kappa {k} vs {base}"))?;
                kappas += 1;
            }
        }
    }
    // Cusp widths sum to the index.
    let mut groups: Vec<Subgroup> = (1..=100).map(|n| Subgroup::gamma0(n).unwrap()).collect();
    groups.extend((2..=12).map(|n| Subgroup::gamma1(n).unwrap()));
    groups.extend((2..=6).map(|n| Subgroup::gamma(n).unwrap()));
    for g in &groups {
        let total: u64 = g.cusps().iter().map(|cu| cu.width).sum();
        ensure(total == g.index(), format!("{g}: widths sum to {total}, index {}", g.index()))?;
    }
    // The normalised Petersson norm does not see the subgroup.
    let d = delta(DEFAULT_COEFFS).map_err(|e| e.to_string())?;
    let base = petersson_norm(&d, 1e-16).map_err(|e| e.to_string())?;
    let mut norm_drift = 0.0f64;
    for n in [2, 3, 5] {
        let r = d.restrict(Subgroup::gamma0(n).unwrap()).map_err(|e| e.to_string())?;
        let v = petersson_norm(&r, 1e-16).map_err(|e| e.to_string())?;
        norm_drift = norm_drift.max(((v - base) / base).abs());
    }
    ensure(norm_drift < 1e-9, format!("norm changes by {norm_drift:e} under restriction"))?;
    within("structural invariants", start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{cocycles} cocycle checks, {kappas} kappa checks, {} groups with width sum = index, norm drift {norm_drift:.1e}; {:.1?}",
        groups.len(),
        start.elapsed()
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Bessel oracle agreement", bessel_oracle),
        ("Petersson/Poincare identity", petersson_identity),
        ("Bergman reproducing property", reproducing_property),
        ("kernel vs Fourier route", route_agreement),
        ("exact lemma suite", lemma_criterion),
        ("weight scaling band", theorem3_band),
        ("Kloosterman reduction and trivial bound", kloosterman_reduction),
        ("bound-scan stability", stability),
        ("structural invariants", structural),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let line = match &outcome {
            Ok(detail) => format!("criterion {} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed.push(i + 1);
                format!("criterion {} FAIL {name}: {why}", i + 1)
            }
        };
        let _ = writeln!(err, "{line}");
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
