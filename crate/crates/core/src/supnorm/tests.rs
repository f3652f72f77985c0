use super::*;
use crate::bergman::basis_sum_diag;
use crate::error::Error;
use crate::forms::{delta, monomial_form, orthonormal_basis_full};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn full(k: f64) -> MultiplierSystem {
    MultiplierSystem::trivial(k, Subgroup::full()).unwrap()
}

fn id() -> GroupElement {
    GroupElement::identity()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `S` by plain summation over `m + eta > 0`, far past the peak.
fn s_direct(alpha: f64, beta: f64, eta: f64, terms: usize) -> f64 {
    let start = -(eta.ceil() as i64) + 1;
    (0..terms as i64)
        .map(|j| eta + (start + j) as f64)
        .filter(|&x| x > 0.0)
        .map(|x| x.powf(alpha) * (-beta * x).exp())
        .sum()
}

#[test]
fn s_sum_alpha_to_zero_is_geometric() {
    let s = s_sum(&SumSpec::new(1e-12, 1.0, 1.0).unwrap()).unwrap();
    let q = (-1.0f64).exp();
    assert!(rel(s, q / (1.0 - q)) < 1e-10, "{s}");
    assert!((s - 0.581977).abs() < 1e-6);
}

#[test]
fn s_sum_square_moment_matches_direct_sum_and_closed_form() {
    let s = s_sum(&SumSpec::new(2.0, 1.0, 1.0).unwrap()).unwrap();
    let direct = s_direct(2.0, 1.0, 1.0, 200);
    let q = (-1.0f64).exp();
    let closed = q * (1.0 + q) / (1.0 - q).powi(3);
    assert!(rel(direct, closed) < 1e-13);
    assert!(rel(s, closed) < 1e-12, "{s} vs {closed}");
    assert!((s - 1.9922948).abs() < 1e-6);
}

#[test]
fn s_sum_fractional_shift_starts_at_first_positive_point() {
    let s = s_sum(&SumSpec::new(1.5, 0.7, 0.3).unwrap()).unwrap();
    let direct = s_direct(1.5, 0.7, 0.3, 400);
    assert!(rel(s, direct) < 1e-12);
    let shifted = s_sum(&SumSpec::new(1.5, 0.7, 2.3).unwrap()).unwrap();
    assert!(rel(shifted, direct) < 1e-12);
}

#[test]
fn s_sum_large_parameters_stay_finite_in_log_scale() {
    // A Theorem-3 sized sum: alpha = k/2 with k = 400.
    let ln_s = ln_s_sum(&SumSpec::new(200.0, 2.0 * PI, 1.0).unwrap()).unwrap();
    let direct: f64 = (1..400).map(|m| 200.0 * (m as f64).ln() - 2.0 * PI * m as f64).fold(f64::NEG_INFINITY, f64::max);
    assert!(ln_s.is_finite() && ln_s >= direct && ln_s < direct + 5.0);
}

#[test]
fn sum_spec_rejects_non_positive_parameters() {
    for (a, b, e) in [(0.0, 1.0, 1.0), (1.0, 0.0, 1.0), (1.0, 1.0, -0.5), (f64::NAN, 1.0, 1.0)] {
        assert!(matches!(SumSpec::new(a, b, e), Err(Error::Domain(_))));
    }
}

#[test]
fn lemma_bounds_hold_in_a_theorem3_regime() {
    let l = check_lemma_bounds(&SumSpec::new(6.0, 2.0 * PI, 1.0).unwrap()).unwrap();
    assert!(l.sabest_general.ratio <= 1.0);
    let tail = l.sabest_tail.expect("alpha <= beta eta selects the second branch");
    assert!(tail.ratio <= 1.0);
    assert!(l.expdecay.ratio <= 1.0);
}

#[test]
fn lemma_bounds_hold_in_the_degenerate_limit() {
    let l = check_lemma_bounds(&SumSpec::new(1e-12, 1.0, 1.0).unwrap()).unwrap();
    assert!(l.all().iter().all(|c| c.ratio <= 1.0 + LEMMA_SLACK));
}

#[test]
fn expdecay_at_its_threshold_equals_six_power_over_exp() {
    for alpha in [1.0, 2.0, 5.0, 10.0, 30.0] {
        for beta in [0.3, 1.0, 7.0] {
            let c = check_expdecay(alpha, beta, 6.0 * alpha / beta).unwrap();
            let expected = (alpha * (6.0f64.ln() - 2.0)).exp();
            assert!(rel(c.ratio, expected) < 1e-10, "alpha {alpha} beta {beta}");
            assert!(c.ratio <= 1.0);
        }
    }
}

#[test]
fn expdecay_rejects_points_below_threshold() {
    assert!(matches!(check_expdecay(2.0, 1.0, 11.9), Err(Error::Domain(_))));
}

#[test]
fn lemma_suite_passes_on_a_hundred_points() {
    let r = lemma_suite(100);
    assert!(r.passed, "{:?}", r.notes);
    assert!(r.rows.len() >= 300);
    assert!(r.rows.iter().all(|row| row.ratio <= 1.0 + LEMMA_SLACK));
    // The decay lemma is tight at alpha -> 0 and x = 0.
    assert!(r.max_ratio("expdecay") > 0.99);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn s_sum_decreases_in_beta(alpha in 0.01f64..40.0, beta in 0.05f64..10.0, eta in 0.01f64..3.0, step in 0.01f64..2.0) {
        let a = ln_s_sum(&SumSpec::new(alpha, beta, eta).unwrap()).unwrap();
        let b = ln_s_sum(&SumSpec::new(alpha, beta + step, eta).unwrap()).unwrap();
        prop_assert!(b < a);
    }

    #[test]
    fn s_sum_depends_on_eta_mod_one(alpha in 0.01f64..20.0, beta in 0.1f64..5.0, eta in 0.01f64..0.99, shift in 1u32..4) {
        let a = ln_s_sum(&SumSpec::new(alpha, beta, eta).unwrap()).unwrap();
        let b = ln_s_sum(&SumSpec::new(alpha, beta, eta + shift as f64).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn lemma_bounds_hold_everywhere(alpha in 1e-9f64..80.0, beta in 0.02f64..30.0, eta in 0.001f64..1.0) {
        let l = check_lemma_bounds(&SumSpec::new(alpha, beta, eta).unwrap());
        prop_assert!(l.is_ok(), "{:?}", l.err());
    }

    #[test]
    fn region_ranges_partition_the_moduli(k in 20.0f64..200.0, l in 0.01f64..50.0) {
        let big_x = 4.0 * PI * l;
        let ranges = region_ranges(k, big_x).unwrap();
        for c in 1..=2000i64 {
            let hits: Vec<_> = ranges.iter().filter(|r| r.contains(c)).collect();
            prop_assert_eq!(hits.len(), 1, "c = {}", c);
            prop_assert_eq!(hits[0].region, region_of(k, big_x / c as f64));
        }
    }
}

#[test]
fn envelope_rejects_small_weights() {
    assert!(matches!(a_envelope(&full(12.0), &id(), 1, 1000), Err(Error::Domain(_))));
    assert!(matches!(region_ranges(12.0, 1.0), Err(Error::Domain(_))));
}

#[test]
fn region_partition_for_weight_24_first_coefficient() {
    // X = 4 pi; bounds sqrt(11.5), 23 - 23^(13/15), 23 + 23^(13/15).
    let big_x = 4.0 * PI;
    let r = region_ranges(24.0, big_x).unwrap();
    assert_eq!(r[0], RegionRange { region: 1, lo: 4, hi: None });
    assert_eq!(r[1], RegionRange { region: 2, lo: 2, hi: Some(3) });
    assert_eq!(r[2], RegionRange { region: 3, lo: 1, hi: Some(1) });
    assert!(r[3].is_empty());
    assert_eq!(region_of(24.0, big_x), 3);
    assert_eq!(region_of(24.0, big_x / 3.0), 2);
    assert_eq!(region_of(24.0, big_x / 4.0), 1);
}

#[test]
fn region_boundaries_are_half_open() {
    let b = region_bounds(30.0);
    assert_eq!(region_of(30.0, b[0]), 1);
    assert_eq!(region_of(30.0, b[1]), 2);
    assert_eq!(region_of(30.0, b[2]), 3);
    assert_eq!(region_of(30.0, b[2] * (1.0 + 1e-15)), 4);
}

#[test]
fn a_envelope_weight_24_matches_the_orthonormal_basis() {
    let e = a_envelope(&full(24.0), &id(), 1, 4000).unwrap();
    let basis = orthonormal_basis_full(24, 40, 1e-10).unwrap();
    let oracle = basis.coefficient_square_sum(0);
    let a = ln_abs_a(&e.square_sum).exp();
    assert!(rel(a, oracle) < 1e-6, "{a} vs {oracle}");
    assert!(e.aest.ratio.is_finite() && e.aest.ratio > 0.0);
    assert!(e.regions[0].ratio.is_finite());
    assert_eq!(e.regions[3].ratio, 0.0, "region 4 is empty at m = 1");
}

#[test]
fn region_one_sum_matches_direct_bessel_sum() {
    // J_23(4 pi / c) for c >= 4 by its power series, summed far out.
    let nu = 23.0;
    let series = |x: f64| -> f64 {
        let mut term = (x / 2.0f64).powf(nu) / crate::numerics::ln_gamma(nu + 1.0).exp();
        let mut s = term;
        for j in 1..60 {
            term *= -(x * x / 4.0) / (j as f64 * (j as f64 + nu));
            s += term;
        }
        s
    };
    let direct: f64 = (4..200_000).map(|c| series(4.0 * PI / c as f64).abs()).sum();
    let c = region_checks(24.0, 1.0, 200_000).unwrap();
    let env = ln_region_envelopes(24.0, 1.0)[0].exp();
    assert!(rel(c[0].lhs, direct) < 1e-9, "{} vs {direct}", c[0].lhs);
    assert!(rel(c[0].envelope, env) < 1e-12);
}

#[test]
fn region_scan_is_stable_under_refinement() {
    let s = region_stability().unwrap();
    assert!(s.passed(), "{:?}", s.drift);
    assert_eq!(s.drift.len(), 4);
}

#[test]
fn method2_weight_12_bounded_on_twenty_points() {
    let grid: Vec<Complex64> = [-0.45, -0.15, 0.15, 0.45]
        .iter()
        .flat_map(|&x| [0.9, 1.4, 1.9, 2.4, 3.0].map(|y| Complex64::new(x, y)))
        .collect();
    assert_eq!(grid.len(), 20);
    let r = verify_prop_method2(&full(12.0), &id(), &grid, 0.25).unwrap();
    assert!(r.passed);
    let m = r.max_ratio("method2");
    assert!(m > 0.05 && m < 1.0, "{m}");
}

#[test]
fn method2_envelope_grows_with_eta_and_lhs_does_not_move() {
    let grid = fd_grid(4, 0.9, 3.0);
    let lo = verify_prop_method2(&full(12.0), &id(), &grid, 0.01).unwrap();
    let hi = verify_prop_method2(&full(12.0), &id(), &grid, 0.49).unwrap();
    assert!(lo.passed && hi.passed);
    for (a, b) in lo.rows.iter().zip(&hi.rows) {
        assert_eq!(a.lhs, b.lhs);
        assert!(b.envelope >= a.envelope);
    }
}

#[test]
fn method2_at_i_does_not_grow_with_weight() {
    let z = [Complex64::new(0.0, 1.0)];
    let ratios: Vec<f64> = [12.0, 24.0, 48.0]
        .iter()
        .map(|&k| verify_prop_method2(&full(k), &id(), &z, 0.25).unwrap().max_ratio("method2"))
        .collect();
    assert!(ratios.iter().all(|r| *r > 0.0 && *r < 1.0), "{ratios:?}");
    assert!(ratios[2] <= ratios[0] * 2.0, "{ratios:?}");
}

#[test]
fn method2_preconditions() {
    let z = [Complex64::new(0.0, 1.0)];
    assert!(matches!(verify_prop_method2(&full(4.0), &id(), &z, 0.25), Err(Error::Domain(_))));
    assert!(matches!(verify_prop_method2(&full(12.0), &id(), &z, 0.5), Err(Error::Domain(_))));
    assert!(matches!(verify_prop_method2(&full(12.0), &id(), &z, 0.0), Err(Error::Domain(_))));
}

#[test]
fn method1_preconditions() {
    let z = [Complex64::new(0.0, 2.0)];
    let r = verify_prop_method1(&full(24.0), &id(), &z, Regime::Low, 12.0, 1000);
    assert!(matches!(r, Err(Error::Domain(_))));
    let r = verify_prop_method1(&full(24.0), &id(), &[Complex64::new(0.0, 10.0)], Regime::Large, 0.0, 1000);
    assert!(matches!(r, Err(Error::Domain(_))));
}

#[test]
fn method1_low_regime_bounded() {
    let grid: Vec<Complex64> = (0..=18).map(|i| Complex64::new(0.0, 1.0 + 0.5 * i as f64)).collect();
    let r = verify_prop_method1(&full(24.0), &id(), &grid, Regime::Low, 0.0, 2000).unwrap();
    assert!(r.passed);
    let m = r.max_ratio("method1low");
    assert!(m > 0.0 && m < 1.0, "{m}");
}

#[test]
fn method1_large_regime_decays() {
    let grid = [Complex64::new(0.0, 23.0), Complex64::new(0.0, 30.0)];
    let r = verify_prop_method1(&full(24.0), &id(), &grid, Regime::Large, 0.0, 2000).unwrap();
    assert!(r.rows[1].ratio < r.rows[0].ratio);
}

#[test]
fn method1_chain_majorizes_the_basis_sum() {
    let sys = full(24.0);
    let chain = method1_chain(&sys, &id(), 0.0, 0.9, 2000).unwrap();
    for z in [Complex64::new(0.0, 1.0), Complex64::new(0.3, 1.5), Complex64::new(-0.5, 3.0), Complex64::new(0.1, 6.0)] {
        let d = basis_sum_diag(&sys, &id(), z, 1e-10).unwrap();
        let exact = 24.0 * z.im.ln() + d.value.ln();
        assert!(chain.ln_value(z.im).unwrap() >= exact, "{z}");
    }
}

/// Enumerates `SL2(Z)` by bottom rows `(c, d)` with `|c|, |d| <= n` and all
/// translates up to `t`, each pair `+-g` counted twice.
fn trivial_oracle(z: Complex64, k: f64, n: i64, t: i64) -> f64 {
    let gcd = |mut a: i64, mut b: i64| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    };
    let mut total = 0.0;
    for c in 0..=n {
        for d in -n..=n {
            if gcd(c, d) != 1 || (c == 0 && d != 1) {
                continue;
            }
            // g z = a/c - 1/(c (c z + d)) up to translation; for c = 0 it is z.
            let base = if c == 0 {
                z
            } else {
                let a = (1..=c).find(|&a| (a * d - 1) % c == 0).unwrap() as f64;
                Complex64::new(a / c as f64, 0.0) - 1.0 / (c as f64 * (c as f64 * z + d as f64))
            };
            for b in -t..=t {
                let w = base + b as f64;
                let q = ((z.re - w.re) / 2.0).powi(2) + ((z.im + w.im) / 2.0).powi(2);
                total += 2.0 * ((z.im * w.im).ln() * k / 2.0 - q.ln() * k / 2.0).exp();
            }
        }
    }
    total
}

#[test]
fn bergman_trivial_sum_matches_brute_force() {
    for (z, k) in [(Complex64::new(0.1, 1.3), 12.0), (Complex64::new(-0.5, 1.0), 24.0)] {
        let s = bergman_trivial_sum(z, k, 1e-9).unwrap();
        let oracle = trivial_oracle(z, k, 60, 400);
        assert!(rel(s.value, oracle) < 1e-7, "{z}: {} vs {oracle}", s.value);
        assert!(s.value >= 2.0);
    }
}

#[test]
fn zero_form_is_rejected() {
    let f = delta(50).unwrap().scaled(Complex64::new(0.0, 0.0));
    assert!(matches!(theorem12_report(&f, 10), Err(Error::Domain(_))));
}

#[test]
fn theorem12_index_scaling_on_gamma0_2() {
    let f = monomial_form(2, 0, 0, 120).unwrap();
    let on_full = theorem12_report(&f, 10).unwrap();
    let on_g2 = theorem12_report(&f.restrict(Subgroup::gamma0(2).unwrap()).unwrap(), 10).unwrap();
    assert!(on_full.passed && on_g2.passed);
    // The compact sup is the same function value; only the envelope moves by sqrt(3).
    let t1 = |r: &ScanReport| r.rows.iter().find(|row| row.name == "theorem1").unwrap().clone();
    let (a, b) = (t1(&on_full), t1(&on_g2));
    assert!(rel(a.lhs, b.lhs) < 1e-4, "{} vs {}", a.lhs, b.lhs);
    assert!(rel(a.ratio / b.ratio, 3f64.sqrt()) < 1e-4);
    let cosets = on_g2.rows.iter().filter(|row| row.name == "coset_sup").count();
    assert_eq!(cosets, 3);
    let coset_max = on_g2.max_ratio("coset_sup");
    assert!(rel(on_g2.max_ratio("theorem2"), coset_max) < 1e-12);
}

#[test]
fn theorem3_small_scan_passes_with_dimension_check() {
    let config = Theorem3Config { k_list: vec![12, 16, 24], grid_density: 20, refinements: 1, ..Default::default() };
    let r = theorem3_scan(&config).unwrap();
    assert!(r.passed, "{:?}", r.notes);
    let sups: Vec<_> = r.rows.iter().filter(|row| row.name == "theorem3_sup").collect();
    let lows: Vec<_> = r.rows.iter().filter(|row| row.name == "theorem3_lower").collect();
    assert_eq!(sups.len(), 3);
    for (s, l) in sups.iter().zip(&lows) {
        assert!(l.lhs <= s.lhs);
    }
}

#[test]
fn theorem3_rejects_odd_or_out_of_range_weights() {
    for k in [13, 10, 82] {
        let config = Theorem3Config { k_list: vec![k], ..Default::default() };
        assert!(matches!(theorem3_scan(&config), Err(Error::Domain(_))));
    }
}

#[test]
fn lower_bound_uses_direct_sum_below_closed_form_range() {
    let lb = theorem3_lower_bound(&full(12.0), &id(), 1, 2000).unwrap();
    assert!(lb.closed_form_factor.is_none());
    assert!((lb.y - 12.0 / (4.0 * PI)).abs() < 1e-12);
    assert!(lb.value > 0.0);
    assert!(matches!(theorem3_lower_bound(&full(12.0), &id(), 0, 2000), Err(Error::Domain(_))));
}

#[test]
fn closed_form_lower_bound_sits_below_the_direct_sum() {
    let sys = full(1280.0);
    let lb = theorem3_lower_bound(&sys, &id(), 1, 2000).unwrap();
    let factor = lb.closed_form_factor.expect("k >= 320 (m+1)^2");
    assert!(factor > 0.0 && factor <= 1.0);
    let y: f64 = lb.y;
    let direct = (1280.0 * y.ln() - 4.0 * PI * y + ln_abs_a(&a_coefficient(&sys, &id(), 1, 2000).unwrap())).exp();
    assert!(lb.value <= direct);
    assert!(rel(lb.value, direct) < 1e-10);
}

#[test]
fn widths_never_exceed_the_index() {
    let mut groups = vec![Subgroup::full(), Subgroup::gamma1(4).unwrap(), Subgroup::gamma(2).unwrap(), Subgroup::gamma(3).unwrap()];
    groups.extend((2..=12).map(|n| Subgroup::gamma0(n).unwrap()));
    let r = width_within_index(&groups);
    assert!(r.passed);
    assert!(r.rows.len() > groups.len());
}

#[test]
fn cusp_extremes_of_gamma0_4() {
    let sys = MultiplierSystem::trivial(12.0, Subgroup::gamma0(4).unwrap()).unwrap();
    assert_eq!(cusp_extremes(&sys).unwrap(), (4, 1.0));
}

#[test]
fn fd_grid_stays_in_the_domain() {
    let g = fd_grid(8, 3f64.sqrt() / 2.0, 2.0);
    assert!(g.iter().all(|z| z.re.abs() <= 0.5 + 1e-12 && z.norm() >= 1.0 - 1e-12 && z.im <= 2.0 + 1e-12));
    assert!(g.iter().any(|z| (z.re + 0.5).abs() < 1e-12 && (z.im - 3f64.sqrt() / 2.0).abs() < 1e-12));
    assert!(fd_grid(16, 0.9, 2.0).len() > 3 * g.len());
}

#[test]
fn x_average_of_the_diagonal_is_the_parseval_series() {
    // int_0^1 y^k sum_j |f_j(x + iy)|^2 dx = sum_m A(m) y^k e^{-4 pi m y}, with
    // the left side from kernel diagonals and the right from Kloosterman sums.
    let sys = full(24.0);
    for y in [0.9, 1.6] {
        let pts = 24;
        let avg: f64 = (0..pts)
            .map(|j| basis_sum_diag(&sys, &id(), Complex64::new(j as f64 / pts as f64 - 0.5, y), 1e-10).unwrap().value)
            .sum::<f64>()
            / pts as f64;
        let series: f64 = (1..=10)
            .map(|m| ln_abs_a(&a_coefficient(&sys, &id(), m, 4000).unwrap()).exp() * (-4.0 * PI * m as f64 * y).exp())
            .sum();
        assert!(rel(avg, series) < 1e-6, "y = {y}: {avg} vs {series}");
    }
}
