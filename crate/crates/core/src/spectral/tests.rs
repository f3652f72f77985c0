use super::*;
use crate::forms::qseries::{euler_product, mul_exact, pow_exact};
use crate::forms::{delta, eta_form, petersson_norm, CuspForm};
use crate::modgroup::{GroupElement, Subgroup};
use crate::multiplier::MultiplierSystem;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;

/// Petersson norm of Delta, pinned against an independent quadrature in the
/// forms tests.
const DELTA_NORM: f64 = 1.035362056804321e-6;

fn full12() -> MultiplierSystem {
    MultiplierSystem::trivial(12.0, Subgroup::full()).unwrap()
}

fn id() -> GroupElement {
    GroupElement::identity()
}

/// `S(m, r; c)` by brute force over all pairs `(a, d)` with `ad = 1 mod c`.
fn classical_oracle(m: i64, r: i64, c: i64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..c {
        for d in 0..c {
            if (a * d) % c == 1 % c {
                let x = TAU * (m * a + r * d) as f64 / c as f64;
                acc += Complex64::new(x.cos(), x.sin());
            }
        }
    }
    acc
}

#[test]
fn full_group_sums_reduce_to_classical_kloosterman() {
    let ctx = KloostermanContext::new(&full12(), &id()).unwrap();
    for m in 0..=3 {
        for r in 0..=3 {
            for c in 1..=20 {
                let w = ctx.sum(r, m, c).unwrap();
                let oracle = classical_oracle(m, r, c);
                assert!((w - oracle).norm() < 1e-12, "W({r},{m};{c}) = {w} vs {oracle}");
                assert!((classical_kloosterman(m, r, c).unwrap() - oracle).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn documented_kloosterman_value() {
    let w = kloosterman(&KloostermanSpec { system: full12(), tau: id(), r: 1, m: 1, c: 5 }).unwrap();
    assert!((w.re - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-14);
    assert!(w.im.abs() < 1e-14);
    assert!((w.re - 0.381966).abs() < 1e-6);
}

#[test]
fn empty_representative_set_gives_zero() {
    let sys = MultiplierSystem::trivial(12.0, Subgroup::gamma(2).unwrap()).unwrap();
    let ctx = KloostermanContext::new(&sys, &id()).unwrap();
    assert!(ctx.representatives(1).unwrap().is_empty());
    assert_eq!(ctx.sum(1, 1, 1).unwrap(), Complex64::new(0.0, 0.0));
}

#[test]
fn modulus_must_be_positive() {
    let ctx = KloostermanContext::new(&full12(), &id()).unwrap();
    assert!(ctx.sum(1, 1, 0).is_err());
    assert!(poincare_coeff(&full12(), &id(), 1, 1, 0).is_err());
    let low = MultiplierSystem::trivial(2.0, Subgroup::full()).unwrap();
    assert!(poincare_coeff(&low, &id(), 1, 1, 10).is_err());
    assert!(coeff_square_sum(&low, &id(), 1, 10).is_err());
}

fn systems() -> Vec<MultiplierSystem> {
    vec![
        full12(),
        MultiplierSystem::trivial(12.0, Subgroup::gamma0(4).unwrap()).unwrap(),
        MultiplierSystem::trivial(6.0, Subgroup::gamma0(6).unwrap()).unwrap(),
        MultiplierSystem::theta(),
        MultiplierSystem::eta_power(1).unwrap(),
        MultiplierSystem::eta_power(5).unwrap(),
        MultiplierSystem::eta_power(13).unwrap(),
        MultiplierSystem::theta().conjugate(&GroupElement::s()),
    ]
}

fn taus() -> Vec<GroupElement> {
    let s = GroupElement::s();
    let u = GroupElement::u(1);
    vec![id(), s, u * s, s * u * u, s * u * s * GroupElement::u(3), GroupElement::new(1, 0, 2, 1).unwrap()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn trivial_bound_holds(si in 0usize..8, ti in 0usize..6, r in -3i64..4, m in -3i64..4, c in 1i64..25) {
        let sys = &systems()[si];
        let ctx = KloostermanContext::new(sys, &taus()[ti]).unwrap();
        let w = ctx.sum(r, m, c).unwrap();
        let reps = ctx.representatives(c).unwrap().len() as f64;
        prop_assert!(reps <= ctx.trivial_bound(c));
        prop_assert!(w.norm() <= reps + 1e-9 * reps.max(1.0));
    }
}

#[test]
fn delta_tau_values() {
    assert!((delta_tau(&full12(), &id(), 1).unwrap() - 1.0).norm() < 1e-15);
    assert!((delta_tau(&full12(), &GroupElement::s(), 1).unwrap() - 1.0).norm() < 1e-15);
    let g2 = MultiplierSystem::trivial(8.0, Subgroup::gamma0(2).unwrap()).unwrap();
    assert_eq!(delta_tau(&g2, &GroupElement::s(), 1).unwrap(), Complex64::new(0.0, 0.0));
    // For eta powers the phase records the multiplier of tau^{-1}.
    let eta = MultiplierSystem::eta_power(13).unwrap();
    assert!((delta_tau(&eta, &id(), 0).unwrap() - 1.0).norm() < 1e-15);
    assert!((delta_tau(&eta, &GroupElement::s(), 0).unwrap().norm() - 1.0).abs() < 1e-15);
}

#[test]
fn coefficient_square_sums_of_delta() {
    for (m, tau_m) in [(1i64, 1.0f64), (2, -24.0), (3, 252.0)] {
        let s = coeff_square_sum(&full12(), &id(), m, 10_000).unwrap();
        let want = tau_m * tau_m / DELTA_NORM;
        assert!((s.value - want).abs() <= 1e-6 * want, "m = {m}: {} vs {want}", s.value);
        assert!(s.tail_bound < 1e-12 * want);
        assert_eq!((s.width, s.index), (1, 1));
    }
}

#[test]
fn one_over_delta_norm_from_the_first_coefficient() {
    let s = coeff_square_sum(&full12(), &id(), 1, 10_000).unwrap();
    assert!((1.0 / s.value - DELTA_NORM).abs() < 1e-6 * DELTA_NORM);
    // Delta evaluated from its q-expansion carries the same norm.
    let norm = petersson_norm(&delta(60).unwrap(), 1e-14).unwrap();
    assert!((norm * s.value - 1.0).abs() < 1e-6);
}

#[test]
fn no_cusp_forms_in_weight_fourteen() {
    let sys = MultiplierSystem::trivial(14.0, Subgroup::full()).unwrap();
    for m in 1..=3 {
        let s = coeff_square_sum(&sys, &id(), m, 10_000).unwrap();
        let scale = s.ln_prefactor.exp();
        assert!(s.value.abs() < 1e-9 * scale, "m = {m}: {} against prefactor {scale}", s.value);
    }
}

/// For `p < 24` the space for the multiplier of `eta^p` is spanned by `eta^p`.
#[test]
fn coefficient_square_sums_of_eta_powers() {
    for p in [13u32, 20] {
        let f = eta_form(p, 40).unwrap();
        let norm = petersson_norm(&f, 1e-13).unwrap();
        for m in 0..3i64 {
            let coeff = f.coefficients()[m as usize].norm_sqr();
            let want = coeff / norm;
            for tau in [id(), GroupElement::s(), GroupElement::u(1) * GroupElement::s() * GroupElement::u(2)] {
                let s = coeff_square_sum(f.system(), &tau, m, 400).unwrap();
                assert!(
                    (s.value - want).abs() <= 1e-6 * want + s.tail_bound,
                    "eta^{p}, m = {m}, tau = {tau}: {} vs {want} (tail {})",
                    s.value,
                    s.tail_bound
                );
            }
        }
    }
}

/// `eta(z)^8 eta(2z)^8`, the cusp form of weight 8 on Gamma0(2).
fn gamma0_2_weight8(count: usize) -> CuspForm {
    let e8 = pow_exact(&euler_product(count), 8, count).unwrap();
    let mut dilated = vec![0i128; count];
    for (i, &x) in e8.iter().enumerate() {
        if 2 * i < count {
            dilated[2 * i] = x;
        }
    }
    let coeffs = mul_exact(&e8, &dilated, count).unwrap();
    let sys = MultiplierSystem::trivial(8.0, Subgroup::gamma0(2).unwrap()).unwrap();
    CuspForm::new(sys, coeffs.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect()).unwrap()
}

#[test]
fn coefficient_square_sums_at_the_cusp_zero() {
    let f = gamma0_2_weight8(60);
    let norm = petersson_norm(&f, 1e-13).unwrap();
    // At infinity: q - 8 q^2 + ...
    let at_inf = coeff_square_sum(f.system(), &id(), 1, 500).unwrap();
    assert!((at_inf.value * norm - 1.0).abs() < 1e-6);
    // f | S = eta(z)^8 eta(z/2)^8 / 16 = (q^{1/2} - 8 q + ...)/16, width 2.
    let s = GroupElement::s();
    for (m, want) in [(1i64, 1.0 / 256.0), (2, 64.0 / 256.0)] {
        let r = coeff_square_sum(f.system(), &s, m, 500).unwrap();
        assert_eq!(r.width, 2);
        assert!((r.value * norm - want).abs() < 1e-6 * want, "m = {m}: {} vs {want}", r.value * norm);
    }
}

fn check_routes(sys: &MultiplierSystem, tau: &GroupElement, m: i64, z: Complex64, r_max: i64, c_max: i64, tol: f64) {
    let (direct, tail) = poincare_series(sys, tau, m, z, 1e-11).unwrap();
    assert!(tail <= 1e-11);
    let fourier = poincare_fourier(sys, tau, m, z, r_max, c_max).unwrap();
    let scale = direct.norm().max(1.0);
    assert!(
        (direct - fourier).norm() <= tol * scale,
        "{sys} tau = {tau} m = {m} z = {z}: direct {direct} vs Fourier {fourier}"
    );
}

#[test]
fn poincare_series_match_their_fourier_expansion() {
    let z = Complex64::new(0.1, 1.1);
    // Positive case on the full group.
    check_routes(&full12(), &id(), 1, z, 30, 400, 1e-8);
    check_routes(&full12(), &id(), 2, z, 30, 400, 1e-8);
    // Half-integral weight with nontrivial multiplier, at two cusps scalings.
    let eta = MultiplierSystem::eta_power(13).unwrap();
    check_routes(&eta, &id(), 0, z, 30, 400, 1e-6);
    check_routes(&eta, &GroupElement::s(), 1, z, 30, 400, 1e-6);
    // Negative case.
    check_routes(&eta, &id(), -1, z, 30, 400, 1e-6);
    // A cusp inequivalent to infinity, with kappa' = 0 and m = 0.
    let g2 = MultiplierSystem::trivial(8.0, Subgroup::gamma0(2).unwrap()).unwrap();
    let w = Complex64::new(-0.2, 0.9);
    check_routes(&g2, &GroupElement::s(), 0, w, 60, 400, 1e-7);
    check_routes(&g2, &GroupElement::s(), 1, w, 60, 400, 1e-7);
}

fn sigma_11(n: i64) -> f64 {
    (1..=n).filter(|d| n % d == 0).map(|d| (d as f64).powi(11)).sum()
}

#[test]
fn index_zero_series_is_the_eisenstein_series() {
    for r in 1..=4 {
        let a = poincare_coeff(&full12(), &id(), 0, r, 10_000).unwrap();
        assert_eq!(a.case, PoincareCase::KappaZero);
        let want = 65520.0 / 691.0 * sigma_11(r);
        assert!((a.value.re - want).abs() < 1e-9 * want, "r = {r}: {} vs {want}", a.value);
        assert!(a.value.im.abs() < 1e-9 * want);
    }
    let z = Complex64::new(0.3, 0.95);
    check_routes(&full12(), &id(), 0, z, 30, 10_000, 1e-9);
}

#[test]
fn case_dispatch_and_tails() {
    let eta = MultiplierSystem::eta_power(13).unwrap();
    assert_eq!(poincare_coeff(&eta, &id(), 0, 1, 100).unwrap().case, PoincareCase::Positive);
    assert_eq!(poincare_coeff(&eta, &id(), -1, 1, 100).unwrap().case, PoincareCase::Negative);
    let short = poincare_coeff(&full12(), &id(), 1, 1, 5).unwrap();
    let long = poincare_coeff(&full12(), &id(), 1, 1, 5_000).unwrap();
    assert_eq!(short.c_evaluated, 5);
    assert!((short.value - long.value).norm() <= short.tail_bound);
    assert!(long.tail_bound < short.tail_bound);
    assert!(poincare_coeff(&eta, &id(), 0, -1, 100).is_err());
}

#[test]
fn conjugate_cusp_data_agree_with_the_original() {
    let sys = MultiplierSystem::trivial(12.0, Subgroup::gamma0(6).unwrap()).unwrap();
    for tau in taus() {
        let s = coeff_square_sum(&sys, &tau, 1, 50).unwrap();
        assert!(s.width >= 1 && s.width <= sys.group().index());
    }
}
