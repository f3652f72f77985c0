use super::*;
use crate::forms::{delta, petersson_norm, CuspForm};
use crate::forms::qseries::{euler_product, mul_exact, pow_exact};
use crate::modgroup::Subgroup;
use crate::numerics::principal_pow;

const DELTA_NORM: f64 = 1.035362056804321e-6;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn full12() -> MultiplierSystem {
    MultiplierSystem::trivial(12.0, Subgroup::full()).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn kernel_is_modular_in_the_first_variable() {
    let s = GroupElement::s();
    let u = GroupElement::u(1);
    let cases: Vec<(MultiplierSystem, Vec<GroupElement>)> = vec![
        (full12(), vec![s, u * s * u, s * u * u * s * GroupElement::u(-1)]),
        (MultiplierSystem::eta_power(13).unwrap(), vec![s, u * s, s * u * s]),
        (
            MultiplierSystem::trivial(8.0, Subgroup::gamma0(2).unwrap()).unwrap(),
            vec![GroupElement::new(1, 0, 2, 1).unwrap(), u * GroupElement::new(1, 0, -2, 1).unwrap() * u],
        ),
    ];
    let z = c(0.2, 1.1);
    let w = c(0.3, 0.8);
    for (sys, taus) in cases {
        let h = kernel(&sys, z, w, 1e-10).unwrap();
        for t in taus {
            assert!(sys.group().contains(&t));
            let ht = kernel(&sys, t.act(z), w, 1e-10).unwrap();
            let want = sys.nu(&t, z).unwrap() * h.value;
            assert!(rel(ht.value, want) < 1e-8, "{sys} {t}: {} vs {want}", ht.value);
        }
    }
}

#[test]
fn refinement_is_stable_and_tails_shrink() {
    let sys = full12();
    let i = c(0.0, 1.0);
    let a = kernel(&sys, i, i, 1e-6).unwrap();
    let b = kernel(&sys, i, i, 1e-8).unwrap();
    assert!(a.value.norm() > 0.0 && a.value.norm().is_finite());
    assert!(rel(a.value, b.value) < 1e-6);
    let mut last = f64::INFINITY;
    let exact = kernel(&sys, i, i, 1e-14).unwrap().value;
    for r in [8.0, 12.0, 20.0, 40.0] {
        let v = kernel_at_radius(&sys, i, i, r).unwrap();
        assert!(v.tail_bound < last);
        assert!((v.value - exact).norm() <= v.tail_bound + v.rounding_bound + 1e-15 * exact.norm());
        last = v.tail_bound;
    }
}

#[test]
fn low_weight_is_rejected() {
    let sys = MultiplierSystem::trivial(2.0, Subgroup::full()).unwrap();
    assert!(matches!(kernel(&sys, c(0.0, 1.0), c(0.0, 1.0), 1e-8), Err(Error::Domain(_))));
    assert!(kernel(&full12(), c(0.0, -1.0), c(0.0, 1.0), 1e-8).is_err());
}

#[test]
fn diagonal_matches_delta() {
    let d = delta(60).unwrap();
    for z in [c(0.0, 1.0), c(0.5, 1.0), c(-0.3, 2.5), c(0.1, 5.0)] {
        let diag = basis_sum_diag(&full12(), &GroupElement::identity(), z, 1e-8).unwrap();
        let want = d.eval(z).unwrap().norm_sqr() / DELTA_NORM;
        assert!(diag.value > 0.0);
        assert!((diag.value - want).abs() < 1e-6 * want, "z = {z}: {} vs {want}", diag.value);
    }
}

#[test]
fn diagonal_matches_the_fourier_route() {
    for z in [c(0.0, 1.0), c(0.45, 0.9), c(-0.2, 3.0)] {
        let diag = basis_sum_diag(&full12(), &GroupElement::identity(), z, 1e-8).unwrap();
        let fourier = diag_fourier_dim_one(&full12(), 1, z, 40, 2_000).unwrap();
        assert!((diag.value - fourier).abs() < 1e-6 * fourier, "z = {z}: {} vs {fourier}", diag.value);
    }
}

/// `eta(z)^8 eta(2z)^8`, spanning the weight 8 cusp forms on Gamma0(2).
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
fn slashed_diagonal_on_gamma0_2() {
    let f = gamma0_2_weight8(80);
    let norm = petersson_norm(&f, 1e-13).unwrap();
    let s = GroupElement::s();
    for tau in [GroupElement::identity(), s, s * GroupElement::u(1)] {
        for z in [c(0.1, 1.2), c(-0.4, 0.95)] {
            let diag = basis_sum_diag(f.system(), &tau, z, 1e-10).unwrap();
            let slashed = f.eval(tau.act(z)).unwrap() / principal_pow(tau.j(z), 8.0).unwrap();
            let want = slashed.norm_sqr() / norm;
            assert!((diag.value - want).abs() < 1e-6 * want, "tau = {tau}, z = {z}: {} vs {want}", diag.value);
        }
    }
}

#[test]
fn reproducing_identity_at_i() {
    let d = delta(60).unwrap();
    let f = d.scaled(Complex64::new(1.0 / DELTA_NORM.sqrt(), 0.0));
    let r = reproduce_check(&f, c(0.0, 1.0), 1e-6).unwrap();
    assert!(r.relative_error() < 1e-6, "{:?}", r);
    // Conjugate linearity in the second slot, linearity in the first.
    let r2 = reproduce_check(&f.scaled(Complex64::new(2.0, 0.0)), c(0.0, 1.0), 1e-6).unwrap();
    assert!(rel(r2.lhs, r.lhs * 2.0) < 1e-7);
}

/// At large height the individual terms of the kernel are far larger than
/// its value: the `U^b` translates of `+-I` alone sum to `~ e^{-4 pi y}`
/// instead of `2 y^{-k}`, and the other rows (each `~ e^{-2 pi y}`) cancel
/// against each other. The diagonal reports the cancellation.
#[test]
fn large_height_diagonal_is_tiny_and_reports_cancellation() {
    let z = c(0.0, 10.0);
    let k = 12.0;
    let two_terms = 2.0 * (k - 1.0) / (8.0 * PI) * z.im.powf(-k);
    let d = delta(60).unwrap();
    let true_value = d.eval(z).unwrap().norm_sqr() / DELTA_NORM;
    assert!(true_value < 1e-30 * two_terms);
    // The identity row after the b-sum: 2 (1/2)^{-k} (2pi)^k/Gamma(k) sum m^{k-1} e^{-4 pi m y}.
    let setup = KernelSetup::new(&full12(), -z.conj()).unwrap();
    let (row, _) = setup.row(0, 1, z, -z.conj()).unwrap();
    let closed = 2.0 * 2f64.powf(k) * (TAU.powf(k) / 39_916_800.0) * (-4.0 * PI * z.im).exp();
    assert!((row.re - closed).abs() < 1e-6 * closed, "{row} vs {closed}");
    assert!(matches!(
        basis_sum_diag(&full12(), &GroupElement::identity(), z, 1e-6),
        Err(Error::Accuracy { .. })
    ));
}
