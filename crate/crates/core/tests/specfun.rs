mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rrm_core::specfun::{erf, erfc, erfcx, erfcx_flagged, wfun, wfun_damped, wfun_dm};

#[test]
fn erfcx_matches_quadrature_values() {
    let r = reference();
    let v = erfcx(Complex64::new(1.0, 0.0));
    assert!(rel_err(v.re, num(&r["erfcx_1"])) < 1e-14, "{v}");
    assert_eq!(v.im, 0.0);
    let v = erfcx(Complex64::new(5.0, 5.0));
    assert!(crel_err(v, cplx(&r["erfcx_5p5i"])) < 1e-12, "{v}");
}

#[test]
fn erfcx_real_axis_relative_accuracy() {
    for pt in reference()["erfcx_grid"].as_array().unwrap() {
        let z = cplx(&pt["z"]);
        if z.im != 0.0 {
            continue;
        }
        let want = cplx(&pt["v"]).re;
        let got = erfcx(z);
        assert!(rel_err(got.re, want) <= 1e-12, "x={} got={} want={}", z.re, got.re, want);
        assert_eq!(got.im, 0.0);
    }
}

#[test]
fn erfcx_complex_relative_accuracy() {
    for pt in reference()["erfcx_grid"].as_array().unwrap() {
        let z = cplx(&pt["z"]);
        let want = cplx(&pt["v"]);
        let got = erfcx(z);
        assert!(crel_err(got, want) <= 1e-10, "z={z} got={got} want={want}");
    }
}

#[test]
fn w_kernel_reference_value() {
    let got = wfun(Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0));
    assert!(rel_err(got.re, num(&reference()["w_2_3"])) < 1e-13);
}

#[test]
fn w_kernel_reduces_to_erfc_at_zero_m() {
    for n in [-3.0, -0.5, 0.0, 0.7, 4.0] {
        let got = wfun(Complex64::new(n, 0.0), Complex64::new(0.0, 0.0)).re;
        assert!(rel_err(got, erfc(n)) < 1e-14, "n={n}");
    }
}

#[test]
fn saturation_past_real_overflow() {
    assert!(erfcx_flagged(Complex64::new(-27.0, 0.0)).saturated);
    assert!(!erfcx_flagged(Complex64::new(-26.5, 0.0)).saturated);
}

proptest! {
    #[test]
    fn conjugate_symmetry(x in -20.0f64..20.0, y in -20.0f64..20.0) {
        let z = Complex64::new(x, y);
        let a = erfcx(z.conj());
        let b = erfcx(z).conj();
        prop_assert!((a - b).norm() <= 1e-15 * b.norm().max(1e-300));
    }

    #[test]
    fn reflection_identity(x in -10.0f64..10.0, y in -10.0f64..10.0) {
        // erfcx(z) + erfcx(-z) = 2 exp(z^2)
        let z = Complex64::new(x, y);
        let lhs = erfcx(z) + erfcx(-z);
        let rhs = 2.0 * (z * z).exp();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0), "z={} lhs={} rhs={}", z, lhs, rhs);
    }

    #[test]
    fn erf_plus_erfc_is_one(x in -8.0f64..8.0) {
        prop_assert!((erf(x) + erfc(x) - 1.0).abs() < 2e-16 * 4.0);
    }

    #[test]
    fn damped_w_matches_undamped(n in 0.0f64..4.0, m in -2.0f64..3.0, d in 0.0f64..5.0) {
        let zn = Complex64::new(n, 0.0);
        let zm = Complex64::new(m, 0.0);
        let a = wfun_damped(zn, zm, d).re;
        let b = wfun(zn, zm).re * (-d).exp();
        prop_assert!((a - b).abs() <= 1e-13 * b.abs().max(1e-300));
    }

    #[test]
    fn w_derivative_matches_central_difference(n in 0.0f64..2.0, m in 0.1f64..3.0) {
        let h = 1e-5;
        let zn = Complex64::new(n, 0.0);
        let fd = (wfun(zn, Complex64::new(m + h, 0.0)) - wfun(zn, Complex64::new(m - h, 0.0))) / (2.0 * h);
        let an = wfun_dm(zn, Complex64::new(m, 0.0));
        prop_assert!((fd - an).norm() <= 1e-7 * an.norm().max(1e-3));
    }
}
