mod common;

use common::*;
use proptest::prelude::*;
use rrm_core::analytic::cir_asymptote;
use rrm_core::homogenization::*;
use rrm_core::DimensionlessParams;

#[test]
fn reference_values() {
    let r = reference();
    let l = ReceptorLayout::circular(1000, 0.0279).unwrap();
    assert!(rel_err(correction_factor(&l, 10.0).unwrap(), num(&r["phi_1000_00279_10"])) < 1e-14);
    let l = ReceptorLayout::circular(2560, 0.0279).unwrap();
    assert!(rel_err(zwanzig_factor(&l), num(&r["zwanzig_2560_00279"])) < 1e-14);
    let l = ReceptorLayout::circular(5120, 0.0279).unwrap();
    let bp = berg_purcell_factor(&l);
    assert!(rel_err(bp, num(&r["berg_purcell_5120_00279"])) < 1e-14);
    assert!((bp - 0.97850).abs() < 5e-5);
}

#[test]
fn zwanzig_reduces_to_berg_purcell_at_low_coverage() {
    let l = ReceptorLayout::circular(40, 0.03).unwrap();
    assert!(l.coverage <= 0.01);
    assert!(rel_err(zwanzig_factor(&l), berg_purcell_factor(&l)) < 0.01);
}

#[test]
fn infinite_rate_limit_is_zwanzig() {
    for m in [1, 100, 1000, 5000] {
        let l = ReceptorLayout::circular(m, 0.0279).unwrap();
        assert!(rel_err(correction_factor(&l, 1e12).unwrap(), zwanzig_factor(&l)) < 1e-6);
    }
}

#[test]
fn full_coverage_leaves_params_unchanged() {
    let p = DimensionlessParams::new(10.0, 1.0, 0.5, 2.0, 1000);
    let l = ReceptorLayout::from_mesh(1280, 1280).unwrap();
    assert_eq!(finite_receptor_params(&p, &l).unwrap(), p);
    let dead = finite_receptor_params(&p, &ReceptorLayout::circular(0, 0.0279).unwrap()).unwrap();
    assert_eq!(dead.kf, 0.0);
    assert_eq!((dead.kb, dead.kd), (p.kb, p.kd));
}

#[test]
fn gap_to_full_coverage_grows_with_rate() {
    let half = ReceptorLayout::circular(2560, 0.0279).unwrap();
    let full = ReceptorLayout::circular(5120, 0.0279).unwrap();
    let ratio = |kf: f64| {
        let a = effective_forward_rate(kf, correction_factor(&half, kf).unwrap());
        let b = effective_forward_rate(kf, correction_factor(&full, kf).unwrap());
        a / b
    };
    assert!(ratio(100.0) < ratio(10.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn steady_state_consistency(m in 1u64..5120, kf in 0.01f64..1e4, r0 in 1.1f64..10.0) {
        let l = ReceptorLayout::circular(m, 0.0279).unwrap();
        let phi = correction_factor(&l, kf).unwrap();
        let star = effective_forward_rate(kf, phi);
        let a = cir_asymptote(&DimensionlessParams::new(star, 0.0, 0.0, r0, 1)).unwrap();
        let b = phi * cir_asymptote(&DimensionlessParams::new(kf, 0.0, 0.0, r0, 1)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
    }

    #[test]
    fn phi_increases_with_receptor_count(m in 1u64..5119, kf in 0.0f64..1e3) {
        let a = correction_factor(&ReceptorLayout::circular(m, 0.0279).unwrap(), kf).unwrap();
        let b = correction_factor(&ReceptorLayout::circular(m + 1, 0.0279).unwrap(), kf).unwrap();
        prop_assert!(b > a);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn effective_rate_bounded(kf in 0.0f64..1e4, phi in 0.0f64..=1.0) {
        let k = effective_forward_rate(kf, phi);
        prop_assert!(k >= 0.0 && k <= kf);
    }
}
