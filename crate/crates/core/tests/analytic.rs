mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rrm_core::analytic::*;
use rrm_core::oracle::{cir_by_inversion, greens_by_inversion};
use rrm_core::quad::integrate;
use rrm_core::specfun::erfc;
use rrm_core::DimensionlessParams;
use std::f64::consts::PI;

fn params(kf: f64, kb: f64, kd: f64, r0: f64) -> DimensionlessParams {
    DimensionlessParams::new(kf, kb, kd, r0, 1)
}

#[test]
fn roots_match_eigenvalue_oracle() {
    let want: Vec<Complex64> = reference()["roots_10_1_05"].as_array().unwrap().iter().map(cplx).collect();
    let p = params(10.0, 1.0, 0.5, 2.0);
    let r = solve_roots(&p).unwrap();
    for (got, want) in r.as_array().iter().zip(&want) {
        assert!((got - want).norm() < 1e-13, "{got} vs {want}");
    }
    assert!(r.vieta_residuals(&p).iter().all(|&e| e <= 1e-12));
}

#[test]
fn cir_matches_multiprecision_inversion() {
    for row in reference()["cir_5_2_025"].as_array().unwrap() {
        let t = num(&row["t"]);
        let want = num(&row["talbot"]);
        let got = cir(t, &params(5.0, 2.0, 0.25, 2.0)).unwrap();
        assert!(rel_err(got, want) <= 1e-7, "t={t}: {got} vs {want}");
    }
    for row in reference()["cir_table"].as_array().unwrap() {
        let p = params(num(&row["kf"]), num(&row["kb"]), num(&row["kd"]), num(&row["r0"]));
        let t = num(&row["t"]);
        let want = num(&row["cir"]);
        let got = cir(t, &p).unwrap();
        assert!(rel_err(got, want) <= 1e-9, "{p:?} t={t}: {got} vs {want}");
    }
}

#[test]
fn greens_matches_multiprecision_inversion() {
    let want = num(&reference()["greens_15_05"]["talbot"]);
    let got = greens_function(1.5, 0.5, &params(10.0, 1.0, 0.5, 2.0)).unwrap();
    assert!(rel_err(got, want) <= 1e-7, "{got} vs {want}");
}

#[test]
fn oracle_inversion_matches_fixtures() {
    let want = num(&reference()["greens_15_05"]["talbot"]);
    let got = greens_by_inversion(1.5, 0.5, &params(10.0, 1.0, 0.5, 2.0), 64).unwrap();
    assert!(rel_err(got, want) <= 1e-8, "{got} vs {want}");
    for row in reference()["cir_table"].as_array().unwrap() {
        let p = params(num(&row["kf"]), num(&row["kb"]), num(&row["kd"]), num(&row["r0"]));
        let t = num(&row["t"]);
        let got = cir_by_inversion(t, &p, 64).unwrap();
        assert!(rel_err(got, num(&row["cir"])) <= 1e-8, "{p:?} t={t}: {got}");
    }
}

#[test]
fn irreversible_degrading_reference_value() {
    let got = cir_irreversible_degrading(1.0, 1.0, 2.0).unwrap();
    assert!(rel_err(got, num(&reference()["irrdeg_2_1_1"])) < 1e-13);
}

#[test]
fn absorbing_limit_of_saturating_branch() {
    assert!((cir(1e12, &params(f64::INFINITY, 0.0, 0.0, 2.0)).unwrap() - 0.5).abs() < 1e-6);
    // The approach to the asymptote is algebraic: the gap is
    // (1/r0)(kf/(kf+4π)) [erf(n) + W(n, S1√t)] ≈ (r0-1)/(r0 √(πt)).
    let p = params(100.0, 0.0, 0.0, 2.0);
    let asym = cir_asymptote(&p).unwrap();
    assert!((asym - 0.5 * 100.0 / (100.0 + 4.0 * PI)).abs() < 1e-15);
    let v = cir(1e4, &p).unwrap();
    let want = cir_by_inversion(1e4, &p, 64).unwrap();
    assert!(rel_err(v, want) < 1e-9, "{v} vs {want}");
    assert!(asym - v > 0.0 && asym - v < asym / (PI * 1e4).sqrt() * 1.2);
    assert!((cir(1e10, &p).unwrap() - asym).abs() < 1e-5);
}

#[test]
fn reflecting_sphere_conserves_probability() {
    let p = params(0.0, 0.0, 0.0, 2.0);
    let t: f64 = 0.5;
    let hi = 1.0 + 12.0 * t.sqrt();
    let q = integrate(|r| 4.0 * PI * r * r * greens_function(r, t, &p).unwrap(), 1.0, hi, 1e-12, 1e-12).unwrap();
    assert!((1.0 - q.value).abs() <= 1e-6, "{}", q.value);
}

#[test]
fn short_time_greens_is_free_space_gaussian() {
    let p = params(10.0, 1.0, 0.5, 2.0);
    let (r, t) = (2.01, 1e-4);
    let free = ((-(r - 2.0f64).powi(2) / (4.0 * t)).exp() + (-(r + 2.0f64 - 2.0).powi(2) / (4.0 * t)).exp())
        * (-0.5 * t).exp()
        / (8.0 * PI * r * 2.0 * (PI * t).sqrt());
    let got = greens_function(r, t, &p).unwrap();
    assert!(rel_err(got, free) <= 1e-6);
}

#[test]
fn expected_signal_scales_oracle_cir() {
    let mut p = params(5.0, 2.0, 0.25, 2.0);
    p.na = 5000;
    let rows = reference()["cir_5_2_025"].as_array().unwrap();
    let times: Vec<f64> = rows.iter().map(|r| num(&r["t"])).collect();
    let c = expected_signal(&times, &p).unwrap();
    for (v, row) in c.values.iter().zip(rows) {
        assert!(rel_err(*v, 5000.0 * num(&row["talbot"])) <= 1e-7);
    }
    let mut q = params(f64::INFINITY, 0.0, 0.0, 2.0);
    q.na = 5000;
    let c = expected_signal(&[1e14], &q).unwrap();
    assert!((c.values[0] - 2500.0).abs() < 1e-3);
}

#[test]
fn eta_constants_sum_matches_divided_difference() {
    // Σ η_i W(n2, α_i √t) evaluated term by term.
    let p = params(10.0, 1.0, 0.5, 2.0);
    let roots = solve_roots(&p).unwrap();
    let eta = roots.eta().unwrap();
    let (r, t) = (1.5f64, 0.5f64);
    let n2 = Complex64::new((r + 2.0 - 2.0) / (2.0 * t.sqrt()), 0.0);
    let w = |a: Complex64| rrm_core::specfun::wfun_damped(n2, a * t.sqrt(), 0.5 * t);
    let sum = eta.eta1 * w(roots.alpha) + eta.eta2 * w(roots.beta) + eta.eta3 * w(roots.gamma);
    let g = ((-0.5 * t - (r - 2.0).powi(2) / (4.0 * t)).exp() + (-0.5 * t - (r + 2.0 - 2.0).powi(2) / (4.0 * t)).exp())
        / (8.0 * PI * r * 2.0 * (PI * t).sqrt());
    let direct = g - sum.re / (4.0 * PI * r * 2.0);
    assert!(rel_err(direct, greens_function(r, t, &p).unwrap()) < 1e-12);
}

#[test]
fn coalescing_roots_stay_accurate() {
    // kb = 0, S1 = √kd puts α and β together.
    let kf = 4.0 * PI;
    let p = params(kf, 0.0, 4.0, 2.0);
    for t in [0.05, 0.5, 2.0] {
        let got = cir(t, &p).unwrap();
        let want = cir_by_inversion(t, &p, 64).unwrap();
        assert!(rel_err(got, want) < 1e-8, "t={t}: {got} vs {want}");
    }
}

#[test]
fn triple_root_uses_perturbation() {
    // (x - 2)³: S1 = 6, kb - kd = 12, kb - 6 kd = 8.
    let kd = 0.8;
    let p = params(5.0 * 4.0 * PI, 12.8, kd, 2.0);
    let e = cir_detailed(1.0, &p).unwrap();
    assert!(matches!(e.method, Method::Perturbed { .. }));
    let want = cir_by_inversion(1.0, &p, 64).unwrap();
    assert!(rel_err(e.value, want) < 1e-6, "{} vs {want}", e.value);
    let c = expected_signal(&[1.0], &p).unwrap();
    assert!(c.perturbed_kd.is_some());
}

#[test]
fn finite_difference_flux_integrates_to_cir() {
    // One-sided second-order stencil at the surface: r < 1 is outside the domain.
    let sets = [
        params(5.0, 2.0, 0.25, 2.0),
        params(10.0, 1.0, 0.5, 2.0),
        params(25.0, 0.0, 0.0, 2.0),
        params(100.0, 4.0, 0.1, 3.0),
        params(1.0, 0.1, 0.0, 1.5),
    ];
    let h = 1e-5;
    for p in &sets {
        // Bound molecules do not degrade, so the bound fraction is the time
        // integral of the net surface flux.
        let flux = |tau: f64| {
            let f0 = greens_function(1.0, tau, p).unwrap();
            let f1 = greens_function(1.0 + h, tau, p).unwrap();
            let f2 = greens_function(1.0 + 2.0 * h, tau, p).unwrap();
            4.0 * PI * (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)
        };
        for t in [0.1, 1.0] {
            let q = integrate(|tau| if tau == 0.0 { 0.0 } else { flux(tau) }, 0.0, t, 1e-13, 1e-8).unwrap();
            let c = cir(t, p).unwrap();
            assert!(rel_err(q.value, c) <= 1e-4, "{p:?} t={t}: flux {} cir {c}", q.value);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn vieta_residuals_small(kf in 0.0f64..1e3, kb in 0.0f64..1e2, kd in 0.0f64..1e2) {
        let p = params(kf, kb, kd, 2.0);
        let r = solve_roots(&p).unwrap();
        for e in r.vieta_residuals(&p) {
            prop_assert!(e <= 1e-12, "{:?} {:?}", p, r);
        }
    }

    #[test]
    fn cir_is_a_probability(kf in 0.0f64..1e3, kb in 0.0f64..1e2, kd in 0.0f64..1e2, r0 in 1.01f64..6.0, lt in -3.0f64..2.0) {
        let t = 10f64.powf(lt);
        let v = cir(t, &params(kf, kb, kd, r0)).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn cir_decreases_with_degradation(kf in 0.5f64..200.0, kb in 0.0f64..8.0, kd in 0.0f64..3.0, dk in 0.01f64..1.0, lt in -2.0f64..1.0) {
        let t = 10f64.powf(lt);
        let a = cir(t, &params(kf, kb, kd, 2.0)).unwrap();
        let b = cir(t, &params(kf, kb, kd + dk, 2.0)).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12));
    }

    #[test]
    fn irreversible_cir_is_monotone(r0 in 1.01f64..5.0, t in 0.001f64..100.0, dt in 0.0f64..10.0) {
        prop_assert!(cir_irreversible(t + dt, r0).unwrap() >= cir_irreversible(t, r0).unwrap());
    }

    #[test]
    fn greens_nonnegative(kf in 0.0f64..300.0, kb in 0.0f64..10.0, kd in 0.0f64..5.0, r in 1.0f64..5.0, lt in -3.0f64..1.0) {
        let v = greens_function(r, 10f64.powf(lt), &params(kf, kb, kd, 2.0)).unwrap();
        prop_assert!(v >= -1e-12);
    }
}

#[test]
fn irreversible_cir_value() {
    assert!((cir_irreversible(0.25, 2.0).unwrap() - 0.5 * erfc(1.0)).abs() < 1e-17);
}
