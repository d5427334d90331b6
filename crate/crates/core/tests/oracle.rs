mod common;

use common::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rrm_core::analytic::{cir, cir_asymptote, greens_function, time_grid, Spacing};
use rrm_core::oracle::*;
use rrm_core::DimensionlessParams;

/// Relative error with values below 1e-280 compared absolutely: both sides
/// lose precision in the subnormal range.
fn agreement(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-280)
}

fn random_params(rng: &mut ChaCha8Rng) -> DimensionlessParams {
    DimensionlessParams::new(
        rng.random_range(0.5..200.0),
        rng.random_range(0.0..8.0),
        rng.random_range(0.0..3.0),
        rng.random_range(1.2..5.0),
        1,
    )
}

#[test]
fn laplace_reference_values() {
    let r = reference();
    let q = LaplaceQuery { s: Complex64::new(1.0, 1.0), params: DimensionlessParams::new(10.0, 1.0, 0.5, 2.0, 1), r: Some(1.5) };
    assert!(crel_err(laplace_greens(&q).unwrap(), cplx(&r["laplace_greens_1p1i"])) < 1e-13);
    let p = DimensionlessParams::new(5.0, 1.0, 0.0, 2.0, 1);
    let v = laplace_cir(Complex64::new(2.0, 0.0), &p).unwrap();
    assert!(crel_err(v, cplx(&r["laplace_cir_fig4_s2"])) < 1e-13);
}

#[test]
fn reflecting_bracket_when_inert() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = DimensionlessParams::new(0.0, 1.3, 0.4, 2.5, 1);
    for _ in 0..5 {
        let s = Complex64::new(rng.random_range(0.1..5.0), rng.random_range(-5.0..5.0));
        let (r, r0) = (1.7, 2.5);
        let q = (s + 0.4).sqrt();
        let base = 1.0 / (8.0 * std::f64::consts::PI * r * r0 * q);
        // kf = 0: bracket = 4π/(4πq + 4π) = 1/(q + 1)
        let want = base * (-q * (r - r0).abs()).exp() + base * (-q * (r + r0 - 2.0)).exp()
            - 2.0 / (q + 1.0) * base * (-q * (r + r0 - 2.0)).exp();
        let got = laplace_greens(&LaplaceQuery { s, params: p, r: Some(r) }).unwrap();
        assert!(crel_err(got, want) < 1e-14);
    }
}

#[test]
fn large_s_decay() {
    let p = DimensionlessParams::new(10.0, 1.0, 0.5, 2.0, 1);
    let q = |s: f64| laplace_greens(&LaplaceQuery { s: Complex64::new(s, 0.0), params: p, r: Some(1.5) }).unwrap().norm();
    let env = |s: f64| (-(s + 0.5f64).sqrt() * 0.5).exp() / (s + 0.5f64).sqrt();
    assert!(q(1e6) < 1e-100);
    assert!(q(1e2) / env(1e2) < 0.1 && q(1e2) / env(1e2) > 1e-3);
}

#[test]
fn final_value_theorem() {
    let p = DimensionlessParams::new(25.0, 0.0, 0.0, 2.0, 1);
    let s = 1e-10;
    let v = laplace_cir(Complex64::new(s, 0.0), &p).unwrap() * s;
    assert!(rel_err(v.re, cir_asymptote(&p).unwrap()) < 1e-4);
}

#[test]
fn oracle_agrees_with_closed_form_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let grid = time_grid(1e-3, 10.0, 30, Spacing::Log).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = random_params(&mut rng);
        for &t in &grid {
            let a = cir(t, &p).unwrap();
            let o = cir_by_inversion(t, &p, 64).unwrap();
            let e = agreement(a, o);
            worst = worst.max(e);
            assert!(e <= 1e-7, "{p:?} t={t}: closed {a} oracle {o}");
        }
    }
    eprintln!("worst cir relative error {worst:e}");
}

#[test]
fn greens_agrees_with_inversion_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let p = random_params(&mut rng);
        for _ in 0..10 {
            let r = rng.random_range(1.0..5.0);
            let t = 10f64.powf(rng.random_range(-2.0..1.0));
            let a = greens_function(r, t, &p).unwrap();
            let o = greens_by_inversion(r, t, &p, 64).unwrap();
            let e = agreement(a, o);
            worst = worst.max(e);
            assert!(e <= 1e-6, "{p:?} r={r} t={t}: closed {a} oracle {o}");
        }
    }
    eprintln!("worst greens relative error {worst:e}");
}
