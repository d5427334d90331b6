//! Closed-form Green's function and channel impulse response (CIR) of the
//! reversible, degrading spherical receiver.
//!
//! The Laplace-domain boundary condition factors into `(u + α)(u + β)(u + γ)`
//! with `u = sqrt(s + kd)`. The time-domain solutions are sums over the roots,
//! which this module evaluates as second divided differences:
//!
//! * CIR: `kf e^{-kd t}/(4π r0) · h[α, β, γ]` with `h(x) = -x W(n, x√t)`,
//!   `n = (r0 - 1)/√(4t)`
//! * Green's function reaction term: `g[α, β, γ]` with
//!   `g(x) = x (x² + kb - kd) W(n₂, x√t)`, `n₂ = (r + r0 - 2)/√(4t)`
//!
//! Written out, `g[α, β, γ] = Σ η_i W(n₂, α_i√t)` with the η constants of
//! [`EtaConstants`]. The divided-difference form allows a stable Taylor
//! evaluation when two roots nearly coincide.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::specfun::{erfc, erfcx_real, wfun_damped, wfun_damped_real};
use crate::units::{DimensionlessParams, UnitsError};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Roots closer than this (in units of `1/max(1, √t)`) use the Taylor path.
const TAYLOR_SEPARATION: f64 = 1e-3;
/// Pairwise distance below which roots are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Relative imaginary residue accepted before taking the real part.
pub const REALNESS_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error(transparent)]
    Params(#[from] UnitsError),
    #[error("time must be positive and finite, got {0}")]
    InvalidTime(f64),
    #[error("radius must be at least 1 (receiver surface), got {0}")]
    InsideReceiver(f64),
    #[error("time grid must be strictly increasing and positive")]
    InvalidGrid,
    #[error("unsupported parameter combination: {0}")]
    Unsupported(&'static str),
    #[error("result not real: value {value}, imaginary residue {imag}")]
    NotReal { value: f64, imag: f64 },
}

/// The three roots of `x³ - S1 x² + (kb - kd) x - (kb - kd S1) = 0`,
/// `S1 = 1 + kf/(4π)`, sorted by `(re, im)` descending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    /// Minimum pairwise distance below [`DEGENERACY_TOL`].
    pub degenerate: bool,
}

impl CubicRoots {
    pub fn as_array(&self) -> [Complex64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn min_separation(&self) -> f64 {
        let r = self.as_array();
        (r[0] - r[1]).norm().min((r[0] - r[2]).norm()).min((r[1] - r[2]).norm())
    }

    /// Relative residuals of the three Vieta relations, each scaled by
    /// `1 + |coefficient|`.
    pub fn vieta_residuals(&self, p: &DimensionlessParams) -> [f64; 3] {
        let [a, b, c] = self.as_array();
        let (s1, s2, s3) = vieta_coefficients(p);
        [
            (a + b + c - s1).norm() / (1.0 + s1.abs()),
            (a * b + b * c + c * a - s2).norm() / (1.0 + s2.abs()),
            (a * b * c - s3).norm() / (1.0 + s3.abs()),
        ]
    }

    /// η constants of the Green's function; `None` when two roots coincide.
    pub fn eta(&self) -> Option<EtaConstants> {
        let [a, b, c] = self.as_array();
        let e = |x: Complex64, y: Complex64, z: Complex64| x * (x + y) * (x + z) / ((y - x) * (z - x));
        let out = EtaConstants { eta1: e(a, b, c), eta2: e(b, c, a), eta3: e(c, a, b) };
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        (finite(out.eta1) && finite(out.eta2) && finite(out.eta3)).then_some(out)
    }
}

/// `η_i = α_i (α_i + α_j)(α_i + α_k) / ((α_j - α_i)(α_k - α_i))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaConstants {
    pub eta1: Complex64,
    pub eta2: Complex64,
    pub eta3: Complex64,
}

fn vieta_coefficients(p: &DimensionlessParams) -> (f64, f64, f64) {
    let s1 = p.s1();
    (s1, p.kb - p.kd, p.kb - p.kd * s1)
}

/// Solve the cubic for `(α, β, γ)`.
///
/// A real root is isolated by safeguarded Newton iteration, the quadratic
/// factor is solved in cancellation-free form, and every root is polished by
/// Newton steps on the full cubic.
pub fn solve_roots(p: &DimensionlessParams) -> Result<CubicRoots, AnalyticError> {
    p.validate()?;
    if p.kf.is_infinite() {
        return Err(AnalyticError::Unsupported("roots diverge for kf = inf"));
    }
    let (s1, s2, s3) = vieta_coefficients(p);
    let poly = |x: f64| ((x - s1) * x + s2) * x - s3;
    let dpoly = |x: f64| (3.0 * x - 2.0 * s1) * x + s2;

    // Bracket [-B, B] with B the Cauchy bound: poly(-B) < 0 < poly(B).
    let bound = 1.0 + s1.abs().max(s2.abs()).max(s3.abs());
    let (mut lo, mut hi) = (-bound, bound);
    let mut x = if poly(s1) >= 0.0 { s1.min(hi) } else { hi };
    for _ in 0..200 {
        let fx = poly(x);
        if fx == 0.0 {
            break;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = dpoly(x);
        let newton = x - fx / d;
        let next = if d != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) || hi - lo <= 0.0 {
            x = next;
            break;
        }
        x = next;
    }
    let r1 = x;

    // x³ - s1 x² + s2 x - s3 = (x - r1)(x² + b x + c)
    let b = r1 - s1;
    let c = s2 + r1 * b;
    let disc = b * b - 4.0 * c;
    let (r2, r3) = if disc >= 0.0 {
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        if q == 0.0 {
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (Complex64::new(q, 0.0), Complex64::new(c / q, 0.0))
        }
    } else {
        let im = 0.5 * (-disc).sqrt();
        (Complex64::new(-0.5 * b, im), Complex64::new(-0.5 * b, -im))
    };

    let cpoly = |z: Complex64| ((z - s1) * z + s2) * z - s3;
    let cdpoly = |z: Complex64| (3.0 * z - 2.0 * s1) * z + s2;
    let polish = |mut z: Complex64| {
        for _ in 0..4 {
            let f = cpoly(z);
            let d = cdpoly(z);
            if f.norm() == 0.0 || d.norm() == 0.0 {
                break;
            }
            let cand = z - f / d;
            if cpoly(cand).norm() < f.norm() {
                z = cand;
            } else {
                break;
            }
        }
        z
    };
    let mut roots = [polish(Complex64::new(r1, 0.0)), polish(r2), polish(r3)];
    // A conjugate pair must stay exactly conjugate.
    if disc < 0.0 {
        roots[2] = roots[1].conj();
    }
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let mut out = CubicRoots { alpha: roots[0], beta: roots[1], gamma: roots[2], degenerate: false };
    out.degenerate = out.min_separation() < DEGENERACY_TOL;
    Ok(out)
}

/// `w(x) = e^{-decay} W(n, x s)` and its first three derivatives in `x`.
struct Kernel {
    n: Complex64,
    s: f64,
    decay: f64,
}

impl Kernel {
    fn value(&self, x: Complex64) -> Complex64 {
        wfun_damped(self.n, x * self.s, self.decay)
    }

    /// `[w, w', w'', w''']` from `W_m = 2(n+m)W - (2/√π)e^{-n²}` and
    /// `W^{(k+1)} = 2k W^{(k-1)} + 2(n+m) W^{(k)}`.
    fn derivatives(&self, x: Complex64) -> [Complex64; 4] {
        let z = self.n + x * self.s;
        let w0 = self.value(x);
        let k = FRAC_2_SQRT_PI * (-self.n * self.n - self.decay).exp();
        let w1 = 2.0 * z * w0 - k;
        let w2 = 2.0 * w0 + 2.0 * z * w1;
        let w3 = 4.0 * w1 + 2.0 * z * w2;
        let s = self.s;
        [w0, w1 * s, w2 * s * s, w3 * s * s * s]
    }
}

/// `h(x) = poly(x) w(x)` for a cubic polynomial `poly`, coefficients in
/// ascending order.
struct Product<'a> {
    poly: [Complex64; 4],
    kernel: &'a Kernel,
}

impl Product<'_> {
    fn poly_derivs(&self, x: Complex64) -> [Complex64; 4] {
        let [c0, c1, c2, c3] = self.poly;
        [
            c0 + x * (c1 + x * (c2 + x * c3)),
            c1 + x * (2.0 * c2 + x * 3.0 * c3),
            2.0 * c2 + 6.0 * c3 * x,
            6.0 * c3,
        ]
    }

    fn value(&self, x: Complex64) -> Complex64 {
        self.poly_derivs(x)[0] * self.kernel.value(x)
    }

    fn derivatives(&self, x: Complex64) -> [Complex64; 4] {
        let p = self.poly_derivs(x);
        let w = self.kernel.derivatives(x);
        [
            p[0] * w[0],
            p[1] * w[0] + p[0] * w[1],
            p[2] * w[0] + 2.0 * p[1] * w[1] + p[0] * w[2],
            p[3] * w[0] + 3.0 * p[2] * w[1] + 3.0 * p[1] * w[2] + p[0] * w[3],
        ]
    }

    /// `h[a, b]`; Taylor about the midpoint when `a ≈ b`.
    fn dd2(&self, a: Complex64, b: Complex64, close: bool) -> Complex64 {
        if close {
            let d = a - b;
            let h = self.derivatives(0.5 * (a + b));
            h[1] + h[3] * d * d / 24.0
        } else {
            (self.value(a) - self.value(b)) / (a - b)
        }
    }

    /// `h[x0, x1, x2]`, or `None` when all three points cluster.
    fn dd3(&self, x: [Complex64; 3]) -> Option<Complex64> {
        let tol = TAYLOR_SEPARATION / self.kernel.s.max(1.0);
        let pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
        let (i, j, k) = *pairs
            .iter()
            .min_by(|p, q| (x[p.0] - x[p.1]).norm().total_cmp(&(x[q.0] - x[q.1]).norm()))
            .unwrap();
        let close = (x[i] - x[j]).norm() < tol;
        if !close {
            let f = |a: usize, b: usize, c: usize| self.value(x[a]) / ((x[a] - x[b]) * (x[a] - x[c]));
            return Some(f(0, 1, 2) + f(1, 0, 2) + f(2, 0, 1));
        }
        if (x[i] - x[k]).norm() < tol || (x[j] - x[k]).norm() < tol {
            return None;
        }
        // h[xi, xj, xk] = (h[xj, xk] - h[xi, xj]) / (xk - xi)
        Some((self.dd2(x[j], x[k], false) - self.dd2(x[i], x[j], true)) / (x[k] - x[i]))
    }
}

/// How a CIR or Green's function value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Method {
    /// `kf = 0`: nothing ever binds.
    Inert,
    /// Absorbing surface without degradation.
    Irreversible,
    /// Absorbing surface with degradation.
    IrreversibleDegrading,
    /// `kb = kd = 0`, finite `kf`.
    Saturating,
    /// Three-root expression.
    General,
    /// Three-root expression after nudging `kd` away from a triple root.
    Perturbed { kd: f64 },
}

/// A real result together with the discarded imaginary residue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub imag_residue: f64,
    pub method: Method,
}

fn check_time(t: f64) -> Result<(), AnalyticError> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(AnalyticError::InvalidTime(t))
    }
}

fn realize(z: Complex64, method: Method) -> Result<Evaluation, AnalyticError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(AnalyticError::NotReal { value: z.re, imag: z.im });
    }
    if z.im.abs() > REALNESS_TOL * z.re.abs() && z.im.abs() > f64::MIN_POSITIVE {
        return Err(AnalyticError::NotReal { value: z.re, imag: z.im });
    }
    Ok(Evaluation { value: z.re, imag_residue: z.im, method })
}

/// `kd` nudged by 1e-9 relative (1e-9 absolute at zero).
fn perturbed_kd(kd: f64) -> f64 {
    if kd == 0.0 {
        1e-9
    } else {
        kd * (1.0 + 1e-9)
    }
}

/// Evaluate a divided-difference sum, falling back to a perturbed `kd`
/// when the roots cluster. `build` maps `(params, roots)` to the product
/// function and prefactor.
fn dd_with_fallback<F>(p: &DimensionlessParams, t: f64, mut eval: F) -> Result<(Complex64, Method), AnalyticError>
where
    F: FnMut(&DimensionlessParams, &CubicRoots, f64) -> Option<Complex64>,
{
    let roots = solve_roots(p)?;
    if let Some(v) = eval(p, &roots, t) {
        return Ok((v, Method::General));
    }
    let mut q = *p;
    q.kd = perturbed_kd(p.kd);
    let roots = solve_roots(&q)?;
    eval(&q, &roots, t)
        .map(|v| (v, Method::Perturbed { kd: q.kd }))
        .ok_or(AnalyticError::Unsupported("clustered roots survive kd perturbation"))
}

/// Channel impulse response `P_AC(t' | r0')`: probability that one molecule
/// is bound at time `t'`.
pub fn cir(t: f64, p: &DimensionlessParams) -> Result<f64, AnalyticError> {
    cir_detailed(t, p).map(|e| e.value)
}

/// [`cir`] with the imaginary residue and the evaluation branch.
pub fn cir_detailed(t: f64, p: &DimensionlessParams) -> Result<Evaluation, AnalyticError> {
    check_time(t)?;
    p.validate()?;
    let real = |value: f64, method| Evaluation { value, imag_residue: 0.0, method };
    if p.kf == 0.0 {
        return Ok(real(0.0, Method::Inert));
    }
    if p.kf.is_infinite() {
        if p.kb != 0.0 {
            return Err(AnalyticError::Unsupported("kf = inf requires kb = 0"));
        }
        return Ok(if p.kd == 0.0 {
            real(cir_irreversible(t, p.r0)?, Method::Irreversible)
        } else {
            real(cir_irreversible_degrading(t, p.kd, p.r0)?, Method::IrreversibleDegrading)
        });
    }
    if p.kb == 0.0 && p.kd == 0.0 {
        return Ok(real(cir_saturating(t, p.kf, p.r0), Method::Saturating));
    }
    let (z, method) = dd_with_fallback(p, t, |q, roots, t| {
        let s = t.sqrt();
        let kernel = Kernel { n: Complex64::new((q.r0 - 1.0) / (2.0 * s), 0.0), s, decay: q.kd * t };
        let zero = Complex64::new(0.0, 0.0);
        let h = Product { poly: [zero, Complex64::new(-1.0, 0.0), zero, zero], kernel: &kernel };
        h.dd3(roots.as_array()).map(|v| v * (q.kf / (4.0 * PI * q.r0)))
    })?;
    realize(z, method)
}

/// `kb = kd = 0`: `(1/r0) (kf/(kf + 4π)) [erfc(n) - W(n, S1 √t)]`.
fn cir_saturating(t: f64, kf: f64, r0: f64) -> f64 {
    let s1 = 1.0 + kf / (4.0 * PI);
    let n = (r0 - 1.0) / (2.0 * t.sqrt());
    let v = (erfc(n) - wfun_damped_real(n, s1 * t.sqrt(), 0.0)) * kf / ((kf + 4.0 * PI) * r0);
    v.max(0.0)
}

/// Absorbing receiver with bulk degradation:
/// `(1/(2r0)) [e^{√kd (r0-1)} erfc(n + √(kd t)) + e^{-√kd (r0-1)} erfc(n - √(kd t))]`.
pub fn cir_irreversible_degrading(t: f64, kd: f64, r0: f64) -> Result<f64, AnalyticError> {
    check_time(t)?;
    if !(kd.is_finite() && kd >= 0.0) {
        return Err(UnitsError::Invalid { name: "kd", reason: "must be non-negative and finite".into() }.into());
    }
    check_r0(r0)?;
    let x = (r0 - 1.0) / (2.0 * t.sqrt());
    let y = (kd * t).sqrt();
    // With 2xy = √kd (r0 - 1) both exponents reduce to -x² - y².
    let damp = (-x * x - y * y).exp();
    let first = damp * erfcx_real(x + y);
    let second = if x >= y {
        damp * erfcx_real(x - y)
    } else {
        2.0 * (-2.0 * x * y).exp() - damp * erfcx_real(y - x)
    };
    Ok(((first + second) / (2.0 * r0)).max(0.0))
}

/// Absorbing receiver, no degradation: `(1/r0) erfc((r0 - 1)/√(4t))`.
pub fn cir_irreversible(t: f64, r0: f64) -> Result<f64, AnalyticError> {
    check_time(t)?;
    check_r0(r0)?;
    Ok(erfc((r0 - 1.0) / (2.0 * t.sqrt())) / r0)
}

fn check_r0(r0: f64) -> Result<(), AnalyticError> {
    if r0.is_finite() && r0 > 1.0 {
        Ok(())
    } else {
        Err(UnitsError::Invalid { name: "r0", reason: "must be finite and greater than 1".into() }.into())
    }
}

/// Long-time binding probability when nothing unbinds or degrades:
/// `(1/r0) kf/(kf + 4π)`, and `1/r0` for `kf = inf`.
pub fn cir_asymptote(p: &DimensionlessParams) -> Result<f64, AnalyticError> {
    p.validate()?;
    if p.kb != 0.0 || p.kd != 0.0 {
        return Err(AnalyticError::Unsupported("asymptote requires kb = kd = 0"));
    }
    if p.kf.is_infinite() {
        return Ok(1.0 / p.r0);
    }
    Ok(p.kf / (p.kf + 4.0 * PI) / p.r0)
}

/// Probability density `P_A(r', t' | r0')` of finding a free molecule at
/// radius `r'`.
pub fn greens_function(r: f64, t: f64, p: &DimensionlessParams) -> Result<f64, AnalyticError> {
    greens_detailed(r, t, p).map(|e| e.value)
}

/// [`greens_function`] with the imaginary residue and evaluation branch.
pub fn greens_detailed(r: f64, t: f64, p: &DimensionlessParams) -> Result<Evaluation, AnalyticError> {
    check_time(t)?;
    p.validate()?;
    if !(r.is_finite() && r >= 1.0) {
        return Err(AnalyticError::InsideReceiver(r));
    }
    let s = t.sqrt();
    let decay = p.kd * t;
    let g1 = (-decay - (r - p.r0).powi(2) / (4.0 * t)).exp();
    let g2 = (-decay - (r + p.r0 - 2.0).powi(2) / (4.0 * t)).exp();
    let gauss_scale = 1.0 / (8.0 * PI * r * p.r0 * (PI * t).sqrt());
    if p.kf.is_infinite() {
        if p.kb != 0.0 {
            return Err(AnalyticError::Unsupported("kf = inf requires kb = 0"));
        }
        let method = if p.kd == 0.0 { Method::Irreversible } else { Method::IrreversibleDegrading };
        return realize(Complex64::new((g1 - g2) * gauss_scale, 0.0), method);
    }
    let n2 = (r + p.r0 - 2.0) / (2.0 * s);
    let (sum, method) = dd_with_fallback(p, t, |q, roots, t| {
        let kernel = Kernel { n: Complex64::new(n2, 0.0), s, decay: q.kd * t };
        let zero = Complex64::new(0.0, 0.0);
        let e2 = Complex64::new(q.kb - q.kd, 0.0);
        let g = Product { poly: [zero, e2, zero, Complex64::new(1.0, 0.0)], kernel: &kernel };
        g.dd3(roots.as_array())
    })?;
    let method = if p.kb == 0.0 && p.kd == 0.0 && method == Method::General { Method::Saturating } else { method };
    // A perturbed kd changes the image terms by a relative 1e-9 at most; they
    // keep the requested kd.
    let z = (g1 + g2) * gauss_scale - sum / (4.0 * PI * r * p.r0);
    realize(z, method)
}

/// Time-grid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

/// `count` points from `start` to `end` inclusive.
pub fn time_grid(start: f64, end: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>, AnalyticError> {
    if !(start.is_finite() && end.is_finite() && start > 0.0 && end > start && count >= 2) {
        return Err(AnalyticError::InvalidGrid);
    }
    let last = (count - 1) as f64;
    let mut v: Vec<f64> = (0..count)
        .map(|i| {
            let f = i as f64 / last;
            match spacing {
                Spacing::Linear => start + (end - start) * f,
                Spacing::Log => (start.ln() + (end.ln() - start.ln()) * f).exp(),
            }
        })
        .collect();
    v[0] = start;
    v[count - 1] = end;
    Ok(v)
}

/// Expected number of bound receptors `N_A · P_AC(t')` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: DimensionlessParams,
    /// Set when a triple root forced evaluation at a nudged `kd`.
    pub perturbed_kd: Option<f64>,
}

impl SignalCurve {
    /// The curve with an exact zero prepended at `t' = 0`.
    pub fn with_origin(mut self) -> Self {
        if self.times.first() != Some(&0.0) {
            self.times.insert(0, 0.0);
            self.values.insert(0, 0.0);
        }
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Time of the largest value (first occurrence).
    pub fn peak(&self) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for (&t, &v) in self.times.iter().zip(&self.values) {
            if best.is_none_or(|b| v > b.1) {
                best = Some((t, v));
            }
        }
        best
    }
}

/// `N_A · cir(t')` on `grid`, which must be strictly increasing and positive.
pub fn expected_signal(grid: &[f64], p: &DimensionlessParams) -> Result<SignalCurve, AnalyticError> {
    p.validate()?;
    if grid.is_empty() || grid[0].is_nan() || grid[0] <= 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(AnalyticError::InvalidGrid);
    }
    if !grid[grid.len() - 1].is_finite() {
        return Err(AnalyticError::InvalidGrid);
    }
    let na = p.na as f64;
    let evals: Vec<Evaluation> = grid.par_iter().map(|&t| cir_detailed(t, p)).collect::<Result<_, _>>()?;
    let perturbed_kd = evals.iter().find_map(|e| match e.method {
        Method::Perturbed { kd } => Some(kd),
        _ => None,
    });
    let values = evals.iter().map(|e| (na * e.value).clamp(0.0, na)).collect();
    Ok(SignalCurve { times: grid.to_vec(), values, meta: *p, perturbed_kd })
}
