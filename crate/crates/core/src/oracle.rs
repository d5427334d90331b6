//! Laplace-domain solution and numerical inversion, used to cross-check the
//! closed forms of [`crate::analytic`].
//!
//! With `q = sqrt(s + kd)` (principal branch) and `K(s) = kf s/(s + kb)`:
//!
//! ```text
//! P̄(r, s) = e^{-q|r-r0|}/(8π r r0 q) + e^{-q(r+r0-2)}/(8π r r0 q)
//!          - (4π + K)/(4π q + 4π + K) · e^{-q(r+r0-2)}/(4π r r0 q)
//! P̄_AC(s) = kf e^{-q(r0-1)} / (r0 [4π (q + 1)(s + kb) + kf s])
//! ```
//!
//! Inversion uses the Talbot contour `z(θ) = c + λ(σ + μ θ cot(aθ) + iνθ)`
//! with Weideman's parameters, shifted to the branch point `c = -kd` and
//! scaled so that it passes through the saddle of `e^{st - n√(s+kd)}` and
//! encloses every pole.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::analytic::{solve_roots, AnalyticError};
use crate::units::{DimensionlessParams, UnitsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Params(#[from] UnitsError),
    #[error("s = {0} lies on the branch cut of sqrt(s + kd)")]
    BranchCut(Complex64),
    #[error("radius must be at least 1, got {0}")]
    InsideReceiver(f64),
    #[error("time must be positive and finite, got {0}")]
    InvalidTime(f64),
    #[error("inversion did not converge at t = {t}: {coarse} vs {fine}")]
    NotConverged { t: f64, coarse: f64, fine: f64 },
    #[error("transform returned a non-finite value at s = {0}")]
    NonFinite(Complex64),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

/// A Laplace-domain evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceQuery {
    pub s: Complex64,
    pub params: DimensionlessParams,
    /// Present for Green's-function queries.
    pub r: Option<f64>,
}

/// `mantissa · exp(exponent)`; keeps `e^{st} F(s)` representable when `F`
/// alone would underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub exponent: Complex64,
}

impl Scaled {
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.exponent.exp()
    }
}

/// A Laplace transform that can be inverted by [`talbot_invert`].
pub trait LaplaceTransform {
    fn eval(&self, s: Complex64) -> Scaled;

    /// Leftmost singularity on the real axis; the contour is centred there.
    fn branch_point(&self) -> f64 {
        0.0
    }

    /// `n` in an `e^{-n sqrt(s - branch_point)}` factor, if any.
    fn decay_distance(&self) -> f64 {
        0.0
    }

    /// Poles the contour must enclose.
    fn poles(&self) -> Vec<Complex64> {
        Vec::new()
    }
}

/// Plain closures are treated as transforms without special structure.
impl<F: Fn(Complex64) -> Complex64> LaplaceTransform for F {
    fn eval(&self, s: Complex64) -> Scaled {
        Scaled { mantissa: self(s), exponent: Complex64::new(0.0, 0.0) }
    }
}

fn check_s(s: Complex64, kd: f64) -> Result<(), OracleError> {
    if !(s.re.is_finite() && s.im.is_finite()) || (s.im == 0.0 && s.re <= -kd) {
        return Err(OracleError::BranchCut(s));
    }
    Ok(())
}

/// Laplace transform of the Green's function.
pub fn laplace_greens(query: &LaplaceQuery) -> Result<Complex64, OracleError> {
    let p = &query.params;
    p.validate()?;
    let r = query.r.unwrap_or(1.0);
    if !(r.is_finite() && r >= 1.0) {
        return Err(OracleError::InsideReceiver(r));
    }
    check_s(query.s, p.kd)?;
    Ok(GreensTransform { params: *p, r }.eval(query.s).value())
}

/// Laplace transform of the channel impulse response.
pub fn laplace_cir(s: Complex64, p: &DimensionlessParams) -> Result<Complex64, OracleError> {
    p.validate()?;
    check_s(s, p.kd)?;
    Ok(CirTransform::new(*p)?.eval(s).value())
}

/// Poles `s = x² - kd` for roots `-x` of the boundary cubic in `q` lying on
/// the principal sheet (`Re(-x) > 0`).
fn boundary_poles(p: &DimensionlessParams) -> Vec<Complex64> {
    if p.kf.is_infinite() {
        return Vec::new();
    }
    match solve_roots(p) {
        Ok(r) => r
            .as_array()
            .iter()
            .filter(|a| a.re < 0.0)
            .map(|a| a * a - p.kd)
            .collect(),
        Err(_) => Vec::new(),
    }
}

/// `P̄_AC(s)` with its exponential factor kept apart.
#[derive(Debug, Clone)]
pub struct CirTransform {
    params: DimensionlessParams,
    poles: Vec<Complex64>,
}

impl CirTransform {
    pub fn new(params: DimensionlessParams) -> Result<Self, OracleError> {
        params.validate()?;
        Ok(Self { params, poles: boundary_poles(&params) })
    }
}

impl LaplaceTransform for CirTransform {
    fn eval(&self, s: Complex64) -> Scaled {
        let p = &self.params;
        let q = (s + p.kd).sqrt();
        let exponent = -q * (p.r0 - 1.0);
        let mantissa = if p.kf == 0.0 {
            Complex64::new(0.0, 0.0)
        } else if p.kf.is_infinite() {
            // kf → inf: 1/(r0 s)
            1.0 / (p.r0 * s)
        } else {
            p.kf / (p.r0 * (4.0 * PI * (q + 1.0) * (s + p.kb) + p.kf * s))
        };
        Scaled { mantissa, exponent }
    }

    fn branch_point(&self) -> f64 {
        -self.params.kd
    }

    fn decay_distance(&self) -> f64 {
        self.params.r0 - 1.0
    }

    fn poles(&self) -> Vec<Complex64> {
        let mut v = self.poles.clone();
        if self.params.kf.is_infinite() {
            v.push(Complex64::new(0.0, 0.0));
        }
        v
    }
}

/// `P̄_A(r, s)` with the slowest-decaying exponential kept apart.
#[derive(Debug, Clone)]
pub struct GreensTransform {
    pub params: DimensionlessParams,
    pub r: f64,
}

impl LaplaceTransform for GreensTransform {
    fn eval(&self, s: Complex64) -> Scaled {
        let p = &self.params;
        let r = self.r;
        let q = (s + p.kd).sqrt();
        let n1 = (r - p.r0).abs();
        let n2 = r + p.r0 - 2.0;
        // Relative factor of the image terms against e^{-q n1}.
        let rel = (-q * (n2 - n1)).exp();
        let bracket = if p.kf.is_infinite() {
            Complex64::new(1.0, 0.0)
        } else {
            let k = s * p.kf / (s + p.kb);
            (4.0 * PI + k) / (4.0 * PI * q + 4.0 * PI + k)
        };
        let base = 1.0 / (8.0 * PI * r * p.r0 * q);
        let mantissa = base + base * rel - 2.0 * bracket * base * rel;
        Scaled { mantissa, exponent: -q * n1 }
    }

    fn branch_point(&self) -> f64 {
        -self.params.kd
    }

    fn decay_distance(&self) -> f64 {
        (self.r - self.params.r0).abs()
    }

    fn poles(&self) -> Vec<Complex64> {
        boundary_poles(&self.params)
    }
}

const SIGMA: f64 = -0.6122;
const MU: f64 = 0.5017;
const ALPHA: f64 = 0.6407;
const NU: f64 = 0.2645;
const CONTOUR_SCALE: f64 = 30.0;
/// Contour crossing of the real axis, `φ(0) = σ + μ/α`.
const PHI0: f64 = SIGMA + MU / ALPHA;

fn contour(theta: f64) -> (Complex64, Complex64) {
    let at = ALPHA * theta;
    let cot = at.cos() / at.sin();
    let z = Complex64::new(SIGMA + MU * theta * cot, NU * theta);
    let dz = Complex64::new(MU * (cot - at / (at.sin() * at.sin())), NU);
    (z, dz)
}

/// True when `p` (upper half plane) lies inside the unscaled contour
/// `c + λ z(θ)`.
fn encloses(p: Complex64, shift: f64, lambda: f64) -> bool {
    let x = (p.re - shift) / lambda;
    let y = p.im.abs() / lambda;
    if x >= PHI0 {
        return false;
    }
    // Re z(θ) decreases monotonically from φ(0) to -inf on (0, π).
    let (mut lo, mut hi) = (0.0, PI);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if contour(mid).0.re > x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    contour(0.5 * (lo + hi)).0.im > y
}

/// Contour scale and node count for `f` at time `t`.
fn plan<F: LaplaceTransform + ?Sized>(f: &F, t: f64, n_nodes: usize) -> (f64, f64, usize) {
    let shift = f.branch_point();
    // Rounding error grows like e^{φ(0) λ t}; the node count only needs to
    // resolve the contour, so the scale stays independent of it.
    let mut lambda = CONTOUR_SCALE / t;
    let mut nodes = n_nodes;
    let n = f.decay_distance();
    if n > 0.0 {
        // Saddle of e^{ut - n√u} at u* = n²/(4t²); the integrand is then a
        // Gaussian in θ of width ~ √(8t) φ(0)/(ν n).
        let saddle = n * n / (4.0 * t * t);
        lambda = lambda.max(saddle / PHI0);
        nodes = nodes.max((6.0 * n / t.sqrt()).ceil() as usize);
    }
    for p in f.poles() {
        while !encloses(p, shift, 0.7 * lambda) {
            lambda *= 1.25;
        }
    }
    // Resolution: at least as many nodes per unit of λt as the default plan.
    let resolved = (lambda * t * n_nodes as f64 / CONTOUR_SCALE).ceil() as usize;
    let nodes = nodes.max(resolved).max(n_nodes);
    (shift, lambda, nodes + nodes % 2)
}

fn talbot_sum<F: LaplaceTransform + ?Sized>(f: &F, t: f64, shift: f64, lambda: f64, nodes: usize) -> Result<f64, OracleError> {
    let h = 2.0 * PI / nodes as f64;
    let mut sum = 0.0;
    for k in 0..nodes / 2 {
        let theta = (k as f64 + 0.5) * h;
        let (z, dz) = contour(theta);
        let s = shift + lambda * z;
        let v = f.eval(s);
        let term = v.mantissa * (s * t + v.exponent).exp() * dz * lambda;
        if !(term.re.is_finite() && term.im.is_finite()) {
            return Err(OracleError::NonFinite(s));
        }
        sum += term.im;
    }
    Ok(sum * h / PI)
}

/// Inverse Laplace transform of `f` at `t` by the midpoint rule on a Talbot
/// contour with at least `n_nodes` nodes (64 is a good default).
///
/// The result is accepted only if a run with 1.5 times the nodes agrees to
/// `1e-9 (1 + |result|)`. On disagreement the node count doubles, at most
/// [`MAX_DOUBLINGS`] times, before non-convergence is reported.
pub fn talbot_invert<F: LaplaceTransform + ?Sized>(f: &F, t: f64, n_nodes: usize) -> Result<f64, OracleError> {
    if !(t.is_finite() && t > 0.0) {
        return Err(OracleError::InvalidTime(t));
    }
    let (shift, lambda, mut nodes) = plan(f, t, n_nodes.max(8));
    let mut attempt = 0;
    loop {
        let coarse = talbot_sum(f, t, shift, lambda, nodes)?;
        let fine_nodes = nodes * 3 / 2;
        let fine = talbot_sum(f, t, shift, lambda, fine_nodes + fine_nodes % 2)?;
        if (coarse - fine).abs() <= 1e-9 * (1.0 + fine.abs()) {
            return Ok(fine);
        }
        if attempt == MAX_DOUBLINGS {
            return Err(OracleError::NotConverged { t, coarse, fine });
        }
        attempt += 1;
        nodes *= 2;
    }
}

pub const MAX_DOUBLINGS: u32 = 4;

/// CIR at `t` by inversion of [`laplace_cir`].
pub fn cir_by_inversion(t: f64, p: &DimensionlessParams, n_nodes: usize) -> Result<f64, OracleError> {
    talbot_invert(&CirTransform::new(*p)?, t, n_nodes)
}

/// Green's function at `(r, t)` by inversion of [`laplace_greens`].
pub fn greens_by_inversion(r: f64, t: f64, p: &DimensionlessParams, n_nodes: usize) -> Result<f64, OracleError> {
    p.validate()?;
    if !(r.is_finite() && r >= 1.0) {
        return Err(OracleError::InsideReceiver(r));
    }
    talbot_invert(&GreensTransform { params: *p, r }, t, n_nodes)
}
