//! Per-step reaction probabilities and the rebinding-radius distribution.

use rand::Rng;
use std::f64::consts::PI;

use super::SimError;
use crate::quad::integrate;
use crate::specfun::erfc;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Points in the rebinding inverse-CDF table.
pub const REBIND_TABLE_POINTS: usize = 4096;
/// Support of the rebinding density, in units of `σ = √(4 dt)`.
pub const REBIND_CUTOFF_SIGMAS: f64 = 8.0;

/// Chance that a free molecule degrades during one step: `1 - e^{-kd dt}`.
pub fn degradation_prob(kd: f64, dt: f64) -> f64 {
    -(-kd * dt).exp_m1()
}

/// Chance that a bound molecule unbinds during one step: `1 - e^{-kb dt}`.
pub fn unbinding_prob(kb: f64, dt: f64) -> f64 {
    -(-kb * dt).exp_m1()
}

/// Probability that a molecule at radius `r ≥ 1` would land inside the unit
/// sphere after a Gaussian step with `σ² = 4 dt`:
///
/// `σ/(2r√π) [e^{-(r+1)²/σ²} - e^{-(r-1)²/σ²}] + ½ [erfc((r-1)/σ) - erfc((r+1)/σ)]`.
pub fn overlap_probability(r: f64, dt: f64) -> f64 {
    let sigma = (4.0 * dt).sqrt();
    let (a, b) = ((r + 1.0) / sigma, (r - 1.0) / sigma);
    let gauss = sigma * FRAC_1_SQRT_PI / (2.0 * r) * ((-a * a).exp() - (-b * b).exp());
    (gauss + 0.5 * (erfc(b) - erfc(a))).clamp(0.0, 1.0)
}

/// `ρ = ∫_1^∞ Pr(overlap | r) r² dr`, truncated at `1 + 8σ`.
pub fn rho_normalization(dt: f64) -> Result<f64, SimError> {
    rho_with_cutoff(dt, REBIND_CUTOFF_SIGMAS, 1e-12)
}

/// [`rho_normalization`] with an explicit cutoff (in σ) and relative tolerance.
pub fn rho_with_cutoff(dt: f64, sigmas: f64, rel_tol: f64) -> Result<f64, SimError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(SimError::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    let sigma = (4.0 * dt).sqrt();
    let q = integrate(|r| overlap_probability(r, dt) * r * r, 1.0, 1.0 + sigmas * sigma, 0.0, rel_tol)?;
    Ok(q.value)
}

/// Binding probability of an overlapping molecule: `kf dt/(4π ρ)`.
/// Values above 1 mean the step is too coarse for `kf`.
pub fn forward_reaction_prob(kf: f64, dt: f64, rho: f64) -> Result<f64, SimError> {
    let p = kf * dt / (4.0 * PI * rho);
    if !(p <= 1.0) {
        return Err(SimError::StepTooLarge { probability: p, kf, dt });
    }
    Ok(p)
}

/// Inverse-CDF sampler for the radius at which an unbound molecule is
/// placed, with density `Pr(overlap | r) r² / ρ` on `[1, 1 + 8σ]`.
#[derive(Debug, Clone)]
pub struct RebindSampler {
    radii: Vec<f64>,
    cdf: Vec<f64>,
}

impl RebindSampler {
    pub fn new(dt: f64) -> Result<Self, SimError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SimError::InvalidConfig(format!("dt must be positive, got {dt}")));
        }
        let sigma = (4.0 * dt).sqrt();
        let width = REBIND_CUTOFF_SIGMAS * sigma;
        let n = REBIND_TABLE_POINTS;
        let radii: Vec<f64> = (0..n).map(|i| 1.0 + width * i as f64 / (n - 1) as f64).collect();
        let mut cdf = Vec::with_capacity(n);
        cdf.push(0.0);
        let mut acc = 0.0;
        for w in radii.windows(2) {
            acc += integrate(|r| overlap_probability(r, dt) * r * r, w[0], w[1], 0.0, 1e-13)?.value;
            cdf.push(acc);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Ok(Self { radii, cdf })
    }

    /// Table CDF at `r`, linear between nodes.
    pub fn cdf(&self, r: f64) -> f64 {
        if r <= self.radii[0] {
            return 0.0;
        }
        let last = self.radii.len() - 1;
        if r >= self.radii[last] {
            return 1.0;
        }
        let i = self.radii.partition_point(|&x| x <= r) - 1;
        let f = (r - self.radii[i]) / (self.radii[i + 1] - self.radii[i]);
        self.cdf[i] + f * (self.cdf[i + 1] - self.cdf[i])
    }

    /// Radius for the uniform variate `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let f = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.radii[i - 1] + f.clamp(0.0, 1.0) * (self.radii[i] - self.radii[i - 1])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degradation_examples() {
        assert_eq!(degradation_prob(0.0, 1e-3), 0.0);
        assert!((degradation_prob(2f64.ln(), 1.0) - 0.5).abs() < 1e-16);
        assert!((degradation_prob(10.0, 1e-3) - 0.009_950_166_250_831_946).abs() < 1e-17);
    }

    #[test]
    fn overlap_limits() {
        assert_eq!(overlap_probability(1e6, 1e-3), 0.0);
        assert!(overlap_probability(1.1, 1e-12) <= 1e-15);
        assert!((overlap_probability(1.0, 1e-12) - 0.5).abs() < 1e-5);
    }

    #[test]
    fn forward_probability_bounds() {
        assert_eq!(forward_reaction_prob(0.0, 1e-3, 0.0178).unwrap(), 0.0);
        assert!(matches!(forward_reaction_prob(f64::INFINITY, 1e-3, 0.0178), Err(SimError::StepTooLarge { .. })));
        let a = forward_reaction_prob(10.0, 1e-3, 0.0178).unwrap();
        let b = forward_reaction_prob(20.0, 1e-3, 0.0178).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-16);
    }

    #[test]
    fn quantile_inverts_cdf() {
        let s = RebindSampler::new(1e-3).unwrap();
        for u in [0.0, 0.1, 0.5, 0.9, 0.999_999] {
            assert!((s.cdf(s.quantile(u)) - u).abs() < 1e-12);
        }
        assert!(s.quantile(0.0) >= 1.0);
    }
}
