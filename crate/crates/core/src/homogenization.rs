//! Boundary homogenization: a sphere carrying `M` small reactive patches is
//! replaced by a uniformly reactive sphere with an effective forward rate.
//!
//! All quantities are non-dimensional (`a = D = C∞ = 1`). Steady fluxes:
//! `J_sph = 4π kf/(kf + 4π)` into the fully covered sphere and
//! `j_r = 4 rs/(1 + 16/(rs kf))` into one patch of radius `rs`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::units::DimensionlessParams;

/// Coverage above 1 within this slack is treated as exactly 1.
const COVERAGE_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomogenizationError {
    #[error("receptor coverage {0} exceeds 1")]
    Overcovered(f64),
    #[error("receptor radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("forward rate must be non-negative, got {0}")]
    BadRate(f64),
    #[error("mesh with {m_max} triangles cannot host {m} receptors")]
    TooManyReceptors { m: u64, m_max: u64 },
}

/// `M` patches of radius `rs` covering a fraction `coverage` of the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceptorLayout {
    pub m: u64,
    pub rs: f64,
    pub coverage: f64,
}

impl ReceptorLayout {
    /// Circular patches: coverage `M rs²/4`.
    pub fn circular(m: u64, rs: f64) -> Result<Self, HomogenizationError> {
        if m > 0 && !(rs.is_finite() && rs > 0.0) {
            return Err(HomogenizationError::BadRadius(rs));
        }
        let coverage = m as f64 * rs * rs / 4.0;
        Self::checked(m, rs, coverage)
    }

    /// `M` of the `m_max` equal triangles of a tiled sphere: coverage
    /// `M/m_max`, radius of the equal-area disc `√(4/m_max)`.
    pub fn from_mesh(m: u64, m_max: u64) -> Result<Self, HomogenizationError> {
        if m > m_max || m_max == 0 {
            return Err(HomogenizationError::TooManyReceptors { m, m_max });
        }
        let rs = equivalent_receptor_radius(4.0 * PI / m_max as f64);
        Self::checked(m, rs, m as f64 / m_max as f64)
    }

    fn checked(m: u64, rs: f64, coverage: f64) -> Result<Self, HomogenizationError> {
        if coverage > 1.0 + COVERAGE_SLACK {
            return Err(HomogenizationError::Overcovered(coverage));
        }
        Ok(Self { m, rs, coverage: coverage.min(1.0) })
    }
}

/// Steady-state fluxes into the covered sphere and into one patch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxPair {
    pub j_sphere: f64,
    pub j_receptor: f64,
}

pub fn steady_state_fluxes(layout: &ReceptorLayout, kf: f64) -> FluxPair {
    if kf.is_infinite() {
        return FluxPair { j_sphere: 4.0 * PI, j_receptor: 4.0 * layout.rs };
    }
    if kf == 0.0 {
        return FluxPair { j_sphere: 0.0, j_receptor: 0.0 };
    }
    FluxPair {
        j_sphere: 4.0 * PI * kf / (kf + 4.0 * PI),
        j_receptor: 4.0 * layout.rs / (1.0 + 16.0 / (layout.rs * kf)),
    }
}

/// Correction factor
/// `φ = M rs² (kf + 4π) / ((1 - λ)(π rs kf + 16π) + M rs² (kf + 4π))`;
/// `kf = inf` gives [`zwanzig_factor`].
pub fn correction_factor(layout: &ReceptorLayout, kf: f64) -> Result<f64, HomogenizationError> {
    if kf.is_nan() || kf < 0.0 {
        return Err(HomogenizationError::BadRate(kf));
    }
    if layout.coverage > 1.0 + COVERAGE_SLACK {
        return Err(HomogenizationError::Overcovered(layout.coverage));
    }
    if layout.m == 0 {
        return Ok(0.0);
    }
    if kf.is_infinite() {
        return Ok(zwanzig_factor(layout));
    }
    let lam = layout.coverage.min(1.0);
    let m = layout.m as f64;
    let rs = layout.rs;
    let num = m * rs * rs * (kf + 4.0 * PI);
    let den = (1.0 - lam) * (PI * rs * kf + 16.0 * PI) + num;
    Ok((num / den).clamp(0.0, 1.0))
}

/// Effective uniform rate `4π kf φ/(kf (1 - φ) + 4π)`.
pub fn effective_forward_rate(kf: f64, phi: f64) -> f64 {
    if phi <= 0.0 {
        return 0.0;
    }
    if kf.is_infinite() {
        return if phi >= 1.0 { f64::INFINITY } else { 4.0 * PI * phi / (1.0 - phi) };
    }
    if phi >= 1.0 {
        return kf;
    }
    (4.0 * PI * kf * phi / (kf * (1.0 - phi) + 4.0 * PI)).min(kf)
}

/// Perfectly absorbing patches, no coverage correction: `M rs/(π + M rs)`.
pub fn berg_purcell_factor(layout: &ReceptorLayout) -> f64 {
    let x = layout.m as f64 * layout.rs;
    if x == 0.0 {
        0.0
    } else {
        x / (PI + x)
    }
}

/// Perfectly absorbing patches with coverage correction:
/// `M 4rs/((1 - λ) 4π + M 4rs)`.
pub fn zwanzig_factor(layout: &ReceptorLayout) -> f64 {
    let mj = layout.m as f64 * 4.0 * layout.rs;
    if mj == 0.0 {
        return 0.0;
    }
    mj / ((1.0 - layout.coverage.min(1.0)) * 4.0 * PI + mj)
}

/// Radius of the disc with the given area.
pub fn equivalent_receptor_radius(area: f64) -> f64 {
    (area / PI).sqrt()
}

/// `p` with `kf` replaced by the homogenized rate.
pub fn finite_receptor_params(
    p: &DimensionlessParams,
    layout: &ReceptorLayout,
) -> Result<DimensionlessParams, HomogenizationError> {
    let phi = correction_factor(layout, p.kf)?;
    let mut out = *p;
    out.kf = effective_forward_rate(p.kf, phi);
    Ok(out)
}
