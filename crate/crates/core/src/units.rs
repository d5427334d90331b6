//! Physical parameters and their non-dimensional form.
//!
//! With reference distance `r_ref` and reference count `N_ref`:
//! `kf' = kf N_ref / (D r_ref)`, `kb' = kb r_ref^2 / D`,
//! `kd' = kd r_ref^2 / D`, `r0' = r0 / r_ref`, `t' = D t / r_ref^2`.
//! The defaults `r_ref = a`, `N_ref = 1` put the receiver surface at `r' = 1`,
//! which every downstream module assumes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitsError {
    #[error("invalid parameter {name}: {reason}")]
    Invalid { name: &'static str, reason: String },
}

fn invalid(name: &'static str, reason: impl Into<String>) -> UnitsError {
    UnitsError::Invalid { name, reason: reason.into() }
}

/// Dimensional system description (SI units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Receiver radius `a` (m).
    pub receiver_radius: f64,
    /// Release distance `r0` from the receiver centre (m).
    pub release_distance: f64,
    /// Diffusion coefficient `D_A` (m^2/s).
    pub diffusion: f64,
    /// Forward reaction rate `kf` (m^3/(molecule s)); may be `+inf`.
    pub kf: f64,
    /// Backward reaction rate `kb` (1/s).
    pub kb: f64,
    /// Degradation rate `kd` (1/s).
    pub kd: f64,
    /// Number of released molecules.
    pub na: u64,
    /// Reference distance `r_ref`; equals `receiver_radius` by default.
    pub ref_distance: f64,
    /// Reference count `N_ref`; 1 by default.
    pub ref_count: f64,
}

impl SystemParams {
    /// Parameters with the default references `r_ref = a`, `N_ref = 1`.
    pub fn new(a: f64, r0: f64, diffusion: f64, kf: f64, kb: f64, kd: f64, na: u64) -> Self {
        Self {
            receiver_radius: a,
            release_distance: r0,
            diffusion,
            kf,
            kb,
            kd,
            na,
            ref_distance: a,
            ref_count: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), UnitsError> {
        positive_finite("receiver_radius", self.receiver_radius)?;
        positive_finite("diffusion", self.diffusion)?;
        positive_finite("ref_distance", self.ref_distance)?;
        positive_finite("ref_count", self.ref_count)?;
        if !(self.release_distance.is_finite() && self.release_distance > self.receiver_radius) {
            return Err(invalid("release_distance", "must be finite and exceed receiver_radius"));
        }
        if self.kf.is_nan() || self.kf < 0.0 {
            return Err(invalid("kf", "must be non-negative (inf allowed)"));
        }
        nonneg_finite("kb", self.kb)?;
        nonneg_finite("kd", self.kd)?;
        if self.na == 0 {
            return Err(invalid("na", "must be at least 1"));
        }
        Ok(())
    }

    pub fn to_dimensionless(&self) -> Result<DimensionlessParams, UnitsError> {
        self.validate()?;
        let l = self.ref_distance;
        let d = self.diffusion;
        let p = DimensionlessParams {
            kf: self.kf * self.ref_count / (d * l),
            kb: self.kb * l * l / d,
            kd: self.kd * l * l / d,
            r0: self.release_distance / l,
            na: self.na,
        };
        p.validate()?;
        Ok(p)
    }

    /// Physical time `t` to `t' = D t / r_ref^2`.
    pub fn to_dimensionless_time(&self, t: f64) -> f64 {
        self.diffusion * t / (self.ref_distance * self.ref_distance)
    }

    /// `t'` back to seconds.
    pub fn to_dimensional_time(&self, t_prime: f64) -> f64 {
        t_prime * self.ref_distance * self.ref_distance / self.diffusion
    }
}

/// Reference scales needed to undo the non-dimensionalisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceScale {
    /// `r_ref`, which is also the receiver radius.
    pub distance: f64,
    pub count: f64,
    pub diffusion: f64,
}

/// Non-dimensional parameters. `kf = inf` denotes an absorbing surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    pub kf: f64,
    pub kb: f64,
    pub kd: f64,
    pub r0: f64,
    pub na: u64,
}

impl DimensionlessParams {
    pub fn new(kf: f64, kb: f64, kd: f64, r0: f64, na: u64) -> Self {
        Self { kf, kb, kd, r0, na }
    }

    pub fn validate(&self) -> Result<(), UnitsError> {
        if self.kf.is_nan() || self.kf < 0.0 {
            return Err(invalid("kf", "must be non-negative (inf allowed)"));
        }
        nonneg_finite("kb", self.kb)?;
        nonneg_finite("kd", self.kd)?;
        if !(self.r0.is_finite() && self.r0 > 1.0) {
            return Err(invalid("r0", "must be finite and greater than 1"));
        }
        Ok(())
    }

    /// `1 + kf/(4 pi)`, the sum of the three characteristic roots.
    pub fn s1(&self) -> f64 {
        1.0 + self.kf / (4.0 * std::f64::consts::PI)
    }

    pub fn to_system(&self, scale: &ReferenceScale) -> SystemParams {
        let l = scale.distance;
        let d = scale.diffusion;
        SystemParams {
            receiver_radius: l,
            release_distance: self.r0 * l,
            diffusion: d,
            kf: self.kf * d * l / scale.count,
            kb: self.kb * d / (l * l),
            kd: self.kd * d / (l * l),
            na: self.na,
            ref_distance: l,
            ref_count: scale.count,
        }
    }
}

fn positive_finite(name: &'static str, v: f64) -> Result<(), UnitsError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, "must be positive and finite"))
    }
}

fn nonneg_finite(name: &'static str, v: f64) -> Result<(), UnitsError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(name, "must be non-negative and finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_defaults_map_to_unit_receiver() {
        let s = SystemParams::new(0.5e-6, 1e-6, 5e-9, 25.0 * 5e-9 * 0.5e-6, 0.0, 0.0, 5000);
        let p = s.to_dimensionless().unwrap();
        assert!((p.kf - 25.0).abs() < 1e-12);
        assert!((p.r0 - 2.0).abs() < 1e-15);
        assert_eq!(p.na, 5000);
    }

    #[test]
    fn rejects_release_inside_receiver() {
        let s = SystemParams::new(1e-6, 0.9e-6, 1e-9, 1e-15, 0.0, 0.0, 10);
        assert!(s.to_dimensionless().is_err());
    }

    #[test]
    fn infinite_kf_survives() {
        let s = SystemParams::new(1e-6, 2e-6, 1e-9, f64::INFINITY, 0.0, 1.0, 10);
        assert!(s.to_dimensionless().unwrap().kf.is_infinite());
    }
}
