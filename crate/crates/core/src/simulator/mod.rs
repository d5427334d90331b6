//! Particle-based Monte Carlo reference for the expected received signal.
//!
//! Each step, in order: Gaussian displacement (standard deviation `√(2 dt)`
//! per coordinate), degradation of free molecules, binding or reflection on
//! surface contact, unbinding of bound molecules. Realizations own
//! independent ChaCha8 streams `(seed, index)`, and per-bin results are
//! reduced with exact integer sums, so an ensemble is bit-identical for a
//! given seed whatever the thread count.

mod kernels;
mod mesh;

pub use kernels::*;
pub use mesh::*;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::SignalCurve;
use crate::quad::QuadError;
use crate::units::{DimensionlessParams, UnitsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Params(#[from] UnitsError),
    #[error("binding probability {probability} > 1 for kf = {kf}, dt = {dt}; reduce dt")]
    StepTooLarge { probability: f64, kf: f64, dt: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParticleState {
    Free,
    Bound(u32),
    Degraded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub position: Vec3,
    pub state: ParticleState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Census {
    pub free: u64,
    pub bound: u64,
    pub degraded: u64,
}

impl Census {
    pub fn total(&self) -> u64 {
        self.free + self.bound + self.degraded
    }
}

/// Everything a step needs that does not change during a run.
#[derive(Debug, Clone)]
pub struct StepKernel {
    pub step_sd: f64,
    pub p_degrade: f64,
    pub p_bind: f64,
    pub p_unbind: f64,
    pub rho: f64,
    pub occupancy: bool,
    pub sampler: RebindSampler,
}

impl StepKernel {
    pub fn new(params: &DimensionlessParams, dt: f64, occupancy: bool) -> Result<Self, SimError> {
        params.validate()?;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SimError::InvalidConfig(format!("dt must be positive, got {dt}")));
        }
        let rho = rho_normalization(dt)?;
        Ok(Self {
            step_sd: (2.0 * dt).sqrt(),
            p_degrade: degradation_prob(params.kd, dt),
            p_bind: forward_reaction_prob(params.kf, dt, rho)?,
            p_unbind: unbinding_prob(params.kb, dt),
            rho,
            occupancy,
            sampler: RebindSampler::new(dt)?,
        })
    }
}

/// First parameter `s ∈ [0, 1]` at which `p0 + s d` meets the unit sphere,
/// for `|p0| ≥ 1`.
#[inline]
fn first_crossing(p0: Vec3, d: Vec3) -> Option<f64> {
    let a = dot(d, d);
    let b = 2.0 * dot(p0, d);
    let c = (dot(p0, p0) - 1.0).max(0.0);
    if b >= 0.0 || a == 0.0 {
        return None;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    // Smaller root c/q with q = (-b + √disc)/2 > 0, free of cancellation.
    let q = 0.5 * (-b + disc.sqrt());
    let s = c / q;
    (s <= 1.0).then_some(s)
}

/// One realization: molecule store, per-receptor occupancy, census.
#[derive(Debug, Clone)]
pub struct Realization {
    particles: Vec<Particle>,
    occupied: Vec<u32>,
    census: Census,
}

impl Realization {
    /// `na` free molecules at `origin`.
    pub fn new(na: u64, origin: Vec3, mesh: &ReceiverMesh) -> Self {
        Self {
            particles: vec![Particle { position: origin, state: ParticleState::Free }; na as usize],
            occupied: vec![0; mesh.triangle_count()],
            census: Census { free: na, bound: 0, degraded: 0 },
        }
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn census(&self) -> Census {
        self.census
    }

    /// Advance every molecule by one step.
    pub fn step<R: Rng + ?Sized>(&mut self, mesh: &ReceiverMesh, k: &StepKernel, rng: &mut R) {
        for i in 0..self.particles.len() {
            if self.particles[i].state == ParticleState::Free {
                self.move_free(i, mesh, k, rng);
            }
        }
        if k.p_unbind > 0.0 {
            for i in 0..self.particles.len() {
                if let ParticleState::Bound(id) = self.particles[i].state {
                    if rng.random::<f64>() < k.p_unbind {
                        let r = k.sampler.sample(rng);
                        let p = &mut self.particles[i];
                        p.position = scale(p.position, r);
                        p.state = ParticleState::Free;
                        self.occupied[id as usize] -= 1;
                        self.census.bound -= 1;
                        self.census.free += 1;
                    }
                }
            }
        }
    }

    #[inline]
    fn move_free<R: Rng + ?Sized>(&mut self, i: usize, mesh: &ReceiverMesh, k: &StepKernel, rng: &mut R) {
        let p0 = self.particles[i].position;
        let d: Vec3 = [
            k.step_sd * rng.sample::<f64, _>(StandardNormal),
            k.step_sd * rng.sample::<f64, _>(StandardNormal),
            k.step_sd * rng.sample::<f64, _>(StandardNormal),
        ];
        if k.p_degrade > 0.0 && rng.random::<f64>() < k.p_degrade {
            self.particles[i].state = ParticleState::Degraded;
            self.census.free -= 1;
            self.census.degraded += 1;
            return;
        }
        let p1 = [p0[0] + d[0], p0[1] + d[1], p0[2] + d[2]];
        let crossing = if dot(p1, p1) < 1.0 {
            Some(first_crossing(p0, d).unwrap_or(0.0))
        } else if dot(p0, p0) < (1.0 + k.step_sd * 12.0).powi(2) {
            first_crossing(p0, d)
        } else {
            None
        };
        let Some(s) = crossing else {
            self.particles[i].position = p1;
            return;
        };
        let hit = [p0[0] + s * d[0], p0[1] + s * d[1], p0[2] + s * d[2]];
        let id = mesh.locate(hit);
        let available = mesh.is_receptor(id) && !(k.occupancy && self.occupied[id] > 0);
        if available && rng.random::<f64>() < k.p_bind {
            let p = &mut self.particles[i];
            p.position = scale(hit, 1.0 / norm(hit));
            p.state = ParticleState::Bound(id as u32);
            self.occupied[id] += 1;
            self.census.free -= 1;
            self.census.bound += 1;
        }
        // Otherwise the molecule stays at its pre-step position.
    }
}

/// Simulation settings in non-dimensional units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: DimensionlessParams,
    pub dt: f64,
    pub n_realizations: u64,
    pub horizon: f64,
    pub occupancy: bool,
    pub seed: u64,
    pub subdivision_level: u8,
    /// Receptor count; `None` covers every triangle.
    pub receptors: Option<u64>,
    /// Steps between recorded bins.
    pub bin_steps: u64,
}

impl SimConfig {
    /// Desk-scale defaults: `dt' = 1e-3`, 200 realizations, level 4 mesh
    /// fully covered, bins every 200 steps.
    pub fn new(params: DimensionlessParams, horizon: f64) -> Self {
        Self {
            params,
            dt: 1e-3,
            n_realizations: 200,
            horizon,
            occupancy: false,
            seed: 1,
            subdivision_level: 4,
            receptors: None,
            bin_steps: 200,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.params.validate()?;
        let bad = |m: String| Err(SimError::InvalidConfig(m));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.horizon.is_finite() && self.horizon >= self.dt) {
            return bad(format!("horizon {} must be at least dt {}", self.horizon, self.dt));
        }
        if self.n_realizations == 0 {
            return bad("at least one realization is required".into());
        }
        if self.bin_steps == 0 {
            return bad("bin_steps must be at least 1".into());
        }
        if self.subdivision_level > MAX_LEVEL {
            return bad(format!("subdivision level {} exceeds {MAX_LEVEL}", self.subdivision_level));
        }
        if let Some(m) = self.receptors {
            let count = 20u64 << (2 * self.subdivision_level as u64);
            if m > count {
                return bad(format!("{m} receptors requested on a {count}-triangle mesh"));
            }
        }
        Ok(())
    }

    pub fn total_steps(&self) -> u64 {
        ((self.horizon / self.dt).round() as u64).max(1)
    }

    /// Step indices at which the bound count is recorded.
    pub fn record_steps(&self) -> Vec<u64> {
        let n = self.total_steps();
        let every = self.bin_steps.min(n);
        (1..=n / every).map(|k| k * every).collect()
    }
}

/// Mean bound count per bin with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub curve: SignalCurve,
    pub stderr: Vec<f64>,
    /// Realizations contributing to each bin.
    pub counts: Vec<u64>,
    pub p_bind: f64,
    pub rho: f64,
    pub mesh: MeshStats,
}

/// Mesh and per-step kernel for `cfg`.
pub fn prepare(cfg: &SimConfig) -> Result<(ReceiverMesh, StepKernel), SimError> {
    cfg.validate()?;
    let kernel = StepKernel::new(&cfg.params, cfg.dt, cfg.occupancy)?;
    let mesh = build_mesh(cfg.subdivision_level)?;
    let m = cfg.receptors.map_or(mesh.triangle_count(), |m| m as usize);
    let mesh = assign_receptors(mesh, m, cfg.seed)?;
    Ok((mesh, kernel))
}

/// Random release point on the sphere of radius `r0`.
fn release_point<R: Rng + ?Sized>(r0: f64, rng: &mut R) -> Vec3 {
    loop {
        let v: Vec3 = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = norm(v);
        if n > 1e-12 {
            return scale(v, r0 / n);
        }
    }
}

/// Run realization `index`, calling `observe(step, &realization)` after
/// every step. Returns the bound counts at `cfg.record_steps()`.
pub fn run_realization<F>(cfg: &SimConfig, mesh: &ReceiverMesh, kernel: &StepKernel, index: u64, mut observe: F) -> Vec<u32>
where
    F: FnMut(u64, &Realization),
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let origin = release_point(cfg.params.r0, &mut rng);
    let mut state = Realization::new(cfg.params.na, origin, mesh);
    let record = cfg.record_steps();
    let mut out = Vec::with_capacity(record.len());
    let mut next = 0;
    for step in 1..=cfg.total_steps() {
        state.step(mesh, kernel, &mut rng);
        observe(step, &state);
        if next < record.len() && record[next] == step {
            out.push(state.census.bound as u32);
            next += 1;
        }
    }
    out
}

/// Run `cfg.n_realizations` independent releases in parallel.
pub fn run_ensemble(cfg: &SimConfig) -> Result<EnsembleResult, SimError> {
    let (mesh, kernel) = prepare(cfg)?;
    let record = cfg.record_steps();
    let bins = record.len();
    let zero = || (vec![0u64; bins], vec![0u128; bins]);
    let (sums, squares) = (0..cfg.n_realizations)
        .into_par_iter()
        .map(|i| {
            let counts = run_realization(cfg, &mesh, &kernel, i, |_, _| {});
            let s: Vec<u64> = counts.iter().map(|&c| c as u64).collect();
            let q: Vec<u128> = counts.iter().map(|&c| (c as u128) * (c as u128)).collect();
            (s, q)
        })
        .reduce(zero, |mut a, b| {
            for k in 0..bins {
                a.0[k] += b.0[k];
                a.1[k] += b.1[k];
            }
            a
        });
    let n = cfg.n_realizations;
    let mean: Vec<f64> = sums.iter().map(|&s| s as f64 / n as f64).collect();
    let stderr = sums
        .iter()
        .zip(&squares)
        .map(|(&s, &q)| {
            if n < 2 {
                return 0.0;
            }
            // n Σx² - (Σx)² is exact in u128.
            let num = (n as u128) * q - (s as u128) * (s as u128);
            let var = num as f64 / (n as f64 * (n - 1) as f64);
            (var / n as f64).sqrt()
        })
        .collect();
    let times = record.iter().map(|&k| k as f64 * cfg.dt).collect();
    Ok(EnsembleResult {
        curve: SignalCurve { times, values: mean, meta: cfg.params, perturbed_kd: None },
        stderr,
        counts: vec![n; bins],
        p_bind: kernel.p_bind,
        rho: kernel.rho,
        mesh: mesh.stats,
    })
}
