//! Experiment files: TOML with a `[params]` (non-dimensional) or `[system]`
//! (SI) section, optional `[grid]`, `[receptors]`, `[sim]` and a list of
//! `[[sweep]]` axes. See the README for the full schema.

use std::path::{Path, PathBuf};

use rrm_core::analytic::{time_grid, Spacing};
use rrm_core::homogenization::{finite_receptor_params, ReceptorLayout};
use rrm_core::simulator::{SimConfig, MAX_LEVEL};
use rrm_core::{DimensionlessParams, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytic,
    Simulate,
    Compare,
    Sweep,
    Homogenize,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Simulate => "simulate",
            Mode::Compare => "compare",
            Mode::Sweep => "sweep",
            Mode::Homogenize => "homogenize",
        }
    }
}

/// How several sweep axes combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combine {
    #[default]
    Product,
    Zip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub kf: f64,
    #[serde(default)]
    pub kb: f64,
    #[serde(default)]
    pub kd: f64,
    pub r0: f64,
    #[serde(default = "default_na")]
    pub na: u64,
}

/// SI inputs; rates in m/s (`kf`, per molecule) and 1/s (`kb`, `kd`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub receiver_radius: f64,
    pub release_distance: f64,
    pub diffusion: f64,
    pub kf: f64,
    #[serde(default)]
    pub kb: f64,
    #[serde(default)]
    pub kd: f64,
    #[serde(default = "default_na")]
    pub na: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_grid_start")]
    pub start: f64,
    #[serde(default = "default_grid_end")]
    pub end: f64,
    #[serde(default = "default_grid_count")]
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { start: default_grid_start(), end: default_grid_end(), count: default_grid_count(), spacing: default_spacing() }
    }
}

/// `m` receptors. The analytic reference uses `m_max` equal tiles when
/// given, else circular patches of radius `rs`, else the simulation mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReceptorSection {
    pub m: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_realizations")]
    pub realizations: u64,
    #[serde(default = "default_grid_end")]
    pub horizon: f64,
    #[serde(default)]
    pub occupancy: bool,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_level")]
    pub level: u8,
    #[serde(default = "default_bin_steps")]
    pub bin_steps: u64,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            dt: default_dt(),
            realizations: default_realizations(),
            horizon: default_grid_end(),
            occupancy: false,
            seed: default_seed(),
            level: default_level(),
            bin_steps: default_bin_steps(),
        }
    }
}

/// One sweep axis: a parameter name and its values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub name: String,
    pub values: Vec<f64>,
}

pub const SWEEP_NAMES: [&str; 10] = ["kf", "kb", "kd", "r0", "na", "m", "level", "dt", "realizations", "seed"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    /// Mode of every sweep point.
    #[serde(default = "default_point_mode")]
    pub point_mode: Mode,
    #[serde(default)]
    pub combine: Combine,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSection>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub receptors: Option<ReceptorSection>,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepAxis>,
}

fn default_na() -> u64 {
    1000
}
fn default_grid_start() -> f64 {
    0.02
}
fn default_grid_end() -> f64 {
    4.0
}
fn default_grid_count() -> usize {
    200
}
fn default_spacing() -> Spacing {
    Spacing::Linear
}
fn default_dt() -> f64 {
    1e-3
}
fn default_realizations() -> u64 {
    200
}
fn default_seed() -> u64 {
    1
}
fn default_level() -> u8 {
    4
}
fn default_bin_steps() -> u64 {
    200
}
fn default_point_mode() -> Mode {
    Mode::Analytic
}

/// Command-line overrides applied on top of a file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub realizations: Option<u64>,
    pub na: Option<u64>,
    pub dt: Option<f64>,
    pub output: Option<PathBuf>,
}

/// Everything a single (non-sweep) run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub name: String,
    pub params: DimensionlessParams,
    /// `params` with the homogenized forward rate when receptors are finite.
    pub analytic_params: DimensionlessParams,
    pub layout: Option<ReceptorLayout>,
    pub grid: Vec<f64>,
    pub sim: SimConfig,
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub label: String,
    pub config: ExperimentConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    /// Read a file; `name` defaults to the file stem.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| e.context(&path.display().to_string()))?;
        if cfg.name.is_none() {
            cfg.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("experiment")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.sim.seed = s;
        }
        if let Some(n) = o.realizations {
            self.sim.realizations = n;
        }
        if let Some(dt) = o.dt {
            self.sim.dt = dt;
        }
        if let Some(na) = o.na {
            self.set("na", na as f64).expect("na is a sweep name");
        }
        if let Some(p) = &o.output {
            self.output = Some(p.clone());
        }
    }

    /// Set a named parameter, as used by sweeps.
    pub fn set(&mut self, name: &str, v: f64) -> Result<(), CliError> {
        let int = |v: f64| -> Result<u64, CliError> {
            if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
                Ok(v as u64)
            } else {
                Err(CliError::Config(format!("{name} must be a non-negative integer, got {v}")))
            }
        };
        match name {
            "kf" | "kb" | "kd" | "r0" | "na" => {
                if let Some(p) = &mut self.params {
                    match name {
                        "kf" => p.kf = v,
                        "kb" => p.kb = v,
                        "kd" => p.kd = v,
                        "r0" => p.r0 = v,
                        _ => p.na = int(v)?,
                    }
                } else if let Some(s) = &mut self.system {
                    match name {
                        "kf" => s.kf = v,
                        "kb" => s.kb = v,
                        "kd" => s.kd = v,
                        "r0" => s.release_distance = v,
                        _ => s.na = int(v)?,
                    }
                } else {
                    return Err(CliError::Config("one of [params] or [system] is required".into()));
                }
            }
            "m" => {
                let m = int(v)?;
                match &mut self.receptors {
                    Some(r) => r.m = m,
                    None => self.receptors = Some(ReceptorSection { m, m_max: None, rs: None }),
                }
            }
            "level" => {
                self.sim.level = u8::try_from(int(v)?).map_err(|_| CliError::Config(format!("level {v} too large")))?
            }
            "dt" => self.sim.dt = v,
            "realizations" => self.sim.realizations = int(v)?,
            "seed" => self.sim.seed = int(v)?,
            _ => {
                return Err(CliError::Config(format!(
                    "unknown sweep parameter '{name}' (known: {})",
                    SWEEP_NAMES.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Expand the sweep axes; no axes gives the config itself.
    pub fn sweep_points(&self) -> Result<Vec<SweepPoint>, CliError> {
        for axis in &self.sweep {
            if !SWEEP_NAMES.contains(&axis.name.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown sweep parameter '{}' (known: {})",
                    axis.name,
                    SWEEP_NAMES.join(", ")
                )));
            }
            if axis.values.is_empty() {
                return Err(CliError::Config(format!("sweep axis '{}' has no values", axis.name)));
            }
        }
        let mut base = self.clone();
        base.sweep.clear();
        if self.sweep.is_empty() {
            return Ok(vec![SweepPoint { label: String::new(), config: base }]);
        }
        let combos: Vec<Vec<(usize, f64)>> = match self.combine {
            Combine::Zip => {
                let n = self.sweep[0].values.len();
                if self.sweep.iter().any(|a| a.values.len() != n) {
                    return Err(CliError::Config("zipped sweep axes must have equal lengths".into()));
                }
                (0..n).map(|i| self.sweep.iter().enumerate().map(|(k, a)| (k, a.values[i])).collect()).collect()
            }
            Combine::Product => {
                let mut acc: Vec<Vec<(usize, f64)>> = vec![vec![]];
                for (k, axis) in self.sweep.iter().enumerate() {
                    acc = acc
                        .into_iter()
                        .flat_map(|prefix| {
                            axis.values.iter().map(move |&v| {
                                let mut p = prefix.clone();
                                p.push((k, v));
                                p
                            })
                        })
                        .collect();
                }
                acc
            }
        };
        combos
            .into_iter()
            .map(|combo| {
                let mut cfg = base.clone();
                let mut label = Vec::with_capacity(combo.len());
                for (k, v) in combo {
                    let name = &self.sweep[k].name;
                    cfg.set(name, v)?;
                    label.push(format!("{name}={v}"));
                }
                Ok(SweepPoint { label: label.join("_"), config: cfg })
            })
            .collect()
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let params = match (&self.params, &self.system) {
            (Some(p), None) => {
                let d = DimensionlessParams::new(p.kf, p.kb, p.kd, p.r0, p.na);
                d.validate()?;
                d
            }
            (None, Some(s)) => SystemParams::new(
                s.receiver_radius,
                s.release_distance,
                s.diffusion,
                s.kf,
                s.kb,
                s.kd,
                s.na,
            )
            .to_dimensionless()?,
            _ => return Err(CliError::Config("exactly one of [params] or [system] is required".into())),
        };
        let g = &self.grid;
        if g.count < 2 {
            return Err(CliError::Config(format!("grid count must be at least 2, got {}", g.count)));
        }
        let grid = time_grid(g.start, g.end, g.count, g.spacing)?;
        let s = &self.sim;
        if s.level > MAX_LEVEL {
            return Err(CliError::Config(format!("sim level {} exceeds {MAX_LEVEL}", s.level)));
        }
        let mesh_count = 20u64 << (2 * s.level as u64);
        let layout = match &self.receptors {
            None => None,
            Some(r) => Some(match (r.m_max, r.rs) {
                (Some(_), Some(_)) => return Err(CliError::Config("give at most one of receptors.m_max and receptors.rs".into())),
                (Some(m_max), None) => ReceptorLayout::from_mesh(r.m, m_max)?,
                (None, Some(rs)) => ReceptorLayout::circular(r.m, rs)?,
                (None, None) => ReceptorLayout::from_mesh(r.m, mesh_count)?,
            }),
        };
        let analytic_params = match &layout {
            Some(l) if l.coverage < 1.0 => finite_receptor_params(&params, l)?,
            _ => params,
        };
        let mut sim = SimConfig::new(params, s.horizon);
        sim.dt = s.dt;
        sim.n_realizations = s.realizations;
        sim.occupancy = s.occupancy;
        sim.seed = s.seed;
        sim.subdivision_level = s.level;
        sim.bin_steps = s.bin_steps;
        sim.receptors = self.receptors.as_ref().map(|r| r.m);
        Ok(Resolved { name: self.name().to_string(), params, analytic_params, layout, grid, sim })
    }
}
