use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rrm_core::analytic::{expected_signal, SignalCurve};
use rrm_core::homogenization::{berg_purcell_factor, correction_factor, zwanzig_factor};
use rrm_core::simulator::{run_ensemble, EnsembleResult};

use crate::config::{ExperimentConfig, Mode, Resolved};
use crate::error::CliError;
use crate::output::{curve_csv, csv_text, ensemble_csv, metadata, write_file};
use crate::report::ComparisonReport;

/// Files written and lines for stdout.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
    pub report: Option<ComparisonReport>,
}

/// Outcome of a compare run, kept in memory for callers that check it.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub resolved: Resolved,
    pub analytic: SignalCurve,
    pub sim: EnsembleResult,
    pub report: ComparisonReport,
}

pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn file_safe(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || "._-=".contains(c) { c } else { '_' }).collect()
}

pub fn analytic_curve(r: &Resolved) -> Result<SignalCurve, CliError> {
    Ok(expected_signal(&r.grid, &r.analytic_params)?)
}

pub fn compare(cfg: &ExperimentConfig) -> Result<Comparison, CliError> {
    let resolved = cfg.resolve()?;
    let analytic = analytic_curve(&resolved)?;
    let sim = run_ensemble(&resolved.sim)?;
    let report = ComparisonReport::build(&sim, &analytic, &resolved.analytic_params)?;
    Ok(Comparison { resolved, analytic, sim, report })
}

/// Run one experiment in `mode`, writing files named after `stem`.
pub fn run_single(mode: Mode, cfg: &ExperimentConfig, dir: &Path, stem: &str) -> Result<Artifacts, CliError> {
    let stem = file_safe(stem);
    let mut out = Artifacts::default();
    match mode {
        Mode::Analytic => {
            let r = cfg.resolve()?;
            let curve = analytic_curve(&r)?;
            let text = curve_csv(&metadata(mode, cfg, &r), &curve)?;
            out.files.push(write_file(&dir.join(format!("{stem}.csv")), &text)?);
        }
        Mode::Simulate => {
            let r = cfg.resolve()?;
            let res = run_ensemble(&r.sim)?;
            let text = ensemble_csv(&metadata(mode, cfg, &r), &res)?;
            out.files.push(write_file(&dir.join(format!("{stem}.csv")), &text)?);
        }
        Mode::Compare => {
            let c = compare(cfg)?;
            let meta = metadata(mode, cfg, &c.resolved);
            out.files.push(write_file(&dir.join(format!("{stem}_analytic.csv")), &curve_csv(&meta, &c.analytic)?)?);
            out.files.push(write_file(&dir.join(format!("{stem}_sim.csv")), &ensemble_csv(&meta, &c.sim)?)?);
            let mut meta = meta;
            meta.extend(c.report.summary_lines());
            let rows: Vec<Vec<f64>> = c
                .report
                .bins
                .iter()
                .map(|b| vec![b.t, b.sim, b.stderr, b.analytic, b.within_3se as u8 as f64])
                .collect();
            let text = csv_text(&meta, &["t_prime", "sim", "stderr", "analytic", "within_3se"], &rows)?;
            out.files.push(write_file(&dir.join(format!("{stem}_report.csv")), &text)?);
            out.lines.push(format!(
                "{stem}: frac_bins_within_3se={} max_abs_dev={} peak_time_analytic={} peak_time_sim={}",
                c.report.frac_bins_within_3se, c.report.max_abs_dev, c.report.peak_time_analytic, c.report.peak_time_sim
            ));
            out.report = Some(c.report);
        }
        Mode::Homogenize => {
            let r = cfg.resolve()?;
            let layout = r.layout.ok_or_else(|| CliError::Config("homogenize needs a [receptors] section".into()))?;
            let phi = correction_factor(&layout, r.params.kf)?;
            out.lines.extend([
                format!("{stem}: m = {}", layout.m),
                format!("{stem}: rs = {}", layout.rs),
                format!("{stem}: coverage = {}", layout.coverage),
                format!("{stem}: phi = {phi}"),
                format!("{stem}: kf_effective = {}", r.analytic_params.kf),
                format!("{stem}: berg_purcell = {}", berg_purcell_factor(&layout)),
                format!("{stem}: zwanzig = {}", zwanzig_factor(&layout)),
            ]);
        }
        Mode::Sweep => return run_sweep(cfg, dir),
    }
    Ok(out)
}

/// Run every sweep point concurrently in `cfg.point_mode`, then write
/// `<name>_index.csv`. Failures do not stop other points; the worst error
/// (highest exit code) is returned after the index is written.
pub fn run_sweep(cfg: &ExperimentConfig, dir: &Path) -> Result<Artifacts, CliError> {
    if cfg.point_mode == Mode::Sweep {
        return Err(CliError::Config("point_mode cannot be sweep".into()));
    }
    let points = cfg.sweep_points()?;
    let name = cfg.name().to_string();
    let results: Vec<Result<Artifacts, CliError>> = points
        .par_iter()
        .map(|pt| {
            let stem = if pt.label.is_empty() { name.clone() } else { format!("{name}_{}", pt.label) };
            run_single(cfg.point_mode, &pt.config, dir, &stem).map_err(|e| e.context(&stem))
        })
        .collect();
    let mut out = Artifacts::default();
    let mut index = String::new();
    writeln!(index, "# rrm {}", crate::output::VERSION).unwrap();
    writeln!(index, "# sweep over {} points, mode = {}", points.len(), cfg.point_mode.as_str()).unwrap();
    writeln!(index, "point,label,status,files").unwrap();
    let mut worst: Option<CliError> = None;
    for (i, (pt, res)) in points.iter().zip(results).enumerate() {
        match res {
            Ok(a) => {
                let files: Vec<String> =
                    a.files.iter().map(|f| f.file_name().unwrap().to_string_lossy().into_owned()).collect();
                writeln!(index, "{i},{},ok,{}", pt.label, files.join(";")).unwrap();
                out.files.extend(a.files);
                out.lines.extend(a.lines);
            }
            Err(e) => {
                writeln!(index, "{i},{},{},", pt.label, e.kind()).unwrap();
                out.lines.push(e.line());
                if worst.as_ref().is_none_or(|w| e.exit_code() > w.exit_code()) {
                    worst = Some(e);
                }
            }
        }
    }
    out.files.push(write_file(&dir.join(format!("{}_index.csv", file_safe(&name))), &index)?);
    match worst {
        Some(e) => Err(e),
        None => Ok(out),
    }
}
