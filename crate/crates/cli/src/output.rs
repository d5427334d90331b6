//! CSV emission. Numbers use the shortest decimal that round-trips (with an
//! exponent for very large or small magnitudes), so a rerun of the same
//! config reproduces each file byte for byte.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rrm_core::analytic::SignalCurve;
use rrm_core::simulator::EnsembleResult;

use crate::config::{ExperimentConfig, Mode, Resolved};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `#`-prefixed header: tool version, mode, resolved parameters and the
/// full config as TOML.
pub fn metadata(mode: Mode, cfg: &ExperimentConfig, r: &Resolved) -> Vec<String> {
    let p = &r.params;
    let mut lines = vec![
        format!("rrm {VERSION}"),
        format!("mode = {}", mode.as_str()),
        format!("name = {}", r.name),
        format!("seed = {}", r.sim.seed),
        format!("params: kf = {:?}, kb = {:?}, kd = {:?}, r0 = {:?}, na = {}", p.kf, p.kb, p.kd, p.r0, p.na),
    ];
    if let Some(l) = &r.layout {
        lines.push(format!(
            "receptors: m = {}, rs = {}, coverage = {}, analytic kf = {}",
            l.m, l.rs, l.coverage, r.analytic_params.kf
        ));
    }
    // The output location is not part of the experiment.
    let mut cfg = cfg.clone();
    cfg.output = None;
    lines.push("config:".into());
    lines.extend(cfg.to_toml().lines().map(|l| format!("  {l}")));
    lines
}

/// Render a table with a metadata header.
pub fn csv_text(meta: &[String], columns: &[&str], rows: &[Vec<f64>]) -> Result<String, CliError> {
    if rows.is_empty() {
        return Err(CliError::Config("refusing to write an empty table".into()));
    }
    let mut s = String::new();
    for m in meta {
        writeln!(s, "# {m}").unwrap();
    }
    writeln!(s, "{}", columns.join(",")).unwrap();
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(s, "{}", cells.join(",")).unwrap();
    }
    Ok(s)
}

pub fn write_file(path: &Path, text: &str) -> Result<PathBuf, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

pub fn curve_csv(meta: &[String], curve: &SignalCurve) -> Result<String, CliError> {
    let rows: Vec<Vec<f64>> = curve.times.iter().zip(&curve.values).map(|(&t, &v)| vec![t, v]).collect();
    csv_text(meta, &["t_prime", "value"], &rows)
}

pub fn ensemble_csv(meta: &[String], res: &EnsembleResult) -> Result<String, CliError> {
    let rows: Vec<Vec<f64>> = res
        .curve
        .times
        .iter()
        .zip(&res.curve.values)
        .zip(&res.stderr)
        .map(|((&t, &v), &se)| vec![t, v, se])
        .collect();
    csv_text(meta, &["t_prime", "value", "stderr"], &rows)
}

/// A parsed CSV produced by this tool.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_table(path: &Path) -> Result<Table, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| CliError::Config(format!("{}: no header row", path.display())))?;
    let columns: Vec<String> = header.split(',').map(|c| c.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row: Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| CliError::Config(format!("{}: row {}: {e}", path.display(), i + 1)))?;
        if row.len() != columns.len() {
            return Err(CliError::Config(format!("{}: row {} has {} cells", path.display(), i + 1, row.len())));
        }
        rows.push(row);
    }
    Ok(Table { columns, rows })
}
