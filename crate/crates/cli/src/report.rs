use rrm_core::analytic::{cir, SignalCurve};
use rrm_core::simulator::EnsembleResult;
use rrm_core::DimensionlessParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinRow {
    pub t: f64,
    pub sim: f64,
    pub stderr: f64,
    pub analytic: f64,
    pub within_3se: bool,
}

/// Agreement of an ensemble with the analytic expected signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub max_abs_dev: f64,
    /// Over bins with at least one realization.
    pub frac_bins_within_3se: f64,
    pub peak_time_analytic: f64,
    pub peak_time_sim: f64,
    pub bins: Vec<BinRow>,
}

impl ComparisonReport {
    /// `analytic` supplies the peak time; the per-bin reference is
    /// evaluated at the bin times with `p`.
    pub fn build(sim: &EnsembleResult, analytic: &SignalCurve, p: &DimensionlessParams) -> Result<Self, CliError> {
        let na = p.na as f64;
        let mut bins = Vec::with_capacity(sim.curve.len());
        let mut used = 0usize;
        let mut within = 0usize;
        let mut max_abs_dev = 0.0f64;
        for (i, &t) in sim.curve.times.iter().enumerate() {
            let a = (na * cir(t, p)?).clamp(0.0, na);
            let m = sim.curve.values[i];
            let se = sim.stderr[i];
            let ok = (m - a).abs() <= 3.0 * se;
            if sim.counts[i] > 0 {
                used += 1;
                within += ok as usize;
                max_abs_dev = max_abs_dev.max((m - a).abs());
            }
            bins.push(BinRow { t, sim: m, stderr: se, analytic: a, within_3se: ok });
        }
        let frac = if used == 0 { 0.0 } else { within as f64 / used as f64 };
        Ok(Self {
            max_abs_dev,
            frac_bins_within_3se: frac,
            peak_time_analytic: analytic.peak().map_or(f64::NAN, |x| x.0),
            peak_time_sim: sim.curve.peak().map_or(f64::NAN, |x| x.0),
            bins,
        })
    }

    pub fn passes(&self, fraction: f64) -> bool {
        self.frac_bins_within_3se >= fraction
    }

    pub fn summary_lines(&self) -> Vec<String> {
        vec![
            format!("max_abs_dev = {}", self.max_abs_dev),
            format!("frac_bins_within_3se = {}", self.frac_bins_within_3se),
            format!("peak_time_analytic = {}", self.peak_time_analytic),
            format!("peak_time_sim = {}", self.peak_time_sim),
        ]
    }
}
