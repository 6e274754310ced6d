use std::io::Write;

use serde::Serialize;

use super::config::{ExperimentConfig, Stage};
use super::stage::run_stage;
use super::HarnessError;
use crate::hidden::analytic_mismatch_lhv_threshold;
use crate::quantum::{analytic_mismatch_qm, Angle};
use crate::stats::{bell_gap, BellGapReport};

const CURVE_HEADER: &str = "theta_deg,e_mc,ci3,e_qm_analytic,e_line_analytic,n_trials";
const GAP_COLUMNS: &str = ",e2_mc,gap,verdict";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SweepOptions {
    /// Also run stage 4 at each angle and test `E(2θ) ≤ 2E(θ)`.
    pub gap_mode: bool,
    /// Size of a dedicated worker pool; `None` uses the global pool.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta_deg: f64,
    pub e_mc: f64,
    pub ci3: f64,
    pub e_qm_analytic: f64,
    pub e_line_analytic: f64,
    pub n_trials: u64,
    pub gap: Option<BellGapReport<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub gap_mode: bool,
    pub rows: Vec<SweepRow>,
}

/// Nine significant digits in scientific notation.
pub fn format_sig9(x: f64) -> String {
    format!("{x:.8e}")
}

impl SweepTable {
    pub fn header(&self) -> String {
        if self.gap_mode {
            format!("{CURVE_HEADER}{GAP_COLUMNS}")
        } else {
            CURVE_HEADER.to_string()
        }
    }

    /// UTF-8 CSV with LF line endings.
    pub fn write_csv<W: Write + ?Sized>(&self, sink: &mut W) -> std::io::Result<()> {
        writeln!(sink, "{}", self.header())?;
        for row in &self.rows {
            write!(
                sink,
                "{},{},{},{},{},{}",
                format_sig9(row.theta_deg),
                format_sig9(row.e_mc),
                format_sig9(row.ci3),
                format_sig9(row.e_qm_analytic),
                format_sig9(row.e_line_analytic),
                row.n_trials
            )?;
            if let Some(gap) = &row.gap {
                write!(
                    sink,
                    ",{},{},{}",
                    format_sig9(gap.e_2theta.e()),
                    format_sig9(gap.gap),
                    gap.verdict
                )?;
            }
            writeln!(sink)?;
        }
        sink.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// `start, start + step, …` up to and including `end` (within 1e-9).
pub fn theta_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, HarnessError> {
    if !(start.is_finite() && end.is_finite() && step.is_finite()) || step <= 0.0 {
        return Err(HarnessError::Config(format!(
            "invalid theta grid start={start} end={end} step={step}"
        )));
    }
    let mut grid = Vec::new();
    let mut i = 0u64;
    loop {
        let theta = start + i as f64 * step;
        if theta > end + 1e-9 {
            break;
        }
        grid.push(theta.min(end.max(start)));
        i += 1;
    }
    Ok(grid)
}

fn sweep_rows(
    template: &ExperimentConfig,
    grid: &[f64],
    gap_mode: bool,
) -> Result<Vec<SweepRow>, HarnessError> {
    grid.iter()
        .map(|&theta| {
            let cfg = ExperimentConfig {
                theta,
                ..template.clone()
            };
            let single = run_stage(&cfg, Stage::Two)?.stats;
            let gap = if gap_mode {
                let double = run_stage(&cfg, Stage::Four)?.stats;
                Some(bell_gap(Angle::from_degrees(theta), single, double))
            } else {
                None
            };
            let row = SweepRow {
                theta_deg: theta,
                e_mc: single.e(),
                ci3: single.ci_half_width(),
                e_qm_analytic: analytic_mismatch_qm(Angle::from_degrees(theta)),
                e_line_analytic: analytic_mismatch_lhv_threshold(Angle::from_degrees(theta)),
                n_trials: single.n(),
                gap,
            };
            for p in [row.e_mc, row.e_qm_analytic, row.e_line_analytic] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(HarnessError::Invariant(format!(
                        "probability {p} outside [0, 1] at θ = {theta}"
                    )));
                }
            }
            Ok(row)
        })
        .collect()
}

/// Monte Carlo mismatch curve over `grid` (degrees) next to both analytic
/// curves, written as CSV to `sink`.
///
/// In gap mode every angle must lie in `[0, 45]`; otherwise in `[0, 90]`.
pub fn run_sweep<W: Write + ?Sized>(
    template: &ExperimentConfig,
    grid: &[f64],
    options: SweepOptions,
    sink: &mut W,
) -> Result<SweepTable, HarnessError> {
    let max_theta = if options.gap_mode { 45.0 } else { 90.0 };
    if let Some(bad) = grid.iter().find(|t| !(**t >= 0.0 && **t <= max_theta)) {
        return Err(HarnessError::Config(format!(
            "theta {bad}° outside [0°, {max_theta}°]"
        )));
    }
    if template.trials == 0 {
        return Err(HarnessError::Config("trials must be at least 1".into()));
    }
    let rows = match options.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| HarnessError::Config(e.to_string()))?
            .install(|| sweep_rows(template, grid, options.gap_mode))?,
        None => sweep_rows(template, grid, options.gap_mode)?,
    };
    let table = SweepTable {
        gap_mode: options.gap_mode,
        rows,
    };
    table.write_csv(sink)?;
    Ok(table)
}
