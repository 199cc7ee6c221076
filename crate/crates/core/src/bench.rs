//! Batch runs over a directory of instance files, reported as CSV.
//!
//! Columns (fixed):
//!
//! ```text
//! instance,n,reference,merge,merge_dev,ppr_merge,ppr_merge_dev,polish,polish_dev,
//! large_alpha,large_alpha_dev,n_d,dt_merge,dt_ppr_merge,dt_polish,dt_large_alpha,status
//! ```
//!
//! Costs carry six decimals, deviations read `(+X.XXX%)` against the
//! reference, times are seconds. `polish` is the cost after the last pass and
//! `dt_polish` the time of all passes. `n_d` counts edges differing from the
//! reference tour. A final `average` row holds arithmetic means over the
//! rows that produced a value.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::metrics::format_deviation;
use crate::pipeline::{run_pipeline, PipelineConfig, PipelineReport, References};

pub const HEADER: [&str; 17] = [
    "instance",
    "n",
    "reference",
    "merge",
    "merge_dev",
    "ppr_merge",
    "ppr_merge_dev",
    "polish",
    "polish_dev",
    "large_alpha",
    "large_alpha_dev",
    "n_d",
    "dt_merge",
    "dt_ppr_merge",
    "dt_polish",
    "dt_large_alpha",
    "status",
];

/// One column group: cost, deviation and time of a stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageCell {
    pub cost: f64,
    pub deviation: Option<f64>,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub n: Option<usize>,
    pub reference: Option<f64>,
    pub merge: Option<StageCell>,
    pub ppr_merge: Option<StageCell>,
    pub polish: Option<StageCell>,
    pub large_alpha: Option<StageCell>,
    pub n_d: Option<usize>,
    pub status: String,
}

impl BenchRow {
    fn failed(instance: String, err: &Error) -> Self {
        Self {
            instance,
            n: None,
            reference: None,
            merge: None,
            ppr_merge: None,
            polish: None,
            large_alpha: None,
            n_d: None,
            status: format!("failed: {err}"),
        }
    }

    fn from_report(instance: String, report: &PipelineReport) -> Self {
        let cell = |name: &str| {
            report.stage(name).map(|s| StageCell {
                cost: s.cost,
                deviation: s.deviation_pct,
                time: s.wall_time,
            })
        };
        let polish_stages: Vec<_> = report
            .stages
            .iter()
            .filter(|s| s.name.starts_with("polish-"))
            .collect();
        let polish = polish_stages.last().map(|last| StageCell {
            cost: last.cost,
            deviation: last.deviation_pct,
            time: polish_stages.iter().map(|s| s.wall_time).sum(),
        });
        let status = match (&report.error, report.timed_out()) {
            (Some(e), _) => format!("incomplete: {e}"),
            (None, true) => "time-limit".to_string(),
            (None, false) => "ok".to_string(),
        };
        Self {
            instance,
            n: Some(report.instance.n),
            reference: report.reference_cost,
            merge: cell("merge"),
            ppr_merge: cell("ppr-merge"),
            polish,
            large_alpha: cell("large-alpha"),
            n_d: report.stages.last().and_then(|s| s.n_d),
            status,
        }
    }

    fn cells(&self) -> [Option<StageCell>; 4] {
        [self.merge, self.ppr_merge, self.polish, self.large_alpha]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

impl BenchReport {
    /// Column-wise means; `None` when no rows exist.
    pub fn averages(&self) -> Option<BenchRow> {
        if self.rows.is_empty() {
            return None;
        }
        let stage = |k: usize| -> Option<StageCell> {
            let cells: Vec<StageCell> = self.rows.iter().filter_map(|r| r.cells()[k]).collect();
            Some(StageCell {
                cost: mean(cells.iter().map(|c| c.cost))?,
                deviation: mean(cells.iter().filter_map(|c| c.deviation)),
                time: mean(cells.iter().map(|c| c.time))?,
            })
        };
        Some(BenchRow {
            instance: "average".into(),
            n: mean(self.rows.iter().filter_map(|r| r.n).map(|n| n as f64)).map(|n| n.round() as usize),
            reference: mean(self.rows.iter().filter_map(|r| r.reference)),
            merge: stage(0),
            ppr_merge: stage(1),
            polish: stage(2),
            large_alpha: stage(3),
            n_d: mean(self.rows.iter().filter_map(|r| r.n_d).map(|d| d as f64)).map(|d| d.round() as usize),
            status: String::new(),
        })
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(HEADER)?;
        for row in self.rows.iter().chain(self.averages().as_ref()) {
            w.write_record(record(row))?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }
}

fn record(row: &BenchRow) -> Vec<String> {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let cost = |c: &Option<StageCell>| opt(c.map(|c| format!("{:.6}", c.cost)));
    let dev = |c: &Option<StageCell>| opt(c.and_then(|c| c.deviation).map(format_deviation));
    let time = |c: &Option<StageCell>| opt(c.map(|c| format!("{:.3}", c.time)));
    vec![
        row.instance.clone(),
        opt(row.n.map(|n| n.to_string())),
        opt(row.reference.map(|r| format!("{r:.6}"))),
        cost(&row.merge),
        dev(&row.merge),
        cost(&row.ppr_merge),
        dev(&row.ppr_merge),
        cost(&row.polish),
        dev(&row.polish),
        cost(&row.large_alpha),
        dev(&row.large_alpha),
        opt(row.n_d.map(|d| d.to_string())),
        time(&row.merge),
        time(&row.ppr_merge),
        time(&row.polish),
        time(&row.large_alpha),
        row.status.clone(),
    ]
}

/// `*.json` files directly inside `dir`, sorted by name.
pub fn instance_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn bench_one(path: &Path, cfg: &PipelineConfig, refs: Option<&References>) -> BenchRow {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let reference = refs.and_then(|r| r.get(&name));
    match Instance::load(path).and_then(|inst| run_pipeline(&inst, cfg, reference)) {
        Ok((_, report)) => BenchRow::from_report(name, &report),
        Err(e) => BenchRow::failed(name, &e),
    }
}

/// Runs the pipeline on every instance in `dir`, in parallel. Rows follow
/// file-name order; unreadable instances give failed rows.
pub fn bench(dir: impl AsRef<Path>, cfg: &PipelineConfig, refs: Option<&References>) -> Result<BenchReport> {
    let files = instance_files(dir)?;
    let rows = files.par_iter().map(|p| bench_one(p, cfg, refs)).collect();
    Ok(BenchReport { rows })
}
