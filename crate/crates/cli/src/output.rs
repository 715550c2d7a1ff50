//! CSV tables and plot files.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::experiments::{FitRecord, SeriesRecord};
use crate::plot::{render, PlotSeries};

pub const SERIES_FILE: &str = "series.csv";
pub const RATES_FILE: &str = "rates.csv";
pub const REPORT_FILE: &str = "report.json";

/// One line of `series.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub experiment_id: String,
    pub t: f64,
    pub k: u32,
    pub norm_kind: String,
    pub value: f64,
}

/// One line of `rates.csv`; missing numbers are empty cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub k: u32,
    pub slope: Option<f64>,
    pub stderr: Option<f64>,
    pub theory_slope: Option<f64>,
    pub verdict: String,
}

pub fn write_series<W: Write>(out: W, series: &[SeriesRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    // An empty table still carries its header.
    w.write_record(["experiment_id", "t", "k", "norm_kind", "value"])?;
    for s in series {
        for (&t, &value) in s.times.iter().zip(&s.values) {
            w.write_record([
                s.experiment_id.clone(),
                t.to_string(),
                s.k.to_string(),
                s.norm_kind.clone(),
                value.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_rates<W: Write>(out: W, fits: &[FitRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "slope", "stderr", "theory_slope", "verdict"])?;
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for f in fits.iter().filter(|f| f.tabulated) {
        w.write_record([f.k.to_string(), cell(f.slope), cell(f.stderr), cell(f.theory_slope), f.verdict.clone()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `series.csv` back, regrouping consecutive rows into series.
pub fn read_series<R: Read>(input: R) -> csv::Result<Vec<SeriesRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut out: Vec<SeriesRecord> = Vec::new();
    for row in reader.deserialize::<SeriesRow>() {
        let row = row?;
        match out.last_mut() {
            Some(s) if s.experiment_id == row.experiment_id && s.k == row.k && s.norm_kind == row.norm_kind => {
                s.times.push(row.t);
                s.values.push(row.value);
            }
            _ => out.push(SeriesRecord {
                experiment_id: row.experiment_id,
                k: row.k,
                norm_kind: row.norm_kind,
                theory_slope: None,
                times: vec![row.t],
                values: vec![row.value],
            }),
        }
    }
    Ok(out)
}

pub fn plot_name(s: &SeriesRecord) -> String {
    let kind: String = s
        .norm_kind
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    format!("{}_{kind}_k{}.svg", s.experiment_id, s.k)
}

/// Writes one SVG per series into `dir` and returns the paths.
pub fn write_plots(dir: &Path, series: &[SeriesRecord]) -> std::io::Result<Vec<PathBuf>> {
    let mut paths = Vec::with_capacity(series.len());
    for s in series {
        let title = format!("{} {} k={}", s.experiment_id, s.norm_kind, s.k);
        let svg = render(&PlotSeries {
            title: &title,
            times: &s.times,
            values: &s.values,
            theory_slope: s.theory_slope,
        });
        let path = dir.join(plot_name(s));
        std::fs::write(&path, svg)?;
        paths.push(path);
    }
    Ok(paths)
}
