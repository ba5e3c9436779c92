//! CSV and JSON artifacts of a study.
//!
//! Floats are written in shortest round-trip form, so re-reading a file gives back the exact
//! values and two identical studies give identical bytes.

use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::study::{StudyResult, StudyRow};
use crate::error::{Result, VemError};
use crate::mesh::MeshFamily;
use crate::vemlocal::MethodKind;

/// One line of a per-figure CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub h_max: f64,
    #[serde(rename = "e_V")]
    pub e_v: Option<f64>,
    #[serde(rename = "e_W")]
    pub e_w: Option<f64>,
    /// `e_V / e_W`.
    pub ratio: Option<f64>,
}

/// Rate of one series over its last two levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub family: MeshFamily,
    pub method: MethodKind,
    pub order: usize,
    pub levels: usize,
    pub h_last: f64,
    pub e_last: Option<f64>,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub family: MeshFamily,
    pub order: usize,
    /// Arithmetic mean over the ladder of `||A^S||_inf / ||A^Pi||_inf`.
    pub average: Option<f64>,
    pub per_level: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub case: String,
    pub ratios: Vec<RatioSummary>,
    pub rates: Vec<RateRow>,
    pub failures: usize,
}

pub fn plot_points(result: &StudyResult, family: MeshFamily, order: usize) -> Vec<PlotPoint> {
    result
        .method_pairs(family, order)
        .into_iter()
        .map(|(h_max, e_v, e_w)| PlotPoint {
            h_max,
            e_v,
            e_w,
            ratio: match (e_v, e_w) {
                (Some(v), Some(w)) if w > 0.0 => Some(v / w),
                _ => None,
            },
        })
        .collect()
}

pub fn rate_rows(result: &StudyResult) -> Vec<RateRow> {
    let mut out = Vec::new();
    for family in result.families() {
        for order in result.orders() {
            for method in MethodKind::ALL {
                let series = result.series(family, method, order);
                if let Some(last) = series.last() {
                    out.push(RateRow {
                        family,
                        method,
                        order,
                        levels: series.len(),
                        h_last: last.h_max,
                        e_last: last.e_star,
                        alpha: last.alpha,
                    });
                }
            }
        }
    }
    out
}

pub fn summarize(result: &StudyResult) -> StudySummary {
    let mut ratios = Vec::new();
    for family in result.families() {
        for order in result.orders() {
            let series = result.series(family, MethodKind::StandardVem, order);
            if series.is_empty() {
                continue;
            }
            ratios.push(RatioSummary {
                family,
                order,
                average: result.average_ratio(family, order),
                per_level: series.iter().map(|r| r.ratio).collect(),
            });
        }
    }
    StudySummary {
        case: result.config_case.to_string(),
        ratios,
        rates: rate_rows(result),
        failures: result.rows.iter().filter(|r| r.status != super::study::STATUS_OK).count(),
    }
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>, R: Read>(input: R) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(VemError::from)).collect()
}

pub fn read_results_csv(path: &Path) -> Result<Vec<StudyRow>> {
    read_csv(fs::File::open(path)?)
}

/// File name of the plot data for one (case, order, family).
pub fn plot_file_name(result: &StudyResult, order: usize, family: MeshFamily) -> String {
    format!("{}_k{order}_{family}.csv", result.config_case.file_stem())
}

/// Write `results.csv`, `rates.csv`, `summary.json` and one plot CSV per (order, family)
/// into `dir`, returning the paths written.
pub fn emit_plot_data(result: &StudyResult, dir: &Path) -> Result<Vec<PathBuf>> {
    if result.rows.is_empty() {
        return Err(VemError::InvalidInput("study produced no rows".into()));
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut emit = |name: String, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, bytes)?;
        written.push(path);
        Ok(())
    };

    let mut buf = Vec::new();
    write_csv(&result.rows, &mut buf)?;
    emit("results.csv".into(), buf)?;

    let mut buf = Vec::new();
    write_csv(&rate_rows(result), &mut buf)?;
    emit("rates.csv".into(), buf)?;

    for family in result.families() {
        for order in result.orders() {
            let points = plot_points(result, family, order);
            if points.is_empty() {
                continue;
            }
            let mut buf = Vec::new();
            write_csv(&points, &mut buf)?;
            emit(plot_file_name(result, order, family), buf)?;
        }
    }

    let mut json = serde_json::to_vec_pretty(&summarize(result))?;
    json.push(b'\n');
    emit("summary.json".into(), json)?;
    Ok(written)
}
