use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ComparisonResult, EuDiffCell, FitTable, FoldRateCell, HistogramBin, RationalityCell};
use crate::error::{Error, Result};

/// Report files, in the order they are written.
pub const REPORT_FILES: [&str; 6] = [
    "table1.csv",
    "table4.csv",
    "table5.csv",
    "comparisons.csv",
    "fold_rates.csv",
    "fig4_hist.csv",
];

pub struct ReportInputs<'a> {
    pub rationality: &'a [RationalityCell],
    pub eu_diff: &'a [EuDiffCell],
    pub fits: &'a FitTable,
    pub comparisons: &'a [ComparisonResult],
    pub fold_rates: &'a [FoldRateCell],
    pub histogram: &'a [HistogramBin],
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    let csv_err = |e: csv::Error| Error::io(path, std::io::Error::other(e));
    // headers are written explicitly so empty tables still carry them
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes one CSV per table into `dir` and returns their paths.
pub fn write_reports(dir: &Path, inputs: &ReportInputs<'_>) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = |name: &str| dir.join(name);
    write_csv(
        &path(REPORT_FILES[0]),
        inputs.rationality,
        &["agent", "class", "choice", "n", "rational", "irrational", "proportion"],
    )?;
    write_csv(&path(REPORT_FILES[1]), inputs.eu_diff, &["agent", "state", "class", "n", "mean_gap"])?;
    write_csv(
        &path(REPORT_FILES[2]),
        &inputs.fits.fits,
        &[
            "agent",
            "state",
            "omega_mean",
            "omega_sd",
            "lambda_mean",
            "lambda_sd",
            "n_valid",
            "n_observations",
            "source",
        ],
    )?;
    write_csv(
        &path(REPORT_FILES[3]),
        inputs.comparisons,
        &[
            "parameter",
            "group_a",
            "group_b",
            "estimate_a",
            "estimate_b",
            "delta",
            "ratio",
            "p_value",
            "method",
            "replicates",
            "failed",
        ],
    )?;
    write_csv(
        &path(REPORT_FILES[4]),
        inputs.fold_rates,
        &[
            "agent",
            "state",
            "class",
            "n",
            "folds",
            "rate",
            "neutral_rate",
            "difference",
            "z",
            "p_value",
            "significant",
        ],
    )?;
    write_csv(
        &path(REPORT_FILES[5]),
        inputs.histogram,
        &["agent", "kind", "lo", "hi", "rational", "irrational"],
    )?;
    Ok(REPORT_FILES.iter().map(|n| path(n)).collect())
}
