//! Reproducible experiments over `G(n, p)`.
//!
//! Every experiment is a pure function of its parameters and seed. Samples
//! may run in parallel; sample `i` always uses the sub-seed `seed ^ i` and
//! results are sorted by sample index before they are emitted.

mod concentration;
mod config;
mod overlap;
mod scan;

use std::io::Write;

use serde::Serialize;

use crate::error::Result;

pub use concentration::{
    concentration_experiment, exact_feasible, ConcentrationSpec, ConcentrationSummary, Method, SampleRecord,
};
pub use config::{
    parse_config, run_config, AssertionOutcome, ConcentrationChecks, ExperimentConfig, ExperimentEntry, ExperimentKind,
    ExperimentOutcome, Figure1Checks, OverlapChecks, PValue, RunReport, ScanChecks,
};
pub use overlap::{overlap_probability_exact, overlap_probability_mc, OverlapEstimate, CI_MIN_SAMPLES};
pub use scan::{
    crossing_window_search, expectation_scan, figure1_data, CrossingProbe, CrossingSearch, Figure1Point, ScanRow,
    ScanTable,
};

/// Schema tags written as the first column of every CSV row.
pub mod schema {
    pub const SAMPLE: &str = "cclab-sample/1";
    pub const SCAN: &str = "cclab-scan/1";
    pub const FIGURE1: &str = "cclab-figure1/1";
    pub const OVERLAP: &str = "cclab-overlap/1";
}

/// Output encoding for experiment artifacts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Writes rows as CSV with a header, or as a JSON array.
pub fn write_rows<T: Serialize>(rows: &[T], format: Format, out: impl Write) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}
