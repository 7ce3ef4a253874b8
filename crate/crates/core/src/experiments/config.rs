use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::{
    concentration_experiment, expectation_scan, figure1_data, overlap_probability_mc, write_rows, ConcentrationSpec,
    Format, Method,
};
use crate::error::{param, Error, Result};
use crate::exact_prob::{Mode, ProbParam};
use crate::graph::RngSeed;
use crate::scalar::parse_rational;
use crate::solver::SolverLimits;

/// A batch of experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub format: Format,
    #[serde(default, rename = "experiment")]
    pub experiments: Vec<ExperimentEntry>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("cclab-out")
}

/// Edge probability written either as a rational string (`"1/2"`) or a float.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Text(String),
    Float(f64),
}

impl PValue {
    pub fn to_param(&self) -> Result<ProbParam> {
        match self {
            PValue::Text(s) => Ok(ProbParam::Exact(parse_rational(s)?)),
            PValue::Float(x) => Ok(ProbParam::Float(*x)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentEntry {
    pub id: String,
    /// Overrides the top-level seed.
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub kind: ExperimentKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentKind {
    Concentration {
        n: usize,
        p: PValue,
        t: usize,
        samples: u64,
        method: Method,
        node_budget: Option<u64>,
        time_budget_secs: Option<f64>,
        #[serde(default, rename = "assert")]
        checks: ConcentrationChecks,
    },
    ExpectationScan {
        n: u64,
        p: PValue,
        t: usize,
        k_min: usize,
        k_max: usize,
        #[serde(default = "default_mode")]
        mode: Mode,
        #[serde(default, rename = "assert")]
        checks: ScanChecks,
    },
    Figure1 {
        tau_min: f64,
        tau_max: f64,
        step: f64,
        #[serde(default, rename = "assert")]
        checks: Figure1Checks,
    },
    Overlap {
        n: u64,
        p: PValue,
        t: usize,
        k: usize,
        ell: usize,
        samples: u64,
        #[serde(default, rename = "assert")]
        checks: OverlapChecks,
    },
}

fn default_mode() -> Mode {
    Mode::Auto
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationChecks {
    /// `max - min <= max_spread`.
    pub max_spread: Option<usize>,
    /// `|median - center| <= median_slack`.
    pub median_slack: Option<f64>,
    /// Every exact search finished.
    pub all_optimal: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanChecks {
    pub strictly_decreasing: Option<bool>,
    pub crossing_in_window: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure1Checks {
    pub max_residual: Option<f64>,
    pub monotone: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapChecks {
    pub p_hat_min: Option<f64>,
    pub p_hat_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentOutcome {
    pub id: String,
    pub kind: String,
    pub seed: u64,
    pub artifact: PathBuf,
    pub assertions: Vec<AssertionOutcome>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub experiments: Vec<ExperimentOutcome>,
    pub all_passed: bool,
}

/// Parses a TOML experiment config. Syntax and schema errors carry the line
/// of the offending input.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1).unwrap_or(0);
        Error::Parse { line, message: e.message().to_string() }
    })?;
    let mut seen = std::collections::HashSet::new();
    for e in &cfg.experiments {
        if e.id.is_empty() || e.id.contains(['/', '\\']) {
            return param(format!("experiment id {:?} is not a usable file name", e.id));
        }
        if !seen.insert(e.id.as_str()) {
            return param(format!("duplicate experiment id {:?}", e.id));
        }
    }
    Ok(cfg)
}

fn check(name: &str, expected: impl Into<String>, observed: impl ToString, passed: bool) -> AssertionOutcome {
    AssertionOutcome { name: name.into(), expected: expected.into(), observed: observed.to_string(), passed }
}

fn fmt_opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| "undefined".into(), |v| v.to_string())
}

/// Runs every experiment in order, writing `<out_dir>/<id>.<csv|json>` for
/// each and a `manifest.json` with the report and a wall-clock timestamp.
pub fn run_config(cfg: &ExperimentConfig) -> Result<RunReport> {
    if !cfg.experiments.is_empty() {
        fs::create_dir_all(&cfg.out_dir)?;
    }
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut outcomes = Vec::new();
    for entry in &cfg.experiments {
        let seed = entry.seed.unwrap_or(cfg.seed);
        let artifact = cfg.out_dir.join(format!("{}.{ext}", entry.id));
        let (kind, assertions) = run_entry(entry, seed, cfg.format, &artifact)?;
        let passed = assertions.iter().all(|a| a.passed);
        outcomes.push(ExperimentOutcome {
            id: entry.id.clone(),
            kind: kind.into(),
            seed,
            artifact,
            assertions,
            passed,
        });
    }
    let report = RunReport { all_passed: outcomes.iter().all(|o| o.passed), experiments: outcomes };
    if !cfg.experiments.is_empty() {
        let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let manifest = serde_json::json!({ "timestamp_unix": started, "config": cfg, "report": report });
        let f = BufWriter::new(File::create(cfg.out_dir.join("manifest.json"))?);
        serde_json::to_writer_pretty(f, &manifest)?;
    }
    Ok(report)
}

fn run_entry(
    entry: &ExperimentEntry,
    seed: u64,
    format: Format,
    artifact: &Path,
) -> Result<(&'static str, Vec<AssertionOutcome>)> {
    let out = || -> Result<BufWriter<File>> { Ok(BufWriter::new(File::create(artifact)?)) };
    let mut asserts = Vec::new();
    let kind = match &entry.kind {
        ExperimentKind::Concentration { n, p, t, samples, method, node_budget, time_budget_secs, checks } => {
            let spec = ConcentrationSpec {
                id: entry.id.clone(),
                n: *n,
                p: p.to_param()?.as_f64(),
                t: *t,
                samples: *samples,
                seed,
                method: *method,
            };
            let limits =
                SolverLimits { node_budget: *node_budget, time_budget: time_budget_secs.map(Duration::from_secs_f64) };
            let (summary, records) = concentration_experiment(&spec, &limits)?;
            write_rows(&records, format, out()?)?;
            if let Some(s) = checks.max_spread {
                asserts.push(check("max_spread", format!("<= {s}"), summary.spread(), summary.spread() <= s));
            }
            if let Some(slack) = checks.median_slack {
                let center = summary.window.as_ref().map(|w| w.center);
                asserts.push(check(
                    "median_slack",
                    format!("|median - {}| <= {slack}", fmt_opt(center)),
                    summary.median,
                    summary.median_within(slack) == Some(true),
                ));
            }
            if let Some(want) = checks.all_optimal {
                let ok = summary.incomplete == 0;
                asserts.push(check("all_optimal", want.to_string(), ok, ok == want));
            }
            "concentration"
        }
        ExperimentKind::ExpectationScan { n, p, t, k_min, k_max, mode, checks } => {
            let table = expectation_scan(*n, &p.to_param()?, *t, *k_min, *k_max, *mode)?;
            write_rows(&table.rows, format, out()?)?;
            if let Some(want) = checks.strictly_decreasing {
                asserts.push(check(
                    "strictly_decreasing",
                    want.to_string(),
                    table.strictly_decreasing,
                    table.strictly_decreasing == want,
                ));
            }
            if let Some(want) = checks.crossing_in_window {
                asserts.push(check(
                    "crossing_in_window",
                    want.to_string(),
                    format!("{} (crossing {})", fmt_opt(table.crossing_in_window), fmt_opt(table.crossing)),
                    table.crossing_in_window == Some(want),
                ));
            }
            "expectation_scan"
        }
        ExperimentKind::Figure1 { tau_min, tau_max, step, checks } => {
            let pts = figure1_data(*tau_min, *tau_max, *step)?;
            write_rows(&pts, format, out()?)?;
            if let Some(tol) = checks.max_residual {
                let worst = pts.iter().map(|p| p.residual.abs()).fold(0.0, f64::max);
                asserts.push(check("max_residual", format!("<= {tol:e}"), format!("{worst:e}"), worst <= tol));
            }
            if let Some(want) = checks.monotone {
                let mono = pts.windows(2).all(|w| w[1].kappa >= w[0].kappa);
                asserts.push(check("monotone", want.to_string(), mono, mono == want));
            }
            "figure1"
        }
        ExperimentKind::Overlap { n, p, t, k, ell, samples, checks } => {
            let est = overlap_probability_mc(*n, p.to_param()?.as_f64(), *t, *k, *ell, *samples, RngSeed(seed))?;
            write_rows(std::slice::from_ref(&est), format, out()?)?;
            if let Some(lo) = checks.p_hat_min {
                asserts.push(check("p_hat_min", format!(">= {lo}"), est.p_hat, est.p_hat >= lo));
            }
            if let Some(hi) = checks.p_hat_max {
                asserts.push(check("p_hat_max", format!("<= {hi}"), est.p_hat, est.p_hat <= hi));
            }
            "overlap"
        }
    };
    Ok((kind, asserts))
}
