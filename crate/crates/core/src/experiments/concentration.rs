use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::schema;
use crate::error::{param, Error, Result};
use crate::graph::{sample_gnp, RngSeed};
use crate::solver::{alpha_t_exact, alpha_t_heuristic, SolverLimits, Status};
use crate::theory::{alpha_small_window, PredictionWindow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Heuristic,
}

/// Whether the exact solver is expected to finish: always for `n <= 40`,
/// and for `n <= 120` when `p >= 0.4` and `t <= 3`.
pub fn exact_feasible(n: usize, p: f64, t: usize) -> bool {
    n <= 40 || (n <= 120 && p >= 0.4 && t <= 3)
}

/// One measured `alpha_t` value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub schema: &'static str,
    pub experiment_id: String,
    pub seed: u64,
    pub sample: u64,
    pub sub_seed: u64,
    pub n: usize,
    pub p: f64,
    pub t: usize,
    pub method: Method,
    pub alpha: usize,
    pub status: Status,
    pub predicted_center: Option<f64>,
    pub predicted_lower: Option<f64>,
    pub predicted_upper: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationSummary {
    pub experiment_id: String,
    pub n: usize,
    pub p: f64,
    pub t: usize,
    pub samples: u64,
    pub seed: u64,
    pub method: Method,
    pub min: usize,
    pub median: f64,
    pub max: usize,
    pub mean: f64,
    /// `None` when the window formula is undefined for these parameters.
    pub window: Option<PredictionWindow>,
    /// Samples whose exact search did not finish.
    pub incomplete: usize,
}

impl ConcentrationSummary {
    pub fn spread(&self) -> usize {
        self.max - self.min
    }

    /// `|median - center| <= slack`.
    pub fn median_within(&self, slack: f64) -> Option<bool> {
        self.window.as_ref().map(|w| (self.median - w.center).abs() <= slack)
    }
}

/// Parameters of a concentration run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationSpec {
    pub id: String,
    pub n: usize,
    pub p: f64,
    pub t: usize,
    pub samples: u64,
    pub seed: u64,
    pub method: Method,
}

/// Samples `G(n, p)` `samples` times and measures `alpha_t` on each.
pub fn concentration_experiment(
    spec: &ConcentrationSpec,
    limits: &SolverLimits,
) -> Result<(ConcentrationSummary, Vec<SampleRecord>)> {
    let ConcentrationSpec { ref id, n, p, t, samples, seed, method } = *spec;
    let id = id.as_str();
    let seed = RngSeed(seed);
    if samples == 0 {
        return param("samples must be positive");
    }
    if t < 1 {
        return param("t must be at least 1");
    }
    if method == Method::Exact && !exact_feasible(n, p, t) {
        return Err(Error::Refused(format!(
            "exact alpha_t for n = {n}, p = {p}, t = {t} is outside solver reach \
             (n <= 40, or n <= 120 with p >= 0.4 and t <= 3); use the heuristic method"
        )));
    }
    let window = alpha_small_window(n as u64, p, t as u64).ok();
    let mut records: Vec<SampleRecord> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<SampleRecord> {
            let sub = seed.derive(i);
            let g = sample_gnp(n, p, sub)?;
            let (alpha, status) = match method {
                Method::Exact => {
                    let r = alpha_t_exact(&g, t, limits)?;
                    (r.size, r.status)
                }
                Method::Heuristic => (alpha_t_heuristic(&g, t, sub)?.0, Status::Incomplete),
            };
            Ok(SampleRecord {
                schema: schema::SAMPLE,
                experiment_id: id.to_string(),
                seed: seed.0,
                sample: i,
                sub_seed: sub.0,
                n,
                p,
                t,
                method,
                alpha,
                status,
                predicted_center: window.as_ref().map(|w| w.center),
                predicted_lower: window.as_ref().map(|w| w.lower),
                predicted_upper: window.as_ref().map(|w| w.upper),
            })
        })
        .collect::<Result<_>>()?;
    records.sort_by_key(|r| r.sample);

    let mut values: Vec<usize> = records.iter().map(|r| r.alpha).collect();
    values.sort_unstable();
    let m = values.len();
    let median = if m % 2 == 1 { values[m / 2] as f64 } else { (values[m / 2 - 1] + values[m / 2]) as f64 / 2.0 };
    let summary = ConcentrationSummary {
        experiment_id: id.to_string(),
        n,
        p,
        t,
        samples,
        seed: seed.0,
        method,
        min: values[0],
        median,
        max: values[m - 1],
        mean: values.iter().sum::<usize>() as f64 / m as f64,
        window,
        incomplete: records.iter().filter(|r| method == Method::Exact && r.status == Status::Incomplete).count(),
    };
    Ok((summary, records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{write_rows, Format};
    use crate::solver::alpha_t_brute;

    fn spec(id: &str, n: usize, t: usize, samples: u64, seed: u64, method: Method) -> ConcentrationSpec {
        ConcentrationSpec { id: id.into(), n, p: 0.5, t, samples, seed, method }
    }

    #[test]
    fn small_exact_run_matches_brute_force() {
        let lim = SolverLimits::default();
        let (s, recs) = concentration_experiment(&spec("c", 14, 1, 12, 4, Method::Exact), &lim).unwrap();
        assert_eq!(recs.len(), 12);
        for r in &recs {
            let g = sample_gnp(14, 0.5, RngSeed(r.sub_seed)).unwrap();
            assert_eq!(r.alpha, alpha_t_brute(&g, 1).unwrap());
            assert_eq!(r.status, Status::Optimal);
        }
        assert!(s.min <= s.max && s.incomplete == 0);
    }

    #[test]
    fn output_is_deterministic() {
        let lim = SolverLimits::default();
        let run = || {
            let (_, recs) = concentration_experiment(&spec("d", 20, 2, 16, 7, Method::Exact), &lim).unwrap();
            let mut buf = Vec::new();
            write_rows(&recs, Format::Csv, &mut buf).unwrap();
            buf
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn infeasible_exact_is_refused() {
        let lim = SolverLimits::default();
        let r = concentration_experiment(&spec("x", 500, 2, 2, 0, Method::Exact), &lim);
        assert!(matches!(r, Err(Error::Refused(_))));
    }
}
