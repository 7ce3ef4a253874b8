use serde::Serialize;

use super::schema;
use crate::error::{param, Result};
use crate::exact_prob::{expected_tcomp_sets, Mode, ProbParam};
use crate::theory::{alpha_small_center, kappa_of_tau, ln_b, KAPPA_DEFAULT_TOL};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub schema: &'static str,
    pub n: u64,
    pub p: f64,
    pub t: usize,
    pub k: usize,
    pub log_expectation: f64,
    /// Exact `E` as `numerator/denominator`, when computed exactly.
    pub exact_expectation: Option<String>,
    /// `k <= center - 2/ln b`, where `E >= e^k` is expected.
    pub below_lower_threshold: bool,
    /// `k >= center + 10/ln b`, where `E <= e^-k` is expected.
    pub above_upper_threshold: bool,
    /// `E(k) >= 1 > E(k + 1)`.
    pub crossing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanTable {
    pub n: u64,
    pub p: f64,
    pub t: usize,
    /// Centre of the constant-width window, when defined.
    pub center: Option<f64>,
    pub lower_threshold: Option<f64>,
    pub upper_threshold: Option<f64>,
    pub rows: Vec<ScanRow>,
    pub strictly_decreasing: bool,
    /// Real `k` where the linear interpolation of `ln E` between the
    /// crossing row and the next one is zero.
    pub crossing: Option<f64>,
    pub crossing_in_window: Option<bool>,
}

/// `ln E|S_{n,t,k}|` for `k_min..=k_max` with threshold and crossing flags.
pub fn expectation_scan(n: u64, p: &ProbParam, t: usize, k_min: usize, k_max: usize, mode: Mode) -> Result<ScanTable> {
    if k_min < 1 || k_min > k_max || k_max as u64 > n {
        return param("need 1 <= k_min <= k_max <= n");
    }
    let pf = p.as_f64();
    let center = if pf > 0.0 && pf < 1.0 { alpha_small_center(n, pf, t as u64).ok() } else { None };
    let lb = ln_b(pf);
    let lower = center.map(|c| c - 2.0 / lb);
    let upper = center.map(|c| c + 10.0 / lb);
    let mut rows = Vec::with_capacity(k_max - k_min + 1);
    for k in k_min..=k_max {
        let r = expected_tcomp_sets(n, k, t, p, mode)?;
        let exact_expectation = r.exact_expectation.as_ref().map(|e| format!("{}/{}", e.numer(), e.denom()));
        rows.push(ScanRow {
            schema: schema::SCAN,
            n,
            p: pf,
            t,
            k,
            log_expectation: r.log_expectation,
            exact_expectation,
            below_lower_threshold: lower.is_some_and(|l| k as f64 <= l),
            above_upper_threshold: upper.is_some_and(|u| k as f64 >= u),
            crossing: false,
        });
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].log_expectation < w[0].log_expectation);
    let mut crossing = None;
    for i in 0..rows.len().saturating_sub(1) {
        let (a, b) = (rows[i].log_expectation, rows[i + 1].log_expectation);
        if a >= 0.0 && b < 0.0 {
            rows[i].crossing = true;
            let frac = if b.is_finite() { a / (a - b) } else { 0.0 };
            crossing = Some(rows[i].k as f64 + frac);
            break;
        }
    }
    let crossing_in_window = match (crossing, lower, upper) {
        (Some(x), Some(l), Some(u)) => Some(l <= x && x <= u),
        _ => None,
    };
    Ok(ScanTable {
        n,
        p: pf,
        t,
        center,
        lower_threshold: lower,
        upper_threshold: upper,
        rows,
        strictly_decreasing,
        crossing,
        crossing_in_window,
    })
}

/// One `n` examined by [`crossing_window_search`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingProbe {
    pub n: u64,
    pub crossing: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossingSearch {
    pub probes: Vec<CrossingProbe>,
    /// Smallest probed `n` at which the crossing lies in the window.
    pub smallest_n: Option<u64>,
}

fn probe(n: u64, p: f64, t: usize) -> Result<CrossingProbe> {
    let center = alpha_small_center(n, p, t as u64)?;
    let lb = ln_b(p);
    let (lower, upper) = (center - 2.0 / lb, center + 10.0 / lb);
    let k_min = ((lower - 4.0).floor().max(1.0) as u64).min(n) as usize;
    let k_max = ((upper + 4.0).ceil() as u64).min(n) as usize;
    let table = expectation_scan(n, &ProbParam::Float(p), t, k_min, k_max, Mode::Log)?;
    Ok(CrossingProbe { n, crossing: table.crossing, lower, upper, holds: table.crossing_in_window == Some(true) })
}

/// Doubles `n` from `n_start` until the `E = 1` crossing falls inside the
/// constant-width window or `n_max` is passed, then bisects between the last
/// failure and the first success.
pub fn crossing_window_search(p: f64, t: usize, n_start: u64, n_max: u64) -> Result<CrossingSearch> {
    if n_start < 2 || n_start > n_max {
        return param("need 2 <= n_start <= n_max");
    }
    let mut probes = Vec::new();
    let mut last_fail = None;
    let mut n = n_start;
    let mut found = None;
    loop {
        let pr = probe(n, p, t);
        let holds = pr.as_ref().map(|x| x.holds).unwrap_or(false);
        if let Ok(x) = pr {
            probes.push(x);
        }
        if holds {
            found = Some(n);
            break;
        }
        last_fail = Some(n);
        if n >= n_max {
            break;
        }
        n = n.saturating_mul(2).min(n_max);
    }
    if let (Some(mut hi), Some(mut lo)) = (found, last_fail) {
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            let pr = probe(mid, p, t)?;
            let holds = pr.holds;
            probes.push(pr);
            if holds {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        found = Some(hi);
    }
    Ok(CrossingSearch { probes, smallest_n: found })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Figure1Point {
    pub schema: &'static str,
    pub tau: f64,
    pub kappa: f64,
    pub residual: f64,
}

/// Points `(tau, kappa(tau))` on the curve `iota = 0`, with `tau` stepping
/// from `tau_min` to `tau_max` (grid values rounded to 12 decimals).
pub fn figure1_data(tau_min: f64, tau_max: f64, step: f64) -> Result<Vec<Figure1Point>> {
    if !(tau_min > 0.0 && tau_min < tau_max && step > 0.0) {
        return param("need 0 < tau_min < tau_max and step > 0");
    }
    let count = ((tau_max - tau_min) / step + 1e-9).floor() as u64 + 1;
    if count > 1_000_000 {
        return param("too many grid points");
    }
    (0..count)
        .map(|i| {
            let tau = ((tau_min + i as f64 * step) * 1e12).round() / 1e12;
            let th = kappa_of_tau(tau, KAPPA_DEFAULT_TOL)?;
            Ok(Figure1Point { schema: schema::FIGURE1, tau, kappa: th.kappa, residual: th.residual })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn small_row_is_exact() {
        let half = ProbParam::Exact(BigRational::new(1.into(), 2.into()));
        let t = expectation_scan(4, &half, 2, 3, 3, Mode::Auto).unwrap();
        assert_eq!(t.rows[0].exact_expectation.as_deref(), Some("2/1"));
        assert!((t.rows[0].log_expectation - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn one_million_scan() {
        let t = expectation_scan(1_000_000, &ProbParam::Float(0.5), 2, 20, 60, Mode::Log).unwrap();
        assert!(t.strictly_decreasing);
        let c = t.crossing.unwrap();
        assert_eq!(t.crossing_in_window, Some(true), "crossing {c}");
        assert_eq!(t.rows.iter().filter(|r| r.crossing).count(), 1);
    }

    #[test]
    fn figure1_grid() {
        let pts = figure1_data(0.05, 10.0, 0.05).unwrap();
        assert_eq!(pts.len(), 200);
        assert!(pts.windows(2).all(|w| w[1].kappa >= w[0].kappa));
        let at = |x: f64| pts.iter().find(|p| p.tau == x).unwrap().kappa;
        assert!((at(1.0) - 3.0).abs() <= 1e-8);
        assert!((at(4.0) - 16.0 / 3.0).abs() <= 1e-8);
        let low = figure1_data(0.02, 0.03, 0.01).unwrap();
        assert!(low[0].kappa > 2.0 && low[0].kappa < 2.2);
        assert!(figure1_data(1.0, 0.5, 0.1).is_err());
    }
}
