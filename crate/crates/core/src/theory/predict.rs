//! Point predictions and windows for `alpha_t` and `chi_t` of `G(n, p)`.

use serde::{Deserialize, Serialize};

use super::threshold::{kappa_of_tau, KAPPA_DEFAULT_TOL};
use crate::error::{param, Result};

/// Which formula produced a window.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaId {
    ChiMedium,
    AlphaSmall,
    ChiSmall,
    SparseSmallest,
    SparseSmall,
    SparseMedium,
    SparseLarge,
    SparseCeiling,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionWindow {
    pub center: f64,
    pub lower: f64,
    pub upper: f64,
    pub formula_id: FormulaId,
    /// Hypotheses that were violated but evaluated anyway.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl PredictionWindow {
    fn new(center: f64, lower: f64, upper: f64, formula_id: FormulaId) -> Self {
        PredictionWindow { center, lower, upper, formula_id, warnings: Vec::new() }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// `ln b` where `b = 1 / (1 - p)`.
pub fn ln_b(p: f64) -> f64 {
    -(-p).ln_1p()
}

pub fn log_b(x: f64, p: f64) -> f64 {
    x.ln() / ln_b(p)
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return param("edge probability p must lie in (0, 1)");
    }
    Ok(())
}

/// Default relative slack around asymptotic `~` predictions.
pub const DEFAULT_SLACK: f64 = 0.25;

/// `chi_t ~ n / (kappa log_b n)` with `tau = t / log_b n`, widened by
/// `center * (1 +- slack)` to absorb the `o(1)` term.
pub fn chi_medium_prediction(n: u64, p: f64, t: u64, slack: f64) -> Result<PredictionWindow> {
    if n < 3 {
        return param("n must be at least 3");
    }
    check_p(p)?;
    if t < 1 {
        return param("t must be at least 1");
    }
    if !(0.0..1.0).contains(&slack) {
        return param("slack must lie in [0, 1)");
    }
    let lbn = log_b(n as f64, p);
    let th = kappa_of_tau(t as f64 / lbn, KAPPA_DEFAULT_TOL)?;
    let center = n as f64 / (th.kappa * lbn);
    Ok(PredictionWindow::new(center, center * (1.0 - slack), center * (1.0 + slack), FormulaId::ChiMedium))
}

/// `2 log_b n + t - 2 log_b t - 2 log_b log_b(np) / t`, the centre of the
/// constant-width window for `alpha_t` at small `t`.
pub fn alpha_small_center(n: u64, p: f64, t: u64) -> Result<f64> {
    check_p(p)?;
    if t < 1 {
        return param("t must be at least 1");
    }
    let lb_np = log_b(n as f64 * p, p);
    if !(lb_np > 1.0) {
        return param("log_b log_b(np) is undefined or nonpositive for these n, p");
    }
    let (nf, tf) = (n as f64, t as f64);
    Ok(2.0 * log_b(nf, p) + tf - 2.0 * log_b(tf, p) - 2.0 * log_b(lb_np, p) / tf)
}

/// Window `[center - 2/ln b, center + 10/ln b]` for `alpha_t` when
/// `t <= ln log_b(np)`. Larger `t` is evaluated with a warning.
pub fn alpha_small_window(n: u64, p: f64, t: u64) -> Result<PredictionWindow> {
    let center = alpha_small_center(n, p, t)?;
    let lb = ln_b(p);
    let mut w = PredictionWindow::new(center, center - 2.0 / lb, center + 10.0 / lb, FormulaId::AlphaSmall);
    let t_max = log_b(n as f64 * p, p).ln();
    if t as f64 > t_max {
        w.warnings.push(format!("t = {t} exceeds ln log_b(np) = {t_max:.4}; window constants not guaranteed"));
    }
    Ok(w)
}

/// `n` divided by the `alpha_t` window, with the ends swapped.
pub fn chi_small_prediction(n: u64, p: f64, t: u64) -> Result<PredictionWindow> {
    let a = alpha_small_window(n, p, t)?;
    if !(a.lower > 0.0) {
        return param("alpha window reaches zero; n is too small for a chi window");
    }
    let nf = n as f64;
    let mut w = PredictionWindow::new(nf / a.center, nf / a.upper, nf / a.lower, FormulaId::ChiSmall);
    w.warnings = a.warnings;
    Ok(w)
}

/// Sparse-regime cases for `chi_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeCase {
    SmallestT,
    SmallT,
    MediumT,
    LargeT1,
    LargeT2,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeLabel {
    pub case: RegimeCase,
    pub predicted: PredictionWindow,
}

/// Finite-`n` cutoffs standing in for the asymptotic case boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegimeConfig {
    /// `t / ln(np)` below this is the smallest case.
    pub smallest_cut: f64,
    /// `t / log_b(np)` below this is the small case.
    pub small_cut: f64,
    /// `t / log_b(np)` above this is large.
    pub medium_cut: f64,
    /// `t >= n * ceiling_fraction` uses the `ceil(n / t)` prediction.
    pub ceiling_fraction: f64,
    pub slack: f64,
    /// Multiplicative width of the `Theta(n / t)` window.
    pub theta_constant: f64,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        RegimeConfig {
            smallest_cut: 0.1,
            small_cut: 0.1,
            medium_cut: 10.0,
            ceiling_fraction: 1.0 / 20.0,
            slack: DEFAULT_SLACK,
            theta_constant: 4.0,
        }
    }
}

pub fn classify_sparse_regime(n: u64, p: f64, t: u64, cfg: &RegimeConfig) -> Result<RegimeLabel> {
    if n < 3 {
        return param("n must be at least 3");
    }
    check_p(p)?;
    if t < 1 {
        return param("t must be at least 1");
    }
    let (nf, tf) = (n as f64, t as f64);
    if !(nf * p > 1.0) {
        return param("sparse regimes need np > 1");
    }
    let lb_np = log_b(nf * p, p);
    let r = tf / lb_np;
    let s = cfg.slack;
    let (case, predicted) = if tf >= nf * cfg.ceiling_fraction {
        let x = nf / tf;
        let c = x.ceil();
        let mut w = PredictionWindow::new(c, c, c, FormulaId::SparseCeiling);
        if x.fract() == 0.0 {
            w.warnings.push("n / t is an integer; the ceiling prediction needs a non-integral ratio".into());
        }
        (RegimeCase::LargeT2, w)
    } else if tf / (nf * p).ln() < cfg.smallest_cut {
        let c = nf / (2.0 * lb_np);
        (RegimeCase::SmallestT, PredictionWindow::new(c, c * (1.0 - s), c * (1.0 + s), FormulaId::SparseSmallest))
    } else if r < cfg.small_cut {
        let c = nf / (2.0 * lb_np);
        let lo = nf / (4.0 * lb_np) * (1.0 - s);
        (RegimeCase::SmallT, PredictionWindow::new(c, lo, c * (1.0 + s), FormulaId::SparseSmall))
    } else if r <= cfg.medium_cut {
        let c = nf / tf;
        let k = cfg.theta_constant;
        (RegimeCase::MediumT, PredictionWindow::new(c, c / k, c * k, FormulaId::SparseMedium))
    } else {
        let c = nf / tf;
        (RegimeCase::LargeT1, PredictionWindow::new(c, c * (1.0 - s), c * (1.0 + s), FormulaId::SparseLarge))
    };
    Ok(RegimeLabel { case, predicted })
}

/// `(tau + 1 + 1/(tau - 1)) log_b(np)`, the sparse upper bound on `alpha_t`
/// for `t = tau log_b(np)`.
pub fn alpha_upper_sparse(n: u64, p: f64, tau: f64) -> Result<f64> {
    check_p(p)?;
    if !(tau > 2.0) {
        return param("tau must exceed 2");
    }
    let np = n as f64 * p;
    if !(np > 1.0) {
        return param("np must exceed 1");
    }
    Ok((tau + 1.0 + 1.0 / (tau - 1.0)) * log_b(np, p))
}
