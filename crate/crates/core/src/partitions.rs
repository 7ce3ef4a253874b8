//! Exact counts of set partitions with bounded block sizes, and the analytic
//! bounds used against them.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{Float, FromPrimitive, One, Zero};
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::scalar::{factorial, ln_biguint, LogValue};

/// Exact nonnegative count.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(pub BigUint);

impl BigCount {
    pub fn ln(&self) -> f64 {
        ln_biguint(&self.0)
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

/// `SP(t, j)` for every `j` in `0..=k_max`: partitions of a `j`-set into
/// blocks of size at most `t`.
///
/// Conditions on the block holding the first element:
/// `SP(j) = sum_{i=1..min(t,j)} C(j-1, i-1) SP(j-i)`.
pub fn sp_bounded_table(t: usize, k_max: usize) -> Result<Vec<BigUint>> {
    if t < 1 {
        return param("block size cap t must be at least 1");
    }
    let mut sp = Vec::with_capacity(k_max + 1);
    sp.push(BigUint::one());
    // row[j] = C(m, j) for the current m = k - 1, truncated to j < t
    let mut row = vec![BigUint::zero(); t];
    row[0] = BigUint::one();
    for k in 1..=k_max {
        if k > 1 {
            for j in (1..t).rev() {
                let prev = row[j - 1].clone();
                row[j] += prev;
            }
        }
        let mut total = BigUint::zero();
        for i in 1..=t.min(k) {
            total += &row[i - 1] * &sp[k - i];
        }
        sp.push(total);
    }
    Ok(sp)
}

/// Number of set partitions of a `k`-set with all blocks of size at most `t`.
pub fn sp_bounded(t: usize, k: usize) -> Result<BigCount> {
    let mut table = sp_bounded_table(t, k)?;
    Ok(BigCount(table.pop().expect("table has k + 1 entries")))
}

/// Bell number, computed with the Bell triangle.
pub fn bell(k: usize) -> BigCount {
    let mut row = vec![BigUint::one()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().expect("nonempty row").clone());
        for x in &row {
            let v = next.last().expect("nonempty row") + x;
            next.push(v);
        }
        row = next;
    }
    BigCount(row[0].clone())
}

/// Partitions of a `k`-set with the maximum possible number of blocks of size
/// exactly `t`: `k! / ((k^/t)! (t!)^(k^/t) (k - k^)!)` with `k^ = t floor(k/t)`.
pub fn ep_exact(t: usize, k: usize) -> Result<BigCount> {
    if t < 1 {
        return param("block size t must be at least 1");
    }
    let blocks = (k / t) as u64;
    let rest = (k - t * (k / t)) as u64;
    let den = factorial(blocks) * num_traits::pow(factorial(t as u64), blocks as usize) * factorial(rest);
    Ok(BigCount(factorial(k as u64) / den))
}

/// Positive root `r` of `sum_{i=0}^{t-1} r^(i+1) / i! = k`.
///
/// The left side is strictly increasing and at least `r`, so the root lies in
/// `(0, k]` and bisection converges. The residual is at most `1e-10 * k` for
/// `f64`.
pub fn saddle_point_radius<F: Float + FromPrimitive>(t: usize, k: usize) -> Result<F> {
    if t < 1 || k < 1 {
        return param("saddle point needs t >= 1 and k >= 1");
    }
    let kf = F::from_usize(k).expect("k representable");
    let tol = F::from_f64(1e-10).unwrap().max(F::epsilon() * F::from_f64(16.0).unwrap()) * kf;
    let residual = |r: F| {
        let mut term = r;
        let mut sum = r;
        for i in 1..t {
            term = term * r / F::from_usize(i).unwrap();
            sum = sum + term;
        }
        sum - kf
    };
    let (mut lo, mut hi) = (F::zero(), kf);
    if residual(hi).abs() <= tol {
        return Ok(hi);
    }
    let two = F::one() + F::one();
    for _ in 0..2000 {
        let mid = (lo + hi) / two;
        let f = residual(mid);
        if f.abs() <= tol {
            return Ok(mid);
        }
        if mid <= lo || mid >= hi {
            break;
        }
        if f > F::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::Numeric(format!("saddle-point bisection stalled for t = {t}, k = {k}")))
}

fn ln_of<F: Float + FromPrimitive>(x: usize) -> F {
    F::from_usize(x).expect("representable").ln()
}

/// Log of the bounded-block-size upper bound
/// `exp(k log k - (k/t) log k - k log t + 3k)`, stated for `t <= log k` and
/// `k` large.
pub fn sp_saddle_upper<F: Float + FromPrimitive>(t: usize, k: usize) -> Result<LogValue<F>> {
    if t < 1 || k < 2 {
        return param("saddle bound needs t >= 1 and k >= 2");
    }
    let (kf, tf) = (F::from_usize(k).unwrap(), F::from_usize(t).unwrap());
    let lk = kf.ln();
    let three = F::from_f64(3.0).unwrap();
    Ok(LogValue::from_ln(kf * lk - kf / tf * lk - kf * tf.ln() + three * kf))
}

/// Audited heuristic for the unbounded partition count:
/// `k log k - k log log k - k` (the `o(k)` correction is dropped).
pub fn sp_general_upper<F: Float + FromPrimitive>(k: usize) -> Result<LogValue<F>> {
    if k < 3 {
        return param("general bound needs k >= 3 so that log log k > 0");
    }
    let kf = F::from_usize(k).unwrap();
    let lk = kf.ln();
    Ok(LogValue::from_ln(kf * lk - kf * lk.ln() - kf))
}

/// Log of `k^k t^(k^/(2t)) / (k^(k/t) t^k)`, the Stirling lower estimate for
/// `ep_exact` with its `Omega(1)` constant set to one.
pub fn ep_stirling_lower<F: Float + FromPrimitive>(t: usize, k: usize) -> Result<LogValue<F>> {
    if t < 1 || k < 1 {
        return param("Stirling estimate needs t >= 1 and k >= 1");
    }
    let (kf, tf) = (F::from_usize(k).unwrap(), F::from_usize(t).unwrap());
    let khat = F::from_usize(t * (k / t)).unwrap();
    let (lk, lt) = (ln_of::<F>(k), ln_of::<F>(t));
    let two = F::one() + F::one();
    Ok(LogValue::from_ln(kf * lk + khat / (two * tf) * lt - kf / tf * lk - kf * lt))
}

/// Exact-vs-bound comparison at one `k`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub k: usize,
    pub exact_ln: f64,
    pub bound_ln: f64,
    pub holds: bool,
}

/// Per-`t` audit of [`sp_saddle_upper`] over `2..=k_max`.
#[derive(Clone, Debug, Serialize)]
pub struct SaddleAudit {
    pub t: usize,
    pub checks: Vec<BoundCheck>,
    /// Smallest `k` such that the bound holds at every audited `k' >= k`.
    /// Only `k` with `t <= ln k` are audited.
    pub smallest_dominating_k: Option<usize>,
}

pub fn saddle_bound_audit(t: usize, k_max: usize) -> Result<SaddleAudit> {
    let table = sp_bounded_table(t, k_max)?;
    let mut checks = Vec::new();
    for (k, count) in table.iter().enumerate().skip(2) {
        if (t as f64) > (k as f64).ln() {
            continue;
        }
        let exact_ln = ln_biguint(count);
        let bound_ln = sp_saddle_upper::<f64>(t, k)?.ln();
        checks.push(BoundCheck { k, exact_ln, bound_ln, holds: exact_ln <= bound_ln });
    }
    let smallest_dominating_k = match checks.iter().rposition(|c| !c.holds) {
        None => checks.first().map(|c| c.k),
        Some(i) => checks.get(i + 1).map(|c| c.k),
    };
    Ok(SaddleAudit { t, checks, smallest_dominating_k })
}

/// Comparison of the general heuristic against `ln bell(k)`.
#[derive(Clone, Debug, Serialize)]
pub struct GeneralBoundAudit {
    pub k: usize,
    pub heuristic_ln: f64,
    pub bell_ln: f64,
    pub difference: f64,
    pub ratio: f64,
}

pub fn general_bound_audit(k: usize) -> Result<GeneralBoundAudit> {
    let heuristic_ln = sp_general_upper::<f64>(k)?.ln();
    let bell_ln = bell(k).ln();
    Ok(GeneralBoundAudit {
        k,
        heuristic_ln,
        bell_ln,
        difference: heuristic_ln - bell_ln,
        ratio: heuristic_ln / bell_ln,
    })
}

/// `ln ep_exact(t, k) - ep_stirling_lower(t, k)`; the unknown constant gap.
pub fn ep_stirling_gap(t: usize, k: usize) -> Result<f64> {
    Ok(ep_exact(t, k)?.ln() - ep_stirling_lower::<f64>(t, k)?.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sp_examples() {
        assert_eq!(sp_bounded(1, 7).unwrap(), 1.into());
        assert_eq!(sp_bounded(2, 3).unwrap(), 4.into());
        assert_eq!(sp_bounded(2, 4).unwrap(), 10.into());
        assert_eq!(sp_bounded(3, 0).unwrap(), 1.into());
        assert!(sp_bounded(0, 3).is_err());
    }

    #[test]
    fn bell_examples() {
        assert_eq!(bell(0), 1.into());
        assert_eq!(bell(3), 5.into());
        assert_eq!(bell(5), 52.into());
        assert_eq!(bell(10), 115_975.into());
    }

    #[test]
    fn ep_examples() {
        assert_eq!(ep_exact(2, 4).unwrap(), 3.into());
        assert_eq!(ep_exact(9, 9).unwrap(), 1.into());
        assert_eq!(ep_exact(1, 5).unwrap(), 1.into());
        // {1,2,3} blocks of size 2 with one leftover: 3 choices
        assert_eq!(ep_exact(2, 3).unwrap(), 3.into());
    }

    #[test]
    fn saddle_radius_examples() {
        let r: f64 = saddle_point_radius(1, 5).unwrap();
        assert!((r - 5.0).abs() <= 5e-10);
        let r: f64 = saddle_point_radius(2, 6).unwrap();
        assert!((r - 2.0).abs() < 1e-9);
        let r: f64 = saddle_point_radius(5, 100).unwrap();
        let lhs: f64 = (0..5).map(|i| r.powi(i + 1) / (1..=i).product::<i32>().max(1) as f64).sum();
        assert!((lhs - 100.0).abs() <= 1e-8);
        assert!(saddle_point_radius::<f64>(0, 5).is_err());
        assert!(saddle_point_radius::<f32>(3, 50).is_ok());
    }

    #[test]
    fn closed_form_bounds() {
        let k = 8;
        let v = sp_saddle_upper::<f64>(1, k).unwrap().ln();
        assert!((v - 3.0 * k as f64).abs() < 1e-12);

        let g = sp_general_upper::<f64>(3).unwrap().ln();
        let l3 = 3f64.ln();
        assert!((g - (3.0 * l3 - 3.0 * l3.ln() - 3.0)).abs() < 1e-12);
        assert!(sp_general_upper::<f64>(2).is_err());

        assert!(ep_stirling_lower::<f64>(1, 4).unwrap().ln().abs() < 1e-12);
        assert!(ep_stirling_lower::<f64>(2, 4).unwrap().ln() <= 3f64.ln());
    }

    #[test]
    fn dp_bounds_at_scale() {
        for (t, k) in [(3, 200), (5, 1000)] {
            let exact = sp_bounded(t, k).unwrap().ln();
            let bound = sp_saddle_upper::<f64>(t, k).unwrap().ln();
            assert!(exact <= bound, "t={t} k={k}: {exact} > {bound}");
        }
        let lower = ep_stirling_lower::<f64>(3, 30).unwrap().ln();
        assert!(lower <= ep_exact(3, 30).unwrap().ln());
    }

    #[test]
    fn audit_reports_domination_point() {
        let audit = saddle_bound_audit(2, 150).unwrap();
        assert!(audit.checks.iter().all(|c| c.k >= 8));
        let k0 = audit.smallest_dominating_k.expect("dominates eventually");
        assert!(audit.checks.iter().filter(|c| c.k >= k0).all(|c| c.holds));
    }
}
