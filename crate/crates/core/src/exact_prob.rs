//! Exact first-moment engine.
//!
//! Every quantity is a finite sum over the component containing vertex 0:
//!
//! * connectivity: `Q(k) = sum_{i=1}^{k-1} C(k-1,i-1) conn(i) q^{i(k-i)}`,
//!   `conn(k) = 1 - Q(k)`;
//! * bounded component order:
//!   `P(k) = sum_{i=1}^{min(t,k)} C(k-1,i-1) conn(i) q^{i(k-i)} P(k-i)`.
//!
//! The recurrences are generic over [`ProbScalar`]. Up to [`EXACT_MAX_K`]
//! they run on exact rationals; beyond that, in the log domain.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::scalar::{binomial, check_unit_interval, ln_rational, LogValue, ProbScalar};

/// Largest `k` evaluated in exact rational arithmetic.
pub const EXACT_MAX_K: usize = 64;

/// Beyond this `k` the exact fallback for ill-conditioned log-domain
/// connectivity values is skipped.
pub const EXACT_FALLBACK_MAX_K: usize = 128;

/// Edge probability as supplied by the caller.
#[derive(Clone, Debug, PartialEq)]
pub enum ProbParam {
    Exact(BigRational),
    Float(f64),
}

impl ProbParam {
    pub fn as_f64(&self) -> f64 {
        match self {
            ProbParam::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            ProbParam::Float(x) => *x,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            ProbParam::Exact(r) => {
                if r.is_negative() || *r > BigRational::one() {
                    return param("edge probability p must lie in [0, 1]");
                }
                Ok(())
            }
            ProbParam::Float(x) => check_unit_interval(*x, "edge probability p"),
        }
    }

    pub(crate) fn exact(&self) -> Result<&BigRational> {
        match self {
            ProbParam::Exact(r) => Ok(r),
            ProbParam::Float(_) => param("exact mode requires p as an exact rational, not a float"),
        }
    }
}

/// Numeric mode selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Log,
    /// Exact when `p` is rational and `k <= EXACT_MAX_K`, log otherwise.
    Auto,
}

/// A probability, either exact or log-domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Prob {
    Exact(BigRational),
    Log(LogValue<f64>),
}

impl Prob {
    pub(crate) fn from_log(v: LogValue<f64>) -> Self {
        // recurrences can overshoot zero by rounding
        if !v.is_zero() && v.ln() > 0.0 {
            return Prob::Log(LogValue::one());
        }
        Prob::Log(v)
    }

    pub fn ln(&self) -> f64 {
        match self {
            Prob::Exact(r) => ln_rational(r),
            Prob::Log(v) => v.ln(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(r) => r.to_f64().unwrap_or_else(|| ln_rational(r).exp()),
            Prob::Log(v) => v.value(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Prob::Exact(r) => Some(r),
            Prob::Log(_) => None,
        }
    }
}

/// `rows[m][j] = C(m, j)` for `m < rows`, converted into the scalar backend.
fn binomial_rows<S: ProbScalar>(rows: usize) -> Vec<Vec<S>> {
    let mut out = Vec::with_capacity(rows);
    let mut row: Vec<BigUint> = vec![BigUint::one()];
    for m in 0..rows {
        if m > 0 {
            let mut next = Vec::with_capacity(m + 1);
            next.push(BigUint::one());
            for j in 1..m {
                next.push(&row[j - 1] + &row[j]);
            }
            next.push(BigUint::one());
            row = next;
        }
        out.push(row.iter().map(S::from_count).collect());
    }
    out
}

/// Probability that `G(k, p)` is disconnected given the connectivity values
/// for all smaller orders.
fn disconnection<S: ProbScalar>(k: usize, conn: &[S], q: &S, rows: &[Vec<S>]) -> S {
    let mut acc = S::zero();
    for i in 1..k {
        let term = rows[k - 1][i - 1].times(&conn[i]).times(&q.pow((i * (k - i)) as u64));
        acc = acc.plus(&term);
    }
    acc
}

/// `conn[j] = Pr(G(j, p) connected)` for `j` in `0..=k_max` (`conn[0]` is
/// unused and set to one).
///
/// Fails with a numeric error when the backend cannot form `1 - Q` accurately;
/// the log-domain entry point [`log_connectivity_table`] handles that case.
pub fn connectivity_table<S: ProbScalar>(k_max: usize, p: &S) -> Result<Vec<S>> {
    let q = p.complement().ok_or_else(|| Error::Numeric("cannot form q = 1 - p".into()))?;
    let rows = binomial_rows::<S>(k_max.max(1));
    let mut conn = vec![S::one(); k_max + 1];
    for k in 2..=k_max {
        let dis = disconnection(k, &conn, &q, &rows);
        conn[k] = dis
            .complement()
            .ok_or_else(|| Error::Numeric(format!("connectivity of G({k}, p) too close to zero for this backend")))?;
    }
    Ok(conn)
}

/// Log-domain connectivity table. When `Pr(disconnected) > 1 - 1e-12` the
/// entry is recomputed exactly from the binary value of `p`.
pub fn log_connectivity_table(k_max: usize, p: f64) -> Result<Vec<LogValue<f64>>> {
    check_unit_interval(p, "edge probability p")?;
    let pl = LogValue::from_value(p);
    let q = log_q(p);
    let rows = binomial_rows::<LogValue<f64>>(k_max.max(1));
    let mut conn = vec![LogValue::one(); k_max + 1];
    let mut exact: Option<Vec<BigRational>> = None;
    for k in 2..=k_max {
        let dis = disconnection(k, &conn, &q, &rows);
        conn[k] = match dis.complement() {
            Some(c) => c,
            None if k <= EXACT_FALLBACK_MAX_K => {
                let table = exact.get_or_insert_with(|| {
                    let pr = BigRational::from_float(p).expect("finite p");
                    connectivity_table(EXACT_FALLBACK_MAX_K.min(k_max), &pr).expect("exact backend never fails")
                });
                LogValue::from_ln(ln_rational(&table[k]))
            }
            None => LogValue::from_ln((-dis.ln().exp_m1()).ln()),
        };
    }
    // p = 0 forces disconnection for every k >= 2; avoid -inf rounding noise
    if pl.is_zero() {
        for c in conn.iter_mut().skip(2) {
            *c = LogValue::zero();
        }
    }
    Ok(conn)
}

fn log_q(p: f64) -> LogValue<f64> {
    LogValue::from_ln((-p).ln_1p())
}

/// `P[j] = Pr(max component order of G(j, p) <= t)` for `j` in `0..=k`.
pub fn max_comp_le_table<S: ProbScalar>(k: usize, t: usize, q: &S, conn: &[S]) -> Vec<S> {
    assert!(conn.len() > k || k == 0, "connectivity table too short");
    let rows = binomial_rows::<S>(k.max(1));
    let mut table = vec![S::one(); k + 1];
    for j in 1..=k {
        let mut acc = S::zero();
        for i in 1..=t.min(j) {
            let term = rows[j - 1][i - 1].times(&conn[i]).times(&q.pow((i * (j - i)) as u64)).times(&table[j - i]);
            acc = acc.plus(&term);
        }
        table[j] = acc;
    }
    table
}

fn check_t(t: usize) -> Result<()> {
    if t < 1 {
        return param("t must be at least 1");
    }
    Ok(())
}

/// `Pr(G(k, p) is connected)`. Exact for rational `p`, log-domain for float `p`.
pub fn connectivity_prob(k: usize, p: &ProbParam) -> Result<Prob> {
    if k == 0 {
        return param("connectivity needs k >= 1");
    }
    p.validate()?;
    match p {
        ProbParam::Exact(r) => Ok(Prob::Exact(connectivity_table(k, r)?.swap_remove(k))),
        ProbParam::Float(x) => Ok(Prob::from_log(log_connectivity_table(k, *x)?[k])),
    }
}

/// `Pr(max component order of G(k, p) <= t)`.
pub fn max_comp_le_prob(k: usize, t: usize, p: &ProbParam) -> Result<Prob> {
    check_t(t)?;
    p.validate()?;
    match p {
        ProbParam::Exact(r) => Ok(Prob::Exact(exact_max_comp_le(k, t, r)?)),
        ProbParam::Float(x) => Ok(Prob::from_log(log_max_comp_le(k, t, *x)?)),
    }
}

fn exact_max_comp_le(k: usize, t: usize, p: &BigRational) -> Result<BigRational> {
    let conn = connectivity_table(k.min(t).max(1), p)?;
    let q = BigRational::one() - p;
    let mut conn_full = conn;
    conn_full.resize(k + 1, BigRational::zero());
    Ok(max_comp_le_table(k, t, &q, &conn_full).swap_remove(k))
}

fn log_max_comp_le(k: usize, t: usize, p: f64) -> Result<LogValue<f64>> {
    let mut conn = log_connectivity_table(k.min(t).max(1), p)?;
    conn.resize(k + 1, LogValue::zero());
    let q = log_q(p);
    Ok(max_comp_le_table(k, t, &q, &conn).swap_remove(k))
}

/// First moment of the number of t-component k-sets in `G(n, p)`.
#[derive(Clone, Debug, Serialize)]
pub struct ExpectationReport {
    pub n: u64,
    pub k: usize,
    pub t: usize,
    pub p: f64,
    pub mode: Mode,
    /// Natural log of `C(n,k) * Pr(max component order of G(k,p) <= t)`,
    /// computed in the log domain.
    pub log_expectation: f64,
    #[serde(skip)]
    pub exact_expectation: Option<BigRational>,
}

impl ExpectationReport {
    pub fn exact_numerator(&self) -> Option<String> {
        self.exact_expectation.as_ref().map(|r| r.numer().to_string())
    }

    pub fn exact_denominator(&self) -> Option<String> {
        self.exact_expectation.as_ref().map(|r| r.denom().to_string())
    }
}

/// `E|S_{n,t,k}| = C(n, k) Pr(max component order of G(k, p) <= t)`.
pub fn expected_tcomp_sets(n: u64, k: usize, t: usize, p: &ProbParam, mode: Mode) -> Result<ExpectationReport> {
    check_t(t)?;
    p.validate()?;
    if k as u64 > n {
        return param(format!("k = {k} exceeds n = {n}"));
    }
    let want_exact = match mode {
        Mode::Exact => {
            p.exact()?;
            if k > EXACT_MAX_K {
                return Err(Error::Refused(format!("exact mode is limited to k <= {EXACT_MAX_K}")));
            }
            true
        }
        Mode::Log => false,
        Mode::Auto => matches!(p, ProbParam::Exact(_)) && k <= EXACT_MAX_K,
    };
    let choose = binomial(n, k as u64);
    let pf = p.as_f64();
    let log_p = log_max_comp_le(k, t, pf)?;
    let log_expectation = LogValue::<f64>::from_count(&choose).times(&log_p).ln();
    let exact_expectation = if want_exact {
        let r = exact_max_comp_le(k, t, p.exact()?)?;
        Some(r * BigRational::from_integer(BigInt::from(choose)))
    } else {
        None
    };
    let mode = if want_exact { Mode::Exact } else { Mode::Log };
    Ok(ExpectationReport { n, k, t, p: pf, mode, log_expectation, exact_expectation })
}

/// `Pr(max component order of G(k, p) = t)` for `t = 1..=k`.
pub fn max_comp_distribution(k: usize, p: &ProbParam) -> Result<Vec<Prob>> {
    if k == 0 {
        return param("distribution needs k >= 1");
    }
    p.validate()?;
    match p {
        ProbParam::Exact(r) => {
            let cum: Vec<BigRational> = (1..=k).map(|t| exact_max_comp_le(k, t, r)).collect::<Result<_>>()?;
            Ok(differences(&cum).into_iter().map(Prob::Exact).collect())
        }
        ProbParam::Float(x) => {
            let cum: Vec<LogValue<f64>> = (1..=k).map(|t| log_max_comp_le(k, t, *x)).collect::<Result<_>>()?;
            Ok(differences(&cum).into_iter().map(Prob::from_log).collect())
        }
    }
}

fn differences<S: ProbScalar>(cum: &[S]) -> Vec<S> {
    let mut prev = S::zero();
    cum.iter()
        .map(|c| {
            let d = c.minus(&prev);
            prev = c.clone();
            d
        })
        .collect()
}

/// Largest `k` accepted by [`brute_force_max_comp_le_prob`].
pub const BRUTE_FORCE_MAX_K: usize = 6;

/// Enumerates all `2^C(k,2)` graphs on `k` vertices.
pub fn brute_force_max_comp_le_prob(k: usize, t: usize, p: &BigRational) -> Result<BigRational> {
    check_t(t)?;
    if k > BRUTE_FORCE_MAX_K {
        return Err(Error::Refused(format!("brute force enumeration is limited to k <= {BRUTE_FORCE_MAX_K}")));
    }
    ProbParam::Exact(p.clone()).validate()?;
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|u| ((u + 1)..k).map(move |v| (u, v))).collect();
    let m = pairs.len();
    let q = BigRational::one() - p;
    let p_pows: Vec<BigRational> = (0..=m).map(|e| num_traits::pow(p.clone(), e)).collect();
    let q_pows: Vec<BigRational> = (0..=m).map(|e| num_traits::pow(q.clone(), e)).collect();
    let mut total = BigRational::zero();
    for mask in 0u32..(1u32 << m) {
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        for (bit, &(u, v)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                parent[a] = b;
            }
        }
        let mut sizes = vec![0usize; k];
        for v in 0..k {
            let r = find(&mut parent, v);
            sizes[r] += 1;
        }
        if sizes.into_iter().max().unwrap_or(0) <= t {
            let e = mask.count_ones() as usize;
            total += &p_pows[e] * &q_pows[m - e];
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn exact(p: &Prob) -> BigRational {
        p.as_exact().expect("exact mode").clone()
    }

    #[test]
    fn connectivity_examples() {
        let p = rat(2, 7);
        assert_eq!(exact(&connectivity_prob(2, &ProbParam::Exact(p.clone())).unwrap()), p);
        assert_eq!(exact(&connectivity_prob(3, &ProbParam::Exact(rat(1, 2))).unwrap()), rat(1, 2));
        assert_eq!(exact(&connectivity_prob(1, &ProbParam::Exact(rat(1, 3))).unwrap()), rat(1, 1));
        assert!(connectivity_prob(0, &ProbParam::Exact(rat(1, 2))).is_err());
    }

    #[test]
    fn max_comp_examples() {
        let half = ProbParam::Exact(rat(1, 2));
        for k in 0..6 {
            assert_eq!(exact(&max_comp_le_prob(k, k.max(1), &ProbParam::Exact(rat(1, 3))).unwrap()), rat(1, 1));
        }
        assert_eq!(exact(&max_comp_le_prob(3, 2, &half).unwrap()), rat(1, 2));
        assert_eq!(exact(&max_comp_le_prob(4, 1, &half).unwrap()), rat(1, 64));
        assert!(max_comp_le_prob(3, 0, &half).is_err());
        assert!(max_comp_le_prob(3, 1, &ProbParam::Exact(rat(3, 2))).is_err());
        assert!(max_comp_le_prob(3, 1, &ProbParam::Float(-0.5)).is_err());
    }

    #[test]
    fn expectation_examples() {
        let half = ProbParam::Exact(rat(1, 2));
        let r = expected_tcomp_sets(4, 3, 2, &half, Mode::Auto).unwrap();
        assert_eq!(r.exact_expectation, Some(rat(2, 1)));
        assert!((r.log_expectation - 2f64.ln()).abs() < 1e-12);
        let r = expected_tcomp_sets(10, 0, 3, &half, Mode::Auto).unwrap();
        assert_eq!(r.exact_expectation, Some(rat(1, 1)));
        assert!(expected_tcomp_sets(3, 4, 1, &half, Mode::Auto).is_err());
        assert!(expected_tcomp_sets(100, 5, 1, &ProbParam::Float(0.5), Mode::Exact).is_err());
        assert!(matches!(expected_tcomp_sets(1000, 65, 2, &half, Mode::Exact), Err(Error::Refused(_))));
        let r = expected_tcomp_sets(1000, 65, 2, &half, Mode::Auto).unwrap();
        assert_eq!(r.mode, Mode::Log);
        assert!(r.exact_expectation.is_none());
    }

    #[test]
    fn distribution_examples() {
        let p = rat(1, 5);
        let d = max_comp_distribution(1, &ProbParam::Exact(p.clone())).unwrap();
        assert_eq!(d.iter().map(exact).collect::<Vec<_>>(), vec![rat(1, 1)]);
        let d = max_comp_distribution(2, &ProbParam::Exact(p.clone())).unwrap();
        assert_eq!(d.iter().map(exact).collect::<Vec<_>>(), vec![rat(4, 5), p]);
        let d = max_comp_distribution(3, &ProbParam::Exact(rat(1, 2))).unwrap();
        assert_eq!(d.iter().map(exact).collect::<Vec<_>>(), vec![rat(1, 8), rat(3, 8), rat(1, 2)]);
    }

    #[test]
    fn log_distribution_sums_to_one() {
        let d = max_comp_distribution(30, &ProbParam::Float(0.3)).unwrap();
        let s: f64 = d.iter().map(Prob::to_f64).sum();
        assert!((s - 1.0).abs() < 1e-9, "{s}");
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_max_comp_le_prob(3, 2, &rat(1, 2)).unwrap(), rat(1, 2));
        assert_eq!(brute_force_max_comp_le_prob(4, 4, &rat(1, 3)).unwrap(), rat(1, 1));
        assert_eq!(brute_force_max_comp_le_prob(5, 1, &rat(1, 3)).unwrap(), num_traits::pow(rat(2, 3), 10));
        assert!(matches!(brute_force_max_comp_le_prob(7, 1, &rat(1, 3)), Err(Error::Refused(_))));
    }

    #[test]
    fn generic_backends_agree() {
        let conn64 = connectivity_table(12, &0.35f64).unwrap();
        let connr = connectivity_table(12, &rat(7, 20)).unwrap();
        let conn32 = connectivity_table(12, &0.35f32).unwrap();
        for k in 1..=12 {
            let e = connr[k].to_f64().unwrap();
            assert!((conn64[k] - e).abs() < 1e-12);
            assert!((conn32[k] as f64 - e).abs() < 1e-4);
        }
    }

    #[test]
    fn log_fallback_for_ill_conditioned_connectivity() {
        // G(k, 1e-9) is almost surely disconnected: Q > 1 - 1e-12 for k >= 3
        let p = 1e-9;
        let log = log_connectivity_table(5, p).unwrap();
        let exact = connectivity_table(5, &BigRational::from_float(p).unwrap()).unwrap();
        for k in 2..=5 {
            let rel = (log[k].ln() - ln_rational(&exact[k])).abs() / ln_rational(&exact[k]).abs();
            assert!(rel < 1e-12, "k={k}");
        }
        let zero = log_connectivity_table(4, 0.0).unwrap();
        assert!(zero[3].is_zero());
    }
}
