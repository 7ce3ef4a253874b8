//! Lower-tail bound for `X + 2Y` with `X ~ Bin(n1, p)`, `Y ~ Bin(n2, p)`.

use num_traits::Float;
use serde::Serialize;

use crate::error::{param, Error, Result};
use crate::exact_prob::{Prob, ProbParam};
use crate::scalar::{binomial, LogValue, ProbScalar};

/// Rate function `x ln(x/p) + (1-x) ln((1-x)/q)` of a Bernoulli(p) variable.
///
/// Endpoints take their limits; `+inf` outside `[0, 1]`.
pub fn lambda_star<F: Float>(x: F, p: F) -> F {
    let (zero, one) = (F::zero(), F::one());
    let q = one - p;
    if x.is_nan() || x < zero || x > one {
        return F::infinity();
    }
    if x == zero {
        return -(-p).ln_1p();
    }
    if x == one {
        return -p.ln();
    }
    x * (x / p).ln() + (one - x) * ((one - x) / q).ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailBound {
    pub value: f64,
    pub ln: f64,
}

/// `exp(-(n1 + 2 n2) lambda_star(x) / 2)`, an upper bound on
/// `Pr(X + 2Y <= (n1 + 2 n2) x)` for `x <= p`.
pub fn mixedbin_bound(n1: u64, n2: u64, p: f64, x: f64) -> Result<TailBound> {
    if !(p > 0.0 && p < 1.0) {
        return param("edge probability p must lie in (0, 1)");
    }
    if n1 + 2 * n2 < 1 {
        return param("n1 + 2 n2 must be at least 1");
    }
    if !(x >= 0.0) {
        return param("x must be nonnegative");
    }
    if x > p {
        return param("x must not exceed p; the bound only covers the lower tail");
    }
    let ln = -0.5 * (n1 + 2 * n2) as f64 * lambda_star(x, p);
    Ok(TailBound { value: ln.exp(), ln })
}

/// Size cap for [`exact_mixed_tail`].
pub const MIXED_TAIL_MAX: u64 = 200;

fn binomial_pmf<S: ProbScalar>(n: u64, p: &S, q: &S) -> Vec<S> {
    (0..=n).map(|i| S::from_count(&binomial(n, i)).times(&p.pow(i)).times(&q.pow(n - i))).collect()
}

/// `Pr(X + 2Y <= s)` by convolution, in any scalar backend.
pub fn exact_mixed_tail_in<S: ProbScalar>(n1: u64, n2: u64, p: &S, s: i64) -> Result<S> {
    if n1 > MIXED_TAIL_MAX || n2 > MIXED_TAIL_MAX {
        return Err(Error::Refused(format!("n1, n2 must be at most {MIXED_TAIL_MAX}")));
    }
    let q = p.complement().ok_or_else(|| Error::Numeric("1 - p is not representable in this backend".into()))?;
    let px = binomial_pmf(n1, p, &q);
    let py = binomial_pmf(n2, p, &q);
    let mut cdf = Vec::with_capacity(px.len());
    let mut acc = S::zero();
    for v in &px {
        acc = acc.plus(v);
        cdf.push(acc.clone());
    }
    let mut total = S::zero();
    for (y, w) in py.iter().enumerate() {
        let rest = s - 2 * y as i64;
        if rest < 0 {
            break;
        }
        let idx = (rest as u64).min(n1) as usize;
        total = total.plus(&w.times(&cdf[idx]));
    }
    Ok(total)
}

/// `Pr(X + 2Y <= s)`, exact for rational `p` and log-domain for float `p`.
pub fn exact_mixed_tail(n1: u64, n2: u64, p: &ProbParam, s: i64) -> Result<Prob> {
    p.validate()?;
    match p {
        ProbParam::Exact(r) => exact_mixed_tail_in(n1, n2, r, s).map(Prob::Exact),
        ProbParam::Float(x) => exact_mixed_tail_in(n1, n2, &LogValue::from_value(*x), s).map(Prob::from_log),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn lambda_star_examples() {
        assert_eq!(lambda_star(0.3f64, 0.3), 0.0);
        assert!((lambda_star(0.0f64, 0.5) - 2f64.ln()).abs() < 1e-15);
        let v = lambda_star(0.25f64, 0.5);
        assert!((v - (0.25 * 0.5f64.ln() + 0.75 * 1.5f64.ln())).abs() < 1e-15);
        assert!((v - 0.1308).abs() < 1e-4);
        assert!((lambda_star(1.0f64, 0.25) - 4f64.ln()).abs() < 1e-15);
        assert!(lambda_star(1.5f64, 0.5).is_infinite());
        assert!(lambda_star(-0.1f32, 0.5).is_infinite());
    }

    #[test]
    fn exact_tail_examples() {
        let half = ProbParam::Exact(rat(1, 2));
        assert_eq!(exact_mixed_tail(2, 0, &half, 2).unwrap().as_exact().unwrap(), &rat(1, 1));
        assert_eq!(exact_mixed_tail(0, 1, &half, 1).unwrap().as_exact().unwrap(), &rat(1, 2));
        assert_eq!(exact_mixed_tail(1, 1, &half, 1).unwrap().as_exact().unwrap(), &rat(1, 2));
        assert_eq!(exact_mixed_tail(1, 1, &half, -1).unwrap().as_exact().unwrap(), &rat(0, 1));
        let f = exact_mixed_tail(1, 1, &ProbParam::Float(0.5), 1).unwrap();
        assert!((f.to_f64() - 0.5).abs() < 1e-14);
        assert!(matches!(exact_mixed_tail(201, 0, &half, 3), Err(Error::Refused(_))));
    }

    #[test]
    fn bound_examples() {
        let p = 0.3;
        let b = mixedbin_bound(1, 0, p, 0.0).unwrap();
        assert!((b.value - (1.0f64 - p).sqrt()).abs() < 1e-14);
        assert!(1.0 - p <= b.value);

        let b = mixedbin_bound(0, 5, 0.5, 0.25).unwrap();
        assert!((b.ln + 5.0 * lambda_star(0.25, 0.5)).abs() < 1e-14);
        let tail = exact_mixed_tail(0, 5, &ProbParam::Exact(rat(1, 2)), 2).unwrap();
        assert!(tail.to_f64() <= b.value);

        let b = mixedbin_bound(3, 4, 0.7, 0.3).unwrap();
        let tail = exact_mixed_tail(3, 4, &ProbParam::Exact(rat(7, 10)), 3).unwrap();
        assert!(tail.as_exact().unwrap().to_f64().unwrap() <= b.value);

        assert!(mixedbin_bound(3, 4, 0.3, 0.5).is_err());
        assert!(mixedbin_bound(0, 0, 0.3, 0.1).is_err());
    }
}
