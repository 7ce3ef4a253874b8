use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::schema;
use crate::error::{param, Error, Result};
use crate::graph::{is_t_component_set, sample_gnp, Graph, RngSeed, VertexSet};
use crate::scalar::{binomial, ln_biguint};

/// Fewer samples than this get no confidence interval.
pub const CI_MIN_SAMPLES: u64 = 30;

/// Monte Carlo estimate of the probability that two `k`-sets overlapping in
/// `ell` vertices are both t-component sets.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapEstimate {
    pub schema: &'static str,
    pub n: u64,
    pub p: f64,
    pub t: usize,
    pub k: usize,
    pub ell: usize,
    pub samples: u64,
    pub hits: u64,
    pub p_hat: f64,
    /// 95% normal-approximation half-width; `None` below [`CI_MIN_SAMPLES`].
    pub ci_halfwidth: Option<f64>,
    /// `ln C(n,k) + ln C(k,ell) + ln C(n-k,k-ell) + ln p_hat`; `None` when `p_hat = 0`.
    pub log_f: Option<f64>,
}

fn check_overlap(n: u64, k: usize, ell: usize) -> Result<()> {
    if ell < 2 || ell >= k {
        return param("overlap needs 2 <= ell < k");
    }
    if (2 * k - ell) as u64 > n {
        return param("the union of the two sets (2k - ell vertices) must fit in n");
    }
    Ok(())
}

/// The two sets live on `0..2k-ell`: `A = 0..k`, `B = k-ell..2k-ell`.
fn overlap_sets(k: usize, ell: usize) -> (VertexSet, VertexSet) {
    ((0..k).collect(), (k - ell..2 * k - ell).collect())
}

pub fn overlap_probability_mc(
    n: u64,
    p: f64,
    t: usize,
    k: usize,
    ell: usize,
    samples: u64,
    seed: RngSeed,
) -> Result<OverlapEstimate> {
    check_overlap(n, k, ell)?;
    if t < 1 || samples == 0 {
        return param("need t >= 1 and samples >= 1");
    }
    let (a, b) = overlap_sets(k, ell);
    let union = 2 * k - ell;
    let hits: u64 = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<u64> {
            let g = sample_gnp(union, p, seed.derive(i))?;
            Ok(u64::from(is_t_component_set(&g, &a, t)? && is_t_component_set(&g, &b, t)?))
        })
        .sum::<Result<u64>>()?;
    let p_hat = hits as f64 / samples as f64;
    let ci_halfwidth = (samples >= CI_MIN_SAMPLES).then(|| 1.96 * (p_hat * (1.0 - p_hat) / samples as f64).sqrt());
    let log_f = (hits > 0).then(|| {
        let (nn, kk, ll) = (n, k as u64, ell as u64);
        ln_biguint(&binomial(nn, kk))
            + ln_biguint(&binomial(kk, ll))
            + ln_biguint(&binomial(nn - kk, kk - ll))
            + p_hat.ln()
    });
    Ok(OverlapEstimate { schema: schema::OVERLAP, n, p, t, k, ell, samples, hits, p_hat, ci_halfwidth, log_f })
}

/// Largest number of vertex pairs enumerated by [`overlap_probability_exact`].
const EXACT_OVERLAP_MAX_PAIRS: usize = 22;

/// Exact probability that both overlapping sets are t-component sets, by
/// enumerating every graph on the pairs that lie inside either set.
pub fn overlap_probability_exact(k: usize, ell: usize, t: usize, p: &BigRational) -> Result<BigRational> {
    check_overlap(u64::MAX, k, ell)?;
    let (a, b) = overlap_sets(k, ell);
    let union = 2 * k - ell;
    let pairs: Vec<(usize, usize)> = (0..union)
        .flat_map(|u| (u + 1..union).map(move |v| (u, v)))
        .filter(|&(u, v)| (a.contains(u) && a.contains(v)) || (b.contains(u) && b.contains(v)))
        .collect();
    let m = pairs.len();
    if m > EXACT_OVERLAP_MAX_PAIRS {
        return Err(Error::Refused(format!("{m} relevant pairs exceed the enumeration cap")));
    }
    let mut by_edges = vec![0u64; m + 1];
    for mask in 0u64..1 << m {
        let edges: Vec<(usize, usize)> = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
        let g = Graph::from_edges(union, &edges)?;
        if is_t_component_set(&g, &a, t)? && is_t_component_set(&g, &b, t)? {
            by_edges[edges.len()] += 1;
        }
    }
    let q = BigRational::one() - p;
    let mut total = BigRational::zero();
    for (e, &c) in by_edges.iter().enumerate() {
        if c > 0 {
            let w = num_traits::pow(p.clone(), e) * num_traits::pow(q.clone(), m - e);
            total += w * BigRational::from_integer(BigUint::from(c).into());
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn half() -> BigRational {
        BigRational::new(1.into(), 2.into())
    }

    #[test]
    fn invalid_overlaps_are_rejected() {
        assert!(overlap_probability_mc(10, 0.5, 1, 3, 3, 10, RngSeed(0)).is_err());
        assert!(overlap_probability_mc(10, 0.5, 1, 3, 1, 10, RngSeed(0)).is_err());
        assert!(overlap_probability_mc(4, 0.5, 1, 4, 2, 10, RngSeed(0)).is_err());
        // ell = k - 1 is a genuine overlap
        assert!(overlap_probability_mc(10, 0.5, 1, 4, 3, 10, RngSeed(0)).is_ok());
    }

    #[test]
    fn vacuous_constraint_gives_one() {
        for s in 0..5 {
            let e = overlap_probability_mc(20, 0.7, 5, 5, 2, 40, RngSeed(s)).unwrap();
            assert_eq!(e.p_hat, 1.0);
        }
    }

    #[test]
    fn edgeless_pair_matches_exact_oracle() {
        // both 3-sets edgeless: the 5 pairs inside either set are non-edges
        let exact = overlap_probability_exact(3, 2, 1, &half()).unwrap();
        assert_eq!(exact, BigRational::new(1.into(), 32.into()));
        let e = overlap_probability_mc(10, 0.5, 1, 3, 2, 20_000, RngSeed(1)).unwrap();
        let x = exact.to_f64().unwrap();
        assert!((e.p_hat - x).abs() <= 4.0 * (x * (1.0 - x) / 20_000.0).sqrt());
        assert!(e.ci_halfwidth.is_some() && e.log_f.is_some());
        let few = overlap_probability_mc(10, 0.5, 1, 3, 2, 10, RngSeed(1)).unwrap();
        assert!(few.ci_halfwidth.is_none());
    }
}
