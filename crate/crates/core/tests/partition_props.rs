use num_bigint::BigUint;
use proptest::prelude::*;

use cclab::partitions::{bell, ep_exact, saddle_point_radius, sp_bounded};

/// Counts restricted-growth strings of length `k` whose blocks all have at
/// most `t` elements; each such string is one set partition.
fn rgs_count(k: usize, t: usize) -> u64 {
    fn go(pos: usize, k: usize, t: usize, sizes: &mut Vec<usize>) -> u64 {
        if pos == k {
            return 1;
        }
        let mut total = 0;
        for b in 0..sizes.len() {
            if sizes[b] < t {
                sizes[b] += 1;
                total += go(pos + 1, k, t, sizes);
                sizes[b] -= 1;
            }
        }
        sizes.push(1);
        total += go(pos + 1, k, t, sizes);
        sizes.pop();
        total
    }
    go(0, k, t, &mut Vec::new())
}

#[test]
fn sp_matches_restricted_growth_strings() {
    for k in 1..=10 {
        for t in 1..=k {
            assert_eq!(sp_bounded(t, k).unwrap().0, BigUint::from(rgs_count(k, t)), "t={t} k={k}");
        }
    }
}

#[test]
fn sp_reaches_bell() {
    for k in 1..=60 {
        assert_eq!(sp_bounded(k, k).unwrap(), bell(k), "k={k}");
    }
}

proptest! {
    #[test]
    fn sp_is_nondecreasing_in_t(k in 1usize..80, t in 1usize..80) {
        prop_assert!(sp_bounded(t, k).unwrap() <= sp_bounded(t + 1, k).unwrap());
    }

    #[test]
    fn ep_is_at_most_sp(k in 1usize..120, t in 1usize..20) {
        prop_assert!(ep_exact(t, k).unwrap() <= sp_bounded(t, k).unwrap());
    }

    #[test]
    fn saddle_radius_solves_its_equation(k in 2usize..2000, t in 1usize..12) {
        let r: f64 = saddle_point_radius(t, k).unwrap();
        let mut term = r;
        let mut sum = 0.0;
        for i in 0..t {
            if i > 0 {
                term *= r / i as f64;
            }
            sum += term;
        }
        prop_assert!((sum - k as f64).abs() <= 1e-10 * k as f64, "residual {}", sum - k as f64);
        // k = sum r^(i+1)/i! lies between r^t/(t-1)! and r e^r
        let fact: f64 = (1..t).map(|i| i as f64).product();
        prop_assert!(r.powi(t as i32) / fact <= k as f64 * (1.0 + 1e-12));
        prop_assert!(r * r.exp() >= k as f64 * (1.0 - 1e-12));
    }
}

#[test]
fn radius_can_fall_below_ln_k() {
    // t <= ln k does not force r >= ln k at finite k
    let r: f64 = saddle_point_radius(4, 149).unwrap();
    assert!(4.0 <= 149f64.ln() && r < 149f64.ln(), "r = {r}");
}
