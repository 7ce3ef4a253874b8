//! The threshold function `iota(tau, kappa)` and its root `kappa(tau)`.

use num_traits::{Float, FromPrimitive};
use serde::Serialize;

use crate::error::{param, Error, Result};

/// Maximum bisection steps in [`kappa_of_tau`].
pub const KAPPA_MAX_ITER: usize = 200;

/// Default tolerance on `|iota|` at the returned root.
pub const KAPPA_DEFAULT_TOL: f64 = 1e-12;

/// `iota(tau, kappa) = ((kappa - tau m)(kappa - tau m - tau) - kappa (kappa - tau - 2)) / 2`
/// where `m = floor(kappa / tau)`.
///
/// Continuous in `kappa`, piecewise quadratic with kinks at multiples of `tau`.
pub fn iota<F: Float>(tau: F, kappa: F) -> F {
    let two = F::one() + F::one();
    let rem = kappa - tau * (kappa / tau).floor();
    (rem * (rem - tau) - kappa * (kappa - tau - two)) / two
}

/// A root of `iota(tau, .)` with its residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdParams<F> {
    pub tau: F,
    pub kappa: F,
    pub residual: F,
}

/// Root of `iota(tau, kappa) = 0` by bisection on `(tau + 1, tau + 2]`.
///
/// `iota(tau, tau + 1) > 0 >= iota(tau, tau + 2)` for every `tau > 0`, so the
/// bracket is always valid.
pub fn kappa_of_tau<F: Float + FromPrimitive>(tau: F, tol: F) -> Result<ThresholdParams<F>> {
    if !(tau > F::zero()) || !tau.is_finite() {
        return param("tau must be a positive finite real");
    }
    if !(tol > F::zero()) {
        return param("tolerance must be positive");
    }
    let one = F::one();
    let two = one + one;
    let (mut lo, mut hi) = (tau + one, tau + two);
    let (f_lo, f_hi) = (iota(tau, lo), iota(tau, hi));
    if f_hi.abs() <= tol {
        return Ok(ThresholdParams { tau, kappa: hi, residual: f_hi });
    }
    if !(f_lo > F::zero() && f_hi < F::zero()) {
        return Err(Error::Numeric(format!(
            "iota does not change sign on (tau + 1, tau + 2]: {:?} / {:?}",
            f_lo.to_f64(),
            f_hi.to_f64()
        )));
    }
    let mut best = ThresholdParams { tau, kappa: hi, residual: f_hi };
    for _ in 0..KAPPA_MAX_ITER {
        let mid = (lo + hi) / two;
        let f = iota(tau, mid);
        if f.abs() < best.residual.abs() {
            best = ThresholdParams { tau, kappa: mid, residual: f };
        }
        if f.abs() <= tol || mid <= lo || mid >= hi {
            break;
        }
        if f > F::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.residual.abs() <= tol {
        Ok(best)
    } else {
        Err(Error::Numeric(format!("kappa bisection stalled at residual {:?}", best.residual.to_f64())))
    }
}

/// Which perturbation identity to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    /// `iota(tau, kappa + eps)` for `0 <= eps < tau (floor(kappa/tau) + 1) - kappa`.
    Plus,
    /// `iota(tau, kappa - eps)` when `tau | kappa`, `0 < eps < tau`.
    MinusDivides,
    /// `iota(tau, kappa - eps)` when `tau` does not divide `kappa`,
    /// `0 <= eps <= kappa - tau floor(kappa/tau)`.
    MinusNotDivides,
}

/// Tolerance for accepting `iota(tau, kappa) = 0` and for treating
/// `kappa / tau` as an integer.
pub const IDENTITY_TOL: f64 = 1e-10;

fn snapped_floor<F: Float + FromPrimitive>(x: F) -> (F, bool) {
    let r = x.round();
    if (x - r).abs() <= F::from_f64(1e-9).unwrap() {
        (r, true)
    } else {
        (x.floor(), false)
    }
}

/// Closed form of `iota` near a root, for the three perturbation regimes:
/// `-eps (tau m - 1)`, `eps`, and `eps (tau m - 1)` with `m = floor(kappa/tau)`.
pub fn careful_identity<F: Float + FromPrimitive>(tau: F, kappa: F, eps: F, case: Perturbation) -> Result<F> {
    let tol = F::from_f64(IDENTITY_TOL).unwrap();
    if !(tau > F::zero()) || !(kappa > F::zero()) {
        return param("tau and kappa must be positive");
    }
    if iota(tau, kappa).abs() > tol {
        return param("careful identities need iota(tau, kappa) = 0");
    }
    let (m, divides) = snapped_floor(kappa / tau);
    let slope = tau * m - F::one();
    let out_of_range = || param("eps outside the admissible range for this case");
    match case {
        Perturbation::Plus => {
            if eps < F::zero() || eps >= tau * (m + F::one()) - kappa {
                return out_of_range();
            }
            Ok(-eps * slope)
        }
        Perturbation::MinusDivides => {
            if !divides {
                return param("case minus_divides needs tau | kappa");
            }
            if !(eps > F::zero()) || eps >= tau {
                return out_of_range();
            }
            Ok(eps)
        }
        Perturbation::MinusNotDivides => {
            if divides {
                return param("case minus_not_divides needs tau not dividing kappa");
            }
            if eps < F::zero() || eps > kappa - tau * m {
                return out_of_range();
            }
            Ok(eps * slope)
        }
    }
}
