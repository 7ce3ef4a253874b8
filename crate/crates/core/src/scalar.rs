//! Scalar layer shared by the probability recurrences and the analytic bounds.
//!
//! [`ProbScalar`] abstracts over the three numeric backends the exact
//! first-moment engine runs on: exact rationals, plain floats, and the
//! log-domain [`LogValue`]. Analytic code (threshold functions, saddle points,
//! rate functions) is written against `num_traits::Float` directly.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{param, Result};

/// Below this distance from one, a log-domain complement is considered
/// too inaccurate and callers must fall back to exact arithmetic.
pub const COMPLEMENT_GUARD: f64 = 1e-12;

/// Arithmetic needed by the component-order recurrences and tail sums.
///
/// Values are nonnegative reals. `minus` saturates at zero.
pub trait ProbScalar: Clone + Debug + Zero + One {
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn pow(&self, exp: u64) -> Self;
    /// `1 - self`, or `None` when the backend cannot represent it accurately.
    fn complement(&self) -> Option<Self>;
    fn from_count(count: &BigUint) -> Self;
    /// Natural logarithm; `-inf` for zero.
    fn ln(&self) -> f64;
    fn approx_f64(&self) -> f64;
}

macro_rules! float_prob_scalar {
    ($t:ty) => {
        impl ProbScalar for $t {
            fn plus(&self, rhs: &Self) -> Self {
                self + rhs
            }
            fn minus(&self, rhs: &Self) -> Self {
                (self - rhs).max(0.0)
            }
            fn times(&self, rhs: &Self) -> Self {
                self * rhs
            }
            fn pow(&self, exp: u64) -> Self {
                self.powf(exp as $t)
            }
            fn complement(&self) -> Option<Self> {
                Some(1.0 - self)
            }
            fn from_count(count: &BigUint) -> Self {
                count.to_f64().map(|x| x as $t).unwrap_or(<$t>::INFINITY)
            }
            fn ln(&self) -> f64 {
                (*self as f64).ln()
            }
            fn approx_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_prob_scalar!(f32);
float_prob_scalar!(f64);

impl ProbScalar for BigRational {
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn minus(&self, rhs: &Self) -> Self {
        let d = self - rhs;
        if d.is_negative() {
            Zero::zero()
        } else {
            d
        }
    }
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn pow(&self, exp: u64) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }
    fn complement(&self) -> Option<Self> {
        Some(BigRational::one() - self)
    }
    fn from_count(count: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(count.clone()))
    }
    fn ln(&self) -> f64 {
        ln_rational(self)
    }
    fn approx_f64(&self) -> f64 {
        ProbScalar::ln(self).exp()
    }
}

/// A nonnegative real stored by its natural logarithm.
///
/// Zero is carried by a flag rather than `-inf` so comparisons and
/// serialisation stay total.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue<F> {
    ln: F,
    zero: bool,
}

impl<F: Float> LogValue<F> {
    pub fn zero() -> Self {
        LogValue { ln: F::neg_infinity(), zero: true }
    }

    pub fn one() -> Self {
        Self::from_ln(F::zero())
    }

    /// Wraps a logarithm. `-inf` maps to zero.
    pub fn from_ln(ln: F) -> Self {
        if ln == F::neg_infinity() {
            Self::zero()
        } else {
            LogValue { ln, zero: false }
        }
    }

    pub fn from_value(x: F) -> Self {
        if x <= F::zero() {
            Self::zero()
        } else {
            Self::from_ln(x.ln())
        }
    }

    pub fn ln(&self) -> F {
        if self.zero {
            F::neg_infinity()
        } else {
            self.ln
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn value(&self) -> F {
        if self.zero {
            F::zero()
        } else {
            self.ln.exp()
        }
    }

    fn log_add(&self, rhs: &Self) -> Self {
        match (self.zero, rhs.zero) {
            (true, _) => *rhs,
            (_, true) => *self,
            _ => {
                let (hi, lo) = if self.ln >= rhs.ln { (self.ln, rhs.ln) } else { (rhs.ln, self.ln) };
                Self::from_ln(hi + (lo - hi).exp().ln_1p())
            }
        }
    }
}

impl<F: Float> PartialOrd for LogValue<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.zero, other.zero) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            _ => self.ln.partial_cmp(&other.ln),
        }
    }
}

impl<F: Float> std::ops::Add for LogValue<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.log_add(&rhs)
    }
}

impl<F: Float> std::ops::Mul for LogValue<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.zero || rhs.zero {
            Self::zero()
        } else {
            Self::from_ln(self.ln + rhs.ln)
        }
    }
}

impl<F: Float> Zero for LogValue<F> {
    fn zero() -> Self {
        LogValue::zero()
    }
    fn is_zero(&self) -> bool {
        self.zero
    }
}

impl<F: Float> One for LogValue<F> {
    fn one() -> Self {
        LogValue::one()
    }
}

impl<F: Float + FromPrimitive + Debug> ProbScalar for LogValue<F> {
    fn plus(&self, rhs: &Self) -> Self {
        self.log_add(rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        if rhs.zero {
            return *self;
        }
        if self.zero || rhs.ln >= self.ln {
            return Self::zero();
        }
        let diff = rhs.ln - self.ln;
        Self::from_ln(self.ln + (-diff.exp_m1()).ln())
    }
    fn times(&self, rhs: &Self) -> Self {
        *self * *rhs
    }
    fn pow(&self, exp: u64) -> Self {
        if exp == 0 {
            return Self::one();
        }
        if self.zero {
            return Self::zero();
        }
        Self::from_ln(self.ln * F::from_u64(exp).expect("exponent fits the float type"))
    }
    fn complement(&self) -> Option<Self> {
        if self.zero {
            return Some(Self::one());
        }
        let guard = F::from_f64(COMPLEMENT_GUARD).expect("guard fits").neg().ln_1p();
        if self.ln > guard {
            return None;
        }
        Some(Self::from_ln((-self.ln.exp_m1()).ln()))
    }
    fn from_count(count: &BigUint) -> Self {
        if Zero::is_zero(count) {
            Self::zero()
        } else {
            Self::from_ln(F::from_f64(ln_biguint(count)).expect("log fits the float type"))
        }
    }
    fn ln(&self) -> f64 {
        LogValue::ln(self).to_f64().unwrap_or(f64::NAN)
    }
    fn approx_f64(&self) -> f64 {
        self.value().to_f64().unwrap_or(f64::NAN)
    }
}

/// Natural log of a big unsigned integer; `-inf` for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return x.to_f64().expect("fits below 2^1000").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a nonnegative rational; `-inf` for zero.
pub fn ln_rational(x: &BigRational) -> f64 {
    assert!(!x.is_negative(), "logarithm of a negative rational");
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    ln_biguint(num) - ln_biguint(den)
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Rows `C(m, j)` for `m < rows`, `j < cols`, by Pascal's rule.
pub fn pascal_table(rows: usize, cols: usize) -> Vec<Vec<BigUint>> {
    let mut table: Vec<Vec<BigUint>> = Vec::with_capacity(rows);
    for m in 0..rows {
        let mut row = vec![BigUint::zero(); cols];
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = if j == 0 {
                BigUint::one()
            } else if j > m {
                BigUint::zero()
            } else {
                &table[m - 1][j - 1] + &table[m - 1][j]
            };
        }
        table.push(row);
    }
    table
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.25` into an exact
/// rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a.trim().parse().map_err(|_| bad_rational(text))?;
        let den: BigInt = b.trim().parse().map_err(|_| bad_rational(text))?;
        if den.is_zero() {
            return param(format!("zero denominator in '{text}'"));
        }
        return Ok(BigRational::new(num, den));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad_rational(text));
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.bytes().all(|c| c.is_ascii_digit()) {
        return Err(bad_rational(text));
    }
    let num: BigInt = digits.parse().map_err(|_| bad_rational(text))?;
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

fn bad_rational(text: &str) -> crate::Error {
    crate::Error::Parameter(format!("cannot parse '{text}' as a rational"))
}

/// Checks `0 <= p <= 1` for any float-like value.
pub fn check_unit_interval<F: Float>(p: F, what: &str) -> Result<()> {
    if p.is_nan() || p < F::zero() || p > F::one() {
        return param(format!("{what} must lie in [0, 1]"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn log_value_arithmetic_matches_linear() {
        let a = LogValue::from_value(0.3f64);
        let b = LogValue::from_value(0.2f64);
        assert!((ProbScalar::plus(&a, &b).value() - 0.5).abs() < 1e-15);
        assert!((ProbScalar::minus(&a, &b).value() - 0.1).abs() < 1e-15);
        assert!((ProbScalar::times(&a, &b).value() - 0.06).abs() < 1e-16);
        assert!((ProbScalar::pow(&a, 3).value() - 0.027).abs() < 1e-16);
        assert!(ProbScalar::minus(&b, &a).is_zero());
        assert!((a.complement().unwrap().value() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn log_complement_refuses_near_one() {
        let near_one = LogValue::from_ln(-1e-14f64);
        assert!(near_one.complement().is_none());
        let fine = LogValue::from_ln(-1e-9f64);
        let c = fine.complement().unwrap();
        assert!((c.value() / 1e-9 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_is_absorbing() {
        let z = LogValue::<f64>::zero();
        let x = LogValue::from_value(0.4);
        assert!(ProbScalar::times(&z, &x).is_zero());
        assert_eq!(ProbScalar::plus(&z, &x), x);
        assert!(z < x);
        assert_eq!(ProbScalar::pow(&z, 0), LogValue::one());
    }

    #[test]
    fn big_logs() {
        let x = num_traits::pow(BigUint::from(3u32), 2000);
        let expected = 2000.0 * 3f64.ln();
        assert!((ln_biguint(&x) - expected).abs() / expected < 1e-14);
        assert!((ln_rational(&rat(1, 8)) + 8f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn binomials_and_factorials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(factorial(6), BigUint::from(720u32));
        let p = pascal_table(8, 8);
        for m in 0..8u64 {
            for j in 0..8u64 {
                assert_eq!(p[m as usize][j as usize], binomial(m, j));
            }
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-0.1").unwrap(), rat(-1, 10));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1e-3").is_err());
    }
}
