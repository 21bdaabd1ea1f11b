//! Conditional selection probabilities, the empirical quantile, trimmed means
//! and Frechet intervals.
//!
//! Trimming follows the literal indicator definitions: the lower tail keeps
//! `v <= q(p)`, the upper tail keeps `v > q(1 - p)`. Under ties the retained
//! mass can therefore differ from `p`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::data::PanelDataset;
use crate::error::{Cell, Error, Result};
use crate::scalar::{max_of, min_of, Scalar};

/// A sample proportion with its counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbEstimate<T> {
    pub value: T,
    pub numerator_count: usize,
    pub denominator_count: usize,
}

impl<T: Scalar> ProbEstimate<T> {
    pub fn from_counts(numerator: usize, denominator: usize) -> Self {
        assert!(denominator > 0 && numerator <= denominator);
        ProbEstimate {
            value: T::from_count(numerator) / T::from_count(denominator),
            numerator_count: numerator,
            denominator_count: denominator,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrechetInterval<T> {
    pub lo: T,
    pub hi: T,
}

/// P̂[S1 = 1 | D = d, S0 = s0].
pub fn cond_prob_s1<T: Scalar>(
    data: &PanelDataset<T>,
    d: bool,
    s0: bool,
) -> Result<ProbEstimate<T>> {
    let den = data.count(Some(d), Some(s0), None);
    if den == 0 {
        return Err(Error::EmptyCell(Cell::panel(
            Some(d as u8),
            Some(s0 as u8),
            None,
        )));
    }
    Ok(ProbEstimate::from_counts(
        data.count(Some(d), Some(s0), Some(true)),
        den,
    ))
}

fn check_unit<T: Scalar>(name: &'static str, x: T) -> Result<()> {
    if x < T::zero() || x > T::one() {
        return Err(Error::OutOfRange {
            name,
            value: x.as_f64(),
        });
    }
    Ok(())
}

/// Sharp bounds on P[A ∩ B] from the marginals.
pub fn frechet_interval<T: Scalar>(p_a: T, p_b: T) -> Result<FrechetInterval<T>> {
    check_unit("pA", p_a)?;
    check_unit("pB", p_b)?;
    Ok(FrechetInterval {
        lo: max_of(p_a + p_b - T::one(), T::zero()),
        hi: min_of(p_a, p_b),
    })
}

fn cmp<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Smallest sample value whose empirical CDF is at least `q`.
///
/// # Panics
/// Panics on an empty sample.
pub fn empirical_quantile<T: Scalar>(values: &[T], q: T) -> Result<T> {
    assert!(!values.is_empty(), "quantile of an empty sample");
    if !(q > T::zero() && q <= T::one()) {
        return Err(Error::QuantileLevel(q.as_f64()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(cmp);
    Ok(quantile_sorted(&sorted, q))
}

fn quantile_sorted<T: Scalar>(sorted: &[T], q: T) -> T {
    let n = T::from_count(sorted.len());
    first_order_statistic(sorted, |k| T::from_count(k) / n >= q)
}

/// The `(1 - p)`-quantile, found through the equivalent test
/// `(n - k)/n <= p` so that `1 - p` is never rounded.
fn upper_threshold_sorted<T: Scalar>(sorted: &[T], p: T) -> T {
    let len = sorted.len();
    let n = T::from_count(len);
    first_order_statistic(sorted, |k| T::from_count(len - k) / n <= p)
}

/// Binary search on the count: the CDF at the k-th order statistic (with ties
/// collapsed to the last copy) is k/n, and `reached` is monotone in k.
fn first_order_statistic<T: Scalar>(sorted: &[T], reached: impl Fn(usize) -> bool) -> T {
    let (mut lo, mut hi) = (1usize, sorted.len());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if reached(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    sorted[lo - 1]
}

fn mean_where<T: Scalar>(values: &[T], keep: impl Fn(T) -> bool) -> Option<T> {
    let mut sum = T::zero();
    let mut k = 0usize;
    for &v in values {
        if keep(v) {
            sum = sum + v;
            k += 1;
        }
    }
    (k > 0).then(|| sum / T::from_count(k))
}

/// Arithmetic mean in data order.
///
/// # Panics
/// Panics on an empty sample.
pub fn mean<T: Scalar>(values: &[T]) -> T {
    mean_where(values, |_| true).expect("mean of an empty sample")
}

/// Sample minimum.
///
/// # Panics
/// Panics on an empty sample.
pub fn minimum<T: Scalar>(values: &[T]) -> T {
    values
        .iter()
        .copied()
        .reduce(min_of)
        .expect("minimum of an empty sample")
}

fn check_share<T: Scalar>(p: T) -> Result<()> {
    if p <= T::zero() {
        return Err(Error::ZeroShare);
    }
    if p > T::one() {
        return Err(Error::OutOfRange {
            name: "p",
            value: p.as_f64(),
        });
    }
    Ok(())
}

/// Mean of the values at or below the `p`-quantile.
pub fn trimmed_mean_lower<T: Scalar>(values: &[T], p: T) -> Result<T> {
    check_share(p)?;
    let thr = empirical_quantile(values, p)?;
    Ok(mean_where(values, |v| v <= thr).expect("lower tail contains the quantile"))
}

/// Mean of the values strictly above the `(1 - p)`-quantile; `p = 1` gives
/// the full mean. If ties at the sample maximum leave nothing strictly above
/// the threshold, the threshold (the maximum) is returned.
pub fn trimmed_mean_upper<T: Scalar>(values: &[T], p: T) -> Result<T> {
    check_share(p)?;
    if p == T::one() {
        return Ok(mean(values));
    }
    assert!(!values.is_empty(), "trimmed mean of an empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(cmp);
    let thr = upper_threshold_sorted(&sorted, p);
    Ok(mean_where(values, |v| v > thr).unwrap_or(thr))
}
