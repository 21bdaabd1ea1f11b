use num_rational::Ratio;
use proptest::prelude::*;
use selbounds::estimators::{
    cond_prob_s1, empirical_quantile, frechet_interval, mean, trimmed_mean_lower,
    trimmed_mean_upper,
};
use selbounds::Error;

mod common;

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        prop_oneof![(-50i32..50).prop_map(f64::from), -1e3..1e3f64],
        1..40,
    )
}

fn share() -> impl Strategy<Value = f64> {
    (1u32..=1000).prop_map(|k| k as f64 / 1000.0)
}

#[test]
fn conditional_selection_probabilities() {
    let p = cond_prob_s1(&common::training_counts(), true, true).unwrap();
    assert_eq!((p.numerator_count, p.denominator_count), (102, 160));
    assert_eq!(p.value, 0.6375);
    let p = cond_prob_s1(&common::wfh_counts(), false, true).unwrap();
    assert_eq!(p.value, 77.0 / 118.0);
    assert!(matches!(
        cond_prob_s1(&common::wfh_counts(), false, false),
        Err(Error::EmptyCell(_))
    ));
}

#[test]
fn rational_quantile_and_tails_are_exact() {
    let r = |a, b| Ratio::new(a, b);
    let v: Vec<Ratio<i64>> = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10].map(|k| r(k, 3)).to_vec();
    assert_eq!(empirical_quantile(&v, r(3, 10)).unwrap(), r(1, 1));
    assert_eq!(trimmed_mean_lower(&v, r(3, 10)).unwrap(), r(2, 3));
    assert_eq!(trimmed_mean_upper(&v, r(3, 10)).unwrap(), r(3, 1));
}

proptest! {
    #[test]
    fn quantile_contract(v in sample(), q in share()) {
        let x = empirical_quantile(&v, q).unwrap();
        let n = v.len() as f64;
        let cdf = |t: f64| v.iter().filter(|&&y| y <= t).count() as f64 / n;
        prop_assert!(v.contains(&x));
        prop_assert!(cdf(x) >= q);
        if let Some(prev) = v.iter().copied().filter(|&y| y < x).reduce(f64::max) {
            prop_assert!(cdf(prev) < q);
        }
    }

    #[test]
    fn trimmed_means_bracket_the_mean(v in sample(), p in share()) {
        let m = mean(&v);
        let tol = 1e-9 * (1.0 + m.abs());
        prop_assert!(trimmed_mean_lower(&v, p).unwrap() <= m + tol);
        prop_assert!(trimmed_mean_upper(&v, p).unwrap() >= m - tol);
    }

    #[test]
    fn trimmed_means_monotone_in_share(v in sample(), a in share(), b in share()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let tol = 1e-9 * (1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        prop_assert!(trimmed_mean_lower(&v, lo).unwrap() <= trimmed_mean_lower(&v, hi).unwrap() + tol);
        prop_assert!(trimmed_mean_upper(&v, lo).unwrap() + tol >= trimmed_mean_upper(&v, hi).unwrap());
    }

    #[test]
    fn frechet_interval_is_ordered(a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let f = frechet_interval(a, b).unwrap();
        prop_assert!(0.0 <= f.lo && f.lo <= f.hi && f.hi <= 1.0);
    }
}
