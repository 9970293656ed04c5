use dp_analysis::oracle::{format_rational, parse_rational};
use dp_analysis::{
    distinct_value_enumerate, distinct_value_monte_carlo, distinct_value_probability, product_lower_bound,
    AnalysisError,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Independent oracle: the chance that the j-th value avoids the j-1 before
/// it is (m - j + 1) / m, multiplied out in machine integers.
fn sequential_oracle(m: u64, k: u64) -> BigRational {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for j in 0..k {
        num *= (m - j) as u128;
        den *= m as u128;
    }
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[test]
fn distinct_value_examples() {
    assert_eq!(distinct_value_probability(2, 2).unwrap(), q(1, 2));
    assert_eq!(distinct_value_probability(3, 3).unwrap(), q(2, 9));
    assert_eq!(distinct_value_probability(5, 1).unwrap(), q(1, 1));
    assert_eq!(distinct_value_enumerate(3, 3).unwrap(), q(6, 27));
    assert_eq!(distinct_value_enumerate(4, 2).unwrap(), q(12, 16));
    assert_eq!(distinct_value_enumerate(2, 3).unwrap(), q(0, 1));
}

#[test]
fn distinct_value_rejects_bad_domains() {
    assert!(matches!(distinct_value_probability(2, 3), Err(AnalysisError::Domain(_))));
    assert!(matches!(distinct_value_probability(3, 0), Err(AnalysisError::Domain(_))));
    assert!(matches!(distinct_value_enumerate(10, 8), Err(AnalysisError::CapExceeded(_))));
    assert!(distinct_value_enumerate(10, 7).is_ok());
}

#[test]
fn formula_matches_both_oracles_up_to_six() {
    for m in 1..=6 {
        for k in 1..=m {
            let f = distinct_value_probability(m, k).unwrap();
            assert_eq!(f, distinct_value_enumerate(m, k).unwrap(), "m={m} k={k}");
            assert_eq!(f, sequential_oracle(m, k), "m={m} k={k}");
        }
    }
}

#[test]
fn monte_carlo_agrees_within_three_sigma() {
    for (m, k) in [(3u32, 3usize), (5, 4), (8, 8)] {
        let p = dp_analysis::oracle::to_f64(&distinct_value_probability(m as u64, k as u64).unwrap());
        let s = distinct_value_monte_carlo(m, k, 100_000, 7);
        assert!(s.sigmas_from(p) <= 3.0, "m={m} k={k}: {} vs {p}", s.estimate());
    }
}

#[test]
fn product_bound_examples() {
    let half = q(1, 2);
    let b1 = product_lower_bound(&half, 1).unwrap();
    assert_eq!((b1.product.clone(), b1.bound.clone()), (q(1, 2), q(1, 2)));
    let b3 = product_lower_bound(&half, 3).unwrap();
    assert_eq!(b3.product, q(21, 64));
    assert_eq!(b3.bound, q(20, 64));
    assert!(b3.holds());
    let b30 = product_lower_bound(&half, 30).unwrap();
    assert_eq!(b30.limit_bound, q(1, 4));
    assert!(b30.product >= q(1, 4));
}

#[test]
fn product_bound_rejects_bad_p() {
    for p in [q(0, 1), q(3, 5), q(-1, 4)] {
        assert!(matches!(product_lower_bound(&p, 3), Err(AnalysisError::Domain(_))));
    }
    assert!(product_lower_bound(&q(1, 2), 0).is_err());
}

#[test]
fn rationals_parse_and_print() {
    assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
    assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
    assert_eq!(parse_rational(" 2 ").unwrap(), q(2, 1));
    assert!(parse_rational("1/0").is_err());
    assert!(parse_rational("x").is_err());
    assert_eq!(format_rational(&q(6, 27)), "2/9");
    assert_eq!(format_rational(&q(4, 2)), "2");
}

proptest! {
    #[test]
    fn enumeration_equals_formula(m in 1u64..=9, k in 1u64..=7) {
        prop_assume!((m as u128).pow(k as u32) <= 200_000);
        let e = distinct_value_enumerate(m, k).unwrap();
        if k <= m {
            prop_assert_eq!(e, distinct_value_probability(m, k).unwrap());
        } else {
            prop_assert_eq!(e, q(0, 1));
        }
    }

    #[test]
    fn product_dominates_bound_and_decreases_to_the_limit(num in 1i64..=50, m in 1u32..=30) {
        let p = q(num, 100);
        let b = product_lower_bound(&p, m).unwrap();
        prop_assert!(b.holds());
        let next = product_lower_bound(&p, m + 1).unwrap();
        // Both sides shrink with m and stay above 1 − p − p².
        prop_assert!(next.product <= b.product);
        prop_assert!(next.bound <= b.bound);
        prop_assert!(next.bound > b.limit_bound);
    }
}
