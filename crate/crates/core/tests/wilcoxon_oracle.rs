mod common;

use common::oracle_wilcoxon;
use helix_core::wilcoxon::{wilcoxon_signed_rank, wilcoxon_signed_rank_with, ZeroMethod};
use proptest::prelude::*;

const X: [i64; 10] = [125, 115, 130, 140, 140, 115, 140, 125, 140, 135];
const Y: [i64; 10] = [110, 122, 125, 120, 140, 124, 123, 137, 135, 145];

#[test]
fn ten_pair_fixture_matches_enumeration() {
    let t = wilcoxon_signed_rank(&X, &Y).unwrap();
    let (w, p) = oracle_wilcoxon(&X, &Y);
    assert_eq!(w, 9.0);
    assert!((t.statistic - w).abs() < 1e-9);
    assert!((t.p_value - p).abs() < 1e-9);
    // 324 of the 512 sign assignments with mid-ranks are at least as extreme
    assert!((t.p_value - 324.0 / 512.0).abs() < 1e-12);
    assert_eq!(t.n_effective, 9);
    assert!(t.exact);
}

#[test]
fn identical_samples() {
    let t = wilcoxon_signed_rank(&X, &X).unwrap();
    assert_eq!(t.p_value, 1.0);
    assert_eq!(t.statistic, 0.0);
}

#[test]
fn normal_approximation_matches_reference() {
    let x = [
        8, 9, 0, 9, 5, 6, 7, 3, 11, 0, 3, 4, 6, 4, 1, 0, 0, 0, 1, 11, 2, 7, 9, 2, 3, 5, 3, 11, 2,
        10, 9, 10, 1, 4, 7, 5, 7, 8, 7, 0,
    ];
    let y = [
        9, 5, 9, 2, 3, 8, 1, 0, 3, 6, 1, 8, 3, 2, 5, 8, 8, 8, 3, 0, 7, 7, 7, 0, 0, 5, 3, 4, 9, 2,
        5, 3, 2, 8, 1, 3, 1, 1, 2, 6,
    ];
    let t = wilcoxon_signed_rank(&x, &y).unwrap();
    assert!(!t.exact);
    // scipy.stats.wilcoxon(x, y, correction=False, method="approx")
    assert_eq!(t.w_plus.min(t.w_minus), 292.5);
    assert!((t.p_value - 0.372_258_346_581_612_05).abs() < 1e-12);
}

#[test]
fn pratt_keeps_zero_ranks() {
    let t = wilcoxon_signed_rank_with(&X, &Y, ZeroMethod::Pratt).unwrap();
    assert_eq!((t.w_plus, t.w_minus), (32.0, 22.0));
}

proptest! {
    #[test]
    fn exact_test_matches_enumeration(pairs in prop::collection::vec((0i64..6, 0i64..6), 1..14)) {
        let x: Vec<i64> = pairs.iter().map(|p| p.0).collect();
        let y: Vec<i64> = pairs.iter().map(|p| p.1).collect();
        let (w, p) = oracle_wilcoxon(&x, &y);
        let t = wilcoxon_signed_rank(&x, &y).unwrap();
        prop_assert!((t.statistic - w).abs() < 1e-9);
        prop_assert!((t.p_value - p).abs() < 1e-9, "{} vs {}", t.p_value, p);
        prop_assert!((t.w_plus - t.w_minus - t.statistic).abs() < 1e-9);
    }

    #[test]
    fn swapping_samples_negates_statistic(pairs in prop::collection::vec((0i64..20, 0i64..20), 1..60)) {
        let x: Vec<i64> = pairs.iter().map(|p| p.0).collect();
        let y: Vec<i64> = pairs.iter().map(|p| p.1).collect();
        let a = wilcoxon_signed_rank(&x, &y).unwrap();
        let b = wilcoxon_signed_rank(&y, &x).unwrap();
        prop_assert_eq!(a.statistic, -b.statistic);
        prop_assert!((a.p_value - b.p_value).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a.p_value));
    }
}
