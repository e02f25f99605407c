mod common;

use common::random::rng;
use hyqgnn::baseline::{best_split, feature_importances, fit, GbdtConfig, TreeNode};
use proptest::prelude::*;
use rand::Rng;

fn rows(n: usize, width: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| (0..width).map(|_| r.random_range(-1.0..1.0)).collect())
        .collect()
}

fn sse(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m) * (x - m)).sum()
}

/// Exhaustive search over every feature and every midpoint, scoring each
/// split by the direct drop in squared error.
fn brute_force(x: &[Vec<f64>], y: &[f64], min_leaf: usize) -> Option<(usize, f64, f64)> {
    let parent = sse(y);
    let mut best: Option<(usize, f64, f64)> = None;
    for f in 0..x[0].len() {
        let mut values: Vec<f64> = x.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let thr = 0.5 * (w[0] + w[1]);
            let (l, r): (Vec<f64>, Vec<f64>) = {
                let l: Vec<f64> = x.iter().zip(y).filter(|(r, _)| r[f] <= thr).map(|(_, &t)| t).collect();
                let r: Vec<f64> = x.iter().zip(y).filter(|(r, _)| r[f] > thr).map(|(_, &t)| t).collect();
                (l, r)
            };
            if l.len() < min_leaf || r.len() < min_leaf {
                continue;
            }
            let gain = parent - sse(&l) - sse(&r);
            if best.is_none_or(|b| gain > b.2 + 1e-12) {
                best = Some((f, thr, gain));
            }
        }
    }
    best
}

#[test]
fn split_search_matches_brute_force() {
    for seed in 0..40 {
        let x = rows(15 + seed as usize % 10, 4, seed);
        let mut r = rng(1000 + seed);
        let y: Vec<f64> = x.iter().map(|row| row[1] * row[2] + r.random_range(-0.3..0.3)).collect();
        let index: Vec<usize> = (0..x.len()).collect();
        for min_leaf in [1, 2, 4] {
            let got = best_split(&x, &y, &index, min_leaf).unwrap();
            let (f, thr, gain) = brute_force(&x, &y, min_leaf).unwrap();
            assert_eq!(got.feature, f, "seed {seed}");
            assert_eq!(got.threshold, thr);
            assert!((got.gain - gain).abs() <= 1e-9 * gain.max(1.0));
        }
    }
}

#[test]
fn perfectly_separable_labels_split_on_the_separating_feature() {
    let mut x = rows(30, 5, 3);
    let mut r = rng(4);
    let k = 2;
    for row in x.iter_mut() {
        let magnitude = 1.0 + row[k].abs();
        row[k] = if r.random_bool(0.5) { magnitude } else { -magnitude };
    }
    let y: Vec<f64> = x.iter().map(|r| if r[k] > 0.0 { 1.0 } else { 0.0 }).collect();
    let cfg = GbdtConfig {
        n_trees: 1,
        max_depth: 1,
        learning_rate: 1.0,
        ..Default::default()
    };
    let model = fit(&x, &y, &cfg).unwrap();
    match model.trees[0].nodes[0] {
        TreeNode::Split { feature, threshold, .. } => {
            assert_eq!(feature, k);
            let hi = x.iter().map(|r| r[k]).filter(|v| *v < 0.0).fold(f64::MIN, f64::max);
            let lo = x.iter().map(|r| r[k]).filter(|v| *v > 0.0).fold(f64::MAX, f64::min);
            assert_eq!(threshold, 0.5 * (hi + lo));
        }
        ref other => panic!("{other:?}"),
    }
    for (row, t) in x.iter().zip(&y) {
        assert!((model.predict(row).unwrap() - t).abs() < 1e-12);
    }
}

#[test]
fn heavy_overfit_recovers_training_targets() {
    let x = rows(20, 75, 5);
    let mut r = rng(6);
    let y: Vec<f64> = (0..20).map(|_| r.random_range(-3.0..1.0)).collect();
    let cfg = GbdtConfig {
        n_trees: 500,
        max_depth: 6,
        learning_rate: 0.3,
        ..Default::default()
    };
    let model = fit(&x, &y, &cfg).unwrap();
    for (row, t) in x.iter().zip(&y) {
        assert!((model.predict(row).unwrap() - t).abs() < 1e-3);
    }
}

#[test]
fn single_feature_dependence_dominates_importance() {
    let x = rows(200, 75, 7);
    let y: Vec<f64> = x.iter().map(|r| r[3]).collect();
    let names: Vec<String> = (0..75).map(|i| format!("c{i}")).collect();
    let ranked = feature_importances(&fit(&x, &y, &GbdtConfig::default()).unwrap(), &names);
    assert_eq!(ranked[0].0, "c3");
    assert!(ranked[0].1 > 0.9, "{}", ranked[0].1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn monotone_column_transform_leaves_predictions_unchanged(seed in any::<u64>(), col in 0usize..4) {
        let x = rows(30, 4, seed);
        let y: Vec<f64> = x.iter().map(|r| (2.0 * r[0]).sin() + r[1] * r[3]).collect();
        let transformed: Vec<Vec<f64>> = x
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r[col] = (3.0 * r[col]).exp() + 1.0;
                r
            })
            .collect();
        let cfg = GbdtConfig { n_trees: 20, ..Default::default() };
        let a = fit(&x, &y, &cfg).unwrap();
        let b = fit(&transformed, &y, &cfg).unwrap();
        for (ra, rb) in x.iter().zip(&transformed) {
            prop_assert_eq!(a.predict(ra).unwrap(), b.predict(rb).unwrap());
        }
        prop_assert_eq!(a.importances, b.importances);
    }

    #[test]
    fn constant_shift_moves_predictions(seed in any::<u64>(), c in -10.0..10.0f64) {
        let x = rows(25, 3, seed);
        let y: Vec<f64> = x.iter().map(|r| r[0] - r[1] * r[1]).collect();
        let shifted: Vec<f64> = y.iter().map(|v| v + c).collect();
        let cfg = GbdtConfig { n_trees: 15, ..Default::default() };
        let a = fit(&x, &y, &cfg).unwrap();
        let b = fit(&x, &shifted, &cfg).unwrap();
        for r in &x {
            prop_assert!((b.predict(r).unwrap() - a.predict(r).unwrap() - c).abs() < 1e-9);
        }
    }
}
