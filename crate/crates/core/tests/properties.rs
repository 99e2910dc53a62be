//! Cross-module properties on randomly generated inputs.

use proptest::prelude::*;

use trf_core::cart::{best_split, grow_tree, TreeConfig};
use trf_core::datacore::{expanding_windows, Dataset};
use trf_core::evallab::{mse_ratio, run_forecast_experiment, Method};
use trf_core::forest::{fit_forest, ForestConfig};
use trf_core::targeting::{lambda_max, lasso_fit, select_targets, ExpansionMode, DEFAULT_MAX_ITER, DEFAULT_TOL};
use trf_core::theory::upper_bound_split_prob;

/// `n × p` uniforms from a flat vector plus a response mixing the first two columns.
fn dataset(values: &[f64], noise: &[f64], p: usize) -> Dataset {
    let n = noise.len();
    let cols: Vec<Vec<f64>> = (0..p).map(|j| (0..n).map(|i| values[i * p + j]).collect()).collect();
    let y = (0..n).map(|i| 3.0 * cols[0][i] - 2.0 * cols[1][i] + noise[i]).collect();
    let names = (1..=p).map(|j| format!("x{j}")).collect();
    Dataset::from_columns(cols, names, y).unwrap()
}

fn data_strategy() -> impl Strategy<Value = Dataset> {
    (3usize..7, 20usize..60).prop_flat_map(|(p, n)| {
        (
            prop::collection::vec(0.0f64..1.0, n * p),
            prop::collection::vec(-0.5f64..0.5, n),
            Just(p),
        )
            .prop_map(|(v, e, p)| dataset(&v, &e, p))
    })
}

fn sse(d: &Dataset, rows: &[usize]) -> f64 {
    let y = d.response();
    let m = rows.iter().map(|&i| y[i]).sum::<f64>() / rows.len() as f64;
    rows.iter().map(|&i| (y[i] - m).powi(2)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn root_split_sse_additivity(d in data_strategy()) {
        let rows: Vec<usize> = (0..d.n_rows()).collect();
        let dirs: Vec<usize> = (0..d.n_features()).collect();
        if let Some(s) = best_split(&d, &rows, &dirs, rows.len(), 1) {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| d.value(i, s.feature) <= s.threshold);
            let lhs = sse(&d, &rows);
            let rhs = sse(&d, &l) + sse(&d, &r) + rows.len() as f64 * s.impurity_decrease;
            prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.max(1e-12));
        }
    }

    #[test]
    fn trees_are_deterministic(d in data_strategy(), seed in any::<u64>()) {
        let rows: Vec<usize> = (0..d.n_rows()).collect();
        let cfg = TreeConfig { max_depth: Some(4), ..TreeConfig::default() };
        prop_assert_eq!(grow_tree(&d, &rows, &cfg, seed).unwrap(), grow_tree(&d, &rows, &cfg, seed).unwrap());
    }

    #[test]
    fn forest_prediction_is_mean_of_trees(d in data_strategy(), seed in any::<u64>()) {
        let cfg = ForestConfig { n_trees: 15, seed, ..ForestConfig::default() };
        let f = fit_forest(&d, &cfg).unwrap();
        let per_tree = f.tree_predictions(&d).unwrap();
        let pred = f.predict_dataset(&d).unwrap();
        for (row, p) in per_tree.iter().zip(&pred) {
            let mean = row.iter().sum::<f64>() / row.len() as f64;
            prop_assert!((mean - p).abs() <= 1e-12 * p.abs().max(1.0));
        }
    }

    #[test]
    fn lasso_kkt_holds(d in data_strategy(), frac in 0.0f64..1.2) {
        let lambda = frac * lambda_max(&d).unwrap();
        let fit = lasso_fit(&d, lambda, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        prop_assert!(fit.converged);
        prop_assert!(fit.kkt_residual <= 1e-8, "kkt {}", fit.kkt_residual);
        if frac >= 1.0 {
            prop_assert!(fit.coefficients.iter().all(|b| *b == 0.0));
        }
    }

    #[test]
    fn selection_ignores_positive_rescaling(d in data_strategy(), scale in prop::collection::vec(0.01f64..100.0, 6)) {
        let p = d.n_features();
        let scaled_cols: Vec<Vec<f64>> =
            (0..p).map(|j| d.column(j).iter().map(|v| v * scale[j]).collect()).collect();
        let scaled = Dataset::from_columns(scaled_cols, d.feature_names().to_vec(), d.response().to_vec()).unwrap();
        let (a, _) = select_targets(&d, 2, ExpansionMode::None).unwrap();
        let (b, _) = select_targets(&scaled, 2, ExpansionMode::None).unwrap();
        prop_assert_eq!(a.indices, b.indices);
    }

    #[test]
    fn split_bound_monotone(a in 2u64..60, s in 0u64..60, m in 1u64..60) {
        prop_assume!(s <= a && m < a);
        let v = upper_bound_split_prob(a, s, m).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!(upper_bound_split_prob(a, s, m + 1).unwrap() >= v - 1e-15);
        if s < a {
            prop_assert!(upper_bound_split_prob(a, s + 1, m).unwrap() >= v - 1e-15);
        }
        prop_assert!(upper_bound_split_prob(a + 1, s, m).unwrap() <= v + 1e-15);
    }
}

#[test]
fn forecasts_are_reproducible_and_self_ratio_is_one() {
    let n = 40;
    let values: Vec<f64> = (0..n * 4).map(|k| ((k * 37 + 11) % 101) as f64 / 101.0).collect();
    let noise: Vec<f64> = (0..n).map(|k| ((k * 13) % 7) as f64 / 70.0).collect();
    let d = dataset(&values, &noise, 4);
    let plan = expanding_windows(n, 30, 2).unwrap();
    let methods = [Method::Rf, Method::Trf { sprime: 2, expansion: ExpansionMode::None }];
    let cfg = ForestConfig { n_trees: 25, seed: 9, ..ForestConfig::default() };
    let a = run_forecast_experiment(&d, &plan, &methods, &cfg).unwrap();
    let b = run_forecast_experiment(&d, &plan, &methods, &cfg).unwrap();
    assert_eq!(a, b);
    let mask: Vec<bool> = (0..a.n_windows()).map(|w| w % 2 == 0).collect();
    assert_eq!(mse_ratio(&a, "trf:2", "trf:2", None).unwrap(), 1.0);
    assert_eq!(mse_ratio(&a, "rf", "rf", Some(&mask)).unwrap(), 1.0);
}
