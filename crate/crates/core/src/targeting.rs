//! LASSO targeting of predictors.
//!
//! The LASSO minimises `Σ (y_i − α − β'x_i)² + λ‖β‖₁` with an unscaled
//! residual sum of squares, on predictors standardised to zero mean and unit
//! (population) standard deviation. With `n` observations the coordinate
//! update is `β̃_j = S(⟨x̃_j, r_j⟩, λ/2) / n`, the zero solution holds for
//! `λ ≥ λ_max = 2 max_j |⟨x̃_j, ỹ⟩|`, and optimality reads
//! `|2⟨x̃_j, r⟩| ≤ λ` for inactive and `2⟨x̃_j, r⟩ = λ sign(β̃_j)` for
//! active coordinates.

use serde::{Deserialize, Serialize};

use crate::datacore::Dataset;
use crate::error::{Error, Result};
use crate::forest::{fit_forest, ForestConfig, ForestModel};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoFit {
    pub intercept: f64,
    /// Coefficients on the original predictor scale.
    pub coefficients: Vec<f64>,
    /// Coefficients on the standardised scale.
    pub standardized_coefficients: Vec<f64>,
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Zero-variance columns held at zero outside the penalised problem.
    pub dropped_columns: Vec<usize>,
    /// Largest violation of the optimality conditions, on the objective's
    /// gradient scale.
    pub kkt_residual: f64,
}

impl LassoFit {
    pub fn support(&self) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }
}

/// Standardised design shared by every λ of a path.
struct Design {
    n: usize,
    p: usize,
    cols: Vec<Vec<f64>>,
    means: Vec<f64>,
    sds: Vec<f64>,
    active: Vec<usize>,
    y: Vec<f64>,
    y_mean: f64,
}

impl Design {
    fn new(data: &Dataset) -> Result<Self> {
        let n = data.n_rows();
        if n < 2 {
            return Err(Error::InvalidArgument("LASSO needs at least 2 observations".into()));
        }
        let nf = n as f64;
        let y_mean = data.response().iter().sum::<f64>() / nf;
        let y = data.response().iter().map(|v| v - y_mean).collect();
        let mut cols = Vec::with_capacity(data.n_features());
        let mut means = Vec::new();
        let mut sds = Vec::new();
        let mut active = Vec::new();
        for (j, col) in data.columns().iter().enumerate() {
            let mean = col.iter().sum::<f64>() / nf;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / nf;
            let sd = var.sqrt();
            if sd > 1e-12 * mean.abs().max(1.0) {
                cols.push(col.iter().map(|v| (v - mean) / sd).collect());
                active.push(j);
            } else {
                cols.push(Vec::new());
            }
            means.push(mean);
            sds.push(sd);
        }
        Ok(Self {
            n,
            p: data.n_features(),
            cols,
            means,
            sds,
            active,
            y,
            y_mean,
        })
    }

    fn lambda_max(&self) -> f64 {
        self.active
            .iter()
            .map(|&j| 2.0 * dot(&self.cols[j], &self.y).abs())
            .fold(0.0, f64::max)
    }

    fn residual(&self, beta: &[f64]) -> Vec<f64> {
        let mut r = self.y.clone();
        for &j in &self.active {
            if beta[j] != 0.0 {
                for (ri, xi) in r.iter_mut().zip(&self.cols[j]) {
                    *ri -= xi * beta[j];
                }
            }
        }
        r
    }

    fn kkt(&self, beta: &[f64], lambda: f64) -> f64 {
        let r = self.residual(beta);
        self.active
            .iter()
            .map(|&j| {
                let g = 2.0 * dot(&self.cols[j], &r);
                if beta[j] != 0.0 {
                    (g - lambda * beta[j].signum()).abs()
                } else {
                    (g.abs() - lambda).max(0.0)
                }
            })
            .fold(0.0, f64::max)
    }

    /// Cyclic coordinate descent from the warm start in `beta`.
    fn solve(&self, lambda: f64, beta: &mut [f64], tol: f64, max_iter: usize) -> (usize, bool) {
        let nf = self.n as f64;
        let half = 0.5 * lambda;
        let mut r = self.residual(beta);
        for iter in 1..=max_iter {
            let mut max_change: f64 = 0.0;
            for &j in &self.active {
                let x = &self.cols[j];
                let old = beta[j];
                let z = dot(x, &r) + nf * old;
                let new = soft_threshold(z, half) / nf;
                let delta = new - old;
                if delta != 0.0 {
                    for (ri, xi) in r.iter_mut().zip(x) {
                        *ri -= xi * delta;
                    }
                    beta[j] = new;
                    max_change = max_change.max(delta.abs());
                }
            }
            if max_change < tol {
                return (iter, true);
            }
            // Periodically refresh the residual to bound drift.
            if iter % 64 == 0 {
                r = self.residual(beta);
            }
        }
        (max_iter, false)
    }

    fn to_fit(&self, beta: Vec<f64>, lambda: f64, iterations: usize, converged: bool) -> LassoFit {
        let coefficients: Vec<f64> = (0..self.p)
            .map(|j| if beta[j] == 0.0 { 0.0 } else { beta[j] / self.sds[j] })
            .collect();
        let intercept = self.y_mean
            - coefficients
                .iter()
                .zip(&self.means)
                .map(|(b, m)| b * m)
                .sum::<f64>();
        let kkt_residual = self.kkt(&beta, lambda);
        LassoFit {
            intercept,
            coefficients,
            standardized_coefficients: beta,
            lambda,
            iterations,
            converged,
            dropped_columns: (0..self.p).filter(|j| !self.active.contains(j)).collect(),
            kkt_residual,
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// Fits the LASSO at a single penalty from a cold start.
pub fn lasso_fit(data: &Dataset, lambda: f64, tol: f64, max_iter: usize) -> Result<LassoFit> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda {lambda} must be >= 0")));
    }
    let design = Design::new(data)?;
    let mut beta = vec![0.0; design.p];
    let (iters, converged) = design.solve(lambda, &mut beta, tol, max_iter);
    Ok(design.to_fit(beta, lambda, iters, converged))
}

/// `λ_max` of a dataset under the unscaled objective.
pub fn lambda_max(data: &Dataset) -> Result<f64> {
    Ok(Design::new(data)?.lambda_max())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionMode {
    #[default]
    None,
    /// Originals plus squares and cubes.
    Powers23,
    /// Powers plus all pairwise interactions.
    Powers23PlusInteractions,
}

/// Interactions are only expanded up to this many original predictors.
pub const INTERACTION_MAX_P: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionMap {
    pub requested: ExpansionMode,
    pub mode: ExpansionMode,
    pub names: Vec<String>,
    /// Original predictor indices each expanded column is built from.
    pub origins: Vec<Vec<usize>>,
}

/// Builds the expanded design for targeting.
pub fn expand_features(data: &Dataset, requested: ExpansionMode) -> Result<(Dataset, ExpansionMap)> {
    let p = data.n_features();
    let mode = match requested {
        ExpansionMode::Powers23PlusInteractions if p > INTERACTION_MAX_P => ExpansionMode::Powers23,
        m => m,
    };
    let names_in = data.feature_names();
    let mut cols: Vec<Vec<f64>> = data.columns().to_vec();
    let mut names: Vec<String> = names_in.to_vec();
    let mut origins: Vec<Vec<usize>> = (0..p).map(|j| vec![j]).collect();
    if mode != ExpansionMode::None {
        for pow in [2, 3] {
            for j in 0..p {
                cols.push(data.column(j).iter().map(|v| v.powi(pow)).collect());
                names.push(format!("{}^{pow}", names_in[j]));
                origins.push(vec![j]);
            }
        }
    }
    if mode == ExpansionMode::Powers23PlusInteractions {
        for a in 0..p {
            for b in a + 1..p {
                cols.push(
                    data.column(a)
                        .iter()
                        .zip(data.column(b))
                        .map(|(u, v)| u * v)
                        .collect(),
                );
                names.push(format!("{}*{}", names_in[a], names_in[b]));
                origins.push(vec![a, b]);
            }
        }
    }
    let expanded = Dataset::from_columns(cols, names.clone(), data.response().to_vec())?;
    Ok((
        expanded,
        ExpansionMap {
            requested,
            mode,
            names,
            origins,
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSelection {
    /// Selected original predictor indices, ascending.
    pub indices: Vec<usize>,
    pub names: Vec<String>,
    pub requested: usize,
    pub lambda: f64,
    /// Largest |standardised coefficient| behind each selected index.
    pub scores: Vec<f64>,
    pub warnings: Vec<String>,
}

impl TargetSelection {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Per original predictor: max |β̃| over the expanded columns built from it.
fn original_scores(beta: &[f64], map: &ExpansionMap, p: usize) -> Vec<f64> {
    let mut scores = vec![0.0f64; p];
    for (b, origin) in beta.iter().zip(&map.origins) {
        for &j in origin {
            scores[j] = scores[j].max(b.abs());
        }
    }
    scores
}

fn support_count(beta: &[f64], map: &ExpansionMap, p: usize) -> usize {
    original_scores(beta, map, p).iter().filter(|s| **s > 0.0).count()
}

const GRID_POINTS: usize = 100;
const GRID_SPAN: f64 = 1e-4;
const BISECTION_STEPS: usize = 40;

/// Selects `sprime` original predictors by tuning the LASSO penalty.
pub fn select_targets(
    data: &Dataset,
    sprime: usize,
    requested: ExpansionMode,
) -> Result<(TargetSelection, ExpansionMap)> {
    let p = data.n_features();
    if sprime == 0 || sprime > p {
        return Err(Error::InvalidArgument(format!(
            "s' = {sprime} outside 1..={p}"
        )));
    }
    let (expanded, map) = expand_features(data, requested)?;
    let mut warnings = Vec::new();
    if map.mode != map.requested {
        warnings.push(format!(
            "interaction expansion disabled for p = {p} > {INTERACTION_MAX_P}; using powers only"
        ));
    }
    if sprime == p {
        let selection = TargetSelection {
            indices: (0..p).collect(),
            names: data.feature_names().to_vec(),
            requested: sprime,
            lambda: 0.0,
            scores: vec![f64::INFINITY; p],
            warnings,
        };
        return Ok((selection, map));
    }

    let design = Design::new(&expanded)?;
    let lmax = design.lambda_max();
    let q = design.p;
    let tol = 1e-9;

    // (lambda, count, beta) for every evaluated penalty.
    let mut evaluated: Vec<(f64, usize, Vec<f64>)> = Vec::new();
    let mut beta = vec![0.0; q];
    let mut below: Option<usize> = None;
    let mut above: Option<usize> = None;
    for k in 0..GRID_POINTS {
        let lambda = lmax * GRID_SPAN.powf(k as f64 / (GRID_POINTS - 1) as f64);
        design.solve(lambda, &mut beta, tol, DEFAULT_MAX_ITER);
        let count = support_count(&beta, &map, p);
        evaluated.push((lambda, count, beta.clone()));
        if count == sprime {
            break;
        }
        if count < sprime {
            below = Some(evaluated.len() - 1);
        } else {
            above = Some(evaluated.len() - 1);
            break;
        }
    }
    let hit = evaluated.last().is_some_and(|e| e.1 == sprime);
    if !hit {
        if let (Some(lo), Some(hi)) = (below, above) {
            let mut l_hi = evaluated[lo].0.ln();
            let mut l_lo = evaluated[hi].0.ln();
            let mut warm = evaluated[lo].2.clone();
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (l_hi + l_lo);
                let mut b = warm.clone();
                design.solve(mid.exp(), &mut b, tol, DEFAULT_MAX_ITER);
                let count = support_count(&b, &map, p);
                evaluated.push((mid.exp(), count, b.clone()));
                match count.cmp(&sprime) {
                    std::cmp::Ordering::Equal => break,
                    std::cmp::Ordering::Less => {
                        l_hi = mid;
                        warm = b;
                    }
                    std::cmp::Ordering::Greater => l_lo = mid,
                }
            }
        }
    }

    // Closest support to s', ties toward the smaller support then larger λ.
    let best = evaluated
        .iter()
        .min_by(|a, b| {
            let da = a.1.abs_diff(sprime);
            let db = b.1.abs_diff(sprime);
            da.cmp(&db)
                .then(a.1.cmp(&b.1))
                .then(b.0.total_cmp(&a.0))
        })
        .expect("grid is non-empty");
    let (lambda, count, beta) = best;
    // Polish the chosen penalty to the tight tolerance.
    let mut beta = beta.clone();
    design.solve(*lambda, &mut beta, DEFAULT_TOL, DEFAULT_MAX_ITER);
    let scores = original_scores(&beta, &map, p);
    let mut ranked: Vec<usize> = (0..p).filter(|&j| scores[j] > 0.0).collect();
    ranked.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    if ranked.len() > sprime {
        warnings.push(format!(
            "support of {} predictors at the closest penalty truncated to {sprime}",
            ranked.len()
        ));
        ranked.truncate(sprime);
    } else if ranked.len() < sprime {
        warnings.push(format!(
            "support reached only {} of the requested {sprime} predictors (closest count {count})",
            ranked.len()
        ));
    }
    ranked.sort_unstable();
    let selection = TargetSelection {
        names: ranked.iter().map(|&j| data.feature_names()[j].clone()).collect(),
        scores: ranked.iter().map(|&j| scores[j]).collect(),
        indices: ranked,
        requested: sprime,
        lambda: *lambda,
        warnings,
    };
    Ok((selection, map))
}

/// A forest fitted on the targeted columns only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetedForest {
    pub selection: TargetSelection,
    pub expansion: ExpansionMap,
    pub forest: ForestModel,
}

impl TargetedForest {
    /// Prediction from a full-width feature vector.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let n_all = self.expansion.origins.iter().flatten().copied().max().map_or(0, |m| m + 1);
        if x.len() != n_all {
            return Err(Error::DimensionMismatch {
                expected: n_all,
                got: x.len(),
            });
        }
        let projected: Vec<f64> = self.selection.indices.iter().map(|&j| x[j]).collect();
        self.forest.predict(&projected)
    }

    /// Restricts a full-width dataset to the targeted columns.
    pub fn project(&self, data: &Dataset) -> Dataset {
        data.select_columns(&self.selection.indices)
    }
}

/// Targets `sprime` predictors, then fits a forest on those original columns.
pub fn fit_trf(
    data: &Dataset,
    sprime: usize,
    expansion: ExpansionMode,
    config: &ForestConfig,
) -> Result<TargetedForest> {
    let (selection, expansion) = select_targets(data, sprime, expansion)?;
    let forest = fit_forest(&data.select_columns(&selection.indices), config)?;
    Ok(TargetedForest {
        selection,
        expansion,
        forest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::task_rng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random_data(n: usize, p: usize, seed: u64, coefs: &[f64], noise: f64) -> Dataset {
        let mut rng = task_rng(seed);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| rng.gen::<f64>()).collect()).collect();
        let y = rows
            .iter()
            .map(|r| {
                coefs.iter().zip(r).map(|(c, x)| c * x).sum::<f64>()
                    + noise * rng.sample::<f64, _>(StandardNormal)
            })
            .collect();
        Dataset::from_rows(&rows, y).unwrap()
    }

    #[test]
    fn zero_solution_at_lambda_max() {
        let d = random_data(80, 6, 1, &[3.0, -2.0, 1.0], 0.5);
        let lmax = lambda_max(&d).unwrap();
        for lambda in [lmax, 1.5 * lmax] {
            let fit = lasso_fit(&d, lambda, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            assert!(fit.coefficients.iter().all(|&b| b == 0.0));
            let ybar = d.response().iter().sum::<f64>() / 80.0;
            assert!((fit.intercept - ybar).abs() < 1e-12);
        }
        let fit = lasso_fit(&d, 0.99 * lmax, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(fit.support().len(), 1);
    }

    #[test]
    fn orthonormal_design_soft_thresholds() {
        // Columns of a Hadamard matrix: zero mean, unit population variance,
        // mutually orthogonal, so each coordinate decouples.
        let h = [
            [1.0, 1.0, 1.0],
            [-1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0],
            [-1.0, -1.0, 1.0],
            [1.0, 1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [1.0, -1.0, -1.0],
            [-1.0, -1.0, -1.0],
        ];
        let rows: Vec<Vec<f64>> = h.iter().map(|r| r.to_vec()).collect();
        let y = vec![3.1, -0.7, 2.2, 0.4, -1.3, 0.9, 1.8, -2.6];
        let d = Dataset::from_rows(&rows, y.clone()).unwrap();
        let n = 8.0;
        let ybar = y.iter().sum::<f64>() / n;
        for lambda in [0.0, 1.0, 5.0, 12.0, 40.0] {
            let fit = lasso_fit(&d, lambda, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            for j in 0..3 {
                let ols = rows.iter().zip(&y).map(|(r, yi)| r[j] * (yi - ybar)).sum::<f64>() / n;
                let expect = soft_threshold(ols, lambda / (2.0 * n));
                assert!((fit.coefficients[j] - expect).abs() < 1e-12, "lambda {lambda} j {j}");
            }
        }
    }

    #[test]
    fn zero_variance_column_dropped() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 1.0]).collect();
        let y = (0..10).map(|i| 2.0 * i as f64).collect();
        let d = Dataset::from_rows(&rows, y).unwrap();
        let fit = lasso_fit(&d, 0.0, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(fit.dropped_columns, vec![1]);
        assert_eq!(fit.coefficients[1], 0.0);
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn kkt_at_several_penalties() {
        let d = random_data(200, 15, 2, &[2.0, 0.0, -1.0, 0.5], 1.0);
        let lmax = lambda_max(&d).unwrap();
        for frac in [0.9, 0.5, 0.2, 0.05, 0.01, 0.0] {
            let fit = lasso_fit(&d, frac * lmax, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
            assert!(fit.converged);
            assert!(fit.kkt_residual <= 1e-8, "frac {frac}: {}", fit.kkt_residual);
        }
    }

    #[test]
    fn selection_short_circuits_at_p() {
        let d = random_data(50, 4, 3, &[1.0], 0.1);
        let (sel, _) = select_targets(&d, 4, ExpansionMode::None).unwrap();
        assert_eq!(sel.indices, vec![0, 1, 2, 3]);
        assert_eq!(sel.lambda, 0.0);
        assert!(select_targets(&d, 0, ExpansionMode::None).is_err());
        assert!(select_targets(&d, 5, ExpansionMode::None).is_err());
    }

    #[test]
    fn selection_hits_requested_size() {
        let d = random_data(300, 30, 4, &[3.0, -2.0, 1.5, 1.0, 0.8], 1.0);
        for s in [1, 3, 5, 10] {
            let (sel, _) = select_targets(&d, s, ExpansionMode::None).unwrap();
            assert_eq!(sel.indices.len(), s, "s' = {s}: {:?}", sel.warnings);
            assert!(sel.indices.windows(2).all(|w| w[0] < w[1]));
        }
        let (sel, _) = select_targets(&d, 3, ExpansionMode::None).unwrap();
        assert_eq!(sel.indices, vec![0, 1, 2]);
    }

    #[test]
    fn squared_term_maps_back_to_original() {
        let mut rng = task_rng(5);
        let n = 400;
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..6).map(|_| rng.gen::<f64>()).collect()).collect();
        let y = rows
            .iter()
            .map(|r| 10.0 * (r[0] - 0.5).powi(2) + 0.05 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let d = Dataset::from_rows(&rows, y).unwrap();
        let (sel, map) = select_targets(&d, 1, ExpansionMode::Powers23).unwrap();
        assert_eq!(map.mode, ExpansionMode::Powers23);
        assert_eq!(map.names.len(), 18);
        assert_eq!(sel.indices, vec![0]);
    }

    #[test]
    fn interaction_expansion_and_fallback() {
        let d = random_data(40, 4, 6, &[1.0], 0.1);
        let (_, map) = expand_features(&d, ExpansionMode::Powers23PlusInteractions).unwrap();
        assert_eq!(map.names.len(), 4 * 3 + 6);
        assert_eq!(map.origins.last().unwrap(), &vec![2, 3]);
        let wide = random_data(20, 60, 7, &[1.0], 0.1);
        let (_, map) = expand_features(&wide, ExpansionMode::Powers23PlusInteractions).unwrap();
        assert_eq!(map.mode, ExpansionMode::Powers23);
        assert_eq!(map.names.len(), 180);
    }

    #[test]
    fn selection_invariant_to_column_scaling() {
        let d = random_data(150, 12, 8, &[2.0, -1.0, 0.7], 0.8);
        let scaled_cols: Vec<Vec<f64>> = d
            .columns()
            .iter()
            .enumerate()
            .map(|(j, c)| c.iter().map(|v| v * (1.0 + j as f64 * 3.7)).collect())
            .collect();
        let scaled = Dataset::from_columns(scaled_cols, d.feature_names().to_vec(), d.response().to_vec()).unwrap();
        for s in [2, 4, 6] {
            let (a, _) = select_targets(&d, s, ExpansionMode::None).unwrap();
            let (b, _) = select_targets(&scaled, s, ExpansionMode::None).unwrap();
            assert_eq!(a.indices, b.indices);
        }
    }

    #[test]
    fn trf_with_single_target_splits_only_there() {
        let d = random_data(120, 8, 9, &[3.0], 0.2);
        let cfg = ForestConfig { n_trees: 10, seed: 1, ..Default::default() };
        let trf = fit_trf(&d, 1, ExpansionMode::None, &cfg).unwrap();
        assert_eq!(trf.selection.indices, vec![0]);
        for t in &trf.forest.trees {
            assert!(t.splits().all(|s| s.feature == 0));
        }
        let x = d.row(0);
        assert_eq!(trf.predict(&x).unwrap(), trf.forest.predict(&[x[0]]).unwrap());
    }

    #[test]
    fn trf_with_all_targets_equals_rf() {
        let d = random_data(80, 6, 10, &[1.0, 1.0], 0.5);
        let cfg = ForestConfig { n_trees: 15, seed: 3, ..Default::default() };
        let trf = fit_trf(&d, 6, ExpansionMode::None, &cfg).unwrap();
        let rf = fit_forest(&d, &cfg).unwrap();
        assert_eq!(trf.forest, rf);
    }
}
