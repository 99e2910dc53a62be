//! Forecast experiments, accuracy comparisons and tree diagnostics.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::datacore::{Dataset, WindowPlan};
use crate::error::{Error, Result};
use crate::forest::{fit_forest, ForestConfig, ForestModel};
use crate::rng::derive_seed;
use crate::targeting::{fit_trf, ExpansionMode, TargetedForest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Rf,
    Trf { sprime: usize, expansion: ExpansionMode },
}

impl fmt::Display for Method {
    /// `rf`, `trf:10` or `trf:10:powers23`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Rf => write!(f, "rf"),
            Method::Trf { sprime, expansion: ExpansionMode::None } => write!(f, "trf:{sprime}"),
            Method::Trf { sprime, expansion: ExpansionMode::Powers23 } => write!(f, "trf:{sprime}:powers23"),
            Method::Trf { sprime, expansion: ExpansionMode::Powers23PlusInteractions } => {
                write!(f, "trf:{sprime}:interactions")
            }
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::InvalidArgument(format!("method `{s}`; expected rf, trf:<s'> or trf:<s'>:<expansion>"));
        match parts.as_slice() {
            ["rf"] => Ok(Method::Rf),
            ["trf", k, rest @ ..] if rest.len() <= 1 => {
                let sprime = k.parse().map_err(|_| bad())?;
                let expansion = match rest.first().copied() {
                    None | Some("none") => ExpansionMode::None,
                    Some("powers23") => ExpansionMode::Powers23,
                    Some("interactions") | Some("powers23_plus_interactions") => {
                        ExpansionMode::Powers23PlusInteractions
                    }
                    Some(_) => return Err(bad()),
                };
                Ok(Method::Trf { sprime, expansion })
            }
            _ => Err(bad()),
        }
    }
}

impl Method {
    pub fn sprime(&self, p: usize) -> usize {
        match self {
            Method::Rf => p,
            Method::Trf { sprime, .. } => *sprime,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FittedModel {
    Rf(ForestModel),
    Trf(TargetedForest),
}

impl FittedModel {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        match self {
            FittedModel::Rf(f) => f.predict(x),
            FittedModel::Trf(t) => t.predict(x),
        }
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<f64>> {
        match self {
            FittedModel::Rf(f) => f.predict_dataset(data),
            FittedModel::Trf(t) => t.forest.predict_dataset(&t.project(data)),
        }
    }
}

pub fn fit_method(train: &Dataset, method: Method, config: &ForestConfig) -> Result<FittedModel> {
    match method {
        Method::Rf => Ok(FittedModel::Rf(fit_forest(train, config)?)),
        Method::Trf { sprime, expansion } => Ok(FittedModel::Trf(fit_trf(train, sprime, expansion, config)?)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub window: usize,
    pub train_end: usize,
    pub target_time: usize,
    pub time_label: String,
    pub method: String,
    pub sprime: usize,
    pub actual: f64,
    pub forecast: f64,
    pub sq_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastReport {
    pub horizon: usize,
    pub methods: Vec<String>,
    /// Window-major: all methods of window 0, then window 1, ...
    pub records: Vec<ForecastRecord>,
}

impl ForecastReport {
    pub fn n_windows(&self) -> usize {
        self.records.len() / self.methods.len().max(1)
    }

    /// Squared errors of one method in window order.
    pub fn errors(&self, method: &str) -> Result<Vec<f64>> {
        if !self.methods.iter().any(|m| m == method) {
            return Err(Error::UnknownMethod(method.to_string()));
        }
        Ok(self.records.iter().filter(|r| r.method == method).map(|r| r.sq_error).collect())
    }

    pub fn target_labels(&self) -> Vec<String> {
        let first = self.methods.first().cloned().unwrap_or_default();
        self.records.iter().filter(|r| r.method == first).map(|r| r.time_label.clone()).collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::Io { path: "<csv writer>".into(), source: e })?;
        Ok(())
    }
}

/// Fits every method on rows `1..=train_end` of each window and forecasts
/// the response at row `target_time` (1-based) from that row's predictors.
/// Row `t` is expected to pair the response with predictors already known
/// at the forecast origin. All methods in window `w` share the forest seed
/// `derive_seed(config.seed, [w])`.
pub fn run_forecast_experiment(
    data: &Dataset,
    plan: &WindowPlan,
    methods: &[Method],
    config: &ForestConfig,
) -> Result<ForecastReport> {
    if methods.is_empty() {
        return Err(Error::Empty("methods"));
    }
    plan.validate(data.n_rows())?;
    let labels: Vec<String> = match data.time_index() {
        Some(t) => t.to_vec(),
        None => (1..=data.n_rows()).map(|t| t.to_string()).collect(),
    };
    let per_window = plan
        .windows
        .par_iter()
        .enumerate()
        .map(|(w, win)| {
            let train_rows: Vec<usize> = (0..win.train_end).collect();
            let train = data.subset_rows(&train_rows);
            let target = win.target_time - 1;
            let x = data.row(target);
            let actual = data.response()[target];
            let cfg = ForestConfig { seed: derive_seed(config.seed, &[w as u64]), ..*config };
            methods
                .iter()
                .map(|m| {
                    let forecast = fit_method(&train, *m, &cfg)?.predict(&x)?;
                    Ok(ForecastRecord {
                        window: w,
                        train_end: win.train_end,
                        target_time: win.target_time,
                        time_label: labels[target].clone(),
                        method: m.to_string(),
                        sprime: m.sprime(data.n_features()),
                        actual,
                        forecast,
                        sq_error: (actual - forecast).powi(2),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForecastReport {
        horizon: plan.horizon,
        methods: methods.iter().map(|m| m.to_string()).collect(),
        records: per_window.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutResult {
    pub method: String,
    pub mse: f64,
    pub predictions: Vec<f64>,
}

/// Fits each method on `train` with the same forest seed and scores it on
/// `test`.
pub fn run_holdout_experiment(
    train: &Dataset,
    test: &Dataset,
    methods: &[Method],
    config: &ForestConfig,
) -> Result<Vec<HoldoutResult>> {
    if test.n_rows() == 0 {
        return Err(Error::Empty("test set"));
    }
    methods
        .iter()
        .map(|m| {
            let predictions = fit_method(train, *m, config)?.predict_dataset(test)?;
            let mse = predictions
                .iter()
                .zip(test.response())
                .map(|(f, y)| (y - f).powi(2))
                .sum::<f64>()
                / test.n_rows() as f64;
            Ok(HoldoutResult { method: m.to_string(), mse, predictions })
        })
        .collect()
}

/// MSE of `method_a` over MSE of `method_b` on the windows selected by
/// `mask` (all windows when `None`).
pub fn mse_ratio(report: &ForecastReport, method_a: &str, method_b: &str, mask: Option<&[bool]>) -> Result<f64> {
    let ea = report.errors(method_a)?;
    let eb = report.errors(method_b)?;
    let keep: Vec<bool> = match mask {
        Some(m) if m.len() != ea.len() => {
            return Err(Error::DimensionMismatch { expected: ea.len(), got: m.len() })
        }
        Some(m) => m.to_vec(),
        None => vec![true; ea.len()],
    };
    let count = keep.iter().filter(|k| **k).count();
    if count == 0 {
        return Err(Error::Empty("regime mask"));
    }
    let sum = |e: &[f64]| e.iter().zip(&keep).filter(|(_, k)| **k).map(|(v, _)| v).sum::<f64>();
    let (sa, sb) = (sum(&ea), sum(&eb));
    if sb == 0.0 {
        return Err(Error::ZeroDenominator("MSE ratio"));
    }
    Ok(sa / sb)
}

/// Reads `(time_index, label)` rows.
pub fn load_regimes(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::InvalidArgument("regime rows need time_index and label".into()));
        }
        out.push((rec[0].to_string(), rec[1].to_string()));
    }
    Ok(out)
}

/// Marks the windows whose target period carries `label`.
pub fn regime_mask(report: &ForecastReport, regimes: &[(String, String)], label: &str) -> Vec<bool> {
    let tagged: std::collections::HashMap<&str, &str> =
        regimes.iter().map(|(t, l)| (t.as_str(), l.as_str())).collect();
    report
        .target_labels()
        .iter()
        .map(|t| tagged.get(t.as_str()) == Some(&label))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmResult {
    pub statistic: f64,
    /// One-sided, against the alternative that `a` is more accurate.
    pub p_value: f64,
    pub horizon: usize,
    pub mean_diff: f64,
    pub hac_variance: f64,
    pub t: usize,
}

/// Diebold-Mariano test on stored squared errors with `d_t = e_b,t − e_a,t`
/// and a Bartlett long-run variance truncated at lag `h − 1`.
pub fn dm_test(errors_a: &[f64], errors_b: &[f64], h: usize) -> Result<DmResult> {
    if errors_a.len() != errors_b.len() {
        return Err(Error::DimensionMismatch { expected: errors_a.len(), got: errors_b.len() });
    }
    if h == 0 {
        return Err(Error::InvalidArgument("horizon must be >= 1".into()));
    }
    let t = errors_a.len();
    if t < h + 2 {
        return Err(Error::SeriesTooShort { needed: h + 2, got: t });
    }
    let d: Vec<f64> = errors_b.iter().zip(errors_a).map(|(b, a)| b - a).collect();
    let tf = t as f64;
    let mean = d.iter().sum::<f64>() / tf;
    let gamma = |j: usize| (j..t).map(|s| (d[s] - mean) * (d[s - j] - mean)).sum::<f64>() / tf;
    let mut v = gamma(0);
    for j in 1..h {
        v += 2.0 * (1.0 - j as f64 / h as f64) * gamma(j);
    }
    let degenerate = DmResult { statistic: 0.0, p_value: 0.5, horizon: h, mean_diff: mean, hac_variance: v, t };
    if d.iter().all(|x| *x == 0.0) || !(v > 0.0) {
        return Ok(degenerate);
    }
    let statistic = mean / (v / tf).sqrt();
    let normal = Normal::standard();
    Ok(DmResult { statistic, p_value: normal.sf(statistic), ..degenerate })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub sprime: usize,
    pub tree_mse: f64,
    pub tree_correlation: f64,
    pub forest_mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsCurve {
    pub n_trees: usize,
    pub rows: Vec<DiagnosticsRow>,
}

impl DiagnosticsCurve {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::Io { path: "<csv writer>".into(), source: e })?;
        Ok(())
    }
}

/// Strength and correlation of the individual trees from a `rows × trees`
/// matrix of test errors: `(tree_mse, ρ̄, forest_mse)`.
pub fn error_moments(errors: &[Vec<f64>]) -> Result<(f64, f64, f64)> {
    let t = errors.len();
    if t == 0 {
        return Err(Error::Empty("test set"));
    }
    let b = errors[0].len();
    if b < 2 {
        return Err(Error::InvalidArgument("tree correlation needs at least 2 trees".into()));
    }
    let mut kappa_diag = vec![0.0; b];
    let mut cross = 0.0;
    let mut forest = 0.0;
    for row in errors {
        let s: f64 = row.iter().sum();
        let sq: f64 = row.iter().map(|e| e * e).sum();
        for (k, e) in kappa_diag.iter_mut().zip(row) {
            *k += e * e;
        }
        cross += s * s - sq;
        forest += (s / b as f64).powi(2);
    }
    let tf = t as f64;
    let bf = b as f64;
    for k in &mut kappa_diag {
        *k /= tf;
    }
    let tree_mse = kappa_diag.iter().sum::<f64>() / bf;
    let mean_off = cross / tf / (bf * (bf - 1.0));
    let scale = (kappa_diag.iter().map(|k| k.sqrt()).sum::<f64>() / bf).powi(2);
    let rho = if scale > 0.0 { mean_off / scale } else { 0.0 };
    Ok((tree_mse, rho, forest / tf))
}

/// Targets `s′` predictors on the training rows, grows the forest on them
/// and measures tree strength and error correlation on the test rows.
pub fn tree_diagnostics(
    data: &Dataset,
    train_rows: &[usize],
    test_rows: &[usize],
    sprime_grid: &[usize],
    config: &ForestConfig,
) -> Result<DiagnosticsCurve> {
    if sprime_grid.is_empty() {
        return Err(Error::Empty("s' grid"));
    }
    if test_rows.is_empty() || train_rows.is_empty() {
        return Err(Error::Empty("train or test rows"));
    }
    let mut seen = vec![false; data.n_rows()];
    for &i in train_rows {
        seen[i] = true;
    }
    if test_rows.iter().any(|&i| seen[i]) {
        return Err(Error::InvalidArgument("train and test rows overlap".into()));
    }
    let train = data.subset_rows(train_rows);
    let test = data.subset_rows(test_rows);
    let rows = sprime_grid
        .iter()
        .map(|&s| {
            let trf = fit_trf(&train, s, ExpansionMode::None, config)?;
            let preds = trf.forest.tree_predictions(&trf.project(&test))?;
            let errors: Vec<Vec<f64>> = preds
                .iter()
                .zip(test.response())
                .map(|(row, y)| row.iter().map(|f| y - f).collect())
                .collect();
            let (tree_mse, tree_correlation, forest_mse) = error_moments(&errors)?;
            Ok(DiagnosticsRow { sprime: s, tree_mse, tree_correlation, forest_mse })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagnosticsCurve { n_trees: config.n_trees, rows })
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            r[idx[k]] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("rank correlation needs >= 2 points".into()));
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::ZeroDenominator("rank correlation"));
    }
    Ok(cov / (vx * vy).sqrt())
}
