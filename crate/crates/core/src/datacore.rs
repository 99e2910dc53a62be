//! Data ingestion, series transforms, forecast targets and window plans.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A regression sample: predictors stored column-major plus a response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    columns: Vec<Vec<f64>>,
    feature_names: Vec<String>,
    response: Vec<f64>,
    time_index: Option<Vec<String>>,
}

impl Dataset {
    /// Builds a dataset from predictor columns.
    pub fn from_columns(
        columns: Vec<Vec<f64>>,
        feature_names: Vec<String>,
        response: Vec<f64>,
    ) -> Result<Self> {
        if columns.len() != feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: columns.len(),
                got: feature_names.len(),
            });
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        for col in &columns {
            if col.len() != response.len() {
                return Err(Error::DimensionMismatch {
                    expected: response.len(),
                    got: col.len(),
                });
            }
        }
        if columns.iter().flatten().chain(&response).any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("dataset contains NaN".into()));
        }
        Ok(Self {
            columns,
            feature_names,
            response,
            time_index: None,
        })
    }

    /// Builds a dataset from row-major feature vectors with names `x1..xp`.
    pub fn from_rows(rows: &[Vec<f64>], response: Vec<f64>) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::with_capacity(rows.len()); p];
        for row in rows {
            if row.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: row.len(),
                });
            }
            for (col, &v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
        let names = (1..=p).map(|j| format!("x{j}")).collect();
        Self::from_columns(columns, names, response)
    }

    pub fn with_time_index(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_rows() {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows(),
                got: labels.len(),
            });
        }
        self.time_index = Some(labels);
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.response.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn time_index(&self) -> Option<&[String]> {
        self.time_index.as_deref()
    }

    #[inline]
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.columns[col][row]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// Keeps the given rows, in the given order (duplicates allowed).
    pub fn subset_rows(&self, rows: &[usize]) -> Self {
        Self {
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&i| c[i]).collect())
                .collect(),
            feature_names: self.feature_names.clone(),
            response: rows.iter().map(|&i| self.response[i]).collect(),
            time_index: self
                .time_index
                .as_ref()
                .map(|t| rows.iter().map(|&i| t[i].clone()).collect()),
        }
    }

    /// Keeps the given predictor columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self {
            columns: cols.iter().map(|&j| self.columns[j].clone()).collect(),
            feature_names: cols.iter().map(|&j| self.feature_names[j].clone()).collect(),
            response: self.response.clone(),
            time_index: self.time_index.clone(),
        }
    }
}

/// Outcome of [`load_csv`].
#[derive(Debug, Clone)]
pub struct LoadedCsv {
    pub dataset: Dataset,
    /// Rows removed because a cell was blank or not a number.
    pub dropped_rows: usize,
}

/// Loads a comma-separated file with a header row; every column other than
/// `response_column` becomes a predictor.
pub fn load_csv(path: impl AsRef<Path>, response_column: &str) -> Result<LoadedCsv> {
    load_csv_with_time(path, response_column, None)
}

/// Like [`load_csv`], with an optional non-numeric column kept as the time index.
pub fn load_csv_with_time(
    path: impl AsRef<Path>,
    response_column: &str,
    time_column: Option<&str>,
) -> Result<LoadedCsv> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let response_idx = headers
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| Error::MissingColumn(response_column.to_string()))?;
    let time_idx = match time_column {
        Some(t) => Some(
            headers
                .iter()
                .position(|h| h == t)
                .ok_or_else(|| Error::MissingColumn(t.to_string()))?,
        ),
        None => None,
    };
    let feature_idx: Vec<usize> = (0..headers.len())
        .filter(|&j| j != response_idx && Some(j) != time_idx)
        .collect();

    let mut columns = vec![Vec::new(); feature_idx.len()];
    let mut response = Vec::new();
    let mut times = Vec::new();
    let mut dropped = 0;
    let parse = |s: Option<&str>| -> Option<f64> {
        let v: f64 = s?.parse().ok()?;
        v.is_finite().then_some(v)
    };
    for record in reader.records() {
        let record = record?;
        let y = parse(record.get(response_idx));
        let xs: Option<Vec<f64>> = feature_idx.iter().map(|&j| parse(record.get(j))).collect();
        let t = time_idx.map(|j| record.get(j).unwrap_or("").to_string());
        match (y, xs) {
            (Some(y), Some(xs)) if record.len() == headers.len() => {
                response.push(y);
                for (col, v) in columns.iter_mut().zip(xs) {
                    col.push(v);
                }
                if let Some(t) = t {
                    times.push(t);
                }
            }
            _ => dropped += 1,
        }
    }
    if response.is_empty() {
        return Err(Error::NoUsableRows { dropped });
    }
    let names = feature_idx.iter().map(|&j| headers[j].clone()).collect();
    let mut dataset = Dataset::from_columns(columns, names, response)?;
    if time_idx.is_some() {
        dataset = dataset.with_time_index(times)?;
    }
    Ok(LoadedCsv {
        dataset,
        dropped_rows: dropped,
    })
}

/// Stationarity transformation codes 1 through 7 of the FRED-MD convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum TransformCode {
    Level,
    Diff,
    Diff2,
    Log,
    DiffLog,
    Diff2Log,
    DiffPctChange,
}

impl TryFrom<u8> for TransformCode {
    type Error = Error;

    fn try_from(code: u8) -> Result<Self> {
        use TransformCode::*;
        Ok(match code {
            1 => Level,
            2 => Diff,
            3 => Diff2,
            4 => Log,
            5 => DiffLog,
            6 => Diff2Log,
            7 => DiffPctChange,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "transform code {other} outside 1..=7"
                )))
            }
        })
    }
}

impl From<TransformCode> for u8 {
    fn from(code: TransformCode) -> u8 {
        code.code()
    }
}

impl TransformCode {
    pub fn code(self) -> u8 {
        self as u8 + 1
    }

    /// Number of leading observations consumed by differencing.
    pub fn order(self) -> usize {
        use TransformCode::*;
        match self {
            Level | Log => 0,
            Diff | DiffLog => 1,
            Diff2 | Diff2Log | DiffPctChange => 2,
        }
    }

    fn uses_log(self) -> bool {
        matches!(
            self,
            TransformCode::Log | TransformCode::DiffLog | TransformCode::Diff2Log
        )
    }
}

fn diff(x: &[f64]) -> Vec<f64> {
    x.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Applies a transformation code; the output drops `code.order()` leading values.
pub fn apply_transform(series: &[f64], code: TransformCode) -> Result<Vec<f64>> {
    let needed = code.order() + 1;
    if series.len() < needed {
        return Err(Error::SeriesTooShort {
            needed,
            got: series.len(),
        });
    }
    let base: Vec<f64> = if code.uses_log() {
        series
            .iter()
            .enumerate()
            .map(|(index, &value)| {
                if value > 0.0 {
                    Ok(value.ln())
                } else {
                    Err(Error::NonPositive { index, value })
                }
            })
            .collect::<Result<_>>()?
    } else {
        series.to_vec()
    };
    use TransformCode::*;
    Ok(match code {
        Level | Log => base,
        Diff | DiffLog => diff(&base),
        Diff2 | Diff2Log => diff(&diff(&base)),
        DiffPctChange => {
            let pct = base
                .windows(2)
                .map(|w| {
                    if w[0] == 0.0 {
                        Err(Error::ZeroDenominator("percent change"))
                    } else {
                        Ok(w[1] / w[0] - 1.0)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            diff(&pct)
        }
    })
}

/// Reads a transform table CSV with columns `series_name,code`.
pub fn load_transform_spec(path: impl AsRef<Path>) -> Result<Vec<(String, TransformCode)>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    #[derive(Deserialize)]
    struct Row {
        series_name: String,
        code: u8,
    }
    reader
        .deserialize::<Row>()
        .map(|r| {
            let r = r?;
            Ok((r.series_name, TransformCode::try_from(r.code)?))
        })
        .collect()
}

/// How the forecast target is built from a level series.
#[derive(Debug, Clone, Copy)]
pub enum TargetKind<'a> {
    /// `log Z_{t+h} - log Z_t`.
    LogDiff,
    /// Second log difference accumulated over `h` steps.
    SecondLogDiffCum,
    /// `R_{t+h} - Rf_{t+h}` for a return series and a risk-free series.
    Excess { risk_free: &'a [f64] },
}

impl TargetKind<'_> {
    /// Origination periods at the start of the series with no defined target.
    pub fn leading_undefined(&self) -> usize {
        match self {
            TargetKind::SecondLogDiffCum => 1,
            _ => 0,
        }
    }
}

/// Builds the `h`-step forecast target; element `i` belongs to origination
/// time `i + kind.leading_undefined()`.
pub fn build_target(series: &[f64], h: usize, kind: TargetKind<'_>) -> Result<Vec<f64>> {
    if h == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let n = series.len();
    if h + kind.leading_undefined() >= n {
        return Err(Error::SeriesTooShort {
            needed: h + kind.leading_undefined() + 1,
            got: n,
        });
    }
    let logs = || -> Result<Vec<f64>> {
        series
            .iter()
            .enumerate()
            .map(|(index, &value)| {
                if value > 0.0 {
                    Ok(value.ln())
                } else {
                    Err(Error::NonPositive { index, value })
                }
            })
            .collect()
    };
    match kind {
        TargetKind::LogDiff => {
            let l = logs()?;
            Ok((0..n - h).map(|t| l[t + h] - l[t]).collect())
        }
        TargetKind::SecondLogDiffCum => {
            let l = logs()?;
            // sum_{j=1..h} d2 log Z_{t+j} = dlog Z_{t+h} - dlog Z_t
            Ok((1..n - h)
                .map(|t| (l[t + h] - l[t + h - 1]) - (l[t] - l[t - 1]))
                .collect())
        }
        TargetKind::Excess { risk_free } => {
            if risk_free.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: risk_free.len(),
                });
            }
            Ok((0..n - h).map(|t| series[t + h] - risk_free[t + h]).collect())
        }
    }
}

/// One expanding-window forecast: train on rows `1..=train_end`, forecast
/// the row at `target_time` (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub train_end: usize,
    pub target_time: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowPlan {
    pub initial_length: usize,
    pub horizon: usize,
    pub windows: Vec<Window>,
}

impl WindowPlan {
    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// Checks the plan against a dataset length.
    pub fn validate(&self, n_total: usize) -> Result<()> {
        let mut prev = 0;
        for w in &self.windows {
            if w.train_end < self.initial_length
                || w.target_time != w.train_end + self.horizon
                || w.target_time > n_total
                || w.train_end <= prev
            {
                return Err(Error::InfeasibleWindows(format!(
                    "window {w:?} invalid for {n_total} rows"
                )));
            }
            prev = w.train_end;
        }
        Ok(())
    }
}

/// Expanding windows with training ends `initial_length ..= n_total - h`.
pub fn expanding_windows(n_total: usize, initial_length: usize, h: usize) -> Result<WindowPlan> {
    if initial_length == 0 || h == 0 {
        return Err(Error::InfeasibleWindows(
            "initial length and horizon must be positive".into(),
        ));
    }
    if initial_length + h > n_total {
        return Err(Error::InfeasibleWindows(format!(
            "initial length {initial_length} plus horizon {h} exceeds {n_total} observations"
        )));
    }
    let windows = (initial_length..=n_total - h)
        .map(|train_end| Window {
            train_end,
            target_time: train_end + h,
        })
        .collect();
    Ok(WindowPlan {
        initial_length,
        horizon: h,
        windows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_identity() {
        let f = write_csv("x1,y\n1,2\n3,4\n5,6\n");
        let loaded = load_csv(f.path(), "y").unwrap();
        assert_eq!(loaded.dataset.n_rows(), 3);
        assert_eq!(loaded.dataset.n_features(), 1);
        assert_eq!(loaded.dropped_rows, 0);
        assert_eq!(loaded.dataset.response(), &[2.0, 4.0, 6.0]);
        assert_eq!(loaded.dataset.column(0), &[1.0, 3.0, 5.0]);
    }

    #[test]
    fn load_drops_blank_cells() {
        let f = write_csv("x1,x2,y\n1,2,3\n4,,6\n7,8,9\n");
        let loaded = load_csv(f.path(), "y").unwrap();
        assert_eq!(loaded.dataset.n_rows(), 2);
        assert_eq!(loaded.dropped_rows, 1);
    }

    #[test]
    fn load_missing_response() {
        let f = write_csv("x1,x2\n1,2\n");
        assert!(matches!(load_csv(f.path(), "y"), Err(Error::MissingColumn(_))));
    }

    #[test]
    fn load_no_rows_and_missing_file() {
        let f = write_csv("x1,y\na,b\n");
        assert!(matches!(
            load_csv(f.path(), "y"),
            Err(Error::NoUsableRows { dropped: 1 })
        ));
        assert!(matches!(
            load_csv("/nonexistent/file.csv", "y"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn load_time_column() {
        let f = write_csv("date,x1,y\n2001-01,1,2\n2001-02,3,4\n");
        let loaded = load_csv_with_time(f.path(), "y", Some("date")).unwrap();
        assert_eq!(loaded.dataset.n_features(), 1);
        assert_eq!(
            loaded.dataset.time_index().unwrap(),
            &["2001-01".to_string(), "2001-02".to_string()]
        );
    }

    #[test]
    fn duplicate_names_rejected() {
        let r = Dataset::from_columns(
            vec![vec![1.0], vec![2.0]],
            vec!["a".into(), "a".into()],
            vec![0.0],
        );
        assert!(matches!(r, Err(Error::DuplicateColumn(_))));
    }

    #[test]
    fn transform_examples() {
        let s = [1.0, 3.0, 6.0];
        assert_eq!(apply_transform(&s, TransformCode::Level).unwrap(), vec![1.0, 3.0, 6.0]);
        assert_eq!(apply_transform(&s, TransformCode::Diff).unwrap(), vec![2.0, 3.0]);
        assert_eq!(apply_transform(&s, TransformCode::Diff2).unwrap(), vec![1.0]);
        let e = std::f64::consts::E;
        let out = apply_transform(&[1.0, e, e * e], TransformCode::DiffLog).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-15 && (out[1] - 1.0).abs() < 1e-15);
        let pct = apply_transform(&[1.0, 2.0, 3.0], TransformCode::DiffPctChange).unwrap();
        assert!((pct[0] - (0.5 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn transform_errors() {
        assert!(matches!(
            apply_transform(&[1.0, -1.0], TransformCode::Log),
            Err(Error::NonPositive { index: 1, .. })
        ));
        assert!(matches!(
            apply_transform(&[1.0, 2.0], TransformCode::Diff2),
            Err(Error::SeriesTooShort { needed: 3, got: 2 })
        ));
        assert!(TransformCode::try_from(8).is_err());
        assert!(TransformCode::try_from(0).is_err());
        assert_eq!(TransformCode::try_from(5).unwrap().code(), 5);
    }

    #[test]
    fn transform_spec_file() {
        let f = write_csv("series_name,code\nIP,5\nCPI,6\n");
        let spec = load_transform_spec(f.path()).unwrap();
        assert_eq!(spec[0], ("IP".to_string(), TransformCode::DiffLog));
        assert_eq!(spec[1].1, TransformCode::Diff2Log);
    }

    #[test]
    fn target_examples() {
        let y = build_target(&[100.0, 105.0, 110.25], 1, TargetKind::LogDiff).unwrap();
        assert_eq!(y.len(), 2);
        for v in y {
            assert!((v - 1.05f64.ln()).abs() < 1e-12);
            assert!((v - 0.04879).abs() < 1e-5);
        }
        let ex = build_target(
            &[0.0, 0.05],
            1,
            TargetKind::Excess {
                risk_free: &[0.0, 0.01],
            },
        )
        .unwrap();
        assert!((ex[0] - 0.04).abs() < 1e-15);
        assert!(build_target(&[1.0, 2.0, 3.0], 3, TargetKind::LogDiff).is_err());
        assert!(build_target(&[1.0, -2.0, 3.0], 1, TargetKind::LogDiff).is_err());
    }

    #[test]
    fn second_log_diff_accumulates() {
        // log Z = t^2: dlog Z_t = 2t - 1, so the h-step accumulation is 2h.
        let z: Vec<f64> = (0..8).map(|t| ((t * t) as f64).exp()).collect();
        let y = build_target(&z, 3, TargetKind::SecondLogDiffCum).unwrap();
        assert_eq!(y.len(), 8 - 3 - 1);
        for v in y {
            assert!((v - 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn window_examples() {
        let plan = expanding_windows(10, 5, 1).unwrap();
        assert_eq!(plan.len(), 5);
        let targets: Vec<usize> = plan.windows.iter().map(|w| w.target_time).collect();
        assert_eq!(targets, vec![6, 7, 8, 9, 10]);
        assert_eq!(expanding_windows(6, 5, 1).unwrap().len(), 1);
        assert!(expanding_windows(5, 5, 1).is_err());
        plan.validate(10).unwrap();
        assert!(plan.validate(9).is_err());
    }

    #[test]
    fn window_count_formula_exhaustive() {
        for n in 1..40 {
            for init in 1..n {
                for h in 1..=n {
                    match expanding_windows(n, init, h) {
                        Ok(plan) => {
                            assert!(init + h <= n);
                            assert_eq!(plan.len(), n - h - init + 1);
                            plan.validate(n).unwrap();
                        }
                        Err(_) => assert!(init + h > n),
                    }
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn transforms_invert(series in proptest::collection::vec(0.1f64..100.0, 2..40)) {
            let d = apply_transform(&series, TransformCode::Diff).unwrap();
            let mut acc = series[0];
            for (k, dv) in d.iter().enumerate() {
                acc += dv;
                proptest::prop_assert!((acc - series[k + 1]).abs() <= 1e-12 * series.iter().fold(1.0f64, |m, v| m.max(v.abs())) * series.len() as f64);
            }
            let l = apply_transform(&series, TransformCode::Log).unwrap();
            for (v, s) in l.iter().zip(&series) {
                proptest::prop_assert!((v.exp() - s).abs() <= 1e-12 * s);
            }
            let dl = apply_transform(&series, TransformCode::DiffLog).unwrap();
            let mut lacc = series[0].ln();
            for (k, dv) in dl.iter().enumerate() {
                lacc += dv;
                proptest::prop_assert!((lacc.exp() - series[k + 1]).abs() <= 1e-12 * series[k + 1] * series.len() as f64);
            }
        }

        #[test]
        fn exponential_series_has_constant_target(z0 in 0.5f64..10.0, g in -0.2f64..0.2, h in 1usize..5) {
            let z: Vec<f64> = (0..20).map(|t| z0 * (g * t as f64).exp()).collect();
            let y = build_target(&z, h, TargetKind::LogDiff).unwrap();
            for v in &y {
                proptest::prop_assert!((v - g * h as f64).abs() < 1e-12);
            }
        }
    }
}
