//! Synthetic designs and Monte Carlo estimates of the probability that the
//! root split lands on the strong predictor.

use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datacore::Dataset;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, task_rng};
use crate::theory::{
    cstar_numeric, population_criterion, snr_to_sigma2, upper_bound_split_prob, Regression1D, ScalarFn1D,
};

pub const DEFAULT_REPS: usize = 10_000;
pub const MIN_REPS: usize = 100;

/// `Y = g(X₁) + σε` with `X ~ U[0,1]^p`, `Var g(X₁) = 1` and `σ²` set by the
/// signal-to-noise ratio. Only the first predictor is strong.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dgp {
    pub kind: Regression1D,
    pub p: usize,
    pub snr: f64,
}

impl Dgp {
    pub fn new(kind: Regression1D, p: usize, snr: f64) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidArgument("p must be >= 1".into()));
        }
        snr_to_sigma2(snr)?;
        if let Regression1D::Sine { alpha } = kind {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidArgument(format!("sine frequency {alpha} must be positive")));
            }
        }
        Ok(Self { kind, p, snr })
    }

    pub fn sigma2(&self) -> f64 {
        (1.0 - self.snr) / self.snr
    }

    pub fn signal(&self, x: &[f64]) -> f64 {
        self.kind.eval(x[0])
    }
}

pub fn kind_label(kind: &Regression1D) -> String {
    match kind {
        Regression1D::Linear => "linear".into(),
        Regression1D::Sine { alpha } => format!("sine({alpha})"),
        Regression1D::Quadratic => "quadratic".into(),
        Regression1D::Piecewise15 => "piecewise15".into(),
    }
}

/// Draws `n` observations. Each row consumes `p` uniforms then one normal.
pub fn sample(dgp: &Dgp, n: usize, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("sample size {n} < 2")));
    }
    let sigma = dgp.sigma2().sqrt();
    let mut rng = task_rng(seed);
    let mut cols = vec![Vec::with_capacity(n); dgp.p];
    let mut y = Vec::with_capacity(n);
    let mut row = vec![0.0; dgp.p];
    for _ in 0..n {
        for (j, v) in row.iter_mut().enumerate() {
            *v = rng.gen::<f64>();
            cols[j].push(*v);
        }
        let eps: f64 = rng.sample(StandardNormal);
        y.push(dgp.signal(&row) + sigma * eps);
    }
    let names = (1..=dgp.p).map(|j| format!("x{j}")).collect();
    Dataset::from_columns(cols, names, y)
}

/// Sparse linear design: `Y = β Σ_{i<s} X_i + σε` with `β = √(12/s)`, so
/// the signal has unit variance, and `p − s` weak predictors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseLinear {
    pub p: usize,
    pub s: usize,
    pub snr: f64,
}

impl SparseLinear {
    pub fn new(p: usize, s: usize, snr: f64) -> Result<Self> {
        if s == 0 || s > p {
            return Err(Error::InvalidArgument(format!("need 1 <= s <= p, got s={s}, p={p}")));
        }
        snr_to_sigma2(snr)?;
        Ok(Self { p, s, snr })
    }

    pub fn beta(&self) -> f64 {
        (12.0 / self.s as f64).sqrt()
    }

    /// Same stream layout as [`sample`]: `p` uniforms then one normal per row.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Dataset> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("sample size {n} < 2")));
        }
        let sigma = snr_to_sigma2(self.snr)?.sqrt();
        let beta = self.beta();
        let mut rng = task_rng(seed);
        let mut cols = vec![Vec::with_capacity(n); self.p];
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let mut signal = 0.0;
            for (j, col) in cols.iter_mut().enumerate() {
                let v: f64 = rng.gen();
                if j < self.s {
                    signal += beta * v;
                }
                col.push(v);
            }
            let eps: f64 = rng.sample(StandardNormal);
            y.push(signal + sigma * eps);
        }
        let names = (1..=self.p).map(|j| format!("x{j}")).collect();
        Dataset::from_columns(cols, names, y)
    }
}

/// Root-node impurity decrease `L_n(i, τ)` at every observed `τ` of one
/// column, normalised by `n`. Thresholds are sorted and unique; the largest
/// (empty right child) has decrease 0.
pub fn root_profile(x: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    let n = x.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    let mut pairs: Vec<(f64, f64)> = x.iter().zip(y).map(|(a, b)| (*a, b - mean)).collect();
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let mut out = Vec::with_capacity(n);
    let mut left = 0.0;
    for k in 0..n {
        left += pairs[k].1;
        if k + 1 < n && pairs[k].0 == pairs[k + 1].0 {
            continue;
        }
        let n_left = k + 1;
        let n_right = n - n_left;
        let dec = if n_right == 0 {
            0.0
        } else {
            let ml = left / n_left as f64;
            let mr = (total - left) / n_right as f64;
            (n_left as f64 * n_right as f64 / n as f64) * (ml - mr).powi(2) / n as f64
        };
        out.push((pairs[k].0, dec));
    }
    out
}

/// Outcome of one root-split replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootOutcome {
    /// The global argmax (ties to the lower index) is the strong direction.
    pub strong: bool,
    /// The strong direction's best decrease ties the best weak one.
    pub tie: bool,
    pub best_strong: f64,
    pub best_weak: f64,
}

pub fn root_outcome(data: &Dataset) -> RootOutcome {
    let y = data.response();
    let best = |j: usize| {
        root_profile(data.column(j), y)
            .iter()
            .map(|p| p.1)
            .fold(0.0, f64::max)
    };
    let best_strong = best(0);
    let best_weak = (1..data.n_features()).map(best).fold(f64::NEG_INFINITY, f64::max);
    RootOutcome {
        strong: best_strong >= best_weak,
        tie: best_strong == best_weak,
        best_strong,
        best_weak,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoEstimate {
    pub estimate: f64,
    pub standard_error: f64,
    pub reps: usize,
    pub tie_rate: f64,
    pub n: usize,
    pub seed: u64,
    pub dgp: Dgp,
}

impl RhoEstimate {
    fn from_counts(hits: usize, ties: usize, reps: usize, n: usize, seed: u64, dgp: Dgp) -> Self {
        let est = hits as f64 / reps as f64;
        Self {
            estimate: est,
            standard_error: (est * (1.0 - est) / reps as f64).sqrt(),
            reps,
            tie_rate: ties as f64 / reps as f64,
            n,
            seed,
            dgp,
        }
    }
}

fn check_reps(reps: usize) -> Result<()> {
    if reps < MIN_REPS {
        return Err(Error::InvalidArgument(format!("reps {reps} < {MIN_REPS}")));
    }
    Ok(())
}

/// Monte Carlo probability that the root split is placed on the strong
/// predictor. Replication `r` uses seed `derive_seed(seed, [r])`.
pub fn estimate_split_prob(dgp: &Dgp, n: usize, reps: usize, seed: u64) -> Result<RhoEstimate> {
    check_reps(reps)?;
    let outcomes = (0..reps)
        .into_par_iter()
        .map(|r| sample(dgp, n, derive_seed(seed, &[r as u64])).map(|d| root_outcome(&d)))
        .collect::<Result<Vec<_>>>()?;
    let hits = outcomes.iter().filter(|o| o.strong).count();
    let ties = outcomes.iter().filter(|o| o.tie).count();
    Ok(RhoEstimate::from_counts(hits, ties, reps, n, seed, *dgp))
}

/// `sup_{i ∈ A, τ observed} |L_n(i, τ) − L*(i, τ)|` at the root, with
/// `L* = 0` along weak directions.
pub fn delta_on(data: &Dataset, kind: &Regression1D, directions: &[usize]) -> Result<f64> {
    let y = data.response();
    let mut sup: f64 = 0.0;
    for &i in directions {
        if i >= data.n_features() {
            return Err(Error::InvalidArgument(format!("direction {i} outside 0..{}", data.n_features())));
        }
        for (tau, ln) in root_profile(data.column(i), y) {
            let lstar = if i == 0 && tau > 0.0 && tau < 1.0 {
                population_criterion(kind, tau)?
            } else {
                0.0
            };
            sup = sup.max((ln - lstar).abs());
        }
    }
    Ok(sup)
}

/// Empirical `δ_n(A)` on one sample drawn with `seed`.
pub fn estimate_delta(dgp: &Dgp, n: usize, directions: &[usize], seed: u64) -> Result<f64> {
    delta_on(&sample(dgp, n, seed)?, &dgp.kind, directions)
}

/// Split probability with its lower and upper bounds, all from the same
/// replications, for `m = p` (every direction is a candidate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub rho: RhoEstimate,
    pub cstar: f64,
    /// Fraction of replications with `2δ_n < C*`.
    pub lower: f64,
    pub lower_se: f64,
    pub upper: f64,
}

pub fn sandwich(dgp: &Dgp, n: usize, reps: usize, seed: u64) -> Result<Sandwich> {
    check_reps(reps)?;
    let cstar = match dgp.kind {
        Regression1D::Linear => 0.75,
        other => cstar_numeric(&other, 10_000)?.value,
    };
    let dirs: Vec<usize> = (0..dgp.p).collect();
    let outcomes = (0..reps)
        .into_par_iter()
        .map(|r| {
            let d = sample(dgp, n, derive_seed(seed, &[r as u64]))?;
            Ok((root_outcome(&d), delta_on(&d, &dgp.kind, &dirs)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let hits = outcomes.iter().filter(|o| o.0.strong).count();
    let ties = outcomes.iter().filter(|o| o.0.tie).count();
    let below = outcomes.iter().filter(|o| 2.0 * o.1 < cstar).count() as f64 / reps as f64;
    Ok(Sandwich {
        rho: RhoEstimate::from_counts(hits, ties, reps, n, seed, *dgp),
        cstar,
        lower: below,
        lower_se: (below * (1.0 - below) / reps as f64).sqrt(),
        upper: upper_bound_split_prob(dgp.p as u64, 1, dgp.p as u64)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub kind: Regression1D,
    pub p: usize,
    pub n: usize,
    pub snr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kind: String,
    pub p: usize,
    pub n: usize,
    pub snr: f64,
    pub reps: usize,
    pub rho_hat: f64,
    pub se: f64,
    pub tie_rate: f64,
    pub seed: u64,
}

/// One estimate per cell; cell `c` uses seed `derive_seed(seed, [c])`.
pub fn sweep(grid: &[GridCell], reps: usize, seed: u64) -> Result<Vec<SweepRow>> {
    grid.iter()
        .enumerate()
        .map(|(c, cell)| {
            let dgp = Dgp::new(cell.kind, cell.p, cell.snr)?;
            let cell_seed = derive_seed(seed, &[c as u64]);
            let est = estimate_split_prob(&dgp, cell.n, reps, cell_seed)?;
            Ok(SweepRow {
                kind: kind_label(&cell.kind),
                p: cell.p,
                n: cell.n,
                snr: cell.snr,
                reps,
                rho_hat: est.estimate,
                se: est.standard_error,
                tie_rate: est.tie_rate,
                seed: cell_seed,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::Io { path: "<csv writer>".into(), source: e })?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct GridRecord {
    kind: String,
    #[serde(default)]
    alpha: Option<f64>,
    p: usize,
    n: usize,
    snr: f64,
}

/// Reads a grid CSV with columns `kind, alpha, p, n, snr`; `alpha` is only
/// read for `sine` rows.
pub fn load_grid(path: impl AsRef<Path>) -> Result<Vec<GridCell>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    parse_grid(file)
}

pub fn parse_grid<R: std::io::Read>(input: R) -> Result<Vec<GridCell>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut cells = Vec::new();
    for rec in reader.deserialize::<GridRecord>() {
        let rec = rec?;
        let kind = match rec.kind.to_ascii_lowercase().as_str() {
            "linear" => Regression1D::Linear,
            "quadratic" => Regression1D::Quadratic,
            "piecewise15" | "piecewise" => Regression1D::Piecewise15,
            "sine" => Regression1D::Sine {
                alpha: rec
                    .alpha
                    .ok_or_else(|| Error::InvalidArgument("sine grid row needs alpha".into()))?,
            },
            other => return Err(Error::InvalidArgument(format!("unknown design kind `{other}`"))),
        };
        Dgp::new(kind, rec.p, rec.snr)?;
        cells.push(GridCell { kind, p: rec.p, n: rec.n, snr: rec.snr });
    }
    if cells.is_empty() {
        return Err(Error::Empty("grid"));
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cart::{best_split, impurity_decrease};
    use std::f64::consts::PI;

    #[test]
    fn noiseless_linear_sample() {
        let dgp = Dgp::new(Regression1D::Linear, 3, 1.0).unwrap();
        let d = sample(&dgp, 50, 4).unwrap();
        for i in 0..50 {
            assert_eq!(d.response()[i], 12f64.sqrt() * d.value(i, 0));
        }
        assert_eq!(sample(&dgp, 50, 4).unwrap(), d);
        assert_ne!(sample(&dgp, 50, 5).unwrap(), d);
    }

    #[test]
    fn signal_variance_is_normalised() {
        for kind in [
            Regression1D::Linear,
            Regression1D::Quadratic,
            Regression1D::Piecewise15,
            Regression1D::Sine { alpha: 4.0 * PI },
        ] {
            let dgp = Dgp::new(kind, 1, 1.0).unwrap();
            let d = sample(&dgp, 1_000_000, 1).unwrap();
            let y = d.response();
            let m = y.iter().sum::<f64>() / y.len() as f64;
            let v = y.iter().map(|v| (v - m).powi(2)).sum::<f64>() / y.len() as f64;
            assert!((v - 1.0).abs() < 0.01, "{kind:?}: {v}");
        }
    }

    #[test]
    fn sparse_design_signal() {
        let g = SparseLinear::new(10, 4, 1.0).unwrap();
        let d = g.sample(30, 2).unwrap();
        for i in 0..30 {
            let f: f64 = (0..4).map(|j| g.beta() * d.value(i, j)).sum();
            assert!((d.response()[i] - f).abs() < 1e-12);
        }
        assert!(SparseLinear::new(3, 4, 0.5).is_err());
    }

    #[test]
    fn profile_matches_brute_force() {
        let dgp = Dgp::new(Regression1D::Quadratic, 3, 0.5).unwrap();
        let d = sample(&dgp, 40, 2).unwrap();
        let rows: Vec<usize> = (0..40).collect();
        for j in 0..3 {
            for (tau, ln) in root_profile(d.column(j), d.response()) {
                let brute = impurity_decrease(&d, &rows, j, tau, 40, 1).unwrap().unwrap_or(0.0);
                assert!((ln - brute).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn outcome_agrees_with_tree_split() {
        let dgp = Dgp::new(Regression1D::Linear, 5, 0.3).unwrap();
        let rows: Vec<usize> = (0..60).collect();
        for s in 0..50 {
            let d = sample(&dgp, 60, s).unwrap();
            let split = best_split(&d, &rows, &[0, 1, 2, 3, 4], 60, 1).unwrap();
            assert_eq!(root_outcome(&d).strong, split.feature == 0);
        }
    }

    #[test]
    fn linear_high_snr_mostly_strong() {
        let dgp = Dgp::new(Regression1D::Linear, 2, 0.9).unwrap();
        let est = estimate_split_prob(&dgp, 400, 200, 3).unwrap();
        assert!(est.estimate > 0.95);
        let se = (est.estimate * (1.0 - est.estimate) / 200.0).sqrt();
        assert_eq!(est.standard_error, se);
        assert!(estimate_split_prob(&dgp, 400, 99, 3).is_err());
    }

    #[test]
    fn fewer_predictors_split_more_often() {
        let a = estimate_split_prob(&Dgp::new(Regression1D::Linear, 2, 0.1).unwrap(), 100, 400, 7).unwrap();
        let b = estimate_split_prob(&Dgp::new(Regression1D::Linear, 16, 0.1).unwrap(), 100, 400, 7).unwrap();
        let se = (a.standard_error.powi(2) + b.standard_error.powi(2)).sqrt();
        assert!(a.estimate >= b.estimate - 2.0 * se);
    }

    #[test]
    fn delta_shrinks_and_is_monotone_in_set() {
        let dgp = Dgp::new(Regression1D::Linear, 3, 1.0).unwrap();
        assert!(estimate_delta(&dgp, 100_000, &[0], 1).unwrap() < 0.01);
        let noisy = Dgp::new(Regression1D::Linear, 4, 0.3).unwrap();
        let d = sample(&noisy, 200, 9).unwrap();
        let small = delta_on(&d, &noisy.kind, &[0, 2]).unwrap();
        let big = delta_on(&d, &noisy.kind, &[0, 1, 2, 3]).unwrap();
        assert!(small <= big);
    }

    #[test]
    fn constant_response_delta_is_signal_only() {
        let cols = vec![vec![0.1, 0.4, 0.6, 0.9]];
        let d = Dataset::from_columns(cols, vec!["x1".into()], vec![2.0; 4]).unwrap();
        let delta = delta_on(&d, &Regression1D::Linear, &[0]).unwrap();
        let expect = [0.1, 0.4, 0.6]
            .iter()
            .map(|t| 3.0 * t * (1.0 - t))
            .fold(0.0, f64::max);
        assert!((delta - expect).abs() < 1e-12);
    }

    #[test]
    fn single_cell_sweep_matches_direct_estimate() {
        let cell = GridCell { kind: Regression1D::Linear, p: 4, n: 60, snr: 0.3 };
        let rows = sweep(&[cell], 150, 21).unwrap();
        let dgp = Dgp::new(Regression1D::Linear, 4, 0.3).unwrap();
        let direct = estimate_split_prob(&dgp, 60, 150, derive_seed(21, &[0])).unwrap();
        assert_eq!(rows[0].rho_hat, direct.estimate);
        assert_eq!(rows[0].seed, derive_seed(21, &[0]));
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("kind,p,n,snr,reps,rho_hat,se,tie_rate,seed"));
    }

    #[test]
    fn grid_parsing() {
        let text = "kind,alpha,p,n,snr\nlinear,,8,100,0.5\nsine,50.26548245743669,8,200,0.1\n";
        let g = parse_grid(text.as_bytes()).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[1].kind, Regression1D::Sine { alpha: 50.26548245743669 });
        assert!(parse_grid("kind,alpha,p,n,snr\nsine,,8,100,0.5\n".as_bytes()).is_err());
        assert!(parse_grid("kind,alpha,p,n,snr\ncubic,,8,100,0.5\n".as_bytes()).is_err());
    }
}
