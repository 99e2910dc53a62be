//! Closed-form and numerical calculators for split probabilities, the
//! population CART criterion, maximal signal and targeted-tree MSE.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::{golden_max, integrate, DEFAULT_ABS_TOL, DEFAULT_REL_TOL};

/// A real function on `[0, 1]`.
pub trait ScalarFn1D: Sync {
    fn eval(&self, x: f64) -> f64;

    /// Points where the function or its derivatives jump.
    fn breakpoints(&self) -> &[f64] {
        &[]
    }

    /// `Var(g(U))` for `U ~ U[0,1]` when known in closed form.
    fn analytic_variance(&self) -> Option<f64> {
        None
    }
}

/// Wraps a closure as a [`ScalarFn1D`].
pub struct FnScalar<F> {
    pub f: F,
    pub breakpoints: Vec<f64>,
}

impl<F: Fn(f64) -> f64 + Sync> FnScalar<F> {
    pub fn new(f: F) -> Self {
        Self { f, breakpoints: Vec::new() }
    }
}

impl<F: Fn(f64) -> f64 + Sync> ScalarFn1D for FnScalar<F> {
    fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

/// Univariate regression shapes, each scaled to unit variance under `U[0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regression1D {
    /// `√12·x`.
    Linear,
    /// `√2·sin(αx)`; unit variance when α is a multiple of 2π.
    Sine { alpha: f64 },
    /// `√180·(x − ½)²`.
    Quadratic,
    /// Four-piece polynomial with knots at ¼, ½, ¾, standardised numerically.
    Piecewise15,
}

const PIECEWISE_KNOTS: [f64; 3] = [0.25, 0.5, 0.75];

fn piecewise_raw(x: f64) -> f64 {
    if x < 0.25 {
        (2.0 * x + 1.0).powi(2) / 2.0
    } else if x < 0.5 {
        x + 3.0 / 8.0
    } else if x < 0.75 {
        -5.0 * (2.0 * x - 1.2).powi(2) + 43.0 / 40.0
    } else {
        2.0 * x - 7.0 / 8.0
    }
}

/// Standard deviation of the raw piecewise polynomial under `U[0,1]`.
pub fn piecewise_scale() -> f64 {
    static SCALE: OnceLock<f64> = OnceLock::new();
    *SCALE.get_or_init(|| {
        // Polynomial pieces of degree ≤ 4, so the 15-point rule is exact.
        let m = integrate(piecewise_raw, 0.0, 1.0, &PIECEWISE_KNOTS, 1e-15, 1e-15)
            .expect("polynomial integral")
            .value;
        let m2 = integrate(|x| piecewise_raw(x).powi(2), 0.0, 1.0, &PIECEWISE_KNOTS, 1e-15, 1e-15)
            .expect("polynomial integral")
            .value;
        (m2 - m * m).sqrt()
    })
}

impl ScalarFn1D for Regression1D {
    fn eval(&self, x: f64) -> f64 {
        match *self {
            Regression1D::Linear => 12f64.sqrt() * x,
            Regression1D::Sine { alpha } => 2f64.sqrt() * (alpha * x).sin(),
            Regression1D::Quadratic => 180f64.sqrt() * (x - 0.5).powi(2),
            Regression1D::Piecewise15 => piecewise_raw(x) / piecewise_scale(),
        }
    }

    fn breakpoints(&self) -> &[f64] {
        match self {
            Regression1D::Piecewise15 => &PIECEWISE_KNOTS,
            _ => &[],
        }
    }

    fn analytic_variance(&self) -> Option<f64> {
        match *self {
            Regression1D::Linear | Regression1D::Quadratic => Some(1.0),
            Regression1D::Sine { alpha } => {
                let m = 2f64.sqrt() * (1.0 - alpha.cos()) / alpha;
                let m2 = 1.0 - (2.0 * alpha).sin() / (2.0 * alpha);
                Some(m2 - m * m)
            }
            Regression1D::Piecewise15 => None,
        }
    }
}

fn integral_of(g: &dyn ScalarFn1D, lo: f64, hi: f64) -> Result<f64> {
    Ok(integrate(|x| g.eval(x), lo, hi, g.breakpoints(), DEFAULT_ABS_TOL, DEFAULT_REL_TOL)?.value)
}

/// Population impurity decrease of splitting `[0,1]` at `τ`:
/// `Var g(U) − τ·Var(g(U) | U ≤ τ) − (1−τ)·Var(g(U) | U > τ)`.
pub fn population_criterion(g: &dyn ScalarFn1D, tau: f64) -> Result<f64> {
    population_criterion_on(g, 0.0, 1.0, tau)
}

/// The same criterion with `U` uniform on the node interval `[lo, hi]`.
pub fn population_criterion_on(g: &dyn ScalarFn1D, lo: f64, hi: f64, tau: f64) -> Result<f64> {
    if !(lo < tau && tau < hi) {
        return Err(Error::InvalidArgument(format!("tau {tau} outside ({lo}, {hi})")));
    }
    let a = integral_of(g, lo, tau)?;
    let b = integral_of(g, tau, hi)?;
    let len = hi - lo;
    let value = (a * a / (tau - lo) + b * b / (hi - tau) - (a + b).powi(2) / len) / len;
    Ok(value.max(0.0))
}

/// `2g(τ) − m_L − m_R`; zero at interior stationary points of the
/// criterion on `[lo, hi]`, positive to the left of a maximum.
fn stationarity(g: &dyn ScalarFn1D, lo: f64, hi: f64, tau: f64) -> Result<f64> {
    let m_l = integral_of(g, lo, tau)? / (tau - lo);
    let m_r = integral_of(g, tau, hi)? / (hi - tau);
    Ok((m_l - m_r).signum() * (2.0 * g.eval(tau) - m_l - m_r))
}

/// Maximises the criterion on `[lo, hi]` within the bracket `[a, b]`:
/// golden section first, then bisection on the stationarity condition,
/// which pins the argmax to rounding level instead of `√ε`.
fn refine_argmax(g: &dyn ScalarFn1D, lo: f64, hi: f64, a: f64, b: f64) -> (f64, f64) {
    let crit = |t: f64| {
        if t <= lo || t >= hi {
            f64::NEG_INFINITY
        } else {
            population_criterion_on(g, lo, hi, t).unwrap_or(f64::NEG_INFINITY)
        }
    };
    let (t0, v0) = golden_max(crit, a, b, 1e-12 * (hi - lo));
    let delta = 1e-6 * (hi - lo);
    let (mut u, mut w) = ((t0 - delta).max(a), (t0 + delta).min(b));
    let h = |t: f64| stationarity(g, lo, hi, t).unwrap_or(f64::NAN);
    if u > lo && w < hi && h(u) > 0.0 && h(w) < 0.0 {
        for _ in 0..100 {
            let mid = 0.5 * (u + w);
            if mid <= u || mid >= w {
                break;
            }
            if h(mid) > 0.0 {
                u = mid;
            } else {
                w = mid;
            }
        }
        let t = 0.5 * (u + w);
        let v = crit(t);
        if v >= v0 - 1e-14 * v0.abs().max(1.0) {
            return (t, v);
        }
    }
    (t0, v0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CstarResult {
    pub value: f64,
    pub argmax: f64,
}

/// Maximal population impurity decrease along `g`: grid search over
/// `τ = i/grid_size` followed by golden-section refinement.
pub fn cstar_numeric(g: &dyn ScalarFn1D, grid_size: usize) -> Result<CstarResult> {
    if grid_size < 1000 {
        return Err(Error::InvalidArgument(format!("grid size {grid_size} < 1000")));
    }
    let step = 1.0 / grid_size as f64;
    let cells: Vec<f64> = (0..grid_size)
        .map(|i| integral_of(g, i as f64 * step, (i + 1) as f64 * step))
        .collect::<Result<_>>()?;
    let mu: f64 = cells.iter().sum();
    let mut left = 0.0;
    let mut best = (0.0, f64::NEG_INFINITY, 0usize);
    for i in 1..grid_size {
        left += cells[i - 1];
        let tau = i as f64 * step;
        let right = mu - left;
        let v = left * left / tau + right * right / (1.0 - tau) - mu * mu;
        if v > best.1 {
            best = (tau, v, i);
        }
    }
    let lo = (best.2 - 1) as f64 * step;
    let hi = (best.2 + 1) as f64 * step;
    let (t_ref, v_ref) = refine_argmax(g, 0.0, 1.0, lo.max(step * 1e-3), hi.min(1.0 - step * 1e-3));
    let grid_val = population_criterion(g, best.0)?;
    Ok(if v_ref >= grid_val {
        CstarResult { value: v_ref, argmax: t_ref }
    } else {
        CstarResult { value: grid_val, argmax: best.0 }
    })
}

/// `(1/16)·max_{i ∈ strong_in_mtry} β_i²·Leb(A_i)²` under a linear
/// regression function; zero when no strong direction is available.
pub fn cstar_linear(beta: &[f64], intervals: &[(f64, f64)], strong_in_mtry: &[usize]) -> Result<f64> {
    if beta.len() != intervals.len() {
        return Err(Error::DimensionMismatch { expected: beta.len(), got: intervals.len() });
    }
    let mut best: f64 = 0.0;
    for &i in strong_in_mtry {
        let (lo, hi) = *intervals.get(i).ok_or_else(|| {
            Error::InvalidArgument(format!("direction {i} outside 0..{}", beta.len()))
        })?;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::InvalidArgument(format!("interval [{lo}, {hi}] not within [0, 1]")));
        }
        best = best.max(beta[i].powi(2) * (hi - lo).powi(2) / 16.0);
    }
    Ok(best)
}

/// Upper bound on the oscillating design's maximal signal, `4/(α − 2)`.
pub fn sine_bound(alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} must exceed 2")));
    }
    Ok(4.0 / (alpha - 2.0))
}

fn choose_u128(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for j in 0..k {
        // Exact: c·(n−j) is divisible by (j+1) at every step.
        c = c * (n - j) as u128 / (j + 1) as u128;
    }
    c
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Binomial coefficient as a float: exact integers up to `n = 60`,
/// log-gamma beyond.
pub fn choose(n: u64, k: u64) -> f64 {
    if k > n {
        0.0
    } else if n <= 60 {
        choose_u128(n, k) as f64
    } else {
        ln_choose(n, k).exp()
    }
}

/// Probability that an `m`-subset drawn uniformly from `a` candidates
/// contains at least one of the `s_a` strong ones:
/// `1 − 1{m < a−s_a}·C(a−s_a, m)/C(a, m)`.
pub fn upper_bound_split_prob(a: u64, s_a: u64, m: u64) -> Result<f64> {
    if s_a > a || m == 0 || m > a {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= s <= a and 1 <= m <= a, got a={a}, s={s_a}, m={m}"
        )));
    }
    let weak = a - s_a;
    if m > weak {
        return Ok(1.0);
    }
    let miss = if a <= 60 {
        choose_u128(weak, m) as f64 / choose_u128(a, m) as f64
    } else {
        (ln_choose(weak, m) - ln_choose(a, m)).exp()
    };
    Ok(1.0 - miss)
}

/// The same probability as an exact fraction `(hits, subsets)` of
/// `m`-subsets, for `a ≤ 60`.
pub fn split_prob_fraction(a: u64, s_a: u64, m: u64) -> Result<(u128, u128)> {
    upper_bound_split_prob(a, s_a, m)?;
    if a > 60 {
        return Err(Error::InvalidArgument(format!("exact fraction limited to a <= 60, got {a}")));
    }
    let total = choose_u128(a, m);
    let miss = if m > a - s_a { 0 } else { choose_u128(a - s_a, m) };
    Ok((total - miss, total))
}

/// Probability that a node's candidate set hits a strong predictor.
pub fn rho(p: u64, s: u64, m: u64) -> Result<f64> {
    upper_bound_split_prob(p, s, m)
}

fn check_pow2_arg(x: f64) -> Result<()> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("power-of-two rounding needs finite x >= 1, got {x}")));
    }
    Ok(())
}

/// Largest power of two not above `x`.
pub fn floor_pow2(x: f64) -> Result<f64> {
    check_pow2_arg(x)?;
    // x ≥ 1 is normal, so the biased exponent is exactly ⌊log₂ x⌋.
    let exp = ((x.to_bits() >> 52) & 0x7ff) as i32 - 1023;
    Ok(2f64.powi(exp))
}

/// Smallest power of two not below `x`.
pub fn ceil_pow2(x: f64) -> Result<f64> {
    let lo = floor_pow2(x)?;
    Ok(if lo == x { lo } else { 2.0 * lo })
}

/// `floor_pow2(num/den)` in exact integer arithmetic.
pub fn floor_pow2_ratio(num: u64, den: u64) -> Result<u64> {
    if den == 0 || num < den {
        return Err(Error::InvalidArgument(format!("{num}/{den} is not a finite value >= 1")));
    }
    let mut v = 1u64;
    while (2 * v as u128) * den as u128 <= num as u128 {
        v *= 2;
    }
    Ok(v)
}

/// `ceil_pow2(num/den)` in exact integer arithmetic.
pub fn ceil_pow2_ratio(num: u64, den: u64) -> Result<u64> {
    if den == 0 || num < den {
        return Err(Error::InvalidArgument(format!("{num}/{den} is not a finite value >= 1")));
    }
    let mut v = 1u64;
    while (v as u128) * (den as u128) < num as u128 {
        v *= 2;
    }
    Ok(v)
}

/// MSE of the best-first targeted tree with `L` leaves under a linear
/// regression function with slope `β₁` on the strong direction.
pub fn mse_targeted(leaves: u64, beta1: f64) -> Result<f64> {
    if leaves == 0 {
        return Err(Error::InvalidArgument("leaf count must be >= 1".into()));
    }
    let v = floor_pow2_ratio(leaves, 1)? as f64;
    let l = leaves as f64;
    Ok(beta1 * beta1 * (7.0 * v - 3.0 * l) / (48.0 * v * v * v))
}

/// Leaves and MSE of a targeted tree grown best-first on the population
/// criterion, computed by quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericTree {
    pub leaves: Vec<(f64, f64)>,
    pub mse: f64,
}

/// Grows `L` leaves on `[0,1]` by repeatedly splitting the interval whose
/// best split yields the largest unconditional impurity decrease
/// `Leb(A)·L*_A(τ)`, then integrates `Σ_A ∫_A (g − ḡ_A)²`.
pub fn targeted_tree_numeric(g: &dyn ScalarFn1D, leaves: usize) -> Result<NumericTree> {
    if leaves == 0 {
        return Err(Error::InvalidArgument("leaf count must be >= 1".into()));
    }
    let best_split = |lo: f64, hi: f64| -> (f64, f64) {
        let crit = |t: f64| population_criterion_on(g, lo, hi, t).unwrap_or(f64::NEG_INFINITY);
        let grid = 64;
        let h = (hi - lo) / grid as f64;
        let (i, _) = (1..grid)
            .map(|i| (i, crit(lo + i as f64 * h)))
            .fold((1, f64::NEG_INFINITY), |acc, c| if c.1 > acc.1 { c } else { acc });
        let (t, v) = refine_argmax(g, lo, hi, lo + (i - 1) as f64 * h, lo + (i + 1) as f64 * h);
        (t, v * (hi - lo))
    };
    let mut frontier: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (t, d) = best_split(0.0, 1.0);
    frontier.push((0.0, 1.0, t, d));
    while frontier.len() < leaves {
        // Ties resolve to the leftmost interval.
        let k = (0..frontier.len())
            .fold(0, |best, k| if frontier[k].3 > frontier[best].3 { k } else { best });
        let (lo, hi, tau, _) = frontier.remove(k);
        let (tl, dl) = best_split(lo, tau);
        let (tr, dr) = best_split(tau, hi);
        frontier.insert(k, (tau, hi, tr, dr));
        frontier.insert(k, (lo, tau, tl, dl));
    }
    let mut mse = 0.0;
    for &(lo, hi, _, _) in &frontier {
        let m = integral_of(g, lo, hi)? / (hi - lo);
        mse += integrate(|x| (g.eval(x) - m).powi(2), lo, hi, g.breakpoints(), 1e-15, 1e-13)?.value;
    }
    Ok(NumericTree {
        leaves: frontier.iter().map(|f| (f.0, f.1)).collect(),
        mse,
    })
}

/// Strong/weak indicators of the `L − 1` splits of a tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSequence {
    pub z: Vec<bool>,
    /// Number of strong splits.
    pub n: usize,
    /// 1-based index of the first weak split; 1 if none.
    pub l0: usize,
    /// 1-based index of the first strong split; 1 if none.
    pub l1: usize,
}

impl SplitSequence {
    pub fn from_indicators(z: Vec<bool>) -> Self {
        let n = z.iter().filter(|b| **b).count();
        let first = |v: bool| z.iter().position(|b| *b == v).map_or(1, |i| i + 1);
        let (l0, l1) = (first(false), first(true));
        Self { z, n, l0, l1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmfVariant {
    /// Joint law of `(N, ℓ₀)`.
    FirstWeak,
    /// Joint law of `(N, ℓ₁)`.
    FirstStrong,
}

fn binom_pmf(k: i64, n: i64, p: f64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return 0.0;
    }
    choose(n as u64, k as u64) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

/// Joint pmf of the strong-split count and a first-occurrence index for a
/// tree with `L` leaves whose splits are strong independently with
/// probability `ρ`. Keys are `(n, k)`; only the support is stored.
pub fn pmf_joint(leaves: usize, rho: f64, which: PmfVariant) -> Result<BTreeMap<(usize, usize), f64>> {
    if leaves < 2 {
        return Err(Error::InvalidArgument("pmf needs L >= 2".into()));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidArgument(format!("rho {rho} outside [0, 1]")));
    }
    let l = leaves as i64;
    let mut table = BTreeMap::new();
    for n in 0..l {
        if n == 0 || n == l - 1 {
            table.insert((n as usize, 1), rho.powi(n as i32) * (1.0 - rho).powi((l - 1 - n) as i32));
            continue;
        }
        match which {
            PmfVariant::FirstWeak => {
                for k in 1..=n + 1 {
                    let p = rho.powi((k - 1) as i32) * (1.0 - rho) * binom_pmf(n + 1 - k, l - 1 - k, rho);
                    table.insert((n as usize, k as usize), p);
                }
            }
            PmfVariant::FirstStrong => {
                for k in 1..=l - n {
                    let p = rho * (1.0 - rho).powi((k - 1) as i32) * binom_pmf(n - 1, l - 1 - k, rho);
                    table.insert((n as usize, k as usize), p);
                }
            }
        }
    }
    Ok(table)
}

/// Leaf count of the targeted tree bounding an ordinary tree from above.
pub fn upper_leaf_count(leaves: usize, n: usize, l0: usize) -> Result<u64> {
    let (l, n, k) = (leaves as u64, n as u64, l0 as u64);
    if n >= l || k == 0 {
        return Err(Error::InvalidArgument(format!("need n < L and l0 >= 1, got n={n}, L={l}, l0={k}")));
    }
    // k + (n−k+1)/(k(L−n)) as a single fraction.
    let den = k * (l - n);
    let num = k * den + (n + 1).checked_sub(k).ok_or_else(|| {
        Error::InvalidArgument(format!("l0={k} exceeds n+1={}", n + 1))
    })?;
    floor_pow2_ratio(num, den)
}

/// Leaf count of the targeted tree bounding an ordinary tree from below.
pub fn lower_leaf_count(n: usize, l1: usize) -> Result<u64> {
    if l1 == 0 {
        return Err(Error::InvalidArgument("l1 must be >= 1".into()));
    }
    ceil_pow2_ratio((l1 + n) as u64, l1 as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseBounds {
    pub upper: f64,
    pub lower: f64,
}

/// Expected-value bounds on the MSE of an ordinary tree with `L` leaves.
pub fn mse_bounds_ordinary(leaves: usize, rho: f64, beta1: f64) -> Result<MseBounds> {
    let mut upper = 0.0;
    for ((n, k), p) in pmf_joint(leaves, rho, PmfVariant::FirstWeak)? {
        if p > 0.0 {
            upper += p * mse_targeted(upper_leaf_count(leaves, n, k)?, beta1)?;
        }
    }
    let mut lower = 0.0;
    for ((n, k), p) in pmf_joint(leaves, rho, PmfVariant::FirstStrong)? {
        if p > 0.0 {
            lower += p * mse_targeted(lower_leaf_count(n, k)?, beta1)?;
        }
    }
    Ok(MseBounds { upper, lower })
}

/// Noise variance giving signal-to-noise ratio `snr` when `Var f(X) = 1`.
pub fn snr_to_sigma2(snr: f64) -> Result<f64> {
    if !(snr > 0.0 && snr <= 1.0) {
        return Err(Error::InvalidArgument(format!("snr {snr} outside (0, 1]")));
    }
    Ok((1.0 - snr) / snr)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub p: u64,
    pub s: u64,
    pub m: u64,
    pub leaves: u64,
    pub beta1: f64,
    pub rho: f64,
}

impl TheoryParams {
    /// Fills `ρ` from `(p, s, m)`.
    pub fn from_design(p: u64, s: u64, m: u64, leaves: u64, beta1: f64) -> Result<Self> {
        let params = Self { p, s, m, leaves, beta1, rho: rho(p, s, m)? };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s > self.p || self.m == 0 || self.m > self.p || self.leaves == 0 {
            return Err(Error::InvalidArgument(format!("inconsistent parameters {self:?}")));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidArgument(format!("rho {} outside [0, 1]", self.rho)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsCurveRow {
    pub leaves: usize,
    pub rho: f64,
    pub upper: f64,
    pub lower: f64,
    pub targeted: f64,
}

/// Bounds and targeted MSE over a `ρ` grid for each leaf count.
pub fn bounds_curve(leaf_counts: &[usize], rho_grid: &[f64], beta1: f64) -> Result<Vec<BoundsCurveRow>> {
    let mut rows = Vec::with_capacity(leaf_counts.len() * rho_grid.len());
    for &l in leaf_counts {
        let targeted = mse_targeted(l as u64, beta1)?;
        for &r in rho_grid {
            let b = mse_bounds_ordinary(l, r, beta1)?;
            rows.push(BoundsCurveRow { leaves: l, rho: r, upper: b.upper, lower: b.lower, targeted });
        }
    }
    Ok(rows)
}

pub fn write_bounds_curve_csv<W: std::io::Write>(rows: &[BoundsCurveRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["L", "rho", "upper", "lower", "targeted"])?;
    for r in rows {
        w.write_record([
            r.leaves.to_string(),
            r.rho.to_string(),
            r.upper.to_string(),
            r.lower.to_string(),
            r.targeted.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Io { path: "<csv writer>".into(), source: e })?;
    Ok(())
}
