//! CART regression trees.
//!
//! A node is split on the direction/threshold pair maximising the impurity
//! decrease
//!
//! ```text
//! L_n(i, τ) = (SSE(node) − SSE(left) − SSE(right)) / n_total
//! ```
//!
//! where `left = {x : x_i ≤ τ}` and `n_total` is the size of the sample the
//! tree is grown on. Candidate thresholds are the observed in-node values of
//! each direction. At every node a fresh subset of `m` directions is drawn
//! without replacement. Ties go to the lower direction index, then to the
//! smaller threshold.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::datacore::Dataset;
use crate::error::{Error, Result};
use crate::rng::task_rng;

/// Number of directions drawn at each node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mtry {
    /// `⌈a/3⌉` of the `a` available directions.
    #[default]
    Third,
    All,
    Count(usize),
    Fraction(f64),
}

impl Mtry {
    /// Resolves to a count in `1..=available`.
    pub fn resolve(self, available: usize) -> usize {
        let m = match self {
            Mtry::Third => available.div_ceil(3),
            Mtry::All => available,
            Mtry::Count(m) => m,
            Mtry::Fraction(f) => (f * available as f64).ceil() as usize,
        };
        m.clamp(1, available.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    #[default]
    DepthFirst,
    /// Expand the frontier node with the largest impurity decrease first.
    BestFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub mtry: Mtry,
    pub max_depth: Option<usize>,
    pub max_leaf_nodes: Option<usize>,
    pub min_samples_leaf: usize,
    pub growth: Growth,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            mtry: Mtry::Third,
            max_depth: None,
            max_leaf_nodes: None,
            min_samples_leaf: 1,
            growth: Growth::DepthFirst,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_leaf == 0 {
            return Err(Error::InvalidArgument("min_samples_leaf must be >= 1".into()));
        }
        if self.max_leaf_nodes == Some(0) {
            return Err(Error::InvalidArgument("max_leaf_nodes must be >= 1".into()));
        }
        match self.mtry {
            Mtry::Count(0) => Err(Error::InvalidArgument("mtry must be >= 1".into())),
            Mtry::Fraction(f) if !(f > 0.0 && f <= 1.0) => Err(Error::InvalidArgument(format!(
                "mtry fraction {f} outside (0, 1]"
            ))),
            _ => Ok(()),
        }
    }
}

/// A split direction, threshold and the impurity decrease it achieves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub feature: usize,
    pub threshold: f64,
    pub impurity_decrease: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub split: SplitSpec,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    /// Training rows routed to the node (with bootstrap multiplicity).
    pub count: usize,
    /// Mean training response of the node.
    pub mean: f64,
    pub branch: Option<Branch>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.branch.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub nodes: Vec<Node>,
    pub depth: usize,
    pub leaf_count: usize,
    pub n_features: usize,
}

impl TreeModel {
    /// Index of the leaf reached by a point given through a coordinate accessor.
    #[inline]
    pub fn leaf_for(&self, coord: impl Fn(usize) -> f64) -> usize {
        let mut id = 0;
        while let Some(b) = &self.nodes[id].branch {
            id = if coord(b.split.feature) <= b.split.threshold {
                b.left
            } else {
                b.right
            };
        }
        id
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: x.len(),
            });
        }
        Ok(self.nodes[self.leaf_for(|j| x[j])].mean)
    }

    /// Prediction for row `i` of a dataset with the training layout.
    #[inline]
    pub fn predict_row(&self, data: &Dataset, i: usize) -> f64 {
        self.nodes[self.leaf_for(|j| data.value(i, j))].mean
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn splits(&self) -> impl Iterator<Item = &SplitSpec> {
        self.nodes.iter().filter_map(|n| n.branch.as_ref().map(|b| &b.split))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Free-function form of [`TreeModel::predict`].
pub fn predict_tree(tree: &TreeModel, x: &[f64]) -> Result<f64> {
    tree.predict(x)
}

fn sse(values: impl Iterator<Item = f64> + Clone) -> (usize, f64) {
    let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n == 0 {
        return (0, 0.0);
    }
    let mean = sum / n as f64;
    (n, values.map(|v| (v - mean).powi(2)).sum())
}

/// Impurity decrease of splitting `node_rows` on `feature` at `threshold`.
///
/// Returns `Ok(None)` when either child would hold fewer than
/// `min_samples_leaf` rows (this includes thresholds outside the node's
/// range).
pub fn impurity_decrease(
    data: &Dataset,
    node_rows: &[usize],
    feature: usize,
    threshold: f64,
    n_total: usize,
    min_samples_leaf: usize,
) -> Result<Option<f64>> {
    if node_rows.is_empty() {
        return Err(Error::Empty("node rows"));
    }
    let col = data.column(feature);
    let y = data.response();
    let n_left = node_rows.iter().filter(|&&i| col[i] <= threshold).count();
    let n_right = node_rows.len() - n_left;
    if n_left < min_samples_leaf.max(1) || n_right < min_samples_leaf.max(1) {
        return Ok(None);
    }
    let all = node_rows.iter().map(|&i| y[i]);
    let left = node_rows.iter().filter(|&&i| col[i] <= threshold).map(|&i| y[i]);
    let right = node_rows.iter().filter(|&&i| col[i] > threshold).map(|&i| y[i]);
    let (_, s_all) = sse(all);
    let (_, s_left) = sse(left);
    let (_, s_right) = sse(right);
    Ok(Some(((s_all - s_left - s_right) / n_total as f64).max(0.0)))
}

/// Reusable buffers for the sorted scan.
#[derive(Default)]
struct ScanBuf {
    pairs: Vec<(f64, f64)>,
}

/// Best threshold for one direction: `(decrease, threshold)`.
fn scan_feature(
    data: &Dataset,
    node_rows: &[usize],
    feature: usize,
    node_mean: f64,
    n_total: usize,
    min_samples_leaf: usize,
    buf: &mut ScanBuf,
) -> Option<(f64, f64)> {
    let col = data.column(feature);
    let y = data.response();
    buf.pairs.clear();
    buf.pairs
        .extend(node_rows.iter().map(|&i| (col[i], y[i] - node_mean)));
    buf.pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let n = buf.pairs.len();
    let total: f64 = buf.pairs.iter().map(|p| p.1).sum();
    let msl = min_samples_leaf.max(1);
    let mut best: Option<(f64, f64)> = None;
    let mut left_sum = 0.0;
    for k in 0..n - 1 {
        left_sum += buf.pairs[k].1;
        let n_left = k + 1;
        let n_right = n - n_left;
        if buf.pairs[k].0 >= buf.pairs[k + 1].0 || n_left < msl || n_right < msl {
            continue;
        }
        let ml = left_sum / n_left as f64;
        let mr = (total - left_sum) / n_right as f64;
        let dec = (n_left as f64 * n_right as f64 / n as f64) * (ml - mr).powi(2) / n_total as f64;
        if best.map_or(true, |(b, _)| dec > b) {
            best = Some((dec, buf.pairs[k].0));
        }
    }
    best
}

fn mean_of(data: &Dataset, rows: &[usize]) -> f64 {
    let y = data.response();
    rows.iter().map(|&i| y[i]).sum::<f64>() / rows.len() as f64
}

fn is_pure(data: &Dataset, rows: &[usize]) -> bool {
    let y = data.response();
    let first = y[rows[0]];
    rows.iter().all(|&i| y[i] == first)
}

/// Optimal split of a node over `feasible_dirs`, or `None` when no feasible
/// split has a positive impurity decrease.
pub fn best_split(
    data: &Dataset,
    node_rows: &[usize],
    feasible_dirs: &[usize],
    n_total: usize,
    min_samples_leaf: usize,
) -> Option<SplitSpec> {
    best_split_buf(
        data,
        node_rows,
        feasible_dirs,
        n_total,
        min_samples_leaf,
        &mut ScanBuf::default(),
    )
}

fn best_split_buf(
    data: &Dataset,
    node_rows: &[usize],
    feasible_dirs: &[usize],
    n_total: usize,
    min_samples_leaf: usize,
    buf: &mut ScanBuf,
) -> Option<SplitSpec> {
    if node_rows.len() < 2 || is_pure(data, node_rows) {
        return None;
    }
    let mean = mean_of(data, node_rows);
    let mut dirs = feasible_dirs.to_vec();
    dirs.sort_unstable();
    dirs.dedup();
    let mut best: Option<SplitSpec> = None;
    for &feature in &dirs {
        if let Some((dec, threshold)) =
            scan_feature(data, node_rows, feature, mean, n_total, min_samples_leaf, buf)
        {
            if dec > 0.0 && best.map_or(true, |b| dec > b.impurity_decrease) {
                best = Some(SplitSpec {
                    feature,
                    threshold,
                    impurity_decrease: dec,
                });
            }
        }
    }
    best
}

struct Candidate {
    node: usize,
    rows: Vec<usize>,
    split: SplitSpec,
}

/// Grows a tree on `rows` of `data` with a generator seeded by `seed`.
pub fn grow_tree(data: &Dataset, rows: &[usize], config: &TreeConfig, seed: u64) -> Result<TreeModel> {
    let mut rng = task_rng(seed);
    grow_tree_with_rng(data, rows, config, &mut rng)
}

/// Grows a tree drawing the per-node direction subsets from `rng`.
pub fn grow_tree_with_rng<R: Rng + ?Sized>(
    data: &Dataset,
    rows: &[usize],
    config: &TreeConfig,
    rng: &mut R,
) -> Result<TreeModel> {
    config.validate()?;
    if rows.is_empty() {
        return Err(Error::Empty("tree rows"));
    }
    let p = data.n_features();
    let n_total = rows.len();
    let m = config.mtry.resolve(p);
    let max_leaves = config.max_leaf_nodes.unwrap_or(usize::MAX);
    let max_depth = config.max_depth.unwrap_or(usize::MAX);
    let mut buf = ScanBuf::default();

    let mut nodes = vec![Node {
        id: 0,
        parent: None,
        depth: 0,
        count: rows.len(),
        mean: mean_of(data, rows),
        branch: None,
    }];

    let mut evaluate = |node: &Node, rows: &[usize], rng: &mut R| -> Option<SplitSpec> {
        if p == 0 || node.depth >= max_depth || rows.len() < 2 * config.min_samples_leaf {
            return None;
        }
        let dirs: Vec<usize> = if m >= p {
            (0..p).collect()
        } else {
            rand::seq::index::sample(rng, p, m).into_vec()
        };
        best_split_buf(data, rows, &dirs, n_total, config.min_samples_leaf, &mut buf)
    };

    let mut frontier: Vec<Candidate> = Vec::new();
    if let Some(split) = evaluate(&nodes[0], rows, rng) {
        frontier.push(Candidate {
            node: 0,
            rows: rows.to_vec(),
            split,
        });
    }
    let mut leaf_count = 1;
    while leaf_count < max_leaves && !frontier.is_empty() {
        let pick = match config.growth {
            Growth::DepthFirst => frontier.len() - 1,
            Growth::BestFirst => {
                let mut best = 0;
                for (k, c) in frontier.iter().enumerate().skip(1) {
                    let b = &frontier[best];
                    let better = c.split.impurity_decrease > b.split.impurity_decrease
                        || (c.split.impurity_decrease == b.split.impurity_decrease && c.node < b.node);
                    if better {
                        best = k;
                    }
                }
                best
            }
        };
        let cand = frontier.swap_remove(pick);
        let SplitSpec {
            feature, threshold, ..
        } = cand.split;
        let col = data.column(feature);
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            cand.rows.iter().partition(|&&i| col[i] <= threshold);
        let depth = nodes[cand.node].depth + 1;
        let left_id = nodes.len();
        let right_id = left_id + 1;
        for (id, r) in [(left_id, &left_rows), (right_id, &right_rows)] {
            nodes.push(Node {
                id,
                parent: Some(cand.node),
                depth,
                count: r.len(),
                mean: mean_of(data, r),
                branch: None,
            });
        }
        nodes[cand.node].branch = Some(Branch {
            split: cand.split,
            left: left_id,
            right: right_id,
        });
        leaf_count += 1;

        let left_split = evaluate(&nodes[left_id], &left_rows, rng);
        let right_split = evaluate(&nodes[right_id], &right_rows, rng);
        // Right is pushed first so depth-first growth continues on the left.
        if let Some(split) = right_split {
            frontier.push(Candidate {
                node: right_id,
                rows: right_rows,
                split,
            });
        }
        if let Some(split) = left_split {
            frontier.push(Candidate {
                node: left_id,
                rows: left_rows,
                split,
            });
        }
    }

    let depth = nodes.iter().map(|n| n.depth).max().unwrap_or(0);
    Ok(TreeModel {
        nodes,
        depth,
        leaf_count,
        n_features: p,
    })
}
