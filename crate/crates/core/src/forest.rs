//! Bagged ensembles of CART trees.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cart::{grow_tree_with_rng, TreeConfig, TreeModel};
use crate::datacore::Dataset;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, task_rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Resample `n` rows with replacement for every tree.
    pub bootstrap: bool,
    pub tree: TreeConfig,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 500,
            bootstrap: true,
            tree: TreeConfig {
                max_depth: Some(3),
                ..TreeConfig::default()
            },
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub config: ForestConfig,
    pub feature_names: Vec<String>,
    pub trees: Vec<TreeModel>,
}

/// Seed of tree `b` under master seed `master`.
pub fn tree_seed(master: u64, b: usize) -> u64 {
    derive_seed(master, &[b as u64])
}

/// Grows tree `b` of a forest: bootstrap draw (if enabled) followed by the
/// tree's own direction sampling, all from the tree's seed stream.
pub fn fit_tree_at(data: &Dataset, config: &ForestConfig, b: usize) -> Result<TreeModel> {
    let n = data.n_rows();
    let mut rng = task_rng(tree_seed(config.seed, b));
    let rows: Vec<usize> = if config.bootstrap {
        (0..n).map(|_| rng.gen_range(0..n)).collect()
    } else {
        (0..n).collect()
    };
    grow_tree_with_rng(data, &rows, &config.tree, &mut rng)
}

pub fn fit_forest(data: &Dataset, config: &ForestConfig) -> Result<ForestModel> {
    if data.n_rows() == 0 {
        return Err(Error::Empty("dataset"));
    }
    if config.n_trees == 0 {
        return Err(Error::InvalidArgument("n_trees must be >= 1".into()));
    }
    config.tree.validate()?;
    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(|b| fit_tree_at(data, config, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestModel {
        config: *config,
        feature_names: data.feature_names().to_vec(),
        trees,
    })
}

impl ForestModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                got,
            });
        }
        Ok(())
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x.len())?;
        let sum: f64 = self.trees.iter().map(|t| t.nodes[t.leaf_for(|j| x[j])].mean).sum();
        Ok(sum / self.trees.len() as f64)
    }

    /// Forest predictions for every row of `data`.
    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<f64>> {
        self.check_dim(data.n_features())?;
        Ok((0..data.n_rows())
            .map(|i| {
                let s: f64 = self.trees.iter().map(|t| t.predict_row(data, i)).sum();
                s / self.trees.len() as f64
            })
            .collect())
    }

    /// Per-tree predictions: `out[i][b]` is tree `b` evaluated at row `i`.
    pub fn tree_predictions(&self, data: &Dataset) -> Result<Vec<Vec<f64>>> {
        self.check_dim(data.n_features())?;
        Ok((0..data.n_rows())
            .into_par_iter()
            .map(|i| self.trees.iter().map(|t| t.predict_row(data, i)).collect())
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn predict_forest(forest: &ForestModel, x: &[f64]) -> Result<f64> {
    forest.predict(x)
}

pub fn tree_predictions(forest: &ForestModel, data: &Dataset) -> Result<Vec<Vec<f64>>> {
    forest.tree_predictions(data)
}
