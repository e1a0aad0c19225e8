use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::tree::{grow, DecisionTree};
use super::{check_width, Dataset, ModelError, TrainConfig};

/// Bagged CART trees combined by majority vote.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    pub width: usize,
    pub trees: Vec<DecisionTree>,
    /// Seed each tree was grown from.
    pub seeds: Vec<u64>,
}

/// Fraction of trees voting to blame `v`.
pub fn eval_forest(m: &RandomForest, v: &[f64]) -> Result<f64, ModelError> {
    check_width(m.width, v)?;
    let votes = m.trees.iter().filter(|t| t.vote(v)).count();
    Ok(votes as f64 / m.trees.len() as f64)
}

pub fn train_forest(data: &Dataset, cfg: &TrainConfig) -> Result<RandomForest, ModelError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let mut master = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seeds: Vec<u64> = (0..cfg.n_estimators).map(|_| master.gen()).collect();
    let width = data.width();
    let k = (width as f64).sqrt().ceil() as usize;
    let trees = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = data.len();
            let rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let subsample = cfg.feature_subsampling.then_some((&mut rng, k));
            grow(data, &rows, cfg.impurity_threshold, subsample)
        })
        .collect();
    Ok(RandomForest {
        width,
        trees,
        seeds,
    })
}
