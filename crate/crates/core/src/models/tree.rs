use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;

use super::{check_width, Dataset, ModelError, TrainConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        n_true: u64,
        n_total: u64,
    },
    /// Rows with `v[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

impl TreeNode {
    /// Fraction of training rows at this leaf labelled true.
    pub fn p_true(&self) -> Option<f64> {
        match self {
            TreeNode::Leaf { n_true, n_total } => Some(*n_true as f64 / *n_total as f64),
            TreeNode::Split { .. } => None,
        }
    }
}

/// A CART tree; `nodes[0]` is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub width: usize,
    pub nodes: Vec<TreeNode>,
}

impl DecisionTree {
    pub fn leaf_for(&self, v: &[f64]) -> &TreeNode {
        let mut node = &self.nodes[0];
        while let TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        } = node
        {
            node = &self.nodes[if v[*feature] <= *threshold {
                *left
            } else {
                *right
            }];
        }
        node
    }

    pub fn depth(&self) -> usize {
        fn go(t: &DecisionTree, i: usize) -> usize {
            match &t.nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
            }
        }
        go(self, 0)
    }

    pub fn leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    /// Majority vote of the routed leaf; ties vote false.
    pub fn vote(&self, v: &[f64]) -> bool {
        match self.leaf_for(v) {
            TreeNode::Leaf { n_true, n_total } => n_true * 2 > *n_total,
            TreeNode::Split { .. } => unreachable!(),
        }
    }
}

pub fn eval_tree(m: &DecisionTree, v: &[f64]) -> Result<f64, ModelError> {
    check_width(m.width, v)?;
    Ok(m.leaf_for(v).p_true().unwrap_or(0.0))
}

pub fn train_tree(data: &Dataset, cfg: &TrainConfig) -> Result<DecisionTree, ModelError> {
    if data.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let rows: Vec<usize> = (0..data.len()).collect();
    Ok(grow(data, &rows, cfg.impurity_threshold, None))
}

fn gini(n_true: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = n_true as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct Best {
    score: f64,
    feature: usize,
    threshold: f64,
}

/// Lowest weighted child impurity over the thresholds of one feature,
/// scanning rows presorted by that feature.
fn best_threshold(
    data: &Dataset,
    sorted: &[usize],
    feature: usize,
    n_true: usize,
    best: &mut Option<Best>,
) {
    let x = data.rows();
    let y = data.labels();
    let n = sorted.len();
    let mut left_true = 0;
    for i in 0..n - 1 {
        if y[sorted[i]] {
            left_true += 1;
        }
        let a = x[sorted[i]][feature];
        let b = x[sorted[i + 1]][feature];
        if a >= b {
            continue;
        }
        let nl = i + 1;
        let nr = n - nl;
        let score =
            (nl as f64 * gini(left_true, nl) + nr as f64 * gini(n_true - left_true, nr)) / n as f64;
        let threshold = a + (b - a) / 2.0;
        if best.as_ref().is_none_or(|bst| score < bst.score - 1e-12) {
            *best = Some(Best {
                score,
                feature,
                threshold,
            });
        }
    }
}

struct Pending {
    slot: usize,
    sorted: Vec<Vec<usize>>,
}

/// Grows a tree on `rows` (which may repeat). With `subsample`, each node
/// considers a random subset of that many features and falls back to the
/// rest when none of them separates the rows.
pub(crate) fn grow(
    data: &Dataset,
    rows: &[usize],
    impurity_threshold: f64,
    mut subsample: Option<(&mut ChaCha8Rng, usize)>,
) -> DecisionTree {
    let width = data.width();
    let x = data.rows();
    let y = data.labels();
    let sorted: Vec<Vec<usize>> = (0..width)
        .map(|j| {
            let mut s = rows.to_vec();
            s.sort_by(|&a, &b| x[a][j].total_cmp(&x[b][j]));
            s
        })
        .collect();

    let mut nodes = vec![TreeNode::Leaf {
        n_true: 0,
        n_total: 0,
    }];
    let mut stack = vec![Pending { slot: 0, sorted }];
    let mut goes_left = vec![false; data.len()];

    while let Some(Pending { slot, sorted }) = stack.pop() {
        let members = &sorted[0];
        let n = members.len();
        let n_true = members.iter().filter(|&&i| y[i]).count();
        let leaf = TreeNode::Leaf {
            n_true: n_true as u64,
            n_total: n as u64,
        };
        if width == 0 || gini(n_true, n) <= impurity_threshold {
            nodes[slot] = leaf;
            continue;
        }

        let mut candidates: Vec<usize> = match subsample.as_mut() {
            Some((rng, k)) if *k < width => {
                let mut c = sample(*rng, width, *k).into_vec();
                c.sort_unstable();
                c
            }
            _ => (0..width).collect(),
        };
        let mut best = None;
        for &j in &candidates {
            best_threshold(data, &sorted[j], j, n_true, &mut best);
        }
        if best.is_none() && candidates.len() < width {
            candidates = (0..width).filter(|j| !candidates.contains(j)).collect();
            for &j in &candidates {
                best_threshold(data, &sorted[j], j, n_true, &mut best);
            }
        }
        let Some(Best {
            feature, threshold, ..
        }) = best
        else {
            nodes[slot] = leaf;
            continue;
        };

        for &i in members {
            goes_left[i] = x[i][feature] <= threshold;
        }
        let (left, right): (Vec<Vec<usize>>, Vec<Vec<usize>>) = sorted
            .into_iter()
            .map(|s| s.into_iter().partition(|&i| goes_left[i]))
            .unzip();
        let l = nodes.len();
        nodes.push(TreeNode::Leaf {
            n_true: 0,
            n_total: 0,
        });
        nodes.push(TreeNode::Leaf {
            n_true: 0,
            n_total: 0,
        });
        nodes[slot] = TreeNode::Split {
            feature,
            threshold,
            left: l,
            right: l + 1,
        };
        stack.push(Pending {
            slot: l + 1,
            sorted: right,
        });
        stack.push(Pending {
            slot: l,
            sorted: left,
        });
    }
    DecisionTree { width, nodes }
}
