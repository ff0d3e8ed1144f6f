//! Random forest of Gini-split classification trees.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::logistic::check_training_data;
use super::matrix::CsrMatrix;
use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` grows until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Train each tree on a bootstrap resample; otherwise on all rows.
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: Some(16),
            min_leaf: 2,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        positive_fraction: f64,
    },
}

/// Flat tree; node 0 is the root. Rows with `x[feature] <= threshold` go
/// left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict_with<F: Fn(usize) -> f64>(&self, value: F) -> f64 {
        let mut at = 0usize;
        loop {
            match self.nodes[at] {
                Node::Leaf { positive_fraction } => return positive_fraction,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if value(feature as usize) <= threshold {
                        left as usize
                    } else {
                        right as usize
                    };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + walk(nodes, left as usize).max(walk(nodes, right as usize))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub bootstrap: bool,
    pub seed: u64,
    pub dim: usize,
}

struct Builder<'a> {
    cols: &'a [Vec<f64>],
    y: &'a [bool],
    cfg: &'a ForestConfig,
    n_sampled: usize,
    rng: ChaCha8Rng,
    features: Vec<usize>,
    nodes: Vec<Node>,
    pairs: Vec<(f64, bool)>,
}

#[derive(Clone, Copy)]
struct Candidate {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_> {
    fn leaf(&mut self, pos: usize, n: usize) -> u32 {
        self.nodes.push(Node::Leaf {
            positive_fraction: pos as f64 / n as f64,
        });
        (self.nodes.len() - 1) as u32
    }

    /// Best split on one feature. Impurity is the count-weighted Gini sum
    /// `Σ 2·pos·neg / n` over both children.
    fn best_on(&mut self, rows: &[usize], feature: usize) -> Option<Candidate> {
        let col = &self.cols[feature];
        self.pairs.clear();
        self.pairs.extend(rows.iter().map(|&r| (col[r], self.y[r])));
        self.pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = self.pairs.len();
        let total_pos = self.pairs.iter().filter(|p| p.1).count();
        let min_leaf = self.cfg.min_leaf.max(1);
        let gini = |pos: usize, cnt: usize| -> f64 {
            if cnt == 0 {
                0.0
            } else {
                2.0 * pos as f64 * (cnt - pos) as f64 / cnt as f64
            }
        };
        let mut best: Option<Candidate> = None;
        let mut left_pos = 0;
        for i in 0..n - 1 {
            if self.pairs[i].1 {
                left_pos += 1;
            }
            let (a, b) = (self.pairs[i].0, self.pairs[i + 1].0);
            if a == b {
                continue;
            }
            let left_n = i + 1;
            let right_n = n - left_n;
            if left_n < min_leaf || right_n < min_leaf {
                continue;
            }
            let impurity = gini(left_pos, left_n) + gini(total_pos - left_pos, right_n);
            if best.is_none_or(|c| impurity < c.impurity) {
                let mid = a + (b - a) / 2.0;
                let threshold = if mid < b { mid } else { a };
                best = Some(Candidate {
                    impurity,
                    feature,
                    threshold,
                });
            }
        }
        best
    }

    fn pick(&mut self, rows: &[usize], features: &[usize], best: &mut Option<Candidate>) {
        for &f in features {
            if let Some(c) = self.best_on(rows, f) {
                let better = match best {
                    None => true,
                    Some(b) => {
                        c.impurity < b.impurity
                            || (c.impurity == b.impurity
                                && (c.feature, c.threshold) < (b.feature, b.threshold))
                    }
                };
                if better {
                    *best = Some(c);
                }
            }
        }
    }

    fn grow(&mut self, rows: &mut [usize], depth: usize) -> u32 {
        let n = rows.len();
        let pos = rows.iter().filter(|&&r| self.y[r]).count();
        let depth_exhausted = self.cfg.max_depth.is_some_and(|m| depth >= m);
        if depth_exhausted || pos == 0 || pos == n || n < 2 * self.cfg.min_leaf.max(1) {
            return self.leaf(pos, n);
        }

        // ⌈√d⌉ features per node, visited in ascending index order; the rest
        // are tried only when none of the sample can split.
        let d = self.features.len();
        for i in 0..self.n_sampled {
            let j = self.rng.random_range(i..d);
            self.features.swap(i, j);
        }
        let mut sampled = self.features[..self.n_sampled].to_vec();
        sampled.sort_unstable();
        let mut best = None;
        self.pick(rows, &sampled, &mut best);
        if best.is_none() {
            let mut rest = self.features[self.n_sampled..].to_vec();
            rest.sort_unstable();
            self.pick(rows, &rest, &mut best);
        }
        let Some(split) = best else {
            return self.leaf(pos, n);
        };

        let col = &self.cols[split.feature];
        let mut k = 0;
        for i in 0..n {
            if col[rows[i]] <= split.threshold {
                rows.swap(i, k);
                k += 1;
            }
        }
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf {
            positive_fraction: 0.0,
        });
        let (l, r) = rows.split_at_mut(k);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[at] = Node::Split {
            feature: split.feature as u32,
            threshold: split.threshold,
            left,
            right,
        };
        at as u32
    }
}

/// Trains `cfg.n_trees` trees in parallel. Tree `t` draws from ChaCha stream
/// `t` of `seed`, so the result does not depend on thread scheduling.
pub fn train_forest(
    x: &CsrMatrix,
    y: &[bool],
    cfg: &ForestConfig,
    seed: u64,
) -> Result<ForestModel, ModelError> {
    check_training_data(x, y)?;
    if cfg.n_trees == 0 {
        return Err(ModelError::InvalidConfig("n_trees must be > 0".into()));
    }
    let cols = x.to_columns();
    let n = x.n_rows();
    let d = x.n_cols();
    let n_sampled = ((d as f64).sqrt().ceil() as usize).clamp(1, d.max(1));

    let trees: Vec<Tree> = (0..cfg.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let mut rows: Vec<usize> = if cfg.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let mut features: Vec<usize> = (0..d).collect();
            features.shuffle(&mut rng);
            let mut b = Builder {
                cols: &cols,
                y,
                cfg,
                n_sampled: n_sampled.min(d),
                rng,
                features,
                nodes: Vec::new(),
                pairs: Vec::with_capacity(n),
            };
            if d == 0 {
                let pos = rows.iter().filter(|&&r| y[r]).count();
                b.leaf(pos, rows.len());
            } else {
                b.grow(&mut rows, 0);
            }
            Tree { nodes: b.nodes }
        })
        .collect();

    Ok(ForestModel {
        trees,
        n_trees: cfg.n_trees,
        max_depth: cfg.max_depth,
        min_leaf: cfg.min_leaf,
        bootstrap: cfg.bootstrap,
        seed,
        dim: d,
    })
}

impl ForestModel {
    pub fn predict_csr_row(&self, x: &CsrMatrix, i: usize) -> f64 {
        let row = x.dense_row(i);
        self.mean_over_trees(&row)
    }

    pub fn predict_csr(&self, x: &CsrMatrix) -> Vec<f64> {
        (0..x.n_rows())
            .into_par_iter()
            .map(|i| self.predict_csr_row(x, i))
            .collect()
    }

    fn mean_over_trees(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_with(|j| x[j])).sum();
        sum / self.trees.len() as f64
    }
}

/// Mean leaf positive-fraction over all trees.
pub fn forest_predict(m: &ForestModel, x: &[f64]) -> Result<f64, ModelError> {
    if x.len() != m.dim {
        return Err(ModelError::DimensionMismatch {
            expected: m.dim,
            found: x.len(),
        });
    }
    Ok(m.mean_over_trees(x))
}
