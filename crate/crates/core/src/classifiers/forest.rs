use rand::seq::index::sample;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_rows, index_labels};
use crate::rng::{derive_seed, seeded, Rng};
use crate::{Error, Result};

const FORMAT: &str = "ein-random-forest";
const VERSION: u32 = 1;

/// Features examined per split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, dim: usize) -> usize {
        match self {
            MaxFeatures::Sqrt => ((dim as f64).sqrt().floor() as usize).max(1),
            MaxFeatures::All => dim,
            MaxFeatures::Count(n) => n.clamp(1, dim.max(1)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows until leaves are pure or too small.
    pub max_depth: Option<usize>,
    pub max_features: MaxFeatures,
    pub min_samples_leaf: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            max_features: MaxFeatures::Sqrt,
            min_samples_leaf: 1,
            bootstrap: true,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Node {
    /// Class histogram of the training samples that reached the leaf.
    Leaf { counts: Vec<usize> },
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// CART tree with gini splits, stored as a node arena rooted at index 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
}

struct Builder<'a> {
    rows: &'a [Vec<f64>],
    y: &'a [usize],
    classes: usize,
    max_features: usize,
    max_depth: Option<usize>,
    min_leaf: usize,
    nodes: Vec<Node>,
}

fn gini(counts: &[usize], n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

impl Builder<'_> {
    fn build(&mut self, samples: &mut [usize], depth: usize, rng: &mut Rng) -> usize {
        let mut counts = vec![0usize; self.classes];
        for &i in samples.iter() {
            counts[self.y[i]] += 1;
        }
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            counts: counts.clone(),
        });
        let n = samples.len();
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || self.max_depth.is_some_and(|d| depth >= d) || n < 2 * self.min_leaf {
            return id;
        }
        let parent = gini(&counts, n);
        let dim = self.rows[0].len();
        let features: Vec<usize> = if self.max_features >= dim {
            (0..dim).collect()
        } else {
            sample(rng, dim, self.max_features).into_vec()
        };
        // (impurity, feature, threshold)
        let mut best: Option<(f64, usize, f64)> = None;
        for &f in &features {
            samples.sort_by(|&a, &b| self.rows[a][f].total_cmp(&self.rows[b][f]));
            let mut left = vec![0usize; self.classes];
            let mut right = counts.clone();
            for pos in 1..n {
                let moved = self.y[samples[pos - 1]];
                left[moved] += 1;
                right[moved] -= 1;
                let (lo, hi) = (self.rows[samples[pos - 1]][f], self.rows[samples[pos]][f]);
                if lo == hi || pos < self.min_leaf || n - pos < self.min_leaf {
                    continue;
                }
                let impurity = (pos as f64 * gini(&left, pos)
                    + (n - pos) as f64 * gini(&right, n - pos))
                    / n as f64;
                if best.is_none_or(|(b, _, _)| impurity < b) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some((impurity, f, threshold));
                }
            }
        }
        let Some((impurity, feature, threshold)) = best else {
            return id;
        };
        if impurity >= parent - 1e-12 {
            return id;
        }
        let (mut l, mut r): (Vec<usize>, Vec<usize>) = samples
            .iter()
            .partition(|&&i| self.rows[i][feature] <= threshold);
        let left = self.build(&mut l, depth + 1, rng);
        let right = self.build(&mut r, depth + 1, rng);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

impl DecisionTree {
    /// Fits one tree on `samples` (indices into `rows`, repeats allowed).
    pub fn fit(
        rows: &[Vec<f64>],
        y: &[usize],
        classes: usize,
        samples: &[usize],
        params: &ForestParams,
        rng: &mut Rng,
    ) -> DecisionTree {
        let mut b = Builder {
            rows,
            y,
            classes,
            max_features: params.max_features.resolve(rows[0].len()),
            max_depth: params.max_depth,
            min_leaf: params.min_samples_leaf.max(1),
            nodes: Vec::new(),
        };
        let mut s = samples.to_vec();
        b.build(&mut s, 0, rng);
        DecisionTree { nodes: b.nodes }
    }

    pub fn leaf(&self, x: &[f64]) -> &[usize] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
            }
        }
    }

    /// Majority class of the reached leaf, lowest index on ties.
    pub fn predict(&self, x: &[f64]) -> usize {
        let counts = self.leaf(x);
        counts
            .iter()
            .enumerate()
            .fold(0, |best, (i, &c)| if c > counts[best] { i } else { best })
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub format: String,
    pub version: u32,
    pub classes: Vec<String>,
    pub features: Vec<String>,
    pub params: ForestParams,
    pub trees: Vec<DecisionTree>,
}

/// Trains a forest of gini CART trees, each on its own bootstrap sample
/// with a seed derived from `params.seed` and the tree index.
pub fn train_random_forest(
    rows: &[Vec<f64>],
    labels: &[String],
    names: &[String],
    params: &ForestParams,
) -> Result<RandomForest> {
    check_rows(rows, labels, names)?;
    let (classes, y) = index_labels(labels, 2)?;
    if params.n_trees == 0 {
        return Err(Error::Config("n_trees must be at least 1".into()));
    }
    let n = rows.len();
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeded(derive_seed(params.seed, t as u64));
            let samples: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            DecisionTree::fit(rows, &y, classes.len(), &samples, params, &mut rng)
        })
        .collect();
    Ok(RandomForest {
        format: FORMAT.into(),
        version: VERSION,
        classes,
        features: names.to_vec(),
        params: params.clone(),
        trees,
    })
}

impl RandomForest {
    /// Per-class vote counts; they sum to the number of trees.
    pub fn votes(&self, x: &[f64]) -> Vec<usize> {
        let mut v = vec![0; self.classes.len()];
        for t in &self.trees {
            v[t.predict(x)] += 1;
        }
        v
    }

    pub fn predict_index(&self, x: &[f64]) -> usize {
        let v = self.votes(x);
        v.iter()
            .enumerate()
            .fold(0, |best, (i, &c)| if c > v[best] { i } else { best })
    }

    pub fn predict(&self, x: &[f64]) -> &str {
        &self.classes[self.predict_index(x)]
    }

    pub fn predict_all(&self, rows: &[Vec<f64>]) -> Vec<usize> {
        rows.par_iter().map(|x| self.predict_index(x)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: RandomForest = serde_json::from_str(text)?;
        if f.format != FORMAT || f.version != VERSION {
            return Err(Error::Data(format!(
                "unsupported forest document {} v{}",
                f.format, f.version
            )));
        }
        Ok(f)
    }
}
