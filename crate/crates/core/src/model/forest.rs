//! Random forest of Gini-impurity decision trees.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ingest::ActivityLabel;

const N_CLASSES: usize = ActivityLabel::COUNT;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// round(sqrt(n_features)), at least 1.
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        let m = match self {
            MaxFeatures::Sqrt => (n_features as f64).sqrt().round() as usize,
            MaxFeatures::All => n_features,
            MaxFeatures::Count(c) => c,
        };
        m.clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows trees until leaves are pure.
    pub max_depth: Option<usize>,
    pub max_features: MaxFeatures,
    pub min_samples_split: usize,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: Some(12),
            max_features: MaxFeatures::Sqrt,
            min_samples_split: 2,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        class: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { class } => return class,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

/// Column-major view of the training data.
struct TrainingSet<'a> {
    columns: Vec<Vec<f64>>,
    classes: &'a [usize],
}

struct TreeBuilder<'a> {
    data: &'a TrainingSet<'a>,
    params: &'a ForestParams,
    n_candidates: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

fn majority(counts: &[usize; N_CLASSES]) -> usize {
    // First maximum wins, which is the fixed class order.
    let mut best = 0;
    for c in 1..N_CLASSES {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    best
}

fn gini_sum(counts: &[usize; N_CLASSES], n: usize) -> f64 {
    // n * gini = n - sum(c^2)/n; compared across splits of the same node.
    if n == 0 {
        return 0.0;
    }
    let sq: f64 = counts.iter().map(|&c| (c * c) as f64).sum();
    n as f64 - sq / n as f64
}

impl<'a> TreeBuilder<'a> {
    fn build(mut self, samples: Vec<usize>) -> Tree {
        self.grow(samples, 0);
        Tree { nodes: self.nodes }
    }

    fn grow(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let mut counts = [0usize; N_CLASSES];
        for &s in &samples {
            counts[self.data.classes[s]] += 1;
        }
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { class: majority(&counts) });

        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let depth_reached = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_reached || samples.len() < self.params.min_samples_split.max(2) {
            return id;
        }

        let Some((feature, threshold)) = self.best_split(&samples, &counts) else {
            return id;
        };
        let col = &self.data.columns[feature];
        let (left, right): (Vec<usize>, Vec<usize>) = samples.iter().partition(|&&s| col[s] <= threshold);
        let l = self.grow(left, depth + 1);
        let r = self.grow(right, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left: l,
            right: r,
        };
        id
    }

    fn best_split(&mut self, samples: &[usize], parent: &[usize; N_CLASSES]) -> Option<(usize, f64)> {
        let n_features = self.data.columns.len();
        let mut candidates = sample(&mut self.rng, n_features, self.n_candidates).into_vec();
        // Scan in feature order so ties between candidates resolve the same way
        // regardless of sampling order.
        candidates.sort_unstable();

        let n = samples.len();
        let mut best: Option<(f64, usize, f64)> = None;
        let mut pairs: Vec<(f64, usize)> = Vec::with_capacity(n);
        for f in candidates {
            let col = &self.data.columns[f];
            pairs.clear();
            pairs.extend(samples.iter().map(|&s| (col[s], self.data.classes[s])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            if pairs[0].0 == pairs[n - 1].0 {
                continue;
            }
            let mut left = [0usize; N_CLASSES];
            for i in 0..n - 1 {
                left[pairs[i].1] += 1;
                if pairs[i].0 == pairs[i + 1].0 {
                    continue;
                }
                let mut right = *parent;
                for c in 0..N_CLASSES {
                    right[c] -= left[c];
                }
                let score = gini_sum(&left, i + 1) + gini_sum(&right, n - i - 1);
                if best.is_none_or(|(b, _, _)| score < b) {
                    let (lo, hi) = (pairs[i].0, pairs[i + 1].0);
                    let mid = lo + (hi - lo) / 2.0;
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some((score, f, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

impl Forest {
    /// Fit on row-major `rows` with class indices `classes`.
    ///
    /// Tree `i` draws from its own ChaCha stream `(seed, i)`, so the result
    /// does not depend on how trees are scheduled across threads.
    pub fn fit(rows: &[Vec<f64>], classes: &[usize], params: &ForestParams, seed: u64) -> Forest {
        let n_features = rows.first().map_or(0, Vec::len);
        let columns: Vec<Vec<f64>> = (0..n_features).map(|f| rows.iter().map(|r| r[f]).collect()).collect();
        let data = TrainingSet { columns, classes };
        let n_candidates = params.max_features.resolve(n_features);
        let n = rows.len();

        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let samples: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                TreeBuilder {
                    data: &data,
                    params,
                    n_candidates,
                    rng,
                    nodes: Vec::new(),
                }
                .build(samples)
            })
            .collect();
        Forest { trees }
    }

    pub fn votes(&self, row: &[f64]) -> Vec<usize> {
        self.trees.iter().map(|t| t.predict(row)).collect()
    }

    /// Majority vote over trees; ties go to the earlier class.
    pub fn predict(&self, row: &[f64]) -> usize {
        let mut counts = [0usize; N_CLASSES];
        for t in &self.trees {
            counts[t.predict(row)] += 1;
        }
        majority(&counts)
    }
}
