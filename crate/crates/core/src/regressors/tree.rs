//! CART regression tree with variance-reduction splits.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_query, check_training};
use crate::linalg::Matrix;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    All,
    Sqrt,
    Fraction(f64),
}

impl MaxFeatures {
    pub fn count(&self, d: usize) -> usize {
        let k = match *self {
            MaxFeatures::All => d,
            MaxFeatures::Sqrt => (d as f64).sqrt().floor() as usize,
            MaxFeatures::Fraction(f) => (f * d as f64).floor() as usize,
        };
        k.clamp(1, d.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub max_features: MaxFeatures,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self { max_features: MaxFeatures::All, min_leaf: 1, max_depth: None }
    }
}

impl TreeConfig {
    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        if let MaxFeatures::Fraction(f) = self.max_features {
            if !(f > 0.0 && f <= 1.0) {
                p.push(format!("max_features fraction {f} must be in (0, 1]"));
            }
        }
        if self.min_leaf == 0 {
            p.push("min_leaf must be at least 1".into());
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", bound = "T: Scalar")]
pub enum Node<T> {
    Leaf { value: T, n: usize },
    /// Rows with `x[feature] <= threshold` go left.
    Split { feature: usize, threshold: T, left: usize, right: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Tree<T> {
    pub n_features: usize,
    /// Arena; index 0 is the root.
    pub nodes: Vec<Node<T>>,
}

impl<T: Scalar> Tree<T> {
    pub fn root(&self) -> &Node<T> {
        &self.nodes[0]
    }

    pub fn depth(&self) -> usize {
        fn go<T>(nodes: &[Node<T>], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn predict_row(&self, row: &[T]) -> T {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value, .. } => return value,
                Node::Split { feature, threshold, left, right, .. } => {
                    i = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict(&self, x: &Matrix<T>) -> Result<Vec<T>> {
        check_query(x, self.n_features)?;
        Ok(x.rows().map(|r| self.predict_row(r)).collect())
    }
}

struct Builder<'a, T, R> {
    x: &'a Matrix<T>,
    y: &'a [T],
    cfg: &'a TreeConfig,
    k_features: usize,
    rng: &'a mut R,
    nodes: Vec<Node<T>>,
}

struct Best<T> {
    feature: usize,
    threshold: T,
    score: T,
}

impl<T: Scalar, R: Rng> Builder<'_, T, R> {
    fn leaf_value(&self, idx: &[usize]) -> T {
        let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
        let mut s = T::zero();
        for &i in idx {
            lo = lo.min(self.y[i]);
            hi = hi.max(self.y[i]);
            s = s + self.y[i];
        }
        (s / T::from_count(idx.len())).max(lo).min(hi)
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.n_cols();
        if self.k_features >= d {
            return (0..d).collect();
        }
        let mut f = rand::seq::index::sample(self.rng, d, self.k_features).into_vec();
        f.sort_unstable();
        f
    }

    fn best_split(&mut self, idx: &[usize]) -> Option<Best<T>> {
        let n = idx.len();
        let mean = idx.iter().map(|&i| self.y[i]).sum::<T>() / T::from_count(n);
        let centered: Vec<T> = idx.iter().map(|&i| self.y[i] - mean).collect();
        let sse: T = centered.iter().map(|&c| c * c).sum();
        let margin = T::lit(1e-12) * sse;
        let total: T = centered.iter().copied().sum();
        let min_leaf = self.cfg.min_leaf;

        let mut best: Option<Best<T>> = None;
        let mut order: Vec<usize> = (0..n).collect();
        for f in self.candidate_features() {
            let val = |p: usize| self.x.get(idx[p], f);
            order.sort_by(|&a, &b| val(a).partial_cmp(&val(b)).unwrap());
            let mut s_left = T::zero();
            for pos in 0..n - 1 {
                s_left = s_left + centered[order[pos]];
                let n_left = pos + 1;
                let (a, b) = (val(order[pos]), val(order[pos + 1]));
                if n_left < min_leaf || n - n_left < min_leaf || a >= b {
                    continue;
                }
                let s_right = total - s_left;
                let score = s_left * s_left / T::from_count(n_left) + s_right * s_right / T::from_count(n - n_left);
                let floor = best.as_ref().map_or(T::zero(), |b| b.score);
                if score > floor + margin {
                    let mid = a + (b - a) / T::lit(2.0);
                    let threshold = if mid >= b { a } else { mid };
                    best = Some(Best { feature: f, threshold, score });
                }
            }
        }
        best
    }

    fn build(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let n = idx.len();
        self.nodes.push(Node::Leaf { value: T::zero(), n });
        let first = self.y[idx[0]];
        let pure = idx.iter().all(|&i| self.y[i] == first);
        if pure {
            self.nodes[id] = Node::Leaf { value: first, n };
            return id;
        }
        let stop = n < 2 * self.cfg.min_leaf || self.cfg.max_depth.is_some_and(|m| depth >= m);
        let split = if stop { None } else { self.best_split(&idx) };
        match split {
            None => {
                self.nodes[id] = Node::Leaf { value: self.leaf_value(&idx), n };
            }
            Some(Best { feature, threshold, .. }) => {
                let (l, r): (Vec<usize>, Vec<usize>) =
                    idx.into_iter().partition(|&i| self.x.get(i, feature) <= threshold);
                let left = self.build(l, depth + 1);
                let right = self.build(r, depth + 1);
                self.nodes[id] = Node::Split { feature, threshold, left, right, n };
            }
        }
        id
    }
}

/// Grows a tree on the rows listed in `rows` (repeats allowed, as in a bootstrap).
pub fn fit_tree_on<T: Scalar, R: Rng>(
    x: &Matrix<T>,
    y: &[T],
    rows: Vec<usize>,
    cfg: &TreeConfig,
    rng: &mut R,
) -> Result<Tree<T>> {
    let problems = cfg.problems();
    if !problems.is_empty() {
        return Err(Error::InvalidParameter(problems.join("; ")));
    }
    check_training(x, y, 1)?;
    if rows.is_empty() {
        return Err(Error::TooShort { needed: 1, got: 0 });
    }
    let mut b = Builder {
        x,
        y,
        cfg,
        k_features: cfg.max_features.count(x.n_cols()),
        rng,
        nodes: Vec::new(),
    };
    b.build(rows, 0);
    Ok(Tree { n_features: x.n_cols(), nodes: b.nodes })
}

pub fn fit_tree<T: Scalar, R: Rng>(x: &Matrix<T>, y: &[T], cfg: &TreeConfig, rng: &mut R) -> Result<Tree<T>> {
    fit_tree_on(x, y, (0..x.n_rows()).collect(), cfg, rng)
}
