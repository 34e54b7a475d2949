//! Per-row sparsity proxies. Higher values always mean sparser.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature::{Dataset, FeatureKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ProxyMethod {
    /// Core distance: Gower distance to the m-th nearest other row.
    /// `None` selects `max(5, ⌈0.02·n⌉)`.
    GowerKnn { m: Option<usize> },
    IsolationForest { trees: usize, subsample: usize },
}

impl Default for ProxyMethod {
    fn default() -> Self {
        ProxyMethod::GowerKnn { m: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTarget {
    pub values: Vec<f64>,
    /// The method with every parameter resolved.
    pub method: ProxyMethod,
    pub seed: Option<u64>,
}

impl DensityTarget {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Default neighbor rank, capped so that `m < n`.
pub fn default_knn_m(n: usize) -> usize {
    let m = ((0.02 * n as f64) - 1e-9).ceil().max(5.0) as usize;
    m.min(n.saturating_sub(1)).max(1)
}

/// Computes the proxy selected by `method`.
pub fn compute_proxy(data: &Dataset, method: &ProxyMethod, seed: u64) -> Result<DensityTarget> {
    match *method {
        ProxyMethod::GowerKnn { m } => core_distances(data, m.unwrap_or_else(|| default_knn_m(data.n_rows()))),
        ProxyMethod::IsolationForest { trees, subsample } => {
            isolation_forest_scores(data, trees, subsample.min(data.n_rows()), seed)
        }
    }
}

/// Range-normalized Gower metric for a dataset.
#[derive(Debug, Clone)]
pub struct GowerMetric {
    kinds: Vec<FeatureKind>,
    ranges: Vec<f64>,
}

impl GowerMetric {
    pub fn new(kinds: Vec<FeatureKind>, ranges: Vec<f64>) -> Self {
        Self { kinds, ranges }
    }

    /// Observed ranges (max − min) of the numeric columns.
    pub fn fit(data: &Dataset) -> Result<Self> {
        let mut kinds = Vec::with_capacity(data.n_features());
        let mut ranges = Vec::with_capacity(data.n_features());
        for col in data.columns() {
            kinds.push(col.kind());
            if col.kind().is_nominal() {
                ranges.push(1.0);
                continue;
            }
            let (lo, hi) = col
                .values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            if !(hi > lo) {
                return Err(Error::ZeroRange {
                    feature: col.name().to_string(),
                });
            }
            ranges.push(hi - lo);
        }
        Ok(Self { kinds, ranges })
    }

    #[inline]
    pub fn between_rows(&self, data: &Dataset, a: usize, b: usize) -> f64 {
        let mut sum = 0.0;
        for j in 0..self.kinds.len() {
            sum += term(self.kinds[j], self.ranges[j], data.value(a, j), data.value(b, j));
        }
        sum / self.kinds.len() as f64
    }
}

#[inline]
fn term(kind: FeatureKind, range: f64, a: f64, b: f64) -> f64 {
    if kind.is_nominal() {
        if a == b {
            0.0
        } else {
            1.0
        }
    } else {
        (a - b).abs() / range
    }
}

/// Gower distance between two aligned rows.
pub fn gower_distance(a: &[f64], b: &[f64], kinds: &[FeatureKind], numeric_ranges: &[f64]) -> Result<f64> {
    if a.len() != kinds.len() || b.len() != kinds.len() || numeric_ranges.len() != kinds.len() {
        return Err(Error::TypeMismatch {
            feature: "<row>".into(),
            row: None,
            value: "row length does not match the schema".into(),
        });
    }
    let mut sum = 0.0;
    for j in 0..kinds.len() {
        if !kinds[j].is_nominal() && !(numeric_ranges[j] > 0.0) {
            return Err(Error::ZeroRange {
                feature: format!("#{j}"),
            });
        }
        sum += term(kinds[j], numeric_ranges[j], a[j], b[j]);
    }
    Ok(sum / kinds.len() as f64)
}

/// Core distance of every row: its m-th smallest Gower distance to the
/// other `n − 1` rows.
pub fn core_distances(data: &Dataset, m: usize) -> Result<DensityTarget> {
    let n = data.n_rows();
    if m == 0 || m >= n {
        return Err(Error::MTooLarge { m, n });
    }
    let metric = GowerMetric::fit(data)?;
    let values = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut d: Vec<f64> = (0..n).filter(|&k| k != i).map(|k| metric.between_rows(data, i, k)).collect();
            let (_, mth, _) = d.select_nth_unstable_by(m - 1, f64::total_cmp);
            *mth
        })
        .collect();
    Ok(DensityTarget {
        values,
        method: ProxyMethod::GowerKnn { m: Some(m) },
        seed: None,
    })
}

fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// Expected path length of an unsuccessful BST search among `psi` points,
/// `c(ψ) = 2H(ψ−1) − 2(ψ−1)/ψ`, with `c(ψ) = 0` for `ψ ≤ 1`.
pub fn average_path_length(psi: usize) -> f64 {
    if psi <= 1 {
        return 0.0;
    }
    let k = (psi - 1) as f64;
    2.0 * harmonic(psi - 1) - 2.0 * k / psi as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IsolationRule {
    /// Numeric: values strictly below the threshold go left.
    Below(f64),
    /// Nominal: the given level goes left, the rest right.
    Level(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum IsolationNode {
    Leaf { size: usize },
    Split {
        feature: usize,
        rule: IsolationRule,
        left: usize,
        right: usize,
    },
}

/// One isolation tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct IsolationTree {
    pub nodes: Vec<IsolationNode>,
}

impl IsolationTree {
    fn grow(data: &Dataset, rows: Vec<usize>, depth_limit: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut tree = IsolationTree { nodes: Vec::new() };
        tree.grow_node(data, rows, 0, depth_limit, rng);
        tree
    }

    fn grow_node(
        &mut self,
        data: &Dataset,
        rows: Vec<usize>,
        depth: usize,
        depth_limit: usize,
        rng: &mut ChaCha8Rng,
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(IsolationNode::Leaf { size: rows.len() });
        if rows.len() <= 1 || depth >= depth_limit {
            return id;
        }
        let varying: Vec<usize> = (0..data.n_features())
            .filter(|&j| {
                let first = data.value(rows[0], j);
                rows.iter().any(|&r| data.value(r, j) != first)
            })
            .collect();
        if varying.is_empty() {
            return id;
        }
        let feature = varying[rng.gen_range(0..varying.len())];
        let rule = if data.column(feature).kind().is_nominal() {
            let mut levels: Vec<f64> = rows.iter().map(|&r| data.value(r, feature)).collect();
            levels.sort_by(f64::total_cmp);
            levels.dedup();
            IsolationRule::Level(levels[rng.gen_range(0..levels.len())])
        } else {
            let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                let v = data.value(r, feature);
                (lo.min(v), hi.max(v))
            });
            // Threshold in (lo, hi] so both sides are non-empty.
            let u: f64 = rng.gen();
            IsolationRule::Below(hi - u * (hi - lo))
        };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.into_iter().partition(|&r| goes_left(rule, data.value(r, feature)));
        let left = self.grow_node(data, left_rows, depth + 1, depth_limit, rng);
        let right = self.grow_node(data, right_rows, depth + 1, depth_limit, rng);
        self.nodes[id] = IsolationNode::Split {
            feature,
            rule,
            left,
            right,
        };
        id
    }

    /// Path length `h(x)`: edges to the leaf plus `c(size)` for the points
    /// left unresolved there.
    pub fn path_length(&self, row: &[f64]) -> f64 {
        let mut node = 0;
        let mut depth = 0usize;
        loop {
            match self.nodes[node] {
                IsolationNode::Leaf { size } => return depth as f64 + average_path_length(size),
                IsolationNode::Split {
                    feature,
                    rule,
                    left,
                    right,
                } => {
                    node = if goes_left(rule, row[feature]) { left } else { right };
                    depth += 1;
                }
            }
        }
    }
}

#[inline]
fn goes_left(rule: IsolationRule, x: f64) -> bool {
    match rule {
        IsolationRule::Below(t) => x < t,
        IsolationRule::Level(l) => x == l,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsolationForest {
    pub trees: Vec<IsolationTree>,
    pub subsample: usize,
}

impl IsolationForest {
    pub fn fit(data: &Dataset, n_trees: usize, subsample: usize, seed: u64) -> Result<Self> {
        let n = data.n_rows();
        if subsample < 2 || subsample > n {
            return Err(Error::SubsampleTooSmall { subsample, n });
        }
        if n_trees == 0 {
            return Err(Error::InvalidConfig("isolation forest needs at least one tree".into()));
        }
        let depth_limit = (subsample as f64).log2().ceil() as usize;
        let mut master = ChaCha8Rng::seed_from_u64(seed);
        let seeds: Vec<u64> = (0..n_trees).map(|_| master.gen()).collect();
        let trees = seeds
            .into_par_iter()
            .map(|s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let rows = sample(&mut rng, n, subsample).into_vec();
                IsolationTree::grow(data, rows, depth_limit, &mut rng)
            })
            .collect();
        Ok(Self { trees, subsample })
    }

    pub fn mean_path_length(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.path_length(row)).sum::<f64>() / self.trees.len() as f64
    }

    /// Anomaly score `2^(−E[h(x)]/c(ψ))` in `[0, 1]`.
    pub fn score(&self, row: &[f64]) -> f64 {
        2f64.powf(-self.mean_path_length(row) / average_path_length(self.subsample))
    }
}

pub fn isolation_forest_scores(data: &Dataset, n_trees: usize, subsample: usize, seed: u64) -> Result<DensityTarget> {
    let forest = IsolationForest::fit(data, n_trees, subsample, seed)?;
    let values = (0..data.n_rows())
        .into_par_iter()
        .map(|i| forest.score(&data.row(i)))
        .collect();
    Ok(DensityTarget {
        values,
        method: ProxyMethod::IsolationForest {
            trees: n_trees,
            subsample,
        },
        seed: Some(seed),
    })
}

#[derive(Debug, Clone)]
pub struct Trimmed {
    pub data: Dataset,
    pub target: DensityTarget,
    /// Original indices of the retained rows, in order.
    pub kept: Vec<usize>,
    /// Original indices of the dropped rows, ascending.
    pub dropped: Vec<usize>,
}

/// Drops the `⌊fraction·n⌋` sparsest rows. Among equal proxy values the
/// higher row index is dropped first.
pub fn trim_outliers(data: &Dataset, target: &DensityTarget, fraction: f64) -> Result<Trimmed> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidConfig(format!("trim fraction {fraction} outside [0, 1)")));
    }
    let n = data.n_rows();
    if target.len() != n {
        return Err(Error::InvalidConfig("proxy length differs from the row count".into()));
    }
    let k = (fraction * n as f64 + 1e-9).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| target.values[b].total_cmp(&target.values[a]).then(b.cmp(&a)));
    let mut dropped: Vec<usize> = order[..k].to_vec();
    dropped.sort_unstable();
    let mut is_dropped = vec![false; n];
    for &i in &dropped {
        is_dropped[i] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&i| !is_dropped[i]).collect();
    Ok(Trimmed {
        data: data.select_rows(&kept),
        target: DensityTarget {
            values: kept.iter().map(|&i| target.values[i]).collect(),
            ..target.clone()
        },
        kept,
        dropped,
    })
}
