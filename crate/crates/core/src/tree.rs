//! Regression-tree partitioning of the feature space on a density proxy.
//!
//! The tree is grown depth-first on the proxy `y`, left child first. After
//! every accepted split the children are carved (see [`crate::carve`]), so
//! later splits operate on the trimmed extents. Leaves become the non-empty
//! slices; carved regions become empty slices.

use std::collections::BTreeSet;

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::carve::{carve_after_split, carve_at_split, CarveParams};
use crate::error::{Error, Result};
use crate::feature::{Dataset, FeatureKind};
use crate::geometry::{Constraint, FeatureSpace, Interval, Slice};
use crate::proxy::{compute_proxy, trim_outliers, DensityTarget, ProxyMethod};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionConfig {
    pub p_star: usize,
    pub min_l: f64,
    pub min_slice_size_frac: f64,
    pub epsilon: f64,
    pub min_mse_decrease_frac: f64,
    pub trim_fraction: f64,
    pub proxy: ProxyMethod,
    pub seed: u64,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            p_star: 3,
            min_l: 0.1,
            min_slice_size_frac: 0.1,
            epsilon: 0.001,
            min_mse_decrease_frac: 0.01,
            trim_fraction: 0.01,
            proxy: ProxyMethod::default(),
            seed: 0,
        }
    }
}

impl PartitionConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} = {v} is outside [0, 1]")))
            }
        };
        unit("min_l", self.min_l)?;
        unit("min_slice_size_frac", self.min_slice_size_frac)?;
        unit("min_mse_decrease_frac", self.min_mse_decrease_frac)?;
        if !(0.0..1.0).contains(&self.trim_fraction) {
            return Err(Error::InvalidConfig(format!(
                "trim_fraction = {} is outside [0, 1)",
                self.trim_fraction
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::EpsilonOutOfRange(self.epsilon));
        }
        if self.p_star < 1 {
            return Err(Error::InvalidConfig("p_star must be at least 1".into()));
        }
        Ok(())
    }

    /// Smallest allowed leaf: `max(2, ⌈min_slice_size_frac·n⌉)`.
    pub fn min_leaf(&self, n: usize) -> usize {
        ((self.min_slice_size_frac * n as f64 - 1e-9).ceil().max(0.0) as usize).max(2)
    }

    pub fn carve_params(&self) -> CarveParams {
        CarveParams {
            min_l: self.min_l,
            p_star: self.p_star,
            epsilon: self.epsilon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitRule {
    /// Ordered kinds: `x <= threshold` goes left. `left_max` and `right_min`
    /// are the neighbouring observed values in the node.
    Threshold { threshold: f64, left_max: f64, right_min: f64 },
    /// Nominal: the level goes left, every other level right.
    Level(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub rule: SplitRule,
    /// Support-weighted mean of the child MSEs.
    pub child_mse: f64,
    pub decrease: f64,
    pub left_support: usize,
    pub right_support: usize,
}

impl SplitCandidate {
    #[inline]
    pub fn goes_left(&self, x: f64) -> bool {
        match self.rule {
            SplitRule::Threshold { threshold, .. } => x <= threshold,
            SplitRule::Level(code) => x == code as f64,
        }
    }
}

/// Midpoint between adjacent distinct real values `a < b`, computed on the
/// single-precision images of both values when that lands in `[a, b)`.
pub fn real_midpoint(a: f64, b: f64) -> f64 {
    let m = (a as f32 as f64 + b as f32 as f64) / 2.0;
    if a <= m && m < b {
        return m;
    }
    let m = a + (b - a) / 2.0;
    if m < b {
        m
    } else {
        a
    }
}

/// Half-integer threshold between adjacent distinct integer codes `a < b`.
pub fn discrete_midpoint(a: f64, b: f64) -> f64 {
    ((a + b) / 2.0).floor() + 0.5
}

/// Per-run limits derived from the config and the growth target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthLimits {
    pub min_leaf: usize,
    pub min_decrease: f64,
}

impl GrowthLimits {
    pub fn new(config: &PartitionConfig, y: &[f64]) -> Self {
        let n = y.len();
        let var = if n == 0 {
            0.0
        } else {
            let mean = y.iter().sum::<f64>() / n as f64;
            y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64
        };
        Self {
            min_leaf: config.min_leaf(n),
            min_decrease: config.min_mse_decrease_frac * var,
        }
    }
}

#[derive(Default, Clone, Copy)]
struct Moments {
    n: usize,
    s: f64,
    s2: f64,
}

impl Moments {
    fn add(&mut self, c: f64) {
        self.n += 1;
        self.s += c;
        self.s2 += c * c;
    }

    fn minus(self, other: Moments) -> Moments {
        Moments {
            n: self.n - other.n,
            s: self.s - other.s,
            s2: self.s2 - other.s2,
        }
    }

    fn sse(self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.s2 - self.s * self.s / self.n as f64).max(0.0)
        }
    }
}

/// Exhaustive best split of the node `rows` of `slice`, or `None` when no
/// candidate meets the support, dimension and MSE-decrease constraints.
pub fn best_split(
    data: &Dataset,
    y: &[f64],
    rows: &[usize],
    slice: &Slice,
    config: &PartitionConfig,
    limits: &GrowthLimits,
) -> Option<SplitCandidate> {
    let n = rows.len();
    let min_leaf = limits.min_leaf;
    if n < 2 * min_leaf {
        return None;
    }
    let first = y[rows[0]];
    if rows.iter().all(|&r| y[r] == first) {
        return None;
    }
    let mean = rows.iter().map(|&r| y[r]).sum::<f64>() / n as f64;
    let mut total = Moments::default();
    for &r in rows {
        total.add(y[r] - mean);
    }
    let node_mse = total.sse() / n as f64;
    let dimension = slice.dimension();
    let mut best: Option<SplitCandidate> = None;

    for j in 0..data.n_features() {
        if slice.subset(j).complete && dimension + 1 > config.p_star {
            continue;
        }
        let kind = data.column(j).kind();
        let mut consider = |rule: SplitRule, left: Moments| {
            let right = total.minus(left);
            if left.n < min_leaf || right.n < min_leaf {
                return;
            }
            let child_mse = (left.sse() + right.sse()) / n as f64;
            let decrease = node_mse - child_mse;
            if !(decrease > 1e-12 * node_mse) || decrease < limits.min_decrease {
                return;
            }
            if best.as_ref().map_or(true, |b| child_mse < b.child_mse) {
                best = Some(SplitCandidate {
                    feature: j,
                    rule,
                    child_mse,
                    decrease,
                    left_support: left.n,
                    right_support: right.n,
                });
            }
        };
        if kind == FeatureKind::Nominal {
            let mut levels: Vec<(u32, Moments)> = Vec::new();
            let mut sorted: Vec<(u32, f64)> = rows.iter().map(|&r| (data.value(r, j) as u32, y[r] - mean)).collect();
            sorted.sort_by_key(|&(code, _)| code);
            for (code, c) in sorted {
                match levels.last_mut() {
                    Some((last, m)) if *last == code => m.add(c),
                    _ => {
                        let mut m = Moments::default();
                        m.add(c);
                        levels.push((code, m));
                    }
                }
            }
            if levels.len() < 2 {
                continue;
            }
            for (code, m) in levels {
                consider(SplitRule::Level(code), m);
            }
        } else {
            let mut sorted: Vec<(f64, f64)> = rows.iter().map(|&r| (data.value(r, j), y[r] - mean)).collect();
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = Moments::default();
            for k in 0..n - 1 {
                left.add(sorted[k].1);
                let (a, b) = (sorted[k].0, sorted[k + 1].0);
                if a == b || left.n < min_leaf {
                    continue;
                }
                if n - left.n < min_leaf {
                    break;
                }
                let threshold = if kind == FeatureKind::Real {
                    real_midpoint(a, b)
                } else {
                    discrete_midpoint(a, b)
                };
                consider(
                    SplitRule::Threshold {
                        threshold,
                        left_max: a,
                        right_min: b,
                    },
                    left,
                );
            }
        }
    }
    best
}

/// A partition of the feature space into slices.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionModel {
    pub space: FeatureSpace,
    /// Non-empty leaves first (tree order), then empty slices; ids are 1-based.
    pub slices: Vec<Slice>,
    pub config: PartitionConfig,
    /// Row indices of the input dataset removed as outliers.
    pub trimmed_rows: Vec<usize>,
    /// Rows of the input dataset, trimmed rows included.
    pub n_rows: usize,
    pub dropped_features: Vec<String>,
}

impl PartitionModel {
    pub fn k(&self) -> usize {
        self.slices.len()
    }

    pub fn total_volume(&self) -> f64 {
        self.slices.iter().map(|s| s.volume).sum()
    }

    /// Index (into `slices`) of the slice containing row `i` of a dataset
    /// aligned to `space`.
    pub fn locate(&self, data: &Dataset, i: usize) -> Option<usize> {
        self.slices.iter().position(|s| s.contains_row(data, i))
    }
}

/// Geometry before and after one split, for conservation checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitEvent {
    pub parent: Slice,
    /// Carved children that continue to grow.
    pub children: Vec<Slice>,
    pub empties: Vec<Slice>,
}

struct Growth {
    leaves: Vec<(Slice, Vec<usize>)>,
    empties: Vec<Slice>,
    events: Vec<SplitEvent>,
}

fn grow(
    data: &Dataset,
    y: &[f64],
    space: &FeatureSpace,
    config: &PartitionConfig,
    limits: &GrowthLimits,
    root: Slice,
    rows: Vec<usize>,
    out: &mut Growth,
) -> Result<()> {
    let params = config.carve_params();
    let mut stack = vec![(root, rows)];
    while let Some((slice, rows)) = stack.pop() {
        let Some(split) = best_split(data, y, &rows, &slice, config, limits) else {
            out.leaves.push((slice, rows));
            continue;
        };
        debug!(
            "split on {} ({:?}), supports {}/{}",
            space.domain(split.feature).name,
            split.rule,
            split.left_support,
            split.right_support
        );
        let children = carve_at_split(&slice, &split, space, &params)?;
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| split.goes_left(data.value(r, split.feature)));
        let mut empties: Vec<Slice> = children.empty.into_iter().collect();
        let (left, mut e) = carve_after_split(&children.left, data, &left_rows, space, &params)?;
        empties.append(&mut e);
        let (right, mut e) = carve_after_split(&children.right, data, &right_rows, space, &params)?;
        empties.append(&mut e);
        out.events.push(SplitEvent {
            parent: slice,
            children: vec![left.clone(), right.clone()],
            empties: empties.clone(),
        });
        out.empties.extend(empties);
        stack.push((right, right_rows));
        stack.push((left, left_rows));
    }
    Ok(())
}

fn mean_of(y: &[f64], rows: &[usize]) -> Option<f64> {
    if rows.is_empty() {
        None
    } else {
        Some(rows.iter().map(|&r| y[r]).sum::<f64>() / rows.len() as f64)
    }
}

fn assemble(
    space: &FeatureSpace,
    config: &PartitionConfig,
    leaves: Vec<(Slice, Vec<usize>, Option<f64>)>,
    empties: Vec<Slice>,
) -> Result<Vec<Slice>> {
    let mut slices = Vec::with_capacity(leaves.len() + empties.len());
    for (mut slice, rows, mean) in leaves {
        slice.support = rows.len();
        slice.mean_density = mean;
        slice.is_empty = false;
        slice.volume = space.volume(&slice, config.epsilon)?;
        slices.push(slice);
    }
    slices.extend(empties);
    for (k, s) in slices.iter_mut().enumerate() {
        s.id = k + 1;
    }
    Ok(slices)
}

/// Drops constant features, checks the row count, and trims outliers.
struct Prepared {
    data: Dataset,
    y: Vec<f64>,
    space: FeatureSpace,
    trimmed_rows: Vec<usize>,
    dropped: Vec<String>,
}

fn prepare(data: &Dataset, target: &DensityTarget, config: &PartitionConfig) -> Result<Prepared> {
    let trimmed = trim_outliers(data, target, config.trim_fraction)?;
    let (kept_data, dropped) = trimmed.data.drop_constant_features();
    let space = FeatureSpace::from_dataset(&kept_data)?;
    let aligned = space.align(&kept_data)?;
    Ok(Prepared {
        data: aligned,
        y: trimmed.target.values,
        space,
        trimmed_rows: trimmed.dropped,
        dropped,
    })
}

fn check_rows(n: usize, config: &PartitionConfig) -> Result<()> {
    let required = 2 * config.min_leaf(n);
    if n < required {
        return Err(Error::TooFewRows { n, required });
    }
    Ok(())
}

/// Full pipeline: proxy, trimming, domains, tree growth with carving.
pub fn build_partition(data: &Dataset, config: &PartitionConfig) -> Result<PartitionModel> {
    config.validate()?;
    check_rows(data.n_rows(), config)?;
    let (data, mut dropped) = data.drop_constant_features();
    let target = compute_proxy(&data, &config.proxy, config.seed)?;
    let mut model = build_partition_with_target(&data, &target, config)?;
    dropped.append(&mut model.dropped_features);
    for name in &dropped {
        log::warn!("dropping single-valued feature `{name}`");
    }
    model.dropped_features = dropped;
    Ok(model)
}

/// Builds a partition on a precomputed proxy.
pub fn build_partition_with_target(
    data: &Dataset,
    target: &DensityTarget,
    config: &PartitionConfig,
) -> Result<PartitionModel> {
    build_partition_traced(data, target, config).map(|(m, _)| m)
}

/// As [`build_partition_with_target`], also returning every split event.
pub fn build_partition_traced(
    data: &Dataset,
    target: &DensityTarget,
    config: &PartitionConfig,
) -> Result<(PartitionModel, Vec<SplitEvent>)> {
    config.validate()?;
    check_rows(data.n_rows(), config)?;
    let prep = prepare(data, target, config)?;
    let limits = GrowthLimits::new(config, &prep.y);
    let all: Vec<usize> = (0..prep.data.n_rows()).collect();
    let mut growth = Growth {
        leaves: Vec::new(),
        empties: Vec::new(),
        events: Vec::new(),
    };
    grow(
        &prep.data,
        &prep.y,
        &prep.space,
        config,
        &limits,
        prep.space.full_slice(),
        all,
        &mut growth,
    )?;
    let leaves = growth
        .leaves
        .into_iter()
        .map(|(s, rows)| {
            let mean = mean_of(&prep.y, &rows);
            (s, rows, mean)
        })
        .collect();
    let slices = assemble(&prep.space, config, leaves, growth.empties)?;
    Ok((
        PartitionModel {
            space: prep.space,
            slices,
            config: config.clone(),
            trimmed_rows: prep.trimmed_rows,
            n_rows: data.n_rows(),
            dropped_features: prep.dropped,
        },
        growth.events,
    ))
}

/// One arm of a conditioned partition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedArm {
    pub level: String,
    /// Slices of this arm; every one constrains the conditioning feature to
    /// `level`. Ids are 1-based within the arm.
    pub slices: Vec<Slice>,
    /// Input-dataset indices of the arm's rows, trimmed rows excluded.
    pub rows: Vec<usize>,
    pub trimmed_rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedPartition {
    pub feature: String,
    pub arms: Vec<ConditionedArm>,
    /// All arms' slices in arm order with ids renumbered; tiles the space.
    pub merged: PartitionModel,
    pub events: Vec<SplitEvent>,
}

impl ConditionedPartition {
    /// `(level, model)` pairs, each model holding only its arm's slices.
    pub fn models(&self) -> Vec<(String, PartitionModel)> {
        self.arms
            .iter()
            .map(|arm| {
                (
                    arm.level.clone(),
                    PartitionModel {
                        slices: arm.slices.clone(),
                        trimmed_rows: arm.trimmed_rows.clone(),
                        ..self.merged.clone()
                    },
                )
            })
            .collect()
    }
}

/// Grows a separate partition for each level of `feature`, with the proxy
/// computed within the arm and domains shared across arms.
pub fn conditioned_partition(data: &Dataset, config: &PartitionConfig, feature: &str) -> Result<ConditionedPartition> {
    config.validate()?;
    let t = data.column_index(feature).ok_or_else(|| Error::InvalidConfig(format!("unknown feature {feature}")))?;
    let col = data.column(t);
    if !matches!(col.kind(), FeatureKind::Nominal | FeatureKind::Ordered) {
        return Err(Error::NotCategorical {
            feature: feature.to_string(),
        });
    }
    let codes: BTreeSet<i64> = col.values.iter().map(|&v| v as i64).collect();
    if codes.len() < 2 {
        return Err(Error::NotCategorical {
            feature: feature.to_string(),
        });
    }

    // Per-arm proxy and trimming on the arm's own rows.
    struct ArmRows {
        code: i64,
        kept: Vec<usize>,
        trimmed: Vec<usize>,
        y: Option<Vec<f64>>,
    }
    let mut arms = Vec::new();
    for &code in &codes {
        let rows: Vec<usize> = (0..data.n_rows()).filter(|&i| data.value(i, t) as i64 == code).collect();
        let n = rows.len();
        let label = col.label_of(code as f64).unwrap_or_else(|| code.to_string());
        if n < 2 * config.min_leaf(n) {
            warn!("arm {feature} = {label} has {n} rows; emitting a single slice");
            arms.push(ArmRows {
                code,
                kept: rows,
                trimmed: Vec::new(),
                y: None,
            });
            continue;
        }
        let arm_data = data.select_rows(&rows);
        let (proxy_data, _) = arm_data.drop_constant_features();
        let method = match config.proxy {
            ProxyMethod::GowerKnn { m } => ProxyMethod::GowerKnn {
                m: m.map(|m| m.min(n - 1)),
            },
            ref other => other.clone(),
        };
        let target = compute_proxy(&proxy_data, &method, config.seed)?;
        let trimmed = trim_outliers(&arm_data, &target, config.trim_fraction)?;
        arms.push(ArmRows {
            code,
            kept: trimmed.kept.iter().map(|&k| rows[k]).collect(),
            trimmed: trimmed.dropped.iter().map(|&k| rows[k]).collect(),
            y: Some(trimmed.target.values),
        });
    }

    let mut kept: Vec<usize> = arms.iter().flat_map(|a| a.kept.iter().copied()).collect();
    kept.sort_unstable();
    let kept_data = data.select_rows(&kept);
    let (kept_data, dropped) = kept_data.drop_constant_features();
    if dropped.iter().any(|d| d == feature) {
        return Err(Error::NotCategorical {
            feature: feature.to_string(),
        });
    }
    for name in &dropped {
        log::warn!("dropping single-valued feature `{name}`");
    }
    let space = FeatureSpace::from_dataset(&kept_data)?;
    let aligned = space.align(&data.select_features(
        &space.domains().iter().map(|d| d.name.as_str()).collect::<Vec<_>>(),
    )?)?;
    let tj = space.index_of(feature).expect("conditioning feature retained");
    let tdomain = space.domain(tj);
    let params = config.carve_params();

    let mut out_arms = Vec::new();
    let mut events = Vec::new();
    let mut all_leaves = Vec::new();
    let mut all_empties = Vec::new();
    for arm in arms {
        let arm_code = aligned.value(arm.kept[0], tj);
        let constraint = match tdomain.kind {
            FeatureKind::Nominal => Constraint::Levels(BTreeSet::from([arm_code as u32])),
            _ => Constraint::Interval(Interval::closed(arm_code - 0.5, arm_code + 0.5)),
        };
        let root = space.full_slice().with_constraint(tj, constraint, tdomain);
        let level = col.label_of(arm.code as f64).unwrap_or_else(|| arm.code.to_string());
        // Growth indexes y by dataset row; arm rows map into a sparse vector.
        let mut y_full = vec![0.0; data.n_rows()];
        let (leaves, empties) = match &arm.y {
            None => (vec![(root, arm.kept.clone(), None)], Vec::new()),
            Some(y) => {
                for (&r, &v) in arm.kept.iter().zip(y) {
                    y_full[r] = v;
                }
                let (root_trimmed, mut empties) = carve_after_split(&root, &aligned, &arm.kept, &space, &params)?;
                events.push(SplitEvent {
                    parent: root.clone(),
                    children: vec![root_trimmed.clone()],
                    empties: empties.clone(),
                });
                let limits = GrowthLimits::new(config, y);
                let mut growth = Growth {
                    leaves: Vec::new(),
                    empties: Vec::new(),
                    events: Vec::new(),
                };
                grow(&aligned, &y_full, &space, config, &limits, root_trimmed, arm.kept.clone(), &mut growth)?;
                events.append(&mut growth.events);
                empties.append(&mut growth.empties);
                let leaves = growth
                    .leaves
                    .into_iter()
                    .map(|(s, rows)| {
                        let mean = mean_of(&y_full, &rows);
                        (s, rows, mean)
                    })
                    .collect();
                (leaves, empties)
            }
        };
        let slices = assemble(&space, config, leaves.clone(), empties.clone())?;
        all_leaves.extend(leaves);
        all_empties.extend(empties);
        out_arms.push(ConditionedArm {
            level,
            slices,
            rows: arm.kept,
            trimmed_rows: arm.trimmed,
        });
    }
    let merged_slices = assemble(&space, config, all_leaves, all_empties)?;
    let mut trimmed_rows: Vec<usize> = out_arms.iter().flat_map(|a| a.trimmed_rows.iter().copied()).collect();
    trimmed_rows.sort_unstable();
    Ok(ConditionedPartition {
        feature: feature.to_string(),
        merged: PartitionModel {
            space,
            slices: merged_slices,
            config: config.clone(),
            trimmed_rows,
            n_rows: data.n_rows(),
            dropped_features: dropped,
        },
        arms: out_arms,
        events,
    })
}
