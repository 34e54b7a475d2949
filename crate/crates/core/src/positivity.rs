//! Positivity screening with treatment-conditioned partitions.
//!
//! Slices that are sparse within one treatment arm are candidate regions of
//! poor overlap. Each candidate is re-counted in every arm with the treatment
//! constraint removed; it is flagged when the arms' support fractions differ
//! by at least `imbalance_ratio`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::feature::Dataset;
use crate::geometry::{FeatureSpace, Slice, Subset};
use crate::tree::{conditioned_partition, ConditionedPartition, PartitionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositivityConfig {
    pub sparsity_quantile: f64,
    pub imbalance_ratio: f64,
}

impl Default for PositivityConfig {
    fn default() -> Self {
        Self {
            sparsity_quantile: 0.25,
            imbalance_ratio: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmSupport {
    pub level: String,
    pub count: usize,
    pub arm_size: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationCandidate {
    /// Arm whose partition produced the slice.
    pub source_level: String,
    pub source_slice: usize,
    pub source_is_empty: bool,
    /// Mean proxy value of the source slice; absent for empty slices.
    pub sparsity: Option<f64>,
    pub rules: Vec<String>,
    pub arms: Vec<ArmSupport>,
    pub total_support: usize,
    pub flagged: bool,
    /// Source slice with the treatment subset made complete.
    #[serde(skip)]
    pub base: Slice,
}

#[derive(Debug, Clone)]
pub struct Screening {
    pub treatment: String,
    pub config: PositivityConfig,
    pub partition: ConditionedPartition,
    pub candidates: Vec<ViolationCandidate>,
}

impl Screening {
    pub fn space(&self) -> &FeatureSpace {
        &self.partition.merged.space
    }
}

/// `true` when the largest support fraction is at least `ratio` times the
/// smallest, or when some arm is empty and another is not.
pub fn imbalanced(fractions: &[f64], ratio: f64) -> bool {
    let max = fractions.iter().copied().fold(0.0, f64::max);
    let min = fractions.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        return false;
    }
    if min == 0.0 {
        return true;
    }
    max / min >= ratio
}

pub fn screen_positivity(
    data: &Dataset,
    treatment: &str,
    config: &PartitionConfig,
    positivity: &PositivityConfig,
) -> Result<Screening> {
    if !(positivity.sparsity_quantile > 0.0 && positivity.sparsity_quantile < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "sparsity quantile {} is outside (0, 1)",
            positivity.sparsity_quantile
        )));
    }
    if !(positivity.imbalance_ratio > 1.0) {
        return Err(Error::InvalidConfig(format!(
            "imbalance ratio {} must exceed 1",
            positivity.imbalance_ratio
        )));
    }
    let partition = conditioned_partition(data, config, treatment)?;
    let space = &partition.merged.space;
    let tj = space.index_of(treatment).expect("treatment retained");
    let aligned = space.align(data)?;

    // Arm of every row by treatment code, in domain level order.
    let arm_codes: Vec<f64> = {
        let set: BTreeSet<i64> = (0..aligned.n_rows()).map(|i| aligned.value(i, tj) as i64).collect();
        set.into_iter().map(|c| c as f64).collect()
    };
    let arm_of = |i: usize| arm_codes.iter().position(|&c| c == aligned.value(i, tj));
    let mut arm_sizes = vec![0usize; arm_codes.len()];
    for i in 0..aligned.n_rows() {
        if let Some(a) = arm_of(i) {
            arm_sizes[a] += 1;
        }
    }
    let arm_labels: Vec<String> = arm_codes
        .iter()
        .map(|&c| aligned.column(tj).label_of(c).unwrap_or_else(|| c.to_string()))
        .collect();

    let mut candidates: Vec<ViolationCandidate> = Vec::new();
    for arm in &partition.arms {
        let mut nonempty: Vec<&Slice> = arm.slices.iter().filter(|s| !s.is_empty).collect();
        nonempty.sort_by(|a, b| {
            b.mean_density
                .unwrap_or(f64::NEG_INFINITY)
                .total_cmp(&a.mean_density.unwrap_or(f64::NEG_INFINITY))
                .then(a.id.cmp(&b.id))
        });
        let take = (positivity.sparsity_quantile * nonempty.len() as f64 - 1e-9).ceil() as usize;
        let selected = nonempty
            .into_iter()
            .take(take)
            .chain(arm.slices.iter().filter(|s| s.is_empty));
        for slice in selected {
            let mut base = Slice::from_subsets(slice.subsets.clone());
            base.subsets[tj] = Subset::full(tj, space.domain(tj));
            if candidates.iter().any(|c| c.base.same_region(&base)) {
                continue;
            }
            let mut counts = vec![0usize; arm_codes.len()];
            for i in 0..aligned.n_rows() {
                if base.contains_row(&aligned, i) {
                    if let Some(a) = arm_of(i) {
                        counts[a] += 1;
                    }
                }
            }
            let arms: Vec<ArmSupport> = counts
                .iter()
                .zip(&arm_sizes)
                .zip(&arm_labels)
                .map(|((&count, &arm_size), level)| ArmSupport {
                    level: level.clone(),
                    count,
                    arm_size,
                    fraction: if arm_size == 0 { 0.0 } else { count as f64 / arm_size as f64 },
                })
                .collect();
            let fractions: Vec<f64> = arms.iter().map(|a| a.fraction).collect();
            candidates.push(ViolationCandidate {
                source_level: arm.level.clone(),
                source_slice: slice.id,
                source_is_empty: slice.is_empty,
                sparsity: slice.mean_density,
                rules: base.rules(space),
                total_support: counts.iter().sum(),
                flagged: imbalanced(&fractions, positivity.imbalance_ratio),
                arms,
                base,
            });
        }
    }
    Ok(Screening {
        treatment: treatment.to_string(),
        config: *positivity,
        partition,
        candidates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovalReport {
    pub removed_per_arm: Vec<(String, usize)>,
    pub removed_total: usize,
    pub removed_rows: Vec<usize>,
}

/// Removes the rows inside any flagged candidate's base slice.
pub fn remove_slices(
    data: &Dataset,
    space: &FeatureSpace,
    treatment: &str,
    candidates: &[ViolationCandidate],
) -> Result<(Dataset, RemovalReport)> {
    let aligned = space.align(data)?;
    let t = data
        .column_index(treatment)
        .ok_or_else(|| Error::ModelDataMismatch(format!("data has no feature `{treatment}`")))?;
    let flagged: Vec<&Slice> = candidates.iter().filter(|c| c.flagged).map(|c| &c.base).collect();
    let mut keep = Vec::new();
    let mut removed = Vec::new();
    for i in 0..aligned.n_rows() {
        if flagged.iter().any(|s| s.contains_row(&aligned, i)) {
            removed.push(i);
        } else {
            keep.push(i);
        }
    }
    let col = data.column(t);
    let levels: BTreeSet<String> = (0..data.n_rows())
        .map(|i| col.label_of(data.value(i, t)).unwrap_or_default())
        .collect();
    let removed_per_arm = levels
        .into_iter()
        .map(|l| {
            let n = removed
                .iter()
                .filter(|&&i| col.label_of(data.value(i, t)).unwrap_or_default() == l)
                .count();
            (l, n)
        })
        .collect();
    Ok((
        data.select_rows(&keep),
        RemovalReport {
            removed_per_arm,
            removed_total: removed.len(),
            removed_rows: removed,
        },
    ))
}

/// Aligned text table: rules, per-arm counts, size and flag.
pub fn candidates_table(candidates: &[ViolationCandidate]) -> String {
    let mut header = vec!["#".to_string(), "rules".to_string()];
    if let Some(c) = candidates.first() {
        header.extend(c.arms.iter().map(|a| format!("n[{}]", a.level)));
    }
    header.push("size".into());
    header.push("flagged".into());
    let mut rows = vec![header];
    for (k, c) in candidates.iter().enumerate() {
        let mut row = vec![(k + 1).to_string(), if c.rules.is_empty() { "(all)".into() } else { c.rules.join(" & ") }];
        row.extend(c.arms.iter().map(|a| a.count.to_string()));
        row.push(c.total_support.to_string());
        row.push(if c.flagged { "yes" } else { "no" }.into());
        rows.push(row);
    }
    let cols = rows[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|j| rows.iter().map(|r| r.get(j).map_or(0, |s| s.chars().count())).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(j, s)| if j == 1 { format!("{s:<w$}", w = widths[j]) } else { format!("{s:>w$}", w = widths[j]) })
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}
