//! Occupancy fractions and the chi-squared uniformity statistic.
//!
//! Under uniformity a slice's occupancy φ_k is expected to equal its volume
//! V_k. The statistic `χ = Σ (φ_k − V_k)² / V_k` is compared against a
//! chi-squared distribution with `K − 1` degrees of freedom.

use log::warn;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};
use crate::feature::Dataset;
use crate::tree::PartitionModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceOccupancy {
    pub id: usize,
    pub count: usize,
    pub phi: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub k: usize,
    pub n_rows: usize,
    /// Rows of the evaluated dataset inside no slice; excluded from φ.
    pub rows_outside: usize,
    pub slices: Vec<SliceOccupancy>,
    pub chi: f64,
    pub df: usize,
    /// `χ / (K − 1)`; reported as 0 when `K = 1`.
    pub normalized: f64,
    pub normalized_defined: bool,
    pub p_value: f64,
}

/// Rows of `data` per slice, plus the number of rows inside no slice.
pub fn occupancy_counts(model: &PartitionModel, data: &Dataset) -> Result<(Vec<usize>, usize)> {
    let aligned = model.space.align(data)?;
    let mut counts = vec![0usize; model.k()];
    let mut outside = 0;
    for i in 0..aligned.n_rows() {
        match model.locate(&aligned, i) {
            Some(k) => counts[k] += 1,
            None => outside += 1,
        }
    }
    if outside > 0 {
        warn!("{outside} rows fall outside every slice and are excluded");
    }
    Ok((counts, outside))
}

/// φ_k over the rows that fall inside the model's space.
pub fn occupancy_fractions(model: &PartitionModel, data: &Dataset) -> Result<Vec<f64>> {
    let (counts, _) = occupancy_counts(model, data)?;
    Ok(fractions(&counts))
}

fn fractions(counts: &[usize]) -> Vec<f64> {
    let n: usize = counts.iter().sum();
    counts
        .iter()
        .map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 })
        .collect()
}

/// `Σ (φ_k − V_k)² / V_k`.
pub fn chi_statistic(phi: &[f64], volumes: &[f64]) -> f64 {
    phi.iter().zip(volumes).map(|(&p, &v)| (p - v) * (p - v) / v).sum()
}

pub fn uniformity_statistic(model: &PartitionModel, data: &Dataset) -> Result<UniformityReport> {
    let (counts, outside) = occupancy_counts(model, data)?;
    let phi = fractions(&counts);
    let volumes: Vec<f64> = model.slices.iter().map(|s| s.volume).collect();
    let k = model.k();
    let chi = chi_statistic(&phi, &volumes);
    let df = k.saturating_sub(1);
    let p_value = if df == 0 { 1.0 } else { chisq_upper_tail(chi, df as f64)? };
    Ok(UniformityReport {
        k,
        n_rows: data.n_rows(),
        rows_outside: outside,
        slices: model
            .slices
            .iter()
            .zip(counts.iter().zip(&phi))
            .map(|(s, (&count, &phi))| SliceOccupancy {
                id: s.id,
                count,
                phi,
                volume: s.volume,
            })
            .collect(),
        chi,
        df,
        normalized: if df == 0 { 0.0 } else { chi / df as f64 },
        normalized_defined: df > 0,
        p_value,
    })
}

/// Upper-tail probability `P(X ≥ x)` of a chi-squared variable with `df`
/// degrees of freedom.
pub fn chisq_upper_tail(x: f64, df: f64) -> Result<f64> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::NegativeInput(x));
    }
    if !(df > 0.0) {
        return Err(Error::InvalidConfig(format!("degrees of freedom {df} must be positive")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(gamma_ur(df / 2.0, x / 2.0).clamp(0.0, 1.0))
}
