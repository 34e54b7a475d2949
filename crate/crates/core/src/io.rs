//! File formats: schema JSON, CSV data, partition JSON.

use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature::{parse_schema, validate_dataset, Dataset, Domain, FeatureKind, FeatureSchema};
use crate::geometry::{Constraint, FeatureSpace, Interval, Slice, Subset};
use crate::tree::{PartitionConfig, PartitionModel};

pub const FORMAT_VERSION: u32 = 1;

pub fn read_schema(path: impl AsRef<Path>) -> Result<Vec<FeatureSchema>> {
    parse_schema(&fs::read_to_string(path)?)
}

/// Parses CSV text with a header row against `schema`.
pub fn parse_csv<R: Read>(reader: R, schema: &[FeatureSchema]) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in rdr.records() {
        rows.push(record?.iter().map(str::to_string).collect::<Vec<_>>());
    }
    validate_dataset(&header, &rows, schema)
}

pub fn read_csv(path: impl AsRef<Path>, schema: &[FeatureSchema]) -> Result<Dataset> {
    parse_csv(fs::File::open(path)?, schema)
}

/// As [`parse_csv`], ignoring columns that `schema` does not name.
pub fn parse_csv_columns<R: Read>(reader: R, schema: &[FeatureSchema]) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let keep: Vec<usize> = (0..header.len())
        .filter(|&j| schema.iter().any(|f| f.name == header[j]))
        .collect();
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        rows.push(keep.iter().map(|&j| record.get(j).unwrap_or("").to_string()).collect::<Vec<_>>());
    }
    let header: Vec<String> = keep.iter().map(|&j| header[j].clone()).collect();
    validate_dataset(&header, &rows, schema)
}

pub fn read_csv_columns(path: impl AsRef<Path>, schema: &[FeatureSchema]) -> Result<Dataset> {
    parse_csv_columns(fs::File::open(path)?, schema)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainRecord {
    pub name: String,
    pub kind: FeatureKind,
    pub lo: f64,
    pub hi: f64,
    pub levels: Vec<String>,
    pub size: f64,
    pub n_unique: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ordered_levels: Vec<String>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub code_offset: usize,
    /// Distinct observed values (shifted codes for ordered features).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unique_values: Vec<f64>,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

impl From<&Domain> for DomainRecord {
    fn from(d: &Domain) -> Self {
        Self {
            name: d.name.clone(),
            kind: d.kind,
            lo: d.lo,
            hi: d.hi,
            levels: d.levels.clone(),
            size: d.size,
            n_unique: d.n_unique,
            ordered_levels: d.ordered_levels.clone(),
            code_offset: d.code_offset,
            unique_values: d.unique_values.clone(),
        }
    }
}

impl From<DomainRecord> for Domain {
    fn from(r: DomainRecord) -> Self {
        Self {
            name: r.name,
            kind: r.kind,
            lo: r.lo,
            hi: r.hi,
            levels: r.levels,
            ordered_levels: r.ordered_levels,
            code_offset: r.code_offset,
            size: r.size,
            n_unique: r.n_unique,
            unique_values: r.unique_values,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstraintRecord {
    Interval { feature: String, interval: Interval },
    Levels { feature: String, levels: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceRecord {
    pub id: usize,
    pub is_empty: bool,
    pub support: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_density: Option<f64>,
    pub volume: f64,
    /// Non-complete subsets only.
    pub constraints: Vec<ConstraintRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionFile {
    pub format_version: u32,
    pub config: PartitionConfig,
    pub n_rows: usize,
    #[serde(default)]
    pub dropped_features: Vec<String>,
    pub domains: Vec<DomainRecord>,
    pub trimmed_rows: Vec<usize>,
    pub slices: Vec<SliceRecord>,
}

fn constraint_record(s: &Subset, d: &Domain) -> ConstraintRecord {
    match &s.constraint {
        Constraint::Interval(iv) => ConstraintRecord::Interval {
            feature: d.name.clone(),
            interval: *iv,
        },
        Constraint::Levels(set) => ConstraintRecord::Levels {
            feature: d.name.clone(),
            levels: set.iter().filter_map(|&c| d.level_label(c)).map(str::to_string).collect(),
        },
    }
}

pub fn slice_record(slice: &Slice, space: &FeatureSpace) -> SliceRecord {
    SliceRecord {
        id: slice.id,
        is_empty: slice.is_empty,
        support: slice.support,
        mean_density: slice.mean_density,
        volume: slice.volume,
        constraints: slice
            .subsets
            .iter()
            .filter(|s| !s.complete)
            .map(|s| constraint_record(s, space.domain(s.feature)))
            .collect(),
    }
}

pub fn slice_from_record(record: &SliceRecord, space: &FeatureSpace) -> Result<Slice> {
    let mut slice = space.full_slice();
    for c in &record.constraints {
        let (name, constraint) = match c {
            ConstraintRecord::Interval { feature, interval } => (feature, Constraint::Interval(*interval)),
            ConstraintRecord::Levels { feature, levels } => {
                let j = space
                    .index_of(feature)
                    .ok_or_else(|| Error::ModelDataMismatch(format!("unknown feature `{feature}`")))?;
                let d = space.domain(j);
                let codes = levels
                    .iter()
                    .map(|l| {
                        d.levels.iter().position(|x| x == l).map(|p| p as u32).ok_or_else(|| Error::UnknownLevel {
                            feature: feature.clone(),
                            label: l.clone(),
                        })
                    })
                    .collect::<Result<_>>()?;
                (feature, Constraint::Levels(codes))
            }
        };
        let j = space
            .index_of(name)
            .ok_or_else(|| Error::ModelDataMismatch(format!("unknown feature `{name}`")))?;
        slice.subsets[j] = Subset::new(j, constraint, space.domain(j));
    }
    slice.id = record.id;
    slice.is_empty = record.is_empty;
    slice.support = record.support;
    slice.mean_density = record.mean_density;
    slice.volume = record.volume;
    Ok(slice)
}

pub fn partition_file(model: &PartitionModel) -> PartitionFile {
    PartitionFile {
        format_version: FORMAT_VERSION,
        config: model.config.clone(),
        n_rows: model.n_rows,
        dropped_features: model.dropped_features.clone(),
        domains: model.space.domains().iter().map(DomainRecord::from).collect(),
        trimmed_rows: model.trimmed_rows.clone(),
        slices: model.slices.iter().map(|s| slice_record(s, &model.space)).collect(),
    }
}

pub fn model_from_file(file: PartitionFile) -> Result<PartitionModel> {
    if file.format_version != FORMAT_VERSION {
        return Err(Error::InvalidSchema(format!(
            "unsupported partition format version {}",
            file.format_version
        )));
    }
    let space = FeatureSpace::new(file.domains.into_iter().map(Domain::from).collect());
    let slices = file
        .slices
        .iter()
        .map(|r| slice_from_record(r, &space))
        .collect::<Result<Vec<_>>>()?;
    Ok(PartitionModel {
        space,
        slices,
        config: file.config,
        trimmed_rows: file.trimmed_rows,
        n_rows: file.n_rows,
        dropped_features: file.dropped_features,
    })
}

/// Pretty JSON with a trailing newline. Floats use the shortest
/// representation that parses back to the same value.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn partition_to_json(model: &PartitionModel) -> Result<String> {
    to_json(&partition_file(model))
}

pub fn partition_from_json(json: &str) -> Result<PartitionModel> {
    model_from_file(serde_json::from_str(json)?)
}

pub fn write_partition(model: &PartitionModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, partition_to_json(model)?)?;
    Ok(())
}

pub fn read_partition(path: impl AsRef<Path>) -> Result<PartitionModel> {
    partition_from_json(&fs::read_to_string(path)?)
}
