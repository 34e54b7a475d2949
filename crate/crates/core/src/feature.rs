//! Feature kinds, observed domains and typed datasets.
//!
//! Every column is stored as `f64`: real and integer features hold their
//! values, ordered features hold recoded level positions (`0..=b-a`), and
//! nominal features hold an index into a label table. A dataset is *aligned*
//! to a list of domains when its nominal codes index the domain's level list
//! and its ordered codes share the domain's offset; geometry and membership
//! always operate on aligned data.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Code used for a nominal label that is absent from the reference domain.
/// It is contained in no level set.
pub const UNSEEN_LEVEL: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Real,
    Integer,
    Nominal,
    Ordered,
}

impl FeatureKind {
    /// Integer and ordered features live on a lattice with half-integer
    /// subset endpoints.
    pub fn is_discrete(self) -> bool {
        matches!(self, FeatureKind::Integer | FeatureKind::Ordered)
    }

    pub fn is_nominal(self) -> bool {
        self == FeatureKind::Nominal
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub name: String,
    pub kind: FeatureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordered_levels: Option<Vec<String>>,
}

impl FeatureSchema {
    pub fn new(name: impl Into<String>, kind: FeatureKind) -> Self {
        Self {
            name: name.into(),
            kind,
            ordered_levels: None,
        }
    }

    pub fn ordered<S: Into<String>>(name: impl Into<String>, levels: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.into(),
            kind: FeatureKind::Ordered,
            ordered_levels: Some(levels.into_iter().map(Into::into).collect()),
        }
    }

    fn validate(&self) -> Result<()> {
        match (&self.kind, &self.ordered_levels) {
            (FeatureKind::Ordered, Some(levels)) => {
                let distinct: HashSet<&String> = levels.iter().collect();
                if distinct.len() != levels.len() {
                    return Err(Error::InvalidSchema(format!(
                        "feature `{}` repeats an ordered level",
                        self.name
                    )));
                }
                if levels.len() < 2 {
                    return Err(Error::InvalidSchema(format!(
                        "feature `{}` needs at least two ordered levels",
                        self.name
                    )));
                }
                Ok(())
            }
            (FeatureKind::Ordered, None) => Err(Error::InvalidSchema(format!(
                "ordered feature `{}` is missing ordered_levels",
                self.name
            ))),
            (_, Some(_)) => Err(Error::InvalidSchema(format!(
                "feature `{}` declares ordered_levels but is not ordered",
                self.name
            ))),
            (_, None) => Ok(()),
        }
    }
}

/// Checks per-feature rules and name uniqueness.
pub fn validate_schema(schema: &[FeatureSchema]) -> Result<()> {
    let mut seen = HashSet::new();
    for f in schema {
        f.validate()?;
        if !seen.insert(f.name.as_str()) {
            return Err(Error::InvalidSchema(format!("duplicate feature name `{}`", f.name)));
        }
    }
    Ok(())
}

pub fn parse_schema(json: &str) -> Result<Vec<FeatureSchema>> {
    let schema: Vec<FeatureSchema> = serde_json::from_str(json)?;
    validate_schema(&schema)?;
    Ok(schema)
}

/// Observed domain of one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub name: String,
    pub kind: FeatureKind,
    /// Lower bound (numeric kinds; `-0.5` for ordered). Unused for nominal.
    pub lo: f64,
    /// Upper bound (numeric kinds). Unused for nominal.
    pub hi: f64,
    /// Nominal: observed labels, indexed by code. Ordered: labels of the
    /// recoded range `ℓ_a..=ℓ_b`.
    pub levels: Vec<String>,
    /// Ordered only: the full declared level list.
    pub ordered_levels: Vec<String>,
    /// Ordered only: position of `ℓ_a` in `ordered_levels`.
    pub code_offset: usize,
    pub size: f64,
    pub n_unique: usize,
    /// Sorted distinct observed values (numeric kinds). Used to count the
    /// observed values inside real-valued subsets.
    pub unique_values: Vec<f64>,
}

impl Domain {
    pub fn level_label(&self, code: u32) -> Option<&str> {
        self.levels.get(code as usize).map(String::as_str)
    }
}

/// One typed column.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub schema: FeatureSchema,
    pub values: Vec<f64>,
    /// Nominal label table, indexed by code.
    pub labels: Vec<String>,
    /// Ordered: position in `ordered_levels` of code 0.
    pub code_offset: usize,
}

impl Column {
    pub fn name(&self) -> &str {
        &self.schema.name
    }

    pub fn kind(&self) -> FeatureKind {
        self.schema.kind
    }

    /// Label of a stored value, for nominal and ordered columns.
    pub fn label_of(&self, value: f64) -> Option<String> {
        if value < 0.0 || value.fract() != 0.0 {
            return None;
        }
        match self.kind() {
            FeatureKind::Nominal => self.labels.get(value as usize).cloned(),
            FeatureKind::Ordered => self
                .schema
                .ordered_levels
                .as_ref()
                .and_then(|l| l.get(value as usize + self.code_offset).cloned()),
            _ => None,
        }
    }

    fn distinct_count(&self) -> usize {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Column>,
    n: usize,
}

impl Dataset {
    /// Builds a dataset from already-typed columns of equal length.
    pub fn from_columns(columns: Vec<Column>) -> Result<Self> {
        let schema: Vec<FeatureSchema> = columns.iter().map(|c| c.schema.clone()).collect();
        validate_schema(&schema)?;
        let n = columns.first().map_or(0, |c| c.values.len());
        if columns.iter().any(|c| c.values.len() != n) {
            return Err(Error::InvalidSchema("columns have different lengths".into()));
        }
        for c in &columns {
            for (i, &v) in c.values.iter().enumerate() {
                let ok = match c.kind() {
                    FeatureKind::Real => v.is_finite(),
                    FeatureKind::Integer => v.is_finite() && v.fract() == 0.0,
                    FeatureKind::Nominal => v.fract() == 0.0 && (v == UNSEEN_LEVEL || (v >= 0.0 && (v as usize) < c.labels.len())),
                    FeatureKind::Ordered => v.is_finite() && v.fract() == 0.0,
                };
                if !ok {
                    return Err(Error::TypeMismatch {
                        feature: c.name().to_string(),
                        row: Some(i),
                        value: v.to_string(),
                    });
                }
            }
        }
        Ok(Self { columns, n })
    }

    /// Convenience constructor from row-major encoded values. Nominal codes
    /// `0..k` get zero-padded labels so that label order equals code order.
    pub fn from_numeric_rows(schema: Vec<FeatureSchema>, rows: &[Vec<f64>]) -> Result<Self> {
        let columns = schema
            .into_iter()
            .enumerate()
            .map(|(j, s)| {
                let values: Vec<f64> = rows.iter().map(|r| r[j]).collect();
                let labels = if s.kind == FeatureKind::Nominal {
                    let k = values.iter().fold(0.0f64, |m, &v| m.max(v + 1.0)) as usize;
                    let width = k.saturating_sub(1).to_string().len();
                    (0..k).map(|c| format!("{c:0width$}")).collect()
                } else {
                    Vec::new()
                };
                Column {
                    schema: s,
                    values,
                    labels,
                    code_offset: 0,
                }
            })
            .collect();
        Self::from_columns(columns)
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Column {
        &self.columns[j]
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name() == name)
    }

    pub fn schema(&self) -> Vec<FeatureSchema> {
        self.columns.iter().map(|c| c.schema.clone()).collect()
    }

    #[inline]
    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.columns[feature].values[row]
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c.values[row]).collect()
    }

    /// Rows at `indices`, keeping every encoding unchanged.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                values: indices.iter().map(|&i| c.values[i]).collect(),
                ..c.clone()
            })
            .collect();
        Dataset {
            columns,
            n: indices.len(),
        }
    }

    /// Keeps only the named features, in the given order.
    pub fn select_features(&self, names: &[&str]) -> Result<Dataset> {
        let columns = names
            .iter()
            .map(|name| {
                self.column_index(name)
                    .map(|j| self.columns[j].clone())
                    .ok_or_else(|| Error::ModelDataMismatch(format!("data has no feature `{name}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset { columns, n: self.n })
    }

    /// Removes features with fewer than two distinct values. Returns the
    /// reduced dataset and the names of the dropped features.
    pub fn drop_constant_features(&self) -> (Dataset, Vec<String>) {
        let mut dropped = Vec::new();
        let columns = self
            .columns
            .iter()
            .filter(|c| {
                let keep = c.distinct_count() >= 2;
                if !keep {
                    dropped.push(c.name().to_string());
                }
                keep
            })
            .cloned()
            .collect();
        (Dataset { columns, n: self.n }, dropped)
    }

    /// Re-encodes the columns matching `domains` (by name, in domain order)
    /// so that nominal codes index `Domain::levels` and ordered codes share
    /// the domain offset. Unknown nominal labels become [`UNSEEN_LEVEL`].
    pub fn align_to(&self, domains: &[Domain]) -> Result<Dataset> {
        let mut columns = Vec::with_capacity(domains.len());
        for d in domains {
            let j = self
                .column_index(&d.name)
                .ok_or_else(|| Error::ModelDataMismatch(format!("data has no feature `{}`", d.name)))?;
            let col = &self.columns[j];
            if col.kind() != d.kind {
                return Err(Error::ModelDataMismatch(format!(
                    "feature `{}` is {:?} in the data but {:?} in the model",
                    d.name,
                    col.kind(),
                    d.kind
                )));
            }
            let mut out = col.clone();
            match d.kind {
                FeatureKind::Nominal => {
                    let index: HashMap<&str, usize> =
                        d.levels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
                    out.values = col
                        .values
                        .iter()
                        .map(|&v| {
                            col.label_of(v)
                                .and_then(|l| index.get(l.as_str()).map(|&i| i as f64))
                                .unwrap_or(UNSEEN_LEVEL)
                        })
                        .collect();
                    out.labels = d.levels.clone();
                }
                FeatureKind::Ordered => {
                    if col.schema.ordered_levels.as_deref() != Some(d.ordered_levels.as_slice()) {
                        return Err(Error::ModelDataMismatch(format!(
                            "feature `{}` declares different ordered levels",
                            d.name
                        )));
                    }
                    let shift = col.code_offset as f64 - d.code_offset as f64;
                    out.values = col.values.iter().map(|&v| v + shift).collect();
                    out.code_offset = d.code_offset;
                }
                FeatureKind::Real | FeatureKind::Integer => {}
            }
            columns.push(out);
        }
        Ok(Dataset { columns, n: self.n })
    }
}

/// Computes the observed domain of one column.
pub fn compute_domain(column: &Column) -> Result<Domain> {
    let name = column.name().to_string();
    let kind = column.kind();
    if column.values.is_empty() {
        return Err(Error::SingleValuedFeature { feature: name });
    }
    let mut uniq = column.values.clone();
    uniq.sort_by(f64::total_cmp);
    uniq.dedup();
    if kind == FeatureKind::Nominal {
        uniq.retain(|&v| v != UNSEEN_LEVEL);
    }
    if uniq.len() < 2 {
        return Err(Error::SingleValuedFeature { feature: name });
    }
    let min = uniq[0];
    let max = uniq[uniq.len() - 1];
    let domain = match kind {
        FeatureKind::Real => Domain {
            name,
            kind,
            lo: min,
            hi: max,
            levels: Vec::new(),
            ordered_levels: Vec::new(),
            code_offset: 0,
            size: max - min,
            n_unique: uniq.len(),
            unique_values: uniq,
        },
        FeatureKind::Integer => Domain {
            name,
            kind,
            lo: min - 0.5,
            hi: max + 0.5,
            levels: Vec::new(),
            ordered_levels: Vec::new(),
            code_offset: 0,
            size: max - min + 1.0,
            n_unique: uniq.len(),
            unique_values: uniq,
        },
        FeatureKind::Ordered => {
            let all = column.schema.ordered_levels.clone().unwrap_or_default();
            let offset = column.code_offset + min as usize;
            let span = max - min;
            let levels = all[offset..=offset + span as usize].to_vec();
            Domain {
                name,
                kind,
                lo: -0.5,
                hi: span + 0.5,
                levels,
                ordered_levels: all,
                code_offset: offset,
                size: span + 1.0,
                n_unique: uniq.len(),
                unique_values: uniq.iter().map(|v| v - min).collect(),
            }
        }
        FeatureKind::Nominal => {
            let levels: Vec<String> = uniq
                .iter()
                .map(|&v| column.labels[v as usize].clone())
                .collect();
            Domain {
                name,
                kind,
                lo: 0.0,
                hi: 0.0,
                size: levels.len() as f64,
                n_unique: levels.len(),
                levels,
                ordered_levels: Vec::new(),
                code_offset: 0,
                unique_values: Vec::new(),
            }
        }
    };
    Ok(domain)
}

/// Domains of every column, in column order.
pub fn compute_domains(dataset: &Dataset) -> Result<Vec<Domain>> {
    dataset.columns().iter().map(compute_domain).collect()
}

/// Recodes ordered labels to `0..=b-a`, where `ℓ_a`/`ℓ_b` are the lowest and
/// highest observed levels. Returns the codes and the position of `ℓ_a`.
pub fn recode_ordered<S: AsRef<str>>(labels: &[S], ordered_levels: &[String]) -> Result<(Vec<i64>, usize)> {
    let (codes, offset) = recode_ordered_lenient("ordered feature", labels, ordered_levels)?;
    let distinct: BTreeSet<i64> = codes.iter().copied().collect();
    if distinct.len() < 2 {
        return Err(Error::SingleValuedFeature {
            feature: "ordered feature".into(),
        });
    }
    Ok((codes, offset))
}

fn recode_ordered_lenient<S: AsRef<str>>(
    feature: &str,
    labels: &[S],
    ordered_levels: &[String],
) -> Result<(Vec<i64>, usize)> {
    let position: HashMap<&str, usize> = ordered_levels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let raw = labels
        .iter()
        .map(|l| {
            position.get(l.as_ref()).copied().ok_or_else(|| Error::UnknownLevel {
                feature: feature.to_string(),
                label: l.as_ref().to_string(),
            })
        })
        .collect::<Result<Vec<usize>>>()?;
    let offset = raw.iter().copied().min().unwrap_or(0);
    Ok((raw.iter().map(|&p| (p - offset) as i64).collect(), offset))
}

/// Types a raw string table against `schema`. Columns are reordered to the
/// schema order; the header must name exactly the schema's features.
pub fn validate_dataset<H: AsRef<str>, C: AsRef<str>>(
    header: &[H],
    rows: &[Vec<C>],
    schema: &[FeatureSchema],
) -> Result<Dataset> {
    validate_schema(schema)?;
    let header: Vec<String> = header.iter().map(|h| h.as_ref().trim().to_string()).collect();
    let expected: Vec<String> = schema.iter().map(|f| f.name.clone()).collect();
    let header_set: HashSet<&String> = header.iter().collect();
    let expected_set: HashSet<&String> = expected.iter().collect();
    if header_set != expected_set || header_set.len() != header.len() {
        return Err(Error::HeaderMismatch {
            expected,
            found: header,
        });
    }

    let mut columns = Vec::with_capacity(schema.len());
    for feature in schema {
        let src = header.iter().position(|h| *h == feature.name).expect("checked above");
        let mut cells = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let cell = row.get(src).map(|c| c.as_ref().trim()).unwrap_or("");
            if cell.is_empty() {
                return Err(Error::MissingValue {
                    row: i,
                    feature: feature.name.clone(),
                });
            }
            cells.push(cell);
        }
        let mismatch = |row: usize, value: &str| Error::TypeMismatch {
            feature: feature.name.clone(),
            row: Some(row),
            value: value.to_string(),
        };
        let column = match feature.kind {
            FeatureKind::Real => {
                let values = cells
                    .iter()
                    .enumerate()
                    .map(|(i, c)| match c.parse::<f64>() {
                        Ok(v) if v.is_finite() => Ok(v),
                        _ => Err(mismatch(i, c)),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Column {
                    schema: feature.clone(),
                    values,
                    labels: Vec::new(),
                    code_offset: 0,
                }
            }
            FeatureKind::Integer => {
                let values = cells
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        if let Ok(v) = c.parse::<i64>() {
                            return Ok(v as f64);
                        }
                        match c.parse::<f64>() {
                            Ok(v) if v.is_finite() && v.fract() == 0.0 => Ok(v),
                            _ => Err(mismatch(i, c)),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Column {
                    schema: feature.clone(),
                    values,
                    labels: Vec::new(),
                    code_offset: 0,
                }
            }
            FeatureKind::Nominal => {
                let labels: Vec<String> = cells
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                let index: HashMap<&str, usize> =
                    labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
                let values = cells.iter().map(|c| index[c] as f64).collect();
                Column {
                    schema: feature.clone(),
                    values,
                    labels,
                    code_offset: 0,
                }
            }
            FeatureKind::Ordered => {
                let levels = feature.ordered_levels.as_deref().unwrap_or_default();
                let (codes, offset) = recode_ordered_lenient(&feature.name, &cells, levels)?;
                Column {
                    schema: feature.clone(),
                    values: codes.into_iter().map(|c| c as f64).collect(),
                    labels: Vec::new(),
                    code_offset: offset,
                }
            }
        };
        columns.push(column);
    }
    Dataset::from_columns(columns)
}
