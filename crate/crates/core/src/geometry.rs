//! Subsets, slices and the fractional length / volume calculus.
//!
//! A [`Subset`] constrains one feature: an interval for real, integer and
//! ordered features, a level set for nominal ones. A [`Slice`] holds one
//! subset per feature of its [`FeatureSpace`]; subsets equal to the full
//! domain are *complete* and do not count toward the slice's dimension.
//!
//! Lengths are fractions of the domain size. Real-valued subsets use the
//! ε-adjusted form `(1-ε)·raw + ε·n_s/n_j`, where `n_s` counts distinct
//! observed values inside the subset, so that a dense singleton `[a, a]`
//! still has positive length and lengths of any tiling of the domain sum to 1.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature::{compute_domains, Dataset, Domain, FeatureKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Self {
        Self {
            lo,
            hi,
            lo_open,
            hi_open,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, false)
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_open { x > self.lo } else { x >= self.lo };
        let below = if self.hi_open { x < self.hi } else { x <= self.hi };
        above && below
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// True when no real number lies in the interval.
    pub fn is_void(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    /// Number of entries of the sorted slice `values` inside the interval.
    pub fn count_in(&self, values: &[f64]) -> usize {
        let start = if self.lo_open {
            values.partition_point(|&v| v <= self.lo)
        } else {
            values.partition_point(|&v| v < self.lo)
        };
        let end = if self.hi_open {
            values.partition_point(|&v| v < self.hi)
        } else {
            values.partition_point(|&v| v <= self.hi)
        };
        end.saturating_sub(start)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_open { '(' } else { '[' },
            self.lo,
            self.hi,
            if self.hi_open { ')' } else { ']' }
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    Interval(Interval),
    /// Nominal level codes, indexing `Domain::levels`.
    Levels(BTreeSet<u32>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subset {
    pub feature: usize,
    pub constraint: Constraint,
    pub complete: bool,
}

impl Subset {
    /// Builds a subset, normalizing discrete endpoints to closed and
    /// deriving `complete` from the domain.
    pub fn new(feature: usize, constraint: Constraint, domain: &Domain) -> Self {
        let constraint = match constraint {
            Constraint::Interval(iv) if domain.kind.is_discrete() => Constraint::Interval(Interval::closed(iv.lo, iv.hi)),
            other => other,
        };
        let complete = match &constraint {
            Constraint::Interval(iv) => {
                iv.lo == domain.lo
                    && iv.hi == domain.hi
                    && (domain.kind.is_discrete() || (!iv.lo_open && !iv.hi_open))
            }
            Constraint::Levels(set) => {
                set.len() == domain.levels.len() && set.iter().all(|&c| (c as usize) < domain.levels.len())
            }
        };
        Self {
            feature,
            constraint,
            complete,
        }
    }

    pub fn full(feature: usize, domain: &Domain) -> Self {
        let constraint = match domain.kind {
            FeatureKind::Nominal => Constraint::Levels((0..domain.levels.len() as u32).collect()),
            _ => Constraint::Interval(Interval::closed(domain.lo, domain.hi)),
        };
        Self {
            feature,
            constraint,
            complete: true,
        }
    }

    #[inline]
    pub fn admits(&self, x: f64) -> bool {
        // Complete subsets are checked too: values of a foreign dataset may
        // fall outside the observed domain.
        match &self.constraint {
            Constraint::Interval(iv) => iv.contains(x),
            Constraint::Levels(set) => x >= 0.0 && x.fract() == 0.0 && set.contains(&(x as u32)),
        }
    }

    pub fn interval(&self) -> Option<&Interval> {
        match &self.constraint {
            Constraint::Interval(iv) => Some(iv),
            Constraint::Levels(_) => None,
        }
    }

    pub fn levels(&self) -> Option<&BTreeSet<u32>> {
        match &self.constraint {
            Constraint::Levels(set) => Some(set),
            Constraint::Interval(_) => None,
        }
    }

    /// Human-readable rule, e.g. `2.41 <= FLAVANOIDS <= 3.305`.
    pub fn describe(&self, domain: &Domain) -> String {
        match &self.constraint {
            Constraint::Interval(iv) if domain.kind == FeatureKind::Ordered => {
                let label = |code: f64| domain.levels.get(code.max(0.0) as usize).cloned().unwrap_or_default();
                let first = (iv.lo + 0.5).round();
                let last = (iv.hi - 0.5).round();
                if first == last {
                    format!("{} = {}", domain.name, label(first))
                } else {
                    format!("{} <= {} <= {}", label(first), domain.name, label(last))
                }
            }
            Constraint::Interval(iv) => format!(
                "{} {} {} {} {}",
                iv.lo,
                if iv.lo_open { "<" } else { "<=" },
                domain.name,
                if iv.hi_open { "<" } else { "<=" },
                iv.hi
            ),
            Constraint::Levels(set) => {
                let labels: Vec<&str> = set
                    .iter()
                    .filter_map(|&c| domain.level_label(c))
                    .collect();
                format!("{} in {{{}}}", domain.name, labels.join(", "))
            }
        }
    }
}

/// Fractional length of `s` within `d`.
///
/// `unique_values` are the sorted distinct observed values used to count
/// `n_s` for real features; `n_j` is `d.n_unique`.
pub fn subset_length(s: &Subset, d: &Domain, unique_values: &[f64], epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    if s.complete {
        return Ok(1.0);
    }
    let empty = || Error::EmptySubset {
        feature: d.name.clone(),
    };
    match (&s.constraint, d.kind) {
        (Constraint::Levels(set), FeatureKind::Nominal) => {
            if set.is_empty() {
                return Err(empty());
            }
            Ok(set.len() as f64 / d.size)
        }
        (Constraint::Interval(iv), FeatureKind::Integer | FeatureKind::Ordered) => {
            let w = iv.width();
            if w <= 0.0 {
                return Err(empty());
            }
            Ok(w / d.size)
        }
        (Constraint::Interval(iv), FeatureKind::Real) => {
            let n_s = iv.count_in(unique_values);
            if iv.is_void() || (iv.width() == 0.0 && n_s == 0) {
                return Err(empty());
            }
            let raw = iv.width() / d.size;
            Ok((1.0 - epsilon) * raw + epsilon * n_s as f64 / d.n_unique as f64)
        }
        _ => Err(Error::TypeMismatch {
            feature: d.name.clone(),
            row: None,
            value: "subset kind does not match the domain".into(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub id: usize,
    pub subsets: Vec<Subset>,
    pub support: usize,
    pub mean_density: Option<f64>,
    pub volume: f64,
    pub is_empty: bool,
}

impl Slice {
    /// Geometry-only slice; statistics are filled in later.
    pub fn from_subsets(subsets: Vec<Subset>) -> Self {
        Self {
            id: 0,
            subsets,
            support: 0,
            mean_density: None,
            volume: 0.0,
            is_empty: false,
        }
    }

    pub fn dimension(&self) -> usize {
        slice_dimension(self)
    }

    pub fn subset(&self, feature: usize) -> &Subset {
        &self.subsets[feature]
    }

    /// Membership of row `i` of an aligned dataset.
    #[inline]
    pub fn contains_row(&self, data: &Dataset, i: usize) -> bool {
        self.subsets.iter().all(|s| s.admits(data.value(i, s.feature)))
    }

    /// Sets `subsets[feature]`, recomputing completeness.
    pub fn with_constraint(&self, feature: usize, constraint: Constraint, domain: &Domain) -> Slice {
        let mut out = Slice::from_subsets(self.subsets.clone());
        out.subsets[feature] = Subset::new(feature, constraint, domain);
        out
    }

    /// Same-geometry check (ignores statistics and ids).
    pub fn same_region(&self, other: &Slice) -> bool {
        self.subsets == other.subsets
    }

    pub fn rules(&self, space: &FeatureSpace) -> Vec<String> {
        self.subsets
            .iter()
            .filter(|s| !s.complete)
            .map(|s| s.describe(space.domain(s.feature)))
            .collect()
    }
}

pub fn slice_dimension(slice: &Slice) -> usize {
    slice.subsets.iter().filter(|s| !s.complete).count()
}

/// Product of subset lengths; complete subsets contribute 1.
pub fn slice_volume(slice: &Slice, space: &FeatureSpace, epsilon: f64) -> Result<f64> {
    slice.subsets.iter().try_fold(1.0, |acc, s| {
        let d = space.domain(s.feature);
        Ok(acc * subset_length(s, d, &d.unique_values, epsilon)?)
    })
}

/// Membership of a single row given as aligned per-feature values.
pub fn slice_contains(slice: &Slice, row: &[f64]) -> Result<bool> {
    if row.len() != slice.subsets.len() {
        return Err(Error::TypeMismatch {
            feature: String::from("<row>"),
            row: None,
            value: format!("{} values for {} features", row.len(), slice.subsets.len()),
        });
    }
    Ok(slice.subsets.iter().all(|s| s.admits(row[s.feature])))
}

/// Empty region to remove from a subset: boundary pieces of an interval, or
/// a set of levels.
#[derive(Debug, Clone, PartialEq)]
pub enum Gap {
    Bounds {
        lower: Option<Interval>,
        upper: Option<Interval>,
    },
    Levels(BTreeSet<u32>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subtraction {
    pub remainder: Subset,
    pub pieces: Vec<Subset>,
}

/// Removes a boundary gap from `s`, returning the shrunken subset and the
/// contiguous gap pieces. Pieces and remainder tile `s` exactly.
pub fn subset_subtract(s: &Subset, gap: &Gap, domain: &Domain) -> Result<Subtraction> {
    let discrete = domain.kind.is_discrete();
    match (&s.constraint, gap) {
        (Constraint::Interval(outer), Gap::Bounds { lower, upper }) => {
            if lower.is_none() && upper.is_none() {
                return Err(Error::EmptySubset {
                    feature: domain.name.clone(),
                });
            }
            let void = |iv: &Interval| if discrete { iv.width() <= 0.0 } else { iv.is_void() };
            let mut rem = *outer;
            let mut pieces = Vec::new();
            if let Some(l) = lower {
                if void(l) {
                    return Err(Error::EmptySubset {
                        feature: domain.name.clone(),
                    });
                }
                if l.lo != outer.lo || (!discrete && l.lo_open != outer.lo_open) {
                    return Err(Error::GapNotBoundary);
                }
                if l.hi > outer.hi {
                    return Err(Error::GapNotContained);
                }
                rem.lo = l.hi;
                rem.lo_open = !discrete && !l.hi_open;
                pieces.push(Subset::new(s.feature, Constraint::Interval(*l), domain));
            }
            if let Some(u) = upper {
                if void(u) {
                    return Err(Error::EmptySubset {
                        feature: domain.name.clone(),
                    });
                }
                if u.hi != outer.hi || (!discrete && u.hi_open != outer.hi_open) {
                    return Err(Error::GapNotBoundary);
                }
                if u.lo < outer.lo {
                    return Err(Error::GapNotContained);
                }
                rem.hi = u.lo;
                rem.hi_open = !discrete && !u.lo_open;
                pieces.push(Subset::new(s.feature, Constraint::Interval(*u), domain));
            }
            if void(&rem) {
                return Err(Error::GapNotContained);
            }
            Ok(Subtraction {
                remainder: Subset::new(s.feature, Constraint::Interval(rem), domain),
                pieces,
            })
        }
        (Constraint::Levels(outer), Gap::Levels(gap)) => {
            if gap.is_empty() {
                return Err(Error::EmptySubset {
                    feature: domain.name.clone(),
                });
            }
            if !gap.is_subset(outer) || gap.len() == outer.len() {
                return Err(Error::GapNotContained);
            }
            let rem: BTreeSet<u32> = outer.difference(gap).copied().collect();
            Ok(Subtraction {
                remainder: Subset::new(s.feature, Constraint::Levels(rem), domain),
                pieces: vec![Subset::new(s.feature, Constraint::Levels(gap.clone()), domain)],
            })
        }
        _ => Err(Error::TypeMismatch {
            feature: domain.name.clone(),
            row: None,
            value: "gap kind does not match the subset".into(),
        }),
    }
}

/// The observed feature space: one domain per retained feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpace {
    domains: Vec<Domain>,
}

impl FeatureSpace {
    pub fn new(domains: Vec<Domain>) -> Self {
        Self { domains }
    }

    pub fn from_dataset(data: &Dataset) -> Result<Self> {
        Ok(Self::new(compute_domains(data)?))
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn domain(&self, j: usize) -> &Domain {
        &self.domains[j]
    }

    pub fn len(&self) -> usize {
        self.domains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domains.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.domains.iter().position(|d| d.name == name)
    }

    pub fn full_slice(&self) -> Slice {
        Slice::from_subsets(
            self.domains
                .iter()
                .enumerate()
                .map(|(j, d)| Subset::full(j, d))
                .collect(),
        )
    }

    pub fn length(&self, s: &Subset, epsilon: f64) -> Result<f64> {
        let d = self.domain(s.feature);
        subset_length(s, d, &d.unique_values, epsilon)
    }

    pub fn volume(&self, slice: &Slice, epsilon: f64) -> Result<f64> {
        slice_volume(slice, self, epsilon)
    }

    /// Aligns `data` to this space's encodings and feature order.
    pub fn align(&self, data: &Dataset) -> Result<Dataset> {
        data.align_to(&self.domains)
    }
}
