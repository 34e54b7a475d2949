//! Empty-space carving.
//!
//! Two heuristics remove sizeable empty regions from a slice. At a split on
//! an ordered feature the space between the neighbouring observed values can
//! become its own empty slice ([`carve_at_split`]). After a split, empty
//! space between a child's subset bounds and its observed extent is trimmed
//! away feature by feature ([`carve_after_split`]).
//!
//! A gap piece is carved only if its own length exceeds `min_l`, every other
//! non-complete side of the resulting empty slice also exceeds `min_l`, and
//! the slice dimension stays within `p_star`.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::feature::FeatureKind;
use crate::geometry::{subset_subtract, Constraint, FeatureSpace, Gap, Interval, Slice, Subset};
use crate::feature::Dataset;
use crate::tree::{SplitCandidate, SplitRule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarveParams {
    pub min_l: f64,
    pub p_star: usize,
    pub epsilon: f64,
}

/// One contiguous empty piece between a subset bound and the observed extent.
#[derive(Debug, Clone, PartialEq)]
pub struct GapPiece {
    pub feature: usize,
    pub subset: Subset,
    pub length: f64,
    /// Which end of an interval the piece touches; `None` for level sets.
    pub side: Option<Side>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitChildren {
    pub left: Slice,
    pub right: Slice,
    pub empty: Option<Slice>,
}

/// Boundary gaps of `slice` relative to the rows `members`, ordered by
/// feature, lower piece before upper.
pub fn boundary_gaps(
    slice: &Slice,
    data: &Dataset,
    members: &[usize],
    space: &FeatureSpace,
    epsilon: f64,
) -> Result<Vec<GapPiece>> {
    let mut out = Vec::new();
    if members.is_empty() {
        return Ok(out);
    }
    for s in &slice.subsets {
        let j = s.feature;
        let domain = space.domain(j);
        let values = members.iter().map(|&i| data.value(i, j));
        let mut push = |constraint: Constraint, side: Option<Side>| -> Result<()> {
            let subset = Subset::new(j, constraint, domain);
            let length = space.length(&subset, epsilon)?;
            out.push(GapPiece {
                feature: j,
                subset,
                length,
                side,
            });
            Ok(())
        };
        match &s.constraint {
            Constraint::Levels(set) => {
                let seen: BTreeSet<u32> = values.filter(|v| *v >= 0.0).map(|v| v as u32).collect();
                let gap: BTreeSet<u32> = set.difference(&seen).copied().collect();
                if !gap.is_empty() {
                    push(Constraint::Levels(gap), None)?;
                }
            }
            Constraint::Interval(iv) => {
                let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                if domain.kind == FeatureKind::Real {
                    if iv.lo < lo {
                        push(Constraint::Interval(Interval::new(iv.lo, lo, iv.lo_open, true)), Some(Side::Lower))?;
                    }
                    if hi < iv.hi {
                        push(Constraint::Interval(Interval::new(hi, iv.hi, true, iv.hi_open)), Some(Side::Upper))?;
                    }
                } else {
                    if lo - 0.5 > iv.lo {
                        push(Constraint::Interval(Interval::closed(iv.lo, lo - 0.5)), Some(Side::Lower))?;
                    }
                    if hi + 0.5 < iv.hi {
                        push(Constraint::Interval(Interval::closed(hi + 0.5, iv.hi)), Some(Side::Upper))?;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Checks the dimension cap and the side lengths of the empty slice that
/// would replace feature `j` of `slice` with a gap of length `gap_length`.
fn gap_qualifies(
    slice: &Slice,
    j: usize,
    gap_length: f64,
    space: &FeatureSpace,
    params: &CarveParams,
) -> Result<bool> {
    if !(gap_length > params.min_l) {
        return Ok(false);
    }
    let dimension = slice.dimension() + usize::from(slice.subset(j).complete);
    if dimension > params.p_star {
        return Ok(false);
    }
    for s in &slice.subsets {
        if s.feature != j && !s.complete && !(space.length(s, params.epsilon)? > params.min_l) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn empty_slice(slice: &Slice, piece: &Subset, space: &FeatureSpace, epsilon: f64) -> Result<Slice> {
    let mut out = Slice::from_subsets(slice.subsets.clone());
    out.subsets[piece.feature] = piece.clone();
    out.is_empty = true;
    out.volume = space.volume(&out, epsilon)?;
    Ok(out)
}

/// Repeatedly removes the largest qualifying boundary gap piece, emitting
/// one empty slice per removed piece.
pub fn carve_after_split(
    slice: &Slice,
    data: &Dataset,
    members: &[usize],
    space: &FeatureSpace,
    params: &CarveParams,
) -> Result<(Slice, Vec<Slice>)> {
    let mut current = Slice::from_subsets(slice.subsets.clone());
    let mut empties = Vec::new();
    loop {
        let gaps = boundary_gaps(&current, data, members, space, params.epsilon)?;
        let mut best: Option<&GapPiece> = None;
        for g in &gaps {
            if best.map_or(true, |b| g.length > b.length)
                && gap_qualifies(&current, g.feature, g.length, space, params)?
            {
                best = Some(g);
            }
        }
        let Some(piece) = best else { break };
        let j = piece.feature;
        let domain = space.domain(j);
        let gap = match (&piece.subset.constraint, piece.side) {
            (Constraint::Levels(set), _) => Gap::Levels(set.clone()),
            (Constraint::Interval(iv), Some(Side::Lower)) => Gap::Bounds {
                lower: Some(*iv),
                upper: None,
            },
            (Constraint::Interval(iv), _) => Gap::Bounds {
                lower: None,
                upper: Some(*iv),
            },
        };
        let sub = subset_subtract(current.subset(j), &gap, domain)?;
        empties.push(empty_slice(&current, &piece.subset, space, params.epsilon)?);
        current.subsets[j] = sub.remainder;
    }
    Ok((current, empties))
}

/// Splits `parent` by `split`, widening the space between the neighbouring
/// observed values into an empty slice when it is large enough.
pub fn carve_at_split(
    parent: &Slice,
    split: &SplitCandidate,
    space: &FeatureSpace,
    params: &CarveParams,
) -> Result<SplitChildren> {
    let j = split.feature;
    let domain = space.domain(j);
    let outer = parent.subset(j);
    match (split.rule, &outer.constraint) {
        (SplitRule::Level(code), Constraint::Levels(set)) => {
            let left: BTreeSet<u32> = BTreeSet::from([code]);
            let right: BTreeSet<u32> = set.iter().copied().filter(|&c| c != code).collect();
            Ok(SplitChildren {
                left: parent.with_constraint(j, Constraint::Levels(left), domain),
                right: parent.with_constraint(j, Constraint::Levels(right), domain),
                empty: None,
            })
        }
        (
            SplitRule::Threshold {
                threshold,
                left_max,
                right_min,
            },
            Constraint::Interval(iv),
        ) => {
            let discrete = domain.kind.is_discrete();
            let gap = if discrete {
                Interval::closed(left_max + 0.5, right_min - 0.5)
            } else {
                Interval::open(left_max, right_min)
            };
            let has_gap = if discrete { gap.width() > 0.0 } else { !gap.is_void() };
            if has_gap {
                let gap_subset = Subset::new(j, Constraint::Interval(gap), domain);
                let length = space.length(&gap_subset, params.epsilon)?;
                if gap_qualifies(parent, j, length, space, params)? {
                    let (l_hi, r_lo) = if discrete { (gap.lo, gap.hi) } else { (left_max, right_min) };
                    let left = Interval::new(iv.lo, l_hi, iv.lo_open, false);
                    let right = Interval::new(r_lo, iv.hi, false, iv.hi_open);
                    return Ok(SplitChildren {
                        left: parent.with_constraint(j, Constraint::Interval(left), domain),
                        right: parent.with_constraint(j, Constraint::Interval(right), domain),
                        empty: Some(empty_slice(parent, &gap_subset, space, params.epsilon)?),
                    });
                }
            }
            let left = Interval::new(iv.lo, threshold, iv.lo_open, false);
            let right = Interval::new(threshold, iv.hi, !discrete, iv.hi_open);
            Ok(SplitChildren {
                left: parent.with_constraint(j, Constraint::Interval(left), domain),
                right: parent.with_constraint(j, Constraint::Interval(right), domain),
                empty: None,
            })
        }
        _ => Err(crate::error::Error::InvalidConfig(format!(
            "split rule does not match the kind of feature {}",
            domain.name
        ))),
    }
}
