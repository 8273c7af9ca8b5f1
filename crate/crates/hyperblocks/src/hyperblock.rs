//! The hyperblock data model: per-attribute interval constraints (possibly
//! disjunctive), membership and purity tests, clause accounting, rule text,
//! and the versioned model document.
//!
//! All intervals are closed: a point exactly on a bound is inside. The same
//! convention applies to opposing-point checks, so a boundary collision
//! blocks a merge.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, NormalizationParams};
use crate::error::{Error, Result};
use crate::parallel;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Closed interval on a normalized attribute. Serializes as a bare
/// `[lo, hi]` pair; bound ordering is checked by model validation so load
/// errors can name the offending block and attribute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.lo, self.hi).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (lo, hi) = <(f64, f64)>::deserialize(d)?;
        Ok(Interval { lo, hi })
    }
}

impl Interval {
    pub const FULL: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Interval {
        debug_assert!(lo <= hi, "interval lo {lo} > hi {hi}");
        Interval { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_full(&self) -> bool {
        self.lo == 0.0 && self.hi == 1.0
    }
}

/// Constraint on one attribute: a union of one or more disjoint closed
/// intervals, sorted by lower bound. A single [0,1] interval is "trivial"
/// and contributes no clause.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttributeConstraint {
    intervals: Vec<Interval>,
}

impl AttributeConstraint {
    pub fn single(lo: f64, hi: f64) -> AttributeConstraint {
        AttributeConstraint {
            intervals: vec![Interval::new(lo, hi)],
        }
    }

    pub fn full() -> AttributeConstraint {
        AttributeConstraint {
            intervals: vec![Interval::FULL],
        }
    }

    /// Build from arbitrary intervals, sorting and coalescing overlapping or
    /// touching ones into disjoint form.
    pub fn from_intervals(mut intervals: Vec<Interval>) -> AttributeConstraint {
        assert!(
            !intervals.is_empty(),
            "constraint needs at least one interval"
        );
        intervals.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match out.last_mut() {
                // closed intervals: touching endpoints merge too
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => out.push(iv),
            }
        }
        AttributeConstraint { intervals: out }
    }

    /// Disjoint union of two constraints.
    pub fn union(a: &AttributeConstraint, b: &AttributeConstraint) -> AttributeConstraint {
        let mut all = a.intervals.clone();
        all.extend_from_slice(&b.intervals);
        AttributeConstraint::from_intervals(all)
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn admits(&self, v: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(v))
    }

    pub fn is_trivial(&self) -> bool {
        self.intervals.len() == 1 && self.intervals[0].is_full()
    }

    pub fn is_single(&self) -> bool {
        self.intervals.len() == 1
    }

    /// Clauses contributed: one per interval, zero if trivial.
    pub fn clause_count(&self) -> usize {
        if self.is_trivial() {
            0
        } else {
            self.intervals.len()
        }
    }

    fn validate(&self, block: u32, attr: usize) -> Result<()> {
        if self.intervals.is_empty() {
            return Err(Error::Schema(format!(
                "block {block}, attribute {attr}: empty constraint"
            )));
        }
        let mut prev_hi: Option<f64> = None;
        for iv in &self.intervals {
            if !(iv.lo.is_finite() && iv.hi.is_finite()) || iv.lo > iv.hi {
                return Err(Error::Schema(format!(
                    "block {block}, attribute {attr}: invalid interval [{}, {}]",
                    iv.lo, iv.hi
                )));
            }
            if iv.lo < 0.0 || iv.hi > 1.0 {
                return Err(Error::Schema(format!(
                    "block {block}, attribute {attr}: interval [{}, {}] outside [0,1]",
                    iv.lo, iv.hi
                )));
            }
            if let Some(ph) = prev_hi {
                if iv.lo <= ph {
                    return Err(Error::Schema(format!(
                        "block {block}, attribute {attr}: intervals overlap or are unsorted"
                    )));
                }
            }
            prev_hi = Some(iv.hi);
        }
        Ok(())
    }
}

/// An axis-aligned region labeled with a class: one constraint per
/// attribute. The model's atomic rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperblock {
    pub id: u32,
    /// Class index into the model's class list.
    pub label: usize,
    /// Training points assigned to this block.
    pub coverage: usize,
    pub constraints: Vec<AttributeConstraint>,
}

impl Hyperblock {
    pub fn new(id: u32, label: usize, constraints: Vec<AttributeConstraint>) -> Hyperblock {
        Hyperblock {
            id,
            label,
            coverage: 0,
            constraints,
        }
    }

    /// Membership: every attribute constraint admits the point (closed
    /// bounds, OR across a constraint's intervals).
    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.constraints.len(), "dimension mismatch");
        self.constraints.iter().zip(x).all(|(c, &v)| c.admits(v))
    }

    pub fn clause_count(&self) -> usize {
        self.constraints.iter().map(|c| c.clause_count()).sum()
    }

    /// One interval per attribute?
    pub fn is_simple(&self) -> bool {
        self.constraints.iter().all(|c| c.is_single())
    }

    /// Zero-volume block: every constraint pinned to a single value.
    pub fn is_degenerate(&self) -> bool {
        self.constraints
            .iter()
            .all(|c| c.is_single() && c.intervals[0].lo == c.intervals[0].hi)
    }

    /// Human-readable rule, omitting trivial constraints.
    pub fn to_rule_text(&self, attribute_names: &[String], class_names: &[String]) -> String {
        let mut predicates = Vec::new();
        for (name, c) in attribute_names.iter().zip(&self.constraints) {
            if c.is_trivial() {
                continue;
            }
            let parts: Vec<String> = c
                .intervals
                .iter()
                .map(|iv| format!("{:.2} \u{2264} {} \u{2264} {:.2}", iv.lo, name, iv.hi))
                .collect();
            if parts.len() == 1 {
                predicates.push(parts.into_iter().next().unwrap());
            } else {
                predicates.push(format!("({})", parts.join(" or ")));
            }
        }
        let body = if predicates.is_empty() {
            "always".to_string()
        } else {
            predicates.join(" and ")
        };
        format!("if {} then {}", body, class_names[self.label])
    }
}

/// Element-wise envelope of two simple same-class blocks: per attribute,
/// the min of lower bounds and max of upper bounds.
pub fn envelope(b1: &Hyperblock, b2: &Hyperblock) -> Result<Vec<Interval>> {
    if b1.label != b2.label {
        return Err(Error::Data(format!(
            "envelope requires matching labels, got {} and {}",
            b1.label, b2.label
        )));
    }
    if b1.constraints.len() != b2.constraints.len() {
        return Err(Error::DimensionMismatch {
            expected: b1.constraints.len(),
            got: b2.constraints.len(),
        });
    }
    if !b1.is_simple() || !b2.is_simple() {
        return Err(Error::Data(
            "envelope is only defined for simple blocks".to_string(),
        ));
    }
    Ok(b1
        .constraints
        .iter()
        .zip(&b2.constraints)
        .map(|(a, b)| {
            let ia = a.intervals[0];
            let ib = b.intervals[0];
            Interval::new(ia.lo.min(ib.lo), ia.hi.max(ib.hi))
        })
        .collect())
}

/// Does the candidate region contain a training point of any other class?
/// Returns true when the region is pure. Closed-interval membership, so an
/// opposing point exactly on a bound counts as inside.
pub fn purity_check(bounds: &[AttributeConstraint], data: &Dataset, label: usize) -> bool {
    !parallel::any_index(data.len(), |i| {
        data.labels[i] != label && region_contains(bounds, &data.points[i])
    })
}

/// Membership test against a bare constraint vector.
pub fn region_contains(bounds: &[AttributeConstraint], x: &[f64]) -> bool {
    debug_assert_eq!(bounds.len(), x.len());
    bounds.iter().zip(x).all(|(c, &v)| c.admits(v))
}

/// Convenience for CMH candidates: wrap simple envelope bounds.
pub fn intervals_to_constraints(bounds: &[Interval]) -> Vec<AttributeConstraint> {
    bounds
        .iter()
        .map(|iv| AttributeConstraint {
            intervals: vec![*iv],
        })
        .collect()
}

/// Snapshot of the parameters a model was built with and the complexity
/// trajectory across pipeline stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ConfigSnapshot {
    pub generation: Option<crate::generation::GenConfig>,
    pub simplify: Option<crate::simplify::SimplifyConfig>,
    #[serde(default)]
    pub stages: Vec<StageMetrics>,
}

/// Block/clause totals before and after one pipeline stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageMetrics {
    pub stage: String,
    pub blocks_before: usize,
    pub blocks_after: usize,
    pub clauses_before: usize,
    pub clauses_after: usize,
}

/// An ordered hyperblock collection plus everything needed to classify raw
/// points: class names, attribute names, and normalization parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HBModel {
    pub version: u32,
    pub class_names: Vec<String>,
    pub attribute_names: Vec<String>,
    pub normalization: NormalizationParams,
    pub blocks: Vec<Hyperblock>,
    #[serde(default)]
    pub config: ConfigSnapshot,
}

impl HBModel {
    pub fn attribute_count(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    /// Number of blocks per class; the N of the normalized majority vote.
    pub fn class_block_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.class_names.len()];
        for b in &self.blocks {
            counts[b.label] += 1;
        }
        counts
    }

    pub fn total_clauses(&self) -> usize {
        self.blocks.iter().map(|b| b.clause_count()).sum()
    }

    /// Serialize to the versioned JSON document. Numeric values use the
    /// shortest decimal form that round-trips exactly.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    /// Parse and validate a model document.
    pub fn from_json(text: &str) -> Result<HBModel> {
        let model: HBModel =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != MODEL_FORMAT_VERSION {
            return Err(Error::Schema(format!(
                "unsupported model format version {} (expected {})",
                self.version, MODEL_FORMAT_VERSION
            )));
        }
        let n_attr = self.attribute_names.len();
        if self.normalization.mins.len() != n_attr || self.normalization.maxs.len() != n_attr {
            return Err(Error::Schema(
                "normalization parameter length does not match attribute count".to_string(),
            ));
        }
        for (lo, hi) in self.normalization.mins.iter().zip(&self.normalization.maxs) {
            if lo > hi {
                return Err(Error::Schema(format!(
                    "normalization min {lo} exceeds max {hi}"
                )));
            }
        }
        for b in &self.blocks {
            if b.constraints.len() != n_attr {
                return Err(Error::Schema(format!(
                    "block {} has {} constraints, expected {n_attr}",
                    b.id,
                    b.constraints.len()
                )));
            }
            if b.label >= self.class_names.len() {
                return Err(Error::Schema(format!(
                    "block {} labels unknown class {}",
                    b.id, b.label
                )));
            }
            for (attr, c) in b.constraints.iter().enumerate() {
                c.validate(b.id, attr)?;
            }
        }
        Ok(())
    }

    /// Rules sorted by coverage, largest first.
    pub fn rules_by_coverage(&self) -> Vec<&Hyperblock> {
        let mut refs: Vec<&Hyperblock> = self.blocks.iter().collect();
        refs.sort_by(|a, b| b.coverage.cmp(&a.coverage).then(a.id.cmp(&b.id)));
        refs
    }

    /// Full rule listing, one line per block.
    pub fn rule_listing(&self) -> String {
        let mut out = String::new();
        for b in self.rules_by_coverage() {
            let _ = writeln!(
                out,
                "{}  [block {}, coverage {}, clauses {}]",
                b.to_rule_text(&self.attribute_names, &self.class_names),
                b.id,
                b.coverage,
                b.clause_count()
            );
        }
        out
    }
}
