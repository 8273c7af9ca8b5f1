//! Model simplification: interval generalization per attribute (R2A),
//! redundant block removal by overlap analysis (R2B), and merging of
//! same-class blocks into disjunctive units. Every operation preserves
//! training-set purity.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::hyperblock::{purity_check, AttributeConstraint, HBModel, Hyperblock, StageMetrics};

/// Which order attributes are generalized in during R2A.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttributeOrderPolicy {
    /// 0..n-1 as stored.
    Natural,
    /// Ascending per-attribute Fisher discriminant ratio: the least
    /// class-separating attributes are generalized first.
    #[default]
    Fisher,
    /// Caller-supplied permutation, e.g. from a domain expert.
    Explicit(Vec<usize>),
}

impl AttributeOrderPolicy {
    pub fn parse(s: &str) -> Result<AttributeOrderPolicy> {
        match s {
            "natural" => Ok(AttributeOrderPolicy::Natural),
            "fisher" => Ok(AttributeOrderPolicy::Fisher),
            other => Err(Error::Config(format!(
                "unknown attribute order policy {other:?}"
            ))),
        }
    }
}

/// One simplification stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    R2a,
    R2b,
    Disjunctive,
}

impl Stage {
    pub fn parse(s: &str) -> Result<Stage> {
        match s {
            "r2a" => Ok(Stage::R2a),
            "r2b" => Ok(Stage::R2b),
            "disjunctive" => Ok(Stage::Disjunctive),
            other => Err(Error::Config(format!(
                "unknown simplification stage {other:?}"
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Stage::R2a => "r2a",
            Stage::R2b => "r2b",
            Stage::Disjunctive => "disjunctive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplifyConfig {
    /// Minimum surviving block size for R2B.
    pub removal_threshold: usize,
    pub attribute_order: AttributeOrderPolicy,
    /// Most attributes a candidate pair may differ on when forming a
    /// disjunctive unit.
    pub max_disjunctions: usize,
    pub stages: Vec<Stage>,
}

impl Default for SimplifyConfig {
    fn default() -> Self {
        SimplifyConfig {
            removal_threshold: 1,
            attribute_order: AttributeOrderPolicy::default(),
            max_disjunctions: 1,
            stages: vec![Stage::R2a, Stage::R2b, Stage::Disjunctive],
        }
    }
}

/// Resolve an ordering policy into a concrete permutation.
pub fn attribute_order(data: &Dataset, policy: &AttributeOrderPolicy) -> Result<Vec<usize>> {
    let n = data.attribute_count();
    match policy {
        AttributeOrderPolicy::Natural => Ok((0..n).collect()),
        AttributeOrderPolicy::Fisher => {
            let ratios = fisher_ratios(data);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| ratios[a].total_cmp(&ratios[b]).then(a.cmp(&b)));
            Ok(order)
        }
        AttributeOrderPolicy::Explicit(perm) => {
            let mut seen = vec![false; n];
            if perm.len() != n {
                return Err(Error::Config(format!(
                    "attribute order has {} entries, expected {n}",
                    perm.len()
                )));
            }
            for &i in perm {
                if i >= n || seen[i] {
                    return Err(Error::Config("attribute order is not a permutation".into()));
                }
                seen[i] = true;
            }
            Ok(perm.clone())
        }
    }
}

/// Per-attribute Fisher discriminant ratio: variance of the class means
/// over the mean of within-class variances (population forms).
fn fisher_ratios(data: &Dataset) -> Vec<f64> {
    let n_attr = data.attribute_count();
    let n_class = data.class_count();
    let mut sums = vec![vec![0.0f64; n_attr]; n_class];
    let mut sq_sums = vec![vec![0.0f64; n_attr]; n_class];
    let mut counts = vec![0usize; n_class];
    for (p, &c) in data.points.iter().zip(&data.labels) {
        counts[c] += 1;
        for (a, &v) in p.iter().enumerate() {
            sums[c][a] += v;
            sq_sums[c][a] += v * v;
        }
    }

    (0..n_attr)
        .map(|a| {
            let mut means = Vec::with_capacity(n_class);
            let mut within = 0.0;
            let mut populated = 0usize;
            for c in 0..n_class {
                if counts[c] == 0 {
                    continue;
                }
                populated += 1;
                let n = counts[c] as f64;
                let mean = sums[c][a] / n;
                means.push(mean);
                within += (sq_sums[c][a] / n - mean * mean).max(0.0);
            }
            if populated == 0 {
                return 0.0;
            }
            within /= populated as f64;
            let grand = means.iter().sum::<f64>() / means.len() as f64;
            let between =
                means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / means.len() as f64;
            if within == 0.0 {
                if between == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                between / within
            }
        })
        .collect()
}

/// R2A: per block, widen each attribute constraint to the full [0,1] range
/// in the given order, keeping the expansion only when no opposing point
/// enters. Clause counts never increase.
pub fn r2a(model: &HBModel, data: &Dataset, order: &[usize]) -> HBModel {
    let mut out = model.clone();
    for block in &mut out.blocks {
        for &attr in order {
            if block.constraints[attr].is_trivial() {
                continue;
            }
            let previous =
                std::mem::replace(&mut block.constraints[attr], AttributeConstraint::full());
            if !purity_check(&block.constraints, data, block.label) {
                block.constraints[attr] = previous;
            }
        }
        block.coverage = data
            .points
            .iter()
            .zip(&data.labels)
            .filter(|(p, &l)| l == block.label && block.contains(p))
            .count();
    }
    out
}

/// R2B: flag each training point to its first containing block, count,
/// re-flag to the largest containing block by that count, recount, and
/// delete blocks under the removal threshold.
pub fn r2b(model: &HBModel, data: &Dataset, removal_threshold: usize) -> HBModel {
    let blocks = &model.blocks;

    // step 1: first containing block, in model order
    let first_owner: Vec<Option<usize>> = data
        .points
        .iter()
        .map(|p| blocks.iter().position(|b| b.contains(p)))
        .collect();

    // step 2
    let mut first_counts = vec![0usize; blocks.len()];
    for owner in first_owner.iter().flatten() {
        first_counts[*owner] += 1;
    }

    // step 3: largest first-count wins; ties go to the lower block id
    let largest_owner: Vec<Option<usize>> = data
        .points
        .iter()
        .map(|p| {
            let mut best: Option<usize> = None;
            for (bi, b) in blocks.iter().enumerate() {
                if !b.contains(p) {
                    continue;
                }
                best = Some(match best {
                    None => bi,
                    Some(cur) => {
                        let better = first_counts[bi] > first_counts[cur]
                            || (first_counts[bi] == first_counts[cur]
                                && blocks[bi].id < blocks[cur].id);
                        if better {
                            bi
                        } else {
                            cur
                        }
                    }
                });
            }
            best
        })
        .collect();

    // step 4
    let mut final_counts = vec![0usize; blocks.len()];
    for owner in largest_owner.iter().flatten() {
        final_counts[*owner] += 1;
    }

    // step 5
    let mut out = model.clone();
    let mut keep = final_counts.iter().map(|&c| c >= removal_threshold);
    out.blocks.retain(|_| keep.next().unwrap());
    let mut counts = final_counts.iter().filter(|&&c| c >= removal_threshold);
    for b in &mut out.blocks {
        b.coverage = *counts.next().unwrap();
    }
    out
}

/// Merge same-class blocks that are identical on all but at most
/// `max_disjunctions` attributes into a single block whose differing
/// constraints become disjoint interval unions, provided the combined
/// region stays pure. Scans pairs in ascending id order and repeats until
/// no merge applies.
pub fn disjunctive_merge(model: &HBModel, data: &Dataset, max_disjunctions: usize) -> HBModel {
    let mut out = model.clone();
    out.blocks.sort_by_key(|b| b.id);

    'restart: loop {
        for i in 0..out.blocks.len() {
            for j in (i + 1)..out.blocks.len() {
                let (a, b) = (&out.blocks[i], &out.blocks[j]);
                if a.label != b.label {
                    continue;
                }
                let differing: Vec<usize> = (0..a.constraints.len())
                    .filter(|&k| a.constraints[k] != b.constraints[k])
                    .collect();
                if differing.len() > max_disjunctions {
                    continue;
                }
                let mut candidate = a.constraints.clone();
                for &k in &differing {
                    candidate[k] = AttributeConstraint::union(&a.constraints[k], &b.constraints[k]);
                }
                if !purity_check(&candidate, data, a.label) {
                    continue;
                }
                let merged_label = a.label;
                let merged_id = a.id.min(b.id);
                out.blocks[i] = Hyperblock::new(merged_id, merged_label, candidate);
                out.blocks[i].coverage = data
                    .points
                    .iter()
                    .zip(&data.labels)
                    .filter(|(p, &l)| l == merged_label && out.blocks[i].contains(p))
                    .count();
                out.blocks.remove(j);
                continue 'restart;
            }
        }
        break;
    }
    out
}

/// Run the configured stages in order, recording block and clause counts
/// before and after each one in the model's config snapshot.
pub fn simplify_pipeline(model: &HBModel, data: &Dataset, cfg: &SimplifyConfig) -> Result<HBModel> {
    let order = attribute_order(data, &cfg.attribute_order)?;
    let mut current = model.clone();
    for stage in &cfg.stages {
        let blocks_before = current.blocks.len();
        let clauses_before = current.total_clauses();
        current = match stage {
            Stage::R2a => r2a(&current, data, &order),
            Stage::R2b => r2b(&current, data, cfg.removal_threshold),
            Stage::Disjunctive => disjunctive_merge(&current, data, cfg.max_disjunctions),
        };
        current.config.stages.push(StageMetrics {
            stage: stage.name().to_string(),
            blocks_before,
            blocks_after: current.blocks.len(),
            clauses_before,
            clauses_after: current.total_clauses(),
        });
    }
    current.config.simplify = Some(cfg.clone());
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::NormalizationParams;
    use crate::generation::{generate, GenConfig};
    use crate::hyperblock::{ConfigSnapshot, Hyperblock, MODEL_FORMAT_VERSION};

    fn dataset(points: Vec<Vec<f64>>, labels: Vec<usize>, classes: usize) -> Dataset {
        let n_attr = points.first().map_or(0, |p| p.len());
        Dataset {
            points,
            labels,
            attribute_names: (0..n_attr).map(|i| format!("x{}", i + 1)).collect(),
            class_names: (0..classes).map(|c| format!("c{c}")).collect(),
            norm: NormalizationParams {
                mins: vec![0.0; n_attr],
                maxs: vec![1.0; n_attr],
            },
        }
    }

    fn model_of(blocks: Vec<Hyperblock>, data: &Dataset) -> HBModel {
        HBModel {
            version: MODEL_FORMAT_VERSION,
            class_names: data.class_names.clone(),
            attribute_names: data.attribute_names.clone(),
            normalization: data.norm.clone(),
            blocks,
            config: ConfigSnapshot::default(),
        }
    }

    fn simple_block(id: u32, label: usize, bounds: &[(f64, f64)]) -> Hyperblock {
        Hyperblock::new(
            id,
            label,
            bounds
                .iter()
                .map(|&(lo, hi)| AttributeConstraint::single(lo, hi))
                .collect(),
        )
    }

    #[test]
    fn natural_order_is_identity() {
        let data = dataset(vec![vec![0.0; 4], vec![1.0; 4]], vec![0, 1], 2);
        let order = attribute_order(&data, &AttributeOrderPolicy::Natural).unwrap();
        assert_eq!(order, vec![0, 1, 2, 3]);
    }

    #[test]
    fn constant_attribute_ordered_first() {
        let data = dataset(
            vec![
                vec![0.5, 0.0],
                vec![0.5, 0.2],
                vec![0.5, 0.8],
                vec![0.5, 1.0],
            ],
            vec![0, 0, 1, 1],
            2,
        );
        let order = attribute_order(&data, &AttributeOrderPolicy::Fisher).unwrap();
        assert_eq!(order[0], 0, "constant attribute has ratio 0");
    }

    #[test]
    fn noise_ordered_before_separator() {
        // attribute 0 ("A") separates classes perfectly; attribute 1 ("B")
        // has identical class means. Expected ratios computed right here
        // from the definition.
        let points = vec![
            vec![0.0, 0.0],
            vec![0.1, 0.5],
            vec![0.2, 1.0],
            vec![0.8, 0.0],
            vec![0.9, 0.5],
            vec![1.0, 1.0],
        ];
        let labels = vec![0, 0, 0, 1, 1, 1];
        let data = dataset(points.clone(), labels.clone(), 2);

        // independent hand computation
        let ratio = |attr: usize| {
            let vals = |class: usize| -> Vec<f64> {
                points
                    .iter()
                    .zip(&labels)
                    .filter(|(_, &l)| l == class)
                    .map(|(p, _)| p[attr])
                    .collect()
            };
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let var = |v: &[f64]| {
                let m = mean(v);
                v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / v.len() as f64
            };
            let (a, b) = (vals(0), vals(1));
            let class_means = [mean(&a), mean(&b)];
            let grand = (class_means[0] + class_means[1]) / 2.0;
            let between = class_means
                .iter()
                .map(|m| (m - grand) * (m - grand))
                .sum::<f64>()
                / 2.0;
            let within = (var(&a) + var(&b)) / 2.0;
            between / within
        };
        assert!(ratio(0) > ratio(1));

        let order = attribute_order(&data, &AttributeOrderPolicy::Fisher).unwrap();
        assert_eq!(order, vec![1, 0], "noise first, separator last");
    }

    #[test]
    fn explicit_order_must_be_permutation() {
        let data = dataset(vec![vec![0.0, 0.0], vec![1.0, 1.0]], vec![0, 1], 2);
        assert!(attribute_order(&data, &AttributeOrderPolicy::Explicit(vec![1, 0])).is_ok());
        assert!(attribute_order(&data, &AttributeOrderPolicy::Explicit(vec![0, 0])).is_err());
        assert!(attribute_order(&data, &AttributeOrderPolicy::Explicit(vec![0])).is_err());
    }

    #[test]
    fn r2a_generalizes_redundant_attribute() {
        // class 0 is fully separated on attribute 0; attribute 1 carries
        // no information, so its constraint should widen to [0,1]
        let data = dataset(
            vec![
                vec![0.1, 0.3],
                vec![0.2, 0.6],
                vec![0.9, 0.3],
                vec![0.8, 0.6],
            ],
            vec![0, 0, 1, 1],
            2,
        );
        let model = model_of(vec![simple_block(0, 0, &[(0.1, 0.2), (0.3, 0.6)])], &data);
        let out = r2a(&model, &data, &[1, 0]);
        assert!(out.blocks[0].constraints[1].is_trivial());
        assert!(!out.blocks[0].constraints[0].is_trivial());
        assert_eq!(out.blocks[0].clause_count(), 1);
        assert!(purity_check(&out.blocks[0].constraints, &data, 0));
    }

    #[test]
    fn r2a_reverts_everything_when_boxed_in() {
        // opposing points adjacent on every side: no expansion stays pure
        let data = dataset(
            vec![vec![0.5, 0.5], vec![0.5, 0.9], vec![0.9, 0.5]],
            vec![0, 1, 1],
            2,
        );
        let model = model_of(vec![simple_block(0, 0, &[(0.4, 0.6), (0.4, 0.6)])], &data);
        let out = r2a(&model, &data, &[0, 1]);
        assert_eq!(out.blocks[0].constraints, model.blocks[0].constraints);
    }

    #[test]
    fn r2a_never_increases_clauses() {
        let data = dataset(
            vec![
                vec![0.1, 0.5, 0.2],
                vec![0.3, 0.4, 0.25],
                vec![0.9, 0.5, 0.8],
                vec![0.7, 0.6, 0.9],
            ],
            vec![0, 0, 1, 1],
            2,
        );
        let model = generate(&data, &GenConfig::default()).unwrap();
        let order = attribute_order(&data, &AttributeOrderPolicy::Fisher).unwrap();
        let out = r2a(&model, &data, &order);
        for (before, after) in model.blocks.iter().zip(&out.blocks) {
            assert!(after.clause_count() <= before.clause_count());
            assert!(purity_check(&after.constraints, &data, after.label));
        }
    }

    #[test]
    fn r2b_removes_overshadowed_duplicate() {
        let data = dataset(vec![vec![0.1], vec![0.2], vec![0.3]], vec![0, 0, 0], 1);
        let twin = simple_block(0, 0, &[(0.0, 0.4)]);
        let mut other = twin.clone();
        other.id = 1;
        let model = model_of(vec![twin, other], &data);
        let out = r2b(&model, &data, 1);
        assert_eq!(out.blocks.len(), 1);
        assert_eq!(out.blocks[0].id, 0);
        assert_eq!(out.blocks[0].coverage, 3);
    }

    #[test]
    fn r2b_deletes_below_threshold() {
        let data = dataset(vec![vec![0.1], vec![0.2], vec![0.3]], vec![0, 0, 0], 1);
        let model = model_of(vec![simple_block(0, 0, &[(0.0, 0.4)])], &data);
        let out = r2b(&model, &data, 5);
        assert!(out.blocks.is_empty());
    }

    #[test]
    fn r2b_reassigns_to_largest_first_count() {
        // block 1 (first in model order) owns both points after step 1,
        // so it wins step 3 for the shared point even though block 0 has
        // the lower id
        let data = dataset(vec![vec![0.15], vec![0.35]], vec![0, 0], 1);
        let small = simple_block(0, 0, &[(0.1, 0.2)]);
        let large = simple_block(1, 0, &[(0.0, 0.4)]);
        let model = model_of(vec![large, small], &data);
        let out = r2b(&model, &data, 1);
        assert_eq!(out.blocks.len(), 1);
        assert_eq!(out.blocks[0].id, 1);
        assert_eq!(out.blocks[0].coverage, 2);
    }

    #[test]
    fn disjunctive_merges_stacked_boxes() {
        // same width interval, disjoint height intervals, nothing opposing
        // in either box's extension
        let data = dataset(
            vec![
                vec![0.2, 0.1],
                vec![0.3, 0.2],
                vec![0.2, 0.8],
                vec![0.3, 0.9],
                vec![0.9, 0.5],
            ],
            vec![0, 0, 0, 0, 1],
            2,
        );
        let b1 = simple_block(0, 0, &[(0.2, 0.3), (0.1, 0.2)]);
        let b2 = simple_block(1, 0, &[(0.2, 0.3), (0.8, 0.9)]);
        let before_clauses = b1.clause_count() + b2.clause_count();
        assert_eq!(before_clauses, 4);
        let model = model_of(vec![b1, b2], &data);
        let out = disjunctive_merge(&model, &data, 1);
        assert_eq!(out.blocks.len(), 1);
        assert_eq!(out.blocks[0].clause_count(), 3);
        assert_eq!(out.blocks[0].constraints[1].intervals().len(), 2);
        assert_eq!(out.blocks[0].coverage, 4);
    }

    #[test]
    fn disjunctive_vetoed_by_opposing_point() {
        let data = dataset(
            vec![vec![0.2, 0.1], vec![0.2, 0.9], vec![0.25, 0.5]],
            vec![0, 0, 1],
            2,
        );
        // the union region spans the full height of the shared width and
        // would swallow the opposing point at (0.25, 0.5)... it does not,
        // because disjunction keeps the height gap. A point inside the gap
        // only vetoes when it also sits inside an allowed interval.
        let b1 = simple_block(0, 0, &[(0.2, 0.3), (0.0, 0.2)]);
        let b2 = simple_block(1, 0, &[(0.2, 0.3), (0.4, 1.0)]);
        let model = model_of(vec![b1.clone(), b2.clone()], &data);
        let out = disjunctive_merge(&model, &data, 1);
        assert_eq!(out.blocks.len(), 2, "merge must be vetoed");
        assert_eq!(out.blocks[0], b1);
        assert_eq!(out.blocks[1], b2);
    }

    #[test]
    fn disjunctive_respects_max_disjunctions() {
        let data = dataset(vec![vec![0.1, 0.1], vec![0.9, 0.9]], vec![0, 0], 1);
        let b1 = simple_block(0, 0, &[(0.1, 0.1), (0.1, 0.1)]);
        let b2 = simple_block(1, 0, &[(0.9, 0.9), (0.9, 0.9)]);
        let model = model_of(vec![b1, b2], &data);
        let kept = disjunctive_merge(&model, &data, 1);
        assert_eq!(kept.blocks.len(), 2, "pair differs on two attributes");
        let merged = disjunctive_merge(&model, &data, 2);
        assert_eq!(merged.blocks.len(), 1);
    }

    #[test]
    fn pipeline_runs_stages_in_order_and_records_metrics() {
        let data = dataset(
            vec![
                vec![0.1, 0.2],
                vec![0.2, 0.3],
                vec![0.8, 0.9],
                vec![0.9, 0.8],
            ],
            vec![0, 0, 1, 1],
            2,
        );
        let model = generate(&data, &GenConfig::default()).unwrap();
        let cfg = SimplifyConfig::default();
        let out = simplify_pipeline(&model, &data, &cfg).unwrap();
        let stage_names: Vec<&str> = out.config.stages.iter().map(|s| s.stage.as_str()).collect();
        assert!(stage_names.ends_with(&["r2a", "r2b", "disjunctive"]));
        for b in &out.blocks {
            assert!(purity_check(&b.constraints, &data, b.label));
        }
    }

    #[test]
    fn pipeline_idempotent_on_fixed_point() {
        let data = dataset(
            vec![
                vec![0.1, 0.2],
                vec![0.2, 0.3],
                vec![0.8, 0.9],
                vec![0.9, 0.8],
            ],
            vec![0, 0, 1, 1],
            2,
        );
        let model = generate(&data, &GenConfig::default()).unwrap();
        let cfg = SimplifyConfig::default();
        let once = simplify_pipeline(&model, &data, &cfg).unwrap();
        let twice = simplify_pipeline(&once, &data, &cfg).unwrap();
        assert_eq!(once.blocks, twice.blocks);
    }
}
