//! Initial hyperblock construction. Seeds one block per pure
//! one-dimensional interval (largest first), covers leftovers with
//! single-point blocks, then greedily merges same-class blocks whose
//! envelope stays pure. Single-point blocks that never merge are dropped.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::hyperblock::{
    envelope, intervals_to_constraints, purity_check, AttributeConstraint, ConfigSnapshot, HBModel,
    Hyperblock, Interval, StageMetrics, MODEL_FORMAT_VERSION,
};

/// How equal-coverage candidates are ordered when seeding blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieBreakPolicy {
    /// Lowest attribute index, then lowest interval lower bound.
    #[default]
    #[serde(rename = "attribute-index")]
    AttributeIndex,
}

impl std::str::FromStr for TieBreakPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "attribute-index" => Ok(TieBreakPolicy::AttributeIndex),
            other => Err(Error::Config(format!("unknown tie-break policy {other:?}"))),
        }
    }
}

/// Initial ordering of the merge seed queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum QueuePolicy {
    /// Smallest blocks take their seed turn first, so growing blocks can
    /// keep absorbing before they seed.
    #[default]
    #[serde(rename = "coverage-ascending")]
    CoverageAscending,
}

impl std::str::FromStr for QueuePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coverage-ascending" => Ok(QueuePolicy::CoverageAscending),
            other => Err(Error::Config(format!("unknown queue policy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GenConfig {
    pub tie_break: TieBreakPolicy,
    pub queue_policy: QueuePolicy,
    /// Worker threads for purity scans. Affects speed only, never results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

/// A maximal run of consecutive sorted unique values on one attribute where
/// every training point at those values has the same class.
struct PureRun {
    attr: usize,
    lo: f64,
    hi: f64,
    /// All rows whose value on `attr` falls inside [lo, hi].
    rows: Vec<usize>,
}

fn pure_runs(data: &Dataset) -> Vec<PureRun> {
    let mut runs = Vec::new();
    for attr in 0..data.attribute_count() {
        // unique values in ascending order, each with its rows and purity
        let mut by_value: Vec<(f64, Vec<usize>)> = Vec::new();
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.sort_by(|&a, &b| data.points[a][attr].total_cmp(&data.points[b][attr]));
        for row in order {
            let v = data.points[row][attr];
            match by_value.last_mut() {
                Some((lv, rows)) if *lv == v => rows.push(row),
                _ => by_value.push((v, vec![row])),
            }
        }

        let value_class = |rows: &[usize]| -> Option<usize> {
            let c = data.labels[rows[0]];
            rows.iter().all(|&r| data.labels[r] == c).then_some(c)
        };

        let mut i = 0;
        while i < by_value.len() {
            let Some(class) = value_class(&by_value[i].1) else {
                i += 1;
                continue;
            };
            let mut j = i;
            let mut rows: Vec<usize> = Vec::new();
            while j < by_value.len() && value_class(&by_value[j].1) == Some(class) {
                rows.extend_from_slice(&by_value[j].1);
                j += 1;
            }
            rows.sort_unstable();
            runs.push(PureRun {
                attr,
                lo: by_value[i].0,
                hi: by_value[j - 1].0,
                rows,
            });
            i = j;
        }
    }
    runs
}

/// Degenerate block pinned to one point's coordinates.
fn point_block(id: u32, data: &Dataset, row: usize) -> Hyperblock {
    let constraints = data.points[row]
        .iter()
        .map(|&v| AttributeConstraint::single(v, v))
        .collect();
    let mut hb = Hyperblock::new(id, data.labels[row], constraints);
    hb.coverage = 1;
    hb
}

/// Block covering all points of a pure 1-D interval: the chosen attribute
/// gets the interval, every other attribute the envelope of those points.
fn run_block(id: u32, data: &Dataset, run: &PureRun) -> Hyperblock {
    let n_attr = data.attribute_count();
    let mut lo = vec![f64::INFINITY; n_attr];
    let mut hi = vec![f64::NEG_INFINITY; n_attr];
    for &row in &run.rows {
        for (a, &v) in data.points[row].iter().enumerate() {
            lo[a] = lo[a].min(v);
            hi[a] = hi[a].max(v);
        }
    }
    lo[run.attr] = run.lo;
    hi[run.attr] = run.hi;
    let constraints = lo
        .into_iter()
        .zip(hi)
        .map(|(l, h)| AttributeConstraint::single(l, h))
        .collect();
    let mut hb = Hyperblock::new(id, data.labels[run.rows[0]], constraints);
    hb.coverage = run.rows.len();
    hb
}

/// Build the initial block set. Every returned block is pure on the
/// training data. Points whose exact coordinates also carry an opposing
/// label cannot sit in any pure block and are left uncovered.
pub fn interval_hyper(data: &Dataset) -> Result<Vec<Hyperblock>> {
    if data.is_empty() {
        return Err(Error::Data(
            "cannot generate blocks from an empty dataset".into(),
        ));
    }

    let runs = pure_runs(data);
    let mut covered = vec![false; data.len()];
    let mut blocks: Vec<Hyperblock> = Vec::new();
    let mut next_id = 0u32;

    loop {
        // largest uncovered gain; ties: lowest attribute, then lowest bound
        let mut best: Option<(usize, usize)> = None; // (count, run index)
        for (ri, run) in runs.iter().enumerate() {
            let count = run.rows.iter().filter(|&&r| !covered[r]).count();
            if count == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bc, bi)) => {
                    let b = &runs[bi];
                    count > bc
                        || (count == bc
                            && (run.attr < b.attr || (run.attr == b.attr && run.lo < b.lo)))
                }
            };
            if better {
                best = Some((count, ri));
            }
        }

        let Some((count, ri)) = best else { break };
        let run = &runs[ri];
        if count == 1 {
            let row = *run.rows.iter().find(|&&r| !covered[r]).unwrap();
            blocks.push(point_block(next_id, data, row));
            cover_members(data, &blocks[blocks.len() - 1], &mut covered);
        } else {
            blocks.push(run_block(next_id, data, run));
            for &r in &run.rows {
                covered[r] = true;
            }
        }
        next_id += 1;
    }

    // Leftovers: values collide with opposing classes on every attribute.
    for row in 0..data.len() {
        if covered[row] {
            continue;
        }
        let conflicted = (0..data.len()).any(|other| {
            data.labels[other] != data.labels[row] && data.points[other] == data.points[row]
        });
        if conflicted {
            continue;
        }
        blocks.push(point_block(next_id, data, row));
        next_id += 1;
        cover_members(data, &blocks[blocks.len() - 1], &mut covered);
    }

    debug_assert!(blocks
        .iter()
        .all(|b| purity_check(&b.constraints, data, b.label)));
    Ok(blocks)
}

fn cover_members(data: &Dataset, hb: &Hyperblock, covered: &mut [bool]) {
    for (row, flag) in covered.iter_mut().enumerate() {
        if !*flag && data.labels[row] == hb.label && hb.contains(&data.points[row]) {
            *flag = true;
        }
    }
}

/// Greedy same-class merging. Each live block gets one turn as the seed;
/// the first partner whose envelope stays pure absorbs the seed, and the
/// remaining partners are then tried against that survivor. Blocks that
/// merged in a turn move to the back of the queue, the survivor last.
pub fn cmh_merge(blocks: Vec<Hyperblock>, data: &Dataset) -> Vec<Hyperblock> {
    if blocks.len() <= 1 {
        return blocks;
    }
    let label = blocks[0].label;
    debug_assert!(blocks.iter().all(|b| b.label == label && b.is_simple()));
    debug_assert!(blocks
        .iter()
        .all(|b| purity_check(&b.constraints, data, b.label)));

    let mut blocks = blocks;
    let n = blocks.len();
    let mut alive = vec![true; n];
    let mut seeded = vec![false; n];

    // seed queue: coverage ascending, ties by id
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (blocks[i].coverage, blocks[i].id));

    while let Some(pos) = order.iter().position(|&i| alive[i] && !seeded[i]) {
        let seed = order[pos];
        seeded[seed] = true;

        let partners: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&i| i != seed && alive[i])
            .collect();

        let mut survivor: Option<usize> = None;
        for p in partners {
            if !alive[p] {
                continue;
            }
            let anchor = survivor.unwrap_or(seed);
            let env = envelope(&blocks[anchor], &blocks[p]).expect("same-class simple blocks");
            if !purity_check(&intervals_to_constraints(&env), data, label) {
                continue;
            }
            match survivor {
                None => {
                    // seed folds into this partner
                    alive[seed] = false;
                    set_bounds(&mut blocks[p], &env);
                    blocks[p].coverage += blocks[seed].coverage;
                    survivor = Some(p);
                }
                Some(s) => {
                    // later partners fold into the survivor
                    set_bounds(&mut blocks[s], &env);
                    blocks[s].coverage += blocks[p].coverage;
                    alive[p] = false;
                }
            }
        }

        order.retain(|&i| alive[i]);
        if let Some(s) = survivor {
            order.retain(|&i| i != s);
            order.push(s);
        }
    }

    order.into_iter().map(|i| blocks[i].clone()).collect()
}

fn set_bounds(hb: &mut Hyperblock, bounds: &[Interval]) {
    hb.constraints = bounds
        .iter()
        .map(|iv| AttributeConstraint::single(iv.lo, iv.hi))
        .collect();
}

/// Full generation pipeline: seed, merge per class, drop unmerged
/// single-point blocks, recompute coverage.
pub fn generate(data: &Dataset, cfg: &GenConfig) -> Result<HBModel> {
    let initial = interval_hyper(data)?;
    let initial_count = initial.len();
    let initial_clauses: usize = initial.iter().map(|b| b.clause_count()).sum();

    let mut merged: Vec<Hyperblock> = Vec::new();
    for class in 0..data.class_count() {
        let class_blocks: Vec<Hyperblock> = initial
            .iter()
            .filter(|b| b.label == class)
            .cloned()
            .collect();
        merged.extend(cmh_merge(class_blocks, data));
    }
    let merged_count = merged.len();
    let merged_clauses: usize = merged.iter().map(|b| b.clause_count()).sum();

    // final coverage = actual member count on the training data
    for b in &mut merged {
        b.coverage = data.points.iter().filter(|p| b.contains(p)).count();
    }
    merged.retain(|b| !(b.is_degenerate() && b.coverage == 1));

    let stages = vec![
        StageMetrics {
            stage: "interval_hyper".into(),
            blocks_before: 0,
            blocks_after: initial_count,
            clauses_before: 0,
            clauses_after: initial_clauses,
        },
        StageMetrics {
            stage: "cmh_merge".into(),
            blocks_before: initial_count,
            blocks_after: merged_count,
            clauses_before: initial_clauses,
            clauses_after: merged_clauses,
        },
        StageMetrics {
            stage: "drop_single_points".into(),
            blocks_before: merged_count,
            blocks_after: merged.len(),
            clauses_before: merged_clauses,
            clauses_after: merged.iter().map(|b| b.clause_count()).sum(),
        },
    ];

    Ok(HBModel {
        version: MODEL_FORMAT_VERSION,
        class_names: data.class_names.clone(),
        attribute_names: data.attribute_names.clone(),
        normalization: data.norm.clone(),
        blocks: merged,
        config: ConfigSnapshot {
            generation: Some(cfg.clone()),
            simplify: None,
            stages,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::NormalizationParams;

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

    /// Brute force: is there any pure 1-D interval covering >= 2 points?
    /// Enumerates every (attribute, value pair) interval directly from the
    /// definition, independent of the run-based implementation.
    fn exists_pure_multipoint_interval(data: &Dataset) -> bool {
        for attr in 0..data.attribute_count() {
            let values: Vec<f64> = data.points.iter().map(|p| p[attr]).collect();
            for i in 0..values.len() {
                for j in 0..values.len() {
                    let (lo, hi) = (values[i].min(values[j]), values[i].max(values[j]));
                    let inside: Vec<usize> = (0..data.len())
                        .filter(|&r| lo <= data.points[r][attr] && data.points[r][attr] <= hi)
                        .collect();
                    if inside.len() >= 2 {
                        let class = data.labels[inside[0]];
                        if inside.iter().all(|&r| data.labels[r] == class) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn single_point_dataset() {
        let data = dataset(vec![vec![0.3, 0.7]], vec![0], 1);
        let blocks = interval_hyper(&data).unwrap();
        assert_eq!(blocks.len(), 1);
        assert!(blocks[0].is_degenerate());
        assert_eq!(blocks[0].coverage, 1);
    }

    #[test]
    fn empty_dataset_errors() {
        let data = dataset(vec![], vec![], 1);
        assert!(interval_hyper(&data).is_err());
    }

    #[test]
    fn checkerboard_yields_single_point_blocks() {
        // no pure multi-point 1-D interval exists (verified by brute force)
        let data = dataset(
            vec![
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
            ],
            vec![0, 1, 1, 0],
            2,
        );
        assert!(!exists_pure_multipoint_interval(&data));
        let blocks = interval_hyper(&data).unwrap();
        assert_eq!(blocks.len(), 4);
        assert!(blocks.iter().all(|b| b.is_degenerate() && b.coverage == 1));
    }

    #[test]
    fn interval_hyper_covers_everything_and_stays_pure() {
        let data = dataset(
            vec![
                vec![0.1, 0.2],
                vec![0.15, 0.3],
                vec![0.2, 0.25],
                vec![0.8, 0.9],
                vec![0.85, 0.8],
                vec![0.5, 0.5],
            ],
            vec![0, 0, 0, 1, 1, 1],
            2,
        );
        let blocks = interval_hyper(&data).unwrap();
        for b in &blocks {
            assert!(
                purity_check(&b.constraints, &data, b.label),
                "block {} impure",
                b.id
            );
        }
        for (i, p) in data.points.iter().enumerate() {
            assert!(
                blocks
                    .iter()
                    .any(|b| b.label == data.labels[i] && b.contains(p)),
                "point {i} uncovered"
            );
        }
    }

    #[test]
    fn conflicting_duplicate_gets_no_block() {
        let data = dataset(
            vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![0.1, 0.1]],
            vec![0, 1, 0],
            2,
        );
        let blocks = interval_hyper(&data).unwrap();
        for b in &blocks {
            assert!(purity_check(&b.constraints, &data, b.label));
            assert!(!b.contains(&[0.5, 0.5]));
        }
    }

    #[test]
    fn merge_succeeds_without_opposing_points() {
        // two same-class boxes; opposing points split the 1-D runs on both
        // attributes but stay outside the joint envelope
        let data = dataset(
            vec![
                vec![0.1, 0.1],
                vec![0.2, 0.2],
                vec![0.7, 0.7],
                vec![0.8, 0.8],
                vec![0.45, 0.95],
                vec![0.95, 0.5],
            ],
            vec![0, 0, 0, 0, 1, 1],
            2,
        );
        let blocks = interval_hyper(&data).unwrap();
        let class0: Vec<Hyperblock> = blocks.into_iter().filter(|b| b.label == 0).collect();
        assert!(
            class0.len() >= 2,
            "fixture should start with multiple blocks"
        );
        let merged = cmh_merge(class0, &data);
        assert_eq!(merged.len(), 1, "all class-0 blocks should merge");
        for p in &data.points[..4] {
            assert!(merged[0].contains(p));
        }
    }

    #[test]
    fn merge_vetoed_by_opposing_point_between() {
        // opposing point sits between the two same-class boxes
        let data = dataset(
            vec![
                vec![0.1, 0.1],
                vec![0.2, 0.2],
                vec![0.7, 0.1],
                vec![0.8, 0.2],
                vec![0.5, 0.15],
            ],
            vec![0, 0, 0, 0, 1],
            2,
        );
        let blocks = interval_hyper(&data).unwrap();
        let class0: Vec<Hyperblock> = blocks.into_iter().filter(|b| b.label == 0).collect();
        let before: Vec<Vec<AttributeConstraint>> =
            class0.iter().map(|b| b.constraints.clone()).collect();
        let merged = cmh_merge(class0, &data);
        assert_eq!(merged.len(), before.len(), "no merge should be possible");
        for b in &merged {
            assert!(purity_check(&b.constraints, &data, b.label));
            assert!(!b.contains(&[0.5, 0.15]));
        }
    }

    #[test]
    fn single_block_passes_through() {
        let data = dataset(vec![vec![0.1], vec![0.2]], vec![0, 0], 1);
        let blocks = interval_hyper(&data).unwrap();
        assert_eq!(blocks.len(), 1);
        let merged = cmh_merge(blocks.clone(), &data);
        assert_eq!(merged, blocks);
    }

    #[test]
    fn tight_clusters_merge_to_one_block_per_class() {
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for i in 0..6 {
            points.push(vec![0.05 + 0.01 * i as f64, 0.1 + 0.01 * i as f64]);
            labels.push(0);
        }
        for i in 0..6 {
            points.push(vec![0.8 + 0.01 * i as f64, 0.85 + 0.01 * i as f64]);
            labels.push(1);
        }
        let data = dataset(points, labels, 2);
        let model = generate(&data, &GenConfig::default()).unwrap();
        assert_eq!(model.blocks.len(), 2);
        assert_eq!(model.class_block_counts(), vec![1, 1]);
        for b in &model.blocks {
            assert_eq!(b.coverage, 6);
        }
    }

    #[test]
    fn generate_is_deterministic() {
        let data = dataset(
            vec![
                vec![0.1, 0.5],
                vec![0.3, 0.1],
                vec![0.2, 0.9],
                vec![0.9, 0.4],
                vec![0.7, 0.6],
                vec![0.6, 0.2],
            ],
            vec![0, 0, 0, 1, 1, 1],
            2,
        );
        let a = generate(&data, &GenConfig::default()).unwrap();
        let b = generate(&data, &GenConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cmh_is_fixed_point_for_its_own_order() {
        let data = dataset(
            vec![
                vec![0.1, 0.5],
                vec![0.3, 0.1],
                vec![0.2, 0.9],
                vec![0.9, 0.4],
                vec![0.7, 0.6],
            ],
            vec![0, 0, 0, 1, 1],
            2,
        );
        let blocks = interval_hyper(&data).unwrap();
        let class0: Vec<Hyperblock> = blocks.into_iter().filter(|b| b.label == 0).collect();
        let once = cmh_merge(class0, &data);
        let twice = cmh_merge(once.clone(), &data);
        let bounds = |bs: &[Hyperblock]| -> Vec<Vec<AttributeConstraint>> {
            bs.iter().map(|b| b.constraints.clone()).collect()
        };
        assert_eq!(bounds(&once), bounds(&twice));
    }

    #[test]
    fn coverage_never_shrinks_across_merge() {
        let data = dataset(
            vec![
                vec![0.1, 0.1],
                vec![0.2, 0.15],
                vec![0.35, 0.2],
                vec![0.6, 0.6],
                vec![0.9, 0.9],
            ],
            vec![0, 0, 0, 1, 1],
            2,
        );
        let initial = interval_hyper(&data).unwrap();
        let covered_before: Vec<usize> = (0..data.len())
            .filter(|&i| initial.iter().any(|b| b.contains(&data.points[i])))
            .collect();
        let mut merged = Vec::new();
        for class in 0..2 {
            let cb: Vec<Hyperblock> = initial
                .iter()
                .filter(|b| b.label == class)
                .cloned()
                .collect();
            merged.extend(cmh_merge(cb, &data));
        }
        for &i in &covered_before {
            assert!(
                merged.iter().any(|b| b.contains(&data.points[i])),
                "point {i} lost coverage"
            );
        }
    }
}
