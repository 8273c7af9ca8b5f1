//! Classifiers for points no hyperblock covers: threshold-similarity k-NN
//! (the default), nearest-block and k-nearest-block distance votes, and
//! plain Euclidean k-NN over training points.

use serde::{Deserialize, Serialize};

use crate::dataset::{attribute_std_devs, Dataset};
use crate::error::{Error, Result};
use crate::hyperblock::{HBModel, Hyperblock};

/// Per-attribute similarity tolerances plus the neighbor count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtsConfig {
    pub thresholds: Vec<f64>,
    pub k: usize,
    /// Fraction of each attribute's standard deviation the thresholds were
    /// derived from, when they were derived rather than supplied.
    pub threshold_fraction: f64,
}

impl EtsConfig {
    pub fn derived(data: &Dataset, fraction: f64, k: usize) -> Result<EtsConfig> {
        Ok(EtsConfig {
            thresholds: derive_thresholds(data, fraction)?,
            k,
            threshold_fraction: fraction,
        })
    }
}

/// T_i = fraction x std_i on the normalized training data.
pub fn derive_thresholds(data: &Dataset, fraction: f64) -> Result<Vec<f64>> {
    if fraction < 0.0 {
        return Err(Error::Config(format!(
            "threshold fraction must be non-negative, got {fraction}"
        )));
    }
    Ok(attribute_std_devs(data)?
        .into_iter()
        .map(|s| fraction * s)
        .collect())
}

/// Number of attributes on which x and y differ by at most the threshold.
pub fn ets_similarity(x: &[f64], y: &[f64], thresholds: &[f64]) -> usize {
    assert_eq!(x.len(), y.len(), "dimension mismatch");
    assert_eq!(x.len(), thresholds.len(), "dimension mismatch");
    x.iter()
        .zip(y)
        .zip(thresholds)
        .filter(|((a, b), t)| (*a - *b).abs() <= **t)
        .count()
}

/// k-NN ranked by similarity score. Rank ties at the cut admit the lowest
/// row index; vote ties break by higher summed similarity, then lower
/// class index.
pub fn ets_knn_classify(x: &[f64], data: &Dataset, cfg: &EtsConfig) -> usize {
    ets_knn_with_neighbors(x, data, cfg).0
}

/// Same as [`ets_knn_classify`] but also returns the voting neighbors as
/// (row, similarity) pairs, for decision traces.
pub fn ets_knn_with_neighbors(
    x: &[f64],
    data: &Dataset,
    cfg: &EtsConfig,
) -> (usize, Vec<(usize, usize)>) {
    let mut ranked: Vec<(usize, usize)> = data
        .points
        .iter()
        .enumerate()
        .map(|(row, p)| (row, ets_similarity(x, p, &cfg.thresholds)))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.truncate(cfg.k.max(1).min(data.len()));

    let mut votes = vec![0usize; data.class_count()];
    let mut sum_sim = vec![0usize; data.class_count()];
    for &(row, sim) in &ranked {
        votes[data.labels[row]] += 1;
        sum_sim[data.labels[row]] += sim;
    }
    let winner = (0..votes.len())
        .max_by(|&a, &b| {
            votes[a]
                .cmp(&votes[b])
                .then(sum_sim[a].cmp(&sum_sim[b]))
                .then(b.cmp(&a)) // lower class index wins remaining ties
        })
        .expect("non-empty dataset");
    (winner, ranked)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMetric {
    Manhattan,
    #[default]
    Euclidean,
}

impl DistanceMetric {
    pub fn parse(s: &str) -> Result<DistanceMetric> {
        match s {
            "manhattan" => Ok(DistanceMetric::Manhattan),
            "euclidean" => Ok(DistanceMetric::Euclidean),
            other => Err(Error::Config(format!("unknown distance metric {other:?}"))),
        }
    }
}

/// Distance from a point to a block: per attribute, zero when the value is
/// admitted, otherwise the gap to the nearest interval endpoint; combined
/// per the metric. Zero exactly when the block contains the point.
pub fn hb_attribute_distance(x: &[f64], hb: &Hyperblock, metric: DistanceMetric) -> f64 {
    debug_assert_eq!(x.len(), hb.constraints.len());
    let gaps = x.iter().zip(&hb.constraints).map(|(&v, c)| {
        c.intervals()
            .iter()
            .map(|iv| {
                if iv.contains(v) {
                    0.0
                } else if v < iv.lo {
                    iv.lo - v
                } else {
                    v - iv.hi
                }
            })
            .fold(f64::INFINITY, f64::min)
    });
    match metric {
        DistanceMetric::Manhattan => gaps.sum(),
        DistanceMetric::Euclidean => gaps.map(|d| d * d).sum::<f64>().sqrt(),
    }
}

/// Label of the closest block; distance ties go to the lowest block id.
pub fn nearest_hb_classify(x: &[f64], model: &HBModel, metric: DistanceMetric) -> Result<usize> {
    let best = model
        .blocks
        .iter()
        .map(|b| (hb_attribute_distance(x, b, metric), b))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.id.cmp(&b.1.id)))
        .ok_or_else(|| Error::Data("cannot classify with an empty model".into()))?;
    Ok(best.1.label)
}

/// Majority vote over the k closest blocks; vote ties break by smaller
/// summed distance, then lower class index.
pub fn knn_hb_classify(
    x: &[f64],
    model: &HBModel,
    metric: DistanceMetric,
    k: usize,
) -> Result<usize> {
    knn_hb_with_blocks(x, model, metric, k).map(|(c, _)| c)
}

pub fn knn_hb_with_blocks(
    x: &[f64],
    model: &HBModel,
    metric: DistanceMetric,
    k: usize,
) -> Result<(usize, Vec<(u32, f64)>)> {
    if model.blocks.is_empty() {
        return Err(Error::Data("cannot classify with an empty model".into()));
    }
    let mut ranked: Vec<(f64, &Hyperblock)> = model
        .blocks
        .iter()
        .map(|b| (hb_attribute_distance(x, b, metric), b))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.id.cmp(&b.1.id)));
    ranked.truncate(k.max(1).min(model.blocks.len()));

    let n_class = model.class_count();
    let mut votes = vec![0usize; n_class];
    let mut sum_dist = vec![0.0f64; n_class];
    for (d, b) in &ranked {
        votes[b.label] += 1;
        sum_dist[b.label] += d;
    }
    let winner = vote_with_distance_ties(&votes, &sum_dist);
    Ok((winner, ranked.into_iter().map(|(d, b)| (b.id, d)).collect()))
}

/// Plain Euclidean k-NN over training points. Rank ties at the cut admit
/// the lowest row index; vote ties break by smaller summed distance, then
/// lower class index.
pub fn knn_euclidean_classify(x: &[f64], data: &Dataset, k: usize) -> usize {
    knn_euclidean_with_neighbors(x, data, k).0
}

pub fn knn_euclidean_with_neighbors(
    x: &[f64],
    data: &Dataset,
    k: usize,
) -> (usize, Vec<(usize, f64)>) {
    let mut ranked: Vec<(usize, f64)> = data
        .points
        .iter()
        .enumerate()
        .map(|(row, p)| (row, euclidean(x, p)))
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    ranked.truncate(k.max(1).min(data.len()));

    let mut votes = vec![0usize; data.class_count()];
    let mut sum_dist = vec![0.0f64; data.class_count()];
    for &(row, d) in &ranked {
        votes[data.labels[row]] += 1;
        sum_dist[data.labels[row]] += d;
    }
    (vote_with_distance_ties(&votes, &sum_dist), ranked)
}

fn vote_with_distance_ties(votes: &[usize], sum_dist: &[f64]) -> usize {
    let mut winner = 0usize;
    for c in 1..votes.len() {
        let better = votes[c] > votes[winner]
            || (votes[c] == votes[winner] && sum_dist[c] < sum_dist[winner]);
        if better {
            winner = c;
        }
    }
    winner
}

fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}
