//! End-to-end point classification. Points inside at least one block are
//! decided by a normalized majority vote: each class scores the fraction
//! of its own blocks containing the point. Uncovered points go to the
//! configured fallback classifier, or abstain when none is configured.

use serde::{Deserialize, Serialize};

use crate::dataset::{apply_normalization, Dataset};
use crate::error::{Error, Result};
use crate::fallback::{
    ets_knn_with_neighbors, knn_euclidean_with_neighbors, knn_hb_with_blocks, nearest_hb_classify,
    DistanceMetric, EtsConfig,
};
use crate::hyperblock::HBModel;

/// Fallback selection for points outside every block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FallbackConfig {
    /// Threshold-similarity k-NN over training points (the default).
    Ets {
        k: usize,
        threshold_fraction: f64,
        /// Explicit per-attribute thresholds override the derived ones.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        thresholds: Option<Vec<f64>>,
    },
    NearestHb {
        metric: DistanceMetric,
    },
    KnnHb {
        metric: DistanceMetric,
        k: usize,
    },
    KnnEuclidean {
        k: usize,
    },
    /// No fallback: uncovered points abstain.
    Disabled,
}

impl Default for FallbackConfig {
    fn default() -> Self {
        FallbackConfig::Ets {
            k: 5,
            threshold_fraction: 0.25,
            thresholds: None,
        }
    }
}

impl FallbackConfig {
    pub fn parse(name: &str, k: usize, threshold_fraction: f64) -> Result<FallbackConfig> {
        match name {
            "ets" => Ok(FallbackConfig::Ets {
                k,
                threshold_fraction,
                thresholds: None,
            }),
            "nearest-hb" => Ok(FallbackConfig::NearestHb {
                metric: DistanceMetric::default(),
            }),
            "knn-hb" => Ok(FallbackConfig::KnnHb {
                metric: DistanceMetric::default(),
                k,
            }),
            "knn-euclidean" => Ok(FallbackConfig::KnnEuclidean { k }),
            "none" => Ok(FallbackConfig::Disabled),
            other => Err(Error::Config(format!("unknown fallback {other:?}"))),
        }
    }
}

/// How a prediction was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    HbVote,
    Fallback,
    Abstain,
}

/// Evidence attached to a fallback decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FallbackDetail {
    /// (training row, similarity score) of each voting neighbor.
    EtsNeighbors(Vec<(usize, usize)>),
    /// (block id, distance) of each voting block.
    BlockDistances(Vec<(u32, f64)>),
    /// (training row, distance) of each voting neighbor.
    EuclideanNeighbors(Vec<(usize, f64)>),
}

/// Full decision trace for one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationOutcome {
    /// Predicted class index; absent only when abstaining.
    pub predicted: Option<usize>,
    pub route: Route,
    /// Per-class normalized vote: containing blocks over total blocks of
    /// the class. All zeros when no block contains the point.
    pub scores: Vec<f64>,
    /// Ids of blocks containing the point.
    pub contributing_blocks: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback_detail: Option<FallbackDetail>,
}

/// Batch results plus the fraction of points the blocks themselves covered.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutcome {
    pub outcomes: Vec<ClassificationOutcome>,
    /// None when the batch was empty.
    pub coverage: Option<f64>,
}

/// A model bound to a fallback strategy, ready to classify points.
pub struct Classifier<'a> {
    model: &'a HBModel,
    fallback: ResolvedFallback<'a>,
}

enum ResolvedFallback<'a> {
    Ets { data: &'a Dataset, cfg: EtsConfig },
    NearestHb { metric: DistanceMetric },
    KnnHb { metric: DistanceMetric, k: usize },
    KnnEuclidean { data: &'a Dataset, k: usize },
    Disabled,
}

impl<'a> Classifier<'a> {
    /// Bind a model and fallback. ETS and Euclidean fallbacks need the
    /// training dataset; passing `None` for those is a config error.
    pub fn new(
        model: &'a HBModel,
        fallback: &FallbackConfig,
        train: Option<&'a Dataset>,
    ) -> Result<Classifier<'a>> {
        let need_train = || {
            train.ok_or_else(|| {
                Error::Config("this fallback requires the training dataset".to_string())
            })
        };
        let resolved = match fallback {
            FallbackConfig::Ets {
                k,
                threshold_fraction,
                thresholds,
            } => {
                let data = need_train()?;
                if data.attribute_count() != model.attribute_count() {
                    return Err(Error::DimensionMismatch {
                        expected: model.attribute_count(),
                        got: data.attribute_count(),
                    });
                }
                let cfg = match thresholds {
                    Some(t) => {
                        if t.len() != model.attribute_count() {
                            return Err(Error::Config(format!(
                                "expected {} thresholds, got {}",
                                model.attribute_count(),
                                t.len()
                            )));
                        }
                        EtsConfig {
                            thresholds: t.clone(),
                            k: *k,
                            threshold_fraction: *threshold_fraction,
                        }
                    }
                    None => EtsConfig::derived(data, *threshold_fraction, *k)?,
                };
                ResolvedFallback::Ets { data, cfg }
            }
            FallbackConfig::NearestHb { metric } => ResolvedFallback::NearestHb { metric: *metric },
            FallbackConfig::KnnHb { metric, k } => ResolvedFallback::KnnHb {
                metric: *metric,
                k: *k,
            },
            FallbackConfig::KnnEuclidean { k } => ResolvedFallback::KnnEuclidean {
                data: need_train()?,
                k: *k,
            },
            FallbackConfig::Disabled => ResolvedFallback::Disabled,
        };
        Ok(Classifier {
            model,
            fallback: resolved,
        })
    }

    pub fn model(&self) -> &HBModel {
        self.model
    }

    /// Classify a normalized point.
    pub fn classify_point(&self, x: &[f64]) -> Result<ClassificationOutcome> {
        if self.model.blocks.is_empty() && matches!(self.fallback, ResolvedFallback::Disabled) {
            return Err(Error::Data("cannot classify with an empty model".into()));
        }
        if x.len() != self.model.attribute_count() {
            return Err(Error::DimensionMismatch {
                expected: self.model.attribute_count(),
                got: x.len(),
            });
        }

        let class_counts = self.model.class_block_counts();
        let mut containing = vec![0usize; self.model.class_count()];
        let mut contributing_blocks = Vec::new();
        for b in &self.model.blocks {
            if b.contains(x) {
                containing[b.label] += 1;
                contributing_blocks.push(b.id);
            }
        }

        let scores: Vec<f64> = containing
            .iter()
            .zip(&class_counts)
            .map(|(&c, &n)| if n == 0 { 0.0 } else { c as f64 / n as f64 })
            .collect();

        if !contributing_blocks.is_empty() {
            let predicted = argmax_lowest(&scores);
            return Ok(ClassificationOutcome {
                predicted: Some(predicted),
                route: Route::HbVote,
                scores,
                contributing_blocks,
                fallback_detail: None,
            });
        }

        let (predicted, route, detail) = match &self.fallback {
            ResolvedFallback::Ets { data, cfg } => {
                let (c, neighbors) = ets_knn_with_neighbors(x, data, cfg);
                (
                    Some(c),
                    Route::Fallback,
                    Some(FallbackDetail::EtsNeighbors(neighbors)),
                )
            }
            ResolvedFallback::NearestHb { metric } => {
                let c = nearest_hb_classify(x, self.model, *metric)?;
                (Some(c), Route::Fallback, None)
            }
            ResolvedFallback::KnnHb { metric, k } => {
                let (c, blocks) = knn_hb_with_blocks(x, self.model, *metric, *k)?;
                (
                    Some(c),
                    Route::Fallback,
                    Some(FallbackDetail::BlockDistances(blocks)),
                )
            }
            ResolvedFallback::KnnEuclidean { data, k } => {
                let (c, neighbors) = knn_euclidean_with_neighbors(x, data, *k);
                (
                    Some(c),
                    Route::Fallback,
                    Some(FallbackDetail::EuclideanNeighbors(neighbors)),
                )
            }
            ResolvedFallback::Disabled => (None, Route::Abstain, None),
        };

        Ok(ClassificationOutcome {
            predicted,
            route,
            scores,
            contributing_blocks,
            fallback_detail: detail,
        })
    }

    /// Classify a raw-scale point by normalizing it with the model's stored
    /// parameters first (out-of-range values clamp into [0,1]).
    pub fn classify_raw_point(&self, raw: &[f64]) -> Result<ClassificationOutcome> {
        let x = apply_normalization(&self.model.normalization, raw)?;
        self.classify_point(&x)
    }

    /// Classify many normalized points and report the covered fraction.
    pub fn classify_batch(&self, points: &[Vec<f64>]) -> Result<BatchOutcome> {
        let outcomes: Result<Vec<ClassificationOutcome>> =
            points.iter().map(|p| self.classify_point(p)).collect();
        let outcomes = outcomes?;
        let coverage = if outcomes.is_empty() {
            None
        } else {
            let covered = outcomes.iter().filter(|o| o.route == Route::HbVote).count();
            Some(covered as f64 / outcomes.len() as f64)
        };
        Ok(BatchOutcome { outcomes, coverage })
    }
}

fn argmax_lowest(scores: &[f64]) -> usize {
    let mut best = 0usize;
    for c in 1..scores.len() {
        if scores[c] > scores[best] {
            best = c;
        }
    }
    best
}
