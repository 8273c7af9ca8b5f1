//! Cross-validation harness and reporting. Each fold normalizes from its
//! training rows only, trains and simplifies a model on them, then scores
//! the held-out rows (normalized through the training parameters and
//! clamped). Test rows never influence the trained model.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classify::{Classifier, FallbackConfig, Route};
use crate::dataset::{
    normalize_with_classes, stratified_folds_for_labels, Dataset, FoldPlan, RawDataset,
};
use crate::error::{Error, Result};
use crate::generation::{generate, GenConfig};
use crate::hyperblock::HBModel;
use crate::simplify::{simplify_pipeline, SimplifyConfig};

/// Per-fold metrics. Confusion matrices are indexed `[true][predicted]`
/// and split by decision route; `confusion` is their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold_index: usize,
    /// Percent correct over all held-out rows.
    pub accuracy: f64,
    pub block_count: usize,
    pub clause_count: usize,
    /// Fraction of held-out rows decided by block membership.
    pub coverage_fraction: f64,
    pub confusion: Vec<Vec<usize>>,
    pub confusion_hb: Vec<Vec<usize>>,
    pub confusion_fallback: Vec<Vec<usize>>,
    /// Held-out rows with no prediction (fallback disabled).
    pub abstained: usize,
}

/// Average, population standard deviation, min, and max of one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub average: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

impl MetricSummary {
    pub fn from_values(values: &[f64]) -> MetricSummary {
        let n = values.len() as f64;
        let average = values.iter().sum::<f64>() / n;
        let var = values
            .iter()
            .map(|v| (v - average) * (v - average))
            .sum::<f64>()
            / n;
        MetricSummary {
            average,
            std_dev: var.sqrt(),
            min: values.iter().cloned().fold(f64::INFINITY, f64::min),
            max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Per-class correct/total broken out by route. Fractions are `None` when
/// the class never took that route (division-by-zero guard).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerClassAccuracy {
    pub class_name: String,
    pub hb_correct: usize,
    pub hb_total: usize,
    pub fallback_correct: usize,
    pub fallback_total: usize,
    pub combined_correct: usize,
    pub combined_total: usize,
}

impl PerClassAccuracy {
    pub fn hb(&self) -> Option<f64> {
        fraction(self.hb_correct, self.hb_total)
    }

    pub fn fallback(&self) -> Option<f64> {
        fraction(self.fallback_correct, self.fallback_total)
    }

    pub fn combined(&self) -> Option<f64> {
        fraction(self.combined_correct, self.combined_total)
    }
}

fn fraction(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Everything a CV run was configured with, for replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub k_folds: usize,
    pub seed: u64,
    pub generation: GenConfig,
    pub simplify: SimplifyConfig,
    pub fallback: FallbackConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVReport {
    pub folds: Vec<FoldResult>,
    pub accuracy: MetricSummary,
    pub block_count: MetricSummary,
    pub clause_count: MetricSummary,
    pub coverage: MetricSummary,
    pub per_class: Vec<PerClassAccuracy>,
    pub config: CvConfig,
}

/// Train one fold's model from its training rows only. Exposed so leakage
/// can be tested directly: held-out rows must never change the result.
pub fn train_fold(
    raw: &RawDataset,
    plan: &FoldPlan,
    fold: usize,
    gen_cfg: &GenConfig,
    simp_cfg: &SimplifyConfig,
) -> Result<(HBModel, Dataset)> {
    let labels = raw.label_indices();
    let (train_idx, _) = plan.split(fold);
    let rows: Vec<Vec<f64>> = train_idx.iter().map(|&i| raw.rows[i].clone()).collect();
    let fold_labels: Vec<usize> = train_idx.iter().map(|&i| labels[i]).collect();
    let train = normalize_with_classes(&rows, &fold_labels, &raw.attribute_names, &raw.class_names);
    let model = generate(&train, gen_cfg)?;
    let model = simplify_pipeline(&model, &train, simp_cfg)?;
    Ok((model, train))
}

/// Full k-fold cross-validation.
pub fn run_cv(
    raw: &RawDataset,
    k_folds: usize,
    gen_cfg: &GenConfig,
    simp_cfg: &SimplifyConfig,
    fb_cfg: &FallbackConfig,
    seed: u64,
) -> Result<CVReport> {
    let labels = raw.label_indices();
    let n_class = raw.class_names.len();
    let plan = stratified_folds_for_labels(&labels, n_class, k_folds, seed)?;

    let mut folds = Vec::with_capacity(k_folds);
    for fold in 0..k_folds {
        let result = run_fold(raw, &labels, &plan, fold, gen_cfg, simp_cfg, fb_cfg)
            .map_err(|e| Error::Data(format!("fold {fold} failed: {e}")))?;
        folds.push(result);
    }

    let metric = |f: &dyn Fn(&FoldResult) -> f64| {
        let values: Vec<f64> = folds.iter().map(f).collect();
        MetricSummary::from_values(&values)
    };

    Ok(CVReport {
        per_class: per_class_accuracy(&folds, &raw.class_names),
        accuracy: metric(&|f| f.accuracy),
        block_count: metric(&|f| f.block_count as f64),
        clause_count: metric(&|f| f.clause_count as f64),
        coverage: metric(&|f| f.coverage_fraction),
        folds,
        config: CvConfig {
            k_folds,
            seed,
            generation: gen_cfg.clone(),
            simplify: simp_cfg.clone(),
            fallback: fb_cfg.clone(),
        },
    })
}

#[allow(clippy::too_many_arguments)]
fn run_fold(
    raw: &RawDataset,
    labels: &[usize],
    plan: &FoldPlan,
    fold: usize,
    gen_cfg: &GenConfig,
    simp_cfg: &SimplifyConfig,
    fb_cfg: &FallbackConfig,
) -> Result<FoldResult> {
    let (model, train) = train_fold(raw, plan, fold, gen_cfg, simp_cfg)?;
    let (_, test_idx) = plan.split(fold);
    let n_class = raw.class_names.len();

    let clf = Classifier::new(&model, fb_cfg, Some(&train))?;

    let mut confusion_hb = vec![vec![0usize; n_class]; n_class];
    let mut confusion_fallback = vec![vec![0usize; n_class]; n_class];
    let mut abstained = 0usize;
    let mut covered = 0usize;

    for &row in &test_idx {
        let outcome = clf.classify_raw_point(&raw.rows[row])?;
        let truth = labels[row];
        match (outcome.route, outcome.predicted) {
            (Route::HbVote, Some(pred)) => {
                covered += 1;
                confusion_hb[truth][pred] += 1;
            }
            (Route::Fallback, Some(pred)) => confusion_fallback[truth][pred] += 1,
            _ => abstained += 1,
        }
    }

    let mut confusion = vec![vec![0usize; n_class]; n_class];
    for t in 0..n_class {
        for p in 0..n_class {
            confusion[t][p] = confusion_hb[t][p] + confusion_fallback[t][p];
        }
    }
    let correct: usize = (0..n_class).map(|c| confusion[c][c]).sum();
    let total = test_idx.len();

    Ok(FoldResult {
        fold_index: fold,
        accuracy: 100.0 * correct as f64 / total as f64,
        block_count: model.blocks.len(),
        clause_count: model.total_clauses(),
        coverage_fraction: covered as f64 / total as f64,
        confusion,
        confusion_hb,
        confusion_fallback,
        abstained,
    })
}

/// Sum route confusions across folds into per-class correct/total counts.
pub fn per_class_accuracy(folds: &[FoldResult], class_names: &[String]) -> Vec<PerClassAccuracy> {
    let n_class = class_names.len();
    let mut out: Vec<PerClassAccuracy> = class_names
        .iter()
        .map(|name| PerClassAccuracy {
            class_name: name.clone(),
            hb_correct: 0,
            hb_total: 0,
            fallback_correct: 0,
            fallback_total: 0,
            combined_correct: 0,
            combined_total: 0,
        })
        .collect();
    for fold in folds {
        for (t, acc) in out.iter_mut().enumerate().take(n_class) {
            for p in 0..n_class {
                let hb = fold.confusion_hb[t][p];
                let fb = fold.confusion_fallback[t][p];
                acc.hb_total += hb;
                acc.fallback_total += fb;
                acc.combined_total += hb + fb;
                if t == p {
                    acc.hb_correct += hb;
                    acc.fallback_correct += fb;
                    acc.combined_correct += hb + fb;
                }
            }
        }
    }
    out
}

/// One grid-search combination and its cross-validation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub removal_threshold: usize,
    pub k: usize,
    pub threshold_fraction: f64,
    pub report: CVReport,
}

/// Parameter lists to cross. Each list must be non-empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub removal_thresholds: Vec<usize>,
    pub ks: Vec<usize>,
    pub threshold_fractions: Vec<f64>,
}

/// Run [`run_cv`] for every combination and rank by average accuracy,
/// breaking ties toward fewer average clauses.
pub fn grid_search(
    raw: &RawDataset,
    base_gen: &GenConfig,
    base_simp: &SimplifyConfig,
    grid: &GridSpec,
    k_folds: usize,
    seed: u64,
) -> Result<Vec<GridEntry>> {
    if grid.removal_thresholds.is_empty()
        || grid.ks.is_empty()
        || grid.threshold_fractions.is_empty()
    {
        return Err(Error::Config(
            "grid search requires at least one value per parameter".into(),
        ));
    }
    let mut entries = Vec::new();
    for &rt in &grid.removal_thresholds {
        for &k in &grid.ks {
            for &tf in &grid.threshold_fractions {
                let simp = SimplifyConfig {
                    removal_threshold: rt,
                    ..base_simp.clone()
                };
                let fb = FallbackConfig::Ets {
                    k,
                    threshold_fraction: tf,
                    thresholds: None,
                };
                let report = run_cv(raw, k_folds, base_gen, &simp, &fb, seed)?;
                entries.push(GridEntry {
                    removal_threshold: rt,
                    k,
                    threshold_fraction: tf,
                    report,
                });
            }
        }
    }
    entries.sort_by(|a, b| {
        b.report
            .accuracy
            .average
            .total_cmp(&a.report.accuracy.average)
            .then(
                a.report
                    .clause_count
                    .average
                    .total_cmp(&b.report.clause_count.average),
            )
    });
    Ok(entries)
}

/// Fold table as CSV, accuracies to two decimals.
pub fn fold_table_csv(report: &CVReport) -> String {
    let mut out = String::from("fold,accuracy_percent,block_count,clause_count,coverage_percent\n");
    for f in &report.folds {
        let _ = writeln!(
            out,
            "{},{:.2},{},{},{:.2}",
            f.fold_index + 1,
            f.accuracy,
            f.block_count,
            f.clause_count,
            100.0 * f.coverage_fraction
        );
    }
    out
}

/// The four statistics rows, with coverage scaled to percent.
fn stat_rows(report: &CVReport) -> [(&'static str, [f64; 4]); 4] {
    let pick = |get: fn(&MetricSummary) -> f64| {
        [
            get(&report.accuracy),
            get(&report.block_count),
            get(&report.clause_count),
            100.0 * get(&report.coverage),
        ]
    };
    [
        ("average", pick(|m| m.average)),
        ("std_dev", pick(|m| m.std_dev)),
        ("min", pick(|m| m.min)),
        ("max", pick(|m| m.max)),
    ]
}

/// Statistics table as CSV.
pub fn stats_table_csv(report: &CVReport) -> String {
    let mut out =
        String::from("statistic,accuracy_percent,block_count,clause_count,coverage_percent\n");
    for (name, [acc, blocks, clauses, coverage]) in stat_rows(report) {
        let _ = writeln!(
            out,
            "{name},{acc:.2},{blocks:.2},{clauses:.2},{coverage:.2}"
        );
    }
    out
}

/// Render the full report in the named format (`csv` or `text`).
pub fn render_report(report: &CVReport, format: &str) -> Result<String> {
    if report.folds.is_empty() {
        return Err(Error::Data("report has no folds".into()));
    }
    match format {
        "csv" => Ok(format!(
            "{}\n{}",
            fold_table_csv(report),
            stats_table_csv(report)
        )),
        "text" => Ok(render_text(report)),
        other => Err(Error::Config(format!("unknown report format {other:?}"))),
    }
}

fn render_text(report: &CVReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4}  {:>10}  {:>6}  {:>7}  {:>9}",
        "fold", "accuracy%", "blocks", "clauses", "coverage%"
    );
    for f in &report.folds {
        let _ = writeln!(
            out,
            "{:>4}  {:>10.2}  {:>6}  {:>7}  {:>9.2}",
            f.fold_index + 1,
            f.accuracy,
            f.block_count,
            f.clause_count,
            100.0 * f.coverage_fraction
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<9}  {:>10}  {:>7}  {:>8}",
        "statistic", "accuracy%", "blocks", "clauses"
    );
    for (name, [acc, blocks, clauses, _]) in stat_rows(report) {
        let _ = writeln!(out, "{name:<9}  {acc:>10.2}  {blocks:>7.2}  {clauses:>8.2}");
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<12}  {:>8}  {:>9}  {:>9}",
        "class", "hb", "fallback", "combined"
    );
    for pc in &report.per_class {
        let show = |v: Option<f64>| match v {
            Some(f) => format!("{:.3}", f),
            None => "-".to_string(),
        };
        let _ = writeln!(
            out,
            "{:<12}  {:>8}  {:>9}  {:>9}",
            pc.class_name,
            show(pc.hb()),
            show(pc.fallback()),
            show(pc.combined())
        );
    }
    out
}
