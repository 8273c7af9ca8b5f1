//! Hyperblock classification: interpretable, interval-based models.
//!
//! A hyperblock is an axis-aligned region — one closed interval (or a
//! disjoint union of intervals) per attribute — labeled with a class.
//! Models are built by seeding pure blocks from one-dimensional intervals
//! and greedily merging them, then simplified by generalizing attribute
//! intervals, removing overshadowed blocks, and fusing near-identical
//! blocks into disjunctive units. Points no block covers fall back to an
//! explainable threshold-similarity k-NN (or plain distance variants).
//!
//! The crate also ships a stratified cross-validation harness that mirrors
//! how such models are commonly evaluated, and a parallel-coordinates SVG
//! renderer for inspecting blocks against the data.

pub mod classify;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod fallback;
pub mod generation;
pub mod hyperblock;
mod parallel;
pub mod simplify;
pub mod viz;

pub use classify::{BatchOutcome, ClassificationOutcome, Classifier, FallbackConfig, Route};
pub use dataset::{
    apply_normalization, load_csv, normalize, stratified_folds, Dataset, FoldPlan, LabelColumn,
    NormalizationParams, RawDataset,
};
pub use error::{Error, Result};
pub use eval::{run_cv, CVReport, FoldResult};
pub use generation::{generate, GenConfig};
pub use hyperblock::{AttributeConstraint, HBModel, Hyperblock, Interval};
pub use simplify::{simplify_pipeline, SimplifyConfig};
