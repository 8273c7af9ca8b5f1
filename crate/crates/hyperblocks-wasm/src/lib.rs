//! WebAssembly bindings for the browser demo. A [`Session`] owns a trained
//! model plus its training data and exposes three interactive operations:
//! training with chosen simplification parameters, parallel-coordinates
//! rendering, and single-point classification with a decision trace.

use wasm_bindgen::prelude::*;

use hyperblocks::classify::{Classifier, FallbackConfig, Route};
use hyperblocks::dataset::{normalize, parse_csv_str, Dataset, LabelColumn};
use hyperblocks::generation::{generate, GenConfig};
use hyperblocks::hyperblock::HBModel;
use hyperblocks::simplify::{simplify_pipeline, SimplifyConfig};
use hyperblocks::viz::{render_parallel_coordinates, RenderSpec};

const IRIS_CSV: &str = include_str!("../../../data/iris.csv");
const WBC_CSV: &str = include_str!("../../../data/wbc.csv");

fn lookup_dataset(name: &str) -> Result<&'static str, String> {
    match name {
        "iris" => Ok(IRIS_CSV),
        "wbc" => Ok(WBC_CSV),
        other => Err(format!("unknown dataset {other:?}")),
    }
}

/// Raw CSV text of a bundled dataset (`iris` or `wbc`).
#[wasm_bindgen]
pub fn builtin_dataset(name: &str) -> Result<String, JsValue> {
    lookup_dataset(name)
        .map(str::to_string)
        .map_err(|e| JsValue::from_str(&e))
}

fn err_to_js(e: hyperblocks::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

#[wasm_bindgen]
pub struct Session {
    data: Dataset,
    model: HBModel,
}

#[wasm_bindgen]
impl Session {
    /// Parse a labeled CSV (label in the last column), train, and
    /// optionally simplify with the given parameters.
    #[wasm_bindgen(constructor)]
    pub fn new(
        csv_text: &str,
        simplify: bool,
        removal_threshold: usize,
        max_disjunctions: usize,
    ) -> Result<Session, JsValue> {
        let raw = parse_csv_str(csv_text, true, &LabelColumn::Last).map_err(err_to_js)?;
        let data = normalize(&raw);
        let mut model = generate(&data, &GenConfig::default()).map_err(err_to_js)?;
        if simplify {
            let cfg = SimplifyConfig {
                removal_threshold,
                max_disjunctions,
                ..Default::default()
            };
            model = simplify_pipeline(&model, &data, &cfg).map_err(err_to_js)?;
        }
        Ok(Session { data, model })
    }

    /// Model complexity summary: block/clause totals, per-stage metrics,
    /// attribute names, and raw value ranges for building input controls.
    pub fn summary_json(&self) -> String {
        let stages: Vec<serde_json::Value> = self
            .model
            .config
            .stages
            .iter()
            .map(|s| {
                serde_json::json!({
                    "stage": s.stage,
                    "blocks_before": s.blocks_before,
                    "blocks_after": s.blocks_after,
                    "clauses_before": s.clauses_before,
                    "clauses_after": s.clauses_after,
                })
            })
            .collect();
        serde_json::json!({
            "rows": self.data.len(),
            "blocks": self.model.blocks.len(),
            "clauses": self.model.total_clauses(),
            "class_names": self.model.class_names,
            "attribute_names": self.model.attribute_names,
            "mins": self.model.normalization.mins,
            "maxs": self.model.normalization.maxs,
            "stages": stages,
        })
        .to_string()
    }

    /// Every rule as text, largest coverage first.
    pub fn rules_text(&self) -> String {
        self.model.rule_listing()
    }

    /// Parallel-coordinates SVG of the training data and blocks.
    pub fn render_svg(
        &self,
        sample_limit: usize,
        width: u32,
        height: u32,
    ) -> Result<String, JsValue> {
        let spec = RenderSpec {
            sample_limit: (sample_limit > 0).then_some(sample_limit),
            width,
            height,
            ..Default::default()
        };
        render_parallel_coordinates(&self.data, &self.model.blocks, &spec).map_err(err_to_js)
    }

    /// Classify one raw-scale point; returns route, class, per-class
    /// scores, and the rules of the containing blocks.
    pub fn classify_json(&self, raw_values: Vec<f64>) -> Result<String, JsValue> {
        let clf = Classifier::new(&self.model, &FallbackConfig::default(), Some(&self.data))
            .map_err(err_to_js)?;
        let outcome = clf.classify_raw_point(&raw_values).map_err(err_to_js)?;
        let route = match outcome.route {
            Route::HbVote => "hb_vote",
            Route::Fallback => "fallback",
            Route::Abstain => "abstain",
        };
        let class_name = outcome.predicted.map(|c| self.model.class_names[c].clone());
        let firing_rules: Vec<String> = self
            .model
            .blocks
            .iter()
            .filter(|b| outcome.contributing_blocks.contains(&b.id))
            .map(|b| b.to_rule_text(&self.model.attribute_names, &self.model.class_names))
            .collect();
        Ok(serde_json::json!({
            "predicted": class_name,
            "route": route,
            "scores": outcome.scores,
            "contributing_blocks": outcome.contributing_blocks,
            "firing_rules": firing_rules,
        })
        .to_string())
    }

    /// The versioned model document.
    pub fn model_json(&self) -> String {
        self.model.to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn session_trains_and_classifies_iris() {
        let session = Session::new(IRIS_CSV, true, 1, 1).unwrap();
        let summary: serde_json::Value = serde_json::from_str(&session.summary_json()).unwrap();
        assert_eq!(summary["rows"], 150);
        assert!(summary["blocks"].as_u64().unwrap() >= 3);

        let out: serde_json::Value =
            serde_json::from_str(&session.classify_json(vec![5.0, 3.3, 1.4, 0.2]).unwrap())
                .unwrap();
        assert_eq!(out["predicted"], "setosa");
        assert_eq!(out["route"], "hb_vote");

        let svg = session.render_svg(30, 900, 500).unwrap();
        assert!(svg.starts_with("<svg"));
    }

    #[test]
    fn builtin_datasets_parse() {
        assert!(lookup_dataset("iris").unwrap().starts_with("sepal_length"));
        assert!(lookup_dataset("wbc")
            .unwrap()
            .starts_with("clump_thickness"));
        assert!(lookup_dataset("mnist").is_err());
    }
}
