//! Dataset loading, [0,1] normalization, per-attribute statistics, and
//! stratified cross-validation fold plans.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which column of a delimited file holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
    /// Rightmost column.
    Last,
}

impl LabelColumn {
    /// Parse a CLI-style selector: a non-negative integer is an index,
    /// anything else is a header name.
    pub fn parse(s: &str) -> LabelColumn {
        match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        }
    }
}

/// Rows exactly as read from disk, before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub rows: Vec<Vec<f64>>,
    /// Class labels as read, one per row.
    pub labels: Vec<String>,
    pub attribute_names: Vec<String>,
    /// Unique class labels in first-appearance order.
    pub class_names: Vec<String>,
}

impl RawDataset {
    pub fn attribute_count(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Dense class index per row, following `class_names` order.
    pub fn label_indices(&self) -> Vec<usize> {
        self.labels
            .iter()
            .map(|l| {
                self.class_names
                    .iter()
                    .position(|c| c == l)
                    .expect("label missing from class_names")
            })
            .collect()
    }
}

/// Per-attribute min/max on the raw scale, captured at normalization time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

/// Normalized points in [0,1] with dense class indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub attribute_names: Vec<String>,
    pub class_names: Vec<String>,
    pub norm: NormalizationParams,
}

impl Dataset {
    pub fn attribute_count(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Assignment of every row to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold index per dataset row.
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    /// Row indices of the training and test split for one fold.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (row, &f) in self.assignments.iter().enumerate() {
            if f == fold {
                test.push(row);
            } else {
                train.push(row);
            }
        }
        (train, test)
    }

    /// Two-column CSV: row_index, fold.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("row_index,fold\n");
        for (row, &f) in self.assignments.iter().enumerate() {
            let _ = writeln!(out, "{row},{f}");
        }
        out
    }
}

/// Load a comma-delimited text file. Attribute cells must parse as numbers;
/// the label column is kept as text. Class names are recorded in
/// first-appearance order.
pub fn load_csv(
    path: impl AsRef<Path>,
    has_header: bool,
    label: &LabelColumn,
) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, has_header, label)
}

/// Parse CSV text already in memory; same rules as [`load_csv`].
pub fn parse_csv_str(text: &str, has_header: bool, label: &LabelColumn) -> Result<RawDataset> {
    read_csv(text.as_bytes(), has_header, label)
}

fn read_csv(
    source: impl std::io::Read,
    has_header: bool,
    label: &LabelColumn,
) -> Result<RawDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);

    let mut records = reader.records();
    let mut row_no = 0usize;

    let header: Option<Vec<String>> = if has_header {
        row_no += 1;
        match records.next() {
            Some(rec) => {
                let rec = rec.map_err(|e| Error::parse(row_no, 0, e.to_string()))?;
                Some(rec.iter().map(|s| s.trim().to_string()).collect())
            }
            None => return Err(Error::Data("empty file".to_string())),
        }
    } else {
        None
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut width: Option<usize> = None;
    let mut label_idx: Option<usize> = None;

    for rec in records {
        row_no += 1;
        let rec = rec.map_err(|e| Error::parse(row_no, 0, e.to_string()))?;
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue; // trailing blank line
        }

        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(Error::parse(
                row_no,
                rec.len(),
                format!("ragged row: expected {w} fields, got {}", rec.len()),
            ));
        }

        let li = match label_idx {
            Some(li) => li,
            None => {
                let li = resolve_label_column(label, header.as_deref(), w)?;
                label_idx = Some(li);
                li
            }
        };

        let mut values = Vec::with_capacity(w - 1);
        for (col, cell) in rec.iter().enumerate() {
            if col == li {
                let lab = cell.trim().to_string();
                if lab.is_empty() {
                    return Err(Error::parse(row_no, col + 1, "empty label cell"));
                }
                if !class_names.contains(&lab) {
                    class_names.push(lab.clone());
                }
                labels.push(lab);
            } else {
                let cell = cell.trim();
                if cell.is_empty() {
                    return Err(Error::parse(row_no, col + 1, "empty attribute cell"));
                }
                let v: f64 = cell.parse().map_err(|_| {
                    Error::parse(
                        row_no,
                        col + 1,
                        format!("non-numeric attribute value {cell:?}"),
                    )
                })?;
                if !v.is_finite() {
                    return Err(Error::parse(row_no, col + 1, "non-finite attribute value"));
                }
                values.push(v);
            }
        }
        rows.push(values);
    }

    if rows.is_empty() {
        return Err(Error::Data("no data rows".to_string()));
    }

    let width = width.unwrap();
    let label_idx = label_idx.unwrap();
    let attribute_names = match header {
        Some(h) => {
            if h.len() != width {
                return Err(Error::parse(
                    1,
                    h.len(),
                    format!("header has {} fields but rows have {width}", h.len()),
                ));
            }
            h.into_iter()
                .enumerate()
                .filter(|(i, _)| *i != label_idx)
                .map(|(_, n)| n)
                .collect()
        }
        None => (0..width)
            .filter(|&i| i != label_idx)
            .enumerate()
            .map(|(k, _)| format!("x{}", k + 1))
            .collect(),
    };

    Ok(RawDataset {
        rows,
        labels,
        attribute_names,
        class_names,
    })
}

fn resolve_label_column(
    label: &LabelColumn,
    header: Option<&[String]>,
    width: usize,
) -> Result<usize> {
    match label {
        LabelColumn::Index(i) => {
            if *i < width {
                Ok(*i)
            } else {
                Err(Error::Config(format!(
                    "label column index {i} out of range for {width} columns"
                )))
            }
        }
        LabelColumn::Name(name) => match header {
            Some(h) => h
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| Error::Config(format!("label column {name:?} not found in header"))),
            None => Err(Error::Config(
                "label column by name requires a header row".to_string(),
            )),
        },
        LabelColumn::Last => Ok(width - 1),
    }
}

/// Map every attribute to [0,1] with per-attribute min/max taken over the
/// given rows. Constant attributes map to 0.0.
pub fn normalize(raw: &RawDataset) -> Dataset {
    let labels = raw.label_indices();
    normalize_with_classes(&raw.rows, &labels, &raw.attribute_names, &raw.class_names)
}

/// Same affine map as [`normalize`] but with an externally fixed class list,
/// so per-fold training subsets keep the global class indexing.
pub fn normalize_with_classes(
    rows: &[Vec<f64>],
    labels: &[usize],
    attribute_names: &[String],
    class_names: &[String],
) -> Dataset {
    let n_attr = attribute_names.len();
    let mut mins = vec![f64::INFINITY; n_attr];
    let mut maxs = vec![f64::NEG_INFINITY; n_attr];
    for row in rows {
        for (i, &v) in row.iter().enumerate() {
            mins[i] = mins[i].min(v);
            maxs[i] = maxs[i].max(v);
        }
    }
    let norm = NormalizationParams { mins, maxs };
    let points = rows.iter().map(|row| normalize_row(&norm, row)).collect();
    Dataset {
        points,
        labels: labels.to_vec(),
        attribute_names: attribute_names.to_vec(),
        class_names: class_names.to_vec(),
        norm,
    }
}

fn normalize_row(params: &NormalizationParams, row: &[f64]) -> Vec<f64> {
    row.iter()
        .enumerate()
        .map(|(i, &v)| {
            let range = params.maxs[i] - params.mins[i];
            if range == 0.0 {
                0.0
            } else {
                ((v - params.mins[i]) / range).clamp(0.0, 1.0)
            }
        })
        .collect()
}

/// Normalize a raw point with stored parameters, clamping to [0,1] so
/// out-of-range test values stay inside the model's domain.
pub fn apply_normalization(params: &NormalizationParams, raw_point: &[f64]) -> Result<Vec<f64>> {
    if raw_point.len() != params.mins.len() {
        return Err(Error::DimensionMismatch {
            expected: params.mins.len(),
            got: raw_point.len(),
        });
    }
    Ok(normalize_row(params, raw_point))
}

/// Population standard deviation per attribute.
pub fn attribute_std_devs(data: &Dataset) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::Data(
            "cannot take statistics of an empty dataset".into(),
        ));
    }
    let n = data.len() as f64;
    let n_attr = data.attribute_count();
    let mut means = vec![0.0; n_attr];
    for p in &data.points {
        for (i, &v) in p.iter().enumerate() {
            means[i] += v;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut vars = vec![0.0; n_attr];
    for p in &data.points {
        for (i, &v) in p.iter().enumerate() {
            let d = v - means[i];
            vars[i] += d * d;
        }
    }
    Ok(vars.into_iter().map(|v| (v / n).sqrt()).collect())
}

/// Deterministic stratified k-fold assignment: per class, rows are shuffled
/// by the seed and dealt round-robin, so per-class fold sizes differ by at
/// most one.
pub fn stratified_folds(data: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    stratified_folds_for_labels(&data.labels, data.class_count(), k, seed)
}

/// Label-only variant used by the CV harness before any normalization runs.
pub fn stratified_folds_for_labels(
    labels: &[usize],
    class_count: usize,
    k: usize,
    seed: u64,
) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Config(format!(
            "fold count must be at least 2, got {k}"
        )));
    }
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); class_count];
    for (row, &c) in labels.iter().enumerate() {
        per_class[c].push(row);
    }
    for (c, members) in per_class.iter().enumerate() {
        if members.len() < k {
            return Err(Error::Config(format!(
                "class {c} has {} rows, fewer than {k} folds",
                members.len()
            )));
        }
    }

    // Each class deals round-robin starting where the previous class's
    // remainder ended, so oversized folds rotate and total fold sizes stay
    // within one of each other.
    let mut assignments = vec![0usize; labels.len()];
    let mut rng = SplitMix64::new(seed);
    let mut offset = 0usize;
    for members in &mut per_class {
        shuffle(members, &mut rng);
        for (pos, &row) in members.iter().enumerate() {
            assignments[row] = (offset + pos) % k;
        }
        offset = (offset + members.len()) % k;
    }
    Ok(FoldPlan {
        k,
        assignments,
        seed,
    })
}

/// SplitMix64: tiny, well-studied 64-bit generator. Written out here so fold
/// plans stay byte-identical regardless of dependency versions.
pub(crate) struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub(crate) fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub(crate) fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform value in [0, bound) via rejection sampling.
    fn below(&mut self, bound: u64) -> u64 {
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let v = self.next_u64();
            if v >= threshold {
                return v % bound;
            }
        }
    }
}

fn shuffle(items: &mut [usize], rng: &mut SplitMix64) {
    for i in (1..items.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        items.swap(i, j);
    }
}
