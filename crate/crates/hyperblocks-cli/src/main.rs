//! `hyperblocks` command line: train, simplify, classify, cross-validate,
//! grid-search, render, and inspect interval-based rule models.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hyperblocks::classify::{Classifier, FallbackConfig, Route};
use hyperblocks::dataset::{load_csv, normalize, LabelColumn, RawDataset};
use hyperblocks::eval::{
    fold_table_csv, grid_search, render_report, run_cv, stats_table_csv, GridSpec,
};
use hyperblocks::generation::{generate, GenConfig};
use hyperblocks::hyperblock::HBModel;
use hyperblocks::simplify::{simplify_pipeline, AttributeOrderPolicy, SimplifyConfig, Stage};
use hyperblocks::viz::{render_parallel_coordinates, RenderSpec};
use hyperblocks::{Error, Result};

use config::{parse_bool, parse_f64, parse_usize, FileConfig};

#[derive(Parser)]
#[command(
    name = "hyperblocks",
    version,
    about = "Interpretable interval-rule classification"
)]
struct Cli {
    /// Key/value config file; flags take precedence over file values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for purity scans. Affects speed only, never results.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Training data CSV.
    #[arg(long, value_name = "FILE")]
    data: Option<PathBuf>,

    /// Label column, by index or header name. Defaults to the last column.
    #[arg(long, value_name = "COL")]
    label_column: Option<String>,

    /// Treat the first row as data, not a header.
    #[arg(long)]
    no_header: bool,
}

#[derive(Args)]
struct SimplifyArgs {
    /// Minimum surviving block size for redundant-block removal.
    #[arg(long, value_name = "N")]
    removal_threshold: Option<usize>,

    /// Attribute generalization order: fisher, natural, or an explicit
    /// comma-separated permutation like 2,0,1.
    #[arg(long, value_name = "POLICY")]
    attribute_order: Option<String>,

    /// Most attributes a disjunctive merge may differ on.
    #[arg(long, value_name = "N")]
    max_disjunctions: Option<usize>,

    /// Stage order, e.g. r2a,r2b,disjunctive.
    #[arg(long, value_name = "LIST")]
    stages: Option<String>,
}

#[derive(Args)]
struct FallbackArgs {
    /// Fallback for uncovered points: ets, nearest-hb, knn-hb,
    /// knn-euclidean, or none.
    #[arg(long, value_name = "NAME")]
    fallback: Option<String>,

    /// Neighbor count for k-NN style fallbacks.
    #[arg(long, value_name = "K")]
    k: Option<usize>,

    /// Similarity thresholds as this fraction of each attribute's
    /// standard deviation.
    #[arg(long, value_name = "F")]
    threshold_fraction: Option<f64>,

    /// Explicit per-attribute similarity thresholds (comma-separated),
    /// overriding the derived ones. Only meaningful with the ets fallback.
    #[arg(long, value_name = "LIST")]
    thresholds: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write the model document.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        simplify: SimplifyArgs,
        /// Skip simplification; keep the raw generated blocks.
        #[arg(long)]
        no_simplify: bool,
        /// Seed-queue tie-break policy.
        #[arg(long, value_name = "NAME")]
        tie_break: Option<String>,
        /// Seed-queue ordering policy.
        #[arg(long, value_name = "NAME")]
        queue_policy: Option<String>,
        /// Output model path.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Re-simplify an existing model against its training data.
    Simplify {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        simplify: SimplifyArgs,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Classify the rows of a CSV of raw attribute values.
    Classify {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
        /// Input CSV of attribute columns (no label column).
        #[arg(long, value_name = "FILE")]
        input: PathBuf,
        /// Training data CSV, required by the ets and knn-euclidean
        /// fallbacks. --label-column/--no-header apply to this file.
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        fallback: FallbackArgs,
        /// Output CSV path.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Optional JSON-lines decision trace, one object per row.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
    },
    /// k-fold cross-validation with fold and statistics reports.
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        simplify: SimplifyArgs,
        #[command(flatten)]
        fallback: FallbackArgs,
        #[arg(long, value_name = "K")]
        folds: Option<usize>,
        /// Shuffle seed; required so runs are reproducible.
        #[arg(long, value_name = "SEED")]
        seed: u64,
        /// Directory for folds.csv, stats.csv, plan.csv, summary.txt.
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
    /// Cross-validated grid search over fallback and pruning parameters.
    Grid {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        simplify: SimplifyArgs,
        #[arg(long, value_name = "K")]
        folds: Option<usize>,
        #[arg(long, value_name = "SEED")]
        seed: u64,
        /// Comma-separated removal thresholds to try.
        #[arg(long, value_name = "LIST")]
        removal_thresholds: Option<String>,
        /// Comma-separated neighbor counts to try.
        #[arg(long, value_name = "LIST")]
        ks: Option<String>,
        /// Comma-separated threshold fractions to try.
        #[arg(long, value_name = "LIST")]
        threshold_fractions: Option<String>,
        /// Ranked results CSV.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Render data and model blocks as a parallel-coordinates SVG.
    Render {
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
        /// Attribute subset to display, by index or name.
        #[arg(long, value_name = "LIST")]
        attributes: Option<String>,
        /// Draw at most this many rows per class.
        #[arg(long, value_name = "N")]
        sample_limit: Option<usize>,
        #[arg(long, value_name = "PX")]
        width: Option<u32>,
        #[arg(long, value_name = "PX")]
        height: Option<u32>,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Print a model's rules, largest coverage first.
    Inspect {
        #[arg(long, value_name = "FILE")]
        model: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 usage/config, 3 i/o, 4 bad data, 5 broken internal invariant.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Io { .. } => 3,
        Error::Parse { .. }
        | Error::Data(_)
        | Error::Schema(_)
        | Error::DimensionMismatch { .. } => 4,
        Error::Internal(_) => 5,
    }
}

fn run(cli: Cli) -> Result<()> {
    let file_cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    let workers: Option<usize> = file_cfg.resolve(
        cli.workers.map(Some),
        "workers",
        |s| parse_usize(s).map(Some),
        None,
    )?;
    if let Some(w) = workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot configure {w} workers: {e}")))?;
    }

    match cli.command {
        Command::Train {
            data,
            simplify,
            no_simplify,
            tie_break,
            queue_policy,
            out,
        } => cmd_train(
            &file_cfg,
            data,
            simplify,
            no_simplify,
            tie_break,
            queue_policy,
            &out,
        ),
        Command::Simplify {
            model,
            data,
            simplify,
            out,
        } => cmd_simplify(&file_cfg, &model, data, simplify, &out),
        Command::Classify {
            model,
            input,
            data,
            fallback,
            out,
            trace,
        } => cmd_classify(
            &file_cfg,
            &model,
            &input,
            data,
            fallback,
            &out,
            trace.as_deref(),
        ),
        Command::Cv {
            data,
            simplify,
            fallback,
            folds,
            seed,
            out_dir,
        } => cmd_cv(&file_cfg, data, simplify, fallback, folds, seed, &out_dir),
        Command::Grid {
            data,
            simplify,
            folds,
            seed,
            removal_thresholds,
            ks,
            threshold_fractions,
            out,
        } => cmd_grid(
            &file_cfg,
            data,
            simplify,
            folds,
            seed,
            removal_thresholds,
            ks,
            threshold_fractions,
            &out,
        ),
        Command::Render {
            model,
            data,
            attributes,
            sample_limit,
            width,
            height,
            out,
        } => cmd_render(
            &file_cfg,
            model.as_deref(),
            data,
            attributes,
            sample_limit,
            width,
            height,
            &out,
        ),
        Command::Inspect { model } => cmd_inspect(&model),
    }
}

fn load_raw(file_cfg: &FileConfig, data: &DataArgs) -> Result<RawDataset> {
    let path = match &data.data {
        Some(p) => p.clone(),
        None => match file_cfg.get("data") {
            Some(s) => PathBuf::from(s),
            None => return Err(Error::Config("no dataset given; use --data".into())),
        },
    };
    let has_header = if data.no_header {
        false
    } else {
        file_cfg.resolve(None, "has-header", parse_bool, true)?
    };
    let label = match &data.label_column {
        Some(s) => LabelColumn::parse(s),
        None => match file_cfg.get("label-column") {
            Some(s) => LabelColumn::parse(s),
            None => LabelColumn::Last,
        },
    };
    load_csv(path, has_header, &label)
}

fn simplify_config(file_cfg: &FileConfig, args: &SimplifyArgs) -> Result<SimplifyConfig> {
    let defaults = SimplifyConfig::default();
    let removal_threshold = file_cfg.resolve(
        args.removal_threshold,
        "removal-threshold",
        parse_usize,
        defaults.removal_threshold,
    )?;
    let max_disjunctions = file_cfg.resolve(
        args.max_disjunctions,
        "max-disjunctions",
        parse_usize,
        defaults.max_disjunctions,
    )?;
    let attribute_order = match args
        .attribute_order
        .as_deref()
        .or_else(|| file_cfg.get("attribute-order"))
    {
        Some(s) => parse_attribute_order(s)?,
        None => defaults.attribute_order,
    };
    let stages = match args.stages.as_deref().or_else(|| file_cfg.get("stages")) {
        Some(s) => s
            .split(',')
            .map(|p| Stage::parse(p.trim()))
            .collect::<Result<Vec<_>>>()?,
        None => defaults.stages,
    };
    Ok(SimplifyConfig {
        removal_threshold,
        attribute_order,
        max_disjunctions,
        stages,
    })
}

fn parse_attribute_order(s: &str) -> Result<AttributeOrderPolicy> {
    if s.contains(',') || s.chars().all(|c| c.is_ascii_digit()) {
        let perm = s
            .split(',')
            .map(|p| parse_usize(p.trim()))
            .collect::<Result<Vec<_>>>()?;
        Ok(AttributeOrderPolicy::Explicit(perm))
    } else {
        AttributeOrderPolicy::parse(s)
    }
}

fn fallback_config(file_cfg: &FileConfig, args: &FallbackArgs) -> Result<FallbackConfig> {
    let name = args
        .fallback
        .clone()
        .or_else(|| file_cfg.get("fallback").map(String::from))
        .unwrap_or_else(|| "ets".to_string());
    let k = file_cfg.resolve(args.k, "k", parse_usize, 5)?;
    let fraction = file_cfg.resolve(
        args.threshold_fraction,
        "threshold-fraction",
        parse_f64,
        0.25,
    )?;
    let mut cfg = FallbackConfig::parse(&name, k, fraction)?;
    let explicit = match args
        .thresholds
        .as_deref()
        .or_else(|| file_cfg.get("thresholds"))
    {
        Some(list) => Some(parse_list(list, parse_f64)?),
        None => None,
    };
    if let Some(values) = explicit {
        match &mut cfg {
            FallbackConfig::Ets { thresholds, .. } => *thresholds = Some(values),
            _ => {
                return Err(Error::Config(
                    "explicit thresholds only apply to the ets fallback".into(),
                ))
            }
        }
    }
    Ok(cfg)
}

fn gen_config(
    file_cfg: &FileConfig,
    tie_break: Option<String>,
    queue_policy: Option<String>,
) -> Result<GenConfig> {
    let mut cfg = GenConfig::default();
    if let Some(s) = tie_break.or_else(|| file_cfg.get("tie-break").map(String::from)) {
        cfg.tie_break = s.parse()?;
    }
    if let Some(s) = queue_policy.or_else(|| file_cfg.get("queue-policy").map(String::from)) {
        cfg.queue_policy = s.parse()?;
    }
    Ok(cfg)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn read_model(path: &Path) -> Result<HBModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    HBModel::from_json(&text)
}

fn cmd_train(
    file_cfg: &FileConfig,
    data: DataArgs,
    simplify: SimplifyArgs,
    no_simplify: bool,
    tie_break: Option<String>,
    queue_policy: Option<String>,
    out: &Path,
) -> Result<()> {
    let raw = load_raw(file_cfg, &data)?;
    let dataset = normalize(&raw);
    let gen_cfg = gen_config(file_cfg, tie_break, queue_policy)?;
    let mut model = generate(&dataset, &gen_cfg)?;
    println!(
        "generated {} blocks, {} clauses from {} rows",
        model.blocks.len(),
        model.total_clauses(),
        dataset.len()
    );
    if !no_simplify {
        let simp_cfg = simplify_config(file_cfg, &simplify)?;
        model = simplify_pipeline(&model, &dataset, &simp_cfg)?;
        println!(
            "simplified to {} blocks, {} clauses",
            model.blocks.len(),
            model.total_clauses()
        );
    }
    write_file(out, &model.to_json())?;
    println!("model written to {}", out.display());
    Ok(())
}

fn cmd_simplify(
    file_cfg: &FileConfig,
    model_path: &Path,
    data: DataArgs,
    simplify: SimplifyArgs,
    out: &Path,
) -> Result<()> {
    let model = read_model(model_path)?;
    let raw = load_raw(file_cfg, &data)?;
    let dataset = normalize(&raw);
    if dataset.attribute_count() != model.attribute_count() {
        return Err(Error::DimensionMismatch {
            expected: model.attribute_count(),
            got: dataset.attribute_count(),
        });
    }
    let simp_cfg = simplify_config(file_cfg, &simplify)?;
    let out_model = simplify_pipeline(&model, &dataset, &simp_cfg)?;
    println!(
        "simplified {} -> {} blocks, {} -> {} clauses",
        model.blocks.len(),
        out_model.blocks.len(),
        model.total_clauses(),
        out_model.total_clauses()
    );
    write_file(out, &out_model.to_json())
}

/// Attribute-only CSV: every cell numeric, optional header skipped.
fn load_points(path: &Path, has_header: bool, expected: usize) -> Result<Vec<Vec<f64>>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row_no = i + 1;
        let rec = rec.map_err(|e| Error::parse(row_no, 0, e.to_string()))?;
        if has_header && i == 0 {
            continue;
        }
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        if rec.len() != expected {
            return Err(Error::parse(
                row_no,
                rec.len(),
                format!("expected {expected} attribute values, got {}", rec.len()),
            ));
        }
        let mut row = Vec::with_capacity(expected);
        for (col, cell) in rec.iter().enumerate() {
            let v: f64 = cell.trim().parse().map_err(|_| {
                Error::parse(row_no, col + 1, format!("non-numeric value {cell:?}"))
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn cmd_classify(
    file_cfg: &FileConfig,
    model_path: &Path,
    input: &Path,
    data: DataArgs,
    fallback: FallbackArgs,
    out: &Path,
    trace: Option<&Path>,
) -> Result<()> {
    let model = read_model(model_path)?;
    let fb_cfg = fallback_config(file_cfg, &fallback)?;

    let needs_train = matches!(
        fb_cfg,
        FallbackConfig::Ets { .. } | FallbackConfig::KnnEuclidean { .. }
    );
    let train_data = if needs_train {
        let raw = load_raw(file_cfg, &data)?;
        if raw.attribute_names.len() != model.attribute_count() {
            return Err(Error::DimensionMismatch {
                expected: model.attribute_count(),
                got: raw.attribute_names.len(),
            });
        }
        Some(normalize(&raw))
    } else {
        None
    };

    let has_header = !data.no_header;
    let points = load_points(input, has_header, model.attribute_count())?;

    let clf = Classifier::new(&model, &fb_cfg, train_data.as_ref())?;
    let mut csv_out = String::from("row,predicted_class,route,top_score\n");
    let mut trace_out = String::new();
    for (i, raw_point) in points.iter().enumerate() {
        let outcome = clf.classify_raw_point(raw_point)?;
        let class_name = match outcome.predicted {
            Some(c) => model.class_names[c].as_str(),
            None => "",
        };
        let route = match outcome.route {
            Route::HbVote => "hb_vote",
            Route::Fallback => "fallback",
            Route::Abstain => "abstain",
        };
        let top = outcome.scores.iter().cloned().fold(0.0, f64::max);
        csv_out.push_str(&format!("{i},{class_name},{route},{top:.6}\n"));
        if trace.is_some() {
            trace_out.push_str(&serde_json::to_string(&outcome).expect("trace serialization"));
            trace_out.push('\n');
        }
    }
    write_file(out, &csv_out)?;
    if let Some(trace_path) = trace {
        write_file(trace_path, &trace_out)?;
    }
    println!("classified {} rows -> {}", points.len(), out.display());
    Ok(())
}

fn cmd_cv(
    file_cfg: &FileConfig,
    data: DataArgs,
    simplify: SimplifyArgs,
    fallback: FallbackArgs,
    folds: Option<usize>,
    seed: u64,
    out_dir: &Path,
) -> Result<()> {
    let raw = load_raw(file_cfg, &data)?;
    let k_folds = file_cfg.resolve(folds, "folds", parse_usize, 10)?;
    let gen_cfg = gen_config(file_cfg, None, None)?;
    let simp_cfg = simplify_config(file_cfg, &simplify)?;
    let fb_cfg = fallback_config(file_cfg, &fallback)?;

    // fail fast on undersized classes before any training work
    let mut class_sizes = vec![0usize; raw.class_names.len()];
    for idx in raw.label_indices() {
        class_sizes[idx] += 1;
    }
    if let Some((class, &size)) = class_sizes.iter().enumerate().find(|(_, &s)| s < k_folds) {
        return Err(Error::Config(format!(
            "class {:?} has {size} rows, fewer than {k_folds} folds",
            raw.class_names[class]
        )));
    }

    let report = run_cv(&raw, k_folds, &gen_cfg, &simp_cfg, &fb_cfg, seed)?;

    let plan = hyperblocks::dataset::stratified_folds_for_labels(
        &raw.label_indices(),
        raw.class_names.len(),
        k_folds,
        seed,
    )?;

    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_file(&out_dir.join("folds.csv"), &fold_table_csv(&report))?;
    write_file(&out_dir.join("stats.csv"), &stats_table_csv(&report))?;
    write_file(&out_dir.join("plan.csv"), &plan.to_csv_string())?;
    write_file(
        &out_dir.join("summary.txt"),
        &render_report(&report, "text")?,
    )?;

    println!(
        "{} folds: accuracy {:.2}% (std {:.2}), {:.1} blocks, {:.1} clauses, coverage {:.2}%",
        k_folds,
        report.accuracy.average,
        report.accuracy.std_dev,
        report.block_count.average,
        report.clause_count.average,
        100.0 * report.coverage.average
    );
    println!("reports written to {}", out_dir.display());
    Ok(())
}

fn parse_list<T, F: Fn(&str) -> Result<T>>(s: &str, parse: F) -> Result<Vec<T>> {
    s.split(',').map(|p| parse(p.trim())).collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_grid(
    file_cfg: &FileConfig,
    data: DataArgs,
    simplify: SimplifyArgs,
    folds: Option<usize>,
    seed: u64,
    removal_thresholds: Option<String>,
    ks: Option<String>,
    threshold_fractions: Option<String>,
    out: &Path,
) -> Result<()> {
    let raw = load_raw(file_cfg, &data)?;
    let k_folds = file_cfg.resolve(folds, "folds", parse_usize, 10)?;
    let gen_cfg = gen_config(file_cfg, None, None)?;
    let base_simp = simplify_config(file_cfg, &simplify)?;

    let grid = GridSpec {
        removal_thresholds: match removal_thresholds {
            Some(s) => parse_list(&s, parse_usize)?,
            None => vec![base_simp.removal_threshold],
        },
        ks: match ks {
            Some(s) => parse_list(&s, parse_usize)?,
            None => vec![5],
        },
        threshold_fractions: match threshold_fractions {
            Some(s) => parse_list(&s, parse_f64)?,
            None => vec![0.25],
        },
    };

    let entries = grid_search(&raw, &gen_cfg, &base_simp, &grid, k_folds, seed)?;
    let mut csv_out = String::from(
        "rank,removal_threshold,k,threshold_fraction,avg_accuracy,avg_blocks,avg_clauses\n",
    );
    for (rank, e) in entries.iter().enumerate() {
        csv_out.push_str(&format!(
            "{},{},{},{},{:.2},{:.2},{:.2}\n",
            rank + 1,
            e.removal_threshold,
            e.k,
            e.threshold_fraction,
            e.report.accuracy.average,
            e.report.block_count.average,
            e.report.clause_count.average
        ));
    }
    write_file(out, &csv_out)?;
    let best = &entries[0];
    println!(
        "best: removal_threshold={} k={} threshold_fraction={} -> {:.2}% accuracy",
        best.removal_threshold, best.k, best.threshold_fraction, best.report.accuracy.average
    );
    println!("ranking written to {}", out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_render(
    file_cfg: &FileConfig,
    model_path: Option<&Path>,
    data: DataArgs,
    attributes: Option<String>,
    sample_limit: Option<usize>,
    width: Option<u32>,
    height: Option<u32>,
    out: &Path,
) -> Result<()> {
    let raw = load_raw(file_cfg, &data)?;
    let dataset = normalize(&raw);
    let blocks = match model_path {
        Some(p) => {
            let model = read_model(p)?;
            if model.attribute_count() != dataset.attribute_count() {
                return Err(Error::DimensionMismatch {
                    expected: model.attribute_count(),
                    got: dataset.attribute_count(),
                });
            }
            model.blocks
        }
        None => Vec::new(),
    };

    let attr_subset = match attributes {
        Some(list) => Some(
            list.split(',')
                .map(|p| {
                    let p = p.trim();
                    match p.parse::<usize>() {
                        Ok(i) => Ok(i),
                        Err(_) => dataset
                            .attribute_names
                            .iter()
                            .position(|n| n == p)
                            .ok_or_else(|| Error::Config(format!("unknown attribute {p:?}"))),
                    }
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };

    let mut spec = RenderSpec {
        attributes: attr_subset,
        sample_limit,
        ..Default::default()
    };
    if let Some(w) = width {
        spec.width = w;
    }
    if let Some(h) = height {
        spec.height = h;
    }

    let svg = render_parallel_coordinates(&dataset, &blocks, &spec)?;
    write_file(out, &svg)?;
    println!("svg written to {}", out.display());
    Ok(())
}

fn cmd_inspect(model_path: &Path) -> Result<()> {
    let model = read_model(model_path)?;
    println!("{} rules", model.blocks.len());
    print!("{}", model.rule_listing());
    Ok(())
}
