use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use qvotes::data::{ColumnNames, LoadSummary};
use qvotes::modelfit::TargetVotes;
use qvotes::report::{fmt_sig6, read_curves_csv, write_curves_csv, CurveBundle, ModelReport};
use qvotes::simulate::{parse_sweep, with_workers};
use qvotes::stats::{mean, sample_std};
use qvotes::{
    compare_to_reference, fit_power_model, load_ratings, load_reference, max_ci_width,
    remove_outliers_iqr, run_sweep, votes_for_target, Metric, MosKind, MosVector, OutlierScope,
    RatingDataset, ReferenceMos, SweepConfig, TableSchema,
};

mod manifest;

use manifest::RunManifest;

#[derive(Parser)]
#[command(
    name = "qvotes",
    version,
    about = "Votes-per-condition analysis for MOS rating data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize a ratings table and report problems
    Validate {
        ratings: PathBuf,
        reference: Option<PathBuf>,
        #[command(flatten)]
        input: InputArgs,
    },
    /// SRCC and RMSE of the ratings MOS against a reference MOS
    Compare {
        ratings: PathBuf,
        reference: PathBuf,
        /// Also report RMSE after a first-order linear mapping
        #[arg(long)]
        fom: bool,
        /// Write the comparison as JSON
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value = "balanced")]
        mos_kind: MosKind,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Resample the ratings and write metric curves
    Simulate(SimulateArgs),
    /// Fit y = a * x^b + c to one curve of a curves CSV
    Fit {
        curves: PathBuf,
        #[arg(long)]
        metric: String,
        /// Dataset label, needed when the file holds several datasets
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also report the votes needed to reach this metric value
        #[arg(long)]
        target: Option<f64>,
    },
    /// Widest possible MOS confidence interval per number of votes
    Maxci {
        #[arg(long, default_value = "10:200:10")]
        n: String,
        #[arg(long)]
        mos: f64,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Column renames, e.g. condition=cond,user=worker
    #[arg(long = "col")]
    columns: Option<String>,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Drop votes at least K interquartile ranges from the median
    #[arg(long, value_name = "K")]
    outlier_k: Option<f64>,
    #[arg(long, default_value = "condition")]
    outlier_scope: OutlierScope,
}

#[derive(Args)]
struct SimulateArgs {
    ratings: PathBuf,
    reference: Option<PathBuf>,
    /// Vote counts as start:stop:step (inclusive) or a single value
    #[arg(long, default_value = "10:200:10")]
    n: String,
    #[arg(long, default_value_t = qvotes::simulate::DEFAULT_REPETITIONS)]
    runs: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated metrics: srcc, rmse, gain_srcc, gain_rmse, ci_width, irr
    #[arg(long, default_value = "gain_srcc,gain_rmse")]
    metrics: String,
    /// Curves CSV; a JSON bundle and a manifest are written beside it
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    fom: bool,
    #[arg(long, default_value_t = 0.95)]
    ci_level: f64,
    #[arg(long, default_value_t = qvotes::bootstrap::DEFAULT_RESAMPLES as u32)]
    boot: u32,
    /// Dataset label in the output; defaults to the ratings file stem
    #[arg(long)]
    label: Option<String>,
    /// Aggregation of the full-data MOS used by the gain metrics
    #[arg(long, default_value = "balanced")]
    mos_kind: MosKind,
    #[arg(long, default_value_t = qvotes::simulate::DEFAULT_MIN_CONDITIONS_PER_USER)]
    min_conditions: u32,
    #[command(flatten)]
    input: InputArgs,
}

/// Bad flags or settings; exits with status 2.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let config = err.chain().any(|e| {
        e.is::<ConfigError>()
            || e.downcast_ref::<qvotes::Error>()
                .is_some_and(|q| q.is_config())
    });
    if config {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Validate {
            ratings,
            reference,
            input,
        } => cmd_validate(&ratings, reference.as_deref(), &input),
        Command::Compare {
            ratings,
            reference,
            fom,
            json,
            mos_kind,
            input,
        } => cmd_compare(&ratings, &reference, fom, json.as_deref(), mos_kind, &input),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Fit {
            curves,
            metric,
            dataset,
            out,
            target,
        } => cmd_fit(&curves, &metric, dataset.as_deref(), out.as_deref(), target),
        Command::Maxci { n, mos, level, out } => cmd_maxci(&n, mos, level, out.as_deref()),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn read_file(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn schema(input: &InputArgs) -> anyhow::Result<TableSchema> {
    if !input.delimiter.is_ascii() {
        return Err(config_err(format!(
            "delimiter `{}` is not ASCII",
            input.delimiter
        )));
    }
    let columns = match &input.columns {
        Some(spec) => ColumnNames::default().with_overrides(spec)?,
        None => ColumnNames::default(),
    };
    Ok(TableSchema {
        delimiter: input.delimiter as u8,
        columns,
    })
}

struct Loaded {
    ds: RatingDataset,
    summary: LoadSummary,
    removed: u64,
}

fn load_dataset(path: &Path, bytes: &[u8], input: &InputArgs) -> anyhow::Result<Loaded> {
    let schema = schema(input)?;
    let (ds, summary) =
        load_ratings(bytes, &schema).with_context(|| format!("in {}", path.display()))?;
    let (ds, removed) = match input.outlier_k {
        Some(k) if !(k > 0.0) => {
            return Err(config_err(format!("outlier k must be positive, got {k}")))
        }
        Some(k) => remove_outliers_iqr(&ds, k, input.outlier_scope)?,
        None => (ds, 0),
    };
    Ok(Loaded {
        ds,
        summary,
        removed,
    })
}

fn load_ref(path: &Path, bytes: &[u8], input: &InputArgs) -> anyhow::Result<ReferenceMos> {
    let schema = schema(input)?;
    Ok(load_reference(bytes, &schema).with_context(|| format!("in {}", path.display()))?)
}

fn file_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "ratings".into())
}

fn cmd_validate(
    ratings: &Path,
    reference: Option<&Path>,
    input: &InputArgs,
) -> anyhow::Result<ExitCode> {
    let bytes = read_file(ratings)?;
    let loaded = load_dataset(ratings, &bytes, input)?;
    let ds = &loaded.ds;
    let per_cond: Vec<f64> = ds.votes_per_condition().iter().map(|&v| v as f64).collect();
    let avg = mean(&per_cond).unwrap_or(0.0);
    let std = sample_std(&per_cond);

    println!("file: {}", ratings.display());
    println!("rows: {}", loaded.summary.rows);
    println!("conditions: {}", ds.num_conditions());
    println!("users: {}", ds.num_users());
    println!("votes: {}", ds.num_votes());
    println!(
        "votes per condition: {} (std {})",
        fmt_sig6(avg),
        fmt_sig6(std)
    );
    if input.outlier_k.is_some() {
        println!("outlier votes removed: {}", loaded.removed);
    }

    let mut problems = 0usize;
    let thin: Vec<&str> = ds
        .conditions()
        .iter()
        .zip(ds.votes_per_condition())
        .filter(|(_, v)| *v < 2)
        .map(|(c, _)| c.as_str())
        .collect();
    if !thin.is_empty() {
        eprintln!(
            "warning: conditions with fewer than 2 votes: {}",
            thin.join(", ")
        );
    }

    if let Some(ref_path) = reference {
        let ref_bytes = read_file(ref_path)?;
        let reference = load_ref(ref_path, &ref_bytes, input)?;
        let check = reference.check_against(ds);
        println!("reference conditions: {}", reference.len());
        println!("shared conditions: {}", check.shared);
        if !check.orphans.is_empty() {
            eprintln!(
                "warning: {} reference conditions have no ratings: {}",
                check.orphans.len(),
                check.orphans.join(", ")
            );
        }
        if !check.unreferenced.is_empty() {
            eprintln!(
                "warning: {} rated conditions have no reference MOS: {}",
                check.unreferenced.len(),
                check.unreferenced.join(", ")
            );
        }
        if check.shared < 3 {
            problems += 1;
            println!(
                "problem: only {} conditions shared with the reference, need 3",
                check.shared
            );
        }
    }

    if problems == 0 {
        println!("ok");
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_compare(
    ratings: &Path,
    reference: &Path,
    fom: bool,
    json: Option<&Path>,
    mos_kind: MosKind,
    input: &InputArgs,
) -> anyhow::Result<ExitCode> {
    let bytes = read_file(ratings)?;
    let ref_bytes = read_file(reference)?;
    let ds = load_dataset(ratings, &bytes, input)?.ds;
    let refs = load_ref(reference, &ref_bytes, input)?;
    let cs = MosVector::from_dataset(&ds, mos_kind);
    let cmp = compare_to_reference(&cs, &refs, fom)?;

    println!("shared conditions: {}", cmp.shared_conditions);
    println!("srcc: {}", fmt_sig6(cmp.srcc));
    println!("rmse: {}", fmt_sig6(cmp.rmse));
    if let (Some(r), Some(m)) = (cmp.rmse_after_mapping, cmp.mapping) {
        println!("rmse mapped: {}", fmt_sig6(r));
        println!("slope: {}", fmt_sig6(m.slope));
        println!("intercept: {}", fmt_sig6(m.intercept));
    }
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&cmp)?;
        fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
        let mut manifest = RunManifest::new(None);
        manifest.record_input(ratings, &bytes);
        manifest.record_input(reference, &ref_bytes);
        manifest.write_beside(path)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn worker_count() -> anyhow::Result<usize> {
    match std::env::var("QVOTES_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(config_err(format!(
                "QVOTES_THREADS must be a positive integer, got `{v}`"
            ))),
        },
        Err(_) => Ok(rayon::current_num_threads()),
    }
}

fn cmd_simulate(args: &SimulateArgs) -> anyhow::Result<ExitCode> {
    let metrics = args
        .metrics
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse::<Metric>)
        .collect::<qvotes::Result<Vec<_>>>()?;
    let cfg = SweepConfig {
        n_values: parse_sweep(&args.n)?,
        repetitions: args.runs,
        master_seed: args.seed,
        metrics,
        bootstrap_resamples: args.boot,
        ci_level: args.ci_level,
        apply_first_order_map: args.fom,
        min_conditions_per_user: args.min_conditions,
        full_mos_kind: args.mos_kind,
    };
    cfg.validate()?;
    if cfg.metrics.iter().any(|m| m.needs_reference()) && args.reference.is_none() {
        return Err(config_err("validity metrics need a reference MOS table"));
    }
    let workers = worker_count()?;

    let bytes = read_file(&args.ratings)?;
    let label = args
        .label
        .clone()
        .unwrap_or_else(|| file_label(&args.ratings));
    let ds = load_dataset(&args.ratings, &bytes, &args.input)?
        .ds
        .with_label(label);
    let mut manifest = RunManifest::new(Some(args.seed));
    manifest.record_input(&args.ratings, &bytes);
    let reference = match &args.reference {
        Some(p) => {
            let ref_bytes = read_file(p)?;
            manifest.record_input(p, &ref_bytes);
            Some(load_ref(p, &ref_bytes, &args.input)?)
        }
        None => None,
    };

    let curves = with_workers(workers, || run_sweep(&ds, reference.as_ref(), &cfg))??;

    let mut csv = Vec::new();
    write_curves_csv(&curves, &mut csv)?;
    fs::write(&args.out, &csv).with_context(|| format!("cannot write {}", args.out.display()))?;
    let json_path = args.out.with_extension("json");
    let bundle = CurveBundle {
        config: cfg,
        curves,
    };
    fs::write(&json_path, serde_json::to_string_pretty(&bundle)? + "\n")
        .with_context(|| format!("cannot write {}", json_path.display()))?;
    manifest.write_beside(&args.out)?;
    eprintln!(
        "wrote {} curves to {} and {}",
        bundle.curves.len(),
        args.out.display(),
        json_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_fit(
    curves_path: &Path,
    metric: &str,
    dataset: Option<&str>,
    out: Option<&Path>,
    target: Option<f64>,
) -> anyhow::Result<ExitCode> {
    let bytes = read_file(curves_path)?;
    let curves =
        read_curves_csv(&bytes[..]).with_context(|| format!("in {}", curves_path.display()))?;
    let mut available: Vec<&str> = curves.iter().map(|c| c.metric.as_str()).collect();
    available.dedup();
    let matching: Vec<_> = curves
        .iter()
        .filter(|c| c.metric == metric && dataset.is_none_or(|d| c.dataset_label == d))
        .collect();
    let curve = match matching[..] {
        [c] => c,
        [] if available.contains(&metric) => {
            return Err(config_err(format!(
                "no `{metric}` curve for dataset `{}`",
                dataset.unwrap_or_default()
            )))
        }
        [] => {
            return Err(config_err(format!(
                "metric `{metric}` not in {} (available: {})",
                curves_path.display(),
                available.join(", ")
            )))
        }
        _ => {
            let labels: Vec<&str> = matching.iter().map(|c| c.dataset_label.as_str()).collect();
            return Err(config_err(format!(
                "several datasets have `{metric}`; pick one with --dataset ({})",
                labels.join(", ")
            )));
        }
    };

    let model = fit_power_model(&curve.xy())?;
    println!("metric: {}", curve.metric);
    println!("dataset: {}", curve.dataset_label);
    println!("model: y = a * x^b + c");
    println!("a: {}", fmt_sig6(model.a));
    println!("b: {}", fmt_sig6(model.b));
    println!("c: {}", fmt_sig6(model.c));
    println!("asymptote: {}", fmt_sig6(model.asymptote()));
    println!("rmse of fit: {}", fmt_sig6(model.rmse_of_fit));
    println!("points: {}", model.n_points);
    if let Some(t) = target {
        match votes_for_target(&model, t)? {
            TargetVotes::Votes(v) => println!("votes for {}: {v}", fmt_sig6(t)),
            TargetVotes::Unreachable => println!("votes for {}: unreachable", fmt_sig6(t)),
        }
    }
    if let Some(path) = out {
        let report = ModelReport::new(&curve.metric, &curve.dataset_label, &model);
        fs::write(path, serde_json::to_string_pretty(&report)? + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
        let mut manifest = RunManifest::new(None);
        manifest.record_input(curves_path, &bytes);
        manifest.write_beside(path)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_maxci(sweep: &str, mos: f64, level: f64, out: Option<&Path>) -> anyhow::Result<ExitCode> {
    let ns = parse_sweep(sweep)?;
    let mut text = String::from("n,mos,level,max_ci_width\n");
    for n in ns {
        let w = max_ci_width(mos, u64::from(n), level)?;
        text.push_str(&format!(
            "{n},{},{},{}\n",
            fmt_sig6(mos),
            fmt_sig6(level),
            fmt_sig6(w)
        ));
    }
    match out {
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?;
            RunManifest::new(None).write_beside(path)?;
        }
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| anyhow!("cannot write to stdout: {e}"))?,
    }
    Ok(ExitCode::SUCCESS)
}
