//! `trf`: command-line front end for the theory, simulation, targeting and
//! forecasting labs.
//!
//! Every subcommand resolves its settings from flags, then an optional JSON
//! config file, then built-in defaults, and echoes the result as JSON on
//! stderr (and to `config.json` when an output directory is set).

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use trf_core::cart::{Mtry, TreeConfig};
use trf_core::datacore::{expanding_windows, load_csv_with_time, Dataset};
use trf_core::evallab::{dm_test, fit_method, mse_ratio, run_forecast_experiment, tree_diagnostics, Method};
use trf_core::forest::ForestConfig;
use trf_core::simlab::{load_grid, sweep, write_sweep_csv, DEFAULT_REPS};
use trf_core::targeting::{select_targets, ExpansionMode};
use trf_core::theory::{
    bounds_curve, cstar_numeric, mse_bounds_ordinary, mse_targeted, upper_bound_split_prob, write_bounds_curve_csv,
    Regression1D,
};

#[derive(Parser, Debug)]
#[command(name = "trf", version, about = "Random forests with LASSO-targeted predictors")]
struct Cli {
    /// Master seed; required by every stochastic subcommand.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for output files (stdout when unset).
    #[arg(long, global = true, env = "TRF_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON object of settings; flags take precedence over its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form and numerical theory quantities.
    #[command(subcommand)]
    Theory(TheoryCmd),
    /// Monte Carlo experiments.
    #[command(subcommand)]
    Sim(SimCmd),
    /// Select s' predictors with the LASSO.
    Targets(TargetsArgs),
    /// Fit a forest (targeted when --sprime is given).
    Fit(FitArgs),
    /// Expanding-window forecast comparison.
    Forecast(ForecastArgs),
    /// Tree strength and correlation over a grid of s'.
    Diagnose(DiagnoseArgs),
}

#[derive(Subcommand, Debug)]
enum TheoryCmd {
    /// Upper bound on the probability of drawing a strong direction.
    Bounds(BoundsArgs),
    /// Maximal signal of a one-dimensional regression function.
    Cstar(CstarArgs),
    /// Targeted-tree MSE, or the ordinary-tree bounds when --rho is given.
    Mse(MseArgs),
    /// Bounds and targeted MSE over leaf counts and a rho grid.
    Curve(CurveArgs),
}

#[derive(Subcommand, Debug)]
enum SimCmd {
    /// Split-probability sweep over a grid file.
    Rho(RhoArgs),
}

#[derive(Args, Debug, Serialize, Deserialize)]
struct BoundsArgs {
    #[arg(long)]
    a: Option<u64>,
    #[arg(long)]
    s: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    /// Decimals for plain output.
    #[arg(long)]
    digits: Option<usize>,
}

#[derive(Args, Debug, Serialize, Deserialize)]
struct CstarArgs {
    /// linear, quadratic, piecewise15 or sine:<alpha> (e.g. sine:16pi).
    #[arg(long)]
    dgp: Option<String>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    digits: Option<usize>,
}

#[derive(Args, Debug, Serialize, Deserialize)]
struct MseArgs {
    /// Number of leaves.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    leaves: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    #[arg(long)]
    digits: Option<usize>,
}

#[derive(Args, Debug, Serialize, Deserialize)]
struct CurveArgs {
    /// Comma-separated leaf counts.
    #[arg(long)]
    leaves: Option<String>,
    /// Number of equally spaced rho values in [0, 1].
    #[arg(long)]
    rho_points: Option<usize>,
    #[arg(long)]
    beta1: Option<f64>,
}

#[derive(Args, Debug, Serialize, Deserialize)]
struct RhoArgs {
    /// CSV with columns kind, alpha, p, n, snr.
    #[arg(long)]
    grid_file: Option<PathBuf>,
    #[arg(long)]
    reps: Option<usize>,
}

#[derive(Args, Debug, Serialize, Deserialize)]
struct DataArgs {
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    response: Option<String>,
    /// Non-numeric column to keep as the time index.
    #[arg(long)]
    time_column: Option<String>,
}

#[derive(Args, Debug, Serialize, Deserialize)]
struct ForestArgs {
    #[arg(long)]
    trees: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    /// third, all, a count, or a fraction in (0, 1).
    #[arg(long)]
    mtry: Option<String>,
    #[arg(long)]
    min_leaf: Option<usize>,
}

#[derive(Args, Debug, Serialize, Deserialize)]
struct TargetsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    data: DataArgs,
    #[arg(long)]
    sprime: Option<usize>,
    /// none, powers23 or interactions.
    #[arg(long)]
    expand: Option<String>,
}

#[derive(Args, Debug, Serialize, Deserialize)]
struct FitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    data: DataArgs,
    #[arg(long)]
    sprime: Option<usize>,
    #[arg(long)]
    expand: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    forest: ForestArgs,
}

#[derive(Args, Debug, Serialize, Deserialize)]
struct ForecastArgs {
    #[command(flatten)]
    #[serde(flatten)]
    data: DataArgs,
    /// Forecast horizon.
    #[arg(long)]
    h: Option<usize>,
    /// Length of the first training window.
    #[arg(long)]
    initial: Option<usize>,
    /// Comma-separated methods: rf, trf:<s'>, trf:<s'>:powers23, trf:<s'>:interactions.
    #[arg(long)]
    methods: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    forest: ForestArgs,
}

#[derive(Args, Debug, Serialize, Deserialize)]
struct DiagnoseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    data: DataArgs,
    /// Comma-separated s' values.
    #[arg(long)]
    sprime_grid: Option<String>,
    /// Rows used for training; the rest form the test set (default: half).
    #[arg(long)]
    train_rows: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    forest: ForestArgs,
}

#[derive(Debug, Serialize, Deserialize)]
struct Globals {
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    format: Option<Format>,
    threads: Option<usize>,
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<trf_core::Error> for Failure {
    fn from(e: trf_core::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Flags first, then config-file keys, then `defaults`.
fn resolve<T: Serialize + DeserializeOwned>(flags: &T, file: &Map<String, Value>, defaults: Value) -> Outcome<(T, Value)> {
    let mut merged = serde_json::to_value(flags).map_err(|e| Failure::Runtime(e.into()))?;
    let defaults = match defaults {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    if let Value::Object(m) = &mut merged {
        for (key, value) in m.iter_mut() {
            if value.is_null() {
                if let Some(v) = file.get(key).or_else(|| defaults.get(key)) {
                    *value = v.clone();
                }
            }
        }
    }
    let typed = serde_json::from_value(merged.clone()).map_err(|e| usage(format!("invalid setting: {e}")))?;
    Ok((typed, merged))
}

fn required<T: Clone>(value: &Option<T>, name: &str) -> Outcome<T> {
    value.clone().ok_or_else(|| usage(format!("missing required setting --{name}")))
}

fn load_config(path: Option<&Path>) -> Outcome<Map<String, Value>> {
    let Some(path) = path else { return Ok(Map::new()) };
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(usage(format!("config {} is not a JSON object", path.display()))),
        Err(e) => Err(usage(format!("config {}: {e}", path.display()))),
    }
}

struct Ctx {
    globals: Globals,
    file: Map<String, Value>,
}

impl Ctx {
    fn format(&self) -> Format {
        self.globals.format.unwrap_or(Format::Csv)
    }

    fn seed(&self) -> Outcome<u64> {
        self.globals.seed.ok_or_else(|| usage("this subcommand is stochastic; pass --seed"))
    }

    /// Prints the resolved settings and records them next to the outputs.
    fn echo(&self, command: &str, settings: &Value) -> Outcome<()> {
        let resolved = json!({
            "command": command,
            "seed": self.globals.seed,
            "out_dir": self.globals.out_dir,
            "format": self.format(),
            "threads": self.globals.threads,
            "settings": settings,
        });
        let text = serde_json::to_string(&resolved).map_err(|e| Failure::Runtime(e.into()))?;
        eprintln!("{text}");
        if let Some(dir) = &self.globals.out_dir {
            write_file(dir, "config.json", format!("{text}\n").as_bytes())?;
        }
        Ok(())
    }

    /// Writes to `<out_dir>/<name>` or, without an output directory, stdout.
    fn emit(&self, name: &str, bytes: &[u8]) -> Outcome<()> {
        match &self.globals.out_dir {
            Some(dir) => write_file(dir, name, bytes),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(bytes).context("writing to stdout")?;
                Ok(())
            }
        }
    }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Outcome<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn run(cli: Cli) -> Outcome<()> {
    let file = load_config(cli.config.as_deref())?;
    let flags = Globals { seed: cli.seed, out_dir: cli.out_dir, format: cli.format, threads: cli.threads };
    let (globals, _) = resolve(&flags, &file, json!({}))?;
    if let Some(n) = globals.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let ctx = Ctx { globals, file };
    match cli.command {
        Command::Theory(TheoryCmd::Bounds(a)) => theory_bounds(&ctx, &a),
        Command::Theory(TheoryCmd::Cstar(a)) => theory_cstar(&ctx, &a),
        Command::Theory(TheoryCmd::Mse(a)) => theory_mse(&ctx, &a),
        Command::Theory(TheoryCmd::Curve(a)) => theory_curve(&ctx, &a),
        Command::Sim(SimCmd::Rho(a)) => sim_rho(&ctx, &a),
        Command::Targets(a) => targets(&ctx, &a),
        Command::Fit(a) => fit(&ctx, &a),
        Command::Forecast(a) => forecast(&ctx, &a),
        Command::Diagnose(a) => diagnose(&ctx, &a),
    }
}

fn to_json<T: Serialize>(value: &T) -> Outcome<Vec<u8>> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.into()))?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn scalar(ctx: &Ctx, value: f64, digits: usize, record: Value) -> Outcome<()> {
    match ctx.format() {
        Format::Csv => ctx.emit("result.txt", format!("{value:.digits$}\n").as_bytes()),
        Format::Json => ctx.emit("result.json", &to_json(&record)?),
    }
}

fn theory_bounds(ctx: &Ctx, flags: &BoundsArgs) -> Outcome<()> {
    let (args, settings) = resolve(flags, &ctx.file, json!({ "digits": 3 }))?;
    ctx.echo("theory bounds", &settings)?;
    let (a, s, m) = (required(&args.a, "a")?, required(&args.s, "s")?, required(&args.m, "m")?);
    let bound = upper_bound_split_prob(a, s, m)?;
    scalar(ctx, bound, args.digits.unwrap_or(3), json!({ "a": a, "s": s, "m": m, "bound": bound }))
}

fn parse_dgp(text: &str) -> Outcome<Regression1D> {
    let bad = || usage(format!("unknown dgp `{text}`; expected linear, quadratic, piecewise15 or sine:<alpha>"));
    match text {
        "linear" => Ok(Regression1D::Linear),
        "quadratic" => Ok(Regression1D::Quadratic),
        "piecewise15" => Ok(Regression1D::Piecewise15),
        _ => {
            let alpha = text.strip_prefix("sine:").ok_or_else(bad)?;
            let value = match alpha.strip_suffix("pi") {
                Some(k) => k.parse::<f64>().map(|k| k * PI),
                None => alpha.parse::<f64>(),
            }
            .map_err(|_| bad())?;
            Ok(Regression1D::Sine { alpha: value })
        }
    }
}

fn theory_cstar(ctx: &Ctx, flags: &CstarArgs) -> Outcome<()> {
    let (args, settings) = resolve(flags, &ctx.file, json!({ "grid": 10_000, "digits": 4 }))?;
    ctx.echo("theory cstar", &settings)?;
    let dgp = parse_dgp(&required(&args.dgp, "dgp")?)?;
    let res = cstar_numeric(&dgp, args.grid.unwrap_or(10_000))?;
    scalar(
        ctx,
        res.value,
        args.digits.unwrap_or(4),
        json!({ "dgp": dgp, "cstar": res.value, "argmax": res.argmax }),
    )
}

fn theory_mse(ctx: &Ctx, flags: &MseArgs) -> Outcome<()> {
    let (args, settings) = resolve(flags, &ctx.file, json!({ "beta1": 12f64.sqrt(), "digits": 3 }))?;
    ctx.echo("theory mse", &settings)?;
    let leaves = required(&args.leaves, "L")?;
    let beta1 = args.beta1.unwrap_or(12f64.sqrt());
    let digits = args.digits.unwrap_or(3);
    let targeted = mse_targeted(leaves as u64, beta1)?;
    let Some(rho) = args.rho else {
        return scalar(ctx, targeted, digits, json!({ "L": leaves, "beta1": beta1, "targeted": targeted }));
    };
    let b = mse_bounds_ordinary(leaves, rho, beta1)?;
    match ctx.format() {
        Format::Csv => ctx.emit(
            "result.csv",
            format!("targeted,upper,lower\n{targeted:.digits$},{:.digits$},{:.digits$}\n", b.upper, b.lower).as_bytes(),
        ),
        Format::Json => ctx.emit(
            "result.json",
            &to_json(&json!({ "L": leaves, "rho": rho, "beta1": beta1,
                "targeted": targeted, "upper": b.upper, "lower": b.lower }))?,
        ),
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, name: &str) -> Outcome<Vec<T>> {
    let items: Vec<T> = text
        .split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| usage(format!("bad value `{s}` in --{name}"))))
        .collect::<Outcome<_>>()?;
    if items.is_empty() {
        return Err(usage(format!("--{name} is empty")));
    }
    Ok(items)
}

fn theory_curve(ctx: &Ctx, flags: &CurveArgs) -> Outcome<()> {
    let (args, settings) = resolve(
        flags,
        &ctx.file,
        json!({ "leaves": "2,4,8,16,32", "rho_points": 11, "beta1": 12f64.sqrt() }),
    )?;
    ctx.echo("theory curve", &settings)?;
    let leaves: Vec<usize> = parse_list(&required(&args.leaves, "leaves")?, "leaves")?;
    let k = required(&args.rho_points, "rho-points")?;
    if k < 2 {
        return Err(usage("--rho-points must be at least 2"));
    }
    let grid: Vec<f64> = (0..k).map(|i| i as f64 / (k - 1) as f64).collect();
    let rows = bounds_curve(&leaves, &grid, required(&args.beta1, "beta1")?)?;
    match ctx.format() {
        Format::Csv => {
            let mut buf = Vec::new();
            write_bounds_curve_csv(&rows, &mut buf)?;
            ctx.emit("bounds_curve.csv", &buf)
        }
        Format::Json => ctx.emit("bounds_curve.json", &to_json(&rows)?),
    }
}

fn sim_rho(ctx: &Ctx, flags: &RhoArgs) -> Outcome<()> {
    let (args, settings) = resolve(flags, &ctx.file, json!({ "reps": DEFAULT_REPS }))?;
    let seed = ctx.seed()?;
    let path = required(&args.grid_file, "grid-file")?;
    ctx.echo("sim rho", &settings)?;
    let grid = load_grid(&path)?;
    let rows = sweep(&grid, required(&args.reps, "reps")?, seed)?;
    match ctx.format() {
        Format::Csv => {
            let mut buf = Vec::new();
            write_sweep_csv(&rows, &mut buf)?;
            ctx.emit("rho.csv", &buf)
        }
        Format::Json => ctx.emit("rho.json", &to_json(&rows)?),
    }
}

fn load_data(args: &DataArgs) -> Outcome<Dataset> {
    let path = required(&args.csv, "csv")?;
    let response = required(&args.response, "response")?;
    let loaded = load_csv_with_time(&path, &response, args.time_column.as_deref())?;
    if loaded.dropped_rows > 0 {
        eprintln!("warning: dropped {} rows with missing or non-numeric cells", loaded.dropped_rows);
    }
    Ok(loaded.dataset)
}

fn parse_expansion(text: Option<&str>) -> Outcome<ExpansionMode> {
    match text.unwrap_or("none") {
        "none" => Ok(ExpansionMode::None),
        "powers23" => Ok(ExpansionMode::Powers23),
        "interactions" => Ok(ExpansionMode::Powers23PlusInteractions),
        other => Err(usage(format!("unknown expansion `{other}`; expected none, powers23 or interactions"))),
    }
}

fn parse_mtry(text: &str) -> Outcome<Mtry> {
    match text {
        "third" => Ok(Mtry::Third),
        "all" => Ok(Mtry::All),
        _ => {
            if let Ok(m) = text.parse::<usize>() {
                return Ok(Mtry::Count(m));
            }
            match text.parse::<f64>() {
                Ok(f) if f > 0.0 && f <= 1.0 => Ok(Mtry::Fraction(f)),
                _ => Err(usage(format!("bad --mtry `{text}`"))),
            }
        }
    }
}

fn forest_defaults() -> Map<String, Value> {
    let d = ForestConfig::default();
    let mut m = Map::new();
    m.insert("trees".into(), json!(d.n_trees));
    m.insert("max_depth".into(), json!(d.tree.max_depth));
    m.insert("mtry".into(), json!("third"));
    m.insert("min_leaf".into(), json!(d.tree.min_samples_leaf));
    m
}

fn with_forest_defaults(extra: Value) -> Value {
    let mut m = forest_defaults();
    if let Value::Object(e) = extra {
        m.extend(e);
    }
    Value::Object(m)
}

fn forest_config(args: &ForestArgs, seed: u64) -> Outcome<ForestConfig> {
    let config = ForestConfig {
        n_trees: required(&args.trees, "trees")?,
        bootstrap: true,
        tree: TreeConfig {
            mtry: parse_mtry(&required(&args.mtry, "mtry")?)?,
            max_depth: args.max_depth,
            min_samples_leaf: required(&args.min_leaf, "min-leaf")?,
            ..TreeConfig::default()
        },
        seed,
    };
    config.tree.validate().map_err(|e| usage(e.to_string()))?;
    if config.n_trees == 0 {
        return Err(usage("--trees must be at least 1"));
    }
    Ok(config)
}

fn targets(ctx: &Ctx, flags: &TargetsArgs) -> Outcome<()> {
    let (args, settings) = resolve(flags, &ctx.file, json!({ "expand": "none" }))?;
    ctx.echo("targets", &settings)?;
    let data = load_data(&args.data)?;
    let sprime = required(&args.sprime, "sprime")?;
    let mode = parse_expansion(args.expand.as_deref())?;
    let (sel, _) = select_targets(&data, sprime, mode)?;
    for w in &sel.warnings {
        eprintln!("warning: {w}");
    }
    match ctx.format() {
        Format::Csv => {
            let mut buf = String::from("index,name,score\n");
            for ((i, name), score) in sel.indices.iter().zip(&sel.names).zip(&sel.scores) {
                buf.push_str(&format!("{i},{name},{score}\n"));
            }
            ctx.emit("targets.csv", buf.as_bytes())
        }
        Format::Json => ctx.emit("targets.json", &to_json(&sel)?),
    }
}

fn fit(ctx: &Ctx, flags: &FitArgs) -> Outcome<()> {
    let (args, settings) = resolve(flags, &ctx.file, with_forest_defaults(json!({ "expand": "none" })))?;
    let seed = ctx.seed()?;
    ctx.echo("fit", &settings)?;
    let data = load_data(&args.data)?;
    let config = forest_config(&args.forest, seed)?;
    let method = match args.sprime {
        None => Method::Rf,
        Some(sprime) => Method::Trf { sprime, expansion: parse_expansion(args.expand.as_deref())? },
    };
    let model = fit_method(&data, method, &config)?;
    let fitted = model.predict_dataset(&data)?;
    if ctx.globals.out_dir.is_some() {
        ctx.emit("model.json", &to_json(&model)?)?;
    }
    match ctx.format() {
        Format::Csv => {
            let mut buf = String::from("row,actual,fitted\n");
            for (i, (y, f)) in data.response().iter().zip(&fitted).enumerate() {
                buf.push_str(&format!("{},{y},{f}\n", i + 1));
            }
            ctx.emit("fitted.csv", buf.as_bytes())
        }
        Format::Json => ctx.emit(
            "fitted.json",
            &to_json(&json!({ "method": method.to_string(), "fitted": fitted }))?,
        ),
    }
}

fn forecast(ctx: &Ctx, flags: &ForecastArgs) -> Outcome<()> {
    let (args, settings) = resolve(flags, &ctx.file, with_forest_defaults(json!({ "h": 1, "methods": "rf" })))?;
    let seed = ctx.seed()?;
    let initial = required(&args.initial, "initial")?;
    ctx.echo("forecast", &settings)?;
    let data = load_data(&args.data)?;
    let methods: Vec<Method> = required(&args.methods, "methods")?
        .split(',')
        .map(|s| s.parse::<Method>().map_err(|e| usage(e.to_string())))
        .collect::<Outcome<_>>()?;
    let h = required(&args.h, "h")?;
    let plan = expanding_windows(data.n_rows(), initial, h)?;
    let config = forest_config(&args.forest, seed)?;
    let report = run_forecast_experiment(&data, &plan, &methods, &config)?;

    let baseline = &report.methods[0];
    let base_errors = report.errors(baseline)?;
    let mut comparisons = Vec::new();
    for m in report.methods.iter().skip(1) {
        let dm = dm_test(&report.errors(m)?, &base_errors, h)?;
        comparisons.push(json!({
            "method": m,
            "baseline": baseline,
            "mse_ratio": mse_ratio(&report, m, baseline, None)?,
            "dm_statistic": dm.statistic,
            "dm_p_value": dm.p_value,
        }));
    }
    let summary = json!({ "horizon": h, "windows": report.n_windows(), "comparisons": comparisons });
    match ctx.format() {
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            ctx.emit("forecasts.csv", &buf)?;
        }
        Format::Json => ctx.emit("forecasts.json", &to_json(&report)?)?,
    }
    match &ctx.globals.out_dir {
        Some(dir) => write_file(dir, "summary.json", &to_json(&summary)?),
        None => {
            eprintln!("{}", serde_json::to_string(&summary).map_err(|e| Failure::Runtime(e.into()))?);
            Ok(())
        }
    }
}

fn diagnose(ctx: &Ctx, flags: &DiagnoseArgs) -> Outcome<()> {
    let (args, settings) = resolve(flags, &ctx.file, with_forest_defaults(json!({})))?;
    let seed = ctx.seed()?;
    let grid: Vec<usize> = parse_list(&required(&args.sprime_grid, "sprime-grid")?, "sprime-grid")?;
    ctx.echo("diagnose", &settings)?;
    let data = load_data(&args.data)?;
    let n = data.n_rows();
    let n_train = args.train_rows.unwrap_or(n / 2);
    if n_train < 2 || n_train >= n {
        return Err(usage(format!("--train-rows {n_train} must leave rows on both sides of {n}")));
    }
    let train: Vec<usize> = (0..n_train).collect();
    let test: Vec<usize> = (n_train..n).collect();
    let config = forest_config(&args.forest, seed)?;
    let curve = tree_diagnostics(&data, &train, &test, &grid, &config)?;
    match ctx.format() {
        Format::Csv => {
            let mut buf = Vec::new();
            curve.write_csv(&mut buf)?;
            ctx.emit("diagnostics.csv", &buf)
        }
        Format::Json => ctx.emit("diagnostics.json", &to_json(&curve)?),
    }
}
