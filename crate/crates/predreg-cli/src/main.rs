//! `predreg` — damped predictive-regression pipeline over delimited market
//! data: summary statistics, unit-root diagnostics, in-sample estimation,
//! recursive out-of-sample forecasting, RMSE evaluation, and seeded synthetic
//! data utilities.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use predreg::{
    adf_test, appendix_moment_check, compare_models, fit_model, recursive_forecast, summarize,
    Deterministic, Error, ExactModelCoefficients, ForecastRun, Frequency, Generated,
    GeneratorKind, GeneratorSpec, ModelSpec, ObservationTable, PredictorPanel, Result,
};

use config::{
    default_horizon, default_insample_size, default_levels, default_models, load_schema,
    FileConfig, ResolvedConfig, OUT_DIR_ENV,
};
use output::{fmt_fixed, fmt_opt, write_artifact, write_manifest, Table, GRID_DECIMALS, STAT_DECIMALS};

/// Every named model family is built around four return lags; panels are
/// always aligned to this depth so all models see identical samples and the
/// window arithmetic matches across commands.
const PANEL_RETURN_LAGS: usize = 4;

#[derive(Parser)]
#[command(
    name = "predreg",
    version,
    about = "Damped multivariate predictive regression for stock returns"
)]
struct Cli {
    /// JSON config file supplying defaults for any flag
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory for artifacts (default: $PREDREG_OUT, else ".")
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Seed for randomized commands; recorded in the run manifest
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summary moments and lag-1 autocorrelation of the derived series
    Summarize(DataArgs),
    /// ADF unit-root tests on the derived series
    Adf(AdfArgs),
    /// In-sample estimation of one model with t and F inference
    Fit(FitArgs),
    /// Recursive out-of-sample forecast grid for one model
    Forecast(ForecastArgs),
    /// Forecast every requested model and compare RMSE
    Evaluate(EvaluateArgs),
    /// Monte Carlo check of the damped second-moment law
    MomentCheck(MomentCheckArgs),
    /// Generate synthetic series or observation tables
    Simulate(SimulateArgs),
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Input CSV with a header row
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,

    /// JSON file mapping column roles to header names
    #[arg(long, value_name = "FILE")]
    schema: Option<PathBuf>,

    /// Data frequency: quarterly | monthly
    #[arg(long)]
    frequency: Option<String>,
}

#[derive(Args)]
struct AdfArgs {
    #[command(flatten)]
    data: DataArgs,

    /// Deterministic terms: none | constant | constant+trend
    #[arg(long, default_value = "constant")]
    deterministic: String,

    /// Lag order for the augmented regression (default: floor(12(n/100)^.25))
    #[arg(long)]
    lags: Option<usize>,

    /// Significance level, repeatable
    #[arg(long = "level", value_name = "LEVEL")]
    levels: Vec<f64>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,

    /// Model name (default: model-1-1 quarterly, model-2-1 monthly)
    #[arg(long)]
    model: Option<String>,

    /// Add a standalone intercept column (the models carry none by default)
    #[arg(long)]
    intercept: bool,
}

#[derive(Args)]
struct ForecastArgs {
    #[command(flatten)]
    data: DataArgs,

    /// Model name (default: model-1-1 quarterly, model-2-1 monthly)
    #[arg(long)]
    model: Option<String>,

    /// Initial in-sample size in table rows (default: 200 quarterly, 948 monthly)
    #[arg(long = "insample-size")]
    insample_size: Option<usize>,

    /// Maximum forecast horizon (default: 4 quarterly, 12 monthly)
    #[arg(long)]
    horizon: Option<usize>,

    /// Add a standalone intercept column (the models carry none by default)
    #[arg(long)]
    intercept: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,

    /// Model name, repeatable (default: the full family for the frequency)
    #[arg(long = "model", value_name = "NAME")]
    models: Vec<String>,

    /// Initial in-sample size in table rows
    #[arg(long = "insample-size")]
    insample_size: Option<usize>,

    /// Maximum forecast horizon
    #[arg(long)]
    horizon: Option<usize>,

    /// Add a standalone intercept column (the models carry none by default)
    #[arg(long)]
    intercept: bool,
}

#[derive(Args)]
struct MomentCheckArgs {
    /// Horizon t, repeatable (default: 1 5 10 50)
    #[arg(long = "horizon", value_name = "T")]
    horizons: Vec<usize>,

    /// Monte Carlo path count (default: 100000)
    #[arg(long)]
    paths: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Generator: exact-linear | random-walk | ar1 | iid-normal
    #[arg(long)]
    kind: String,

    /// Output length: table rows for exact-linear, series length otherwise
    #[arg(long, default_value_t = 271)]
    length: usize,

    /// Innovation standard deviation
    #[arg(long = "noise-std", default_value_t = 0.02)]
    noise_std: f64,

    /// AR(1) coefficient (ar1 kind only)
    #[arg(long, default_value_t = 0.9)]
    phi: f64,

    /// Period labels for generated tables: quarterly | monthly
    #[arg(long, default_value = "quarterly")]
    frequency: String,
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`predreg ... | head`) like other
    // line-oriented tools instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let out = resolve_out(&cli, &file);
    let seed = cli.seed.or(file.seed).unwrap_or(42);
    match &cli.command {
        Command::Summarize(args) => cmd_summarize(args, &file, &out, seed),
        Command::Adf(args) => cmd_adf(args, &file, &out, seed),
        Command::Fit(args) => cmd_fit(args, &file, &out, seed),
        Command::Forecast(args) => cmd_forecast(args, &file, &out, seed),
        Command::Evaluate(args) => cmd_evaluate(args, &file, &out, seed),
        Command::MomentCheck(args) => cmd_moment_check(args, &file, &out, seed),
        Command::Simulate(args) => cmd_simulate(args, &out, seed),
    }
}

fn resolve_out(cli: &Cli, file: &FileConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| file.out.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

struct LoadedData {
    table: ObservationTable,
    input: PathBuf,
    schema: Option<PathBuf>,
    frequency: Frequency,
}

fn load_data(args: &DataArgs, file: &FileConfig) -> Result<LoadedData> {
    let input = args
        .input
        .clone()
        .or_else(|| file.input.clone())
        .ok_or_else(|| Error::Config("no input file given (use --input)".into()))?;
    let schema_path = args.schema.clone().or_else(|| file.schema.clone());
    let frequency: Frequency = args
        .frequency
        .clone()
        .or_else(|| file.frequency.clone())
        .unwrap_or_else(|| "quarterly".into())
        .parse()?;
    let schema = load_schema(schema_path.as_deref())?;
    let table = ObservationTable::from_csv(&input, &schema, frequency)?;
    Ok(LoadedData {
        table,
        input,
        schema: schema_path,
        frequency,
    })
}

/// The four derived series reported in the summary and ADF tables.
fn derived_series(table: &ObservationTable) -> Result<Vec<(&'static str, Vec<f64>)>> {
    Ok(vec![
        ("DY", table.dividend_yield()?),
        ("EP", table.earnings_price()?),
        ("Bm", table.book_to_market().to_vec()),
        ("SR", table.stock_return()?),
    ])
}

fn default_model_name(frequency: Frequency) -> &'static str {
    match frequency {
        Frequency::Quarterly => "model-1-1",
        Frequency::Monthly => "model-2-1",
    }
}

fn cmd_summarize(args: &DataArgs, file: &FileConfig, out: &Path, seed: u64) -> Result<()> {
    let data = load_data(args, file)?;
    println!(
        "{} rows, {} data, cay {}",
        data.table.len(),
        data.frequency,
        if data.table.has_cay() { "present" } else { "absent" }
    );

    let mut series = derived_series(&data.table)?;
    if let Some(cay) = data.table.cay() {
        series.insert(3, ("cay", cay.to_vec()));
    }

    let mut table = Table::new(vec![
        "variable",
        "mean",
        "std_dev",
        "skewness",
        "kurtosis",
        "lag1_autocorr",
    ]);
    for (name, values) in &series {
        let stats = summarize(values)?;
        table.push_row(vec![
            name.to_string(),
            fmt_fixed(stats.mean, STAT_DECIMALS),
            fmt_fixed(stats.std_dev, STAT_DECIMALS),
            fmt_opt(stats.skewness, STAT_DECIMALS),
            fmt_opt(stats.kurtosis, STAT_DECIMALS),
            fmt_opt(stats.lag1_autocorr, STAT_DECIMALS),
        ]);
    }
    print!("{}", table.render());
    let path = write_artifact(out, "summary.csv", &table.to_csv())?;
    println!("wrote {}", path.display());

    let mut manifest = ResolvedConfig::new("summarize", seed, out.to_path_buf());
    manifest.input = Some(data.input);
    manifest.schema = data.schema;
    manifest.frequency = Some(data.frequency.as_str().into());
    write_manifest(&manifest)?;
    Ok(())
}

fn cmd_adf(args: &AdfArgs, file: &FileConfig, out: &Path, seed: u64) -> Result<()> {
    let data = load_data(&args.data, file)?;
    let deterministic: Deterministic = args.deterministic.parse()?;
    let levels = if args.levels.is_empty() {
        file.levels.clone().unwrap_or_else(default_levels)
    } else {
        args.levels.clone()
    };
    for &level in &levels {
        if !(0.0 < level && level < 1.0) {
            return Err(Error::Config(format!(
                "significance level must be in (0,1), got {level}"
            )));
        }
    }

    let mut headers = vec![
        "variable".to_string(),
        "statistic".to_string(),
        "p_value".to_string(),
        "lag_order".to_string(),
    ];
    for level in &levels {
        headers.push(format!("reject_at_{level}"));
    }
    let mut table = Table::new(headers);
    for (name, values) in derived_series(&data.table)? {
        let res = adf_test(&values, deterministic, args.lags, &levels)?;
        let mut row = vec![
            name.to_string(),
            fmt_fixed(res.t_stat, STAT_DECIMALS),
            fmt_fixed(res.p_value, STAT_DECIMALS),
            res.lag_order.to_string(),
        ];
        for d in &res.reject_at {
            row.push(if d.reject { "yes".into() } else { "no".into() });
        }
        table.push_row(row);
    }
    println!("ADF test, deterministic mode: {}", deterministic.as_str());
    print!("{}", table.render());
    let path = write_artifact(out, "adf.csv", &table.to_csv())?;
    println!("wrote {}", path.display());

    let mut manifest = ResolvedConfig::new("adf", seed, out.to_path_buf());
    manifest.input = Some(data.input);
    manifest.schema = data.schema;
    manifest.frequency = Some(data.frequency.as_str().into());
    manifest.levels = Some(levels);
    manifest.lag_order = args.lags;
    manifest.deterministic = Some(deterministic.as_str().into());
    write_manifest(&manifest)?;
    Ok(())
}

fn build_panel(table: &ObservationTable) -> Result<PredictorPanel> {
    table.build_panel(PANEL_RETURN_LAGS)
}

fn cmd_fit(args: &FitArgs, file: &FileConfig, out: &Path, seed: u64) -> Result<()> {
    let data = load_data(&args.data, file)?;
    let model_name = args
        .model
        .clone()
        .or_else(|| file.models.as_ref().and_then(|m| m.first().cloned()))
        .unwrap_or_else(|| default_model_name(data.frequency).to_string());
    let spec = ModelSpec::named(&model_name)?.with_intercept(args.intercept);
    let panel = build_panel(&data.table)?;
    let fit = fit_model(&panel, &spec)?;

    let mut table = Table::new(vec!["coefficient", "estimate", "std_error", "t_value", "p_value"]);
    for (i, label) in fit.labels().iter().enumerate() {
        table.push_row(vec![
            label.clone(),
            fmt_fixed(fit.coefficient(i), STAT_DECIMALS),
            fmt_fixed(fit.std_error(i), STAT_DECIMALS),
            fmt_fixed(fit.t_stats()[i], STAT_DECIMALS),
            fmt_fixed(fit.p_values()[i], STAT_DECIMALS),
        ]);
    }
    println!(
        "{model_name} on {} usable observations ({} data)",
        fit.n_observations(),
        data.frequency
    );
    print!("{}", table.render());
    println!("Adjusted R-squared: {}", fmt_opt(fit.adjusted_r2(), STAT_DECIMALS));
    println!(
        "F-statistic: {} (p-value: {})",
        fmt_fixed(fit.f_stat(), STAT_DECIMALS),
        fmt_fixed(fit.f_p_value(), STAT_DECIMALS)
    );
    let path = write_artifact(out, &format!("fit_{model_name}.csv"), &table.to_csv())?;
    println!("wrote {}", path.display());

    let mut manifest = ResolvedConfig::new("fit", seed, out.to_path_buf());
    manifest.input = Some(data.input);
    manifest.schema = data.schema;
    manifest.frequency = Some(data.frequency.as_str().into());
    manifest.models = Some(vec![model_name]);
    write_manifest(&manifest)?;
    Ok(())
}

fn forecast_grid_table(run: &ForecastRun) -> Table {
    let mut table = Table::new(vec![
        "model",
        "window",
        "horizon",
        "target_period",
        "predicted",
        "realized",
    ]);
    for rec in &run.records {
        table.push_row(vec![
            run.model.clone(),
            rec.window.to_string(),
            rec.horizon.to_string(),
            rec.period.clone(),
            fmt_fixed(rec.predicted, GRID_DECIMALS),
            fmt_opt(rec.realized, GRID_DECIMALS),
        ]);
    }
    table
}

fn cmd_forecast(args: &ForecastArgs, file: &FileConfig, out: &Path, seed: u64) -> Result<()> {
    let data = load_data(&args.data, file)?;
    let model_name = args
        .model
        .clone()
        .or_else(|| file.models.as_ref().and_then(|m| m.first().cloned()))
        .unwrap_or_else(|| default_model_name(data.frequency).to_string());
    let spec = ModelSpec::named(&model_name)?.with_intercept(args.intercept);
    let insample = args
        .insample_size
        .or(file.insample_size)
        .unwrap_or_else(|| default_insample_size(data.frequency));
    let horizon = args
        .horizon
        .or(file.horizon)
        .unwrap_or_else(|| default_horizon(data.frequency));

    let panel = build_panel(&data.table)?;
    let run = recursive_forecast(&panel, &spec, &model_name, insample, horizon)?;
    println!(
        "{model_name}: {} windows x {} horizons = {} forecasts (initial size {insample})",
        run.window_count,
        run.h_max,
        run.records.len()
    );
    let table = forecast_grid_table(&run);
    let path = write_artifact(out, &format!("forecast_{model_name}.csv"), &table.to_csv())?;
    println!("wrote {}", path.display());

    let mut manifest = ResolvedConfig::new("forecast", seed, out.to_path_buf());
    manifest.input = Some(data.input);
    manifest.schema = data.schema;
    manifest.frequency = Some(data.frequency.as_str().into());
    manifest.models = Some(vec![model_name]);
    manifest.insample_size = Some(insample);
    manifest.horizon = Some(horizon);
    write_manifest(&manifest)?;
    Ok(())
}

fn cmd_evaluate(args: &EvaluateArgs, file: &FileConfig, out: &Path, seed: u64) -> Result<()> {
    let data = load_data(&args.data, file)?;
    let models = if args.models.is_empty() {
        file.models
            .clone()
            .unwrap_or_else(|| default_models(data.frequency))
    } else {
        args.models.clone()
    };
    let insample = args
        .insample_size
        .or(file.insample_size)
        .unwrap_or_else(|| default_insample_size(data.frequency));
    let horizon = args
        .horizon
        .or(file.horizon)
        .unwrap_or_else(|| default_horizon(data.frequency));

    let panel = build_panel(&data.table)?;
    let mut runs = Vec::with_capacity(models.len());
    for name in &models {
        let spec = ModelSpec::named(name)?.with_intercept(args.intercept);
        let run = recursive_forecast(&panel, &spec, name, insample, horizon)?;
        let grid = forecast_grid_table(&run);
        write_artifact(out, &format!("forecast_{name}.csv"), &grid.to_csv())?;
        runs.push(run);
    }
    let report = compare_models(&runs)?;

    let mut headers = vec!["model".to_string()];
    for j in 1..=report.h_max {
        headers.push(format!("rmse_h{j}"));
    }
    headers.push("rmse_pooled".to_string());
    let mut table = Table::new(headers);
    // Mark the minimum of each column; the pooled winner is the headline.
    let minima: Vec<Option<usize>> = (1..=report.h_max)
        .map(|j| report.min_at_horizon(j))
        .collect();
    let min_pooled = report.min_pooled();
    for (i, row) in report.rows.iter().enumerate() {
        let mut cells = vec![row.model.clone()];
        for (jm, value) in row.per_horizon.iter().enumerate() {
            let mark = if minima[jm] == Some(i) { "*" } else { "" };
            cells.push(format!("{}{mark}", fmt_fixed(*value, STAT_DECIMALS)));
        }
        let mark = if min_pooled == Some(i) { "*" } else { "" };
        cells.push(format!("{}{mark}", fmt_fixed(row.pooled, STAT_DECIMALS)));
        table.push_row(cells);
    }
    println!(
        "RMSE over {} windows, horizons 1..{} (initial size {insample}); * marks the column minimum",
        runs[0].window_count, report.h_max
    );
    print!("{}", table.render());
    if let Some(i) = min_pooled {
        println!("lowest pooled RMSE: {}", report.rows[i].model);
    }
    let path = write_artifact(out, "rmse.csv", &table.to_csv())?;
    println!("wrote {}", path.display());

    let mut manifest = ResolvedConfig::new("evaluate", seed, out.to_path_buf());
    manifest.input = Some(data.input);
    manifest.schema = data.schema;
    manifest.frequency = Some(data.frequency.as_str().into());
    manifest.models = Some(models);
    manifest.insample_size = Some(insample);
    manifest.horizon = Some(horizon);
    write_manifest(&manifest)?;
    Ok(())
}

fn cmd_moment_check(args: &MomentCheckArgs, file: &FileConfig, out: &Path, seed: u64) -> Result<()> {
    let horizons = if args.horizons.is_empty() {
        vec![1, 5, 10, 50]
    } else {
        args.horizons.clone()
    };
    let paths = args.paths.or(file.paths).unwrap_or(100_000);
    let report = appendix_moment_check(&horizons, paths, seed)?;
    let mut table = Table::new(vec!["horizon", "estimate", "std_error", "theory", "z_score"]);
    for row in &report.rows {
        table.push_row(vec![
            row.horizon.to_string(),
            fmt_fixed(row.estimate, STAT_DECIMALS),
            fmt_fixed(row.std_error, STAT_DECIMALS),
            fmt_fixed(row.theory, STAT_DECIMALS),
            fmt_fixed(row.z_score, STAT_DECIMALS),
        ]);
    }
    println!("{} paths, seed {}", report.paths, report.seed);
    print!("{}", table.render());
    let path = write_artifact(out, "moment_check.csv", &table.to_csv())?;
    println!("wrote {}", path.display());

    let mut manifest = ResolvedConfig::new("moment-check", seed, out.to_path_buf());
    manifest.horizons = Some(horizons);
    manifest.paths = Some(paths);
    write_manifest(&manifest)?;
    Ok(())
}

/// Serialize a table in the same delimited schema `load_observations` reads.
fn table_csv(table: &ObservationTable) -> String {
    let mut out = String::new();
    out.push_str("date,price,dividends,earnings,bm");
    if table.has_cay() {
        out.push_str(",cay");
    }
    out.push('\n');
    for i in 0..table.len() {
        out.push_str(table.periods()[i].label());
        for value in [
            table.price()[i],
            table.dividends()[i],
            table.earnings()[i],
            table.book_to_market()[i],
        ] {
            out.push(',');
            out.push_str(&fmt_fixed(value, GRID_DECIMALS));
        }
        if let Some(cay) = table.cay() {
            out.push(',');
            out.push_str(&fmt_fixed(cay[i], GRID_DECIMALS));
        }
        out.push('\n');
    }
    out
}

fn cmd_simulate(args: &SimulateArgs, out: &Path, seed: u64) -> Result<()> {
    let kind = match args.kind.as_str() {
        "exact-linear" => GeneratorKind::ExactLinearModel {
            coefficients: ExactModelCoefficients::reference(),
        },
        "random-walk" => GeneratorKind::RandomWalk,
        "ar1" => GeneratorKind::Ar1 { phi: args.phi },
        "iid-normal" => GeneratorKind::IidNormal,
        other => {
            return Err(Error::Config(format!(
                "unknown generator '{other}' (expected exact-linear|random-walk|ar1|iid-normal)"
            )))
        }
    };
    let frequency: Frequency = args.frequency.parse()?;
    let spec = GeneratorSpec {
        kind,
        length: args.length,
        noise_std: args.noise_std,
        seed,
        frequency,
    };
    let (path, rows) = generate_artifact(&spec, out)?;
    println!("generated {rows} rows (seed {seed})");
    println!("wrote {}", path.display());

    let mut manifest = ResolvedConfig::new("simulate", seed, out.to_path_buf());
    manifest.kind = Some(args.kind.clone());
    manifest.length = Some(args.length);
    manifest.noise_std = Some(args.noise_std);
    manifest.frequency = Some(frequency.as_str().into());
    if args.kind == "ar1" {
        manifest.phi = Some(args.phi);
    }
    write_manifest(&manifest)?;
    Ok(())
}

fn generate_artifact(spec: &GeneratorSpec, out: &Path) -> Result<(PathBuf, usize)> {
    match predreg::generate(spec)? {
        Generated::Table(table) => {
            let rows = table.len();
            let path = write_artifact(out, "simulated.csv", &table_csv(&table))?;
            Ok((path, rows))
        }
        Generated::Series(series) => {
            let mut csv = String::from("period,value\n");
            for (i, v) in series.iter().enumerate() {
                csv.push_str(&format!("{},{}\n", i + 1, fmt_fixed(*v, GRID_DECIMALS)));
            }
            let rows = series.len();
            let path = write_artifact(out, "simulated_series.csv", &csv)?;
            Ok((path, rows))
        }
    }
}
