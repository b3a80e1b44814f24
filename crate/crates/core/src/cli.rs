//! Command-line surface: correlate, regress, paper-verify, paper-run, plot.
//!
//! Exit codes: 0 success, 1 analysis error, 2 usage error, 3 consistency-suite
//! failure.

use std::ffi::OsString;
use std::io;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::dataset::{self, CsvLoad, Dataset, DatasetError, LoadOptions, Series};
use crate::descriptive::{self, DescriptiveError};
use crate::inference::{Decision, InferenceError, StatisticKind, TestVerdict};
use crate::ols::{self, OlsError, RegressionModel};
use crate::report::{
    render_correlation_table, render_figure, render_regression_tables, FigureKind, FigureSpec,
    FormatMode, ReportError,
};
use crate::workflow::{
    self, paper_consistency_suite, ConsistencyCheck, PaperFixture, StageArtifact, StageConfig,
    WorkflowError,
};

/// Environment variable naming the default `paper-run` output directory.
pub const OUT_DIR_ENV: &str = "ECOMET_OUT_DIR";

const DEFAULT_OUT_DIR: &str = "ecomet-out";

#[derive(Parser)]
#[command(
    name = "ecomet",
    version,
    about = "Annual time-series econometrics: correlation matrices, OLS with ANOVA, staged model building, report tables, and SVG figures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotKind {
    Scatter,
    Line,
}

#[derive(Subcommand)]
enum Command {
    /// Pearson correlation matrix with two-tailed significance
    Correlate {
        /// CSV file (first column YEAR, remaining columns variables)
        csv: PathBuf,
        /// Comma-separated variable names (at least two)
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
        /// Emit JSON instead of a text table
        #[arg(long, conflicts_with = "text")]
        json: bool,
        /// Emit a text table (the default)
        #[arg(long)]
        text: bool,
        /// Full-precision numbers instead of report-style rounding
        #[arg(long)]
        plain: bool,
    },
    /// Ordinary least squares with ANOVA and hypothesis verdicts
    Regress {
        csv: PathBuf,
        /// Dependent variable
        #[arg(long)]
        dep: String,
        /// Comma-separated predictor names
        #[arg(long, value_delimiter = ',')]
        pred: Vec<String>,
        /// Significance level for the verdicts
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, conflicts_with = "text")]
        json: bool,
        #[arg(long)]
        text: bool,
        #[arg(long)]
        plain: bool,
    },
    /// Run the published-statistics consistency suite (exit 0 iff all pass)
    PaperVerify {
        /// Alternate fixture file (TOML); defaults to the bundled fixture
        #[arg(long)]
        fixture: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Staged analysis over a dataset; writes tables, figures, results.json
    PaperRun {
        csv: PathBuf,
        /// Output directory (default: $ECOMET_OUT_DIR, then ./ecomet-out)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stock index candidates, in tie-break order
        #[arg(long, value_delimiter = ',', default_value = "NYSE,DJ,SP500")]
        indices: Vec<String>,
        #[arg(long, default_value = "CPI-U")]
        price: String,
        #[arg(long, default_value = "TB3")]
        rate: String,
        #[arg(long, default_value = "GPDI")]
        investment: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Render one figure as a standalone SVG
    Plot {
        csv: PathBuf,
        /// X variable (YEAR plots against the year column)
        #[arg(long)]
        x: String,
        /// Y variable
        #[arg(long)]
        y: String,
        #[arg(long, value_enum, default_value_t = PlotKind::Scatter)]
        kind: PlotKind,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        title: Option<String>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Descriptive(#[from] DescriptiveError),
    #[error(transparent)]
    Ols(#[from] OlsError),
    #[error(transparent)]
    Workflow(#[from] WorkflowError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// Parses argv and runs a subcommand, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", variant_tag(&e));
            1
        }
    }
}

/// Leading CamelCase tokens of the error's debug form, e.g.
/// "Dataset/UnknownVariable"; identifies the failing variant in stderr.
fn variant_tag(err: &dyn std::error::Error) -> String {
    let debug = format!("{err:?}");
    let mut tags = Vec::new();
    for token in debug.split(|c: char| !c.is_alphanumeric()) {
        if token.is_empty() {
            continue;
        }
        if token.chars().next().is_some_and(|c| c.is_uppercase()) {
            tags.push(token);
        } else {
            break;
        }
    }
    if tags.is_empty() {
        "Error".to_string()
    } else {
        tags.join("/")
    }
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Correlate {
            csv,
            vars,
            json,
            text: _,
            plain,
        } => correlate(&csv, &vars, json, plain),
        Command::Regress {
            csv,
            dep,
            pred,
            alpha,
            json,
            text: _,
            plain,
        } => regress(&csv, &dep, &pred, alpha, json, plain),
        Command::PaperVerify { fixture, json } => paper_verify(fixture.as_deref(), json),
        Command::PaperRun {
            csv,
            out,
            indices,
            price,
            rate,
            investment,
            alpha,
        } => {
            let config = StageConfig {
                indices,
                price,
                rate,
                investment,
            };
            paper_run(&csv, out, &config, alpha)
        }
        Command::Plot {
            csv,
            x,
            y,
            kind,
            out,
            title,
        } => plot(&csv, &x, &y, kind, out.as_deref(), title),
    }
}

fn load(csv: &Path) -> Result<Dataset, CliError> {
    let CsvLoad {
        dataset,
        dropped_rows,
    } = dataset::load_csv(csv, &LoadOptions::default())?;
    if !dropped_rows.is_empty() {
        eprintln!(
            "note: dropped {} row(s) with missing cells: {}",
            dropped_rows.len(),
            dropped_rows
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        );
    }
    Ok(dataset)
}

fn mode_for(plain: bool) -> FormatMode {
    if plain {
        FormatMode::Plain
    } else {
        FormatMode::Paper
    }
}

fn correlate(csv: &Path, vars: &[String], json: bool, plain: bool) -> Result<i32, CliError> {
    if vars.len() < 2 {
        return Err(CliError::Usage(format!(
            "--vars needs at least two comma-separated names, got {}",
            vars.len()
        )));
    }
    let ds = load(csv)?;
    let matrix = descriptive::correlation_matrix(&ds, vars)?;
    let table = render_correlation_table(&matrix, mode_for(plain));
    if json {
        let payload = serde_json::json!({ "matrix": matrix, "table": table });
        println!("{}", serde_json::to_string_pretty(&payload)?);
    } else {
        print!("{}", table.to_text());
    }
    Ok(0)
}

fn verdict_line(v: &TestVerdict, subject: &str) -> String {
    let decision = match v.decision {
        Decision::RejectH0 => "Reject H0",
        Decision::FailToRejectH0 => "Fail to reject H0",
    };
    match v.statistic_kind {
        StatisticKind::F => format!(
            "F({}, {}) = {}, Sig. = {} vs alpha {} -> {decision}",
            v.df1,
            v.df2,
            crate::format::spss(v.statistic, 3),
            crate::format::sig(v.p_value),
            v.alpha,
        ),
        StatisticKind::T => format!(
            "t({}) = {} for {subject}, Sig. = {} vs alpha {} -> {decision}",
            v.df1,
            crate::format::spss(v.statistic, 3),
            crate::format::sig(v.p_value),
            v.alpha,
        ),
    }
}

fn warn_if_ill_conditioned(model: &RegressionModel) {
    if model.is_ill_conditioned() {
        eprintln!(
            "warning: predictors of {} are nearly collinear (condition estimate {:.3e}); coefficients are unstable",
            model.dependent, model.condition_estimate
        );
    }
}

fn regress(
    csv: &Path,
    dep: &str,
    pred: &[String],
    alpha: f64,
    json: bool,
    plain: bool,
) -> Result<i32, CliError> {
    if pred.is_empty() {
        return Err(CliError::Usage("--pred needs at least one name".into()));
    }
    let ds = load(csv)?;
    let model = ols::fit(&ds, dep, pred)?;
    warn_if_ill_conditioned(&model);
    let verdicts = workflow::verdict_report(&model, alpha)?;
    let equation = ols::equation_string(&model, 3);
    if json {
        let payload = serde_json::json!({
            "model": model,
            "equation": equation,
            "verdicts": verdicts,
        });
        println!("{}", serde_json::to_string_pretty(&payload)?);
        return Ok(0);
    }
    let (summary, anova, coefficients) = render_regression_tables(&model, mode_for(plain));
    println!("{}", summary.to_text());
    println!("{}", anova.to_text());
    println!("{}", coefficients.to_text());
    println!("{equation}");
    println!();
    println!("{}", verdict_line(&verdicts[0], "model"));
    for (v, c) in verdicts[1..].iter().zip(&model.coefficients) {
        println!("{}", verdict_line(v, &c.name));
    }
    Ok(0)
}

fn paper_verify(fixture: Option<&Path>, json: bool) -> Result<i32, CliError> {
    let fixture = match fixture {
        Some(path) => PaperFixture::from_path(path)?,
        None => PaperFixture::bundled(),
    };
    let checks = paper_consistency_suite(&fixture);
    let failed = checks.iter().filter(|c| !c.passed).count();
    if json {
        let payload = serde_json::json!({
            "passed": failed == 0,
            "total": checks.len(),
            "failed": failed,
            "checks": checks,
        });
        println!("{}", serde_json::to_string_pretty(&payload)?);
    } else {
        for c in &checks {
            println!("{}", check_line(c));
        }
        println!();
        println!("{} checks, {} failed", checks.len(), failed);
    }
    Ok(if failed == 0 { 0 } else { 3 })
}

fn compact(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if !v.is_finite() || v.abs() < 1e-4 || v.abs() >= 1e10 {
        format!("{v:.4e}")
    } else {
        let s = format!("{v:.10}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn check_line(c: &ConsistencyCheck) -> String {
    format!(
        "{}  {}: expected {}, computed {}, tolerance {}",
        if c.passed { "PASS" } else { "FAIL" },
        c.label,
        compact(c.expected),
        compact(c.computed),
        compact(c.tolerance)
    )
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn line_figure(series: &Series, years: &[i32]) -> FigureSpec {
    FigureSpec {
        kind: FigureKind::Line,
        x_name: "YEAR".into(),
        y_name: series.name().into(),
        points: years
            .iter()
            .zip(series.values())
            .map(|(&y, &v)| (y as f64, v))
            .collect(),
        title: format!(
            "{} {}-{}",
            series.name(),
            years.first().copied().unwrap_or_default(),
            years.last().copied().unwrap_or_default()
        ),
    }
}

fn scatter_figure(x: &Series, y: &Series) -> FigureSpec {
    FigureSpec {
        kind: FigureKind::Scatter,
        x_name: x.name().into(),
        y_name: y.name().into(),
        points: x
            .values()
            .iter()
            .zip(y.values())
            .map(|(&a, &b)| (a, b))
            .collect(),
        title: format!("SCATTERPLOT OF {} AND {}", x.name(), y.name()),
    }
}

fn paper_run(
    csv: &Path,
    out: Option<PathBuf>,
    config: &StageConfig,
    alpha: f64,
) -> Result<i32, CliError> {
    let out_dir = out
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    std::fs::create_dir_all(&out_dir).map_err(|source| CliError::Write {
        path: out_dir.display().to_string(),
        source,
    })?;

    let CsvLoad {
        dataset: ds,
        dropped_rows,
    } = dataset::load_csv(csv, &LoadOptions::default())?;
    if !dropped_rows.is_empty() {
        eprintln!(
            "note: dropped {} row(s) with missing cells",
            dropped_rows.len()
        );
    }

    let analysis = workflow::run_staged_analysis(&ds, config)?;
    let mode = FormatMode::Paper;

    // Tables follow the staged layout: 1-1 index screen; 2-1/2-2 pair
    // correlations; 2-3..2-5, 3-1..3-3, 4-1..4-3 the three model triples.
    let mut models: Vec<(&str, u32, &RegressionModel)> = Vec::new();
    let mut figures: Vec<(String, FigureSpec)> = Vec::new();
    for stage in &analysis.stages {
        for (label, artifact) in &stage.artifacts {
            match (label.as_str(), artifact) {
                ("index-correlations", StageArtifact::Matrix(m)) => {
                    write_file(
                        &out_dir,
                        "table-1-1.txt",
                        &render_correlation_table(m, mode).to_text(),
                    )?;
                }
                (_, StageArtifact::Matrix(m)) => {
                    let idx = if label.ends_with(&analysis.index_pair.0) {
                        "table-2-1.txt"
                    } else {
                        "table-2-2.txt"
                    };
                    write_file(&out_dir, idx, &render_correlation_table(m, mode).to_text())?;
                }
                ("price-model", StageArtifact::Model(m)) => models.push(("2", 3, m)),
                ("rate-model", StageArtifact::Model(m)) => models.push(("3", 1, m)),
                ("investment-model", StageArtifact::Model(m)) => models.push(("4", 1, m)),
                _ => {}
            }
        }
    }

    let mut verdicts = serde_json::Map::new();
    let mut equations = String::new();
    for (section, base, model) in &models {
        warn_if_ill_conditioned(model);
        let (summary, anova, coefficients) = render_regression_tables(model, mode);
        write_file(&out_dir, &format!("table-{section}-{base}.txt"), &summary.to_text())?;
        write_file(
            &out_dir,
            &format!("table-{section}-{}.txt", base + 1),
            &anova.to_text(),
        )?;
        write_file(
            &out_dir,
            &format!("table-{section}-{}.txt", base + 2),
            &coefficients.to_text(),
        )?;
        let eq = ols::equation_string(model, 3);
        equations.push_str(&eq);
        equations.push_str("\n\n");
        let report = workflow::verdict_report(model, alpha)?;
        verdicts.insert(
            model.dependent.clone(),
            serde_json::to_value(&report)?,
        );
    }
    write_file(&out_dir, "equations.txt", &equations)?;

    // Full correlation matrix over all configured variables.
    let mut all_vars = config.indices.clone();
    all_vars.push(config.price.clone());
    all_vars.push(config.rate.clone());
    all_vars.push(config.investment.clone());
    let appendix = descriptive::correlation_matrix(&ds, &all_vars)?;
    write_file(
        &out_dir,
        "appendix.txt",
        &render_correlation_table(&appendix, mode).to_text(),
    )?;

    // Figures: per-index lines, index-pair scatters, then one line plus
    // scatters for each model section.
    let years = ds.years().to_vec();
    let mut fig_no = 1;
    for name in &config.indices {
        figures.push((
            format!("fig-1-{fig_no}.svg"),
            line_figure(ds.column(name)?, &years),
        ));
        fig_no += 1;
    }
    for i in 0..config.indices.len() {
        for j in (i + 1)..config.indices.len() {
            figures.push((
                format!("fig-1-{fig_no}.svg"),
                scatter_figure(ds.column(&config.indices[i])?, ds.column(&config.indices[j])?),
            ));
            fig_no += 1;
        }
    }
    let selected = ds.column(&analysis.selected_index)?;
    figures.push((
        "fig-2-1.svg".into(),
        line_figure(ds.column(&config.price)?, &years),
    ));
    figures.push((
        "fig-2-2.svg".into(),
        scatter_figure(selected, ds.column(&config.price)?),
    ));
    figures.push((
        "fig-3-1.svg".into(),
        line_figure(ds.column(&config.rate)?, &years),
    ));
    figures.push((
        "fig-3-2.svg".into(),
        scatter_figure(selected, ds.column(&config.rate)?),
    ));
    figures.push((
        "fig-3-3.svg".into(),
        scatter_figure(ds.column(&config.price)?, ds.column(&config.rate)?),
    ));
    figures.push((
        "fig-4-1.svg".into(),
        line_figure(ds.column(&config.investment)?, &years),
    ));
    for (i, pred) in [&analysis.selected_index, &config.price, &config.rate]
        .iter()
        .enumerate()
    {
        figures.push((
            format!("fig-4-{}.svg", i + 2),
            scatter_figure(ds.column(pred)?, ds.column(&config.investment)?),
        ));
    }
    for (name, spec) in &figures {
        write_file(&out_dir, name, &render_figure(spec)?)?;
    }

    let results = serde_json::json!({
        "dataset": {
            "n": ds.n(),
            "years": ds.years(),
            "variables": ds.variable_names(),
            "dropped_rows": dropped_rows,
        },
        "config": config,
        "alpha": alpha,
        "analysis": analysis,
        "appendix_correlations": appendix,
        "verdicts": verdicts,
    });
    write_file(
        &out_dir,
        "results.json",
        &serde_json::to_string_pretty(&results)?,
    )?;

    println!("dataset: {ds}");
    for d in analysis.decisions() {
        println!("decision: {d}");
    }
    let table_count = 3 + 3 * models.len() + 1; // 1-1, 2-1, 2-2, model triples, appendix
    println!(
        "wrote {} tables, {} figures, equations.txt, results.json to {}",
        table_count,
        figures.len(),
        out_dir.display()
    );
    Ok(0)
}

fn plot(
    csv: &Path,
    x: &str,
    y: &str,
    kind: PlotKind,
    out: Option<&Path>,
    title: Option<String>,
) -> Result<i32, CliError> {
    let ds = load(csv)?;
    let years = ds.years().to_vec();
    let year_series = |name: &str| -> Result<Series, CliError> {
        Ok(if name.eq_ignore_ascii_case("YEAR") {
            Series::new("YEAR", years.clone(), years.iter().map(|&v| v as f64).collect())?
        } else {
            ds.column(name)?.clone()
        })
    };
    let xs = year_series(x)?;
    let ys = year_series(y)?;
    let spec = FigureSpec {
        kind: match kind {
            PlotKind::Scatter => FigureKind::Scatter,
            PlotKind::Line => FigureKind::Line,
        },
        x_name: xs.name().into(),
        y_name: ys.name().into(),
        points: xs
            .values()
            .iter()
            .zip(ys.values())
            .map(|(&a, &b)| (a, b))
            .collect(),
        title: title.unwrap_or_else(|| match kind {
            PlotKind::Scatter => format!("SCATTERPLOT OF {x} AND {y}"),
            PlotKind::Line => format!(
                "{y} {}-{}",
                years.first().copied().unwrap_or_default(),
                years.last().copied().unwrap_or_default()
            ),
        }),
    };
    let svg = render_figure(&spec)?;
    match out {
        Some(path) => {
            std::fs::write(path, svg).map_err(|source| CliError::Write {
                path: path.display().to_string(),
                source,
            })?;
        }
        None => print!("{svg}"),
    }
    Ok(0)
}
