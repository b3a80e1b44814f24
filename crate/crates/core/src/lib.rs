//! Econometric analysis over annual time series: Pearson correlation matrices
//! with two-tailed significance, OLS regression with ANOVA and standardized
//! coefficients, a staged model-building driver, SPSS-style report tables,
//! and dependency-free SVG figures.
//!
//! # Modules
//!
//! - [`dataset`]: CSV ingestion with listwise deletion, year alignment
//! - [`descriptive`]: stable moments, SSCP, covariance, Pearson r
//! - [`inference`]: log-gamma, incomplete beta, t/F CDFs, test verdicts
//! - [`ols`]: QR-based least squares with coefficients, Betas, ANOVA
//! - [`workflow`]: the staged analysis driver and the published-statistics
//!   consistency suite
//! - [`report`]: report tables and SVG figures
//! - [`cli`]: the `ecomet` command-line surface
//!
//! # Example
//!
//! ```
//! use ecomet::dataset::{load_csv_str, LoadOptions};
//! use ecomet::ols;
//!
//! let csv = "YEAR,Y,X\n1990,2.1,1\n1991,3.9,2\n1992,6.2,3\n1993,7.8,4\n";
//! let ds = load_csv_str(csv, &LoadOptions::default()).unwrap().dataset;
//! let model = ols::fit(&ds, "Y", &["X".into()]).unwrap();
//! assert!(model.summary.r_square > 0.99);
//! ```

pub mod cli;
pub mod dataset;
pub mod descriptive;
pub mod format;
pub mod inference;
pub mod ols;
pub mod report;
pub mod workflow;

pub use dataset::{align, load_csv, load_csv_str, CsvLoad, Dataset, DatasetError, Series};
pub use descriptive::{
    correlation_matrix, moments, pearson, sscp, CorrelationCell, CorrelationMatrix,
    DescriptiveError, MomentSummary,
};
pub use inference::{
    f_cdf, log_gamma, reg_inc_beta, t_cdf, verdict, Decision, InferenceError, StatisticKind,
    TestVerdict,
};
pub use ols::{
    equation_string, fit, predict, residuals, AnovaBlock, Coefficient, ModelSummary, OlsError,
    RegressionModel,
};
pub use report::{
    render_correlation_table, render_figure, render_regression_tables, FigureKind, FigureSpec,
    FormatMode, ReportError, ReportTable,
};
pub use workflow::{
    paper_consistency_suite, run_staged_analysis, verdict_report, ConsistencyCheck, PaperFixture,
    StageArtifact, StageConfig, StagedAnalysis, WorkflowError,
};
