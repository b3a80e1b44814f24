//! The staged model-building procedure and the published-statistics
//! consistency checker.
//!
//! The staged driver screens stock indices by correlation, links the winner to
//! the price series with a simple regression, then builds the rate and
//! investment models on top. The consistency checker recomputes every
//! derivable identity from a fixture of published summary statistics and
//! reports pass/fail per check; failures are data, not errors.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::dataset::Dataset;
use crate::descriptive::{self, CorrelationMatrix, DescriptiveError};
use crate::inference::{self, InferenceError, StatisticKind, TestVerdict};
use crate::ols::{self, OlsError, RegressionModel};

#[derive(Debug, Error)]
pub enum WorkflowError {
    #[error("{stage} stage: {source}")]
    Descriptive {
        stage: &'static str,
        #[source]
        source: DescriptiveError,
    },
    #[error("{stage} stage: {source}")]
    Ols {
        stage: &'static str,
        #[source]
        source: OlsError,
    },
    #[error("staged analysis needs at least two index variables, got {got}")]
    TooFewIndices { got: usize },
    #[error("fixture: {0}")]
    Fixture(String),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// Which variables play which role in the staged analysis.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StageConfig {
    /// Stock index candidates, in tie-break order.
    pub indices: Vec<String>,
    /// Price-level series (simple-regression dependent).
    pub price: String,
    /// Interest-rate series (two-predictor dependent).
    pub rate: String,
    /// Investment series (final dependent).
    pub investment: String,
}

impl Default for StageConfig {
    fn default() -> Self {
        StageConfig {
            indices: vec!["NYSE".into(), "DJ".into(), "SP500".into()],
            price: "CPI-U".into(),
            rate: "TB3".into(),
            investment: "GPDI".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum StageId {
    IndexScreen,
    PriceLink,
    RateModel,
    GpdiModel,
}

/// Fixed description of one stage: what it consumes, how it selects, what it
/// produces. Stages always execute in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct StagePlan {
    pub stage_id: StageId,
    pub inputs: Vec<String>,
    pub selection_rule: String,
    pub outputs: String,
}

/// The four-stage plan for a given configuration.
pub fn staged_plan(config: &StageConfig) -> Vec<StagePlan> {
    vec![
        StagePlan {
            stage_id: StageId::IndexScreen,
            inputs: config.indices.clone(),
            selection_rule: "pick the index pair with the largest |r|; ties break by configured order".into(),
            outputs: "index correlation matrix and the selected pair".into(),
        },
        StagePlan {
            stage_id: StageId::PriceLink,
            inputs: vec![config.price.clone()],
            selection_rule: format!(
                "pick whichever selected index correlates strongest (|r|) with {}; ties break by configured order",
                config.price
            ),
            outputs: format!("pairwise correlations and the {} simple regression", config.price),
        },
        StagePlan {
            stage_id: StageId::RateModel,
            inputs: vec![config.rate.clone(), config.price.clone()],
            selection_rule: "none; regress the rate on the selected index and the price series".into(),
            outputs: format!("{} two-predictor regression", config.rate),
        },
        StagePlan {
            stage_id: StageId::GpdiModel,
            inputs: vec![
                config.investment.clone(),
                config.price.clone(),
                config.rate.clone(),
            ],
            selection_rule: "none; regress investment on the selected index, price, and rate".into(),
            outputs: format!("{} three-predictor regression", config.investment),
        },
    ]
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum StageArtifact {
    Matrix(CorrelationMatrix),
    Model(RegressionModel),
}

/// One executed stage: its plan, labeled artifacts, and selection decisions.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StageOutcome {
    pub plan: StagePlan,
    pub artifacts: Vec<(String, StageArtifact)>,
    pub decisions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StagedAnalysis {
    pub stages: Vec<StageOutcome>,
    pub index_pair: (String, String),
    pub selected_index: String,
}

impl StagedAnalysis {
    pub fn decisions(&self) -> impl Iterator<Item = &str> {
        self.stages
            .iter()
            .flat_map(|s| s.decisions.iter().map(String::as_str))
    }
}

/// Runs the four stages in order: index screen, price link, rate model,
/// investment model. Every selection is deterministic and logged.
pub fn run_staged_analysis(
    ds: &Dataset,
    config: &StageConfig,
) -> Result<StagedAnalysis, WorkflowError> {
    if config.indices.len() < 2 {
        return Err(WorkflowError::TooFewIndices {
            got: config.indices.len(),
        });
    }
    let plans = staged_plan(config);

    // Stage 1: index screen.
    let matrix = descriptive::correlation_matrix(ds, &config.indices).map_err(|source| {
        WorkflowError::Descriptive {
            stage: "index screen",
            source,
        }
    })?;
    let mut best: Option<(usize, usize, f64)> = None;
    let mut tie = false;
    for i in 0..config.indices.len() {
        for j in (i + 1)..config.indices.len() {
            let r = matrix.cell(i, j).r.abs();
            match best {
                None => best = Some((i, j, r)),
                Some((_, _, cur)) if r > cur => {
                    best = Some((i, j, r));
                    tie = false;
                }
                Some((_, _, cur)) if r == cur => tie = true,
                _ => {}
            }
        }
    }
    let (bi, bj, best_r) = best.expect("at least one pair");
    let index_pair = (config.indices[bi].clone(), config.indices[bj].clone());
    let mut stage1_decisions = vec![format!(
        "selected index pair ({}, {}) with |r| = {:.3}",
        index_pair.0, index_pair.1, best_r
    )];
    if tie {
        stage1_decisions.push("tie among candidate pairs; broken by configured variable order".into());
    }
    let stage1 = StageOutcome {
        plan: plans[0].clone(),
        artifacts: vec![("index-correlations".into(), StageArtifact::Matrix(matrix))],
        decisions: stage1_decisions,
    };

    // Stage 2: price link.
    let mut pair_matrices = Vec::new();
    let mut pair_r = Vec::new();
    for name in [&index_pair.0, &index_pair.1] {
        let m = descriptive::correlation_matrix(ds, &[name.clone(), config.price.clone()])
            .map_err(|source| WorkflowError::Descriptive {
                stage: "price link",
                source,
            })?;
        pair_r.push(m.cell(0, 1).r);
        pair_matrices.push((format!("price-correlations-{name}"), StageArtifact::Matrix(m)));
    }
    let price_tie = pair_r[0].abs() == pair_r[1].abs();
    let winner = if pair_r[1].abs() > pair_r[0].abs() { 1 } else { 0 };
    let selected_index = [&index_pair.0, &index_pair.1][winner].clone();
    let mut stage2_decisions = vec![format!(
        "selected {} for the {} regression (|r| = {:.3} vs {:.3})",
        selected_index,
        config.price,
        pair_r[winner].abs(),
        pair_r[1 - winner].abs()
    )];
    if price_tie {
        stage2_decisions.push("tie between the index pair; broken by configured variable order".into());
    }
    let price_model = ols::fit(ds, &config.price, std::slice::from_ref(&selected_index))
        .map_err(|source| WorkflowError::Ols {
            stage: "price link",
            source,
        })?;
    let mut stage2_artifacts = pair_matrices;
    stage2_artifacts.push(("price-model".into(), StageArtifact::Model(price_model)));
    let stage2 = StageOutcome {
        plan: plans[1].clone(),
        artifacts: stage2_artifacts,
        decisions: stage2_decisions,
    };

    // Stage 3: rate model on the selected index plus the price series.
    let rate_model = ols::fit(
        ds,
        &config.rate,
        &[selected_index.clone(), config.price.clone()],
    )
    .map_err(|source| WorkflowError::Ols {
        stage: "rate model",
        source,
    })?;
    let stage3 = StageOutcome {
        plan: plans[2].clone(),
        artifacts: vec![("rate-model".into(), StageArtifact::Model(rate_model))],
        decisions: vec![format!(
            "{} regressed on {} and {}",
            config.rate, selected_index, config.price
        )],
    };

    // Stage 4: investment model.
    let investment_model = ols::fit(
        ds,
        &config.investment,
        &[
            selected_index.clone(),
            config.price.clone(),
            config.rate.clone(),
        ],
    )
    .map_err(|source| WorkflowError::Ols {
        stage: "investment model",
        source,
    })?;
    let stage4 = StageOutcome {
        plan: plans[3].clone(),
        artifacts: vec![(
            "investment-model".into(),
            StageArtifact::Model(investment_model),
        )],
        decisions: vec![format!(
            "{} regressed on {}, {}, and {}",
            config.investment, selected_index, config.price, config.rate
        )],
    };

    Ok(StagedAnalysis {
        stages: vec![stage1, stage2, stage3, stage4],
        index_pair,
        selected_index,
    })
}

/// Overall-F verdict plus per-coefficient t verdicts at the given alpha.
pub fn verdict_report(
    model: &RegressionModel,
    alpha: f64,
) -> Result<Vec<TestVerdict>, InferenceError> {
    let mut out = Vec::with_capacity(model.coefficients.len() + 1);
    out.push(inference::verdict(
        model.anova.f,
        StatisticKind::F,
        model.anova.df_regression,
        model.anova.df_residual,
        alpha,
    )?);
    for c in &model.coefficients {
        out.push(inference::verdict(
            c.t,
            StatisticKind::T,
            model.anova.df_residual,
            0,
            alpha,
        )?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Published-statistics fixture and consistency suite
// ---------------------------------------------------------------------------

/// One published number: where it was printed, at what granularity, and
/// whether it carried the ** significance marker.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PaperValue {
    pub key: String,
    pub table: String,
    pub label: String,
    pub value: f64,
    /// Print granularity (e.g. 0.001 for three decimals, 1 for integers).
    pub resolution: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starred: Option<bool>,
}

#[derive(Debug, serde::Deserialize)]
struct FixtureFile {
    #[allow(dead_code)]
    schema: u32,
    value: Vec<PaperValue>,
}

/// The transcribed summary statistics, keyed for lookup.
#[derive(Debug, Clone)]
pub struct PaperFixture {
    values: Vec<PaperValue>,
    index: BTreeMap<String, usize>,
}

impl PaperFixture {
    /// The fixture shipped with the crate.
    pub fn bundled() -> PaperFixture {
        PaperFixture::from_toml_str(include_str!("../fixtures/paper_statistics.toml"))
            .expect("bundled fixture parses")
    }

    pub fn from_toml_str(text: &str) -> Result<PaperFixture, WorkflowError> {
        let file: FixtureFile =
            toml::from_str(text).map_err(|e| WorkflowError::Fixture(e.to_string()))?;
        let mut index = BTreeMap::new();
        for (i, v) in file.value.iter().enumerate() {
            if index.insert(v.key.clone(), i).is_some() {
                return Err(WorkflowError::Fixture(format!("duplicate key {:?}", v.key)));
            }
            if v.resolution.is_nan() || v.resolution <= 0.0 {
                return Err(WorkflowError::Fixture(format!(
                    "record {:?} has non-positive resolution",
                    v.key
                )));
            }
        }
        Ok(PaperFixture {
            values: file.value,
            index,
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<PaperFixture, WorkflowError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| WorkflowError::Fixture(format!("{}: {e}", path.as_ref().display())))?;
        PaperFixture::from_toml_str(&text)
    }

    pub fn values(&self) -> &[PaperValue] {
        &self.values
    }

    pub fn get(&self, key: &str) -> Option<&PaperValue> {
        self.index.get(key).map(|&i| &self.values[i])
    }

    /// Copy of the fixture with one value replaced (used by sensitivity tests).
    pub fn with_value(&self, key: &str, value: f64) -> PaperFixture {
        let mut out = self.clone();
        if let Some(&i) = out.index.get(key) {
            out.values[i].value = value;
        }
        out
    }
}

/// One recomputation check: |expected − computed| ≤ tolerance.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConsistencyCheck {
    pub label: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ConsistencyCheck {
    fn new(label: String, expected: f64, computed: f64, tolerance: f64) -> ConsistencyCheck {
        ConsistencyCheck {
            label,
            expected,
            computed,
            // comparison is false (check fails) when anything is NaN
            passed: (expected - computed).abs() <= tolerance,
            tolerance,
        }
    }
}

// Class tolerances. Each check adds the first-order propagated half-resolution
// of the printed values it recomputes from, so an identity is tested exactly
// as tightly as the table's print precision allows.
const TOL_CORRELATION: f64 = 0.0005;
const TOL_R2: f64 = 0.001;
const TOL_COVARIANCE: f64 = 0.001;
const TOL_STAT: f64 = 0.02;
const TOL_P: f64 = 0.005;
const TOL_BETA: f64 = 0.002;
const TOL_SEE_REL: f64 = 0.0005;
const TOL_SS: f64 = 0.001;
const TOL_DF: f64 = 0.1;
const TOL_DISPLAY: f64 = 1e-9;

struct SuiteBuilder<'a> {
    fixture: &'a PaperFixture,
    checks: Vec<ConsistencyCheck>,
}

impl<'a> SuiteBuilder<'a> {
    fn val(&mut self, key: &str) -> f64 {
        match self.fixture.get(key) {
            Some(v) => v.value,
            None => {
                self.checks.push(ConsistencyCheck::new(
                    format!("fixture record {key:?} present"),
                    0.0,
                    f64::NAN,
                    0.0,
                ));
                f64::NAN
            }
        }
    }

    fn half(&self, key: &str) -> f64 {
        self.fixture.get(key).map(|v| v.resolution / 2.0).unwrap_or(0.0)
    }

    fn starred(&self, key: &str) -> Option<bool> {
        self.fixture.get(key).and_then(|v| v.starred)
    }

    fn describe(&self, key: &str, what: &str) -> String {
        match self.fixture.get(key) {
            Some(v) => format!("{}: {} [{}]", v.table, what, v.label),
            None => format!("{what} [missing {key:?}]"),
        }
    }

    /// Push a check of `computed` against the printed value at `expected_key`.
    /// The tolerance is the class tolerance, floored by the expected value's
    /// own print granularity, plus the propagated input rounding.
    fn check(&mut self, what: &str, expected_key: &str, computed: f64, class_tol: f64, prop: f64) {
        let expected = self.val(expected_key);
        let label = self.describe(expected_key, what);
        let tolerance = class_tol.max(self.half(expected_key)) + prop;
        self.checks
            .push(ConsistencyCheck::new(label, expected, computed, tolerance));
    }

    /// p-value for H0: ρ=0 from a printed correlation, NaN when invalid.
    fn p_of_r(&mut self, r_key: &str, n: f64) -> (f64, f64) {
        let r = self.val(r_key);
        if !(n.is_finite() && n >= 3.0) {
            return (f64::NAN, 0.0);
        }
        let n = n.round() as usize;
        let p = inference::p_from_correlation(r, n).unwrap_or(f64::NAN);
        // sensitivity of p to the print resolution of r
        let dr = 1e-6;
        let bumped = if r + dr <= 1.0 { r + dr } else { r - dr };
        let prop = match inference::p_from_correlation(bumped, n) {
            Ok(p2) => (p2 - p).abs() / dr * self.half(r_key),
            Err(_) => 0.0,
        };
        (p, prop)
    }

    fn p_of_t(&mut self, t_key: &str, df: f64) -> (f64, f64) {
        let t = self.val(t_key);
        if !(df.is_finite() && df >= 1.0) || !t.is_finite() {
            return (f64::NAN, 0.0);
        }
        let df = df.round() as u64;
        let p = inference::t_two_tailed_p(t, df).unwrap_or(f64::NAN);
        let dt = 1e-6;
        let prop = match inference::t_two_tailed_p(t.abs() + dt, df) {
            Ok(p2) => (p2 - p).abs() / dt * self.half(t_key),
            Err(_) => 0.0,
        };
        (p, prop)
    }
}

/// Recomputes every derivable identity from the fixture and reports each as a
/// [`ConsistencyCheck`]. Failures are data, not errors: a missing or
/// perturbed record shows up as a failed check.
pub fn paper_consistency_suite(fixture: &PaperFixture) -> Vec<ConsistencyCheck> {
    let mut b = SuiteBuilder {
        fixture,
        checks: Vec::new(),
    };
    let n = b.val("data.n");

    // --- Index table: r from SSCP, covariance identities, significance ---
    let pairs = [("nyse", "dj"), ("nyse", "sp500"), ("dj", "sp500")];
    for (x, y) in pairs {
        let sscp_key = format!("t11.sscp.{x}_{y}");
        let sscp = b.val(&sscp_key);
        let ss_x = b.val(&format!("t11.ss.{x}"));
        let ss_y = b.val(&format!("t11.ss.{y}"));
        let r = sscp / (ss_x * ss_y).sqrt();
        let prop = r.abs()
            * (b.half(&sscp_key) / sscp.abs()
                + b.half(&format!("t11.ss.{x}")) / (2.0 * ss_x)
                + b.half(&format!("t11.ss.{y}")) / (2.0 * ss_y));
        b.check(
            &format!("r({x}, {y}) from SSCP and SS"),
            &format!("t11.r.{x}_{y}"),
            r,
            TOL_CORRELATION,
            prop,
        );
        let (p, prop) = b.p_of_r(&format!("t11.r.{x}_{y}"), n);
        b.check(
            &format!("two-tailed p of r({x}, {y})"),
            &format!("t11.sig.{x}_{y}"),
            p,
            TOL_P,
            prop,
        );
    }
    for (label, sscp_key, cov_key) in [
        ("NYSE", "t11.ss.nyse", "t11.cov.nyse"),
        ("DJ", "t11.ss.dj", "t11.cov.dj"),
        ("SP500", "t11.ss.sp500", "t11.cov.sp500"),
        ("NYSE x DJ", "t11.sscp.nyse_dj", "t11.cov.nyse_dj"),
        ("NYSE x SP500", "t11.sscp.nyse_sp500", "t11.cov.nyse_sp500"),
        ("DJ x SP500", "t11.sscp.dj_sp500", "t11.cov.dj_sp500"),
    ] {
        let s = b.val(sscp_key);
        let c = s / (n - 1.0);
        let prop = b.half(sscp_key) / (n - 1.0);
        b.check(
            &format!("covariance({label}) = SSCP/(n-1)"),
            cov_key,
            c,
            TOL_COVARIANCE,
            prop,
        );
    }

    // --- Two-variable correlation tables and their appendix counterparts ---
    let (p, prop) = b.p_of_r("t21.r.dj_cpiu", n);
    b.check("two-tailed p of r(DJ, CPI-U)", "t21.sig.dj_cpiu", p, TOL_P, prop);
    let (p, prop) = b.p_of_r("t22.r.cpiu_sp500", n);
    b.check("two-tailed p of r(CPI-U, SP500)", "t22.sig.cpiu_sp500", p, TOL_P, prop);
    for (what, lhs_key, rhs_key) in [
        ("r(DJ, CPI-U) consistent across tables", "t21.r.dj_cpiu", "ax.r.dj_cpiu"),
        ("r(CPI-U, SP500) consistent across tables", "t22.r.cpiu_sp500", "ax.r.sp500_cpiu"),
        ("r(NYSE, DJ) consistent across tables", "t11.r.nyse_dj", "ax.r.nyse_dj"),
        ("r(NYSE, SP500) consistent across tables", "t11.r.nyse_sp500", "ax.r.nyse_sp500"),
        ("r(DJ, SP500) consistent across tables", "t11.r.dj_sp500", "ax.r.dj_sp500"),
    ] {
        let lhs = b.val(lhs_key);
        let prop = b.half(lhs_key);
        b.check(what, rhs_key, lhs, TOL_CORRELATION, prop);
    }

    // --- Model summaries: R = sqrt(R2), adjusted R2, SEE = sqrt(MS_res) ---
    for (summary, anova) in [("t23", "t24"), ("t31", "t32"), ("t41", "t42")] {
        let r2_key = format!("{summary}.r2");
        let r2 = b.val(&r2_key);
        let r = r2.max(0.0).sqrt();
        b.check(
            "R = sqrt(R Square)",
            &format!("{summary}.r"),
            r,
            TOL_R2,
            b.half(&r2_key) / (2.0 * r),
        );
        let df_tot = b.val(&format!("{anova}.df_tot"));
        let df_res = b.val(&format!("{anova}.df_res"));
        let adj = 1.0 - (1.0 - r2) * df_tot / df_res;
        b.check(
            "Adjusted R Square from (R Square, n, p)",
            &format!("{summary}.adj_r2"),
            adj,
            TOL_R2,
            b.half(&r2_key) * df_tot / df_res,
        );
        let ms_key = format!("{anova}.ms_res");
        let ms = b.val(&ms_key);
        let see = ms.max(0.0).sqrt();
        let see_key = format!("{summary}.see");
        let expected_see = b.val(&see_key);
        let tol = TOL_SEE_REL * expected_see.abs() + b.half(&ms_key) / (2.0 * see);
        b.check("SEE = sqrt(MS residual)", &see_key, see, tol, 0.0);
    }

    // --- ANOVA internal identities ---
    for t in ["t24", "t32", "t42"] {
        let ss_reg = b.val(&format!("{t}.ss_reg"));
        let ss_res = b.val(&format!("{t}.ss_res"));
        let prop = b.half(&format!("{t}.ss_reg")) + b.half(&format!("{t}.ss_res"));
        b.check(
            "SS regression + SS residual = SS total",
            &format!("{t}.ss_tot"),
            ss_reg + ss_res,
            TOL_SS,
            prop,
        );
        let df_reg = b.val(&format!("{t}.df_reg"));
        let df_res = b.val(&format!("{t}.df_res"));
        b.check(
            "MS regression = SS/df",
            &format!("{t}.ms_reg"),
            ss_reg / df_reg,
            TOL_SS,
            b.half(&format!("{t}.ss_reg")) / df_reg,
        );
        b.check(
            "MS residual = SS/df",
            &format!("{t}.ms_res"),
            ss_res / df_res,
            TOL_SS,
            b.half(&format!("{t}.ss_res")) / df_res,
        );
        let ms_reg = b.val(&format!("{t}.ms_reg"));
        let ms_res = b.val(&format!("{t}.ms_res"));
        let f = ms_reg / ms_res;
        let prop = f.abs()
            * (b.half(&format!("{t}.ms_reg")) / ms_reg.abs()
                + b.half(&format!("{t}.ms_res")) / ms_res.abs());
        b.check("F = MS regression / MS residual", &format!("{t}.f"), f, TOL_STAT, prop);
        b.check(
            "df total = df regression + df residual",
            &format!("{t}.df_tot"),
            df_reg + df_res,
            TOL_DF,
            0.0,
        );
        b.check(
            "df residual = n - p - 1",
            &format!("{t}.df_res"),
            n - df_reg - 1.0,
            TOL_DF,
            0.0,
        );
        let fv = b.val(&format!("{t}.f"));
        let p = if fv.is_finite() && fv >= 0.0 && df_reg >= 1.0 && df_res >= 1.0 {
            inference::f_upper_tail_p(fv, df_reg.round() as u64, df_res.round() as u64)
                .unwrap_or(f64::NAN)
        } else {
            f64::NAN
        };
        b.check("upper-tail p of F", &format!("{t}.sig"), p, TOL_P, 0.0);
    }

    // --- Coefficient rows: t = B/SE and p(t, df) ---
    let coef_rows: [(&str, &str, &[&str]); 3] = [
        ("t25", "t24", &["const", "sp500"]),
        ("t33", "t32", &["const", "sp500", "cpiu"]),
        ("t43", "t42", &["const", "sp500", "cpiu", "tb3"]),
    ];
    for (t, anova, rows) in coef_rows {
        let df_res = b.val(&format!("{anova}.df_res"));
        for row in rows {
            let b_key = format!("{t}.{row}.b");
            let se_key = format!("{t}.{row}.se");
            let bv = b.val(&b_key);
            let se = b.val(&se_key);
            let tc = bv / se;
            let prop = tc.abs() * (b.half(&b_key) / bv.abs() + b.half(&se_key) / se.abs());
            b.check("t = B / Std. Error", &format!("{t}.{row}.t"), tc, TOL_STAT, prop);
            let (p, prop) = b.p_of_t(&format!("{t}.{row}.t"), df_res);
            b.check("two-tailed p of t", &format!("{t}.{row}.sig"), p, TOL_P, prop);
        }
    }

    // --- Standardized Betas from printed B and sds recovered from SS totals ---
    // sd(x) = sqrt(SS_x/(n-1)) with each variable's total SS taken from the
    // table where it is the dependent (or from the index SS table).
    type BetaRows = [(&'static str, &'static str, &'static [(&'static str, &'static str)]); 3];
    let beta_rows: BetaRows = [
        ("t25", "t24.ss_tot", &[("sp500", "t11.ss.sp500")]),
        ("t33", "t32.ss_tot", &[("sp500", "t11.ss.sp500"), ("cpiu", "t24.ss_tot")]),
        (
            "t43",
            "t42.ss_tot",
            &[
                ("sp500", "t11.ss.sp500"),
                ("cpiu", "t24.ss_tot"),
                ("tb3", "t32.ss_tot"),
            ],
        ),
    ];
    for (t, ss_y_key, rows) in beta_rows {
        let ss_y = b.val(ss_y_key);
        for (row, ss_x_key) in rows {
            let b_key = format!("{t}.{row}.b");
            let bv = b.val(&b_key);
            let ss_x = b.val(ss_x_key);
            let beta = bv * (ss_x / ss_y).sqrt();
            let prop = beta.abs()
                * (b.half(&b_key) / bv.abs()
                    + b.half(ss_x_key) / (2.0 * ss_x)
                    + b.half(ss_y_key) / (2.0 * ss_y));
            b.check(
                "Beta = B * sd(x)/sd(y)",
                &format!("{t}.{row}.beta"),
                beta,
                TOL_BETA,
                prop,
            );
        }
    }

    // --- Betas of the two-predictor model from the appendix correlations ---
    {
        let r12 = b.val("ax.r.sp500_cpiu");
        let r1y = b.val("ax.r.sp500_tb3");
        let r2y = b.val("ax.r.cpiu_tb3");
        let det = 1.0 - r12 * r12;
        let (beta1, beta2) = if det > 0.0 {
            ((r1y - r12 * r2y) / det, (r2y - r12 * r1y) / det)
        } else {
            (f64::NAN, f64::NAN)
        };
        let prop = (b.half("ax.r.sp500_tb3")
            + r12.abs() * b.half("ax.r.cpiu_tb3")
            + 3.0 * b.half("ax.r.sp500_cpiu"))
            / det;
        b.check(
            "Beta(SP500) from pairwise correlations",
            "t33.sp500.beta",
            beta1,
            TOL_BETA,
            prop,
        );
        b.check(
            "Beta(CPI-U) from pairwise correlations",
            "t33.cpiu.beta",
            beta2,
            TOL_BETA,
            prop,
        );
    }

    // --- Simple-regression bridges ---
    {
        let r = b.val("t22.r.cpiu_sp500");
        b.check(
            "|Beta| equals |r| at displayed precision",
            "t25.sp500.beta",
            r,
            TOL_DISPLAY,
            0.0,
        );
        b.check(
            "multiple R equals |r| at displayed precision",
            "t23.r",
            r,
            TOL_DISPLAY,
            0.0,
        );
        let t_key = "t25.sp500.t";
        let tv = b.val(t_key);
        let prop = 2.0 * tv.abs() * b.half(t_key);
        b.check("F = t^2 in the simple regression", "t24.f", tv * tv, TOL_STAT, prop);
    }

    // --- Appendix: p-values and significance flags for all 15 pairs ---
    let appendix_pairs = [
        ("gpdi", "nyse"),
        ("gpdi", "dj"),
        ("gpdi", "sp500"),
        ("gpdi", "cpiu"),
        ("gpdi", "tb3"),
        ("nyse", "dj"),
        ("nyse", "sp500"),
        ("nyse", "cpiu"),
        ("nyse", "tb3"),
        ("dj", "sp500"),
        ("dj", "cpiu"),
        ("dj", "tb3"),
        ("sp500", "cpiu"),
        ("sp500", "tb3"),
        ("cpiu", "tb3"),
    ];
    for (x, y) in appendix_pairs {
        let r_key = format!("ax.r.{x}_{y}");
        let (p, prop) = b.p_of_r(&r_key, n);
        b.check(
            &format!("two-tailed p of r({x}, {y})"),
            &format!("ax.sig.{x}_{y}"),
            p,
            TOL_P,
            prop,
        );
        if let Some(starred) = b.starred(&r_key) {
            let computed = if p.is_nan() {
                f64::NAN
            } else if p < 0.01 {
                1.0
            } else {
                0.0
            };
            let label = b.describe(&r_key, "significance marker matches p < .01");
            b.checks.push(ConsistencyCheck::new(
                label,
                if starred { 1.0 } else { 0.0 },
                computed,
                0.5,
            ));
        }
    }

    b.checks
}
