//! Ordinary least squares with intercept: coefficients with standard errors
//! and standardized Betas, model summary, ANOVA decomposition, predictions,
//! and residuals.
//!
//! The solver runs Householder QR on the centered design matrix; the normal
//! matrix is never formed or inverted directly. Standard errors come from the
//! R-factor inverse, so the crossproduct inverse diagonal is obtained without
//! squaring the condition number.

use std::collections::HashMap;

use thiserror::Error;

use crate::dataset::{Dataset, DatasetError, Series};
use crate::descriptive::{moments, MomentSummary};
use crate::format;
use crate::inference::{self, InferenceError};

/// Condition estimates above this trip the collinearity warning.
pub const CONDITION_WARN_THRESHOLD: f64 = 1e10;

const REL_RANK_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum OlsError {
    #[error("no predictors given")]
    NoPredictors,
    #[error("too few observations: n = {n} cannot support {p} predictor(s) plus an intercept")]
    TooFewObservations { n: usize, p: usize },
    #[error("predictor {name:?} is constant")]
    ConstantPredictor { name: String },
    #[error("dependent variable {name:?} is constant")]
    ConstantDependent { name: String },
    #[error("design matrix is rank deficient; linearly dependent columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },
    #[error("prediction input is missing predictor {name:?}")]
    MissingPredictor { name: String },
    #[error("dataset does not match the fitted model: {reason}")]
    DatasetMismatch { reason: String },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// One coefficient row: unstandardized B with its standard error, the
/// standardized Beta (absent for the constant), and the t-test of H0: b = 0.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub b: f64,
    pub std_error: f64,
    pub beta: Option<f64>,
    pub t: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelSummary {
    /// Multiple correlation, reported as +√R².
    pub r: f64,
    pub r_square: f64,
    pub adj_r_square: f64,
    /// √(MS residual), in units of the dependent variable.
    pub std_error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AnovaBlock {
    pub ss_regression: f64,
    pub ss_residual: f64,
    pub ss_total: f64,
    pub df_regression: u64,
    pub df_residual: u64,
    pub df_total: u64,
    pub ms_regression: f64,
    pub ms_residual: f64,
    pub f: f64,
    pub p_value: f64,
}

/// A fitted OLS model. Immutable; safe to share across threads.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegressionModel {
    pub dependent: String,
    pub predictors: Vec<String>,
    pub n: usize,
    /// Constant first, then predictors in fit order.
    pub coefficients: Vec<Coefficient>,
    pub summary: ModelSummary,
    pub anova: AnovaBlock,
    /// Estimated spectral condition number of the centered crossproduct
    /// matrix, from the QR diagonal.
    pub condition_estimate: f64,
}

impl RegressionModel {
    pub fn is_ill_conditioned(&self) -> bool {
        self.condition_estimate.is_nan() || self.condition_estimate > CONDITION_WARN_THRESHOLD
    }
}

/// Fits `dependent ~ (Constant) + predictors` by Householder QR on the
/// centered design.
pub fn fit(
    ds: &Dataset,
    dependent: &str,
    predictors: &[String],
) -> Result<RegressionModel, OlsError> {
    if predictors.is_empty() {
        return Err(OlsError::NoPredictors);
    }
    let p = predictors.len();
    let n = ds.n();
    if n < p + 2 {
        return Err(OlsError::TooFewObservations { n, p });
    }

    let y_series = ds.column(dependent)?;
    let x_series: Vec<&Series> = predictors
        .iter()
        .map(|name| ds.column(name))
        .collect::<Result<_, _>>()?;

    let y_mom = moments(y_series);
    if y_mom.sum_sq_dev <= 0.0 {
        return Err(OlsError::ConstantDependent {
            name: dependent.to_string(),
        });
    }
    let x_mom: Vec<MomentSummary> = x_series.iter().map(|s| moments(s)).collect();
    for (m, name) in x_mom.iter().zip(predictors) {
        if m.sum_sq_dev <= 0.0 {
            return Err(OlsError::ConstantPredictor { name: name.clone() });
        }
    }

    // Centered design, column major.
    let mut cols: Vec<Vec<f64>> = x_series
        .iter()
        .zip(&x_mom)
        .map(|(s, m)| s.values().iter().map(|v| v - m.mean).collect())
        .collect();
    let mut rhs: Vec<f64> = y_series.values().iter().map(|v| v - y_mom.mean).collect();
    let orig_norms: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    // Householder QR; R overwrites the top of each column.
    for k in 0..p {
        let norm = cols[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= orig_norms[k] * REL_RANK_TOL {
            return Err(OlsError::RankDeficient {
                columns: predictors[..=k].to_vec(),
            });
        }
        let alpha = if cols[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        cols[k][k] = alpha;
        for x in cols[k][k + 1..].iter_mut() {
            *x = 0.0;
        }
        if vtv > 0.0 {
            let beta = 2.0 / vtv;
            for col in cols.iter_mut().skip(k + 1) {
                let s: f64 = v.iter().zip(&col[k..]).map(|(a, b)| a * b).sum::<f64>() * beta;
                for (vi, x) in v.iter().zip(col[k..].iter_mut()) {
                    *x -= s * vi;
                }
            }
            let s: f64 = v.iter().zip(&rhs[k..]).map(|(a, b)| a * b).sum::<f64>() * beta;
            for (vi, x) in v.iter().zip(rhs[k..].iter_mut()) {
                *x -= s * vi;
            }
        }
    }

    // Back-substitute R b = Q'y for the slopes.
    let r_at = |i: usize, j: usize| cols[j][i]; // upper triangle, i <= j
    let mut slopes = vec![0.0; p];
    for i in (0..p).rev() {
        let tail: f64 = ((i + 1)..p).map(|j| r_at(i, j) * slopes[j]).sum();
        slopes[i] = (rhs[i] - tail) / r_at(i, i);
    }
    let intercept = y_mom.mean
        - slopes
            .iter()
            .zip(&x_mom)
            .map(|(b, m)| b * m.mean)
            .sum::<f64>();

    // C = R^-1 (upper triangular), so (X'X)^-1 = C C'.
    let mut c_inv = vec![vec![0.0; p]; p];
    for (j, col) in c_inv.iter_mut().enumerate() {
        col[j] = 1.0 / r_at(j, j);
        for i in (0..j).rev() {
            let acc: f64 = ((i + 1)..=j).map(|k| r_at(i, k) * col[k]).sum();
            col[i] = -acc / r_at(i, i);
        }
    }
    // c_inv is stored by columns: c_inv[j][i] = (R^-1)[i][j].
    let inv_xtx = |a: usize, b: usize| -> f64 {
        // Row a of R^-1 dotted with row b: entries (a..p) x (b..p).
        (a.max(b)..p).map(|k| c_inv[k][a] * c_inv[k][b]).sum()
    };

    // Fitted values and the ANOVA decomposition on the original scale.
    let y = y_series.values();
    let mut ss_res = 0.0;
    let mut ss_reg = 0.0;
    let mut ss_tot = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let mut yhat = intercept;
        for (b, s) in slopes.iter().zip(&x_series) {
            yhat += b * s.values()[i];
        }
        let e = yi - yhat;
        ss_res += e * e;
        let d = yhat - y_mom.mean;
        ss_reg += d * d;
        let t = yi - y_mom.mean;
        ss_tot += t * t;
    }

    let df_reg = p as u64;
    let df_res = (n - p - 1) as u64;
    let ms_reg = ss_reg / df_reg as f64;
    let ms_res = ss_res / df_res as f64;
    let (f, f_p) = if ms_res > 0.0 {
        let f = ms_reg / ms_res;
        (f, inference::f_upper_tail_p(f, df_reg, df_res)?)
    } else {
        (f64::INFINITY, 0.0)
    };

    let r_square = (ss_reg / ss_tot).clamp(0.0, 1.0);
    let summary = ModelSummary {
        r: r_square.sqrt(),
        r_square,
        adj_r_square: 1.0 - (1.0 - r_square) * (n as f64 - 1.0) / df_res as f64,
        std_error_estimate: ms_res.sqrt(),
    };

    let sd_y = y_mom.sd.expect("n >= 3");
    let mut coefficients = Vec::with_capacity(p + 1);
    let mean_quad: f64 = (0..p)
        .flat_map(|a| (0..p).map(move |b| (a, b)))
        .map(|(a, b)| x_mom[a].mean * x_mom[b].mean * inv_xtx(a, b))
        .sum();
    let se0 = (ms_res * (1.0 / n as f64 + mean_quad)).sqrt();
    coefficients.push(coefficient_row("(Constant)", intercept, se0, None, df_res)?);
    for j in 0..p {
        let se = (ms_res * inv_xtx(j, j)).sqrt();
        let beta = slopes[j] * x_mom[j].sd.expect("n >= 3") / sd_y;
        coefficients.push(coefficient_row(
            &predictors[j],
            slopes[j],
            se,
            Some(beta),
            df_res,
        )?);
    }

    let diag: Vec<f64> = (0..p).map(|k| r_at(k, k).abs()).collect();
    let dmax = diag.iter().cloned().fold(f64::MIN, f64::max);
    let dmin = diag.iter().cloned().fold(f64::MAX, f64::min);
    let condition_estimate = (dmax / dmin).powi(2);

    Ok(RegressionModel {
        dependent: dependent.to_string(),
        predictors: predictors.to_vec(),
        n,
        coefficients,
        summary,
        anova: AnovaBlock {
            ss_regression: ss_reg,
            ss_residual: ss_res,
            ss_total: ss_tot,
            df_regression: df_reg,
            df_residual: df_res,
            df_total: (n - 1) as u64,
            ms_regression: ms_reg,
            ms_residual: ms_res,
            f,
            p_value: f_p,
        },
        condition_estimate,
    })
}

fn coefficient_row(
    name: &str,
    b: f64,
    std_error: f64,
    beta: Option<f64>,
    df: u64,
) -> Result<Coefficient, OlsError> {
    let (t, p) = if std_error > 0.0 {
        let t = b / std_error;
        (t, inference::t_two_tailed_p(t, df)?)
    } else if b == 0.0 {
        (0.0, 1.0)
    } else {
        (f64::INFINITY.copysign(b), 0.0)
    };
    Ok(Coefficient {
        name: name.to_string(),
        b,
        std_error,
        beta,
        t,
        p,
    })
}

/// b₀ + Σ bⱼ·xⱼ over the given inputs; every predictor must be present.
pub fn predict(model: &RegressionModel, inputs: &HashMap<String, f64>) -> Result<f64, OlsError> {
    let mut acc = model.coefficients[0].b;
    for coef in &model.coefficients[1..] {
        let x = inputs
            .get(&coef.name)
            .ok_or_else(|| OlsError::MissingPredictor {
                name: coef.name.clone(),
            })?;
        acc += coef.b * x;
    }
    Ok(acc)
}

/// Per-row residuals y − ŷ over a dataset holding the model's variables.
pub fn residuals(model: &RegressionModel, ds: &Dataset) -> Result<Series, OlsError> {
    if ds.n() != model.n {
        return Err(OlsError::DatasetMismatch {
            reason: format!("model was fit on n = {}, dataset has n = {}", model.n, ds.n()),
        });
    }
    let y = ds
        .column(&model.dependent)
        .map_err(|_| OlsError::DatasetMismatch {
            reason: format!("dataset lacks dependent variable {:?}", model.dependent),
        })?;
    let xs: Vec<&Series> = model
        .predictors
        .iter()
        .map(|name| {
            ds.column(name).map_err(|_| OlsError::DatasetMismatch {
                reason: format!("dataset lacks predictor {name:?}"),
            })
        })
        .collect::<Result<_, _>>()?;
    let values: Vec<f64> = (0..ds.n())
        .map(|i| {
            let mut yhat = model.coefficients[0].b;
            for (coef, s) in model.coefficients[1..].iter().zip(&xs) {
                yhat += coef.b * s.values()[i];
            }
            y.values()[i] - yhat
        })
        .collect();
    Series::new("residuals", ds.years().to_vec(), values).map_err(OlsError::Dataset)
}

/// Renders "DEP = b0 ± b1 * X1 ± …" with a parenthesized standard-error line
/// aligned beneath each slope.
pub fn equation_string(model: &RegressionModel, decimals: usize) -> String {
    let mut line = format!(
        "{} = {}",
        model.dependent,
        format::spss(model.coefficients[0].b, decimals)
    );
    let mut se_marks: Vec<(usize, String)> = Vec::new();
    for coef in &model.coefficients[1..] {
        let sign = if coef.b.is_sign_negative() && coef.b != 0.0 {
            " - "
        } else {
            " + "
        };
        line.push_str(sign);
        se_marks.push((
            line.chars().count(),
            format!("({})", format::spss(coef.std_error, decimals)),
        ));
        line.push_str(&format::spss(coef.b.abs(), decimals));
        line.push_str(" * ");
        line.push_str(&coef.name);
    }
    let mut se_line = String::new();
    for (pos, mark) in se_marks {
        while se_line.chars().count() < pos {
            se_line.push(' ');
        }
        se_line.push_str(&mark);
    }
    format!("{line}\n{se_line}")
}
