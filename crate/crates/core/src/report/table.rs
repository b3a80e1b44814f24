//! Table builders for correlation matrices and regression output.

use crate::descriptive::CorrelationMatrix;
use crate::ols::RegressionModel;

use super::{FormatMode, ReportTable};

const SIG_FOOTNOTE: &str = "**. Correlation is significant at the 0.01 level (2-tailed).";

/// Correlation matrix in the five-row-per-variable layout: Pearson
/// Correlation, Sig. (2-tailed), Sum of Squares and Cross-products,
/// Covariance, N. Significant correlations carry the ** suffix; diagonal Sig
/// cells render ".".
pub fn render_correlation_table(m: &CorrelationMatrix, mode: FormatMode) -> ReportTable {
    let k = m.variable_names.len();
    let mut headers = vec![String::new(), String::new()];
    headers.extend(m.variable_names.iter().cloned());

    let mut rows = Vec::with_capacity(5 * k);
    let mut any_starred = false;
    for i in 0..k {
        let mut r_row = vec![m.variable_names[i].clone(), "Pearson Correlation".into()];
        let mut sig_row = vec![String::new(), "Sig. (2-tailed)".into()];
        let mut sscp_row = vec![
            String::new(),
            "Sum of Squares and Cross-products".into(),
        ];
        let mut cov_row = vec![String::new(), "Covariance".into()];
        let mut n_row = vec![String::new(), "N".into()];
        for j in 0..k {
            let cell = m.cell(i, j);
            if i == j {
                r_row.push("1".into());
                sig_row.push(".".into());
            } else {
                let mut r = mode.value(cell.r);
                if cell.significant_01 {
                    r.push_str("**");
                    any_starred = true;
                }
                r_row.push(r);
                sig_row.push(mode.sig(cell.p_two_tailed));
            }
            sscp_row.push(mode.value(cell.sscp));
            cov_row.push(mode.value(cell.covariance));
            n_row.push(cell.n.to_string());
        }
        rows.extend([r_row, sig_row, sscp_row, cov_row, n_row]);
    }

    ReportTable {
        title: "Correlations".into(),
        column_headers: vec![headers],
        rows,
        footnotes: if any_starred {
            vec![SIG_FOOTNOTE.into()]
        } else {
            Vec::new()
        },
    }
}

/// The Model Summary / ANOVA / Coefficients triple for a fitted model.
pub fn render_regression_tables(
    model: &RegressionModel,
    mode: FormatMode,
) -> (ReportTable, ReportTable, ReportTable) {
    let predictors_note = format!(
        "a. Predictors: (Constant), {}",
        model.predictors.join(", ")
    );
    let dependent_note_b = format!("b. Dependent Variable: {}", model.dependent);
    let dependent_note_a = format!("a. Dependent Variable: {}", model.dependent);

    let summary = ReportTable {
        title: "Model Summary".into(),
        column_headers: vec![vec![
            "Model".into(),
            "R".into(),
            "R Square".into(),
            "Adjusted R Square".into(),
            "Std. Error of the Estimate".into(),
        ]],
        rows: vec![vec![
            "1".into(),
            mode.value(model.summary.r),
            mode.value(model.summary.r_square),
            mode.value(model.summary.adj_r_square),
            mode.see(model.summary.std_error_estimate),
        ]],
        footnotes: vec![predictors_note.clone()],
    };

    let a = &model.anova;
    let anova = ReportTable {
        title: "ANOVA".into(),
        column_headers: vec![vec![
            "Model".into(),
            String::new(),
            "Sum of Squares".into(),
            "df".into(),
            "Mean Square".into(),
            "F".into(),
            "Sig.".into(),
        ]],
        rows: vec![
            vec![
                "1".into(),
                "Regression".into(),
                mode.value(a.ss_regression),
                a.df_regression.to_string(),
                mode.value(a.ms_regression),
                mode.value(a.f),
                mode.sig(a.p_value),
            ],
            vec![
                String::new(),
                "Residual".into(),
                mode.value(a.ss_residual),
                a.df_residual.to_string(),
                mode.value(a.ms_residual),
                String::new(),
                String::new(),
            ],
            vec![
                String::new(),
                "Total".into(),
                mode.value(a.ss_total),
                a.df_total.to_string(),
                String::new(),
                String::new(),
                String::new(),
            ],
        ],
        footnotes: vec![predictors_note, dependent_note_b],
    };

    let mut coef_rows = Vec::with_capacity(model.coefficients.len());
    for (i, c) in model.coefficients.iter().enumerate() {
        coef_rows.push(vec![
            if i == 0 { "1".into() } else { String::new() },
            c.name.clone(),
            mode.value(c.b),
            mode.value(c.std_error),
            c.beta.map(|b| mode.value(b)).unwrap_or_default(),
            mode.value(c.t),
            mode.sig(c.p),
        ]);
    }
    let coefficients = ReportTable {
        title: "Coefficients".into(),
        column_headers: vec![
            vec![
                "Model".into(),
                String::new(),
                "Unstandardized Coefficients".into(),
                String::new(),
                "Standardized Coefficients".into(),
                "t".into(),
                "Sig.".into(),
            ],
            vec![
                String::new(),
                String::new(),
                "B".into(),
                "Std. Error".into(),
                "Beta".into(),
                String::new(),
                String::new(),
            ],
        ],
        rows: coef_rows,
        footnotes: vec![dependent_note_a],
    };

    (summary, anova, coefficients)
}
