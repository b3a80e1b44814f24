//! Numerically stable moments, sums of squares and cross-products, covariance,
//! and Pearson correlation with two-tailed significance.
//!
//! Moments use a single-pass incremental update (running mean plus running
//! squared deviation); cross-products use a two-pass scheme. Sample (n−1)
//! denominators throughout.

use thiserror::Error;

use crate::dataset::{Dataset, DatasetError, Series};
use crate::inference::{self, InferenceError};

#[derive(Debug, Error)]
pub enum DescriptiveError {
    #[error("series lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("too few observations: need at least {needed}, have {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("variable {name:?} is constant; correlation is undefined")]
    ZeroVariance { name: String },
    #[error("need at least two variables, got {got}")]
    InsufficientVariables { got: usize },
    #[error("correlating {x:?} with {y:?}: {source}")]
    Pair {
        x: String,
        y: String,
        #[source]
        source: Box<DescriptiveError>,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// Count, mean, Σ(x−x̄)², and sample standard deviation of one series.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MomentSummary {
    pub n: usize,
    pub mean: f64,
    /// Σ(x−x̄)², in squared units of the variable.
    pub sum_sq_dev: f64,
    /// Sample standard deviation, √(sum_sq_dev/(n−1)); absent for n < 2.
    pub sd: Option<f64>,
}

impl MomentSummary {
    /// Sample standard deviation, erroring for n < 2.
    pub fn sample_sd(&self) -> Result<f64, DescriptiveError> {
        self.sd.ok_or(DescriptiveError::TooFewObservations {
            needed: 2,
            got: self.n,
        })
    }
}

/// Single-pass stable moments: incremental mean plus running squared
/// deviation, never the Σx² − (Σx)²/n form.
pub fn moments(x: &Series) -> MomentSummary {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &v) in x.values().iter().enumerate() {
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let n = x.len();
    MomentSummary {
        n,
        mean,
        sum_sq_dev: m2,
        sd: if n >= 2 {
            Some((m2 / (n - 1) as f64).sqrt())
        } else {
            None
        },
    }
}

/// Sum of squares and cross-products, Σ(xᵢ−x̄)(yᵢ−ȳ), via two passes.
pub fn sscp(x: &Series, y: &Series) -> Result<f64, DescriptiveError> {
    if x.len() != y.len() {
        return Err(DescriptiveError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let mx = moments(x).mean;
    let my = moments(y).mean;
    Ok(x.values()
        .iter()
        .zip(y.values())
        .map(|(&a, &b)| (a - mx) * (b - my))
        .sum())
}

/// One pairwise correlation entry: r, two-tailed p, SSCP, covariance, n.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CorrelationCell {
    pub r: f64,
    pub p_two_tailed: f64,
    pub sscp: f64,
    /// sscp/(n−1).
    pub covariance: f64,
    pub n: usize,
    /// p < 0.01, the table's ** marker.
    pub significant_01: bool,
}

/// Pearson product-moment correlation with its two-tailed significance.
pub fn pearson(x: &Series, y: &Series) -> Result<CorrelationCell, DescriptiveError> {
    if x.len() != y.len() {
        return Err(DescriptiveError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(DescriptiveError::TooFewObservations { needed: 3, got: n });
    }
    let mx = moments(x);
    let my = moments(y);
    if mx.sum_sq_dev <= 0.0 {
        return Err(DescriptiveError::ZeroVariance {
            name: x.name().to_string(),
        });
    }
    if my.sum_sq_dev <= 0.0 {
        return Err(DescriptiveError::ZeroVariance {
            name: y.name().to_string(),
        });
    }
    let cross = sscp(x, y)?;
    // Rounding can push |r| a hair past 1; clamp before √(1−r²) downstream.
    let r = (cross / (mx.sum_sq_dev * my.sum_sq_dev).sqrt()).clamp(-1.0, 1.0);
    let p = inference::p_from_correlation(r, n)?;
    Ok(CorrelationCell {
        r,
        p_two_tailed: p,
        sscp: cross,
        covariance: cross / (n - 1) as f64,
        n,
        significant_01: p < 0.01,
    })
}

/// Square grid of [`CorrelationCell`] over named variables.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CorrelationMatrix {
    pub variable_names: Vec<String>,
    pub cells: Vec<Vec<CorrelationCell>>,
}

impl CorrelationMatrix {
    pub fn cell(&self, i: usize, j: usize) -> &CorrelationCell {
        &self.cells[i][j]
    }
}

/// All pairwise correlations over the named dataset variables. Each unordered
/// pair is computed once and mirrored, so the matrix is exactly symmetric;
/// diagonal cells are exact (r = 1, p = 0, sscp = Σ(x−x̄)²).
pub fn correlation_matrix(
    ds: &Dataset,
    names: &[String],
) -> Result<CorrelationMatrix, DescriptiveError> {
    if names.len() < 2 {
        return Err(DescriptiveError::InsufficientVariables { got: names.len() });
    }
    let series: Vec<&Series> = names
        .iter()
        .map(|n| ds.column(n))
        .collect::<Result<_, _>>()?;
    let k = series.len();
    let n = ds.n();

    let diagonal: Vec<CorrelationCell> = series
        .iter()
        .map(|s| {
            let m = moments(s);
            CorrelationCell {
                r: 1.0,
                p_two_tailed: 0.0,
                sscp: m.sum_sq_dev,
                covariance: if n >= 2 {
                    m.sum_sq_dev / (n - 1) as f64
                } else {
                    f64::NAN
                },
                n,
                significant_01: true,
            }
        })
        .collect();

    let mut cells = vec![vec![None; k]; k];
    for i in 0..k {
        cells[i][i] = Some(diagonal[i]);
        for j in (i + 1)..k {
            let cell = pearson(series[i], series[j]).map_err(|e| DescriptiveError::Pair {
                x: names[i].clone(),
                y: names[j].clone(),
                source: Box::new(e),
            })?;
            cells[i][j] = Some(cell);
            cells[j][i] = Some(cell);
        }
    }
    Ok(CorrelationMatrix {
        variable_names: names.to_vec(),
        cells: cells
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.expect("filled")).collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_csv_str;
    use crate::dataset::LoadOptions;
    use proptest::prelude::*;

    fn series(name: &str, values: &[f64]) -> Series {
        let years: Vec<i32> = (0..values.len() as i32).collect();
        Series::new(name, years, values.to_vec()).unwrap()
    }

    #[test]
    fn moments_hand_computed() {
        let m = moments(&series("x", &[1.0, 2.0, 3.0, 4.0]));
        assert_eq!(m.n, 4);
        assert_eq!(m.mean, 2.5);
        assert!((m.sum_sq_dev - 5.0).abs() < 1e-12);
        assert!((m.sd.unwrap() - 1.2909944487358056).abs() < 1e-12);
    }

    #[test]
    fn moments_constant_series() {
        let m = moments(&series("c", &[5.0, 5.0, 5.0]));
        assert_eq!(m.mean, 5.0);
        assert_eq!(m.sum_sq_dev, 0.0);
        assert_eq!(m.sd, Some(0.0));
    }

    #[test]
    fn moments_single_observation_has_no_sd() {
        let m = moments(&series("x", &[7.0]));
        assert_eq!(m.mean, 7.0);
        assert!(m.sd.is_none());
        assert!(matches!(
            m.sample_sd(),
            Err(DescriptiveError::TooFewObservations { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn sscp_hand_computed() {
        let x = series("x", &[1.0, 2.0, 3.0]);
        let y = series("y", &[3.0, 2.0, 1.0]);
        assert!((sscp(&x, &y).unwrap() - (-2.0)).abs() < 1e-14);
    }

    #[test]
    fn sscp_self_is_sum_sq_dev() {
        let x = series("x", &[1.5, -2.0, 0.25, 9.0, 4.0]);
        assert!((sscp(&x, &x).unwrap() - moments(&x).sum_sq_dev).abs() < 1e-12);
    }

    #[test]
    fn sscp_length_mismatch() {
        let x = series("x", &[1.0, 2.0]);
        let y = series("y", &[1.0, 2.0, 3.0]);
        assert!(matches!(
            sscp(&x, &y),
            Err(DescriptiveError::LengthMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn pearson_self_correlation() {
        let x = series("x", &[1.0, 4.0, 2.0, 8.0]);
        let cell = pearson(&x, &x).unwrap();
        assert_eq!(cell.r, 1.0);
        assert_eq!(cell.p_two_tailed, 0.0);
        assert!(cell.significant_01);
    }

    #[test]
    fn pearson_rejects_constant_variable() {
        let x = series("c", &[2.0, 2.0, 2.0]);
        let y = series("y", &[1.0, 2.0, 3.0]);
        match pearson(&x, &y).unwrap_err() {
            DescriptiveError::ZeroVariance { name } => assert_eq!(name, "c"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn pearson_needs_three_observations() {
        let x = series("x", &[1.0, 2.0]);
        let y = series("y", &[2.0, 1.0]);
        assert!(matches!(
            pearson(&x, &y),
            Err(DescriptiveError::TooFewObservations { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn pearson_appendix_significance() {
        // r = .046 at n = 43 is far from significant; p ≈ .768.
        // Construct data with that exact sample correlation via a 2D rotation.
        let n = 43;
        let base: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let m = base.iter().sum::<f64>() / n as f64;
        let u: Vec<f64> = base.iter().map(|v| v - m).collect();
        // v orthogonal to u with equal norm: alternate signs trick won't be
        // orthogonal in general, so use Gram-Schmidt on a second sequence.
        let raw: Vec<f64> = (0..n).map(|i| ((i * i) % 17) as f64).collect();
        let mr = raw.iter().sum::<f64>() / n as f64;
        let mut w: Vec<f64> = raw.iter().map(|v| v - mr).collect();
        let proj = w.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>()
            / u.iter().map(|a| a * a).sum::<f64>();
        for (wi, ui) in w.iter_mut().zip(&u) {
            *wi -= proj * ui;
        }
        let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nw = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        let r = 0.046f64;
        let y: Vec<f64> = u
            .iter()
            .zip(&w)
            .map(|(ui, wi)| r * ui / nu + (1.0 - r * r).sqrt() * wi / nw)
            .collect();
        let xs = series("x", &u);
        let ys = series("y", &y);
        let cell = pearson(&xs, &ys).unwrap();
        assert!((cell.r - 0.046).abs() < 1e-12, "r = {}", cell.r);
        assert!((cell.p_two_tailed - 0.768).abs() < 0.005);
        assert!(!cell.significant_01);
    }

    #[test]
    fn matrix_of_identical_series() {
        let csv = "YEAR,a,b\n1,1,1\n2,5,5\n3,2,2\n4,9,9\n";
        let ds = load_csv_str(csv, &LoadOptions::default()).unwrap().dataset;
        let m = correlation_matrix(&ds, &["a".into(), "b".into()]).unwrap();
        assert_eq!(m.cell(0, 1).r, 1.0);
        assert!(m.cell(0, 1).significant_01);
    }

    #[test]
    fn matrix_requires_two_names() {
        let csv = "YEAR,a\n1,1\n2,5\n3,2\n";
        let ds = load_csv_str(csv, &LoadOptions::default()).unwrap().dataset;
        assert!(matches!(
            correlation_matrix(&ds, &["a".into()]),
            Err(DescriptiveError::InsufficientVariables { got: 1 })
        ));
    }

    #[test]
    fn matrix_pair_context_on_error() {
        let csv = "YEAR,a,c\n1,1,7\n2,5,7\n3,2,7\n";
        let ds = load_csv_str(csv, &LoadOptions::default()).unwrap().dataset;
        match correlation_matrix(&ds, &["a".into(), "c".into()]).unwrap_err() {
            DescriptiveError::Pair { x, y, source } => {
                assert_eq!((x.as_str(), y.as_str()), ("a", "c"));
                assert!(matches!(*source, DescriptiveError::ZeroVariance { .. }));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn matrix_diagonal_holds_sum_sq_dev() {
        let csv = "YEAR,a,b\n1,1,2\n2,5,3\n3,2,9\n4,8,1\n";
        let ds = load_csv_str(csv, &LoadOptions::default()).unwrap().dataset;
        let m = correlation_matrix(&ds, &["a".into(), "b".into()]).unwrap();
        let ssd = moments(ds.column("a").unwrap()).sum_sq_dev;
        assert_eq!(m.cell(0, 0).r, 1.0);
        assert!((m.cell(0, 0).sscp - ssd).abs() < 1e-12);
    }

    // Exact mean and Σ(x−x̄)² over rationals: every f64 is a dyadic rational,
    // so this brute-force two-pass oracle is exact.
    fn exact_moments(values: &[f64]) -> (f64, f64) {
        use num_bigint::BigInt;
        use num_rational::BigRational;
        use num_traits::cast::ToPrimitive;
        let rats: Vec<BigRational> = values
            .iter()
            .map(|&v| BigRational::from_float(v).expect("finite"))
            .collect();
        let n = BigRational::from_integer(BigInt::from(values.len() as i64));
        let mean = rats.iter().sum::<BigRational>() / &n;
        let ssd = rats
            .iter()
            .map(|r| {
                let d = r - &mean;
                &d * &d
            })
            .sum::<BigRational>();
        (mean.to_f64().unwrap(), ssd.to_f64().unwrap())
    }

    proptest! {
        #[test]
        fn welford_matches_exact_oracle(values in proptest::collection::vec(-1e4f64..1e4, 2..40)) {
            let s = series("x", &values);
            let m = moments(&s);
            let (mean, ssd) = exact_moments(&values);
            prop_assert!((m.mean - mean).abs() <= 1e-12 * mean.abs().max(1.0));
            prop_assert!((m.sum_sq_dev - ssd).abs() <= 1e-12 * ssd.abs().max(1e-6));
        }

        #[test]
        fn pearson_affine_invariance(
            values in proptest::collection::vec(-100f64..100.0, 5..30),
            scale in prop_oneof![0.001f64..1000.0, -1000f64..-0.001],
            shift in -1e4f64..1e4,
        ) {
            let ys: Vec<f64> = values.iter().enumerate().map(|(i, v)| v * 0.3 + (i as f64).sin() * 10.0).collect();
            let x = series("x", &values);
            let y = series("y", &ys);
            prop_assume!(moments(&x).sum_sq_dev > 1e-9);
            prop_assume!(moments(&y).sum_sq_dev > 1e-9);
            let base = pearson(&x, &y).unwrap();
            let scaled: Vec<f64> = values.iter().map(|v| scale * v + shift).collect();
            let xs = series("xs", &scaled);
            prop_assume!(moments(&xs).sum_sq_dev > 1e-9);
            let tr = pearson(&xs, &y).unwrap();
            let want = if scale > 0.0 { base.r } else { -base.r };
            prop_assert!((tr.r - want).abs() <= 1e-10 * want.abs().max(1e-3),
                "r = {}, want {}", tr.r, want);
        }

        #[test]
        fn pearson_symmetry_and_covariance_identity(
            values in proptest::collection::vec(-100f64..100.0, 5..30),
        ) {
            let ys: Vec<f64> = values.iter().enumerate().map(|(i, v)| v * 0.7 + ((i * i) % 7) as f64).collect();
            let x = series("x", &values);
            let y = series("y", &ys);
            prop_assume!(moments(&x).sum_sq_dev > 1e-9);
            prop_assume!(moments(&y).sum_sq_dev > 1e-9);
            let xy = pearson(&x, &y).unwrap();
            let yx = pearson(&y, &x).unwrap();
            prop_assert_eq!(xy.r, yx.r);
            let n1 = (x.len() - 1) as f64;
            prop_assert!((xy.covariance * n1 - xy.sscp).abs() <= 1e-12 * xy.sscp.abs().max(1e-9));
            prop_assert!(xy.r.abs() <= 1.0);
        }
    }
}
