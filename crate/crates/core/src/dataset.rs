//! Ingestion and alignment of named annual time series.
//!
//! A [`Series`] is one named, year-indexed numeric variable; a [`Dataset`] is a
//! rectangular frame of series sharing a common year vector. CSV ingestion
//! applies listwise deletion: any row with an empty cell is dropped and
//! reported. All types are immutable after construction.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    UnreadableFile {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed header: {reason}")]
    MalformedHeader { reason: String },
    #[error("non-numeric cell at data row {row}, column {column}: {value:?}")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("data row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("no rows remain after listwise deletion")]
    EmptyAfterDeletion,
    #[error("years are not strictly increasing at data row {row}")]
    UnorderedYears { row: usize },
    #[error("series {name:?} is empty")]
    EmptySeries { name: String },
    #[error("series {name:?} has {years} years but {values} values")]
    LengthMismatch {
        name: String,
        years: usize,
        values: usize,
    },
    #[error("series {name:?} has a non-finite value at year {year}")]
    NonFiniteValue { name: String, year: i32 },
    #[error("no common years across the given series")]
    EmptyIntersection,
    #[error("duplicate variable name {name:?}")]
    DuplicateName { name: String },
    #[error("unknown variable {name:?}; available: {}", available.join(", "))]
    UnknownVariable {
        name: String,
        available: Vec<String>,
    },
}

/// One named annual series: strictly increasing years paired with finite values.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Series {
    name: String,
    years: Vec<i32>,
    values: Vec<f64>,
}

impl Series {
    /// Validates the series invariants: non-empty, years strictly increasing,
    /// all values finite. The name is trimmed of surrounding whitespace.
    pub fn new(
        name: impl Into<String>,
        years: Vec<i32>,
        values: Vec<f64>,
    ) -> Result<Self, DatasetError> {
        let name = name.into().trim().to_string();
        if years.is_empty() {
            return Err(DatasetError::EmptySeries { name });
        }
        if years.len() != values.len() {
            return Err(DatasetError::LengthMismatch {
                name,
                years: years.len(),
                values: values.len(),
            });
        }
        for (row, w) in years.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(DatasetError::UnorderedYears { row: row + 2 });
            }
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(DatasetError::NonFiniteValue {
                name,
                year: years[i],
            });
        }
        Ok(Series {
            name,
            years,
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Restricts the series to the given years (which must all be present),
    /// preserving order.
    fn restrict(&self, years: &[i32]) -> Series {
        let values = years
            .iter()
            .map(|y| {
                let i = self.years.binary_search(y).expect("year present");
                self.values[i]
            })
            .collect();
        Series {
            name: self.name.clone(),
            years: years.to_vec(),
            values,
        }
    }
}

/// An aligned frame: every variable shares one common year vector.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Dataset {
    variables: Vec<Series>,
}

impl Dataset {
    /// Builds a dataset from already-aligned series (identical year vectors,
    /// unique names).
    pub fn new(variables: Vec<Series>) -> Result<Self, DatasetError> {
        if variables.is_empty() {
            return Err(DatasetError::EmptyIntersection);
        }
        let years = variables[0].years();
        for s in &variables[1..] {
            if s.years() != years {
                return Err(DatasetError::EmptyIntersection);
            }
        }
        let mut seen = BTreeSet::new();
        for s in &variables {
            if !seen.insert(s.name().to_string()) {
                return Err(DatasetError::DuplicateName {
                    name: s.name().to_string(),
                });
            }
        }
        Ok(Dataset { variables })
    }

    /// Observation count (rows).
    pub fn n(&self) -> usize {
        self.variables[0].len()
    }

    pub fn years(&self) -> &[i32] {
        self.variables[0].years()
    }

    pub fn variables(&self) -> &[Series] {
        &self.variables
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.variables
            .iter()
            .map(|s| s.name().to_string())
            .collect()
    }

    /// Exact-match (case-sensitive) lookup of a variable.
    pub fn column(&self, name: &str) -> Result<&Series, DatasetError> {
        self.variables
            .iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| DatasetError::UnknownVariable {
                name: name.to_string(),
                available: self.variable_names(),
            })
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} observations ({}..{}) of {}",
            self.n(),
            self.years()[0],
            self.years()[self.n() - 1],
            self.variable_names().join(", ")
        )
    }
}

/// Intersects the year ranges of the given series and restricts each to the
/// common years, preserving variable order.
pub fn align(series_list: &[Series]) -> Result<Dataset, DatasetError> {
    if series_list.is_empty() {
        return Err(DatasetError::EmptyIntersection);
    }
    let mut common: BTreeSet<i32> = series_list[0].years().iter().copied().collect();
    for s in &series_list[1..] {
        let ys: BTreeSet<i32> = s.years().iter().copied().collect();
        common = common.intersection(&ys).copied().collect();
    }
    if common.is_empty() {
        return Err(DatasetError::EmptyIntersection);
    }
    let years: Vec<i32> = common.into_iter().collect();
    let variables = series_list.iter().map(|s| s.restrict(&years)).collect();
    Dataset::new(variables)
}

/// CSV parse options.
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Strip thousands separators ("1,234.5" -> 1234.5) before numeric parse.
    pub strip_thousands_separators: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            strip_thousands_separators: true,
        }
    }
}

/// A loaded dataset plus the listwise-deletion report.
#[derive(Debug, Clone)]
pub struct CsvLoad {
    pub dataset: Dataset,
    /// 1-based data-row numbers dropped because of an empty cell.
    pub dropped_rows: Vec<usize>,
}

/// Loads an aligned dataset from a CSV file. The first column must be headed
/// `YEAR` (case-insensitive); remaining columns are variables. Empty cells
/// mark missing observations and trigger listwise deletion of their row.
pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<CsvLoad, DatasetError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| DatasetError::UnreadableFile {
        path: path.display().to_string(),
        source,
    })?;
    load_csv_reader(file, options)
}

/// Loads a dataset from CSV text.
pub fn load_csv_str(text: &str, options: &LoadOptions) -> Result<CsvLoad, DatasetError> {
    load_csv_reader(text.as_bytes(), options)
}

fn load_csv_reader(reader: impl Read, options: &LoadOptions) -> Result<CsvLoad, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| DatasetError::MalformedHeader {
            reason: e.to_string(),
        })?
        .clone();
    let names: Vec<String> = headers
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').trim().to_string())
        .collect();
    if names.is_empty() || !names[0].eq_ignore_ascii_case("YEAR") {
        return Err(DatasetError::MalformedHeader {
            reason: format!(
                "first column must be YEAR, found {:?}",
                names.first().cloned().unwrap_or_default()
            ),
        });
    }
    let var_names = &names[1..];
    if var_names.is_empty() {
        return Err(DatasetError::MalformedHeader {
            reason: "no variable columns after YEAR".to_string(),
        });
    }
    if var_names.iter().any(|n| n.is_empty()) {
        return Err(DatasetError::MalformedHeader {
            reason: "empty variable name".to_string(),
        });
    }
    let mut seen = BTreeSet::new();
    for n in var_names {
        if !seen.insert(n.clone()) {
            return Err(DatasetError::DuplicateName { name: n.clone() });
        }
    }

    let mut years: Vec<i32> = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); var_names.len()];
    let mut dropped_rows = Vec::new();

    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 1; // 1-based data row
        let record = record.map_err(|e| DatasetError::MalformedHeader {
            reason: format!("data row {row}: {e}"),
        })?;
        if record.len() != names.len() {
            return Err(DatasetError::RaggedRow {
                row,
                expected: names.len(),
                found: record.len(),
            });
        }

        let year_cell = record[0].trim();
        let year: i32 = parse_cell(year_cell, options)
            .filter(|v| v.fract() == 0.0 && *v >= i32::MIN as f64 && *v <= i32::MAX as f64)
            .map(|v| v as i32)
            .ok_or_else(|| DatasetError::NonNumericCell {
                row,
                column: names[0].clone(),
                value: year_cell.to_string(),
            })?;

        // Parse every variable cell first so garbage is reported even in rows
        // that listwise deletion would drop.
        let mut parsed: Vec<Option<f64>> = Vec::with_capacity(var_names.len());
        for (j, name) in var_names.iter().enumerate() {
            let cell = record[j + 1].trim();
            if cell.is_empty() {
                parsed.push(None);
                continue;
            }
            let v = parse_cell(cell, options)
                .filter(|v| v.is_finite())
                .ok_or_else(|| DatasetError::NonNumericCell {
                    row,
                    column: name.clone(),
                    value: cell.to_string(),
                })?;
            parsed.push(Some(v));
        }

        if parsed.iter().any(|v| v.is_none()) {
            dropped_rows.push(row);
            continue;
        }
        if let Some(&last) = years.last() {
            if year <= last {
                return Err(DatasetError::UnorderedYears { row });
            }
        }
        years.push(year);
        for (col, v) in columns.iter_mut().zip(parsed) {
            col.push(v.expect("checked above"));
        }
    }

    if years.is_empty() {
        return Err(DatasetError::EmptyAfterDeletion);
    }

    let variables = var_names
        .iter()
        .zip(columns)
        .map(|(name, values)| Series::new(name.clone(), years.clone(), values))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CsvLoad {
        dataset: Dataset::new(variables)?,
        dropped_rows,
    })
}

fn parse_cell(cell: &str, options: &LoadOptions) -> Option<f64> {
    let cleaned;
    let s = if options.strip_thousands_separators && cell.contains(',') {
        cleaned = cell.replace(',', "");
        cleaned.as_str()
    } else {
        cell
    };
    s.parse::<f64>().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(name: &str, years: &[i32], values: &[f64]) -> Series {
        Series::new(name, years.to_vec(), values.to_vec()).unwrap()
    }

    #[test]
    fn series_rejects_unordered_years() {
        let err = Series::new("x", vec![1990, 1990], vec![1.0, 2.0]).unwrap_err();
        assert!(matches!(err, DatasetError::UnorderedYears { .. }));
        let err = Series::new("x", vec![1991, 1990], vec![1.0, 2.0]).unwrap_err();
        assert!(matches!(err, DatasetError::UnorderedYears { .. }));
    }

    #[test]
    fn series_rejects_non_finite() {
        let err = Series::new("x", vec![1990, 1991], vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, DatasetError::NonFiniteValue { year: 1991, .. }));
    }

    #[test]
    fn load_csv_basic() {
        let csv = "YEAR,A,B\n1990,1,4\n1991,2,5\n1992,3,6\n";
        let load = load_csv_str(csv, &LoadOptions::default()).unwrap();
        assert_eq!(load.dataset.n(), 3);
        assert_eq!(load.dataset.variable_names(), vec!["A", "B"]);
        assert!(load.dropped_rows.is_empty());
        assert_eq!(load.dataset.column("B").unwrap().values(), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn load_csv_single_row_succeeds() {
        let csv = "year,X\n2001,7.5\n";
        let load = load_csv_str(csv, &LoadOptions::default()).unwrap();
        assert_eq!(load.dataset.n(), 1);
    }

    #[test]
    fn load_csv_listwise_deletion_reports_rows() {
        let csv = "YEAR,SP500,CPIU\n1990,1,2\n1991,2,3\n1992,,4\n1993,4,5\n1994,5,6\n";
        let load = load_csv_str(csv, &LoadOptions::default()).unwrap();
        assert_eq!(load.dataset.n(), 4);
        assert_eq!(load.dropped_rows, vec![3]);
        assert_eq!(load.dataset.years(), &[1990, 1991, 1993, 1994]);
    }

    #[test]
    fn load_csv_non_numeric_cell_names_location() {
        let csv = "YEAR,A\n1990,1\n1991,abc\n";
        let err = load_csv_str(csv, &LoadOptions::default()).unwrap_err();
        match err {
            DatasetError::NonNumericCell { row, column, value } => {
                assert_eq!(row, 2);
                assert_eq!(column, "A");
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn load_csv_thousands_separators() {
        let csv = "YEAR,A\n1990,\"1,269,247.9\"\n";
        let load = load_csv_str(csv, &LoadOptions::default()).unwrap();
        assert_eq!(load.dataset.column("A").unwrap().values(), &[1269247.9]);
        let off = LoadOptions {
            strip_thousands_separators: false,
        };
        assert!(load_csv_str(csv, &off).is_err());
    }

    #[test]
    fn load_csv_rejects_bad_header() {
        let err = load_csv_str("DATE,A\n1990,1\n", &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, DatasetError::MalformedHeader { .. }));
    }

    #[test]
    fn load_csv_all_rows_missing() {
        let err = load_csv_str("YEAR,A\n1990,\n1991,\n", &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, DatasetError::EmptyAfterDeletion));
    }

    #[test]
    fn align_intersects_year_ranges() {
        let a = series("a", &(1959..=1980).collect::<Vec<_>>(), &[1.0; 22]);
        let b = series("b", &(1970..=2001).collect::<Vec<_>>(), &[2.0; 32]);
        let ds = align(&[a, b]).unwrap();
        assert_eq!(ds.n(), 11);
        assert_eq!(ds.years(), &(1970..=1980).collect::<Vec<_>>()[..]);
    }

    #[test]
    fn align_is_idempotent_on_aligned_data() {
        let csv = "YEAR,A,B\n1990,1,4\n1991,2,5\n1992,3,6\n";
        let ds = load_csv_str(csv, &LoadOptions::default()).unwrap().dataset;
        let again = align(ds.variables()).unwrap();
        assert_eq!(again, ds);
    }

    #[test]
    fn align_disjoint_is_empty_intersection() {
        let a = series("a", &[1990], &[1.0]);
        let b = series("b", &[1991], &[2.0]);
        assert!(matches!(
            align(&[a, b]).unwrap_err(),
            DatasetError::EmptyIntersection
        ));
    }

    #[test]
    fn align_rejects_duplicate_names() {
        let a = series("a", &[1990], &[1.0]);
        assert!(matches!(
            align(&[a.clone(), a]).unwrap_err(),
            DatasetError::DuplicateName { .. }
        ));
    }

    #[test]
    fn column_lookup_is_case_sensitive() {
        let csv = "YEAR,SP500\n1990,1\n";
        let ds = load_csv_str(csv, &LoadOptions::default()).unwrap().dataset;
        assert!(ds.column("SP500").is_ok());
        match ds.column("sp500").unwrap_err() {
            DatasetError::UnknownVariable { available, .. } => {
                assert_eq!(available, vec!["SP500"]);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ingestion_preserves_order() {
        let csv = "YEAR,A\n1990,3\n1995,1\n1999,2\n";
        let ds = load_csv_str(csv, &LoadOptions::default()).unwrap().dataset;
        assert_eq!(ds.column("A").unwrap().values(), &[3.0, 1.0, 2.0]);
    }

    use proptest::prelude::*;

    proptest! {
        // Listwise deletion agrees with a brute-force scan of the raw rows.
        #[test]
        fn listwise_deletion_matches_brute_force(
            rows in proptest::collection::vec(
                (any::<bool>(), any::<bool>(), -100f64..100.0, -100f64..100.0),
                1..40,
            )
        ) {
            let mut csv = String::from("YEAR,A,B\n");
            for (i, (miss_a, miss_b, a, b)) in rows.iter().enumerate() {
                let cell = |missing: bool, v: f64| if missing { String::new() } else { v.to_string() };
                csv.push_str(&format!(
                    "{},{},{}\n",
                    1900 + i as i32,
                    cell(*miss_a, *a),
                    cell(*miss_b, *b)
                ));
            }
            let kept = rows.iter().filter(|(ma, mb, _, _)| !ma && !mb).count();
            let dropped: Vec<usize> = rows
                .iter()
                .enumerate()
                .filter(|(_, (ma, mb, _, _))| *ma || *mb)
                .map(|(i, _)| i + 1)
                .collect();
            match load_csv_str(&csv, &LoadOptions::default()) {
                Ok(load) => {
                    prop_assert_eq!(load.dataset.n(), kept);
                    prop_assert_eq!(load.dropped_rows, dropped);
                }
                Err(DatasetError::EmptyAfterDeletion) => prop_assert_eq!(kept, 0),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }
}
