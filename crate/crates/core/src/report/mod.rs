//! SPSS-style report tables and SVG figures.

mod figure;
mod table;

pub use figure::{render_figure, FigureKind, FigureSpec};
pub use table::{render_correlation_table, render_regression_tables};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("figure has no points")]
    DegenerateRange,
    #[error("figure point {index} is not finite: ({x}, {y})")]
    NonFinitePoint { index: usize, x: f64, y: f64 },
}

/// Numeric style for rendered tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormatMode {
    /// Three decimals, leading zero dropped below one.
    #[default]
    Paper,
    /// Full-precision values for tooling.
    Plain,
}

impl FormatMode {
    pub(crate) fn value(&self, v: f64) -> String {
        match self {
            FormatMode::Paper => crate::format::spss(v, 3),
            FormatMode::Plain => crate::format::plain(v),
        }
    }

    pub(crate) fn sig(&self, p: f64) -> String {
        match self {
            FormatMode::Paper => crate::format::sig(p),
            FormatMode::Plain => crate::format::plain(p),
        }
    }

    pub(crate) fn see(&self, v: f64) -> String {
        match self {
            FormatMode::Paper => crate::format::see(v),
            FormatMode::Plain => crate::format::plain(v),
        }
    }
}

/// A layout-ready table: title, header tiers, a rectangular cell grid, and
/// ordered footnotes. Every header tier and row has one cell per leaf column.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ReportTable {
    pub title: String,
    pub column_headers: Vec<Vec<String>>,
    pub rows: Vec<Vec<String>>,
    pub footnotes: Vec<String>,
}

impl ReportTable {
    /// Number of leaf columns.
    pub fn width(&self) -> usize {
        self.column_headers
            .first()
            .map(|t| t.len())
            .or_else(|| self.rows.first().map(|r| r.len()))
            .unwrap_or(0)
    }

    /// True when every header tier and row has exactly `width()` cells.
    pub fn is_rectangular(&self) -> bool {
        let w = self.width();
        self.column_headers.iter().all(|t| t.len() == w) && self.rows.iter().all(|r| r.len() == w)
    }

    /// Plain-text rendering with aligned columns. Label columns (the first
    /// two) are left-aligned, the rest right-aligned. Deterministic.
    pub fn to_text(&self) -> String {
        let w = self.width();
        let mut widths = vec![0usize; w];
        for line in self.column_headers.iter().chain(self.rows.iter()) {
            for (i, cell) in line.iter().enumerate() {
                widths[i] = widths[i].max(cell.chars().count());
            }
        }
        let mut out = String::new();
        out.push_str(&self.title);
        out.push('\n');
        let fmt_line = |cells: &[String]| -> String {
            let mut parts = Vec::with_capacity(w);
            for (i, cell) in cells.iter().enumerate() {
                let pad = widths[i].saturating_sub(cell.chars().count());
                if i < 2 {
                    parts.push(format!("{}{}", cell, " ".repeat(pad)));
                } else {
                    parts.push(format!("{}{}", " ".repeat(pad), cell));
                }
            }
            let mut s = parts.join("  ");
            while s.ends_with(' ') {
                s.pop();
            }
            s
        };
        for tier in &self.column_headers {
            out.push_str(&fmt_line(tier));
            out.push('\n');
        }
        out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (w.saturating_sub(1))));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&fmt_line(row));
            out.push('\n');
        }
        if !self.footnotes.is_empty() {
            out.push('\n');
            for note in &self.footnotes {
                out.push_str(note);
                out.push('\n');
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_text_is_idempotent_and_json_round_trips() {
        let t = ReportTable {
            title: "Demo".into(),
            column_headers: vec![vec!["A".into(), "B".into(), "C".into()]],
            rows: vec![
                vec!["x".into(), "y".into(), ".997".into()],
                vec!["longer".into(), "".into(), "1".into()],
            ],
            footnotes: vec!["a. note".into()],
        };
        assert!(t.is_rectangular());
        assert_eq!(t.to_text(), t.to_text());
        let json = serde_json::to_string(&t).unwrap();
        let back: ReportTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }
}
