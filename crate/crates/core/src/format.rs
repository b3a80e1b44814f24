//! Numeric formatting in report style: fixed decimals with the leading zero
//! dropped for |v| < 1 (".997", "-.005"), plus a full-precision plain mode.

/// Fixed-decimal value with the leading zero dropped; negative zero after
/// rounding normalizes to the unsigned form.
pub fn spss(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    let zero = format!("{:.decimals$}", 0.0);
    let s = if s == format!("-{zero}") { zero } else { s };
    if let Some(rest) = s.strip_prefix("0.") {
        format!(".{rest}")
    } else if let Some(rest) = s.strip_prefix("-0.") {
        format!("-.{rest}")
    } else {
        s
    }
}

/// Three-decimal significance: anything below .0005 prints ".000".
pub fn sig(p: f64) -> String {
    spss(p, 3)
}

/// Standard-error-of-the-estimate style: six decimals below 10, four above,
/// mirroring the column-width-driven precision of the reference tables.
pub fn see(v: f64) -> String {
    if v.abs() < 10.0 {
        format!("{v:.6}")
    } else {
        format!("{v:.4}")
    }
}

/// Shortest round-trip representation, for `--plain` output.
pub fn plain(v: f64) -> String {
    format!("{v}")
}
