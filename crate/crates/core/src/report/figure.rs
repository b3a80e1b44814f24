//! Dependency-free SVG 1.1 scatter and line figures.

use std::fmt::Write as _;

use super::ReportError;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 25.0;
const MARGIN_TOP: f64 = 45.0;
const MARGIN_BOTTOM: f64 = 55.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum FigureKind {
    Line,
    Scatter,
}

/// Points plus labels for one figure. Points render in input order.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FigureSpec {
    pub kind: FigureKind,
    pub x_name: String,
    pub y_name: String,
    pub points: Vec<(f64, f64)>,
    pub title: String,
}

/// Axis range with padding; a flat range widens around its value rather than
/// erroring.
fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        let pad = lo.abs().max(1.0) * 0.05;
        return (lo - pad, hi + pad);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

/// Round tick positions covering [lo, hi] with a 1/2/5 step.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        mag
    } else if norm < 3.5 {
        2.0 * mag
    } else if norm < 7.5 {
        5.0 * mag
    } else {
        10.0 * mag
    };
    let first = (lo / step).ceil() * step;
    let mut out = Vec::new();
    let mut t = first;
    while t <= hi + step * 1e-9 {
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-3..1e6).contains(&a) {
        format!("{v:e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else if a >= 1.0 {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.3}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders a standalone SVG document with axes, tick labels, title, and one
/// mark per point. Identical input yields byte-identical output.
pub fn render_figure(spec: &FigureSpec) -> Result<String, ReportError> {
    if spec.points.is_empty() {
        return Err(ReportError::DegenerateRange);
    }
    if let Some((i, &(x, y))) = spec
        .points
        .iter()
        .enumerate()
        .find(|(_, (x, y))| !x.is_finite() || !y.is_finite())
    {
        return Err(ReportError::NonFinitePoint { index: i, x, y });
    }

    let (x_lo, x_hi) = padded_range(spec.points.iter().map(|p| p.0));
    let (y_lo, y_hi) = padded_range(spec.points.iter().map(|p| p.1));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |v: f64| MARGIN_LEFT + (v - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |v: f64| MARGIN_TOP + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(svg, "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{}</text>",
        WIDTH / 2.0,
        esc(&spec.title)
    );

    // Axes.
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    let _ = writeln!(
        svg,
        "  <line x1=\"{x0:.2}\" y1=\"{y0:.2}\" x2=\"{:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>",
        MARGIN_LEFT + plot_w
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{x0:.2}\" y1=\"{:.2}\" x2=\"{x0:.2}\" y2=\"{y0:.2}\" stroke=\"black\"/>",
        MARGIN_TOP
    );

    for t in ticks(x_lo, x_hi) {
        let px = sx(t);
        let _ = writeln!(
            svg,
            "  <line x1=\"{px:.2}\" y1=\"{y0:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            y0 + 18.0,
            fmt_tick(t)
        );
    }
    for t in ticks(y_lo, y_hi) {
        let py = sy(t);
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{x0:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>",
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            x0 - 8.0,
            py + 3.5,
            fmt_tick(t)
        );
    }

    // Axis labels.
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        esc(&spec.x_name)
    );
    let _ = writeln!(
        svg,
        "  <text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 {:.2})\">{}</text>",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        esc(&spec.y_name)
    );

    match spec.kind {
        FigureKind::Scatter => {
            for &(x, y) in &spec.points {
                let _ = writeln!(
                    svg,
                    "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"#2a6fb0\" fill-opacity=\"0.8\"/>",
                    sx(x),
                    sy(y)
                );
            }
        }
        FigureKind::Line => {
            let pts: Vec<String> = spec
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                svg,
                "  <polyline points=\"{}\" fill=\"none\" stroke=\"#2a6fb0\" stroke-width=\"1.5\"/>",
                pts.join(" ")
            );
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: FigureKind, points: Vec<(f64, f64)>) -> FigureSpec {
        FigureSpec {
            kind,
            x_name: "X".into(),
            y_name: "Y".into(),
            points,
            title: "TEST".into(),
        }
    }

    #[test]
    fn scatter_emits_one_mark_per_point() {
        let points: Vec<(f64, f64)> = (0..43).map(|i| (i as f64, (i * i) as f64)).collect();
        let svg = render_figure(&spec(FigureKind::Scatter, points)).unwrap();
        assert_eq!(svg.matches("<circle").count(), 43);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("TEST"));
    }

    #[test]
    fn single_point_renders_with_padded_axes() {
        let svg = render_figure(&spec(FigureKind::Scatter, vec![(1.0, 1.0)])).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn empty_points_is_an_error() {
        assert!(matches!(
            render_figure(&spec(FigureKind::Line, vec![])),
            Err(ReportError::DegenerateRange)
        ));
    }

    #[test]
    fn non_finite_point_is_an_error() {
        assert!(matches!(
            render_figure(&spec(FigureKind::Line, vec![(0.0, f64::NAN)])),
            Err(ReportError::NonFinitePoint { index: 0, .. })
        ));
    }

    #[test]
    fn line_preserves_input_order() {
        let points = vec![(1959.0, 5.0), (1960.0, 3.0), (1961.0, 9.0)];
        let svg = render_figure(&spec(FigureKind::Line, points)).unwrap();
        let poly = svg
            .lines()
            .find(|l| l.contains("<polyline"))
            .expect("polyline present");
        let attr = poly.split("points=\"").nth(1).unwrap();
        let coords: Vec<f64> = attr
            .split('"')
            .next()
            .unwrap()
            .split(' ')
            .map(|p| p.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert!(coords.windows(2).all(|w| w[0] < w[1]), "x must be monotone");
    }

    #[test]
    fn output_is_deterministic() {
        let points: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, (i % 3) as f64)).collect();
        let a = render_figure(&spec(FigureKind::Scatter, points.clone())).unwrap();
        let b = render_figure(&spec(FigureKind::Scatter, points)).unwrap();
        assert_eq!(a, b);
    }
}
