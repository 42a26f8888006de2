//! Minimal SVG line charts on the unit square.

use std::fmt::Write as _;

use crate::metrics::{Curve, CurveKind};

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 50.0;

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub color: &'static str,
    pub dashed: bool,
}

impl Series {
    pub fn solid(name: &str, points: Vec<(f64, f64)>, color: &'static str) -> Self {
        Self {
            name: name.to_string(),
            points,
            color,
            dashed: false,
        }
    }

    pub fn dashed(name: &str, points: Vec<(f64, f64)>, color: &'static str) -> Self {
        Self {
            dashed: true,
            ..Self::solid(name, points, color)
        }
    }
}

fn px(x: f64) -> f64 {
    MARGIN_LEFT + x.clamp(0.0, 1.0) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
}

fn py(y: f64) -> f64 {
    HEIGHT - MARGIN_BOTTOM - y.clamp(0.0, 1.0) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the series over `[0,1] x [0,1]` with axes, ticks and a legend.
pub fn render_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let _ = writeln!(
            s,
            r##"<line x1="{x}" y1="{y0}" x2="{x}" y2="{y1}" stroke="#e5e5e5"/><line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#e5e5e5"/>"##,
            x = px(t),
            y = py(t),
            x0 = px(0.0),
            x1 = px(1.0),
            y0 = py(0.0),
            y1 = py(1.0),
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{t}</text><text x="{}" y="{}" text-anchor="end">{t}</text>"#,
            px(t),
            py(0.0) + 16.0,
            px(0.0) - 6.0,
            py(t) + 4.0,
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        px(0.0),
        py(1.0),
        px(1.0) - px(0.0),
        py(0.0) - py(1.0)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (px(0.0) + px(1.0)) / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{y}" text-anchor="middle" transform="rotate(-90 16 {y})">{}</text>"#,
        escape(y_label),
        y = (py(0.0) + py(1.0)) / 2.0
    );

    for series in series {
        let pts: Vec<String> = series
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let dash = if series.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="{}"{dash} points="{}"/>"#,
            series.color,
            if series.dashed { 1.2 } else { 2.0 },
            pts.join(" ")
        );
    }

    for (k, series) in series.iter().enumerate() {
        let y = py(1.0) + 14.0 + 16.0 * k as f64;
        let x = px(0.0) + 10.0;
        let dash = if series.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
            x + 22.0,
            series.color,
            x + 28.0,
            y + 4.0,
            escape(&series.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// A curve together with its ideal and random reference lines.
pub fn curve_svg(curve: &Curve, name: &str) -> String {
    let (title, x_label, y_label, ideal, random) = match curve.kind {
        CurveKind::CumulativeAccuracy => (
            "Cumulative accuracy vs decision rate",
            "decision rate",
            "cumulative accuracy G",
            vec![(0.0, 0.0), (1.0, 1.0)],
            vec![(0.0, 0.0), (1.0, 0.5)],
        ),
        CurveKind::AccuracyRate => (
            "Accuracy vs decision rate",
            "decision rate",
            "accuracy",
            vec![(0.0, 1.0), (1.0, 1.0)],
            vec![(0.0, 0.5), (1.0, 0.5)],
        ),
        CurveKind::Roc => (
            "ROC",
            "false positive rate",
            "true positive rate",
            vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)],
            vec![(0.0, 0.0), (1.0, 1.0)],
        ),
    };
    render_svg(
        title,
        x_label,
        y_label,
        &[
            Series::dashed("ideal", ideal, "#2ca02c"),
            Series::dashed("random", random, "#7f7f7f"),
            Series::solid(name, curve.points.clone(), "#1f77b4"),
        ],
    )
}
