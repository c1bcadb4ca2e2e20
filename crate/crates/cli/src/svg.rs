//! Minimal SVG line plots: stacked panels sharing one x axis.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 200.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 40.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series {
    pub name: String,
    /// Consecutive points are joined; `None` breaks the line.
    pub points: Vec<Option<(f64, f64)>>,
}

impl Series {
    pub fn new(name: &str, points: impl IntoIterator<Item = Option<(f64, f64)>>) -> Self {
        Self {
            name: name.to_string(),
            points: points.into_iter().collect(),
        }
    }
}

pub struct Panel {
    pub y_label: String,
    pub series: Vec<Series>,
}

impl Panel {
    pub fn new(y_label: &str, series: Vec<Series>) -> Self {
        Self {
            y_label: y_label.to_string(),
            series,
        }
    }
}

fn bounds<'a>(points: impl Iterator<Item = &'a (f64, f64)>, axis: fn(&(f64, f64)) -> f64) -> (f64, f64) {
    let (lo, hi) = points
        .map(axis)
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn all_points(panel: &Panel) -> impl Iterator<Item = &(f64, f64)> {
    panel.series.iter().flat_map(|s| s.points.iter().flatten())
}

/// Renders the panels top to bottom.
pub fn render(title: &str, x_label: &str, panels: &[Panel]) -> String {
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let height = PANEL_HEIGHT * panels.len() as f64 + 20.0;
    let (x_lo, x_hi) = bounds(panels.iter().flat_map(all_points), |p| p.0);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="16" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    for (index, panel) in panels.iter().enumerate() {
        let top = 20.0 + PANEL_HEIGHT * index as f64 + MARGIN_TOP;
        let (y_lo, y_hi) = bounds(all_points(panel), |p| p.1);
        let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
        let sy = |y: f64| top + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

        let _ = writeln!(
            out,
            r##"<rect x="{MARGIN_LEFT}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#444"/>"##
        );
        let bottom = top + plot_h;
        for (value, y) in [(y_lo, bottom), (y_hi, top)] {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 4.0,
                y + 4.0,
                tick(value)
            );
        }
        for (value, anchor) in [(x_lo, "start"), (x_hi, "end")] {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{}" text-anchor="{anchor}">{}</text>"#,
                sx(value),
                bottom + 14.0,
                tick(value)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="14" y="{:.2}" transform="rotate(-90 14 {:.2})" text-anchor="middle">{}</text>"#,
            top + plot_h / 2.0,
            top + plot_h / 2.0,
            escape(&panel.y_label)
        );
        if index + 1 == panels.len() {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
                MARGIN_LEFT + plot_w / 2.0,
                bottom + 30.0,
                escape(x_label)
            );
        }

        for (k, series) in panel.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            for run in series.points.split(|p| p.is_none()) {
                if run.is_empty() {
                    continue;
                }
                let coords: Vec<String> = run
                    .iter()
                    .flatten()
                    .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                    .collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
                    coords.join(" ")
                );
            }
            if panel.series.len() > 1 {
                let _ = writeln!(
                    out,
                    r#"<text x="{}" y="{}" fill="{color}" text-anchor="end">{}</text>"#,
                    WIDTH - MARGIN_RIGHT - 6.0,
                    top + 14.0 + 13.0 * k as f64,
                    escape(&series.name)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

fn tick(value: f64) -> String {
    if value != 0.0 && (value.abs() < 1e-3 || value.abs() >= 1e4) {
        format!("{value:.2e}")
    } else {
        format!("{value:.3}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
