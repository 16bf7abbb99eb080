//! Minimal deterministic SVG line and scatter plots.

use std::fmt::Write as _;

use crate::error::{invalid, Result};

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#555555"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Line,
    Markers,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
    /// Free text drawn in the upper left of the plot area.
    pub note: Option<String>,
    /// Stored in a `<desc>` element; not drawn.
    pub description: Option<String>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn axis(v: f64, log: bool) -> Option<f64> {
    let v = if log { v.log10() } else { v };
    v.is_finite().then_some(v)
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi - lo > 1e-12 * (hi.abs() + lo.abs()).max(1e-300) {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let w = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - w, hi + w)
    }
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{v:.1}")
    } else if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

/// Renders the plot. Points that are not finite on the chosen axes are
/// dropped; a plot with no drawable point is an error.
pub fn render_svg(spec: &PlotSpec) -> Result<String> {
    let series: Vec<(&Series, Vec<(f64, f64)>)> = spec
        .series
        .iter()
        .map(|s| {
            let pts = s
                .points
                .iter()
                .filter_map(|&(x, y)| Some((axis(x, spec.log_x)?, axis(y, spec.log_y)?)))
                .collect();
            (s, pts)
        })
        .collect();
    if series.iter().all(|(_, p)| p.is_empty()) {
        return Err(invalid("plot", "no finite points"));
    }
    let all = || series.iter().flat_map(|(_, p)| p.iter().copied());
    let (x0, x1) = range(all().map(|p| p.0));
    let (y0, y1) = range(all().map(|p| p.1));
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut o = String::new();
    let w = &mut o;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    if let Some(d) = &spec.description {
        let _ = writeln!(w, "<desc>{}</desc>", escape(d));
    }
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(w, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(&spec.title));
    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 15.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        w,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(&spec.y_label)
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(w, r#"<line x1="{px:.2}" y1="{0}" x2="{px:.2}" y2="{1}" stroke="black"/>"#, TOP + ph, TOP + ph + 5.0);
        let _ = writeln!(
            w,
            r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            TOP + ph + 20.0,
            tick_label(xv, spec.log_x)
        );
        let _ = writeln!(w, r#"<line x1="{}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            py + 4.0,
            tick_label(yv, spec.log_y)
        );
    }
    for (i, (s, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        match s.style {
            Style::Line if pts.len() > 1 => {
                let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                let _ = writeln!(
                    w,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    path.join(" ")
                );
            }
            _ => {
                for &(x, y) in pts {
                    let _ = writeln!(w, r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{color}"/>"#, sx(x), sy(y));
                }
            }
        }
        let ly = TOP + 16.0 + 16.0 * i as f64;
        let lx = LEFT + pw - 150.0;
        let _ = writeln!(w, r#"<rect x="{lx}" y="{}" width="10" height="10" fill="{color}"/>"#, ly - 9.0);
        let _ = writeln!(w, r#"<text x="{}" y="{ly}">{}</text>"#, lx + 15.0, escape(&s.label));
    }
    if let Some(note) = &spec.note {
        let _ = writeln!(w, r#"<text x="{}" y="{}">{}</text>"#, LEFT + 10.0, TOP + 18.0, escape(note));
    }
    o.push_str("</svg>\n");
    Ok(o)
}
