//! Deterministic SVG output for point sets and colorings.

use std::fmt::Write as _;

use crate::coloring::Color;
use crate::field::PlanePoint;

const SCALE: f64 = 120.0;
const MARGIN: f64 = 30.0;
const RADIUS: f64 = 5.0;

#[derive(Clone, Debug, Default)]
pub struct Figure<'a> {
    pub points: &'a [PlanePoint],
    /// Text drawn beside each point; `None` draws nothing.
    pub labels: Vec<Option<String>>,
    pub colors: Vec<Option<Color>>,
    /// Circle centered on a point index, with the given radius in plane
    /// units.
    pub circle: Option<(usize, f64)>,
    pub title: Option<String>,
}

fn num(v: f64) -> String {
    // avoid "-0.000000"
    let s = format!("{v:.6}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render(fig: &Figure<'_>) -> String {
    let coords: Vec<(f64, f64)> = fig.points.iter().map(|p| p.approx()).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    if let Some(&(x, y)) = coords.first() {
        (x0, y0, x1, y1) = (x, y, x, y);
    }
    for &(x, y) in &coords {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if let Some((c, r)) = fig.circle {
        let (cx, cy) = coords[c];
        x0 = x0.min(cx - r);
        x1 = x1.max(cx + r);
        y0 = y0.min(cy - r);
        y1 = y1.max(cy + r);
    }
    let width = (x1 - x0) * SCALE + 2.0 * MARGIN;
    let height = (y1 - y0) * SCALE + 2.0 * MARGIN;
    // flip y so the plane's orientation is preserved
    let px = |x: f64| (x - x0) * SCALE + MARGIN;
    let py = |y: f64| (y1 - y) * SCALE + MARGIN;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        num(width),
        num(height),
        num(width),
        num(height)
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(t) = &fig.title {
        let _ = writeln!(out, "<title>{}</title>", escape(t));
    }
    if let Some((c, r)) = fig.circle {
        let (cx, cy) = coords[c];
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="gray" stroke-dasharray="4 3"/>"#,
            num(px(cx)),
            num(py(cy)),
            num(r * SCALE)
        );
    }
    for (i, &(x, y)) in coords.iter().enumerate() {
        let (cx, cy) = (num(px(x)), num(py(y)));
        let style = match fig.colors.get(i).copied().flatten() {
            Some(Color::Red) => r##"fill="#d62728" stroke="#d62728""##,
            Some(Color::Blue) => r##"fill="white" stroke="#1f77b4" stroke-width="2""##,
            None => r##"fill="#999999" stroke="none""##,
        };
        let r = if fig.colors.get(i).copied().flatten().is_some() { RADIUS } else { RADIUS / 2.0 };
        let _ = writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="{}" {style}/>"#, num(r));
        if let Some(Some(l)) = fig.labels.get(i) {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-size="10" font-family="sans-serif">{}</text>"#,
                num(px(x) + RADIUS + 1.0),
                num(py(y) - RADIUS - 1.0),
                escape(l)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
