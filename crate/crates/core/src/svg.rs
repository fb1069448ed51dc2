//! Minimal static SVG charts: a polyline, labelled bars, and a scatter.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<path d="M{PAD} {PAD} V{} H{}" fill="none" stroke="black"/>"#,
        H - PAD,
        W - PAD
    );
    out
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn sx(x: f64, (lo, hi): (f64, f64)) -> f64 {
    PAD + (x - lo) / (hi - lo) * (W - 2.0 * PAD)
}

fn sy(y: f64, (lo, hi): (f64, f64)) -> f64 {
    H - PAD - (y - lo) / (hi - lo) * (H - 2.0 * PAD)
}

fn axis_labels(out: &mut String, xr: (f64, f64), yr: (f64, f64)) {
    for (x, anchor) in [(xr.0, "start"), (xr.1, "end")] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{x:.2}</text>"#,
            sx(x, xr),
            H - PAD + 14.0
        );
    }
    for y in [yr.0, yr.1] {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{y:.2}</text>"#,
            PAD - 4.0,
            sy(y, yr) + 3.0
        );
    }
}

/// Polyline through `(x, y)` points with the y axis fixed to `[0, 1]`.
pub fn line_chart(title: &str, points: &[(f64, f64)]) -> String {
    let xr = span(points.iter().map(|p| p.0));
    let yr = (0.0, 1.0);
    let mut out = header(title);
    axis_labels(&mut out, xr, yr);
    let coords: Vec<String> = points
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x, xr), sy(y, yr)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
        coords.join(" ")
    );
    out.push_str("</svg>\n");
    out
}

/// Vertical bars with a label under each.
pub fn bar_chart(title: &str, bars: &[(String, f64)]) -> String {
    let top = bars.iter().map(|b| b.1).fold(0.0, f64::max);
    let yr = (0.0, if top > 0.0 { top } else { 1.0 });
    let mut out = header(title);
    axis_labels(&mut out, (0.0, bars.len() as f64), yr);
    let slot = (W - 2.0 * PAD) / bars.len().max(1) as f64;
    for (i, (label, v)) in bars.iter().enumerate() {
        let x = PAD + i as f64 * slot;
        let y = sy(*v, yr);
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="steelblue"/>"#,
            x + slot * 0.1,
            slot * 0.8,
            H - PAD - y
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="9" text-anchor="middle">{}</text>"#,
            x + slot / 2.0,
            H - PAD + 26.0,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Dots at `(x, y)` on axes fitted to the data.
pub fn scatter_chart(title: &str, points: &[(f64, f64)]) -> String {
    let xr = span(points.iter().map(|p| p.0));
    let yr = span(points.iter().map(|p| p.1));
    let mut out = header(title);
    axis_labels(&mut out, xr, yr);
    for &(x, y) in points {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#,
            sx(x, xr),
            sy(y, yr)
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_has_one_vertex_per_point() {
        let svg = line_chart("M & tau", &[(0.0, 0.2), (0.5, 0.4), (1.0, 0.9)]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("M &amp; tau"));
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts.split(' ').count(), 3);
    }

    #[test]
    fn bars_and_scatter() {
        let svg = bar_chart("b", &[("eng".into(), 3.0), ("deu".into(), 1.0)]);
        assert_eq!(svg.matches("fill=\"steelblue\"").count(), 2);
        let svg = scatter_chart("s", &[(1.0, 1.0)]);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(bar_chart("empty", &[]).contains("</svg>"));
    }
}
