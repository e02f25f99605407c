//! Minimal SVG output for parity plots and importance bar charts.

use std::fmt::Write;

pub(crate) fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Scatter of `(true, predicted)` with an optional fitted line
/// `predicted = slope·true + intercept` and an annotation.
pub fn parity_svg(pairs: &[(f64, f64)], fit: Option<(f64, f64)>, annotation: &str) -> String {
    const SIZE: f64 = 480.0;
    const MARGIN: f64 = 60.0;
    let (mut lo, mut hi) = pairs
        .iter()
        .flat_map(|&(t, p)| [t, p])
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !(hi > lo) {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let span = SIZE - 2.0 * MARGIN;
    let sx = |v: f64| MARGIN + (v - lo) / (hi - lo) * span;
    let sy = |v: f64| SIZE - MARGIN - (v - lo) / (hi - lo) * span;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{span}" height="{span}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r##"<line class="identity" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="4 4"/>"##,
        sx(lo),
        sy(lo),
        sx(hi),
        sy(hi)
    );
    if let Some((slope, intercept)) = fit {
        let _ = writeln!(
            svg,
            r##"<line class="fit" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#d62728"/>"##,
            sx(lo),
            sy(slope * lo + intercept),
            sx(hi),
            sy(slope * hi + intercept)
        );
    }
    for &(t, p) in pairs {
        let _ = writeln!(
            svg,
            r##"<circle class="point" cx="{:.2}" cy="{:.2}" r="3" fill="#1f77b4" fill-opacity="0.7"/>"##,
            sx(t),
            sy(p)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">true formation energy (eV)</text>"#,
        SIZE / 2.0,
        SIZE - 20.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 18 {})">predicted (eV)</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="14">{}</text>"#,
        MARGIN + 8.0,
        MARGIN + 20.0,
        escape(annotation)
    );
    svg.push_str("</svg>\n");
    svg
}

/// Horizontal bar chart, one bar per `(label, value)`, in the given order.
pub fn bar_chart_svg(items: &[(String, f64)], title: &str) -> String {
    const WIDTH: f64 = 720.0;
    const LABEL: f64 = 260.0;
    const BAR: f64 = 18.0;
    let height = 60.0 + items.len() as f64 * (BAR + 6.0);
    let max = items.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    let scale = if max > 0.0 { (WIDTH - LABEL - 40.0) / max } else { 0.0 };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    for (i, (label, value)) in items.iter().enumerate() {
        let y = 40.0 + i as f64 * (BAR + 6.0);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="12">{}</text>"#,
            LABEL - 6.0,
            y + BAR * 0.75,
            escape(label)
        );
        let _ = writeln!(
            svg,
            r##"<rect class="bar" x="{LABEL}" y="{y:.1}" width="{:.2}" height="{BAR}" fill="#1f77b4"/>"##,
            value * scale
        );
    }
    svg.push_str("</svg>\n");
    svg
}
