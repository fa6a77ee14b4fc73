//! Static SVG learning curves: per method, the median over seeds of the
//! trailing-window success rate against episode number.

use std::fmt::Write;

use crate::summary::median;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 50.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Trailing-window success rate after each episode.
pub fn rolling_success(successes: &[bool], window: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(successes.len());
    let mut hits = 0usize;
    for (i, &s) in successes.iter().enumerate() {
        hits += usize::from(s);
        if i >= window {
            hits -= usize::from(successes[i - window]);
        }
        out.push(hits as f64 / (i + 1).min(window) as f64);
    }
    out
}

/// Median curve over seeds, truncated to the shortest seed.
pub fn median_curve(per_seed: &[Vec<bool>], window: usize) -> Vec<f64> {
    let curves: Vec<Vec<f64>> = per_seed.iter().map(|s| rolling_success(s, window)).collect();
    let len = curves.iter().map(Vec::len).min().unwrap_or(0);
    (0..len)
        .map(|e| median(&curves.iter().map(|c| Some(c[e])).collect::<Vec<_>>()).unwrap_or(0.0))
        .collect()
}

/// `series` pairs a label with its curve.
pub fn learning_curves_svg(title: &str, series: &[(String, Vec<f64>)], threshold: f64) -> String {
    let max_x = series.iter().map(|(_, c)| c.len()).max().unwrap_or(1).max(2) as f64;
    let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
    let x = |e: f64| MARGIN + pw * e / (max_x - 1.0);
    let y = |v: f64| HEIGHT - MARGIN - ph * v;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<path d="M{l},{t} L{l},{b} L{r},{b}" fill="none" stroke="black"/>"#,
        l = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{tick}</text>"#, MARGIN - 6.0, y(tick) + 4.0);
    }
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{ty}" x2="{}" y2="{ty}" stroke="grey" stroke-dasharray="4 4"/>"#,
        MARGIN,
        WIDTH - MARGIN,
        ty = y(threshold)
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">episode {}</text>"#, WIDTH - MARGIN, HEIGHT - 15.0, max_x as usize);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="start">success rate</text>"#, 6.0, MARGIN - 12.0);

    for (i, (label, curve)) in series.iter().enumerate() {
        let colour = COLOURS[i % COLOURS.len()];
        let points: Vec<String> = curve.iter().enumerate().map(|(e, &v)| format!("{:.1},{:.1}", x(e as f64), y(v))).collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, points.join(" "));
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(svg, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="3"/>"#, WIDTH - MARGIN - 140.0, WIDTH - MARGIN - 120.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, WIDTH - MARGIN - 114.0, ly + 4.0, escape(label));
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
