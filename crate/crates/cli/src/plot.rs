//! Minimal SVG line plot: ratio estimates against `|ζ|` with limit curves.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// A named curve drawn as a polyline.
#[derive(Debug, Clone)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

/// A named set of points with symmetric error bars.
#[derive(Debug, Clone)]
pub struct Markers {
    pub label: String,
    /// `(x, y, half-width of the error bar)`
    pub points: Vec<(f64, f64, f64)>,
}

pub fn ratio_plot(title: &str, curves: &[Curve], markers: &[Markers]) -> String {
    let xs = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.0))
        .chain(markers.iter().flat_map(|m| m.points.iter().map(|p| p.0)));
    let x_max = xs.fold(0.0f64, f64::max).max(1e-9);
    let (y_lo, y_hi) = (0.0, 1.05);
    let sx = |x: f64| MARGIN + (x / x_max) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - ((y.clamp(y_lo, y_hi) - y_lo) / (y_hi - y_lo)) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    // axes and ticks
    let (x0, y0) = (sx(0.0), sy(y_lo));
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.1},{:.1} L{x0:.1},{y0:.1} L{:.1},{y0:.1}" stroke="black" fill="none"/>"#,
        sy(y_hi),
        sx(x_max)
    );
    for i in 0..=5 {
        let y = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{y:.2}</text>"#, x0 - 6.0, sy(y) + 4.0);
        let x = x_max * i as f64 / 5.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x:.2}</text>"#, sx(x), y0 + 16.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">|ζ|</text>"#, WIDTH / 2.0, HEIGHT - 12.0);
    let _ = writeln!(s, r#"<text x="14" y="{:.1}" transform="rotate(-90 14 {:.1})" text-anchor="middle">ratio</text>"#, HEIGHT / 2.0, HEIGHT / 2.0);

    let mut legend = Vec::new();
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = c.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let dash = if c.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(s, r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="1.5"{dash}/>"#, pts.join(" "));
        legend.push((c.label.clone(), color));
    }
    for (i, m) in markers.iter().enumerate() {
        let color = PALETTE[(curves.len() + i) % PALETTE.len()];
        for &(x, y, e) in &m.points {
            let (cx, cy) = (sx(x), sy(y));
            let _ = writeln!(s, r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="{color}"/>"#, sy(y - e), sy(y + e));
            let _ = writeln!(s, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3.5" fill="{color}"/>"#);
        }
        legend.push((m.label.clone(), color));
    }
    for (i, (label, color)) in legend.iter().enumerate() {
        let y = MARGIN + 16.0 * i as f64;
        let x = WIDTH - MARGIN - 170.0;
        let _ = writeln!(s, r#"<rect x="{x:.1}" y="{:.1}" width="12" height="4" fill="{color}"/>"#, y - 4.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{y:.1}">{}</text>"#, x + 18.0, escape(label));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
