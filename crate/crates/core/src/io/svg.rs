//! Static SVG plot of mean fidelity against fiber length.

use std::fmt::Write as _;
use std::io::{self, Write};

use crate::harness::SweepResult;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

struct Axes {
    x_max: f64,
}

impl Axes {
    fn x(&self, length_km: f64) -> f64 {
        LEFT + (WIDTH - LEFT - RIGHT) * length_km / self.x_max
    }

    fn y(&self, fidelity: f64) -> f64 {
        TOP + (HEIGHT - TOP - BOTTOM) * (1.0 - fidelity.clamp(0.0, 1.0))
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Picks a round tick step giving at most about ten ticks.
fn tick_step(span: f64) -> f64 {
    let raw = span / 10.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|step| *step >= raw)
        .unwrap_or(10.0 * magnitude)
}

/// Renders the curves as an SVG 1.1 document.
pub fn render_svg(results: &[SweepResult]) -> String {
    let x_max = results
        .iter()
        .flat_map(|r| r.points.iter().map(|p| p.length_km))
        .fold(0.0, f64::max);
    let axes = Axes {
        x_max: if x_max > 0.0 { x_max } else { 1.0 },
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    // Horizontal gridlines every 0.1 in fidelity.
    for k in 0..=10 {
        let f = k as f64 / 10.0;
        let y = axes.y(f);
        let _ = writeln!(
            s,
            r##"<line class="gridline" x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT,
            WIDTH - RIGHT
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{f:.1}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }

    let step = tick_step(axes.x_max);
    let mut k = 0;
    while (k as f64) * step <= axes.x_max + 1e-9 {
        let l = k as f64 * step;
        let x = axes.x(l);
        let _ = writeln!(
            s,
            r##"<line class="tick" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#000000"/>"##,
            HEIGHT - BOTTOM,
            HEIGHT - BOTTOM + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            HEIGHT - BOTTOM + 18.0,
            super::csv::format_sig9(l)
        );
        k += 1;
    }

    let _ = writeln!(
        s,
        r##"<rect class="frame" x="{LEFT:.2}" y="{TOP:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#000000"/>"##,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">fiber length L (km)</text>"#,
        LEFT + 0.5 * (WIDTH - LEFT - RIGHT),
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">average fidelity</text>"#,
        TOP + 0.5 * (HEIGHT - TOP - BOTTOM),
        TOP + 0.5 * (HEIGHT - TOP - BOTTOM)
    );

    for (i, result) in results.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let label = escape(&result.config.label);
        let _ = writeln!(s, r#"<g class="series" data-label="{label}">"#);
        let points: Vec<String> = result
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", axes.x(p.length_km), axes.y(p.mean_fidelity)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="curve" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.join(" ")
        );
        for p in &result.points {
            let x = axes.x(p.length_km);
            let y = axes.y(p.mean_fidelity);
            let lo = axes.y(p.mean_fidelity - p.sd_fidelity);
            let hi = axes.y(p.mean_fidelity + p.sd_fidelity);
            let _ = writeln!(
                s,
                r#"<path class="errorbar" d="M{x:.2},{lo:.2}V{hi:.2}M{:.2},{lo:.2}H{:.2}M{:.2},{hi:.2}H{:.2}" stroke="{color}" fill="none"/>"#,
                x - 3.0,
                x + 3.0,
                x - 3.0,
                x + 3.0
            );
            let _ = writeln!(
                s,
                r#"<circle class="marker" cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#
            );
        }
        let _ = writeln!(s, "</g>");

        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line class="legend" x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{label}</text>"#,
            lx + 26.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_svg<W: Write>(results: &[SweepResult], mut out: W) -> io::Result<()> {
    if results.is_empty() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "no results to plot",
        ));
    }
    out.write_all(render_svg(results).as_bytes())?;
    out.flush()
}
