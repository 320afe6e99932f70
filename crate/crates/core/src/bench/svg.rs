//! Minimal SVG line charts: mean per agent count with a ±std band per solver.

use std::fmt::Write;

use super::{BenchResult, Metric};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 40.0, 60.0); // left, right, top, bottom
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn nice_step(span: f64) -> f64 {
    if span <= 0.0 || !span.is_finite() {
        return 1.0;
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let m = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

/// Renders one metric of a sweep as a standalone SVG document.
pub fn render_chart(result: &BenchResult, metric: Metric) -> String {
    let rows = result.aggregate(&[metric]);
    let xs: Vec<f64> = result.params.agent_counts.iter().map(|&a| a as f64).collect();
    let (x_lo, x_hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let (x_lo, x_hi) = if x_lo.is_finite() { (x_lo, x_hi.max(x_lo + 1.0)) } else { (0.0, 1.0) };
    let mut y_hi = rows
        .iter()
        .filter_map(|r| Some(r.mean? + r.std.unwrap_or(0.0)))
        .fold(0.0f64, f64::max);
    if y_hi <= 0.0 {
        y_hi = 1.0;
    }
    let step = nice_step(y_hi);
    let y_hi = (y_hi / step).ceil() * step;

    let (ml, mr, mt, mb) = MARGIN;
    let pw = WIDTH - ml - mr;
    let ph = HEIGHT - mt - mb;
    let px = |x: f64| ml + (x - x_lo) / (x_hi - x_lo) * pw;
    let py = |y: f64| mt + ph - (y / y_hi) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, metric.label());

    // axes and ticks
    let _ = writeln!(
        s,
        r#"<path d="M{ml},{mt} V{} H{}" fill="none" stroke="black"/>"#,
        mt + ph,
        ml + pw
    );
    let mut y = 0.0;
    while y <= y_hi + step * 1e-9 {
        let (gx, gy) = (ml + pw, py(y));
        let (tx, ty) = (ml - 6.0, py(y) + 4.0);
        let _ = writeln!(
            s,
            r##"<line x1="{ml}" x2="{gx}" y1="{gy:.2}" y2="{gy:.2}" stroke="#ddd"/><text x="{tx}" y="{ty:.2}" text-anchor="end">{y}</text>"##
        );
        y += step;
    }
    for &x in &xs {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            px(x),
            mt + ph + 18.0,
            x
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">Number of agents</text>"#, ml + pw / 2.0, HEIGHT - 15.0);

    for (slot, solver) in result.solvers.iter().enumerate() {
        let color = COLORS[slot % COLORS.len()];
        let pts: Vec<(f64, f64, f64)> = rows
            .iter()
            .filter(|r| r.solver_slot == slot)
            .filter_map(|r| Some((r.agents as f64, r.mean?, r.std.unwrap_or(0.0))))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let upper: Vec<String> = pts.iter().map(|&(x, m, sd)| format!("{:.2},{:.2}", px(x), py((m + sd).min(y_hi)))).collect();
        let lower: Vec<String> =
            pts.iter().rev().map(|&(x, m, sd)| format!("{:.2},{:.2}", px(x), py((m - sd).max(0.0)))).collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{} {}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#,
            upper.join(" "),
            lower.join(" ")
        );
        let line: Vec<String> = pts.iter().map(|&(x, m, _)| format!("{:.2},{:.2}", px(x), py(m))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, line.join(" "));
        let ly = mt + 12.0 + 16.0 * slot as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{0}" x2="{1}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{2}" y="{3}">{solver}</text>"#,
            ml + pw - 90.0,
            ml + pw - 70.0,
            ml + pw - 64.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}
