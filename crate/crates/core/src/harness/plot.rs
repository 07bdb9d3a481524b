//! SVG objective-vs-time chart: linear time axis, logarithmic objective axis,
//! one median line and one shaded interquartile band per solver.

use std::fmt::Write as _;
use std::path::Path;

use super::aggregate::AggregateCurve;
use crate::error::{Error, Result};
use crate::solvers::SolverKind;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

fn color(solver: SolverKind) -> &'static str {
    match solver {
        SolverKind::Vfw => "#1f77b4",
        SolverKind::Fcfw => "#ff7f0e",
        SolverKind::Pfw => "#2ca02c",
        SolverKind::Fista => "#d62728",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Point {
    t: f64,
    median: f64,
    p25: f64,
    p75: f64,
}

fn usable(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

/// Renders the chart; returns the SVG text and the number of grid points dropped
/// because a value was non-finite or not positive.
pub fn render_svg(curves: &[AggregateCurve], title: &str) -> (String, usize) {
    let mut dropped = 0;
    let series: Vec<(SolverKind, Vec<Point>)> = curves
        .iter()
        .map(|c| {
            let mut pts = Vec::new();
            for i in 0..c.time.len() {
                let p = Point {
                    t: c.time[i],
                    median: c.median[i],
                    p25: c.p25[i],
                    p75: c.p75[i],
                };
                if p.t.is_finite() && usable(p.median) && usable(p.p25) && usable(p.p75) {
                    pts.push(p);
                } else {
                    dropped += 1;
                }
            }
            (c.solver, pts)
        })
        .collect();

    let all = series.iter().flat_map(|(_, p)| p.iter());
    let (mut t_max, mut y_min, mut y_max) = (0.0f64, f64::INFINITY, 0.0f64);
    for p in all {
        t_max = t_max.max(p.t);
        y_min = y_min.min(p.p25).min(p.median);
        y_max = y_max.max(p.p75).max(p.median);
    }
    if t_max <= 0.0 {
        t_max = 1.0;
    }
    if !y_min.is_finite() {
        y_min = 0.1;
        y_max = 10.0;
    }
    let (mut lo, mut hi) = (y_min.log10(), y_max.log10());
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |t: f64| LEFT + plot_w * t / t_max;
    let sy = |v: f64| TOP + plot_h * (hi - v.log10()) / (hi - lo);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text class="title" x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    );

    // Axes and ticks.
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=5 {
        let t = t_max * i as f64 / 5.0;
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0,
            format_tick(t)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">wall time (s)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let mut decades: Vec<f64> = (lo.ceil() as i32..=hi.floor() as i32).map(|e| 10f64.powi(e)).collect();
    if decades.len() < 2 {
        decades = vec![10f64.powf(lo + pad), 10f64.powf(hi - pad)];
    }
    for v in decades {
        let y = sy(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            format_value(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text transform="translate(18,{:.2}) rotate(-90)" text-anchor="middle">objective (log scale)</text>"#,
        TOP + plot_h / 2.0
    );

    // Bands first so the median lines sit on top.
    for (solver, pts) in &series {
        if pts.is_empty() {
            continue;
        }
        let mut d = String::new();
        for p in pts {
            let _ = write!(d, "{:.2},{:.2} ", sx(p.t), sy(p.p75));
        }
        for p in pts.iter().rev() {
            let _ = write!(d, "{:.2},{:.2} ", sx(p.t), sy(p.p25));
        }
        let _ = writeln!(
            s,
            r#"<polygon class="band" points="{}" fill="{}" fill-opacity="0.2" stroke="none"/>"#,
            d.trim_end(),
            color(*solver)
        );
    }
    for (solver, pts) in &series {
        if pts.is_empty() {
            continue;
        }
        let mut d = String::new();
        for p in pts {
            let _ = write!(d, "{:.2},{:.2} ", sx(p.t), sy(p.median));
        }
        let _ = writeln!(
            s,
            r#"<polyline class="median" data-solver="{}" points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            solver.name(),
            d.trim_end(),
            color(*solver)
        );
    }

    // Legend.
    let lx = WIDTH - RIGHT + 15.0;
    for (i, (solver, _)) in series.iter().enumerate() {
        let ly = TOP + 15.0 + 22.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<g class="legend"><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            lx + 25.0,
            color(*solver),
            lx + 32.0,
            ly + 4.0,
            solver.label()
        );
    }
    s.push_str("</svg>\n");
    (s, dropped)
}

fn format_tick(t: f64) -> String {
    let s = format!("{t:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() { "0".into() } else { s.to_string() }
}

fn format_value(v: f64) -> String {
    if (1e-3..1e4).contains(&v.abs()) {
        format_tick(v)
    } else {
        format!("{v:.0e}")
    }
}

/// Title used for benchmark cells.
pub fn cell_title(sparsity: usize, alpha: f64) -> String {
    format!("K = {sparsity}, α = {alpha}")
}

pub fn render_plot(curves: &[AggregateCurve], title: &str, out_path: &Path) -> Result<usize> {
    if curves.is_empty() {
        return Err(Error::InvalidParameter("nothing to plot".into()));
    }
    let (svg, dropped) = render_svg(curves, title);
    std::fs::write(out_path, svg).map_err(|e| Error::io(out_path, e))?;
    Ok(dropped)
}
