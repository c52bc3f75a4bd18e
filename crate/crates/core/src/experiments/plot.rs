//! Minimal SVG rendering: line charts and trajectory overlays.

use std::fmt::Write as _;

use crate::guidance::Path;
use crate::world_sim::{Field, TrialTrace};

use super::{CycleDriftResult, DtSweepResult};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Round numbers for axis ticks spanning `[lo, hi]`.
fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    if span.is_nan() || span <= 0.0 {
        return vec![lo];
    }
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= 6.0).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Line chart with markers. With `log_x` the x axis is base-10 logarithmic
/// and every x must be positive.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], log_x: bool) -> String {
    let tx = |x: f64| if log_x { x.log10() } else { x };
    let all: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite() && (!log_x || *x > 0.0))
        .collect();
    let (mut x0, mut x1) = all.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
        (a.min(tx(p.0)), b.max(tx(p.0)))
    });
    let mut y1 = all.iter().fold(f64::NEG_INFINITY, |a, p| a.max(p.1));
    if all.is_empty() {
        (x0, x1, y1) = (0.0, 1.0, 1.0);
    }
    let y0 = 0.0f64.min(all.iter().fold(0.0, |a: f64, p| a.min(p.1)));
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    y1 += 0.05 * (y1 - y0);
    let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (tx(x) - x0) / (x1 - x0) * pw;
    let py = |y: f64| MARGIN_TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        MARGIN_LEFT + pw / 2.0,
        escape(title)
    );

    // Grid and ticks.
    let x_ticks: Vec<f64> = if log_x {
        (x0.floor() as i32..=x1.ceil() as i32)
            .flat_map(|e| [1.0, 2.0, 5.0].map(|m| m * 10f64.powi(e)))
            .filter(|v| (x0 - 1e-9..=x1 + 1e-9).contains(&v.log10()))
            .collect()
    } else {
        linear_ticks(x0, x1)
    };
    for v in x_ticks {
        let x = px(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{MARGIN_TOP}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
            MARGIN_TOP + ph,
            MARGIN_TOP + ph + 16.0,
            tick_label(v)
        );
    }
    for v in linear_ticks(y0, y1) {
        let y = py(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            MARGIN_LEFT + pw,
            MARGIN_LEFT - 6.0,
            y + 4.0,
            tick_label(v)
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + pw / 2.0,
        HEIGHT - 14.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        MARGIN_TOP + ph / 2.0,
        MARGIN_TOP + ph / 2.0,
        escape(y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .copied()
            .filter(|(x, y)| x.is_finite() && y.is_finite() && (!log_x || *x > 0.0))
            .map(|(x, y)| (px(x), py(y)))
            .collect();
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        for (x, y) in &pts {
            let _ = writeln!(svg, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3.5" fill="{color}"/>"#);
        }
        let ly = MARGIN_TOP + 14.0 + 20.0 * i as f64;
        let lx = MARGIN_LEFT + pw + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Mean truth-to-warehouse error at each return, one line per mode.
pub fn cycle_drift_svg(result: &CycleDriftResult) -> String {
    let series: Vec<Series> = result
        .curves
        .iter()
        .map(|c| Series {
            label: c.mode.to_string(),
            points: c.points.iter().map(|p| (p.cycle as f64, p.target_mean)).collect(),
        })
        .collect();
    line_chart(
        &format!("Warehouse return error ({} trials)", result.seeds.len()),
        "cycle",
        "position error at return (in)",
        &series,
        false,
    )
}

pub fn dt_sweep_svg(result: &DtSweepResult) -> String {
    let series = [Series {
        label: "fused_camera".into(),
        points: result.points.iter().map(|p| (p.filter_dt, p.mean_xy_rmse)).collect(),
    }];
    line_chart(
        &format!("Position RMSE vs filter step ({} trials each)", result.seeds.len()),
        "filter dt (s, log scale)",
        "mean (x, y) RMSE (in)",
        &series,
        true,
    )
}

/// Top-down view of one trial: field, landmarks, planned path, truth, and
/// estimate. Stretches where a landmark was in view are highlighted under
/// the truth track.
pub fn trajectory_svg(trace: &TrialTrace, field: &Field, path: &Path) -> String {
    const SCALE: f64 = 4.0;
    const PAD: f64 = 30.0;
    let w = field.width * SCALE + 2.0 * PAD;
    let h = field.height * SCALE + 2.0 * PAD + 40.0;
    let px = |x: f64| PAD + x * SCALE;
    let py = |y: f64| PAD + (field.height - y) * SCALE;
    let pts = |it: &mut dyn Iterator<Item = (f64, f64)>| -> String {
        it.map(|(x, y)| format!("{:.1},{:.1}", px(x), py(y))).collect::<Vec<_>>().join(" ")
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r##"<rect x="{PAD}" y="{PAD}" width="{:.1}" height="{:.1}" fill="#f7f7f7" stroke="black"/>"##,
        field.width * SCALE,
        field.height * SCALE
    );

    // Runs of ticks with a landmark in view.
    let mut run: Vec<(f64, f64)> = Vec::new();
    let flush = |run: &mut Vec<(f64, f64)>, svg: &mut String| {
        if run.len() > 1 {
            let _ = writeln!(
                svg,
                r##"<polyline points="{}" fill="none" stroke="#2ca02c" stroke-opacity="0.3" stroke-width="10" stroke-linecap="round"/>"##,
                pts(&mut run.iter().copied())
            );
        }
        run.clear();
    };
    for tick in &trace.ticks {
        if tick.landmark.is_some() {
            run.push((tick.truth.x, tick.truth.y));
        } else {
            flush(&mut run, &mut svg);
        }
    }
    flush(&mut run, &mut svg);

    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#888" stroke-width="1.5" stroke-dasharray="6 4"/>"##,
        pts(&mut path.waypoints().iter().map(|p| (p.x, p.y)))
    );
    let _ = writeln!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        pts(&mut trace.ticks.iter().map(|t| (t.truth.x, t.truth.y)))
    );
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
        pts(&mut trace.ticks.iter().map(|t| (t.estimate.x, t.estimate.y)))
    );
    for lm in &field.landmarks {
        let _ = writeln!(
            svg,
            r##"<rect x="{:.1}" y="{:.1}" width="12" height="12" fill="#2ca02c"/><text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="10" fill="white">{}</text>"##,
            px(lm.x) - 6.0,
            py(lm.y) - 6.0,
            px(lm.x),
            py(lm.y) + 4.0,
            lm.id
        );
    }

    let ly = h - 20.0;
    let legend = [
        ("#888", "planned path"),
        ("black", "truth"),
        ("#1f77b4", "estimate"),
        ("#2ca02c", "landmark in view"),
    ];
    for (i, (color, label)) in legend.iter().enumerate() {
        let lx = PAD + 140.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/><text x="{:.1}" y="{:.1}">{label}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{PAD}" y="18">{} seed {}</text>"#,
        trace.mode, trace.seed
    );
    svg.push_str("</svg>\n");
    svg
}
