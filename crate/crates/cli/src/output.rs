//! Trajectory CSV, summary JSON and a small SVG line plot.

use std::fmt::Write as _;
use std::path::Path;

use netpassivity::network::Signals;
use netpassivity::{NetworkSystem, Trajectory};

use crate::CliError;

/// CSV header row. Column `x_i` indexes the combined state, agents first.
pub fn csv_header(sys: &NetworkSystem, decomposed: bool) -> String {
    let (n, m) = (sys.n_agents(), sys.n_controllers());
    let mut cols = vec!["t".to_string()];
    let mut push = |prefix: &str, count: usize| cols.extend((1..=count).map(|i| format!("{prefix}_{i}")));
    push("x", sys.state_dim());
    push("y", n);
    push("u", n);
    push("zeta", m);
    push("mu", m);
    if decomposed {
        push("w", n);
        push("z", n);
    }
    cols.push("disagreement_norm".to_string());
    cols.join(",")
}

fn push_values(line: &mut String, values: &[f64]) {
    for v in values {
        // 17 significant digits
        write!(line, ",{v:.16e}").expect("writing to a String");
    }
}

fn csv_row(t: f64, x: &[f64], s: &Signals, d: f64, decomposed: bool) -> String {
    let mut line = format!("{t:.16e}");
    push_values(&mut line, x);
    push_values(&mut line, &s.y);
    push_values(&mut line, &s.u);
    push_values(&mut line, &s.zeta);
    push_values(&mut line, &s.mu);
    if decomposed {
        push_values(&mut line, s.w.as_deref().unwrap_or_default());
        push_values(&mut line, s.z.as_deref().unwrap_or_default());
    }
    push_values(&mut line, &[d]);
    line
}

/// Full CSV text: a `#` provenance line, the header, one row per recorded
/// sample and a final row when the horizon is not on the recording grid.
pub fn trajectory_csv(sys: &NetworkSystem, traj: &Trajectory, scenario_hash: &str) -> String {
    let decomposed = traj.final_signals.w.is_some();
    let mut out = format!(
        "# scenario_hash={scenario_hash} tool_version={}\n{}\n",
        crate::TOOL_VERSION,
        csv_header(sys, decomposed)
    );
    for (j, t) in traj.times.iter().enumerate() {
        out.push_str(&csv_row(*t, &traj.states[j], &traj.signals[j], traj.disagreement[j], decomposed));
        out.push('\n');
    }
    let last = traj.times.last().copied().unwrap_or(f64::NEG_INFINITY);
    if traj.final_time > last + 0.5 * traj.config.dt {
        out.push_str(&csv_row(
            traj.final_time,
            &traj.final_state,
            &traj.final_signals,
            traj.final_disagreement(),
            decomposed,
        ));
        out.push('\n');
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// Tick positions at 1, 2 or 5 times a power of ten.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}

/// Agent outputs against time, one polyline per agent.
pub fn outputs_svg(traj: &Trajectory, title: &str, scenario_hash: &str) -> String {
    let (w, h) = (800.0, 480.0);
    let (left, right, top, bottom) = (70.0, 130.0, 40.0, 50.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let n = traj.final_signals.y.len();

    let t0 = traj.times.first().copied().unwrap_or(0.0);
    let t1 = traj.final_time.max(t0 + f64::EPSILON);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &traj.signals {
        for v in &s.y {
            y0 = y0.min(*v);
            y1 = y1.max(*v);
        }
    }
    if !(y0.is_finite() && y1.is_finite()) {
        (y0, y1) = (-1.0, 1.0);
    }
    if y1 - y0 < 1e-12 {
        (y0, y1) = (y0 - 1.0, y1 + 1.0);
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let sx = |t: f64| left + (t - t0) / (t1 - t0) * pw;
    let sy = |v: f64| top + (y1 - v) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, "<!-- scenario_hash={scenario_hash} tool_version={} -->", crate::TOOL_VERSION);
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, left + pw / 2.0, escape(title));
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in ticks(t0, t1, 6) {
        let x = sx(t);
        let _ = writeln!(svg, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#, top + ph, top + ph + 5.0);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, top + ph + 18.0, label(t));
    }
    for v in ticks(y0, y1, 6) {
        let y = sy(v);
        let _ = writeln!(svg, r#"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="black"/>"#, left - 5.0);
        let _ = writeln!(svg, r##"<line x1="{left}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#dddddd"/>"##, left + pw);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, left - 8.0, y + 4.0, label(v));
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#, left + pw / 2.0, h - 10.0);
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">y</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );

    for i in 0..n {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for (t, s) in traj.times.iter().zip(&traj.signals) {
            let _ = write!(points, "{:.2},{:.2} ", sx(*t), sy(s.y[i]));
        }
        let _ = write!(points, "{:.2},{:.2}", sx(traj.final_time), sy(traj.final_signals.y[i]));
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>"#);
        let ly = top + 10.0 + 18.0 * i as f64;
        let lx = left + pw + 15.0;
        let _ = writeln!(svg, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{}">y_{}</text>"#, lx + 26.0, ly + 4.0, i + 1);
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
