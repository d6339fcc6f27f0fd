//! CSV and SVG emission for sweep results.

use std::fmt::Write as _;

use crate::sweep::SweepRow;

pub const SCHEMA: u32 = 1;
pub const COLUMNS: [&str; 13] = [
    "shape_id",
    "eps",
    "L",
    "A",
    "E",
    "constraint",
    "R_matched",
    "alpha",
    "lambda2_trial",
    "lambda2_fem",
    "lambda2_disk",
    "diff",
    "flags",
];

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), num)
}

pub fn csv_header() -> String {
    format!("# schema={SCHEMA}\n{}\n", COLUMNS.join(","))
}

pub fn csv_line(r: &SweepRow) -> String {
    [
        r.shape_id.clone(),
        num(r.eps),
        num(r.perimeter),
        num(r.area),
        num(r.elastic_energy),
        r.constraint.name().to_string(),
        num(r.r_matched),
        num(r.alpha),
        opt(r.lambda2_trial),
        opt(r.lambda2_fem),
        opt(r.lambda2_disk),
        opt(r.diff),
        r.flags(),
    ]
    .join(",")
}

pub fn csv(rows: &[SweepRow]) -> String {
    let mut out = csv_header();
    for r in rows {
        out.push_str(&csv_line(r));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// About five round tick positions covering `[lo, hi]`.
pub fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

/// Self-contained line chart; non-finite points are dropped.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h) = (720.0, 440.0);
    let (left, right, top, bottom) = (90.0, 170.0, 40.0, 60.0);
    let (pw, ph) = (w - left - right, h - top - bottom);

    let finite: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let fold = |f: fn(&(f64, f64)) -> f64| {
        finite
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (x0, x1) = if finite.is_empty() { (0.0, 1.0) } else { padded(fold(|p| p.0).0, fold(|p| p.0).1) };
    let (y0, y1) = if finite.is_empty() { (-1.0, 1.0) } else { padded(fold(|p| p.1).0, fold(|p| p.1).1) };
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        left + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            top,
            top + ph,
            top + ph + 16.0,
            fmt_tick(t)
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            left + pw,
            left - 6.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    if y0 < 0.0 && y1 > 0.0 {
        let y = sy(0.0);
        let _ = writeln!(
            s,
            r#"<line x1="{left}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black" stroke-dasharray="4 3"/>"#,
            left + pw
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 18.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(22 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        top + ph / 2.0,
        escape(y_label)
    );

    for (i, series) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = series
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        if !pts.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#,
                pts.join(" ")
            );
            for p in &pts {
                let (x, y) = p.split_once(',').expect("formatted pair");
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
            }
        }
        let ly = top + 14.0 + 20.0 * i as f64;
        let lx = left + pw + 16.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 22.0,
            lx + 28.0,
            ly + 4.0,
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(t: f64) -> String {
    if t == 0.0 {
        "0".into()
    } else if t.abs() >= 1e-2 && t.abs() < 1e4 {
        let s = format!("{t:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{t:.1e}")
    }
}

/// Difference against ε, one series per coupling.
pub fn diff_chart(name: &str, rows: &[SweepRow]) -> String {
    let mut alphas: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let series: Vec<Series> = alphas
        .iter()
        .map(|&a| {
            let mut points: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.alpha == a)
                .map(|r| (r.eps, r.diff.unwrap_or(f64::NAN)))
                .collect();
            points.sort_by(|p, q| p.0.total_cmp(&q.0));
            Series {
                label: format!("α = {a}"),
                points,
            }
        })
        .collect();
    let constraint = rows.first().map_or("", |r| r.constraint.name());
    line_chart(
        &format!("{name}: λ₂(Ω) − λ₂(B), {constraint} constraint"),
        "ε",
        "λ₂ difference",
        &series,
    )
}
