use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::results::ResultsDocument;
use crate::error::{Error, Result};
use crate::experiments::Series;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 48.0;

fn colour(series: Series) -> &'static str {
    match series {
        Series::Direct => "#1f77b4",
        Series::Vtd => "#d62728",
        Series::Value => "#2ca02c",
        Series::SecondMoment => "#9467bd",
    }
}

fn label(series: Series) -> &'static str {
    match series {
        Series::Direct => "Direct",
        Series::Vtd => "VTD",
        Series::Value => "Value",
        Series::SecondMoment => "Second moment",
    }
}

/// Variance learning curves of one state: mean ± std bands, mean lines, a
/// marker at each curve's final point, and the dashed true variance.
pub fn render_svg(doc: &ResultsDocument, state: usize) -> String {
    let curves: Vec<_> = [Series::Direct, Series::Vtd]
        .into_iter()
        .filter_map(|s| doc.curve(s))
        .collect();
    let truth = doc.truth.v[state];
    let t0 = *doc.times.first().unwrap_or(&0) as f64;
    let t1 = *doc.times.last().unwrap_or(&0) as f64;
    let (mut lo, mut hi) = (if truth.is_finite() { truth } else { 0.0 }, if truth.is_finite() { truth } else { 0.0 });
    for c in &curves {
        for (m, s) in c.mean.iter().zip(&c.std) {
            lo = lo.min(m[state] - s[state]);
            hi = hi.max(m[state] + s[state]);
        }
    }
    if hi - lo < 1e-12 {
        hi += 0.5;
        lo -= 0.5;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let x = |t: f64| {
        if t1 > t0 {
            LEFT + (t - t0) / (t1 - t0) * (WIDTH - LEFT - RIGHT)
        } else {
            LEFT + 0.5 * (WIDTH - LEFT - RIGHT)
        }
    };
    let y = |v: f64| TOP + (hi - v) / (hi - lo) * (HEIGHT - TOP - BOTTOM);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{} - state {state}</text>"#,
        WIDTH / 2.0,
        doc.config.name
    )
    .unwrap();
    // Axes with end labels.
    let (xa, xb, ya, yb) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    writeln!(out, r#"<path d="M{xa:.2},{ya:.2} L{xa:.2},{yb:.2} L{xb:.2},{yb:.2}" fill="none" stroke="black"/>"#).unwrap();
    for (v, anchor_y) in [(lo, yb), (hi, ya)] {
        writeln!(
            out,
            r#"<text x="{:.2}" y="{anchor_y:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{v:.3}</text>"#,
            xa - 4.0
        )
        .unwrap();
    }
    for (t, anchor) in [(t0, "start"), (t1, "end")] {
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="{anchor}">{t}</text>"#,
            x(t),
            yb + 16.0
        )
        .unwrap();
    }
    for c in &curves {
        let col = colour(c.estimator);
        let upper: Vec<String> = doc
            .times
            .iter()
            .enumerate()
            .map(|(i, &t)| format!("{:.2},{:.2}", x(t as f64), y(c.mean[i][state] + c.std[i][state])))
            .collect();
        let lower: Vec<String> = doc
            .times
            .iter()
            .enumerate()
            .rev()
            .map(|(i, &t)| format!("{:.2},{:.2}", x(t as f64), y(c.mean[i][state] - c.std[i][state])))
            .collect();
        writeln!(
            out,
            r#"<polygon points="{} {}" fill="{col}" fill-opacity="0.2" stroke="none"/>"#,
            upper.join(" "),
            lower.join(" ")
        )
        .unwrap();
        let line: Vec<String> = doc
            .times
            .iter()
            .enumerate()
            .map(|(i, &t)| format!("{:.2},{:.2}", x(t as f64), y(c.mean[i][state])))
            .collect();
        writeln!(out, r#"<polyline points="{}" fill="none" stroke="{col}" stroke-width="1.5"/>"#, line.join(" ")).unwrap();
        let last = doc.times.len() - 1;
        writeln!(
            out,
            r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3" fill="{col}"/>"#,
            x(doc.times[last] as f64),
            y(c.mean[last][state])
        )
        .unwrap();
    }
    if truth.is_finite() {
        writeln!(
            out,
            r#"<line x1="{xa:.2}" y1="{0:.2}" x2="{xb:.2}" y2="{0:.2}" stroke="black" stroke-dasharray="6 4"/>"#,
            y(truth)
        )
        .unwrap();
    }
    for (k, c) in curves.iter().enumerate() {
        let ly = TOP + 8.0 + 16.0 * k as f64;
        writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="12" height="12" fill="{}"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
            xb - 110.0,
            ly - 10.0,
            colour(c.estimator),
            xb - 92.0,
            ly,
            label(c.estimator)
        )
        .unwrap();
    }
    let ly = TOP + 8.0 + 16.0 * curves.len() as f64;
    let (lx, ty, tx) = (xb - 110.0, ly - 4.0, xb - 92.0);
    writeln!(
        out,
        r#"<line x1="{lx:.2}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="black" stroke-dasharray="6 4"/><text x="{tx:.2}" y="{ly:.2}" font-family="sans-serif" font-size="12">True variance</text>"#,
        lx + 12.0
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

/// Writes `{prefix}state{s}.svg` for every state and returns the paths.
pub fn emit_svg_curves(doc: &ResultsDocument, prefix: &Path) -> Result<Vec<PathBuf>> {
    if doc.times.is_empty() {
        return Err(Error::Invariant("cannot plot an empty curve".into()));
    }
    let mut paths = Vec::with_capacity(doc.num_states);
    for s in 0..doc.num_states {
        let mut name = prefix.as_os_str().to_owned();
        name.push(format!("state{s}.svg"));
        let path = PathBuf::from(name);
        std::fs::write(&path, render_svg(doc, s)).map_err(|e| Error::io(&path, e))?;
        paths.push(path);
    }
    Ok(paths)
}
