//! Deterministic SVG renderings of the posterior summaries. No plotting
//! dependency: the figures are simple enough to emit by hand, and identical
//! inputs must produce byte-identical files.

use std::fmt::Write as _;

use ndarray::Array2;

use crate::summaries::Partition;

fn fmt(v: f64) -> String {
    // Fixed precision keeps output stable across platforms.
    format!("{v:.3}")
}

fn svg_open(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt(width),
        fmt(height),
        fmt(width),
        fmt(height)
    );
    let _ = writeln!(
        out,
        r#"<rect width="{}" height="{}" fill="white"/>"#,
        fmt(width),
        fmt(height)
    );
}

fn grey(level: f64) -> String {
    let byte = (255.0 * (1.0 - level.clamp(0.0, 1.0))).round() as u8;
    format!("rgb({byte},{byte},{byte})")
}

/// Heatmap of the subject co-clustering matrix, rows and columns ordered by
/// the estimated partition so blocks are visible.
pub fn coclustering_heatmap(p: &Array2<f64>, estimate: &Partition) -> String {
    let n = p.dim().0;
    let cell = 24.0;
    let margin = 40.0;
    let size = margin + n as f64 * cell + 10.0;

    // Stable sort by estimated cluster, ties by index.
    let labels = estimate.canonical_labels();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (labels[i], i));

    let mut out = String::new();
    svg_open(&mut out, size, size);
    for (row, &i) in order.iter().enumerate() {
        for (col, &j) in order.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                fmt(margin + col as f64 * cell),
                fmt(margin + row as f64 * cell),
                fmt(cell),
                fmt(cell),
                grey(p[[i, j]])
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{}</text>"#,
            fmt(margin - 4.0),
            fmt(margin + row as f64 * cell + cell / 2.0 + 3.0),
            i + 1
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="10" text-anchor="middle">{}</text>"#,
            fmt(margin + row as f64 * cell + cell / 2.0),
            fmt(margin - 6.0),
            i + 1
        );
    }
    out.push_str("</svg>\n");
    out
}

/// One panel per measurement of a profile's estimated location sequence,
/// with vertical shading where the posterior changepoint probability
/// exceeds 0.5.
pub fn location_sequences(locations: &Array2<f64>, changepoints: &Array2<f64>) -> String {
    let (nr, nt) = locations.dim();
    let (panel_w, panel_h, margin, gap) = (420.0, 90.0, 45.0, 18.0);
    let width = margin + panel_w + 20.0;
    let height = margin + nr as f64 * (panel_h + gap);

    let lo = locations.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = locations.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-9);

    let x_of = |t: usize| margin + t as f64 / (nt.max(2) - 1) as f64 * panel_w;
    let step = panel_w / (nt.max(2) - 1) as f64;

    let mut out = String::new();
    svg_open(&mut out, width, height);
    for r in 0..nr {
        let top = margin / 2.0 + r as f64 * (panel_h + gap);
        let y_of = |v: f64| top + panel_h - (v - lo) / span * panel_h;
        for t in 1..nt {
            if changepoints[[r, t]] > 0.5 {
                let _ = writeln!(
                    out,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" fill="rgb(255,220,220)"/>"#,
                    fmt(x_of(t) - step / 2.0),
                    fmt(top),
                    fmt(step),
                    fmt(panel_h)
                );
            }
        }
        let points: Vec<String> = (0..nt)
            .map(|t| format!("{},{}", fmt(x_of(t)), fmt(y_of(locations[[r, t]]))))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            points.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="grey"/>"#,
            fmt(margin),
            fmt(top),
            fmt(panel_w),
            fmt(panel_h)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="10" text-anchor="end">m{}</text>"#,
            fmt(margin - 6.0),
            fmt(top + panel_h / 2.0),
            r + 1
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Overlaid log-posterior traces, one polyline per chain.
pub fn traceplot(traces: &[Vec<f64>]) -> String {
    let (width, height, margin) = (520.0, 240.0, 45.0);
    let n_iter = traces.iter().map(|t| t.len()).max().unwrap_or(0);
    let lo = traces
        .iter()
        .flatten()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let hi = traces
        .iter()
        .flatten()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-9);
    let colors = ["black", "rgb(200,60,60)", "rgb(60,60,200)", "rgb(60,150,60)"];

    let mut out = String::new();
    svg_open(&mut out, width, height);
    for (idx, trace) in traces.iter().enumerate() {
        let points: Vec<String> = trace
            .iter()
            .enumerate()
            .map(|(t, &v)| {
                let x = margin + t as f64 / (n_iter.max(2) - 1) as f64 * (width - 2.0 * margin);
                let y = height - margin - (v - lo) / span * (height - 2.0 * margin);
                format!("{},{}", fmt(x), fmt(y))
            })
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1"/>"#,
            points.join(" "),
            colors[idx % colors.len()]
        );
    }
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="grey"/>"#,
        fmt(margin),
        fmt(margin),
        fmt(width - 2.0 * margin),
        fmt(height - 2.0 * margin)
    );
    out.push_str("</svg>\n");
    out
}
