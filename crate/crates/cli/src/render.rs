//! Minimal static SVG line charts for CSVs written by this tool.

use std::fmt::Write as _;

use crate::output::Table;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: [f64; 4] = [30.0, 160.0, 50.0, 70.0]; // top, right, bottom, left
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

fn nice(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// One polyline per series (second column against the first); a third
/// `stderr` column is drawn as error bars.
pub fn svg(series: &[(String, Table)], title: &str) -> String {
    let finite = |v: &f64| v.is_finite();
    let xs = series.iter().flat_map(|(_, t)| t.rows.iter().map(|r| r[0])).filter(finite);
    let ys = series.iter().flat_map(|(_, t)| {
        t.rows.iter().flat_map(|r| {
            let se = if r.len() > 2 { r[2] } else { 0.0 };
            [r[1] - se, r[1] + se]
        })
    });
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (mut y0, mut y1) = ys.filter(finite).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    y0 = y0.min(0.0);
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let (x0, x1) = if x1 > x0 { (x0, x1) } else { (x0, x0 + 1.0) };
    let pw = WIDTH - MARGIN[1] - MARGIN[3];
    let ph = HEIGHT - MARGIN[0] - MARGIN[2];
    let sx = |x: f64| MARGIN[3] + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN[0] + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, MARGIN[3] + pw / 2.0, escape(title)).unwrap();
    writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#,
        MARGIN[3], MARGIN[0]
    )
    .unwrap();
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, sx(xv), HEIGHT - MARGIN[2] + 16.0, nice(xv)).unwrap();
        writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, MARGIN[3] - 6.0, sy(yv) + 4.0, nice(yv)).unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">t′</text>"#, MARGIN[3] + pw / 2.0, HEIGHT - 12.0).unwrap();
    for (i, (label, table)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = table
            .rows
            .iter()
            .filter(|r| r[0].is_finite() && r[1].is_finite())
            .map(|r| format!("{:.2},{:.2}", sx(r[0]), sy(r[1])))
            .collect();
        writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" ")).unwrap();
        if table.columns.len() > 2 {
            for r in &table.rows {
                let x = sx(r[0]);
                writeln!(
                    s,
                    r#"<line x1="{x:.2}" x2="{x:.2}" y1="{:.2}" y2="{:.2}" stroke="{color}"/>"#,
                    sy(r[1] - r[2]),
                    sy(r[1] + r[2])
                )
                .unwrap();
            }
        }
        let ly = MARGIN[0] + 14.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN[1] + 10.0;
        writeln!(s, r#"<line x1="{lx}" x2="{}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 18.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 24.0, ly + 4.0, escape(label)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
