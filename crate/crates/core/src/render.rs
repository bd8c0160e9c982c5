//! SVG overlay of HN polygons on a shared integer grid.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::bundle::HNBundle;
use crate::error::{Error, Result};

pub const MAX_BUNDLES: usize = 8;

const UNIT: i64 = 40;
const MARGIN: i64 = 40;
const LEGEND_ROW: i64 = 20;
const COLORS: [&str; MAX_BUNDLES] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn small(n: &BigInt) -> Result<i64> {
    n.to_i64()
        .filter(|v| v.abs() <= 10_000)
        .ok_or_else(|| Error::Unsupported(format!("coordinate {n} is too large to draw")))
}

/// Renders up to eight bundles as one SVG document. Output depends only on the input.
pub fn render_svg(bundles: &[HNBundle]) -> Result<String> {
    if bundles.len() > MAX_BUNDLES {
        return Err(Error::Precondition(format!(
            "at most {MAX_BUNDLES} bundles can be drawn, got {}",
            bundles.len()
        )));
    }
    let mut polygons = Vec::with_capacity(bundles.len());
    for b in bundles {
        let mut pts = Vec::new();
        for v in b.polygon() {
            pts.push((small(&v.x)?, small(&v.y)?));
        }
        polygons.push(pts);
    }

    let all = polygons.iter().flatten();
    let x_max = all.clone().map(|p| p.0).max().unwrap_or(0).max(1);
    let y_min = all.clone().map(|p| p.1).min().unwrap_or(0).min(0);
    let y_max = all.map(|p| p.1).max().unwrap_or(0).max(y_min + 1);

    let plot_w = x_max * UNIT;
    let plot_h = (y_max - y_min) * UNIT;
    let width = plot_w + 2 * MARGIN + 160;
    let height = plot_h + 2 * MARGIN + LEGEND_ROW * bundles.len() as i64;
    let px = |x: i64| MARGIN + x * UNIT;
    let py = |y: i64| MARGIN + (y_max - y) * UNIT;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r##"<g class="grid" stroke="#dddddd" stroke-width="1">"##
    );
    for x in 0..=x_max {
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}"/>"#,
            px(x),
            py(y_max),
            py(y_min)
        );
    }
    for y in y_min..=y_max {
        let _ = writeln!(
            svg,
            r#"<line x1="{1}" y1="{0}" x2="{2}" y2="{0}"/>"#,
            py(y),
            px(0),
            px(x_max)
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r##"<line class="axis" x1="{}" y1="{2}" x2="{}" y2="{2}" stroke="#888888" stroke-width="1.5"/>"##,
        px(0),
        px(x_max),
        py(0)
    );

    for (i, (bundle, pts)) in bundles.iter().zip(&polygons).enumerate() {
        let color = COLORS[i];
        let points: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{},{}", px(x), py(y)))
            .collect();
        let _ = writeln!(svg, r#"<g class="bundle" data-bundle="{bundle}">"#);
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.join(" ")
        );
        for &(x, y) in pts {
            let _ = writeln!(
                svg,
                r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#,
                px(x),
                py(y)
            );
        }
        let _ = writeln!(svg, "</g>");
    }

    let legend_y = MARGIN + plot_h + MARGIN / 2;
    for (i, bundle) in bundles.iter().enumerate() {
        let y = legend_y + LEGEND_ROW * i as i64;
        let _ = writeln!(
            svg,
            r#"<rect x="{MARGIN}" y="{}" width="12" height="12" fill="{}"/>"#,
            y - 10,
            COLORS[i]
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{y}" font-family="monospace" font-size="12">{}</text>"#,
            MARGIN + 18,
            escape(&bundle.to_string())
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
