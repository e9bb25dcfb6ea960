//! Two-parameter barcodes as SVG: one segment per bar from `i` to `j`,
//! positive bars blue and negative bars red. Infinite coordinates are clipped
//! just past the largest finite one and drawn dashed.

use std::fmt::Write;

use rkdec_core::barcode::{Bar, SignedBarcode};

use crate::commands::CliError;

const SIZE: f64 = 400.0;
const PAD: f64 = 40.0;
const BLUE: &str = "#1f5fbf";
const RED: &str = "#c0392b";

pub fn svg(text: &str) -> Result<String, CliError> {
    let sbc = SignedBarcode::from_json(text).map_err(|e| CliError::Input(e.to_string()))?;
    if sbc.n != 2 {
        return Err(CliError::Input(format!("plotting needs n = 2, got n = {}", sbc.n)));
    }
    Ok(render(&sbc))
}

fn render(sbc: &SignedBarcode) -> String {
    let finite: Vec<f64> = sbc
        .positive
        .iter()
        .chain(&sbc.negative)
        .flat_map(|b| b.i.iter().chain(&b.j))
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let margin = ((hi - lo) * 0.15).max(1.0);
    let (lo, clip) = (lo.min(0.0), hi + margin);
    let span = (clip - lo).max(f64::EPSILON);
    let px = |v: f64| PAD + (v - lo) / span * (SIZE - 2.0 * PAD);
    let py = |v: f64| SIZE - PAD - (v - lo) / span * (SIZE - 2.0 * PAD);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    let (x0, y0) = (px(lo), py(lo));
    writeln!(s, r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{:.2}" y2="{y0:.2}" stroke="black"/>"#, px(clip)).unwrap();
    writeln!(s, r#"<line class="axis" x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{:.2}" stroke="black"/>"#, py(clip)).unwrap();
    for v in [lo, hi] {
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{v}</text>"#, px(v), y0 + 16.0).unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{v}</text>"#, x0 - 6.0, py(v) + 4.0).unwrap();
    }
    let mut bar = |b: &Bar, sign: &str, color: &str| {
        let j: Vec<f64> = b.j.iter().map(|&v| if v.is_finite() { v } else { clip }).collect();
        let ray = b.j.iter().any(|v| v.is_infinite());
        let dash = if ray { r#" stroke-dasharray="6 3""# } else { "" };
        writeln!(
            s,
            r#"<line class="bar {sign}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"{dash}/>"#,
            px(b.i[0]),
            py(b.i[1]),
            px(j[0]),
            py(j[1]),
        )
        .unwrap();
        writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(b.i[0]), py(b.i[1])).unwrap();
    };
    for b in &sbc.positive {
        bar(b, "positive", BLUE);
    }
    for b in &sbc.negative {
        bar(b, "negative", RED);
    }
    s.push_str("</svg>");
    s
}
