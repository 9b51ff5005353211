//! Minimal SVG line plots with a logarithmic value axis.

use std::fmt::Write;

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Renders the positive samples of each series; `comment` is embedded verbatim
/// (with `--` removed) so the plot carries its configuration.
pub fn line_plot(title: &str, series: &[Series], comment: &str) -> String {
    let pos: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|p| p.1 > 0.0 && p.1.is_finite() && p.0.is_finite())
        .collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(out, "<!-- {} -->", comment.replace("--", "- -"));
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="20" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    if pos.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let (t0, t1) = pos.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.0), a.1.max(p.0)));
    let (l0, l1) = pos
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| (a.0.min(p.1.log10()), a.1.max(p.1.log10())));
    let span_t = if t1 > t0 { t1 - t0 } else { 1.0 };
    let span_l = if l1 > l0 { l1 - l0 } else { 1.0 };
    let x = |t: f64| PAD + (t - t0) / span_t * (W - 2.0 * PAD);
    let y = |v: f64| H - PAD - (v.log10() - l0) / span_l * (H - 2.0 * PAD);
    let _ = writeln!(
        out,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let _ = writeln!(
        out,
        r#"<text x="{PAD}" y="{}" font-size="11">t = {t0:.3}</text><text x="{}" y="{}" font-size="11" text-anchor="end">t = {t1:.3}</text>"#,
        H - PAD + 15.0,
        W - PAD,
        H - PAD + 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="5" y="{}" font-size="11">1e{l1:.1}</text><text x="5" y="{}" font-size="11">1e{l0:.1}</text>"#,
        PAD + 4.0,
        H - PAD
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.1 > 0.0 && p.1.is_finite())
            .map(|p| format!("{:.2},{:.2}", x(p.0), y(p.1)))
            .collect();
        if !pts.is_empty() {
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            PAD + 10.0,
            PAD + 15.0 + 14.0 * i as f64,
            escape(s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
