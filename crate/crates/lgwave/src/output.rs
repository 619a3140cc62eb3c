//! Deterministic file emission: fixed-precision CSV, flat `key = value`
//! summaries, and dependency-free static SVG plots.
//!
//! Everything routes through in-memory text builders so tests can assert
//! byte-for-byte reproducibility; the writers only add the filesystem step.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::Result;

/// Fixed 17-significant-digit scientific notation. Every `f64` value
/// round-trips exactly, and the text does not vary across platforms.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Assemble CSV text: one header row, LF line endings, [`fmt17`] cells.
pub fn csv_text(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let mut first = true;
        for &x in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&fmt17(x));
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    fs::write(path, csv_text(header, rows))?;
    Ok(())
}

/// Flat `key = value` text, one pair per line, in the given order.
pub fn summary_text(pairs: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}

pub fn write_summary(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    fs::write(path, summary_text(pairs))?;
    Ok(())
}

/// One curve of an SVG plot.
pub struct SvgSeries<'a> {
    pub label: &'a str,
    pub ys: &'a [f64],
    /// Any SVG color keyword or #rrggbb.
    pub color: &'a str,
}

const SVG_W: f64 = 800.0;
const SVG_H: f64 = 500.0;
const MARGIN_L: f64 = 62.0;
const MARGIN_R: f64 = 18.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 44.0;

/// Static SVG 1.1 line plot in a fixed 800x500 viewport: axes with five
/// ticks per side, one polyline per series, and a small legend. Axis ranges
/// are supplied by the caller so that every frame of a run shares them.
pub fn svg_text(
    title: &str,
    xs: &[f64],
    series: &[SvgSeries<'_>],
    x_range: (f64, f64),
    y_range: (f64, f64),
) -> String {
    let (x0, x1) = x_range;
    let (y0, y1) = y_range;
    let sx = (SVG_W - MARGIN_L - MARGIN_R) / (x1 - x0);
    let sy = (SVG_H - MARGIN_T - MARGIN_B) / (y1 - y0);
    let px = |x: f64| MARGIN_L + (x - x0) * sx;
    let py = |y: f64| SVG_H - MARGIN_B - (y - y0) * sy;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">"
    );
    let _ = writeln!(
        out,
        "<rect width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"20\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{}</text>",
        0.5 * SVG_W,
        xml_escape(title)
    );

    // Axes.
    let _ = writeln!(
        out,
        "<path d=\"M {l:.2} {t:.2} L {l:.2} {b:.2} L {r:.2} {b:.2}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>",
        l = MARGIN_L,
        t = MARGIN_T,
        b = SVG_H - MARGIN_B,
        r = SVG_W - MARGIN_R,
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let xp = px(xv);
        let yp = py(yv);
        let _ = writeln!(
            out,
            "<line x1=\"{xp:.2}\" y1=\"{b:.2}\" x2=\"{xp:.2}\" y2=\"{b2:.2}\" stroke=\"black\"/>\
             <text x=\"{xp:.2}\" y=\"{tl:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{xv}</text>",
            b = SVG_H - MARGIN_B,
            b2 = SVG_H - MARGIN_B + 5.0,
            tl = SVG_H - MARGIN_B + 18.0,
            xv = trim_tick(xv),
        );
        let _ = writeln!(
            out,
            "<line x1=\"{l:.2}\" y1=\"{yp:.2}\" x2=\"{l2:.2}\" y2=\"{yp:.2}\" stroke=\"black\"/>\
             <text x=\"{tl:.2}\" y=\"{ty:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{yv}</text>",
            l = MARGIN_L,
            l2 = MARGIN_L - 5.0,
            tl = MARGIN_L - 8.0,
            ty = yp + 4.0,
            yv = trim_tick(yv),
        );
    }

    for s in series {
        debug_assert_eq!(s.ys.len(), xs.len());
        let mut points = String::new();
        for (&x, &y) in xs.iter().zip(s.ys) {
            let _ = write!(points, "{:.2},{:.2} ", px(x), py(y.clamp(y0, y1)));
        }
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            points.trim_end(),
            s.color
        );
    }

    // Legend in the upper-right corner of the plot area.
    for (i, s) in series.iter().enumerate() {
        let y = MARGIN_T + 16.0 + 18.0 * i as f64;
        let x = SVG_W - MARGIN_R - 110.0;
        let _ = writeln!(
            out,
            "<line x1=\"{x:.2}\" y1=\"{ym:.2}\" x2=\"{x2:.2}\" y2=\"{ym:.2}\" \
             stroke=\"{}\" stroke-width=\"1.5\"/>\
             <text x=\"{xt:.2}\" y=\"{yt:.2}\" font-family=\"sans-serif\" \
             font-size=\"12\">{}</text>",
            s.color,
            xml_escape(s.label),
            ym = y - 4.0,
            x2 = x + 26.0,
            xt = x + 32.0,
            yt = y,
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_svg(
    path: &Path,
    title: &str,
    xs: &[f64],
    series: &[SvgSeries<'_>],
    x_range: (f64, f64),
    y_range: (f64, f64),
) -> Result<()> {
    fs::write(path, svg_text(title, xs, series, x_range, y_range))?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Short deterministic tick label: up to four significant digits with
/// trailing zeros removed.
fn trim_tick(x: f64) -> String {
    let mut s = format!("{x:.4}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_round_trips_every_value() {
        for &x in &[
            0.0,
            1.0,
            -1.0,
            std::f64::consts::PI,
            1.4142135623730951,
            6.02e23,
            -3.3e-12,
            f64::MIN_POSITIVE,
        ] {
            let s = fmt17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn csv_layout_and_determinism() {
        let rows = vec![vec![0.0, 1.5], vec![0.2, -2.25]];
        let a = csv_text(&["x", "u"], &rows);
        let b = csv_text(&["x", "u"], &rows);
        assert_eq!(a, b);
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "x,u");
        assert_eq!(
            lines[1],
            "0.0000000000000000e0,1.5000000000000000e0"
        );
        assert!(!a.contains('\r'));
    }

    #[test]
    fn summary_is_flat_key_value() {
        let text = summary_text(&[
            ("c".into(), "1.5".into()),
            ("pass".into(), "true".into()),
        ]);
        assert_eq!(text, "c = 1.5\npass = true\n");
    }

    #[test]
    fn svg_is_selfcontained_and_deterministic() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let u: Vec<f64> = xs.iter().map(|x| (x / 49.0).sin()).collect();
        let v: Vec<f64> = xs.iter().map(|x| 1.0 - x / 49.0).collect();
        let series = [
            SvgSeries { label: "u", ys: &u, color: "#1f77b4" },
            SvgSeries { label: "v", ys: &v, color: "#d62728" },
        ];
        let text = svg_text("frame t = 0", &xs, &series, (0.0, 49.0), (0.0, 1.1));
        assert_eq!(
            text,
            svg_text("frame t = 0", &xs, &series, (0.0, 49.0), (0.0, 1.1))
        );
        assert!(text.starts_with("<svg xmlns"));
        assert!(text.trim_end().ends_with("</svg>"));
        assert_eq!(text.matches("<polyline").count(), 2);
        assert!(text.contains("width=\"800\""));
        assert!(!text.contains("http://") || text.contains("http://www.w3.org/2000/svg"));
    }

    #[test]
    fn tick_labels_are_trimmed() {
        assert_eq!(trim_tick(0.0), "0");
        assert_eq!(trim_tick(-0.0), "0");
        assert_eq!(trim_tick(1.25), "1.25");
        assert_eq!(trim_tick(2.2000000000000002), "2.2");
        assert_eq!(trim_tick(-200.0), "-200");
    }
}
