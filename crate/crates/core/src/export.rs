//! Deterministic CSV and SVG output.
//!
//! Numbers are written with 12 significant digits in the style of C's
//! `%.12g`, with `.` as decimal separator and `\n` line endings, so identical
//! inputs give byte-identical files.

use std::fmt::Write as _;

use crate::geometry::{InvariantReport, SampledCurve};

/// Format a float like `%.12g`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    const DIGITS: i32 = 12;
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-4..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Render a header and rows as CSV text.
pub fn csv_table<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub const CURVE_HEADER: [&str; 6] = ["rod", "index", "s", "theta", "x", "y"];

/// Per-node samples of several named curves.
pub fn curves_csv(curves: &[(&str, &SampledCurve)]) -> String {
    let rows = curves.iter().flat_map(|(name, c)| {
        (0..c.len()).map(move |i| {
            vec![
                name.to_string(),
                i.to_string(),
                fmt_num(c.s[i]),
                fmt_num(c.theta[i]),
                fmt_num(c.points[i][0]),
                fmt_num(c.points[i][1]),
            ]
        })
    });
    csv_table(&CURVE_HEADER, rows)
}

pub const REPORT_HEADER: [&str; 17] = [
    "alpha",
    "L1",
    "L2",
    "Lc",
    "theta_tip",
    "theta_bar",
    "tip_ratio",
    "tip_x",
    "tip_y",
    "L2_polyline",
    "Lc_polyline",
    "Lc_first_order",
    "Lc_drift",
    "tip_ratio_drift",
    "tip_line_offset",
    "max_strain",
    "status",
];

/// One invariant row; drifts are relative to `baseline` when given.
pub fn report_row(r: &InvariantReport, baseline: Option<&InvariantReport>) -> Vec<String> {
    let (lc_drift, ratio_drift) = baseline
        .map(|b| (r.lc - b.lc, r.tip_ratio - b.tip_ratio))
        .unwrap_or((0.0, 0.0));
    vec![
        fmt_num(r.alpha),
        fmt_num(r.l1),
        fmt_num(r.l2),
        fmt_num(r.lc),
        fmt_num(r.theta_tip),
        fmt_num(r.theta_bar),
        fmt_num(r.tip_ratio),
        fmt_num(r.tip[0]),
        fmt_num(r.tip[1]),
        fmt_num(r.l2_polyline),
        fmt_num(r.lc_polyline),
        fmt_num(r.lc_first_order),
        fmt_num(lc_drift),
        fmt_num(ratio_drift),
        fmt_num(r.tip_line_offset),
        fmt_num(r.max_strain),
        "ok".to_string(),
    ]
}

/// A row for an amplitude that failed, keeping the column count.
pub fn failed_row(alpha: f64, reason: &str) -> Vec<String> {
    let mut row = vec![fmt_num(alpha)];
    row.extend(std::iter::repeat_n(String::new(), REPORT_HEADER.len() - 2));
    row.push(csv_field(reason));
    row
}

/// Quote a free-text field if it needs it.
pub fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// Stroke style of one polyline.
#[derive(Debug, Clone)]
pub struct Stroke {
    pub color: &'static str,
    pub width: f64,
    pub opacity: f64,
    pub dashed: bool,
}

impl Stroke {
    pub fn solid(color: &'static str) -> Self {
        Self {
            color,
            width: 1.5,
            opacity: 1.0,
            dashed: false,
        }
    }
}

/// Static plot of polylines in world coordinates (y up).
#[derive(Debug, Clone, Default)]
pub struct SvgPlot {
    title: String,
    items: Vec<(Vec<[f64; 2]>, Stroke)>,
    markers: Vec<([f64; 2], &'static str)>,
}

impl SvgPlot {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Default::default()
        }
    }

    pub fn polyline(&mut self, points: Vec<[f64; 2]>, stroke: Stroke) -> &mut Self {
        self.items.push((points, stroke));
        self
    }

    pub fn marker(&mut self, p: [f64; 2], color: &'static str) -> &mut Self {
        self.markers.push((p, color));
        self
    }

    pub fn render(&self, width_px: f64) -> String {
        let all = self
            .items
            .iter()
            .flat_map(|(pts, _)| pts.iter())
            .chain(self.markers.iter().map(|(p, _)| p));
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for p in all {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        let margin = 0.05 * span;
        let (x0, y1) = (x0 - margin, y1 + margin);
        let (w, h) = (x1 - x0 + margin, y1 - y0 + margin);
        let scale = width_px / w;
        let height_px = h * scale;
        let map = |p: &[f64; 2]| ((p[0] - x0) * scale, (y1 - p[1]) * scale);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.3} {:.3}">"#,
            width_px, height_px, width_px, height_px
        );
        let _ = writeln!(out, "<title>{}</title>", xml_escape(&self.title));
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for (pts, stroke) in &self.items {
            let mut d = String::new();
            for (i, p) in pts.iter().enumerate() {
                let (x, y) = map(p);
                let _ = write!(d, "{}{:.3},{:.3}", if i == 0 { "M" } else { " L" }, x, y);
            }
            let dash = if stroke.dashed {
                r#" stroke-dasharray="6,4""#
            } else {
                ""
            };
            let _ = writeln!(
                out,
                r#"<path d="{d}" fill="none" stroke="{}" stroke-width="{}" stroke-opacity="{}"{dash}/>"#,
                stroke.color, stroke.width, stroke.opacity
            );
        }
        for (p, color) in &self.markers {
            let (x, y) = map(p);
            let _ = writeln!(
                out,
                r#"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="{color}"/>"#
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_like_printf_g() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(-2.25), "-2.25");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(std::f64::consts::PI * 1000.0), "3141.59265359");
        assert_eq!(fmt_num(1.5e-7), "1.5e-07");
        assert_eq!(fmt_num(2.0e15), "2e+15");
        assert_eq!(fmt_num(123456789012.0), "123456789012");
        assert_eq!(fmt_num(0.0001), "0.0001");
        assert_eq!(fmt_num(0.000010670272082), "1.0670272082e-05");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let text = csv_table(&["a", "b"], vec![vec!["1".into(), "2".into()]]);
        assert_eq!(text, "a,b\n1,2\n");
        assert_eq!(csv_field("x, y"), "\"x, y\"");
        assert_eq!(failed_row(1.0, "boom").len(), REPORT_HEADER.len());
    }

    #[test]
    fn svg_is_deterministic() {
        let mut plot = SvgPlot::new("t");
        plot.polyline(vec![[0.0, 0.0], [1.0, 0.5]], Stroke::solid("black"));
        plot.marker([1.0, 0.5], "red");
        let a = plot.render(400.0);
        assert_eq!(a, plot.render(400.0));
        assert!(a.starts_with("<svg"));
        assert!(a.contains("M"));
    }
}
