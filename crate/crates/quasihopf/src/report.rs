//! Deterministic result rendering: CSV tables and SVG line plots.
//!
//! Every emitter here is bit-stable: fixed significant digits, fixed
//! palette, no timestamps or environment-dependent content. Two runs of
//! the same computation must produce byte-identical files; the CSV
//! comment line carries the provenance (configuration hash, horizons,
//! seeds) instead.

/// Format with the given number of significant digits (scientific).
pub fn fmt_sig(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits.max(1) - 1, x)
}

/// Default significant digits for numeric table cells.
pub const CSV_DIGITS: usize = 12;

/// Numeric cell with the standard precision.
pub fn cell(x: f64) -> String {
    fmt_sig(x, CSV_DIGITS)
}

/// A CSV table with one leading comment line and a header row.
#[derive(Clone, Debug)]
pub struct CsvTable {
    comment: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    /// `comment` is emitted as the first line behind "# "; keep the
    /// provenance there (config hash, tolerances, horizons, seed).
    pub fn new(comment: impl Into<String>, header: &[&str]) -> CsvTable {
        CsvTable {
            comment: comment.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("# ");
        out.push_str(&self.comment);
        out.push('\n');
        out.push_str(&join_csv(&self.header));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&join_csv(row));
            out.push('\n');
        }
        out
    }
}

fn join_csv(cells: &[String]) -> String {
    cells.iter().map(|c| escape_csv(c)).collect::<Vec<_>>().join(",")
}

fn escape_csv(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Fixed series palette.
pub const PALETTE: [&str; 6] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

const PLOT_MARGIN: f64 = 46.0;

/// Minimal line/scatter plot rendered straight to SVG.
#[derive(Clone, Debug)]
pub struct SvgPlot {
    title: String,
    width: f64,
    height: f64,
    series: Vec<Series>,
    x_label: String,
    y_label: String,
}

#[derive(Clone, Debug)]
struct Series {
    label: String,
    points: Vec<(f64, f64)>,
    scatter: bool,
}

impl SvgPlot {
    pub fn new(title: impl Into<String>, width: u32, height: u32) -> SvgPlot {
        SvgPlot {
            title: title.into(),
            width: width as f64,
            height: height as f64,
            series: Vec::new(),
            x_label: String::new(),
            y_label: String::new(),
        }
    }

    pub fn axis_labels(&mut self, x: impl Into<String>, y: impl Into<String>) {
        self.x_label = x.into();
        self.y_label = y.into();
    }

    pub fn add_line(&mut self, label: impl Into<String>, points: Vec<(f64, f64)>) {
        self.series.push(Series { label: label.into(), points, scatter: false });
    }

    pub fn add_scatter(&mut self, label: impl Into<String>, points: Vec<(f64, f64)>) {
        self.series.push(Series { label: label.into(), points, scatter: true });
    }

    pub fn render(&self) -> String {
        let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.series {
            for &(x, y) in &s.points {
                x_min = x_min.min(x);
                x_max = x_max.max(x);
                y_min = y_min.min(y);
                y_max = y_max.max(y);
            }
        }
        if !x_min.is_finite() {
            (x_min, x_max, y_min, y_max) = (0.0, 1.0, 0.0, 1.0);
        }
        if x_max == x_min {
            x_max = x_min + 1.0;
        }
        if y_max == y_min {
            y_max = y_min + 1.0;
        }
        // A little headroom so curves do not sit on the frame.
        let pad_y = 0.05 * (y_max - y_min);
        y_min -= pad_y;
        y_max += pad_y;

        let (w, h, m) = (self.width, self.height, PLOT_MARGIN);
        let sx = |x: f64| m + (x - x_min) / (x_max - x_min) * (w - 2.0 * m);
        let sy = |y: f64| h - m - (y - y_min) / (y_max - y_min) * (h - 2.0 * m);

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" \
             viewBox=\"0 0 {w:.0} {h:.0}\">\n"
        ));
        out.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{w:.0}\" height=\"{h:.0}\" fill=\"#ffffff\"/>\n"
        ));
        out.push_str(&format!(
            "<rect x=\"{m:.1}\" y=\"{m:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"none\" \
             stroke=\"#333333\" stroke-width=\"1\"/>\n",
            w - 2.0 * m,
            h - 2.0 * m
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"14\" \
             text-anchor=\"middle\">{}</text>\n",
            0.5 * w,
            0.7 * m,
            xml_escape(&self.title)
        ));
        // Corner tick labels on both axes.
        for (value, x, y, anchor) in [
            (x_min, m, h - m + 16.0, "start"),
            (x_max, w - m, h - m + 16.0, "end"),
            (y_min, m - 4.0, h - m, "end"),
            (y_max, m - 4.0, m + 4.0, "end"),
        ] {
            out.push_str(&format!(
                "<text x=\"{x:.1}\" y=\"{y:.1}\" font-family=\"sans-serif\" font-size=\"11\" \
                 text-anchor=\"{anchor}\">{}</text>\n",
                trim_label(value)
            ));
        }
        if !self.x_label.is_empty() {
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
                 text-anchor=\"middle\">{}</text>\n",
                0.5 * w,
                h - 8.0,
                xml_escape(&self.x_label)
            ));
        }
        if !self.y_label.is_empty() {
            out.push_str(&format!(
                "<text x=\"14\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\" \
                 text-anchor=\"middle\" transform=\"rotate(-90 14 {:.1})\">{}</text>\n",
                0.5 * h,
                0.5 * h,
                xml_escape(&self.y_label)
            ));
        }
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            if s.scatter {
                for &(x, y) in &s.points {
                    out.push_str(&format!(
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.2\" fill=\"{color}\"/>\n",
                        sx(x),
                        sy(y)
                    ));
                }
            } else {
                let pts: Vec<String> =
                    s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                out.push_str(&format!(
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
                     points=\"{}\"/>\n",
                    pts.join(" ")
                ));
            }
            // Legend entry.
            let ly = m + 16.0 + 16.0 * i as f64;
            out.push_str(&format!(
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n",
                w - m - 150.0,
                ly - 9.0
            ));
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{ly:.1}\" font-family=\"sans-serif\" font-size=\"11\">{}\
                 </text>\n",
                w - m - 136.0,
                xml_escape(&s.label)
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn trim_label(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits_round_trip() {
        for x in [1.0, -0.00012345678901234, 6.0221407599998e23, 0.5 + 0.6f64.sqrt()] {
            let s = fmt_sig(x, 12);
            let back: f64 = s.parse().unwrap();
            assert!(
                (back - x).abs() <= 1e-11 * x.abs(),
                "{x} -> {s} -> {back}"
            );
        }
        assert_eq!(fmt_sig(1.0, 3), "1.00e0");
    }

    #[test]
    fn csv_layout_and_escaping() {
        let mut t = CsvTable::new("hash=00ff seed=7", &["t", "value", "note"]);
        t.push(vec![cell(1.0), cell(2.5), "plain".into()]);
        t.push(vec![cell(2.0), cell(-0.125), "needs, quoting \"here\"".into()]);
        let s = t.render();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "# hash=00ff seed=7");
        assert_eq!(lines[1], "t,value,note");
        assert!(lines[2].starts_with("1.00000000000e0,2.50000000000e0"));
        assert!(lines[3].ends_with("\"needs, quoting \"\"here\"\"\""));
    }

    #[test]
    fn svg_is_deterministic_and_self_contained() {
        let mut p = SvgPlot::new("radius history", 640, 400);
        p.axis_labels("t", "r");
        p.add_line("orbit", vec![(0.0, 1.0), (1.0, 0.5), (2.0, 0.8)]);
        p.add_scatter("samples", vec![(0.5, 0.7)]);
        let a = p.render();
        let b = p.render();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("polyline"));
        assert!(a.contains("circle"));
        assert!(a.contains(PALETTE[0]));
        assert!(!a.to_lowercase().contains("date"));
    }

    #[test]
    fn degenerate_ranges_do_not_divide_by_zero() {
        let mut p = SvgPlot::new("flat", 300, 200);
        p.add_line("constant", vec![(0.0, 2.0), (1.0, 2.0)]);
        let s = p.render();
        assert!(!s.contains("NaN"));
        let empty = SvgPlot::new("empty", 300, 200).render();
        assert!(!empty.contains("NaN"));
    }
}
