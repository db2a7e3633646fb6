//! Output plumbing: round-trip CSV, schema-tagged JSON, and a small SVG
//! writer. Plots are presentation only; every figure gets a sidecar file
//! carrying the full data.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

/// JSON schema tag carried by every JSON artifact.
pub const SCHEMA: &str = "gravre/1";

/// Requested output formats.
#[derive(Debug, Clone, Copy)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Formats {
    pub fn parse(spec: &str) -> anyhow::Result<Self> {
        let mut f = Formats {
            csv: false,
            json: false,
            svg: false,
        };
        for part in spec.split(',') {
            match part.trim() {
                "csv" => f.csv = true,
                "json" => f.json = true,
                "svg" => f.svg = true,
                "" => {}
                other => anyhow::bail!("unknown output format {other:?} (expected csv,json,svg)"),
            }
        }
        Ok(f)
    }
}

/// Format a float with 17 significant digits (full f64 round trip).
pub fn num(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        // Integral values stay readable and still round-trip.
        format!("{x:.1}")
    } else {
        format!("{x:.16e}")
    }
}

/// Write a CSV file with a header and full-precision rows.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> anyhow::Result<()> {
    let mut text = String::new();
    writeln!(text, "{}", header.join(",")).unwrap();
    for row in rows {
        writeln!(text, "{}", row.join(",")).unwrap();
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

/// A fixed-viewport line plot with linear axes.
pub struct SvgPlot {
    width: f64,
    height: f64,
    margin: f64,
    x_range: (f64, f64),
    y_range: (f64, f64),
    body: String,
    title: String,
}

impl SvgPlot {
    pub fn new(title: &str, x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        Self {
            width: 720.0,
            height: 480.0,
            margin: 56.0,
            x_range,
            y_range,
            body: String::new(),
            title: title.to_string(),
        }
    }

    fn x(&self, x: f64) -> f64 {
        let (a, b) = self.x_range;
        self.margin + (x - a) / (b - a).max(1e-300) * (self.width - 2.0 * self.margin)
    }

    fn y(&self, y: f64) -> f64 {
        let (a, b) = self.y_range;
        self.height
            - self.margin
            - (y - a) / (b - a).max(1e-300) * (self.height - 2.0 * self.margin)
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], color: &str, width: f64, dashed: bool) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        let mut pen_down = false;
        for &(x, y) in pts {
            if !x.is_finite() || !y.is_finite() {
                pen_down = false;
                continue;
            }
            let cmd = if pen_down { 'L' } else { 'M' };
            write!(d, "{cmd}{:.2} {:.2} ", self.x(x), self.y(y)).unwrap();
            pen_down = true;
        }
        let dash = if dashed {
            " stroke-dasharray=\"6 4\""
        } else {
            ""
        };
        writeln!(
            self.body,
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"{dash}/>",
            d.trim_end()
        )
        .unwrap();
    }

    pub fn vline(&mut self, x: f64, color: &str, dashed: bool) {
        self.polyline(
            &[(x, self.y_range.0), (x, self.y_range.1)],
            color,
            1.0,
            dashed,
        );
    }

    pub fn point(&mut self, x: f64, y: f64, color: &str, radius: f64) {
        writeln!(
            self.body,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{radius}\" fill=\"{color}\"/>",
            self.x(x),
            self.y(y)
        )
        .unwrap();
    }

    /// Filled cell for heatmaps; (x, y) is the cell center in data units.
    pub fn cell(&mut self, x: f64, y: f64, dx: f64, dy: f64, color: &str) {
        let x0 = self.x(x - dx / 2.0);
        let y0 = self.y(y + dy / 2.0);
        let w = (self.x(x + dx / 2.0) - x0).abs();
        let h = (self.y(y - dy / 2.0) - y0).abs();
        writeln!(
            self.body,
            "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{color}\"/>"
        )
        .unwrap();
    }

    /// Short diagonal tick used for hatching regions.
    pub fn hatch_tick(&mut self, x: f64, y: f64, rising: bool, color: &str) {
        let px = self.x(x);
        let py = self.y(y);
        let d = 3.0;
        let (dy0, dy1) = if rising { (d, -d) } else { (-d, d) };
        writeln!(
            self.body,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"0.7\"/>",
            px - d,
            py + dy0,
            px + d,
            py + dy1
        )
        .unwrap();
    }

    pub fn save(self, path: &Path, x_label: &str, y_label: &str) -> anyhow::Result<()> {
        let mut svg = String::new();
        writeln!(
            svg,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
            self.width, self.height, self.width, self.height
        )
        .unwrap();
        writeln!(svg, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>").unwrap();
        // Axes box.
        writeln!(
            svg,
            "<rect x=\"{m}\" y=\"{m}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"#333\"/>",
            m = self.margin,
            w = self.width - 2.0 * self.margin,
            h = self.height - 2.0 * self.margin
        )
        .unwrap();
        writeln!(
            svg,
            "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
            self.width / 2.0,
            xml_escape(&self.title)
        )
        .unwrap();
        // Axis range labels.
        for (val, px, py, anchor) in [
            (
                self.x_range.0,
                self.margin,
                self.height - self.margin + 16.0,
                "middle",
            ),
            (
                self.x_range.1,
                self.width - self.margin,
                self.height - self.margin + 16.0,
                "middle",
            ),
        ] {
            writeln!(
                svg,
                "<text x=\"{px:.1}\" y=\"{py:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"{anchor}\">{val:.4}</text>"
            )
            .unwrap();
        }
        for (val, py) in [
            (self.y_range.0, self.height - self.margin),
            (self.y_range.1, self.margin),
        ] {
            writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{val:.4}</text>",
                self.margin - 6.0,
                py + 4.0
            )
            .unwrap();
        }
        writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            self.width / 2.0,
            self.height - 12.0,
            xml_escape(x_label)
        )
        .unwrap();
        writeln!(
            svg,
            "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>",
            self.height / 2.0,
            self.height / 2.0,
            xml_escape(y_label)
        )
        .unwrap();
        svg.push_str(&self.body);
        svg.push_str("</svg>\n");
        fs::write(path, svg).with_context(|| format!("writing {}", path.display()))
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
