//! Table and plot emission: CSV, JSON, and self-contained SVG, all written
//! atomically and formatted deterministically.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

/// One table cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(v) => v.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(*v),
            // Route floats through the 12-digit form so JSON and CSV agree.
            Cell::Float(v) => serde_json::Value::from(
                fmt_f64(*v).parse::<f64>().unwrap_or(*v),
            ),
            Cell::Text(v) => serde_json::Value::from(v.as_str()),
        }
    }
}

/// Floats print with at most 12 significant digits, shortest form that
/// round-trips the rounded value.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let magnitude = v.abs();
    if !(1e-6..1e15).contains(&magnitude) {
        return format!("{:.11e}", v);
    }
    let rounded: f64 = format!("{:.11e}", v).parse().unwrap_or(v);
    rounded.to_string()
}

/// A computed table plus the metadata that identifies the run.
pub struct Report {
    pub command: &'static str,
    pub params: Vec<(&'static str, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra scalar results (e.g. a sup norm) surfaced in the JSON meta.
    pub extra: Vec<(&'static str, f64)>,
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut meta = serde_json::Map::new();
        meta.insert("command".into(), self.command.into());
        let mut params = serde_json::Map::new();
        for (k, v) in &self.params {
            params.insert((*k).into(), v.as_str().into());
        }
        meta.insert("params".into(), serde_json::Value::Object(params));
        meta.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        for (k, v) in &self.extra {
            meta.insert((*k).into(), serde_json::Value::from(*v));
        }
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert((*name).into(), cell.json());
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut doc = serde_json::Map::new();
        doc.insert("meta".into(), serde_json::Value::Object(meta));
        doc.insert("rows".into(), serde_json::Value::Array(rows));
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).unwrap();
        text.push('\n');
        text
    }

    /// Line plot of the numeric columns against the first column. Real parts
    /// draw red, imaginary blue, magnitudes black, anything else gray.
    #[allow(clippy::type_complexity)]
    pub fn to_svg(&self, x_label: &str, y_label: &str) -> String {
        let width = 900.0;
        let height = 560.0;
        let margin = 70.0;
        let mut series: Vec<(&str, &str, Vec<(f64, f64)>)> = Vec::new();
        let as_f64 = |c: &Cell| -> f64 {
            match c {
                Cell::Int(v) => *v as f64,
                Cell::Float(v) => *v,
                Cell::Text(_) => f64::NAN,
            }
        };
        for (ci, name) in self.columns.iter().enumerate().skip(1) {
            let color = match *name {
                "re" => "#c62828",
                "im" => "#1565c0",
                "mag" => "#212121",
                _ => "#616161",
            };
            let pts: Vec<(f64, f64)> = self
                .rows
                .iter()
                .map(|r| (as_f64(&r[0]), as_f64(&r[ci])))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect();
            if !pts.is_empty() {
                series.push((name, color, pts));
            }
        }
        let (mut x_min, mut x_max) = (f64::MAX, f64::MIN);
        let (mut y_min, mut y_max) = (f64::MAX, f64::MIN);
        for (_, _, pts) in &series {
            for (x, y) in pts {
                x_min = x_min.min(*x);
                x_max = x_max.max(*x);
                y_min = y_min.min(*y);
                y_max = y_max.max(*y);
            }
        }
        if x_max <= x_min || !x_max.is_finite() {
            x_max = x_min + 1.0;
        }
        if y_max <= y_min || !y_max.is_finite() {
            y_max = y_min + 1.0;
        }
        let sx = |x: f64| margin + (x - x_min) / (x_max - x_min) * (width - 2.0 * margin);
        let sy = |y: f64| height - margin - (y - y_min) / (y_max - y_min) * (height - 2.0 * margin);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            w = width,
            h = height
        );
        let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
        // Axes.
        let _ = writeln!(
            svg,
            r#"<line x1="{m}" y1="{y0}" x2="{xe}" y2="{y0}" stroke="black"/>"#,
            m = margin,
            y0 = height - margin,
            xe = width - margin
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{y0}" stroke="black"/>"#,
            m = margin,
            y0 = height - margin
        );
        for i in 0..=4 {
            let fx = x_min + (x_max - x_min) * i as f64 / 4.0;
            let fy = y_min + (y_max - y_min) * i as f64 / 4.0;
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
                sx(fx),
                height - margin + 20.0,
                fmt_f64(fx)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{}</text>"#,
                margin - 8.0,
                sy(fy) + 4.0,
                fmt_f64(fy)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
            width / 2.0,
            height - 20.0,
            xml_escape(x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="20" y="{}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {y})">{}</text>"#,
            height / 2.0,
            xml_escape(y_label),
            y = height / 2.0
        );
        for (i, (name, color, pts)) in series.iter().enumerate() {
            let path: Vec<String> = pts
                .iter()
                .map(|(x, y)| format!("{},{}", fmt_f64(sx(*x)), fmt_f64(sy(*y))))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
                color,
                path.join(" ")
            );
            let ly = margin + 18.0 * i as f64;
            let _ = writeln!(
                svg,
                r#"<line x1="{x}" y1="{ly}" x2="{x2}" y2="{ly}" stroke="{c}" stroke-width="3"/>"#,
                x = width - margin - 120.0,
                x2 = width - margin - 90.0,
                c = color
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" font-size="12">{}</text>"#,
                width - margin - 82.0,
                ly + 4.0,
                xml_escape(name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Write via a temp file and rename so readers never see a partial file.
pub fn write_atomic(path: &Path, content: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(content.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}
