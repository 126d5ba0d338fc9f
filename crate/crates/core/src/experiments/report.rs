//! CSV artifacts with a seed header, their parser, and minimal SVG plots.

use crate::error::{Error, Result};
use std::fmt::Write as _;

/// A CSV document: `# key=value` comment lines (the first is always
/// `# seed=N`), one header row, then data rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvTable {
    pub seed: u64,
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(seed: u64, header: &[&str]) -> Self {
        Self {
            seed,
            comments: Vec::new(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, text: impl Into<String>) -> &mut Self {
        self.comments.push(text.into());
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidField {
                field: name.to_string(),
                reason: "missing column".into(),
            })
    }

    /// Cell `name` of row `r`, parsed.
    pub fn get<V: std::str::FromStr>(&self, r: usize, name: &str) -> Result<V> {
        let c = self.column(name)?;
        let raw = &self.rows[r][c];
        raw.parse().map_err(|_| Error::Parse {
            line: r + 2 + self.comments.len() + 1,
            column: c + 1,
            message: format!("cannot parse `{raw}` in column {name}"),
        })
    }

    /// Like [`CsvTable::get`] with an empty cell read as `None`.
    pub fn get_opt<V: std::str::FromStr>(&self, r: usize, name: &str) -> Result<Option<V>> {
        let c = self.column(name)?;
        if self.rows[r][c].is_empty() {
            Ok(None)
        } else {
            self.get(r, name).map(Some)
        }
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut out = format!("# seed={}\n", self.seed);
        for c in &self.comments {
            writeln!(out, "# {c}").expect("string write");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let body = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| Error::Io(e.to_string()))?);
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().peekable();
        let mut seed = None;
        let mut comments = Vec::new();
        let mut body_start = 0;
        while let Some((i, line)) = lines.peek().copied() {
            let Some(rest) = line.strip_prefix('#') else {
                body_start = i;
                break;
            };
            let rest = rest.trim();
            if seed.is_none() {
                let value = rest.strip_prefix("seed=").ok_or_else(|| Error::Parse {
                    line: i + 1,
                    column: 1,
                    message: "first line must be `# seed=N`".into(),
                })?;
                seed = Some(value.parse::<u64>().map_err(|_| Error::Parse {
                    line: i + 1,
                    column: 8,
                    message: format!("bad seed `{value}`"),
                })?);
            } else {
                comments.push(rest.to_string());
            }
            lines.next();
            body_start = i + 1;
        }
        let seed = seed.ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: "missing `# seed=N` header".into(),
        })?;
        let body: String = text.lines().skip(body_start).map(|l| format!("{l}\n")).collect();
        let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
        let header = reader.headers()?.iter().map(str::to_string).collect();
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, csv::Error>>()?;
        Ok(Self {
            seed,
            comments,
            header,
            rows,
        })
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.6}")
    }
}

pub fn fmt_opt<V: ToString>(v: Option<V>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series {
    pub label: String,
    /// `(x, y, error bar half-width)`.
    pub points: Vec<(f64, f64, f64)>,
}

fn svg_open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        W / 2.0,
        escape(title)
    )
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axis_labels(out: &mut String, x_label: &str, y_label: &str) {
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
        W / 2.0,
        H - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>",
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
}

/// Line plot with optional error bars.
pub fn line_plot_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, 0.0f64, f64::MIN);
    for &(x, y, e) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y - e);
        y1 = y1.max(y + e);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
    let mut out = svg_open(title);
    let _ = writeln!(
        out,
        "<path d=\"M{m} {t} V{b} H{r}\" stroke=\"black\" fill=\"none\"/>",
        m = MARGIN,
        t = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN
    );
    for t in 0..=4 {
        let xv = x0 + (x1 - x0) * t as f64 / 4.0;
        let yv = y0 + (y1 - y0) * t as f64 / 4.0;
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{xv:.3}</text>",
            px(xv),
            H - MARGIN + 16.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{yv:.2}</text>",
            MARGIN - 6.0,
            py(yv) + 4.0
        );
    }
    axis_labels(&mut out, x_label, y_label);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let d: Vec<String> = s
            .points
            .iter()
            .enumerate()
            .map(|(i, &(x, y, _))| format!("{}{:.1} {:.1}", if i == 0 { 'M' } else { 'L' }, px(x), py(y)))
            .collect();
        let _ = writeln!(
            out,
            "<path d=\"{}\" stroke=\"{color}\" fill=\"none\" stroke-width=\"2\"/>",
            d.join(" ")
        );
        for &(x, y, e) in &s.points {
            let _ = writeln!(
                out,
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{color}\"/>",
                px(x),
                py(y)
            );
            if e > 0.0 {
                let _ = writeln!(
                    out,
                    "<line x1=\"{0:.1}\" x2=\"{0:.1}\" y1=\"{1:.1}\" y2=\"{2:.1}\" stroke=\"{color}\"/>",
                    px(x),
                    py(y - e),
                    py(y + e)
                );
            }
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">{}</text>",
            W - MARGIN - 120.0,
            MARGIN + 16.0 * k as f64,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Heatmap of `values[row * cols + col]`; rows run along y, columns along x.
#[allow(clippy::too_many_arguments)]
pub fn heatmap_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    x_ticks: &[f64],
    y_ticks: &[f64],
    values: &[f64],
) -> String {
    let (rows, cols) = (y_ticks.len(), x_ticks.len());
    let lo = values.iter().copied().fold(f64::MAX, f64::min);
    let hi = values.iter().copied().fold(f64::MIN, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let cw = (W - 2.0 * MARGIN - 60.0) / cols as f64;
    let ch = (H - 2.0 * MARGIN) / rows as f64;
    let mut out = svg_open(title);
    for r in 0..rows {
        for c in 0..cols {
            let v = values[r * cols + c];
            let t = (v - lo) / span;
            let (red, blue) = ((255.0 * t) as u8, (255.0 * (1.0 - t)) as u8);
            let _ = writeln!(
                out,
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"{cw:.1}\" height=\"{ch:.1}\" \
                 fill=\"rgb({red},64,{blue})\"><title>{v:.4}</title></rect>",
                MARGIN + c as f64 * cw,
                H - MARGIN - (r + 1) as f64 * ch
            );
        }
    }
    for (c, x) in x_ticks.iter().enumerate().step_by(2) {
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{x:.2}</text>",
            MARGIN + (c as f64 + 0.5) * cw,
            H - MARGIN + 16.0
        );
    }
    for (r, y) in y_ticks.iter().enumerate().step_by(2) {
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{y:.2}</text>",
            MARGIN - 6.0,
            H - MARGIN - (r as f64 + 0.5) * ch + 4.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.1}\" y=\"{:.1}\">min {lo:.3}</text>\n<text x=\"{:.1}\" y=\"{:.1}\">max {hi:.3}</text>",
        W - MARGIN - 50.0,
        H - MARGIN,
        W - MARGIN - 50.0,
        MARGIN + 10.0
    );
    axis_labels(&mut out, x_label, y_label);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_comments_and_quotes() {
        let mut t = CsvTable::new(42, &["a", "b"]);
        t.comment("note=contains, comma");
        t.push(vec!["1".into(), "x,y".into()]);
        t.push(vec!["".into(), "2.5".into()]);
        let text = t.to_csv_string().unwrap();
        assert!(text.starts_with("# seed=42\n"));
        let back = CsvTable::parse(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.get_opt::<u32>(1, "a").unwrap(), None);
        assert_eq!(back.get::<f64>(1, "b").unwrap(), 2.5);
    }

    #[test]
    fn missing_seed_is_parse_error() {
        assert!(matches!(CsvTable::parse("a,b\n1,2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(CsvTable::parse("# seed=x\na\n").is_err());
    }

    #[test]
    fn svg_documents_are_closed() {
        let s = line_plot_svg(
            "t",
            "x",
            "y",
            &[Series {
                label: "a".into(),
                points: vec![(0.0, 1.0, 0.1), (1.0, 2.0, 0.0)],
            }],
        );
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        let h = heatmap_svg("h", "b", "g", &[0.0, 1.0], &[0.0, 1.0], &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(h.matches("<rect x=").count(), 4);
    }
}
