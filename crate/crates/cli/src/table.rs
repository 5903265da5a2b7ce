//! CSV emission: `# ` comment block, snake_case header, locale-free numbers.

use std::path::Path;

use dephaser_core::{Error, Result};

/// Rounds to `precision` significant digits and prints the shortest string
/// that reads back to the rounded value. Magnitudes in [1e-4, 1e15) are
/// written plainly, others in scientific notation.
pub fn format_float(x: f64, precision: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = precision.clamp(1, 17) - 1;
    let mut rounded: f64 = format!("{x:.digits$e}").parse().expect("rust float formatting");
    if !rounded.is_finite() {
        // rounding up past f64::MAX
        rounded = x;
    }
    let mag = rounded.abs();
    if (1e-4..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Num)
    }

    pub fn flag(x: Option<bool>) -> Cell {
        x.map_or(Cell::Empty, |b| Cell::Int(b as i64))
    }

    fn render(&self, precision: usize) -> String {
        match self {
            Cell::Num(x) => format_float(*x, precision),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table {
            comments: Vec::new(),
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Adds comment lines; multi-line text is split.
    pub fn comment(&mut self, text: &str) {
        self.comments.extend(text.lines().map(str::to_string));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self, precision: usize) -> String {
        let mut out = String::new();
        for line in &self.comments {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                out.push_str("# ");
                out.push_str(line);
                out.push('\n');
            }
        }
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            writer
                .write_record(row.iter().map(|c| c.render(precision)))
                .expect("in-memory write");
        }
        let body = writer.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
        out
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
