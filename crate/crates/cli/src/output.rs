//! Result files: versioned CSV tables and JSON documents, floats with 17
//! significant digits, written atomically.

use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use stokesheat::hilbert::write_atomic;

use crate::config::Format;

/// 17 significant digits, scientific notation.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// A CSV table whose first line names the table and its schema version.
pub struct Table {
    name: &'static str,
    version: u32,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, version: u32, columns: &[&'static str]) -> Self {
        Table { name, version, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = format!("# stokesheat {} v{}\n{}\n", self.name, self.version, self.columns.join(","));
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

/// JSON formatter printing every float with 17 significant digits.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(num(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    value.serialize(&mut ser).expect("result serialises");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Output directory plus the chosen encoding.
pub struct Sink {
    pub dir: PathBuf,
    pub format: Format,
}

impl Sink {
    pub fn new(dir: &Path, format: Format) -> io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Sink { dir: dir.to_path_buf(), format })
    }

    pub fn write_text(&self, file: &str, text: &str) -> io::Result<PathBuf> {
        let path = self.dir.join(file);
        write_atomic(&path, text.as_bytes())?;
        Ok(path)
    }

    /// Writes `stem.csv` or `stem.json` depending on the format.
    pub fn emit<T: Serialize>(&self, stem: &str, table: &Table, doc: &T) -> io::Result<PathBuf> {
        match self.format {
            Format::Csv => self.write_text(&format!("{stem}.csv"), &table.render()),
            Format::Structured => self.write_text(&format!("{stem}.json"), &to_json(doc)),
        }
    }
}
