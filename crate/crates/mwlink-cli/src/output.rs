//! Tabular result assembly: fixed column sets per experiment kind, CSV with
//! RFC-4180 quoting and 12 significant digits, JSON-lines mirror, sidecar
//! metadata.

use std::io::Write;

#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    I(u64),
    B(bool),
    S(String),
}

pub type Record = Vec<(&'static str, Cell)>;

/// 12 significant digits, exponent notation so the round trip is exact at
/// that precision and no commas can appear.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{:.11e}", x)
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(x) => sig12(*x),
            Cell::I(n) => n.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => csv_quote(s),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::F(x) => serde_json::Value::String(sig12(*x)),
            Cell::I(n) => serde_json::json!(n),
            Cell::B(b) => serde_json::json!(b),
            Cell::S(s) => serde_json::json!(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "csv" => Some(Format::Csv),
            "jsonl" => Some(Format::Jsonl),
            _ => None,
        }
    }
}

pub fn emit<W: Write>(
    records: &[Record],
    format: Format,
    mut w: W,
) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            if let Some(first) = records.first() {
                let header: Vec<&str> = first.iter().map(|(k, _)| *k).collect();
                writeln!(w, "{}", header.join(","))?;
            }
            for rec in records {
                let row: Vec<String> = rec.iter().map(|(_, c)| c.csv()).collect();
                writeln!(w, "{}", row.join(","))?;
            }
        }
        Format::Jsonl => {
            for rec in records {
                let mut map = serde_json::Map::new();
                for (k, c) in rec {
                    map.insert((*k).to_string(), c.json());
                }
                writeln!(w, "{}", serde_json::Value::Object(map))?;
            }
        }
    }
    w.flush()
}

pub fn emit_to(
    records: &[Record],
    format: Format,
    out: Option<&str>,
) -> std::io::Result<()> {
    match out {
        Some(path) => {
            let file = std::fs::File::create(path)?;
            emit(records, format, std::io::BufWriter::new(file))
        }
        None => emit(records, format, std::io::stdout().lock()),
    }
}

/// Sidecar metadata next to a written dataset: the fully resolved config plus
/// provenance columns that must stay out of the dataset so its bytes depend
/// only on the inputs.
pub fn write_sidecar(path: &str, body: &str) -> std::io::Result<()> {
    std::fs::write(format!("{path}.meta.toml"), body)
}
