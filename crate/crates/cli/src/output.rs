//! CSV tables, JSON documents with run metadata, and file emission.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// One cell of a result table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// CSV text; floats carry 17 significant digits.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(x) => fmt_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(fmt_f64(*x)),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Serialize(e.to_string()))
    }

    /// Rows as JSON objects keyed by the header.
    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> =
                    self.header.iter().zip(r).map(|(h, c)| (h.to_string(), c.json())).collect();
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub timestamp: String,
    pub config_hash: String,
}

impl Metadata {
    pub fn new(config: &ExperimentConfig) -> Result<Self, CliError> {
        Ok(Self { version: env!("CARGO_PKG_VERSION"), timestamp: timestamp()?, config_hash: config_hash(config)? })
    }
}

/// RFC 3339 time of the run; `SOURCE_DATE_EPOCH` pins it for reproducible output.
pub fn timestamp() -> Result<String, CliError> {
    let t = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(s) => {
            let secs: i64 = s
                .trim()
                .parse()
                .map_err(|_| crate::error::usage("SOURCE_DATE_EPOCH", format!("'{s}' is not an integer")))?;
            OffsetDateTime::from_unix_timestamp(secs)
                .map_err(|e| crate::error::usage("SOURCE_DATE_EPOCH", e.to_string()))?
        }
        Err(_) => OffsetDateTime::now_utc(),
    };
    t.format(&Rfc3339).map_err(|e| CliError::Serialize(e.to_string()))
}

/// SHA-256 of the effective configuration serialized as JSON.
pub fn config_hash(config: &ExperimentConfig) -> Result<String, CliError> {
    let bytes = serde_json::to_vec(config)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// `{"metadata": ..., <key>: <body>}`
pub fn document(meta: &Metadata, key: &str, body: Value) -> Value {
    let mut obj = Map::new();
    obj.insert("metadata".to_string(), serde_json::to_value(meta).expect("metadata serializes"));
    obj.insert(key.to_string(), body);
    Value::Object(obj)
}

/// Writes files into one output directory and remembers their paths.
#[derive(Debug)]
pub struct OutDir {
    pub dir: PathBuf,
    pub written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::Io { path: parent.to_path_buf(), source: e })?;
        }
        std::fs::write(&path, contents).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn write_csv(&mut self, name: &str, table: &Table) -> Result<PathBuf, CliError> {
        self.write(name, table.to_csv()?.as_bytes())
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// One compact JSON document per line.
    pub fn write_jsonl<T: Serialize>(&mut self, name: &str, items: &[T]) -> Result<PathBuf, CliError> {
        let mut text = String::new();
        for it in items {
            text.push_str(&serde_json::to_string(it)?);
            text.push('\n');
        }
        self.write(name, text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_csv_text() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.9999999999999999] {
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn table_csv_and_json_agree() {
        let mut t = Table::new(&["N", "ratio", "ok"]);
        t.push(vec![64usize.into(), 0.5.into(), true.into()]);
        assert_eq!(t.to_csv().unwrap(), "N,ratio,ok\n64,5.0000000000000000e-1,true\n");
        assert_eq!(t.to_json()[0]["ratio"], json!(0.5));
    }

    #[test]
    fn hash_depends_on_config() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig { seed: 2, ..Default::default() };
        assert_eq!(config_hash(&a).unwrap().len(), 64);
        assert_ne!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
    }
}
