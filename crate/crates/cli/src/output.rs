//! Tabular output as CSV or JSON, written atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::CliResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Named columns plus run metadata. Rows hold JSON values so both formats
/// render from the same data.
#[derive(Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub meta: Map<String, Value>,
    /// Extra top-level JSON fields that have no CSV rendering.
    pub extra: Map<String, Value>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            // Debug formatting of f64 is the shortest string that round-trips
            (_, _, Some(f)) => format!("{f:?}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn render_csv(table: &Table) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(cell))?;
    }
    w.into_inner().map_err(|e| std::io::Error::other(e.to_string()).into())
}

pub fn render_json(table: &Table) -> CliResult<Vec<u8>> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            Value::Object(
                table
                    .columns
                    .iter()
                    .cloned()
                    .zip(r.iter().cloned())
                    .collect(),
            )
        })
        .collect();
    let mut root = Map::new();
    root.insert("meta".into(), Value::Object(table.meta.clone()));
    root.insert("columns".into(), table.columns.clone().into());
    root.insert("rows".into(), Value::Array(rows));
    for (k, v) in &table.extra {
        root.insert(k.clone(), v.clone());
    }
    let mut out = serde_json::to_vec_pretty(&Value::Object(root))?;
    out.push(b'\n');
    Ok(out)
}

pub fn render(table: &Table, format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Csv => render_csv(table),
        Format::Json => render_json(table),
    }
}

/// Relative output paths are placed under `LOGSHOT_OUT_DIR` when it is set.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os("LOGSHOT_OUT_DIR") {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn emit(table: &Table, format: Format, output: Option<&Path>) -> CliResult<()> {
    let bytes = render(table, format)?;
    match output {
        Some(p) => write_atomic(&resolve_output(p), &bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new(["t", "x"]);
        t.push(vec![num(0.1), num(1e-7)]);
        t.push(vec![num(2.0), Value::Null]);
        t.meta.insert("seed".into(), 7.into());
        t
    }

    #[test]
    fn csv_uses_round_trip_floats() {
        let s = String::from_utf8(render_csv(&table()).unwrap()).unwrap();
        assert_eq!(s, "t,x\n0.1,1e-7\n2.0,\n");
        let x: f64 = "1e-7".parse().unwrap();
        assert_eq!(x, 1e-7);
    }

    #[test]
    fn json_mirrors_columns() {
        let v: Value = serde_json::from_slice(&render_json(&table()).unwrap()).unwrap();
        assert_eq!(v["rows"][0]["t"], 0.1);
        assert_eq!(v["rows"][1]["x"], Value::Null);
        assert_eq!(v["meta"]["seed"], 7);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"a").unwrap();
        write_atomic(&p, b"b").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"b");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
