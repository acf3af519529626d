use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use magnomech::params::{config_json, UnitStyle};
use magnomech::{Cell, SystemParams, Table};
use serde_json::{Map, Value};

use crate::args::Format;

pub fn params_json(params: &SystemParams<f64>) -> Map<String, Value> {
    let mut map = config_json(params.raw(), UnitStyle::Hz);
    let th = params.thermal();
    map.insert("n_a".into(), th.n_a.into());
    map.insert("n_m".into(), th.n_m.into());
    map.insert("n_b".into(), th.n_b.into());
    map.insert("rwa_valid".into(), params.rwa_valid().into());
    map.insert(
        "drive_hierarchy_ok".into(),
        params.drive_hierarchy_ok().into(),
    );
    map
}

fn cell_text(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) if x.is_finite() => x.to_string(),
        Cell::Num(x) => x.to_string().to_lowercase(),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn cell_json(cell: &Cell) -> Value {
    match cell {
        Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Empty => Value::Null,
    }
}

pub fn render(table: &Table, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(cell_text))?;
            }
            Ok(w.into_inner().context("flushing CSV buffer")?)
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = table
                        .columns
                        .iter()
                        .cloned()
                        .zip(row.iter().map(cell_json))
                        .collect();
                    Value::Object(obj)
                })
                .collect();
            let mut doc = Map::new();
            doc.insert("params".into(), Value::Object(params_json(&table.params)));
            doc.insert("rows".into(), Value::Array(rows));
            let mut bytes = serde_json::to_vec_pretty(&Value::Object(doc))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Writes through a temporary file in the destination directory, then
/// renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn emit(table: &Table, format: Format, output: Option<&Path>) -> Result<()> {
    let bytes = render(table, format)?;
    match output {
        Some(path) => write_atomic(path, &bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}
