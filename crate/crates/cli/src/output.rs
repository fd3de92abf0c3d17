//! CSV tables, number formatting and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

/// Formats `x` with 12 significant digits, `%g` style.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Empty cell for undefined values.
pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    /// Rows as objects keyed by column; numeric cells become JSON numbers
    /// and empty cells become null.
    pub fn to_json_rows(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(r)
                    .map(|(k, v)| (k.to_string(), cell_value(v)))
                    .collect();
                Value::Object(obj)
            })
            .collect()
    }
}

fn cell_value(v: &str) -> Value {
    if v.is_empty() {
        return Value::Null;
    }
    if let Ok(i) = v.parse::<i64>() {
        return Value::from(i);
    }
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Value::from(x),
        _ => Value::from(v),
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub artifact_paths: Vec<PathBuf>,
    pub tool_version: String,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        RunManifest {
            subcommand: subcommand.into(),
            parameters: BTreeMap::new(),
            seed: None,
            artifact_paths: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.into(), value.to_string());
    }
}

/// Writes the CSV and, if asked, the JSON mirror; records both paths.
pub fn write_artifacts(
    table: &Table,
    manifest: &mut RunManifest,
    out: &Path,
    json: Option<&Path>,
) -> io::Result<()> {
    fs::write(out, table.to_csv())?;
    manifest.artifact_paths.push(out.to_path_buf());
    if let Some(j) = json {
        manifest.artifact_paths.push(j.to_path_buf());
        let doc = serde_json::json!({
            "manifest": manifest,
            "rows": table.to_json_rows(),
        });
        let mut text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
        text.push('\n');
        fs::write(j, text)?;
    }
    Ok(())
}
