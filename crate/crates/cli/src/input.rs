// SPDX-License-Identifier: Apache-2.0

//! File ingestion: Touchstone, numeric CSV, I-V tables and key-value cards.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use rfqlink_core::cryo::{IVTable, Polarity};
use rfqlink_core::network::TwoPortNetwork;
use rfqlink_core::touchstone::{self, FreqUnit, ValueFormat};

use crate::CliError;

/// Name and SHA-256 digest of an input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputRecord {
    pub name: String,
    pub sha256: String,
}

/// Collects every file read during one command.
#[derive(Debug, Default)]
pub struct Inputs {
    pub records: Vec<InputRecord>,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.records.push(InputRecord {
            name: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes)
            .map_err(|_| CliError::Input(format!("{}: not valid UTF-8", path.display())))
    }

    /// Two-port network plus the file's frequency unit and value format.
    pub fn network(&mut self, path: &Path) -> Result<(TwoPortNetwork, FreqUnit, ValueFormat), CliError> {
        let text = self.read(path)?;
        let ctx = |e: touchstone::TouchstoneError| CliError::Input(format!("{}: {e}", path.display()));
        let doc = touchstone::parse_touchstone(&text).map_err(ctx)?;
        let mut net = touchstone::to_network(&doc).map_err(ctx)?;
        if net.label.is_empty() {
            net.label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
        }
        Ok((net, doc.freq_unit, doc.value_format))
    }

    pub fn columns(&mut self, path: &Path, n: usize) -> Result<Table, CliError> {
        let text = self.read(path)?;
        parse_table(&text, n).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

/// Numeric CSV contents with `#` comment lines removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Option<Vec<String>>,
    pub columns: Vec<Vec<f64>>,
    /// `# key = value` lines.
    pub metadata: BTreeMap<String, String>,
}

fn metadata(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_ascii_lowercase(), v.trim().to_string()))
        .collect()
}

/// Parses a comma-separated table with at least `n` numeric columns. The first
/// record is treated as a header when its first field is not a number.
pub fn parse_table(text: &str, n: usize) -> Result<Table, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut header = None;
    let mut columns = vec![Vec::new(); n];
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if i == 0 && rec.get(0).is_some_and(|t| t.parse::<f64>().is_err()) {
            header = Some(rec.iter().map(str::to_string).collect());
            continue;
        }
        if rec.len() < n {
            return Err(format!("line {line}: expected {n} columns, found {}", rec.len()));
        }
        for (k, col) in columns.iter_mut().enumerate() {
            let tok = &rec[k];
            let v: f64 = tok
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| format!("line {line}: '{tok}' is not a finite number"))?;
            col.push(v);
        }
    }
    if columns[0].is_empty() {
        return Err("no data rows".into());
    }
    Ok(Table {
        header,
        columns,
        metadata: metadata(text),
    })
}

fn meta_f64(table: &Table, key: &str, default: Option<f64>) -> Result<f64, String> {
    match table.metadata.get(key) {
        Some(v) => v.parse().map_err(|_| format!("metadata '{key}' is not a number: '{v}'")),
        None => default.ok_or_else(|| format!("missing metadata '# {key} = ...'")),
    }
}

/// I-V table: columns `v_backgate` (V) and `i_drain` (A), metadata lines
/// `# polarity = n|p`, `# width_um = ...` and optionally `v_gs`, `v_ds`,
/// `temperature_k`. Rows may appear in any voltage order.
pub fn parse_iv(text: &str) -> Result<IVTable, String> {
    let t = parse_table(text, 2)?;
    let polarity: Polarity = t
        .metadata
        .get("polarity")
        .ok_or("missing metadata '# polarity = n|p'")?
        .parse()?;
    let width = meta_f64(&t, "width_um", None)?;
    let v_gs = meta_f64(&t, "v_gs", Some(f64::NAN))?;
    let v_ds = meta_f64(&t, "v_ds", Some(f64::NAN))?;
    let temperature = meta_f64(&t, "temperature_k", Some(f64::NAN))?;
    let mut rows: Vec<(f64, f64)> = t.columns[0].iter().copied().zip(t.columns[1].iter().copied()).collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (v, i): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    IVTable::new(v, i, v_gs, v_ds, temperature, width, polarity).map_err(|e| e.to_string())
}
