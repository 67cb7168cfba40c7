//! Column manifest files.
//!
//! One table per line:
//!
//! ```text
//! # comments and blank lines are ignored
//! TABLE=TRX;DATE=TXDATE;COLS=ACCT,TXDATE,AMOUNT
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use pindah_core::backends::{ColumnManifest, TableColumns};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

fn parse_line(text: &str) -> Result<TableColumns, String> {
    let (mut table, mut date, mut cols) = (None, None, None);
    for field in text.split(';').map(str::trim).filter(|f| !f.is_empty()) {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| format!("expected KEY=VALUE, found {field:?}"))?;
        let value = value.trim();
        let slot = match key.trim() {
            "TABLE" => &mut table,
            "DATE" => &mut date,
            "COLS" => &mut cols,
            other => return Err(format!("unknown key {other:?}")),
        };
        if slot.replace(value.to_string()).is_some() {
            return Err(format!("key {} given twice", key.trim()));
        }
    }
    let table = table.filter(|t| !t.is_empty()).ok_or("missing TABLE")?;
    let date_column = date.filter(|d| !d.is_empty()).ok_or("missing DATE")?;
    let columns: Vec<String> = cols
        .ok_or("missing COLS")?
        .split(',')
        .map(|c| c.trim().to_string())
        .collect();
    if columns.iter().any(String::is_empty) {
        return Err("empty column name in COLS".to_string());
    }
    if !columns.contains(&date_column) {
        return Err(format!("DATE column {date_column} is not listed in COLS"));
    }
    Ok(TableColumns {
        table,
        columns,
        date_column,
    })
}

/// Parses manifest text; `path` is only used in error messages.
pub fn parse_manifest(text: &str, path: &Path) -> Result<ColumnManifest, ManifestError> {
    let mut manifest = ColumnManifest::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message| ManifestError::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message,
        };
        let entry = parse_line(line).map_err(parse_err)?;
        let table = entry.table.clone();
        if manifest.insert(entry).is_some() {
            return Err(parse_err(format!("table {table} listed twice")));
        }
    }
    Ok(manifest)
}

pub fn load_manifest(path: &Path) -> Result<ColumnManifest, ManifestError> {
    let text = fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_manifest(&text, path)
}

pub fn format_manifest(manifest: &ColumnManifest) -> String {
    manifest
        .tables()
        .map(|t| format!("TABLE={};DATE={};COLS={}\n", t.table, t.date_column, t.columns.join(",")))
        .collect()
}
