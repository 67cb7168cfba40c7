//! Directory-backed simulator stores.
//!
//! A store is a directory holding one `<TABLE>.tbl` file per table:
//!
//! ```text
//! COLS=ACCT,TXDATE,AMOUNT;DATE=TXDATE
//! A1|03/01/2010|150
//! A2|04/01/2010|75|!INVALID
//! ```
//!
//! [`save_store`] writes rows in table order and in row order, so a file
//! written by it loads and saves back to the same bytes.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use pindah_core::simdb::{SimDatabase, SimRow, SimTable};
use thiserror::Error;

pub const TABLE_EXT: &str = "tbl";
pub const INVALID_MARKER: &str = "!INVALID";
const SEP: char = '|';

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("table {table}: {message}")]
    Unwritable { table: String, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_header(text: &str) -> Result<(Vec<String>, String), String> {
    let (mut cols, mut date) = (None, None);
    for field in text.split(';') {
        match field.split_once('=') {
            Some(("COLS", v)) => cols = Some(v.split(',').map(str::to_string).collect::<Vec<_>>()),
            Some(("DATE", v)) => date = Some(v.to_string()),
            _ => return Err(format!("bad header field {field:?}, expected COLS=...;DATE=...")),
        }
    }
    match (cols, date) {
        (Some(c), Some(d)) => Ok((c, d)),
        _ => Err("header needs both COLS and DATE".to_string()),
    }
}

/// Parses one table file. The table is named after the file stem.
pub fn parse_table(name: &str, text: &str, path: &Path) -> Result<SimTable, StoreError> {
    let err = |line: usize, message: String| StoreError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "missing header line".into()))?;
    let (columns, date) = parse_header(header).map_err(|m| err(1, m))?;
    let mut table = SimTable::new(name, columns, date).map_err(|e| err(1, e.to_string()))?;
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let mut values: Vec<&str> = line.split(SEP).collect();
        let valid = values.last() != Some(&INVALID_MARKER);
        if !valid {
            values.pop();
        }
        let row = SimRow::new(values);
        let row = if valid { row } else { row.invalid() };
        table.push(row).map_err(|e| err(idx + 1, e.to_string()))?;
    }
    Ok(table)
}

pub fn format_table(table: &SimTable) -> Result<String, StoreError> {
    let bad = |message: String| StoreError::Unwritable {
        table: table.name().to_string(),
        message,
    };
    let mut out = format!("COLS={};DATE={}\n", table.columns().join(","), table.date_column());
    for row in table.rows() {
        if let Some(v) = row.values.iter().find(|v| v.contains(SEP) || v.contains('\n')) {
            return Err(bad(format!("value {v:?} contains a separator or newline")));
        }
        if row.values.last().map(String::as_str) == Some(INVALID_MARKER) {
            return Err(bad(format!("last value may not be {INVALID_MARKER}")));
        }
        out.push_str(&row.values.join("|"));
        if !row.valid {
            out.push(SEP);
            out.push_str(INVALID_MARKER);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Loads every `*.tbl` file in `dir`. Other files are ignored.
pub fn load_store(dir: &Path) -> Result<SimDatabase, StoreError> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.extension().is_some_and(|e| e == TABLE_EXT) && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    let mut db = SimDatabase::new();
    for path in paths {
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| StoreError::Parse {
                path: path.clone(),
                line: 0,
                message: "file name is not valid UTF-8".into(),
            })?
            .to_string();
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        db.insert(parse_table(&name, &text, &path)?);
    }
    Ok(db)
}

/// Writes every table of `db` into `dir`, creating it if needed. Table files
/// already in `dir` that `db` does not contain are removed.
pub fn save_store(db: &SimDatabase, dir: &Path) -> Result<(), StoreError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let rendered = db
        .tables()
        .map(|t| Ok((t.name().to_string(), format_table(t)?)))
        .collect::<Result<Vec<_>, StoreError>>()?;
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        let stale = path.extension().is_some_and(|e| e == TABLE_EXT)
            && path
                .file_stem()
                .and_then(|s| s.to_str())
                .is_some_and(|s| db.table(s).is_none());
        if stale {
            fs::remove_file(&path).map_err(io_err(&path))?;
        }
    }
    for (name, text) in rendered {
        let path = dir.join(format!("{name}.{TABLE_EXT}"));
        fs::write(&path, text).map_err(io_err(&path))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRX: &str = "COLS=ACCT,TXDATE,AMOUNT;DATE=TXDATE\nA1|03/01/2010|150\nA2|04/01/2010|75|!INVALID\n";

    #[test]
    fn parses_and_formats() {
        let t = parse_table("TRX", TRX, Path::new("TRX.tbl")).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.rows()[0].valid);
        assert!(!t.rows()[1].valid);
        assert_eq!(t.rows()[1].values, ["A2", "04/01/2010", "75"]);
        assert_eq!(format_table(&t).unwrap(), TRX);
    }

    #[test]
    fn errors_name_file_and_line() {
        let text = "COLS=A,D;DATE=D\n1|01/01/2010\n2\n";
        let e = parse_table("T", text, Path::new("T.tbl")).unwrap_err().to_string();
        assert!(e.starts_with("T.tbl:3: "), "{e}");
        let e = parse_table("T", "COLS=A,D;DATE=X\n", Path::new("T.tbl")).unwrap_err().to_string();
        assert!(e.starts_with("T.tbl:1: "), "{e}");
        let e = parse_table("T", "COLS=A,D;DATE=D\n1|2010\n", Path::new("T.tbl")).unwrap_err().to_string();
        assert!(e.starts_with("T.tbl:2: "), "{e}");
        assert!(parse_table("T", "", Path::new("T.tbl")).is_err());
    }

    #[test]
    fn refuses_unrepresentable_values() {
        let mut t = SimTable::new("T", vec!["A".into(), "D".into()], "D").unwrap();
        t.push(SimRow::new(["x|y", "01/01/2010"])).unwrap();
        assert!(format_table(&t).is_err());
    }
}
