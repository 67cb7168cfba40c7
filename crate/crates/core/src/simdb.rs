//! In-memory stand-in for the production and warehouse databases.
//!
//! [`execute`] interprets a [`TransferSpec`] directly: rows whose date
//! column falls in the closed range move from the source table to the
//! destination table and are then pruned from the source. Without `IGNORE[Y]`
//! a single bad row in the range aborts the statement and leaves both stores
//! untouched; with it, bad rows stay in the source and are counted as failed.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use chrono::NaiveDate;

use crate::semantics::{resolve_date, DateRole, DateSpec, Method, Precision, TransferSpec};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimRow {
    pub values: Vec<String>,
    /// `false` makes the row fail when loaded.
    pub valid: bool,
}

impl SimRow {
    pub fn new<S: Into<String>>(values: impl IntoIterator<Item = S>) -> Self {
        SimRow {
            values: values.into_iter().map(Into::into).collect(),
            valid: true,
        }
    }

    pub fn invalid(mut self) -> Self {
        self.valid = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimTable {
    name: String,
    columns: Vec<String>,
    date_column: String,
    date_index: usize,
    rows: Vec<SimRow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    UnknownTable { table: String },
    SchemaMismatch { source: String, destination: String },
    DateColumnMissing { table: String, column: String },
    Arity { table: String, expected: usize, found: usize },
    BadDate { table: String, value: String },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::UnknownTable { table } => write!(f, "unknown table {table}"),
            SimError::SchemaMismatch {
                source,
                destination,
            } => write!(f, "columns of {source} and {destination} differ"),
            SimError::DateColumnMissing { table, column } => {
                write!(f, "date column {column} is not a column of {table}")
            }
            SimError::Arity {
                table,
                expected,
                found,
            } => write!(f, "row of {table} has {found} values, expected {expected}"),
            SimError::BadDate { table, value } => {
                write!(f, "{value:?} in {table} is not a dd/mm/yyyy date")
            }
        }
    }
}

/// Parses a `dd/mm/yyyy` cell.
pub fn parse_row_date(text: &str) -> Option<NaiveDate> {
    let d = DateSpec::parse(text).ok()?;
    if d.precision != Precision::Day {
        return None;
    }
    resolve_date(d, DateRole::Begin).ok()
}

impl SimTable {
    pub fn new(
        name: impl Into<String>,
        columns: Vec<String>,
        date_column: impl Into<String>,
    ) -> Result<Self, SimError> {
        let name = name.into();
        let date_column = date_column.into();
        let date_index = columns
            .iter()
            .position(|c| *c == date_column)
            .ok_or_else(|| SimError::DateColumnMissing {
                table: name.clone(),
                column: date_column.clone(),
            })?;
        Ok(SimTable {
            name,
            columns,
            date_column,
            date_index,
            rows: Vec::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn date_column(&self) -> &str {
        &self.date_column
    }

    pub fn rows(&self) -> &[SimRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, row: SimRow) -> Result<(), SimError> {
        if row.values.len() != self.columns.len() {
            return Err(SimError::Arity {
                table: self.name.clone(),
                expected: self.columns.len(),
                found: row.values.len(),
            });
        }
        let cell = &row.values[self.date_index];
        if parse_row_date(cell).is_none() {
            return Err(SimError::BadDate {
                table: self.name.clone(),
                value: cell.clone(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn row_date(&self, row: &SimRow) -> NaiveDate {
        parse_row_date(&row.values[self.date_index]).expect("rows are validated on insert")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimDatabase {
    tables: BTreeMap<String, SimTable>,
}

impl SimDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, table: SimTable) -> Option<SimTable> {
        self.tables.insert(table.name.clone(), table)
    }

    pub fn table(&self, name: &str) -> Option<&SimTable> {
        self.tables.get(name)
    }

    pub fn table_mut(&mut self, name: &str) -> Option<&mut SimTable> {
        self.tables.get_mut(name)
    }

    pub fn tables(&self) -> impl Iterator<Item = &SimTable> {
        self.tables.values()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn row_count(&self) -> usize {
        self.tables.values().map(SimTable::len).sum()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExecReport {
    pub rows_examined: u64,
    pub rows_moved: u64,
    pub rows_failed: u64,
    pub rows_pruned: u64,
    pub aborted: bool,
    /// Wall-clock time; filled in by callers that can read a clock.
    pub duration: Duration,
    /// Cost the method would take under the [`CostModel`].
    pub simulated_cost: Duration,
}

/// Fixed setup cost plus per-row cost, per method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CostModel {
    pub query_setup: Duration,
    pub loader_setup: Duration,
    pub tts_setup: Duration,
    pub query_per_row: Duration,
    pub loader_per_row: Duration,
    pub tts_per_row: Duration,
}

impl Default for CostModel {
    /// Setup `LOADER` > `TRANSPORTTABLESPACE` > `QUERY`; per row `QUERY`
    /// is the most expensive. `QUERY` and `TRANSPORTTABLESPACE` break even
    /// at one million rows, the default advisor threshold.
    fn default() -> Self {
        CostModel {
            query_setup: Duration::from_secs(18 * 60 + 50),
            loader_setup: Duration::from_secs(30 * 60),
            tts_setup: Duration::from_secs(24 * 60),
            query_per_row: Duration::from_micros(360),
            loader_per_row: Duration::from_micros(60),
            tts_per_row: Duration::from_micros(50),
        }
    }
}

impl CostModel {
    pub fn setup(&self, method: Method) -> Duration {
        match method {
            Method::Query => self.query_setup,
            Method::Loader => self.loader_setup,
            Method::TransportTablespace => self.tts_setup,
        }
    }

    pub fn per_row(&self, method: Method) -> Duration {
        match method {
            Method::Query => self.query_per_row,
            Method::Loader => self.loader_per_row,
            Method::TransportTablespace => self.tts_per_row,
        }
    }

    pub fn estimate(&self, method: Method, rows: u64) -> Duration {
        let per_row = self.per_row(method).as_nanos().saturating_mul(rows as u128);
        let per_row = Duration::from_nanos(u64::try_from(per_row).unwrap_or(u64::MAX));
        self.setup(method).saturating_add(per_row)
    }
}

/// Which rows of `table` fall in the range, and how many of them are bad.
fn select(spec: &TransferSpec, table: &SimTable) -> (Vec<bool>, u64) {
    let mut bad = 0;
    let picks = table
        .rows
        .iter()
        .map(|r| {
            let d = table.row_date(r);
            let hit = spec.begin_date <= d && d <= spec.end_date;
            if hit && !r.valid {
                bad += 1;
            }
            hit
        })
        .collect();
    (picks, bad)
}

fn check_schema(src: &SimTable, dst: &SimTable) -> Result<(), SimError> {
    if src.columns != dst.columns {
        return Err(SimError::SchemaMismatch {
            source: src.name.clone(),
            destination: dst.name.clone(),
        });
    }
    Ok(())
}

/// Moves the selected rows. Returns the report and the moved rows, in
/// source order.
fn transfer(spec: &TransferSpec, src: &mut SimTable, costs: &CostModel) -> (ExecReport, Vec<SimRow>) {
    let (picks, bad) = select(spec, src);
    let mut report = ExecReport {
        rows_examined: src.rows.len() as u64,
        rows_failed: bad,
        ..ExecReport::default()
    };
    if bad > 0 && !spec.ignore_errors {
        report.aborted = true;
        report.simulated_cost = costs.setup(spec.method);
        return (report, Vec::new());
    }
    let mut moved = Vec::new();
    let mut kept = Vec::with_capacity(src.rows.len());
    for (row, pick) in core::mem::take(&mut src.rows).into_iter().zip(picks) {
        if pick && row.valid {
            moved.push(row);
        } else {
            kept.push(row);
        }
    }
    src.rows = kept;
    report.rows_moved = moved.len() as u64;
    report.rows_pruned = moved.len() as u64;
    report.simulated_cost = costs.estimate(spec.method, report.rows_moved + report.rows_failed);
    (report, moved)
}

/// Executes `spec` between two distinct stores.
pub fn execute(
    spec: &TransferSpec,
    source: &mut SimDatabase,
    destination: &mut SimDatabase,
) -> Result<ExecReport, SimError> {
    execute_with_costs(spec, source, destination, &CostModel::default())
}

pub fn execute_with_costs(
    spec: &TransferSpec,
    source: &mut SimDatabase,
    destination: &mut SimDatabase,
    costs: &CostModel,
) -> Result<ExecReport, SimError> {
    let unknown = |t: &str| SimError::UnknownTable { table: t.to_string() };
    let src = source.tables.get_mut(&spec.table).ok_or_else(|| unknown(&spec.table))?;
    let dst = destination
        .tables
        .get_mut(&spec.table2)
        .ok_or_else(|| unknown(&spec.table2))?;
    check_schema(src, dst)?;
    let (report, moved) = transfer(spec, src, costs);
    dst.rows.extend(moved);
    Ok(report)
}

/// Executes `spec` when source and destination are the same store.
pub fn execute_local(spec: &TransferSpec, db: &mut SimDatabase) -> Result<ExecReport, SimError> {
    execute_local_with_costs(spec, db, &CostModel::default())
}

pub fn execute_local_with_costs(
    spec: &TransferSpec,
    db: &mut SimDatabase,
    costs: &CostModel,
) -> Result<ExecReport, SimError> {
    let unknown = |t: &str| SimError::UnknownTable { table: t.to_string() };
    if !db.tables.contains_key(&spec.table) {
        return Err(unknown(&spec.table));
    }
    if !db.tables.contains_key(&spec.table2) {
        return Err(unknown(&spec.table2));
    }
    {
        let (src, dst) = (&db.tables[&spec.table], &db.tables[&spec.table2]);
        check_schema(src, dst)?;
    }
    let src = db.tables.get_mut(&spec.table).expect("checked above");
    let (report, moved) = transfer(spec, src, costs);
    db.tables
        .get_mut(&spec.table2)
        .expect("checked above")
        .rows
        .extend(moved);
    Ok(report)
}
