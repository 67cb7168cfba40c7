//! Per-method transfer plans.
//!
//! A [`Plan`] is an ordered list of steps plus the script artifacts they
//! run. Every plan ends with a verification step followed by the prune step,
//! so source rows are only deleted after the copy has been checked.
//!
//! Scripts never contain passwords. Connections are written as `user@alias`
//! and the password is read from the environment variable named in
//! [`BackendConfig`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::codegen::{generate, NewStatement};
use crate::semantics::{format_date, ConnSpec, Method, TransferSpec};

/// Columns of one table and the column the date range applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableColumns {
    pub table: String,
    pub columns: Vec<String>,
    pub date_column: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColumnManifest {
    tables: BTreeMap<String, TableColumns>,
}

impl ColumnManifest {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces the entry for `entry.table`.
    pub fn insert(&mut self, entry: TableColumns) -> Option<TableColumns> {
        self.tables.insert(entry.table.clone(), entry)
    }

    pub fn get(&self, table: &str) -> Option<&TableColumns> {
        self.tables.get(table)
    }

    pub fn tables(&self) -> impl Iterator<Item = &TableColumns> {
        self.tables.values()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendConfig {
    /// Field delimiter of loader flat files.
    pub delimiter: char,
    /// Appended to the source table name to name the staging table.
    pub staging_suffix: String,
    /// Date column used when the manifest has no entry for the table.
    pub default_date_column: String,
    /// Rejected-row allowance for error-tolerant loads.
    pub tolerant_error_limit: u32,
    pub source_password_env: String,
    pub dest_password_env: String,
    /// Oracle directory object used for data pump files.
    pub dump_directory: String,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            delimiter: '|',
            staging_suffix: "_STG".to_string(),
            default_date_column: "TXDATE".to_string(),
            tolerant_error_limit: 999_999,
            source_password_env: "PINDAH_SOURCE_PASSWORD".to_string(),
            dest_password_env: "PINDAH_DEST_PASSWORD".to_string(),
            dump_directory: "PINDAH_DUMP_DIR".to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    Extract,
    Prepare,
    Load,
    Verify,
    Prune,
}

impl StepKind {
    pub const fn name(self) -> &'static str {
        match self {
            StepKind::Extract => "EXTRACT",
            StepKind::Prepare => "PREPARE",
            StepKind::Load => "LOAD",
            StepKind::Verify => "VERIFY",
            StepKind::Prune => "PRUNE",
        }
    }

    fn file_stem(self) -> &'static str {
        match self {
            StepKind::Extract => "extract",
            StepKind::Prepare => "prepare",
            StepKind::Load => "load",
            StepKind::Verify => "verify",
            StepKind::Prune => "prune",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    pub kind: StepKind,
    pub description: String,
    pub script_ref: Option<String>,
}

/// A file of a plan, path relative to the plan directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub path: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub new_statement: NewStatement,
    pub method: Method,
    pub steps: Vec<PlanStep>,
    pub artifacts: Vec<Artifact>,
}

impl Plan {
    /// `<line>_<METHOD>`
    pub fn dir_name(&self) -> String {
        format!("{}_{}", self.new_statement.line, self.method)
    }

    /// Contents of `plan.txt`: the `NEW_STATEMENT` line, then one line per
    /// step.
    pub fn summary(&self) -> String {
        let mut out = self.new_statement.text.clone();
        out.push('\n');
        for (i, step) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "{} {} {} {}\n",
                i + 1,
                step.kind,
                step.script_ref.as_deref().unwrap_or("-"),
                step.description
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendError {
    MissingManifest { table: String },
    WrongMethod { expected: Method, found: Method },
}

impl fmt::Display for BackendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendError::MissingManifest { table } => {
                write!(f, "no column manifest entry for table {table}")
            }
            BackendError::WrongMethod { expected, found } => {
                write!(f, "{expected} backend cannot emit a {found} statement")
            }
        }
    }
}

/// Emits the plan for the statement's own method.
pub fn emit(
    spec: &TransferSpec,
    manifest: Option<&ColumnManifest>,
    cfg: &BackendConfig,
) -> Result<Plan, BackendError> {
    match spec.method {
        Method::Query => emit_query_plan(spec, manifest, cfg),
        Method::Loader => emit_loader_plan(spec, manifest, cfg),
        Method::TransportTablespace => emit_tts_plan(spec, manifest, cfg),
    }
}

fn expect_method(spec: &TransferSpec, expected: Method) -> Result<(), BackendError> {
    if spec.method == expected {
        Ok(())
    } else {
        Err(BackendError::WrongMethod {
            expected,
            found: spec.method,
        })
    }
}

/// Everything the templates need, resolved once.
struct Ctx<'a> {
    spec: &'a TransferSpec,
    cfg: &'a BackendConfig,
    plan_id: String,
    date_column: String,
    columns: Option<&'a [String]>,
}

impl<'a> Ctx<'a> {
    fn new(spec: &'a TransferSpec, manifest: Option<&'a ColumnManifest>, cfg: &'a BackendConfig) -> Self {
        let entry = manifest.and_then(|m| m.get(&spec.table));
        Ctx {
            spec,
            cfg,
            plan_id: format!("{}_{}", spec.line, spec.method),
            date_column: entry.map_or_else(|| cfg.default_date_column.clone(), |e| e.date_column.clone()),
            columns: entry.map(|e| e.columns.as_slice()),
        }
    }

    fn column_list(&self) -> String {
        self.columns.map_or_else(|| "*".to_string(), |c| c.join(", "))
    }

    /// Inclusive day range on the date column, optionally qualified.
    fn range(&self, qualifier: &str) -> String {
        format!(
            "{q}{col} >= TO_DATE('{b}', 'DD/MM/YYYY') AND {q}{col} < TO_DATE('{e}', 'DD/MM/YYYY') + 1",
            q = qualifier,
            col = self.date_column,
            b = format_date(self.spec.begin_date),
            e = format_date(self.spec.end_date),
        )
    }

    /// Row identity between source alias `s` and destination alias `d`.
    fn row_match(&self) -> String {
        match self.columns {
            Some(cols) => cols
                .iter()
                .map(|c| format!("d.{c} = s.{c}"))
                .collect::<Vec<_>>()
                .join(" AND "),
            // Without a manifest only the date column is known.
            None => format!("d.{c} = s.{c}", c = self.date_column),
        }
    }

    fn sql_header(&self, step: usize, kind: StepKind, conn: &ConnSpec, env: &str) -> String {
        format!(
            "-- plan {id} step {step} ({kind})\n-- connect {conn} with password from ${env}\nWHENEVER SQLERROR EXIT FAILURE ROLLBACK\n",
            id = self.plan_id,
            conn = conn.masked(),
        )
    }

    fn sh_header(&self, step: usize, kind: StepKind) -> String {
        format!(
            "#!/bin/sh\n# plan {id} step {step} ({kind})\nset -eu\n: \"${{{src}:?}}\" \"${{{dst}:?}}\"\n",
            id = self.plan_id,
            src = self.cfg.source_password_env,
            dst = self.cfg.dest_password_env,
        )
    }

    fn at_source(&self, step: usize, kind: StepKind) -> String {
        self.sql_header(step, kind, &self.spec.source, &self.cfg.source_password_env)
    }

    fn at_dest(&self, step: usize, kind: StepKind) -> String {
        self.sql_header(step, kind, &self.spec.destination, &self.cfg.dest_password_env)
    }

    /// Source rows of the range that are present in the destination; in
    /// atomic mode the verified copy is complete, so the whole range goes.
    fn prune_sql(&self, source_table: &str, dest_table: &str) -> String {
        if self.spec.ignore_errors {
            format!(
                "DELETE FROM {source_table} s\nWHERE {range}\n  AND EXISTS (SELECT 1 FROM {dest_table} d WHERE {m});\nCOMMIT;\n",
                range = self.range("s."),
                m = self.row_match(),
            )
        } else {
            format!(
                "DELETE FROM {source_table}\nWHERE {range};\nCOMMIT;\n",
                range = self.range(""),
            )
        }
    }

    fn verify_sql(&self, source_table: &str, dest_table: &str) -> String {
        let failed = if self.spec.ignore_errors {
            "moved > expected"
        } else {
            "moved <> expected"
        };
        format!(
            "DECLARE\n  expected NUMBER;\n  moved NUMBER;\nBEGIN\n  SELECT COUNT(*) INTO expected FROM {source_table} WHERE {r};\n  SELECT COUNT(*) INTO moved FROM {dest_table} WHERE {r};\n  IF {failed} THEN\n    RAISE_APPLICATION_ERROR(-20001, 'plan {id}: verification failed, ' || moved || ' of ' || expected || ' rows');\n  END IF;\nEND;\n/\n",
            r = self.range(""),
            id = self.plan_id,
        )
    }

    /// `INSERT ... SELECT` into `dest_table`, with DML error logging when
    /// bad rows are tolerated.
    fn insert_select(&self, dest_table: &str, from: &str, filtered: bool) -> String {
        let cols = self.column_list();
        let target = if self.columns.is_some() {
            format!("{dest_table} ({cols})")
        } else {
            dest_table.to_string()
        };
        let filter = if filtered {
            format!("\nWHERE {}", self.range(""))
        } else {
            String::new()
        };
        if self.spec.ignore_errors {
            format!(
                "BEGIN\n  DBMS_ERRLOG.CREATE_ERROR_LOG('{dest_table}');\nEXCEPTION WHEN OTHERS THEN NULL;\nEND;\n/\nINSERT INTO {target}\nSELECT {cols} FROM {from}{filter}\nLOG ERRORS INTO ERR${dest_table} ('{id}') REJECT LIMIT UNLIMITED;\nCOMMIT;\n",
                id = self.plan_id,
            )
        } else {
            format!("INSERT INTO {target}\nSELECT {cols} FROM {from}{filter};\nCOMMIT;\n")
        }
    }
}

struct Builder {
    steps: Vec<PlanStep>,
    artifacts: Vec<Artifact>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            steps: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    fn next_index(&self) -> usize {
        self.steps.len() + 1
    }

    fn path(&self, kind: StepKind, ext: &str) -> String {
        format!("step_{}_{}.{}", self.next_index(), kind.file_stem(), ext)
    }

    fn step(&mut self, kind: StepKind, description: &str, ext: &str, content: String) -> String {
        let path = self.path(kind, ext);
        self.artifacts.push(Artifact {
            path: path.clone(),
            content,
        });
        self.steps.push(PlanStep {
            kind,
            description: description.to_string(),
            script_ref: Some(path.clone()),
        });
        path
    }

    fn step_ref(&mut self, kind: StepKind, description: &str, script: &str) {
        self.steps.push(PlanStep {
            kind,
            description: description.to_string(),
            script_ref: Some(script.to_string()),
        });
    }

    fn finish(self, spec: &TransferSpec) -> Plan {
        Plan {
            new_statement: generate(spec),
            method: spec.method,
            steps: self.steps,
            artifacts: self.artifacts,
        }
    }
}

/// One SQL script run at the destination, reading the source over a
/// database link named after the source alias.
pub fn emit_query_plan(
    spec: &TransferSpec,
    manifest: Option<&ColumnManifest>,
    cfg: &BackendConfig,
) -> Result<Plan, BackendError> {
    expect_method(spec, Method::Query)?;
    let ctx = Ctx::new(spec, manifest, cfg);
    let remote = format!("{}@{}", spec.table, spec.source.alias);

    let mut b = Builder::new();
    let path = b.path(StepKind::Load, "sql");
    let mut script = ctx.at_dest(1, StepKind::Load);
    script.push_str("\n-- LOAD\n");
    script.push_str(&ctx.insert_select(&spec.table2, &remote, true));
    script.push_str("\n-- VERIFY\n");
    script.push_str(&ctx.verify_sql(&remote, &spec.table2));
    script.push_str("\n-- PRUNE\n");
    script.push_str(&ctx.prune_sql(&remote, &spec.table2));
    b.step(StepKind::Load, "insert-select over the source link", "sql", script);
    b.step_ref(StepKind::Verify, "compare row counts of the range", &path);
    b.step_ref(StepKind::Prune, "delete the moved range from the source", &path);
    Ok(b.finish(spec))
}

/// Flat-file extract, loader control file, loader run, verify, prune.
pub fn emit_loader_plan(
    spec: &TransferSpec,
    manifest: Option<&ColumnManifest>,
    cfg: &BackendConfig,
) -> Result<Plan, BackendError> {
    expect_method(spec, Method::Loader)?;
    let entry = manifest
        .and_then(|m| m.get(&spec.table))
        .ok_or_else(|| BackendError::MissingManifest {
            table: spec.table.clone(),
        })?;
    let ctx = Ctx::new(spec, manifest, cfg);
    let delim = cfg.delimiter;
    let data_file = format!("{}_{}.dat", spec.table, spec.line);
    let mut b = Builder::new();

    let select_expr = entry
        .columns
        .iter()
        .map(|c| {
            if *c == entry.date_column {
                format!("TO_CHAR({c}, 'DD/MM/YYYY')")
            } else {
                c.clone()
            }
        })
        .collect::<Vec<_>>()
        .join(&format!(" || '{delim}' || "));
    let extract = format!(
        "{header}SET HEADING OFF FEEDBACK OFF PAGESIZE 0 LINESIZE 32767 TRIMSPOOL ON\nSPOOL {data_file}\nSELECT {select_expr}\nFROM {table}\nWHERE {range};\nSPOOL OFF\n",
        header = ctx.at_source(1, StepKind::Extract),
        table = spec.table,
        range = ctx.range(""),
    );
    b.step(StepKind::Extract, "spool the range to a delimited flat file", "sql", extract);

    let fields = entry
        .columns
        .iter()
        .map(|c| {
            if *c == entry.date_column {
                format!("  {c} DATE \"DD/MM/YYYY\"")
            } else {
                format!("  {c}")
            }
        })
        .collect::<Vec<_>>()
        .join(",\n");
    let control = format!(
        "-- plan {id} step 2 (PREPARE)\nLOAD DATA\nINFILE '{data_file}'\nAPPEND\nINTO TABLE {table2}\nFIELDS TERMINATED BY '{delim}'\nTRAILING NULLCOLS\n(\n{fields}\n)\n",
        id = ctx.plan_id,
        table2 = spec.table2,
    );
    let control_path = b.step(StepKind::Prepare, "loader control file", "ctl", control);

    let errors = if spec.ignore_errors {
        cfg.tolerant_error_limit
    } else {
        0
    };
    let load = format!(
        "{header}sqlldr userid=\"{user}/${{{env}}}@{alias}\" control={control_path} log={stem}.log bad={stem}.bad errors={errors}\n",
        header = ctx.sh_header(3, StepKind::Load),
        user = spec.destination.user,
        env = cfg.dest_password_env,
        alias = spec.destination.alias,
        stem = format!("{}_{}", spec.table, spec.line),
    );
    b.step(StepKind::Load, "bulk load into the destination table", "sh", load);

    let remote = format!("{}@{}", spec.table, spec.source.alias);
    let verify = format!("{}{}", ctx.at_dest(4, StepKind::Verify), ctx.verify_sql(&remote, &spec.table2));
    b.step(StepKind::Verify, "compare row counts of the range", "sql", verify);

    let remote_dest = format!("{}@{}", spec.table2, spec.destination.alias);
    let prune = format!("{}{}", ctx.at_source(5, StepKind::Prune), ctx.prune_sql(&spec.table, &remote_dest));
    b.step(StepKind::Prune, "delete the moved range from the source", "sql", prune);
    Ok(b.finish(spec))
}

/// Staging table in its own tablespace, transported with data pump and
/// merged into the destination table.
pub fn emit_tts_plan(
    spec: &TransferSpec,
    manifest: Option<&ColumnManifest>,
    cfg: &BackendConfig,
) -> Result<Plan, BackendError> {
    expect_method(spec, Method::TransportTablespace)?;
    let ctx = Ctx::new(spec, manifest, cfg);
    let staging = format!("{}{}", spec.table, cfg.staging_suffix);
    let tablespace = format!("{staging}_TS");
    let datafile = format!("{}01.dbf", tablespace.to_lowercase());
    let dump = format!("{}_{}.dmp", staging, spec.line);
    let mut b = Builder::new();

    let stage = format!(
        "{header}CREATE TABLESPACE {tablespace} DATAFILE '{datafile}' SIZE 100M AUTOEXTEND ON;\nCREATE TABLE {staging} TABLESPACE {tablespace} AS\nSELECT {cols} FROM {table}\nWHERE {range};\n",
        header = ctx.at_source(1, StepKind::Prepare),
        cols = ctx.column_list(),
        table = spec.table,
        range = ctx.range(""),
    );
    b.step(StepKind::Prepare, "copy the range into a staging table", "sql", stage);

    let read_only = format!(
        "{header}ALTER TABLESPACE {tablespace} READ ONLY;\n",
        header = ctx.at_source(2, StepKind::Prepare),
    );
    b.step(StepKind::Prepare, "set the staging tablespace read only", "sql", read_only);

    let export = format!(
        "{header}expdp userid=\"{user}/${{{env}}}@{alias}\" directory={dir} dumpfile={dump} transport_tablespaces={tablespace}\n",
        header = ctx.sh_header(3, StepKind::Extract),
        user = spec.source.user,
        env = cfg.source_password_env,
        alias = spec.source.alias,
        dir = cfg.dump_directory,
    );
    let datafiles_path = format!("step_{}_extract.txt", b.next_index());
    b.step(StepKind::Extract, "export tablespace metadata; copy the listed datafiles", "sh", export);
    b.artifacts.push(Artifact {
        path: datafiles_path,
        content: format!("# datafiles to copy from {} to {}\n{datafile}\n", spec.source.alias, spec.destination.alias),
    });

    let import = format!(
        "{header}impdp userid=\"{user}/${{{env}}}@{alias}\" directory={dir} dumpfile={dump} transport_datafiles='{datafile}'\n",
        header = ctx.sh_header(4, StepKind::Load),
        user = spec.destination.user,
        env = cfg.dest_password_env,
        alias = spec.destination.alias,
        dir = cfg.dump_directory,
    );
    b.step(StepKind::Load, "import tablespace metadata at the destination", "sh", import);

    let merge = format!(
        "{}{}",
        ctx.at_dest(5, StepKind::Load),
        ctx.insert_select(&spec.table2, &staging, false)
    );
    b.step(StepKind::Load, "merge the staging table into the destination table", "sql", merge);

    let verify = format!("{}{}", ctx.at_dest(6, StepKind::Verify), ctx.verify_sql(&staging, &spec.table2));
    b.step(StepKind::Verify, "compare row counts of the range", "sql", verify);

    let remote_dest = format!("{}@{}", spec.table2, spec.destination.alias);
    let prune = format!(
        "{}{}DROP TABLESPACE {tablespace} INCLUDING CONTENTS AND DATAFILES;\n",
        ctx.at_source(7, StepKind::Prune),
        ctx.prune_sql(&spec.table, &remote_dest)
    );
    b.step(StepKind::Prune, "delete the moved range and drop the staging tablespace", "sql", prune);
    Ok(b.finish(spec))
}

/// Plans for all methods are built from the same spec; convenience for
/// comparing backends.
pub fn emit_all(
    spec: &TransferSpec,
    manifest: Option<&ColumnManifest>,
    cfg: &BackendConfig,
) -> Vec<Result<Plan, BackendError>> {
    Method::ALL
        .iter()
        .map(|&m| {
            let mut s = spec.clone();
            s.method = m;
            emit(&s, manifest, cfg)
        })
        .collect::<Vec<_>>()
}
