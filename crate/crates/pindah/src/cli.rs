//! `pindah` subcommands.
//!
//! Exit codes: 0 clean, 1 diagnostics (or a failed transfer), 2 usage or
//! I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use pindah_core::advisor::{explain, recommend, AdvisorPolicy, SizeEstimate};
use pindah_core::backends::{emit, ColumnManifest, Plan};
use pindah_core::pipeline::{Compilation, Frontend};
use pindah_core::simdb::{execute_local_with_costs, execute_with_costs, ExecReport};
use pindah_core::{Diagnostic, Method, TransferSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::{self, BenchRun};
use crate::config::Config;
use crate::manifest::load_manifest;
use crate::store::{load_store, save_store};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "pindah", version, about = "Compile PINDAH data-retention programs into transfer plans")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// TOML file with [advisor], [backend] and [cost] settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Stop reporting after the first statement with errors.
    #[arg(long, global = true)]
    pub fail_fast: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lex, parse and analyze a program.
    Check {
        /// Program file (.pdh).
        file: PathBuf,
    },
    /// Write one plan directory per statement.
    Build {
        /// Program file (.pdh).
        file: PathBuf,
        /// Directory receiving one plan directory per statement.
        #[arg(long)]
        out: PathBuf,
        /// Column manifest; required for LOADER statements.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Overwrite plan files whose content differs.
        #[arg(long)]
        force: bool,
    },
    /// Recommend a transfer method for a history size.
    Advise {
        /// Rows in the history range.
        #[arg(long)]
        rows: u64,
        /// Size of the history range in bytes, if known.
        #[arg(long)]
        bytes: Option<u64>,
        /// Row count from which TRANSPORTTABLESPACE is recommended.
        #[arg(long)]
        threshold: Option<u64>,
        /// Recommend LOADER in [threshold/2, threshold).
        #[arg(long)]
        loader_band: bool,
    },
    /// Run a program against directory-backed stores.
    Simulate {
        /// Program file (.pdh).
        file: PathBuf,
        /// Directory of .tbl files standing in for the source database.
        #[arg(long)]
        source: PathBuf,
        /// Directory of .tbl files standing in for the destination.
        #[arg(long)]
        dest: PathBuf,
        /// Report without writing the stores back.
        #[arg(long)]
        dry_run: bool,
    },
    /// Time each compiler stage on synthetic programs.
    Bench {
        /// Comma-separated statement counts.
        #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_SIZES)]
        sizes: Vec<usize>,
        /// Seed for the synthetic program generator.
        #[arg(long, default_value_t = bench::DEFAULT_SEED)]
        seed: u64,
    },
}

/// Machine-readable result of `check` (and of failed `build`/`simulate`
/// front ends).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub file: String,
    pub statements: usize,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Serialize)]
struct PlanReport<'a> {
    line: u32,
    method: Method,
    dir: String,
    new_statement: &'a str,
    files: Vec<String>,
}

#[derive(Debug, Serialize)]
struct SimReport {
    line: u32,
    method: Method,
    #[serde(flatten)]
    report: ExecReport,
}

#[derive(Debug, Serialize)]
struct AdviceReport {
    rows: u64,
    bytes: Option<u64>,
    threshold: u64,
    recommendation: Method,
    explanation: String,
    /// Simulated cost of each method in seconds.
    estimated_secs: Vec<(Method, f64)>,
}

/// Failure that ends a command with the given exit code.
struct Exit(i32);

struct Ctx<'a> {
    format: Format,
    fail_fast: bool,
    config: Config,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn fail(&mut self, code: i32, message: impl std::fmt::Display) -> Exit {
        let _ = writeln!(self.err, "pindah: {message}");
        Exit(code)
    }

    fn usage(&mut self, message: impl std::fmt::Display) -> Exit {
        self.fail(EXIT_USAGE, message)
    }

    fn json<T: Serialize>(&mut self, value: &T) -> Result<(), Exit> {
        let text = serde_json::to_string_pretty(value).expect("reports serialize");
        writeln!(self.out, "{text}").map_err(|e| self.usage(e))
    }

    fn read(&mut self, path: &Path) -> Result<String, Exit> {
        fs::read_to_string(path).map_err(|e| self.usage(format_args!("{}: {e}", path.display())))
    }

    /// Compiles `file`; prints diagnostics and fails with exit 1 if any.
    fn front_end(&mut self, file: &Path) -> Result<Compilation, Exit> {
        let source = self.read(file)?;
        let mut c = compile_parallel(&Frontend::default(), &source);
        if self.fail_fast {
            truncate_to_first_failure(&mut c);
        }
        if !c.is_clean() {
            self.report_check(file, &c)?;
            return Err(Exit(EXIT_DIAGNOSTICS));
        }
        Ok(c)
    }

    fn report_check(&mut self, file: &Path, c: &Compilation) -> Result<(), Exit> {
        let report = CheckReport {
            file: file.display().to_string(),
            statements: c.specs.len() + failed_statements(c),
            diagnostics: c.diagnostics.clone(),
        };
        match self.format {
            Format::Json => self.json(&report),
            Format::Text => {
                for d in &report.diagnostics {
                    let _ = writeln!(self.err, "{}:{}", report.file, d);
                }
                let _ = writeln!(
                    self.out,
                    "{}: {} statement(s), {} error(s)",
                    report.file,
                    report.statements,
                    report.diagnostics.len()
                );
                Ok(())
            }
        }
    }
}

fn failed_statements(c: &Compilation) -> usize {
    let mut lines: Vec<u32> = c.diagnostics.iter().map(|d| d.line).collect();
    lines.dedup();
    lines.len()
}

fn truncate_to_first_failure(c: &mut Compilation) {
    if let Some(first) = c.diagnostics.first().map(|d| d.line) {
        c.diagnostics.retain(|d| d.line == first);
        c.specs.retain(|s| s.line < first);
    }
}

/// Compiles statements in parallel; results keep source order.
pub fn compile_parallel(frontend: &Frontend, source: &str) -> Compilation {
    let lexed = frontend.lex(source);
    let results: Vec<Result<TransferSpec, Vec<Diagnostic>>> = lexed
        .statements()
        .into_par_iter()
        .map(|s| frontend.compile_statement(s))
        .collect();
    Compilation::assemble(lexed.diagnostics.clone(), results)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    run_cli(cli, out, err)
}

pub fn run_cli(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut ctx = Ctx {
        format: cli.format,
        fail_fast: cli.fail_fast,
        config: Config::default(),
        out,
        err,
    };
    if let Some(path) = &cli.config {
        match Config::load(path) {
            Ok(cfg) => ctx.config = cfg,
            Err(e) => return ctx.usage(e).0,
        }
    }
    let result = match cli.command {
        Command::Check { file } => cmd_check(&mut ctx, &file),
        Command::Build {
            file,
            out,
            manifest,
            force,
        } => cmd_build(&mut ctx, &file, &out, manifest.as_deref(), force),
        Command::Advise {
            rows,
            bytes,
            threshold,
            loader_band,
        } => cmd_advise(&mut ctx, rows, bytes, threshold, loader_band),
        Command::Simulate {
            file,
            source,
            dest,
            dry_run,
        } => cmd_simulate(&mut ctx, &file, &source, &dest, dry_run),
        Command::Bench { sizes, seed } => cmd_bench(&mut ctx, &sizes, seed),
    };
    match result {
        Ok(code) => code,
        Err(Exit(code)) => code,
    }
}

fn cmd_check(ctx: &mut Ctx<'_>, file: &Path) -> Result<i32, Exit> {
    let c = ctx.front_end(file)?;
    ctx.report_check(file, &c)?;
    Ok(EXIT_OK)
}

/// A file to write and whether it needs the executable bit.
struct PendingFile {
    path: PathBuf,
    content: String,
    executable: bool,
}

fn plan_files(out_dir: &Path, plan: &Plan) -> Vec<PendingFile> {
    let dir = out_dir.join(plan.dir_name());
    let mut files = vec![PendingFile {
        path: dir.join("plan.txt"),
        content: plan.summary(),
        executable: false,
    }];
    files.extend(plan.artifacts.iter().map(|a| PendingFile {
        path: dir.join(&a.path),
        content: a.content.clone(),
        executable: a.path.ends_with(".sh"),
    }));
    files
}

fn write_file(f: &PendingFile) -> io::Result<bool> {
    if fs::read(&f.path).ok().as_deref() == Some(f.content.as_bytes()) {
        return Ok(false);
    }
    if let Some(parent) = f.path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&f.path, &f.content)?;
    #[cfg(unix)]
    if f.executable {
        use std::os::unix::fs::PermissionsExt;
        fs::set_permissions(&f.path, fs::Permissions::from_mode(0o755))?;
    }
    Ok(true)
}

fn cmd_build(
    ctx: &mut Ctx<'_>,
    file: &Path,
    out_dir: &Path,
    manifest: Option<&Path>,
    force: bool,
) -> Result<i32, Exit> {
    let manifest: Option<ColumnManifest> = match manifest {
        Some(p) => Some(load_manifest(p).map_err(|e| ctx.usage(e))?),
        None => None,
    };
    let c = ctx.front_end(file)?;
    let backend = ctx.config.backend.clone();
    let mut plans = Vec::with_capacity(c.specs.len());
    for spec in &c.specs {
        let plan = emit(spec, manifest.as_ref(), &backend)
            .map_err(|e| ctx.fail(EXIT_DIAGNOSTICS, format_args!("{}:{}: {e}", file.display(), spec.line)))?;
        plans.push(plan);
    }

    let files: Vec<PendingFile> = plans.iter().flat_map(|p| plan_files(out_dir, p)).collect();
    if !force {
        let conflicts: Vec<&Path> = files
            .iter()
            .filter(|f| fs::read(&f.path).is_ok_and(|old| old != f.content.as_bytes()))
            .map(|f| f.path.as_path())
            .collect();
        if let Some(first) = conflicts.first() {
            let msg = format!(
                "refusing to overwrite {} changed file(s), first {} (use --force)",
                conflicts.len(),
                first.display()
            );
            return Err(ctx.usage(msg));
        }
    }
    for f in &files {
        write_file(f).map_err(|e| ctx.usage(format_args!("{}: {e}", f.path.display())))?;
    }

    match ctx.format {
        Format::Json => {
            let reports: Vec<PlanReport<'_>> = plans
                .iter()
                .map(|p| PlanReport {
                    line: p.new_statement.line,
                    method: p.method,
                    dir: p.dir_name(),
                    new_statement: &p.new_statement.text,
                    files: std::iter::once("plan.txt".to_string())
                        .chain(p.artifacts.iter().map(|a| a.path.clone()))
                        .collect(),
                })
                .collect();
            ctx.json(&reports)?;
        }
        Format::Text => {
            for p in &plans {
                let _ = writeln!(ctx.out, "{}", p.new_statement.text);
            }
        }
    }
    Ok(EXIT_OK)
}

fn cmd_advise(
    ctx: &mut Ctx<'_>,
    rows: u64,
    bytes: Option<u64>,
    threshold: Option<u64>,
    loader_band: bool,
) -> Result<i32, Exit> {
    let base = ctx.config.advisor;
    let policy = AdvisorPolicy::new(
        threshold.unwrap_or(base.small_threshold_rows),
        loader_band || base.prefer_loader_mid_band,
    )
    .map_err(|_| ctx.usage("--threshold must be positive"))?;
    let est = SizeEstimate { row_count: rows, bytes };
    let method = recommend(est, &policy);
    let explanation = explain(est, &policy);
    match ctx.format {
        Format::Json => {
            let report = AdviceReport {
                rows,
                bytes,
                threshold: policy.small_threshold_rows,
                recommendation: method,
                explanation,
                estimated_secs: Method::ALL
                    .iter()
                    .map(|&m| (m, ctx.config.cost.estimate(m, rows).as_secs_f64()))
                    .collect(),
            };
            ctx.json(&report)?;
        }
        Format::Text => {
            let _ = writeln!(ctx.out, "{method}\n{explanation}");
        }
    }
    Ok(EXIT_OK)
}

fn same_dir(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(a), Ok(b)) => a == b,
        _ => a == b,
    }
}

fn cmd_simulate(ctx: &mut Ctx<'_>, file: &Path, source: &Path, dest: &Path, dry_run: bool) -> Result<i32, Exit> {
    let c = ctx.front_end(file)?;
    let local = same_dir(source, dest);
    let mut src = load_store(source).map_err(|e| ctx.usage(e))?;
    let mut dst = if local {
        None
    } else {
        Some(load_store(dest).map_err(|e| ctx.usage(e))?)
    };

    let costs = ctx.config.cost;
    let mut reports = Vec::with_capacity(c.specs.len());
    for spec in &c.specs {
        let t = Instant::now();
        let result = match dst.as_mut() {
            Some(dst) => execute_with_costs(spec, &mut src, dst, &costs),
            None => execute_local_with_costs(spec, &mut src, &costs),
        };
        let mut report =
            result.map_err(|e| ctx.fail(EXIT_DIAGNOSTICS, format_args!("{}:{}: {e}", file.display(), spec.line)))?;
        report.duration = t.elapsed();
        reports.push(SimReport {
            line: spec.line,
            method: spec.method,
            report,
        });
    }

    if !dry_run {
        save_store(&src, source).map_err(|e| ctx.usage(e))?;
        if let Some(dst) = &dst {
            save_store(dst, dest).map_err(|e| ctx.usage(e))?;
        }
    }

    match ctx.format {
        Format::Json => ctx.json(&reports)?,
        Format::Text => {
            let _ = writeln!(
                ctx.out,
                "{:>5}  {:<19}  {:>8}  {:>8}  {:>8}  {:>8}  {:<7}  {:>12}",
                "line", "method", "examined", "moved", "failed", "pruned", "aborted", "simulated_s"
            );
            for r in &reports {
                let e = &r.report;
                let _ = writeln!(
                    ctx.out,
                    "{:>5}  {:<19}  {:>8}  {:>8}  {:>8}  {:>8}  {:<7}  {:>12.1}",
                    r.line,
                    r.method.keyword(),
                    e.rows_examined,
                    e.rows_moved,
                    e.rows_failed,
                    e.rows_pruned,
                    e.aborted,
                    e.simulated_cost.as_secs_f64()
                );
            }
        }
    }
    let aborted = reports.iter().filter(|r| r.report.aborted).count();
    if aborted > 0 {
        let _ = writeln!(ctx.err, "pindah: {aborted} statement(s) aborted on invalid rows");
        return Ok(EXIT_DIAGNOSTICS);
    }
    Ok(EXIT_OK)
}

fn cmd_bench(ctx: &mut Ctx<'_>, sizes: &[usize], seed: u64) -> Result<i32, Exit> {
    let frontend = Frontend::default();
    let runs: Vec<BenchRun> = sizes
        .iter()
        .map(|&n| bench::run_stages(&frontend, &bench::synthetic_program(n, seed)))
        .collect();
    match ctx.format {
        Format::Json => ctx.json(&runs)?,
        Format::Text => {
            let _ = write!(ctx.out, "{}", bench::render_table(&runs));
        }
    }
    if runs.iter().any(|r| r.diagnostics > 0) {
        return Err(ctx.fail(EXIT_DIAGNOSTICS, "generated program did not compile cleanly"));
    }
    Ok(EXIT_OK)
}
