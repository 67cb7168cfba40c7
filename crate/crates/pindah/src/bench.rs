//! Synthetic programs and per-stage timing.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use chrono::{Datelike, NaiveDate};
use pindah_core::codegen::generate;
use pindah_core::parser::parse_statement;
use pindah_core::pipeline::Frontend;
use pindah_core::semantics::analyze;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const DEFAULT_SIZES: [usize; 3] = [1_000, 10_000, 100_000];
pub const DEFAULT_SEED: u64 = 0x5EED_2011;

const TABLES: [&str; 6] = ["TRX", "GL_ENTRY", "ACCT_HIST", "LOAN_PAY", "SAV_MUT", "CARD_TX"];
const USERS: [&str; 4] = ["ops", "dwh", "arch", "batch"];
const ALIASES: [&str; 4] = ["prod", "dwh", "arsip", "dr"];
const METHODS: [&str; 3] = ["QUERY", "LOADER", "TRANSPORTTABLESPACE"];

fn date_text(rng: &mut impl Rng, d: NaiveDate) -> String {
    match rng.gen_range(0..3) {
        0 => format!("{:02}/{:02}/{}", d.day(), d.month(), d.year()),
        1 => format!("{:02}/{}", d.month(), d.year()),
        _ => d.year().to_string(),
    }
}

fn day(rng: &mut impl Rng) -> NaiveDate {
    let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
    start + chrono::Duration::days(rng.gen_range(0..365 * 20))
}

/// One valid statement. Optional clauses appear at random.
pub fn statement(rng: &mut impl Rng) -> String {
    let (src, dst) = {
        let mut a = ALIASES;
        a.shuffle(rng);
        (a[0], a[1])
    };
    let user = |rng: &mut dyn rand::RngCore| USERS[rng.gen_range(0..USERS.len())];
    let table = format!("{}_{}", TABLES[rng.gen_range(0..TABLES.len())], rng.gen_range(1..100));
    let mut s = format!(
        "PINDAH SUMBER[{}/pw{}@{src}] TUJUAN[{}/pw{}@{dst}] TABEL[{table}]",
        user(rng),
        rng.gen_range(0..10),
        user(rng),
        rng.gen_range(0..10),
    );
    if rng.gen_bool(0.3) {
        let _ = write!(s, " TABEL2[{table}_H]");
    }
    let (a, b) = (day(rng), day(rng));
    let (begin, end) = if a <= b { (a, b) } else { (b, a) };
    let begin_text = date_text(rng, begin);
    let _ = write!(s, " TGL_AWAL[{begin_text}]");
    // Begin resolves to the first day of its period and end to the last,
    // so begin <= end holds at every precision.
    if rng.gen_bool(0.7) {
        let end_text = date_text(rng, end);
        let _ = write!(s, " TGL_AKHIR[{end_text}]");
    }
    let _ = write!(s, " METODE[{}]", METHODS[rng.gen_range(0..METHODS.len())]);
    if rng.gen_bool(0.4) {
        let _ = write!(s, " IGNORE[{}]", if rng.gen_bool(0.5) { "Y" } else { "T" });
    }
    s
}

/// `n` statements, one per line, reproducible from `seed`.
pub fn synthetic_program(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::with_capacity(n * 140);
    for _ in 0..n {
        out.push_str(&statement(&mut rng));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Lexical,
    Syntax,
    Semantic,
    Codegen,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Lexical, Stage::Syntax, Stage::Semantic, Stage::Codegen];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Lexical => "lexical",
            Stage::Syntax => "syntax",
            Stage::Semantic => "semantic",
            Stage::Codegen => "codegen",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: Stage,
    /// Units of work: tokens for the lexer, statements otherwise.
    pub items: usize,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRun {
    pub statements: usize,
    pub stages: Vec<StageTiming>,
    /// Diagnostics seen anywhere; a generated program should have none.
    pub diagnostics: usize,
}

impl BenchRun {
    pub fn total(&self) -> Duration {
        self.stages.iter().map(|s| s.elapsed).sum()
    }
}

/// Runs the four stages one after the other over a whole program.
pub fn run_stages(frontend: &Frontend, source: &str) -> BenchRun {
    let mut stages = Vec::with_capacity(4);

    let t = Instant::now();
    let lexed = frontend.lex(source);
    stages.push(StageTiming {
        stage: Stage::Lexical,
        items: lexed.tokens.len(),
        elapsed: t.elapsed(),
    });
    let mut diagnostics = lexed.diagnostics.len();

    let t = Instant::now();
    let slices = lexed.statements();
    let slice_count = slices.len();
    let statements: Vec<_> = slices
        .into_iter()
        .filter_map(|s| parse_statement(s, frontend.table()).ok())
        .collect();
    diagnostics += slice_count - statements.len();
    stages.push(StageTiming {
        stage: Stage::Syntax,
        items: statements.len(),
        elapsed: t.elapsed(),
    });

    let t = Instant::now();
    let mut specs = Vec::with_capacity(statements.len());
    for stmt in &statements {
        match analyze(stmt) {
            Ok(spec) => specs.push(spec),
            Err(d) => diagnostics += d.len(),
        }
    }
    stages.push(StageTiming {
        stage: Stage::Semantic,
        items: specs.len(),
        elapsed: t.elapsed(),
    });

    let t = Instant::now();
    let generated: Vec<_> = specs.iter().map(generate).collect();
    stages.push(StageTiming {
        stage: Stage::Codegen,
        items: generated.len(),
        elapsed: t.elapsed(),
    });

    BenchRun {
        statements: source.lines().filter(|l| !l.trim().is_empty()).count(),
        stages,
        diagnostics,
    }
}

pub fn render_table(runs: &[BenchRun]) -> String {
    let mut out = format!("{:>10}  {:<9}  {:>10}  {:>12}\n", "statements", "stage", "items", "seconds");
    for run in runs {
        for s in &run.stages {
            let _ = writeln!(
                out,
                "{:>10}  {:<9}  {:>10}  {:>12.6}",
                run.statements,
                s.stage.name(),
                s.items,
                s.elapsed.as_secs_f64()
            );
        }
        let _ = writeln!(
            out,
            "{:>10}  {:<9}  {:>10}  {:>12.6}",
            run.statements,
            "total",
            "",
            run.total().as_secs_f64()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use pindah_core::pipeline::compile;

    #[test]
    fn generated_programs_are_valid() {
        let src = synthetic_program(2_000, 7);
        let c = compile(&src);
        assert!(c.is_clean(), "{:?}", &c.diagnostics[..c.diagnostics.len().min(3)]);
        assert_eq!(c.specs.len(), 2_000);
    }

    #[test]
    fn deterministic() {
        assert_eq!(synthetic_program(50, 1), synthetic_program(50, 1));
        assert_ne!(synthetic_program(50, 1), synthetic_program(50, 2));
    }

    #[test]
    fn empty_program_does_no_work() {
        let run = run_stages(&Frontend::default(), &synthetic_program(0, 1));
        assert_eq!(run.statements, 0);
        assert_eq!(run.stages.len(), 4);
        assert!(run.stages.iter().all(|s| s.items == 0));
    }

    #[test]
    fn stages_cover_every_statement() {
        let run = run_stages(&Frontend::default(), &synthetic_program(100, 3));
        assert_eq!(run.diagnostics, 0);
        let items: Vec<_> = run.stages.iter().skip(1).map(|s| s.items).collect();
        assert_eq!(items, [100, 100, 100]);
        assert_eq!(render_table(&[run]).lines().count(), 6);
    }
}
