//! `NEW_STATEMENT` generation.
//!
//! Output is rendered from the structured [`TransferSpec`], so clause values
//! are never touched by the keyword mapping: a table called `TABELX` stays
//! `TABELX`.

use alloc::string::String;
use core::fmt::Write;

use crate::parser::{ClauseKind, KEYWORD};
use crate::semantics::{format_date, TransferSpec};

/// Source keyword to target keyword, in mapping order.
pub const KEYWORD_MAP: [(&str, &str); 9] = [
    ("PINDAH", "TRANSFER"),
    ("SUMBER", "SOURCE"),
    ("TUJUAN", "DESTINATION"),
    ("TABEL", "TABLE"),
    ("TABEL2", "TABLE2"),
    ("TGL_AWAL", "BEGIN_DATE"),
    ("TGL_AKHIR", "LAST_DATE"),
    ("METODE", "METHOD"),
    ("IGNORE", "IGNORE"),
];

pub fn target_keyword(source: &str) -> Option<&'static str> {
    KEYWORD_MAP.iter().find(|(s, _)| *s == source).map(|(_, t)| *t)
}

pub fn source_keyword(target: &str) -> Option<&'static str> {
    KEYWORD_MAP.iter().find(|(_, t)| *t == target).map(|(s, _)| *s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewStatement {
    pub line: u32,
    pub text: String,
    pub spec: TransferSpec,
}

fn clause_values(spec: &TransferSpec) -> [(ClauseKind, String); 8] {
    use alloc::string::ToString;
    [
        (ClauseKind::Source, spec.source.to_string()),
        (ClauseKind::Destination, spec.destination.to_string()),
        (ClauseKind::Table, spec.table.clone()),
        (ClauseKind::Table2, spec.table2.clone()),
        (ClauseKind::BeginDate, format_date(spec.begin_date)),
        (ClauseKind::EndDate, format_date(spec.end_date)),
        (ClauseKind::Method, spec.method.keyword().to_string()),
        (
            ClauseKind::Ignore,
            (if spec.ignore_errors { "Y" } else { "T" }).to_string(),
        ),
    ]
}

fn render(spec: &TransferSpec, keyword: impl Fn(&'static str) -> &'static str) -> String {
    let mut out = String::from(keyword(KEYWORD));
    for (kind, value) in clause_values(spec) {
        // Writing to a String cannot fail.
        let _ = write!(out, " {}[{}]", keyword(kind.keyword()), value);
    }
    out
}

pub fn generate(spec: &TransferSpec) -> NewStatement {
    NewStatement {
        line: spec.line,
        text: render(spec, |k| target_keyword(k).expect("every keyword is mapped")),
        spec: spec.clone(),
    }
}

/// Renders the spec back as a source statement with every clause explicit.
pub fn render_source(spec: &TransferSpec) -> String {
    render(spec, |k| k)
}
