//! Error-code catalog.
//!
//! The catalog is data: `docs/errors.md` is rendered from it and
//! [`verify_catalog`] compiles every example to make sure it raises exactly
//! the documented code.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::diagnostic::Code;
use crate::pipeline::compile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub code: Code,
    pub template: &'static str,
    pub rule: &'static str,
    pub example: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        code: Code::Lex001,
        template: "no token rule matches '<char>' (column <n>)",
        rule: "A character that no lexical rule accepts. The rest of the line is skipped.",
        example: "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX%] TGL_AWAL[2006] METODE[QUERY]",
    },
    CatalogEntry {
        code: Code::Syn001,
        template: "KEYWORD PINDAH must start the statement, found <GROUP> '<lexeme>'",
        rule: "The first token of a statement is not the keyword PINDAH.",
        example: "SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX] TGL_AWAL[2006] METODE[QUERY]",
    },
    CatalogEntry {
        code: Code::Syn002,
        template: "<previous> next value <GROUP> '<lexeme>': <rule message>, expected <alternatives>",
        rule: "A token the rule table does not allow here: missing whitespace or bracket, or a clause out of order.",
        example: "PINDAH TUJUAN[u/p@b] SUMBER[u/p@a] TABEL[TRX] TGL_AWAL[2006] METODE[QUERY]",
    },
    CatalogEntry {
        code: Code::Syn003,
        template: "<CLAUSE>[ is never closed",
        rule: "An opening bracket without a matching closing bracket.",
        example: "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX TGL_AWAL[2006] METODE[QUERY]",
    },
    CatalogEntry {
        code: Code::Syn004,
        template: "<CLAUSE>[<value>] wrong format at <GROUP> '<lexeme>': <rule message>, expected <alternatives>",
        rule: "A clause value that does not have the shape of its clause, including an empty value.",
        example: "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[] TGL_AWAL[2006] METODE[QUERY]",
    },
    CatalogEntry {
        code: Code::Sem001,
        template: "IDENTIFIER <CLAUSE> must not be defined more than once (found <n>)",
        rule: "The same clause appears twice in one statement.",
        example: "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX] TGL_AWAL[2006] METODE[QUERY] METODE[LOADER]",
    },
    CatalogEntry {
        code: Code::Sem002,
        template: "IDENTIFIER <CLAUSE> is not defined",
        rule: "One of SUMBER, TUJUAN, TABEL, TGL_AWAL, METODE is missing.",
        example: "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TGL_AWAL[2006] METODE[QUERY]",
    },
    CatalogEntry {
        code: Code::Sem003,
        template: "TGL_AWAL=<dd/mm/yyyy> cannot greater than TGL_AKHIR=<dd/mm/yyyy>",
        rule: "The resolved end date is before the resolved begin date.",
        example: "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX] TGL_AWAL[2011] TGL_AKHIR[2010] METODE[QUERY]",
    },
    CatalogEntry {
        code: Code::Sem004,
        template: "TABEL=<table> and TABEL2=<table2> cannot be same if SUMBER=TUJUAN",
        rule: "Source and destination connection are identical and so are the tables (after TABEL2 defaults to TABEL).",
        example: "PINDAH SUMBER[u/p@a] TUJUAN[u/p@a] TABEL[TRX] TGL_AWAL[2006] METODE[QUERY]",
    },
    CatalogEntry {
        code: Code::Sem005,
        template: "<CLAUSE>=<value> is not a valid calendar date",
        rule: "A date with day or month out of range, or a day the month does not have.",
        example: "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX] TGL_AWAL[31/02/2010] METODE[QUERY]",
    },
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mismatch {
    /// An emitted code with no catalog entry.
    Missing(Code),
    Duplicate(Code),
    /// Compiling the example produced these codes instead of exactly the
    /// documented one.
    Example { code: Code, produced: Vec<Code> },
}

pub fn verify_catalog() -> Vec<Mismatch> {
    verify_entries(CATALOG)
}

pub fn verify_entries(entries: &[CatalogEntry]) -> Vec<Mismatch> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for e in entries {
        if !seen.insert(e.code) {
            out.push(Mismatch::Duplicate(e.code));
        }
        let produced: BTreeSet<Code> = compile(e.example).codes().into_iter().collect();
        if produced.len() != 1 || !produced.contains(&e.code) {
            out.push(Mismatch::Example {
                code: e.code,
                produced: produced.into_iter().collect(),
            });
        }
    }
    for code in Code::ALL {
        if !seen.contains(&code) {
            out.push(Mismatch::Missing(code));
        }
    }
    out
}

pub fn entry(code: Code) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.code == code)
}

/// Markdown rendering of the catalog (the body of `docs/errors.md`).
pub fn render_markdown() -> String {
    let mut out = String::from(
        "# Error codes\n\nGenerated from the compiler's catalog; a test keeps this file in sync.\n",
    );
    for e in CATALOG {
        out.push_str(&format!(
            "\n## {}\n\n{}\n\nMessage: `{}`\n\nExample:\n\n```text\n{}\n```\n",
            e.code, e.rule, e.template, e.example
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_catalog_is_consistent() {
        assert_eq!(verify_catalog(), Vec::new());
    }

    #[test]
    fn dropping_an_entry_is_detected() {
        let pruned: Vec<_> = CATALOG.iter().copied().filter(|e| e.code != Code::Sem004).collect();
        assert_eq!(verify_entries(&pruned), alloc::vec![Mismatch::Missing(Code::Sem004)]);
    }

    #[test]
    fn wrong_example_is_detected() {
        let mut broken: Vec<_> = CATALOG.to_vec();
        broken[5].example = CATALOG[6].example;
        assert_eq!(
            verify_entries(&broken),
            alloc::vec![Mismatch::Example {
                code: Code::Sem001,
                produced: alloc::vec![Code::Sem002]
            }]
        );
    }

    #[test]
    fn duplicate_entry_is_detected() {
        let mut dup: Vec<_> = CATALOG.to_vec();
        dup.push(CATALOG[0]);
        assert_eq!(verify_entries(&dup), alloc::vec![Mismatch::Duplicate(Code::Lex001)]);
    }

    #[test]
    fn sem001_example_compiles_to_sem001() {
        assert_eq!(compile(entry(Code::Sem001).unwrap().example).codes(), alloc::vec![Code::Sem001]);
    }
}
