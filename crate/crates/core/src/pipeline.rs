//! Lexing, parsing and semantic analysis of whole programs.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::diagnostic::{Code, Diagnostic};
use crate::lexer::{terminate, Lexer, Token};
use crate::parser::{parse_statement, split_statements, StatementSlice, SyntaxRuleTable};
use crate::semantics::{analyze, TransferSpec};

/// Tokens of a program plus lexical diagnostics.
#[derive(Debug, Clone, Default)]
pub struct Lexed {
    pub tokens: Vec<Token>,
    pub diagnostics: Vec<Diagnostic>,
    error_lines: BTreeSet<u32>,
}

impl Lexed {
    /// Statements that lexed cleanly.
    pub fn statements(&self) -> Vec<StatementSlice<'_>> {
        split_statements(&self.tokens)
            .into_iter()
            .filter(|s| !self.error_lines.contains(&s.line))
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Compilation {
    /// Valid statements in source order.
    pub specs: Vec<TransferSpec>,
    /// All diagnostics, ordered by line.
    pub diagnostics: Vec<Diagnostic>,
}

impl Compilation {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn codes(&self) -> Vec<Code> {
        self.diagnostics.iter().map(|d| d.code).collect()
    }

    /// Merges lexical diagnostics with per-statement results, which must be
    /// in source order.
    pub fn assemble(
        lex_diagnostics: Vec<Diagnostic>,
        results: impl IntoIterator<Item = Result<TransferSpec, Vec<Diagnostic>>>,
    ) -> Compilation {
        let mut out = Compilation {
            specs: Vec::new(),
            diagnostics: lex_diagnostics,
        };
        for r in results {
            match r {
                Ok(spec) => out.specs.push(spec),
                Err(diags) => out.diagnostics.extend(diags),
            }
        }
        out.diagnostics.sort_by_key(|d| d.line);
        out
    }
}

/// Compiled rule tables, reusable across programs.
#[derive(Debug, Clone, Default)]
pub struct Frontend {
    lexer: Lexer,
    table: SyntaxRuleTable,
}

impl Frontend {
    pub fn new(lexer: Lexer, table: SyntaxRuleTable) -> Self {
        Frontend { lexer, table }
    }

    pub fn lexer(&self) -> &Lexer {
        &self.lexer
    }

    pub fn table(&self) -> &SyntaxRuleTable {
        &self.table
    }

    pub fn lex(&self, source: &str) -> Lexed {
        let (mut tokens, errors) = self.lexer.scan_recovering(source);
        terminate(&mut tokens, source);
        let error_lines = errors.iter().map(|e| e.line).collect();
        let diagnostics = errors
            .iter()
            .map(|e| {
                Diagnostic::error(
                    e.line,
                    Code::Lex001,
                    format!("no token rule matches {:?} (column {})", e.found, e.column),
                )
            })
            .collect();
        Lexed {
            tokens,
            diagnostics,
            error_lines,
        }
    }

    pub fn compile_statement(&self, slice: StatementSlice<'_>) -> Result<TransferSpec, Vec<Diagnostic>> {
        let stmt = parse_statement(slice, &self.table).map_err(|d| alloc::vec![d])?;
        analyze(&stmt)
    }

    pub fn compile(&self, source: &str) -> Compilation {
        let lexed = self.lex(source);
        let results: Vec<_> = lexed
            .statements()
            .into_iter()
            .map(|s| self.compile_statement(s))
            .collect();
        Compilation::assemble(lexed.diagnostics.clone(), results)
    }
}

/// Compiles with the default tables.
pub fn compile(source: &str) -> Compilation {
    Frontend::default().compile(source)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const OK: &str = "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX] TGL_AWAL[2006] METODE[QUERY]";

    #[test]
    fn errors_stay_on_their_line() {
        let src = alloc::format!("{OK}\nPINDAH TABEL[%]\nSUMBER[u/p@a]\n{OK}\n");
        let c = compile(&src);
        assert_eq!(c.specs.len(), 2);
        assert_eq!(c.specs[1].line, 4);
        let got: Vec<_> = c.diagnostics.iter().map(|d| (d.line, d.code)).collect();
        assert_eq!(got, vec![(2, Code::Lex001), (3, Code::Syn001)]);
    }

    #[test]
    fn empty_program() {
        assert!(compile("").is_clean());
        assert!(compile("\n\n  \n").specs.is_empty());
    }
}
