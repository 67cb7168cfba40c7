//! Structured compiler diagnostics.

use alloc::string::String;
use core::fmt;

use crate::parser::ClauseKind;

/// Identifies the check that produced a [`Diagnostic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Code {
    /// No lexical rule matches at a position.
    #[cfg_attr(feature = "serde", serde(rename = "LEX001"))]
    Lex001,
    /// Statement does not start with the `PINDAH` keyword.
    #[cfg_attr(feature = "serde", serde(rename = "SYN001"))]
    Syn001,
    /// Unexpected token group or lexeme.
    #[cfg_attr(feature = "serde", serde(rename = "SYN002"))]
    Syn002,
    /// A `[` is never closed.
    #[cfg_attr(feature = "serde", serde(rename = "SYN003"))]
    Syn003,
    /// Clause value does not have the shape its clause requires.
    #[cfg_attr(feature = "serde", serde(rename = "SYN004"))]
    Syn004,
    /// Clause defined more than once.
    #[cfg_attr(feature = "serde", serde(rename = "SEM001"))]
    Sem001,
    /// Mandatory clause missing.
    #[cfg_attr(feature = "serde", serde(rename = "SEM002"))]
    Sem002,
    /// End date before begin date.
    #[cfg_attr(feature = "serde", serde(rename = "SEM003"))]
    Sem003,
    /// Same connection and same table on both sides.
    #[cfg_attr(feature = "serde", serde(rename = "SEM004"))]
    Sem004,
    /// Not a calendar date.
    #[cfg_attr(feature = "serde", serde(rename = "SEM005"))]
    Sem005,
}

impl Code {
    pub const ALL: [Code; 10] = [
        Code::Lex001,
        Code::Syn001,
        Code::Syn002,
        Code::Syn003,
        Code::Syn004,
        Code::Sem001,
        Code::Sem002,
        Code::Sem003,
        Code::Sem004,
        Code::Sem005,
    ];

    pub const fn as_str(self) -> &'static str {
        match self {
            Code::Lex001 => "LEX001",
            Code::Syn001 => "SYN001",
            Code::Syn002 => "SYN002",
            Code::Syn003 => "SYN003",
            Code::Syn004 => "SYN004",
            Code::Sem001 => "SEM001",
            Code::Sem002 => "SEM002",
            Code::Sem003 => "SEM003",
            Code::Sem004 => "SEM004",
            Code::Sem005 => "SEM005",
        }
    }

    pub fn parse(s: &str) -> Option<Code> {
        Code::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum Severity {
    Error,
}

/// One compiler message, pinned to a physical source line (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Diagnostic {
    pub line: u32,
    pub code: Code,
    pub severity: Severity,
    pub message: String,
    pub clause: Option<ClauseKind>,
}

impl Diagnostic {
    pub fn error(line: u32, code: Code, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            code,
            severity: Severity::Error,
            message: message.into(),
            clause: None,
        }
    }

    pub fn with_clause(mut self, clause: ClauseKind) -> Self {
        self.clause = Some(clause);
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}] line {}: {}", self.code, self.line, self.message)
    }
}
