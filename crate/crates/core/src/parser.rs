//! Statement splitting and clause-level syntax checks.
//!
//! Every statement occupies one line and must start with `PINDAH`, followed
//! by whitespace-separated clauses of the form `NAME[value]` in the fixed
//! order below. Optional clauses may be left out. Clause *cardinality*
//! (duplicates, missing mandatory clauses) is left to [`crate::semantics`];
//! the parser only checks local shape and that clause names never go
//! backwards in the order.
//!
//! ```text
//! PINDAH SUMBER TUJUAN TABEL [TABEL2] TGL_AWAL [TGL_AKHIR] METODE [IGNORE]
//! ```

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::diagnostic::{Code, Diagnostic};
use crate::lexer::{Token, TokenGroup};

pub const KEYWORD: &str = "PINDAH";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ClauseKind {
    #[cfg_attr(feature = "serde", serde(rename = "SUMBER"))]
    Source,
    #[cfg_attr(feature = "serde", serde(rename = "TUJUAN"))]
    Destination,
    #[cfg_attr(feature = "serde", serde(rename = "TABEL"))]
    Table,
    #[cfg_attr(feature = "serde", serde(rename = "TABEL2"))]
    Table2,
    #[cfg_attr(feature = "serde", serde(rename = "TGL_AWAL"))]
    BeginDate,
    #[cfg_attr(feature = "serde", serde(rename = "TGL_AKHIR"))]
    EndDate,
    #[cfg_attr(feature = "serde", serde(rename = "METODE"))]
    Method,
    #[cfg_attr(feature = "serde", serde(rename = "IGNORE"))]
    Ignore,
}

impl ClauseKind {
    /// Canonical clause order.
    pub const ALL: [ClauseKind; 8] = [
        ClauseKind::Source,
        ClauseKind::Destination,
        ClauseKind::Table,
        ClauseKind::Table2,
        ClauseKind::BeginDate,
        ClauseKind::EndDate,
        ClauseKind::Method,
        ClauseKind::Ignore,
    ];

    pub const OPTIONAL: [ClauseKind; 3] =
        [ClauseKind::Table2, ClauseKind::EndDate, ClauseKind::Ignore];

    pub const fn keyword(self) -> &'static str {
        match self {
            ClauseKind::Source => "SUMBER",
            ClauseKind::Destination => "TUJUAN",
            ClauseKind::Table => "TABEL",
            ClauseKind::Table2 => "TABEL2",
            ClauseKind::BeginDate => "TGL_AWAL",
            ClauseKind::EndDate => "TGL_AKHIR",
            ClauseKind::Method => "METODE",
            ClauseKind::Ignore => "IGNORE",
        }
    }

    pub fn from_keyword(s: &str) -> Option<ClauseKind> {
        ClauseKind::ALL.into_iter().find(|k| k.keyword() == s)
    }

    pub const fn rank(self) -> usize {
        self as usize
    }

    pub const fn is_optional(self) -> bool {
        matches!(
            self,
            ClauseKind::Table2 | ClauseKind::EndDate | ClauseKind::Ignore
        )
    }
}

impl fmt::Display for ClauseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawClause {
    pub kind: ClauseKind,
    /// Tokens strictly between `[` and `]`.
    pub value_tokens: Vec<Token>,
    pub line: u32,
}

impl RawClause {
    pub fn value_text(&self) -> String {
        self.value_tokens.iter().map(|t| t.lexeme.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferStatement {
    pub line: u32,
    pub clauses: Vec<RawClause>,
}

impl TransferStatement {
    pub fn kinds(&self) -> Vec<ClauseKind> {
        self.clauses.iter().map(|c| c.kind).collect()
    }

    pub fn first(&self, kind: ClauseKind) -> Option<&RawClause> {
        self.clauses.iter().find(|c| c.kind == kind)
    }

    /// Source text of the statement with single spaces between clauses.
    pub fn to_source(&self) -> String {
        let mut out = String::from(KEYWORD);
        for c in &self.clauses {
            out.push(' ');
            out.push_str(c.kind.keyword());
            out.push('[');
            out.push_str(&c.value_text());
            out.push(']');
        }
        out
    }
}

/// One position in a follow sequence: the token must belong to one of
/// `groups` and, when `lexemes` is set, spell one of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FollowStep {
    pub groups: Vec<TokenGroup>,
    pub lexemes: Option<Vec<String>>,
    pub message: String,
}

impl FollowStep {
    fn new(groups: &[TokenGroup], message: &str) -> Self {
        FollowStep {
            groups: groups.to_vec(),
            lexemes: None,
            message: message.to_string(),
        }
    }

    fn spelled(mut self, lexemes: &[&str]) -> Self {
        self.lexemes = Some(lexemes.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn matches(&self, token: &Token) -> bool {
        self.groups.contains(&token.group)
            && self
                .lexemes
                .as_ref()
                .is_none_or(|ls| ls.contains(&token.lexeme))
    }

    /// `A|B` rendering of the accepted groups (or lexemes when pinned).
    pub fn expected(&self) -> String {
        match &self.lexemes {
            Some(ls) => ls.join("|"),
            None => {
                let names: Vec<&str> = self.groups.iter().map(|g| g.name()).collect();
                names.join("|")
            }
        }
    }
}

/// Expected follow sequence for `PINDAH` and for each clause name.
///
/// The `PINDAH` entry describes what must come after the keyword and after
/// every closed clause; clause entries describe the bracketed value,
/// brackets included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxRuleTable {
    entries: BTreeMap<String, Vec<FollowStep>>,
}

impl Default for SyntaxRuleTable {
    fn default() -> Self {
        use TokenGroup::*;

        let open = FollowStep::new(&[OpenSeparator], "OPEN_SEPARATOR must follow the clause name");
        let close = FollowStep::new(&[CloseSeparator], "CLOSE_SEPARATOR must end the clause value");
        let word = |msg: &str| FollowStep::new(&[Word], msg);
        let connection = vec![
            open.clone(),
            word("user name expected"),
            FollowStep::new(&[Slash], "SLASH expected between user and password"),
            word("password expected"),
            FollowStep::new(&[Operator], "OPERATOR @ expected before the database alias"),
            word("database alias expected"),
            close.clone(),
        ];
        let table = vec![open.clone(), word("table name expected"), close.clone()];
        let date = vec![
            open.clone(),
            FollowStep::new(&[FullDate, MonthYear, Year], "date expected as dd/mm/yyyy, mm/yyyy or yyyy"),
            close.clone(),
        ];

        let mut entries = BTreeMap::new();
        entries.insert(
            KEYWORD.to_string(),
            vec![
                FollowStep::new(&[Whitespace], "WHITESPACE must separate clauses"),
                FollowStep::new(&[Identifier], "IDENTIFIER must be declared"),
            ],
        );
        entries.insert("SUMBER".to_string(), connection.clone());
        entries.insert("TUJUAN".to_string(), connection);
        entries.insert("TABEL".to_string(), table.clone());
        entries.insert("TABEL2".to_string(), table);
        entries.insert("TGL_AWAL".to_string(), date.clone());
        entries.insert("TGL_AKHIR".to_string(), date);
        entries.insert(
            "METODE".to_string(),
            vec![
                open.clone(),
                FollowStep::new(&[Literal], "method expected").spelled(&[
                    "QUERY",
                    "LOADER",
                    "TRANSPORTTABLESPACE",
                ]),
                close.clone(),
            ],
        );
        entries.insert(
            "IGNORE".to_string(),
            vec![
                open,
                FollowStep::new(&[Word], "IGNORE takes Y or T").spelled(&["Y", "T"]),
                close,
            ],
        );
        SyntaxRuleTable { entries }
    }
}

impl SyntaxRuleTable {
    pub fn follow(&self, head: &str) -> Option<&[FollowStep]> {
        self.entries.get(head).map(Vec::as_slice)
    }

    pub fn heads(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Tokens of one statement, without the terminating line break.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatementSlice<'a> {
    pub line: u32,
    pub tokens: &'a [Token],
}

/// Splits a token stream at line breaks and end markers. Blank lines are
/// dropped.
pub fn split_statements(tokens: &[Token]) -> Vec<StatementSlice<'_>> {
    tokens
        .split(|t| t.group.is_terminator())
        .filter_map(|slice| {
            let first = slice.iter().find(|t| t.group != TokenGroup::Whitespace)?;
            Some(StatementSlice {
                line: first.line,
                tokens: slice,
            })
        })
        .collect()
}

fn describe(t: &Token) -> String {
    format!("{} '{}'", t.group, t.lexeme)
}

/// Checks one statement against the grammar. Stops at the first error.
pub fn parse_statement(
    slice: StatementSlice<'_>,
    table: &SyntaxRuleTable,
) -> Result<TransferStatement, Diagnostic> {
    let line = slice.line;
    let toks: &[Token] = {
        let start = slice
            .tokens
            .iter()
            .position(|t| t.group != TokenGroup::Whitespace)
            .unwrap_or(slice.tokens.len());
        &slice.tokens[start..]
    };
    let Some(first) = toks.first() else {
        return Ok(TransferStatement {
            line,
            clauses: Vec::new(),
        });
    };
    if !(first.group == TokenGroup::Keyword && first.lexeme == KEYWORD) {
        return Err(Diagnostic::error(
            line,
            Code::Syn001,
            format!("KEYWORD {KEYWORD} must start the statement, found {}", describe(first)),
        ));
    }
    let head = table.follow(KEYWORD).expect("rule table has a PINDAH entry");
    let (separator, identifier) = (&head[0], &head[1]);

    let mut clauses = Vec::new();
    let mut prev_token = first;
    let mut prev_kind: Option<ClauseKind> = None;
    let mut i = 1;
    while i < toks.len() {
        if !separator.matches(&toks[i]) {
            return Err(Diagnostic::error(
                line,
                Code::Syn002,
                format!(
                    "{} next value {}: {}, expected {}",
                    prev_token.lexeme,
                    describe(&toks[i]),
                    separator.message,
                    separator.expected()
                ),
            ));
        }
        while i < toks.len() && separator.matches(&toks[i]) {
            i += 1;
        }
        if i == toks.len() {
            break;
        }

        let name = &toks[i];
        let allowed: Vec<&str> = ClauseKind::ALL
            .iter()
            .filter(|k| prev_kind.is_none_or(|p| k.rank() >= p.rank()))
            .map(|k| k.keyword())
            .collect();
        let kind = if identifier.matches(name) {
            ClauseKind::from_keyword(&name.lexeme)
        } else {
            None
        };
        let kind = match kind {
            Some(k) if prev_kind.is_none_or(|p| k.rank() >= p.rank()) => k,
            _ => {
                return Err(Diagnostic::error(
                    line,
                    Code::Syn002,
                    format!(
                        "{} next value {}: {}, expected {}",
                        prev_token.lexeme,
                        describe(name),
                        identifier.message,
                        allowed.join("|")
                    ),
                ))
            }
        };
        let steps = table
            .follow(kind.keyword())
            .expect("rule table has an entry for every clause");
        i += 1;

        let open = &steps[0];
        match toks.get(i) {
            Some(t) if open.matches(t) => i += 1,
            other => {
                let found = other.map_or_else(|| "end of statement".to_string(), describe);
                return Err(Diagnostic::error(
                    line,
                    Code::Syn002,
                    format!("{} next value {found}: {}", kind, open.message),
                )
                .with_clause(kind));
            }
        }

        let value_start = i;
        loop {
            match toks.get(i) {
                None => {
                    return Err(Diagnostic::error(
                        line,
                        Code::Syn003,
                        format!("{kind}[ is never closed"),
                    )
                    .with_clause(kind))
                }
                Some(t) if t.group == TokenGroup::CloseSeparator => break,
                Some(t) if t.group == TokenGroup::OpenSeparator => {
                    return Err(Diagnostic::error(
                        line,
                        Code::Syn003,
                        format!("{kind}[ is not closed before the next '['"),
                    )
                    .with_clause(kind))
                }
                Some(_) => i += 1,
            }
        }
        let value = &toks[value_start..i];
        check_value(kind, value, &steps[1..steps.len() - 1], line)?;
        prev_token = &toks[i];
        i += 1;

        clauses.push(RawClause {
            kind,
            value_tokens: value.to_vec(),
            line,
        });
        prev_kind = Some(kind);
    }
    Ok(TransferStatement { line, clauses })
}

fn check_value(
    kind: ClauseKind,
    value: &[Token],
    steps: &[FollowStep],
    line: u32,
) -> Result<(), Diagnostic> {
    let text: String = value.iter().map(|t| t.lexeme.as_str()).collect();
    if value.is_empty() {
        return Err(Diagnostic::error(line, Code::Syn004, format!("{kind}[] has an empty value"))
            .with_clause(kind));
    }
    for (pos, step) in steps.iter().enumerate() {
        match value.get(pos) {
            Some(t) if step.matches(t) => {}
            Some(t) => {
                return Err(Diagnostic::error(
                    line,
                    Code::Syn004,
                    format!(
                        "{kind}[{text}] wrong format at {}: {}, expected {}",
                        describe(t),
                        step.message,
                        step.expected()
                    ),
                )
                .with_clause(kind))
            }
            None => {
                return Err(Diagnostic::error(
                    line,
                    Code::Syn004,
                    format!("{kind}[{text}] is incomplete: {}", step.message),
                )
                .with_clause(kind))
            }
        }
    }
    if let Some(extra) = value.get(steps.len()) {
        return Err(Diagnostic::error(
            line,
            Code::Syn004,
            format!("{kind}[{text}] has unexpected {}", describe(extra)),
        )
        .with_clause(kind));
    }
    Ok(())
}

/// True iff `kinds` is one of the eight statement productions: the canonical
/// order with any subset of the optional clauses left out.
pub fn accepts(kinds: &[ClauseKind]) -> bool {
    let mut rest = kinds.iter().peekable();
    for kind in ClauseKind::ALL {
        if rest.peek() == Some(&&kind) {
            rest.next();
        } else if !kind.is_optional() {
            return false;
        }
    }
    rest.next().is_none()
}

/// The eight productions, in the conventional listing order: `TABEL2`
/// varies fastest, then `TGL_AKHIR`, then `IGNORE`.
pub fn productions() -> Vec<Vec<ClauseKind>> {
    (0u8..8)
        .map(|mask| {
            ClauseKind::ALL
                .into_iter()
                .filter(|k| match k {
                    ClauseKind::Table2 => mask & 1 != 0,
                    ClauseKind::EndDate => mask & 2 != 0,
                    ClauseKind::Ignore => mask & 4 != 0,
                    _ => true,
                })
                .collect()
        })
        .collect()
}

/// BNF text of the statement grammar.
pub fn render_bnf() -> String {
    let alternatives: Vec<String> = productions()
        .iter()
        .map(|p| {
            let mut s = String::from("<PINDAH>");
            for k in p {
                s.push_str(" <");
                s.push_str(k.keyword());
                s.push('>');
            }
            s.push_str(" <EOL>");
            s
        })
        .collect();
    format!("<STATEMENT> ::= {}\n", alternatives.join(" |\n    "))
}
