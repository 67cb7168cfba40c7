//! Ordered, table-driven lexer.
//!
//! The rule table is plain data ([`default_rules`]). At every position the
//! scanner picks the lowest-ranked rule whose pattern matches a non-empty
//! prefix and whose follow guard accepts the next character. Whitespace and
//! line breaks are kept as tokens, so joining every lexeme reproduces the
//! input exactly.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use regex_automata::meta::Regex;
use regex_automata::{Anchored, Input};

/// Lexical class of a token. The names returned by [`TokenGroup::name`] are
/// the group names used in rule tables and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TokenGroup {
    Keyword,
    Identifier,
    Literal,
    OpenSeparator,
    CloseSeparator,
    Operator,
    /// `dd/mm/yyyy`
    FullDate,
    /// `mm/yyyy`
    MonthYear,
    /// `yyyy`
    Year,
    /// Word characters plus `$` and `#`.
    Word,
    Str,
    Slash,
    LineBreak,
    Whitespace,
    EndStatement,
}

impl TokenGroup {
    pub const ALL: [TokenGroup; 15] = [
        TokenGroup::Keyword,
        TokenGroup::Identifier,
        TokenGroup::Literal,
        TokenGroup::OpenSeparator,
        TokenGroup::CloseSeparator,
        TokenGroup::Operator,
        TokenGroup::FullDate,
        TokenGroup::MonthYear,
        TokenGroup::Year,
        TokenGroup::Word,
        TokenGroup::Str,
        TokenGroup::Slash,
        TokenGroup::LineBreak,
        TokenGroup::Whitespace,
        TokenGroup::EndStatement,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            TokenGroup::Keyword => "KEYWORD",
            TokenGroup::Identifier => "IDENTIFIER",
            TokenGroup::Literal => "LITERAL",
            TokenGroup::OpenSeparator => "OPEN_SEPARATOR",
            TokenGroup::CloseSeparator => "CLOSE_SEPARATOR",
            TokenGroup::Operator => "OPERATOR",
            TokenGroup::FullDate => "TGLBLNTHN",
            TokenGroup::MonthYear => "BLNTHN",
            TokenGroup::Year => "TAHUN",
            TokenGroup::Word => "ALFANUMERIKSPESIAL",
            TokenGroup::Str => "STRING",
            TokenGroup::Slash => "SLASH",
            TokenGroup::LineBreak => "LINEBREAK",
            TokenGroup::Whitespace => "WHITESPACE",
            TokenGroup::EndStatement => "END_STMNT",
        }
    }

    pub fn from_name(name: &str) -> Option<TokenGroup> {
        TokenGroup::ALL.into_iter().find(|g| g.name() == name)
    }

    pub const fn is_date(self) -> bool {
        matches!(
            self,
            TokenGroup::FullDate | TokenGroup::MonthYear | TokenGroup::Year
        )
    }

    /// Tokens of these groups end a statement.
    pub const fn is_terminator(self) -> bool {
        matches!(self, TokenGroup::LineBreak | TokenGroup::EndStatement)
    }
}

impl fmt::Display for TokenGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub group: TokenGroup,
    pub lexeme: String,
    pub line: u32,
    pub column: u32,
}

impl Token {
    pub fn is(&self, group: TokenGroup) -> bool {
        self.group == group
    }
}

/// Constraint on the character right after a candidate match.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FollowGuard {
    Any,
    /// Reserved words must not run into a longer word (`TABELX`, `PINDAHAN`).
    NotWordChar,
    /// A date must not be a prefix of a longer date form.
    NotDateChar,
}

impl FollowGuard {
    pub fn accepts(self, next: Option<char>) -> bool {
        match (self, next) {
            (FollowGuard::Any, _) | (_, None) => true,
            (FollowGuard::NotWordChar, Some(c)) => !is_word_char(c),
            (FollowGuard::NotDateChar, Some(c)) => !(c.is_ascii_digit() || c == '/'),
        }
    }
}

/// Characters of the `ALFANUMERIKSPESIAL` class.
pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$' || c == '#'
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexRule {
    pub group: TokenGroup,
    pub pattern: String,
    pub rank: usize,
    pub follow: FollowGuard,
}

/// The fifteen rules in table order.
pub fn default_rules() -> Vec<LexRule> {
    use FollowGuard::*;
    use TokenGroup::*;

    let table: [(TokenGroup, &str, FollowGuard); 15] = [
        (Keyword, r"PINDAH", NotWordChar),
        (
            Identifier,
            r"SUMBER|TUJUAN|TABEL2|TABEL|TGL_AWAL|TGL_AKHIR|METODE|IGNORE",
            NotWordChar,
        ),
        (Literal, r"LOADER|QUERY|TRANSPORTTABLESPACE", NotWordChar),
        (OpenSeparator, r"\[", Any),
        (CloseSeparator, r"\]", Any),
        (Operator, r"@", Any),
        (FullDate, r"[0-9][0-9]/[0-9][0-9]/[0-9][0-9][0-9][0-9]", NotDateChar),
        (MonthYear, r"[0-9][0-9]/[0-9][0-9][0-9][0-9]", NotDateChar),
        (Year, r"[0-9][0-9][0-9][0-9]", NotDateChar),
        (Word, r"[\w$#]+", Any),
        (Str, r"'[^']*'", Any),
        (Slash, r"/", Any),
        (LineBreak, r"\n", Any),
        (Whitespace, r"[^\S\n]+", Any),
        (EndStatement, r"\z", Any),
    ];
    table
        .into_iter()
        .enumerate()
        .map(|(rank, (group, pattern, follow))| LexRule {
            group,
            pattern: pattern.to_string(),
            rank,
            follow,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: u32,
    pub column: u32,
    pub found: char,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no token rule matches {:?} at line {}, column {}",
            self.found, self.line, self.column
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleError {
    Empty,
    BadPattern { rank: usize, message: String },
}

impl fmt::Display for RuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleError::Empty => f.write_str("rule table is empty"),
            RuleError::BadPattern { rank, message } => {
                write!(f, "rule {rank} has an invalid pattern: {message}")
            }
        }
    }
}

/// A compiled rule table.
#[derive(Debug, Clone)]
pub struct Lexer {
    rules: Vec<LexRule>,
    // All patterns as one leftmost-first alternation; the winning pattern id
    // is the lowest rank that matches.
    combined: Regex,
    single: Vec<Regex>,
}

impl Default for Lexer {
    fn default() -> Self {
        Lexer::new(default_rules()).expect("default rule table compiles")
    }
}

struct Cursor {
    line: u32,
    column: u32,
}

impl Cursor {
    fn advance(&mut self, text: &str) {
        for c in text.chars() {
            if c == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
    }
}

impl Lexer {
    pub fn new(mut rules: Vec<LexRule>) -> Result<Lexer, RuleError> {
        if rules.is_empty() {
            return Err(RuleError::Empty);
        }
        rules.sort_by_key(|r| r.rank);
        let patterns: Vec<&str> = rules.iter().map(|r| r.pattern.as_str()).collect();
        let combined = Regex::new_many(&patterns).map_err(|e| RuleError::BadPattern {
            rank: usize::MAX,
            message: e.to_string(),
        })?;
        let single = rules
            .iter()
            .map(|r| {
                Regex::new(&r.pattern).map_err(|e| RuleError::BadPattern {
                    rank: r.rank,
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Lexer {
            rules,
            combined,
            single,
        })
    }

    pub fn rules(&self) -> &[LexRule] {
        &self.rules
    }

    /// Length and rule index of the token starting at byte `pos`.
    fn token_at(&self, source: &str, pos: usize) -> Option<(usize, usize)> {
        let input = Input::new(source)
            .range(pos..)
            .anchored(Anchored::Yes);
        let m = self.combined.search(&input)?;
        let first = m.pattern().as_usize();
        if m.end() > pos && self.rules[first].follow.accepts(source[m.end()..].chars().next()) {
            return Some((m.end() - pos, first));
        }
        // The preferred rule matched empty or was vetoed by its guard: fall
        // back to the remaining rules one by one.
        for idx in first + 1..self.rules.len() {
            let Some(m) = self.single[idx].search(&input) else {
                continue;
            };
            if m.end() > pos && self.rules[idx].follow.accepts(source[m.end()..].chars().next()) {
                return Some((m.end() - pos, idx));
            }
        }
        None
    }

    /// Scans `source` left to right. Stops at the first position no rule
    /// matches.
    pub fn scan(&self, source: &str) -> Result<Vec<Token>, LexError> {
        let mut tokens = Vec::new();
        let mut cursor = Cursor { line: 1, column: 1 };
        let mut pos = 0;
        while pos < source.len() {
            let Some((len, idx)) = self.token_at(source, pos) else {
                return Err(LexError {
                    line: cursor.line,
                    column: cursor.column,
                    found: source[pos..].chars().next().unwrap_or('\0'),
                });
            };
            let lexeme = &source[pos..pos + len];
            tokens.push(Token {
                group: self.rules[idx].group,
                lexeme: lexeme.to_string(),
                line: cursor.line,
                column: cursor.column,
            });
            cursor.advance(lexeme);
            pos += len;
        }
        Ok(tokens)
    }

    /// Like [`Lexer::scan`], but on an error skips to the end of the
    /// offending line and keeps going. Tokens already produced for that line
    /// are kept; callers should discard statements on lines with errors.
    pub fn scan_recovering(&self, source: &str) -> (Vec<Token>, Vec<LexError>) {
        let mut tokens = Vec::new();
        let mut errors = Vec::new();
        let mut cursor = Cursor { line: 1, column: 1 };
        let mut pos = 0;
        while pos < source.len() {
            match self.token_at(source, pos) {
                Some((len, idx)) => {
                    let lexeme = &source[pos..pos + len];
                    tokens.push(Token {
                        group: self.rules[idx].group,
                        lexeme: lexeme.to_string(),
                        line: cursor.line,
                        column: cursor.column,
                    });
                    cursor.advance(lexeme);
                    pos += len;
                }
                None => {
                    errors.push(LexError {
                        line: cursor.line,
                        column: cursor.column,
                        found: source[pos..].chars().next().unwrap_or('\0'),
                    });
                    let skip = source[pos..].find('\n').unwrap_or(source.len() - pos);
                    cursor.advance(&source[pos..pos + skip]);
                    pos += skip;
                }
            }
        }
        (tokens, errors)
    }
}

/// Appends the synthesized end-of-statement marker when the last line of a
/// non-empty source has no trailing newline. The marker has an empty lexeme,
/// so the lexemes still join back to the source.
pub fn terminate(tokens: &mut Vec<Token>, source: &str) {
    if source.is_empty() || source.ends_with('\n') {
        return;
    }
    let mut cursor = Cursor { line: 1, column: 1 };
    cursor.advance(source);
    tokens.push(Token {
        group: TokenGroup::EndStatement,
        lexeme: String::new(),
        line: cursor.line,
        column: cursor.column,
    });
}

/// Scans with the given rule table.
pub fn scan(source: &str, rules: &[LexRule]) -> Result<Vec<Token>, LexError> {
    // Rule tables come from trusted code; a table that fails to compile is a
    // programming error.
    Lexer::new(rules.to_vec())
        .expect("rule table compiles")
        .scan(source)
}
