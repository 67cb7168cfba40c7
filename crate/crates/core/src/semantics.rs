//! Semantic analysis: clause cardinality, defaults, dates and identity
//! checks. Produces the normalized [`TransferSpec`] consumed by code
//! generation, the advisor and the simulator.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use chrono::{Datelike, NaiveDate};

use crate::diagnostic::{Code, Diagnostic};
use crate::parser::{ClauseKind, RawClause, TransferStatement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum Method {
    Query,
    Loader,
    TransportTablespace,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Query, Method::Loader, Method::TransportTablespace];

    pub const fn keyword(self) -> &'static str {
        match self {
            Method::Query => "QUERY",
            Method::Loader => "LOADER",
            Method::TransportTablespace => "TRANSPORTTABLESPACE",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.keyword() == s)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// `user/password@alias`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConnSpec {
    pub user: String,
    pub password: String,
    pub alias: String,
}

impl ConnSpec {
    /// Splits `user/password@alias`. All three parts must be non-empty.
    pub fn parse(text: &str) -> Option<ConnSpec> {
        let (user, rest) = text.split_once('/')?;
        let (password, alias) = rest.rsplit_once('@')?;
        if user.is_empty() || password.is_empty() || alias.is_empty() {
            return None;
        }
        Some(ConnSpec {
            user: user.to_string(),
            password: password.to_string(),
            alias: alias.to_string(),
        })
    }

    /// `user@alias`, for places where the password must not appear.
    pub fn masked(&self) -> String {
        format!("{}@{}", self.user, self.alias)
    }
}

impl fmt::Display for ConnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}@{}", self.user, self.password, self.alias)
    }
}

/// Extracts the connection from a `SUMBER` or `TUJUAN` clause.
pub fn connspec_of(clause: &RawClause) -> Option<ConnSpec> {
    ConnSpec::parse(&clause.value_text())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    Day,
    Month,
    Year,
}

/// A date as written: full date, month of a year, or a whole year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DateSpec {
    pub precision: Precision,
    pub day: Option<u32>,
    pub month: Option<u32>,
    pub year: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DateError {
    /// Text is not `dd/mm/yyyy`, `mm/yyyy` or `yyyy`.
    Format,
    /// Day or month out of range, or no such calendar day.
    Invalid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DateRole {
    Begin,
    End,
}

fn digits(s: &str) -> Result<u32, DateError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(DateError::Format);
    }
    s.parse().map_err(|_| DateError::Format)
}

impl DateSpec {
    pub fn parse(text: &str) -> Result<DateSpec, DateError> {
        let parts: Vec<&str> = text.split('/').collect();
        let lens: Vec<usize> = parts.iter().map(|p| p.len()).collect();
        let (day, month, year) = match lens.as_slice() {
            [2, 2, 4] => (Some(digits(parts[0])?), Some(digits(parts[1])?), digits(parts[2])?),
            [2, 4] => (None, Some(digits(parts[0])?), digits(parts[1])?),
            [4] => (None, None, digits(parts[0])?),
            _ => return Err(DateError::Format),
        };
        let precision = match (day, month) {
            (Some(_), _) => Precision::Day,
            (None, Some(_)) => Precision::Month,
            (None, None) => Precision::Year,
        };
        if day.is_some_and(|d| !(1..=31).contains(&d)) || month.is_some_and(|m| !(1..=12).contains(&m)) {
            return Err(DateError::Invalid);
        }
        Ok(DateSpec {
            precision,
            day,
            month,
            year: year as i32,
        })
    }
}

/// Expands a date to a calendar day. Month and year forms resolve to their
/// first day when they begin a range and to their last day when they end one.
pub fn resolve_date(d: DateSpec, role: DateRole) -> Result<NaiveDate, DateError> {
    let ymd = |y, m, dd| NaiveDate::from_ymd_opt(y, m, dd).ok_or(DateError::Invalid);
    match (d.precision, role) {
        (Precision::Day, _) => ymd(d.year, d.month.ok_or(DateError::Invalid)?, d.day.ok_or(DateError::Invalid)?),
        (Precision::Month, DateRole::Begin) => ymd(d.year, d.month.ok_or(DateError::Invalid)?, 1),
        (Precision::Month, DateRole::End) => {
            let m = d.month.ok_or(DateError::Invalid)?;
            let next = if m == 12 { ymd(d.year + 1, 1, 1)? } else { ymd(d.year, m + 1, 1)? };
            next.pred_opt().ok_or(DateError::Invalid)
        }
        (Precision::Year, DateRole::Begin) => ymd(d.year, 1, 1),
        (Precision::Year, DateRole::End) => ymd(d.year, 12, 31),
    }
}

/// `dd/mm/yyyy`
pub fn format_date(d: NaiveDate) -> String {
    format!("{:02}/{:02}/{:04}", d.day(), d.month(), d.year())
}

/// A validated, default-filled transfer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransferSpec {
    pub line: u32,
    pub source: ConnSpec,
    pub destination: ConnSpec,
    pub table: String,
    pub table2: String,
    pub begin_date: NaiveDate,
    pub end_date: NaiveDate,
    pub method: Method,
    pub ignore_errors: bool,
}

fn first_value(stmt: &TransferStatement, kind: ClauseKind) -> Option<String> {
    stmt.first(kind).map(RawClause::value_text)
}

/// Runs every semantic check and reports all violations, ordered by code.
pub fn analyze(stmt: &TransferStatement) -> Result<TransferSpec, Vec<Diagnostic>> {
    let line = stmt.line;
    let mut diags = Vec::new();

    for kind in ClauseKind::ALL {
        let count = stmt.clauses.iter().filter(|c| c.kind == kind).count();
        if count > 1 {
            diags.push(
                Diagnostic::error(
                    line,
                    Code::Sem001,
                    format!("IDENTIFIER {kind} must not be defined more than once (found {count})"),
                )
                .with_clause(kind),
            );
        } else if count == 0 && !kind.is_optional() {
            diags.push(
                Diagnostic::error(line, Code::Sem002, format!("IDENTIFIER {kind} is not defined"))
                    .with_clause(kind),
            );
        }
    }

    let conn = |kind: ClauseKind, diags: &mut Vec<Diagnostic>| {
        let clause = stmt.first(kind)?;
        let c = connspec_of(clause);
        if c.is_none() {
            diags.push(
                Diagnostic::error(
                    line,
                    Code::Syn004,
                    format!("{kind}[{}] is not user/password@alias", clause.value_text()),
                )
                .with_clause(kind),
            );
        }
        c
    };
    let source = conn(ClauseKind::Source, &mut diags);
    let destination = conn(ClauseKind::Destination, &mut diags);

    let table = first_value(stmt, ClauseKind::Table);
    let table2 = first_value(stmt, ClauseKind::Table2).or_else(|| table.clone());

    let date = |kind: ClauseKind, role: DateRole, diags: &mut Vec<Diagnostic>| {
        let text = first_value(stmt, kind)?;
        let resolved = DateSpec::parse(&text).and_then(|d| resolve_date(d, role));
        match resolved {
            Ok(d) => Some(d),
            Err(DateError::Invalid) => {
                diags.push(
                    Diagnostic::error(
                        line,
                        Code::Sem005,
                        format!("{kind}={text} is not a valid calendar date"),
                    )
                    .with_clause(kind),
                );
                None
            }
            Err(DateError::Format) => {
                diags.push(
                    Diagnostic::error(line, Code::Syn004, format!("{kind}[{text}] is not a date"))
                        .with_clause(kind),
                );
                None
            }
        }
    };
    let begin = date(ClauseKind::BeginDate, DateRole::Begin, &mut diags);
    let end = if stmt.first(ClauseKind::EndDate).is_some() {
        date(ClauseKind::EndDate, DateRole::End, &mut diags)
    } else {
        begin
    };
    if let (Some(b), Some(e)) = (begin, end) {
        if e < b {
            diags.push(
                Diagnostic::error(
                    line,
                    Code::Sem003,
                    format!(
                        "TGL_AWAL={} cannot greater than TGL_AKHIR={}",
                        format_date(b),
                        format_date(e)
                    ),
                )
                .with_clause(ClauseKind::EndDate),
            );
        }
    }

    if let (Some(s), Some(d), Some(t), Some(t2)) = (&source, &destination, &table, &table2) {
        if s == d && t == t2 {
            diags.push(
                Diagnostic::error(
                    line,
                    Code::Sem004,
                    format!("TABEL={t} and TABEL2={t2} cannot be same if SUMBER=TUJUAN"),
                )
                .with_clause(ClauseKind::Table2),
            );
        }
    }

    let method = first_value(stmt, ClauseKind::Method).and_then(|m| {
        let parsed = Method::from_keyword(&m);
        if parsed.is_none() {
            diags.push(
                Diagnostic::error(line, Code::Syn004, format!("METODE[{m}] is not a transfer method"))
                    .with_clause(ClauseKind::Method),
            );
        }
        parsed
    });
    let ignore_errors = match first_value(stmt, ClauseKind::Ignore).as_deref() {
        None | Some("T") => false,
        Some("Y") => true,
        Some(other) => {
            diags.push(
                Diagnostic::error(line, Code::Syn004, format!("IGNORE[{other}] must be Y or T"))
                    .with_clause(ClauseKind::Ignore),
            );
            false
        }
    };

    if !diags.is_empty() {
        diags.sort_by_key(|d| d.code);
        return Err(diags);
    }
    match (source, destination, table, table2, begin, end, method) {
        (Some(source), Some(destination), Some(table), Some(table2), Some(begin_date), Some(end_date), Some(method)) => {
            Ok(TransferSpec {
                line,
                source,
                destination,
                table,
                table2,
                begin_date,
                end_date,
                method,
                ignore_errors,
            })
        }
        // Every missing piece above has already produced a diagnostic.
        _ => unreachable!("incomplete statement without diagnostics"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexer::{terminate, Lexer};
    use crate::parser::{parse_statement, split_statements, SyntaxRuleTable};
    use alloc::vec;

    fn stmt(src: &str) -> TransferStatement {
        let mut toks = Lexer::default().scan(src).unwrap();
        terminate(&mut toks, src);
        let slices = split_statements(&toks);
        parse_statement(slices[0], &SyntaxRuleTable::default()).unwrap()
    }

    fn codes(src: &str) -> Vec<Code> {
        analyze(&stmt(src)).unwrap_err().into_iter().map(|d| d.code).collect()
    }

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn end_before_begin() {
        let diags = analyze(&stmt(
            "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX] TGL_AWAL[01/01/2011] TGL_AKHIR[01/01/2010] METODE[QUERY]",
        ))
        .unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::Sem003);
        assert_eq!(
            diags[0].message,
            "TGL_AWAL=01/01/2011 cannot greater than TGL_AKHIR=01/01/2010"
        );
    }

    #[test]
    fn defaults() {
        let spec = analyze(&stmt(
            "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX] TGL_AWAL[05/03/2010] METODE[QUERY]",
        ))
        .unwrap();
        assert_eq!(spec.table2, "TRX");
        assert_eq!(spec.begin_date, date(2010, 3, 5));
        assert_eq!(spec.end_date, date(2010, 3, 5));
        assert!(!spec.ignore_errors);
    }

    #[test]
    fn same_connection_same_table() {
        let diags = analyze(&stmt(
            "PINDAH SUMBER[u/p@a] TUJUAN[u/p@a] TABEL[TRX] TABEL2[TRX] TGL_AWAL[2006] METODE[QUERY]",
        ))
        .unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].message, "TABEL=TRX and TABEL2=TRX cannot be same if SUMBER=TUJUAN");
        // Different password: different connection.
        assert!(analyze(&stmt(
            "PINDAH SUMBER[u/p@a] TUJUAN[u/q@a] TABEL[TRX] TGL_AWAL[2006] METODE[QUERY]"
        ))
        .is_ok());
        // Same connection, different table.
        assert!(analyze(&stmt(
            "PINDAH SUMBER[u/p@a] TUJUAN[u/p@a] TABEL[TRX] TABEL2[TRX_H] TGL_AWAL[2006] METODE[QUERY]"
        ))
        .is_ok());
    }

    #[test]
    fn duplicate_clause() {
        let diags = analyze(&stmt(
            "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX] TGL_AWAL[2006] METODE[QUERY] METODE[LOADER]",
        ))
        .unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::Sem001);
        assert_eq!(diags[0].clause, Some(ClauseKind::Method));
        assert!(diags[0].message.contains("METODE"));
    }

    #[test]
    fn missing_clauses() {
        assert_eq!(codes("PINDAH"), vec![Code::Sem002; 5]);
    }

    #[test]
    fn multiple_violations_reported() {
        assert_eq!(
            codes("PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX] TGL_AWAL[2011] TGL_AKHIR[2010] METODE[QUERY] METODE[QUERY]"),
            vec![Code::Sem001, Code::Sem003]
        );
    }

    #[test]
    fn invalid_calendar_date() {
        assert_eq!(
            codes("PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX] TGL_AWAL[31/02/2010] METODE[QUERY]"),
            vec![Code::Sem005]
        );
        assert_eq!(
            codes("PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX] TGL_AWAL[2010] TGL_AKHIR[13/2010] METODE[QUERY]"),
            vec![Code::Sem005]
        );
    }

    #[test]
    fn resolve_forms() {
        let p = |s| DateSpec::parse(s).unwrap();
        assert_eq!(resolve_date(p("15/06/2009"), DateRole::Begin), Ok(date(2009, 6, 15)));
        assert_eq!(resolve_date(p("02/2008"), DateRole::End), Ok(date(2008, 2, 29)));
        assert_eq!(resolve_date(p("02/2008"), DateRole::Begin), Ok(date(2008, 2, 1)));
        assert_eq!(resolve_date(p("12/2010"), DateRole::End), Ok(date(2010, 12, 31)));
        assert_eq!(resolve_date(p("2006"), DateRole::Begin), Ok(date(2006, 1, 1)));
        assert_eq!(resolve_date(p("2011"), DateRole::End), Ok(date(2011, 12, 31)));
        assert_eq!(resolve_date(p("30/02/2012"), DateRole::Begin), Err(DateError::Invalid));
        assert_eq!(DateSpec::parse("00/01/2010"), Err(DateError::Invalid));
        assert_eq!(DateSpec::parse("1/1/2010"), Err(DateError::Format));
    }

    #[test]
    fn year_span() {
        let spec = analyze(&stmt(
            "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX] TGL_AWAL[2006] TGL_AKHIR[2011] METODE[QUERY]",
        ))
        .unwrap();
        assert_eq!((spec.begin_date, spec.end_date), (date(2006, 1, 1), date(2011, 12, 31)));
    }

    #[test]
    fn connspec() {
        let c = ConnSpec::parse("scott/tiger@prod").unwrap();
        assert_eq!((c.user.as_str(), c.password.as_str(), c.alias.as_str()), ("scott", "tiger", "prod"));
        assert_eq!(ConnSpec::parse("a/a@a").unwrap().to_string(), "a/a@a");
        assert_eq!(ConnSpec::parse("u/p@a"), ConnSpec::parse("u/p@a"));
        assert_eq!(ConnSpec::parse("u@a"), None);
        assert_eq!(c.masked(), "scott@prod");
    }

    #[test]
    fn ignore_flag() {
        let spec = analyze(&stmt(
            "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TABEL[TRX] TGL_AWAL[2006] METODE[LOADER] IGNORE[Y]",
        ))
        .unwrap();
        assert!(spec.ignore_errors);
        assert_eq!(spec.method, Method::Loader);
    }
}
