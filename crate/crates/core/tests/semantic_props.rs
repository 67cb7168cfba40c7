use std::sync::LazyLock;

use chrono::{Datelike, NaiveDate};
use pindah_core::codegen::{generate, render_source, KEYWORD_MAP};
use pindah_core::parser::ClauseKind;
use pindah_core::pipeline::{Compilation, Frontend};
use pindah_core::semantics::{resolve_date, DateError, DateRole, DateSpec};
use pindah_core::{Code, Method, TransferSpec};
use proptest::prelude::*;

static FE: LazyLock<Frontend> = LazyLock::new(Frontend::default);

fn compile(src: &str) -> Compilation {
    FE.compile(src)
}

fn leap(y: i32) -> bool {
    (y % 4 == 0 && y % 100 != 0) || y % 400 == 0
}

fn days_in_month(y: i32, m: u32) -> u32 {
    match m {
        4 | 6 | 9 | 11 => 30,
        2 if leap(y) => 29,
        2 => 28,
        _ => 31,
    }
}

const YEARS: [i32; 9] = [0, 1900, 1999, 2000, 2004, 2010, 2100, 2400, 9999];

#[test]
fn full_dates_enumerated() {
    for y in YEARS {
        for m in 0..=13u32 {
            for d in 0..=32u32 {
                let text = format!("{d:02}/{m:02}/{y:04}");
                let valid = (1..=12).contains(&m) && d >= 1 && d <= days_in_month(y, m);
                for role in [DateRole::Begin, DateRole::End] {
                    match DateSpec::parse(&text).and_then(|s| resolve_date(s, role)) {
                        Ok(date) => {
                            assert!(valid, "{text} accepted");
                            assert_eq!((date.year(), date.month(), date.day()), (y, m, d));
                        }
                        Err(e) => {
                            assert!(!valid, "{text} rejected");
                            assert_eq!(e, DateError::Invalid);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn month_and_year_dates_cover_their_period() {
    for y in YEARS {
        for m in 0..=13u32 {
            let spec = DateSpec::parse(&format!("{m:02}/{y:04}"));
            let (b, e) = (
                spec.clone().and_then(|s| resolve_date(s, DateRole::Begin)),
                spec.and_then(|s| resolve_date(s, DateRole::End)),
            );
            if (1..=12).contains(&m) {
                let (b, e) = (b.unwrap(), e.unwrap());
                assert_eq!((b.year(), b.month(), b.day()), (y, m, 1));
                assert_eq!((e.year(), e.month(), e.day()), (y, m, days_in_month(y, m)));
            } else {
                assert_eq!(b, Err(DateError::Invalid));
                assert_eq!(e, Err(DateError::Invalid));
            }
        }
        let spec = DateSpec::parse(&format!("{y:04}")).unwrap();
        let b = resolve_date(spec, DateRole::Begin).unwrap();
        let e = resolve_date(spec, DateRole::End).unwrap();
        assert_eq!((b.month(), b.day(), e.month(), e.day()), (1, 1, 12, 31));
    }
}

const RESERVED: [&str; 13] = [
    "PINDAH", "SUMBER", "TUJUAN", "TABEL", "TABEL2", "TGL_AWAL", "TGL_AKHIR", "METODE", "IGNORE",
    "QUERY", "LOADER", "TRANSPORTTABLESPACE", "Y",
];

fn ident() -> impl Strategy<Value = String> {
    "[A-Z][A-Z0-9_]{0,10}".prop_filter("reserved", |s| !RESERVED.contains(&s.as_str()))
}

fn word() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,6}"
}

fn conn() -> impl Strategy<Value = String> {
    (word(), word(), word()).prop_map(|(u, p, a)| format!("{u}/{p}@{a}"))
}

fn date() -> impl Strategy<Value = (String, NaiveDate)> {
    (0..3u8, 1990..2030i32, 1..=12u32, 1..=31u32).prop_map(|(form, y, m, d)| {
        let d = d.min(days_in_month(y, m));
        match form {
            0 => (format!("{d:02}/{m:02}/{y}"), NaiveDate::from_ymd_opt(y, m, d).unwrap()),
            1 => (format!("{m:02}/{y}"), NaiveDate::from_ymd_opt(y, m, 1).unwrap()),
            _ => (format!("{y}"), NaiveDate::from_ymd_opt(y, 1, 1).unwrap()),
        }
    })
}

fn method() -> impl Strategy<Value = Method> {
    prop::sample::select(Method::ALL.to_vec())
}

/// A statement with only the mandatory clauses, plus its expected begin date.
fn minimal() -> impl Strategy<Value = (String, String, NaiveDate, Method)> {
    (conn(), word(), ident(), date(), method()).prop_map(|(src, alias, table, (dt, begin), m)| {
        // Destination alias differs from the source so SEM004 cannot fire.
        let dst = format!("dst/pw@{alias}_w");
        let text = format!("PINDAH SUMBER[{src}] TUJUAN[{dst}] TABEL[{table}] TGL_AWAL[{dt}] METODE[{m}]");
        (text, table, begin, m)
    })
}

fn only_spec(src: &str) -> TransferSpec {
    let c = compile(src);
    assert!(c.is_clean(), "{src}: {:?}", c.diagnostics);
    assert_eq!(c.specs.len(), 1);
    c.specs.into_iter().next().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn defaults_fill_in((src, table, begin, m) in minimal()) {
        let spec = only_spec(&src);
        prop_assert_eq!(&spec.table2, &table);
        prop_assert_eq!(spec.begin_date, begin);
        prop_assert_eq!(spec.end_date, spec.begin_date);
        prop_assert!(!spec.ignore_errors);
        prop_assert_eq!(spec.method, m);
    }

    #[test]
    fn rendered_source_round_trips((src, ..) in minimal()) {
        let spec = only_spec(&src);
        let again = only_spec(&render_source(&spec));
        prop_assert_eq!(&again, &spec);
        // Rendering is a fixed point after one pass.
        prop_assert_eq!(render_source(&again), render_source(&spec));
    }

    #[test]
    fn codegen_replaces_keywords_only((src, ..) in minimal()) {
        let spec = only_spec(&src);
        let mut expected = render_source(&spec);
        // Every keyword of the rendered source sits at a clause head: the
        // start of the text or after a space, before `[` or end of text.
        for (from, to) in KEYWORD_MAP {
            if from == "PINDAH" {
                expected = expected.replacen("PINDAH", to, 1);
            } else {
                expected = expected.replace(&format!(" {from}["), &format!(" {to}["));
            }
        }
        prop_assert_eq!(generate(&spec).text, expected);
    }

    #[test]
    fn keyword_substrings_in_tables_survive(prefix in "[A-Z]{0,3}", suffix in "[A-Z0-9]{1,3}") {
        for (kw, _) in KEYWORD_MAP {
            let table = format!("{prefix}{kw}_{suffix}");
            let src = format!("PINDAH SUMBER[a/b@c] TUJUAN[a/b@d] TABEL[{table}] TGL_AWAL[2010] METODE[QUERY]");
            let out = generate(&only_spec(&src)).text;
            prop_assert!(out.contains(&format!(" TABLE[{table}] TABLE2[{table}] ")), "{}", out);
        }
    }
}

fn codes(src: &str) -> Vec<Code> {
    compile(src).codes()
}

const BASE: [(&str, &str); 8] = [
    ("SUMBER", "u/p@a"),
    ("TUJUAN", "u/p@b"),
    ("TABEL", "TRX"),
    ("TABEL2", "TRX"),
    ("TGL_AWAL", "01/01/2010"),
    ("TGL_AKHIR", "31/12/2010"),
    ("METODE", "QUERY"),
    ("IGNORE", "T"),
];

fn stmt(clauses: &[(&str, &str)]) -> String {
    let mut s = "PINDAH".to_string();
    for (k, v) in clauses {
        s.push_str(&format!(" {k}[{v}]"));
    }
    s
}

fn with(changes: &[(&str, &str)]) -> String {
    let clauses: Vec<(&str, &str)> = BASE
        .iter()
        .map(|&(k, v)| changes.iter().find(|c| c.0 == k).copied().unwrap_or((k, v)))
        .collect();
    stmt(&clauses)
}

#[test]
fn each_mandatory_omission_is_sem002() {
    for kind in ClauseKind::ALL.into_iter().filter(|k| !k.is_optional()) {
        let clauses: Vec<_> = BASE.iter().copied().filter(|(k, _)| *k != kind.keyword()).collect();
        let c = compile(&stmt(&clauses));
        assert_eq!(c.codes(), [Code::Sem002], "{kind}");
        assert_eq!(c.diagnostics[0].clause, Some(kind));
    }
}

#[test]
fn single_violations() {
    assert_eq!(codes(&with(&[])), []);
    let dup = with(&[]).replace(" IGNORE[", " METODE[LOADER] IGNORE[");
    assert_eq!(codes(&dup), [Code::Sem001]);
    let late = with(&[("TGL_AWAL", "02/01/2011"), ("TGL_AKHIR", "01/01/2011")]);
    let c = compile(&late);
    assert_eq!(c.codes(), [Code::Sem003]);
    assert!(c.diagnostics[0]
        .message
        .contains("TGL_AWAL=02/01/2011 cannot greater than TGL_AKHIR=01/01/2011"));
    let same = with(&[("TUJUAN", "u/p@a")]);
    let c = compile(&same);
    assert_eq!(c.codes(), [Code::Sem004]);
    assert!(c.diagnostics[0].message.contains("cannot be same if SUMBER=TUJUAN"));
    assert_eq!(codes(&with(&[("TGL_AKHIR", "29/02/2011")])), [Code::Sem005]);
    // Same connection is fine when the tables differ.
    assert_eq!(codes(&with(&[("TUJUAN", "u/p@a"), ("TABEL2", "TRX_H")])), []);
}

#[test]
fn all_violations_reported_together() {
    let src = "PINDAH SUMBER[u/p@a] TUJUAN[u/p@a] TABEL[TRX] TGL_AWAL[2011] TGL_AKHIR[2010] TGL_AKHIR[2009] \
         METODE[QUERY]".to_string();
    let mut got = codes(&src);
    got.sort();
    assert_eq!(got, [Code::Sem001, Code::Sem003, Code::Sem004]);
    let src = "PINDAH SUMBER[u/p@a] TUJUAN[u/p@b] TGL_AWAL[30/02/2011] METODE[QUERY] METODE[LOADER]";
    let mut got = codes(src);
    got.sort();
    assert_eq!(got, [Code::Sem001, Code::Sem002, Code::Sem005]);
}

#[test]
fn violation_reported_on_its_line() {
    let good = with(&[]);
    for k in [1usize, 17, 500, 1000] {
        let mut lines = vec![good.clone(); 1000];
        lines[k - 1] = with(&[("TUJUAN", "u/p@a")]);
        let c = compile(&lines.join("\n"));
        assert_eq!(c.diagnostics.len(), 1);
        assert_eq!(c.diagnostics[0].line as usize, k);
        assert_eq!(c.specs.len(), 999);
    }
}
