//! The statement grammar, recognized by brute force from its BNF text, versus
//! the parser's `accepts` and the full front end.

use std::collections::BTreeSet;

use pindah_core::parser::{accepts, productions, render_bnf, ClauseKind};
use pindah_core::pipeline::Frontend;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BNF: &str = "\
<PINDAH> <SUMBER> <TUJUAN> <TABEL> <TGL_AWAL> <METODE> <EOL> |
<PINDAH> <SUMBER> <TUJUAN> <TABEL> <TABEL2> <TGL_AWAL> <METODE> <EOL> |
<PINDAH> <SUMBER> <TUJUAN> <TABEL> <TGL_AWAL> <TGL_AKHIR> <METODE> <EOL> |
<PINDAH> <SUMBER> <TUJUAN> <TABEL> <TABEL2> <TGL_AWAL> <TGL_AKHIR> <METODE> <EOL> |
<PINDAH> <SUMBER> <TUJUAN> <TABEL> <TGL_AWAL> <METODE> <IGNORE> <EOL> |
<PINDAH> <SUMBER> <TUJUAN> <TABEL> <TABEL2> <TGL_AWAL> <METODE> <IGNORE> <EOL> |
<PINDAH> <SUMBER> <TUJUAN> <TABEL> <TGL_AWAL> <TGL_AKHIR> <METODE> <IGNORE> <EOL> |
<PINDAH> <SUMBER> <TUJUAN> <TABEL> <TABEL2> <TGL_AWAL> <TGL_AKHIR> <METODE> <IGNORE> <EOL>";

/// Clause keyword sequences of the alternatives, `PINDAH` and `EOL` dropped.
fn bnf_language() -> BTreeSet<Vec<String>> {
    BNF.split('|')
        .map(|alt| {
            alt.split_whitespace()
                .map(|s| s.trim_start_matches('<').trim_end_matches('>').to_string())
                .filter(|s| s != "PINDAH" && s != "EOL")
                .collect()
        })
        .collect()
}

fn oracle(kinds: &[ClauseKind]) -> bool {
    let words: Vec<String> = kinds.iter().map(|k| k.keyword().to_string()).collect();
    bnf_language().contains(&words)
}

fn value(kind: ClauseKind) -> &'static str {
    match kind {
        ClauseKind::Source => "ops/pw@prod",
        ClauseKind::Destination => "dwh/pw@dwh",
        ClauseKind::Table => "TRX",
        ClauseKind::Table2 => "TRX_HIST",
        ClauseKind::BeginDate => "01/2006",
        ClauseKind::EndDate => "31/12/2011",
        ClauseKind::Method => "QUERY",
        ClauseKind::Ignore => "Y",
    }
}

fn statement(kinds: &[ClauseKind]) -> String {
    let mut s = String::from("PINDAH");
    for k in kinds {
        s.push_str(&format!(" {}[{}]", k.keyword(), value(*k)));
    }
    s
}

fn front_end_accepts(fe: &Frontend, kinds: &[ClauseKind]) -> bool {
    fe.compile(&statement(kinds)).is_clean()
}

/// Every subsequence of the canonical clause order.
fn canonical_subsets() -> Vec<Vec<ClauseKind>> {
    (0u32..1 << ClauseKind::ALL.len())
        .map(|mask| {
            ClauseKind::ALL
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, k)| *k)
                .collect()
        })
        .collect()
}

#[test]
fn bnf_text_has_eight_productions() {
    assert_eq!(bnf_language().len(), 8);
    let ours: BTreeSet<Vec<String>> = productions()
        .iter()
        .map(|p| p.iter().map(|k| k.keyword().to_string()).collect())
        .collect();
    assert_eq!(ours, bnf_language());
}

#[test]
fn rendered_grammar_lists_every_production() {
    let text = render_bnf();
    for p in bnf_language() {
        let rhs = p.iter().map(|w| format!("<{w}>")).collect::<Vec<_>>().join(" ");
        assert!(text.contains(&format!("<PINDAH> {rhs} <EOL>")), "missing {rhs} in\n{text}");
    }
}

#[test]
fn canonical_subsets_agree() {
    let fe = Frontend::default();
    let subsets = canonical_subsets();
    assert_eq!(subsets.len(), 256);
    let mut accepted = 0;
    for kinds in &subsets {
        let expected = oracle(kinds);
        accepted += usize::from(expected);
        assert_eq!(accepts(kinds), expected, "accepts {kinds:?}");
        assert_eq!(front_end_accepts(&fe, kinds), expected, "front end {kinds:?}");
    }
    assert_eq!(accepted, 8);
}

#[test]
fn seeded_random_orderings_agree() {
    let fe = Frontend::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..2_000 {
        let kinds: Vec<ClauseKind> = if i % 2 == 0 {
            let mut all = ClauseKind::ALL.to_vec();
            all.shuffle(&mut rng);
            all.truncate(rng.gen_range(1..=8));
            all
        } else {
            (0..rng.gen_range(1..=8))
                .map(|_| *ClauseKind::ALL.choose(&mut rng).unwrap())
                .collect()
        };
        let expected = oracle(&kinds);
        assert_eq!(accepts(&kinds), expected, "accepts {kinds:?}");
        assert_eq!(front_end_accepts(&fe, &kinds), expected, "front end {kinds:?}");
    }
}

proptest! {
    #[test]
    fn accepts_matches_oracle(kinds in prop::collection::vec(prop::sample::select(ClauseKind::ALL.to_vec()), 0..10)) {
        prop_assert_eq!(accepts(&kinds), oracle(&kinds));
    }
}
