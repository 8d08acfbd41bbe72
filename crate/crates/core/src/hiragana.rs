//! Moraic segmentation of hiragana and the gojūon feature table.
//!
//! A mora is one timing unit: a base kana optionally followed by a small
//! ゃ/ゅ/ょ. The sokuon っ is always a mora of its own, which is what makes
//! gemination visible as a single inserted or deleted unit during alignment.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Reserved token that model outputs use for out-of-vocabulary characters.
pub const UNK: &str = "<UNK>";

pub const SOKUON: char = 'っ';
pub const NASAL_N: char = 'ん';
pub const LONG_VOWEL_MARK: char = 'ー';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("empty string where hiragana was expected")]
    Empty,
    #[error("invalid script: {ch:?} (U+{code:04X}) at index {index} is not hiragana", code = *.ch as u32)]
    InvalidScript { index: usize, ch: char },
}

/// Hiragana syllabograms plus the long-vowel mark.
pub fn is_hiragana(c: char) -> bool {
    matches!(c, '\u{3041}'..='\u{3096}') || c == LONG_VOWEL_MARK
}

fn is_glide_combiner(c: char) -> bool {
    matches!(c, 'ゃ' | 'ゅ' | 'ょ')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mora {
    base: char,
    combiner: Option<char>,
}

impl Mora {
    pub fn new(base: char) -> Self {
        Mora {
            base,
            combiner: None,
        }
    }

    pub fn with_combiner(base: char, combiner: char) -> Self {
        Mora {
            base,
            combiner: Some(combiner),
        }
    }

    pub fn base(&self) -> char {
        self.base
    }

    pub fn combiner(&self) -> Option<char> {
        self.combiner
    }

    pub fn is_sokuon(&self) -> bool {
        self.base == SOKUON && self.combiner.is_none()
    }

    pub fn char_len(&self) -> usize {
        1 + self.combiner.is_some() as usize
    }

    pub fn push_to(&self, out: &mut String) {
        out.push(self.base);
        if let Some(c) = self.combiner {
            out.push(c);
        }
    }
}

impl fmt::Display for Mora {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::with_capacity(6);
        self.push_to(&mut s);
        f.write_str(&s)
    }
}

/// A unit of a (possibly model-generated) form: a mora or the `<UNK>` sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Unit {
    Mora(Mora),
    Unk,
}

impl Unit {
    pub fn is_sokuon(&self) -> bool {
        matches!(self, Unit::Mora(m) if m.is_sokuon())
    }

    pub fn mora(&self) -> Option<Mora> {
        match self {
            Unit::Mora(m) => Some(*m),
            Unit::Unk => None,
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unit::Mora(m) => m.fmt(f),
            Unit::Unk => f.write_str(UNK),
        }
    }
}

/// One code point of a form, with `<UNK>` folded into a single symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Char(char),
    Unk,
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Char(c) => write!(f, "{c}"),
            Symbol::Unk => f.write_str(UNK),
        }
    }
}

/// Splits text into symbols, reading every literal `<UNK>` as one symbol.
pub fn symbols(text: &str) -> Vec<Symbol> {
    let mut out = Vec::with_capacity(text.len() / 3);
    let mut rest = text;
    while let Some(c) = rest.chars().next() {
        if rest.starts_with(UNK) {
            out.push(Symbol::Unk);
            rest = &rest[UNK.len()..];
        } else {
            out.push(Symbol::Char(c));
            rest = &rest[c.len_utf8()..];
        }
    }
    out
}

fn group(symbols: impl Iterator<Item = (usize, Symbol)>) -> Result<Vec<Unit>, ScriptError> {
    let mut units: Vec<Unit> = Vec::new();
    for (index, sym) in symbols {
        let ch = match sym {
            Symbol::Unk => {
                units.push(Unit::Unk);
                continue;
            }
            Symbol::Char(c) => c,
        };
        if !is_hiragana(ch) {
            return Err(ScriptError::InvalidScript { index, ch });
        }
        if is_glide_combiner(ch) {
            if let Some(Unit::Mora(prev)) = units.last_mut() {
                if prev.combiner.is_none() && !prev.is_sokuon() && prev.base != LONG_VOWEL_MARK {
                    prev.combiner = Some(ch);
                    continue;
                }
            }
        }
        units.push(Unit::Mora(Mora::new(ch)));
    }
    Ok(units)
}

/// Segments a hiragana string into moras.
pub fn segment_moras(text: &str) -> Result<Vec<Mora>, ScriptError> {
    if text.is_empty() {
        return Err(ScriptError::Empty);
    }
    let units = group(text.chars().map(Symbol::Char).enumerate())?;
    Ok(units
        .into_iter()
        .map(|u| u.mora().expect("plain text never yields the sentinel"))
        .collect())
}

/// Segments a predicted form, where `<UNK>` is accepted as a unit of its own.
pub fn segment_units(text: &str) -> Result<Vec<Unit>, ScriptError> {
    if text.is_empty() {
        return Err(ScriptError::Empty);
    }
    group(symbols(text).into_iter().enumerate())
}

pub fn join_moras(moras: &[Mora]) -> String {
    let mut s = String::with_capacity(moras.len() * 3);
    for m in moras {
        m.push_to(&mut s);
    }
    s
}

pub fn join_units(units: &[Unit]) -> String {
    units.iter().map(ToString::to_string).collect()
}

/// Checks that `text` is a non-empty hiragana string.
pub fn validate(text: &str) -> Result<(), ScriptError> {
    if text.is_empty() {
        return Err(ScriptError::Empty);
    }
    match text.chars().enumerate().find(|(_, c)| !is_hiragana(*c)) {
        Some((index, ch)) => Err(ScriptError::InvalidScript { index, ch }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Row {
    K,
    G,
    S,
    Z,
    T,
    D,
    N,
    H,
    B,
    P,
    M,
    Y,
    R,
    W,
    Vowel,
    Sokuon,
    NasalN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vowel {
    A,
    I,
    U,
    E,
    O,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KanaFeatures {
    pub row: Row,
    pub vowel: Vowel,
}

const VOWELS: [Vowel; 5] = [Vowel::A, Vowel::I, Vowel::U, Vowel::E, Vowel::O];

// Gojūon rows in a-i-u-e-o order; small vowels share their row.
const GOJUON: &[(Row, &str)] = &[
    (Row::Vowel, "あいうえお"),
    (Row::Vowel, "ぁぃぅぇぉ"),
    (Row::K, "かきくけこ"),
    (Row::G, "がぎぐげご"),
    (Row::S, "さしすせそ"),
    (Row::Z, "ざじずぜぞ"),
    (Row::T, "たちつてと"),
    (Row::D, "だぢづでど"),
    (Row::N, "なにぬねの"),
    (Row::H, "はひふへほ"),
    (Row::B, "ばびぶべぼ"),
    (Row::P, "ぱぴぷぺぽ"),
    (Row::M, "まみむめも"),
    (Row::R, "らりるれろ"),
];

fn single_features(c: char) -> KanaFeatures {
    for (row, kana) in GOJUON {
        if let Some(i) = kana.chars().position(|k| k == c) {
            return KanaFeatures {
                row: *row,
                vowel: VOWELS[i],
            };
        }
    }
    let (row, vowel) = match c {
        SOKUON => (Row::Sokuon, Vowel::None),
        NASAL_N => (Row::NasalN, Vowel::None),
        'や' | 'ゃ' => (Row::Y, Vowel::A),
        'ゆ' | 'ゅ' => (Row::Y, Vowel::U),
        'よ' | 'ょ' => (Row::Y, Vowel::O),
        'わ' | 'ゎ' => (Row::W, Vowel::A),
        'ゐ' => (Row::W, Vowel::I),
        'ゑ' => (Row::W, Vowel::E),
        'を' => (Row::W, Vowel::O),
        // Voiced う has no row of its own in the tag set.
        'ゔ' => (Row::B, Vowel::U),
        'ゕ' => (Row::K, Vowel::A),
        'ゖ' => (Row::K, Vowel::E),
        // Small つ is the sokuon; anything else left is the long-vowel mark.
        _ => (Row::Vowel, Vowel::None),
    };
    KanaFeatures { row, vowel }
}

/// Row and vowel of a mora. A glide combiner supplies the vowel.
pub fn kana_features(mora: Mora) -> KanaFeatures {
    let base = single_features(mora.base);
    match mora.combiner {
        Some(c) => KanaFeatures {
            row: base.row,
            vowel: single_features(c).vowel,
        },
        None => base,
    }
}

/// Vowel of the last mora of `text`, if the text is valid hiragana.
pub fn final_vowel(text: &str) -> Option<Vowel> {
    segment_moras(text)
        .ok()
        .and_then(|m| m.last().copied())
        .map(|m| kana_features(m).vowel)
}

/// Positions (in symbols, `<UNK>` counting as one) whose symbol is outside
/// `alphabet`. The sentinel is never part of an alphabet.
pub fn find_unknown_symbols(text: &str, alphabet: &BTreeSet<char>) -> Vec<(usize, Symbol)> {
    symbols(text)
        .into_iter()
        .enumerate()
        .filter(|(_, s)| match s {
            Symbol::Char(c) => !alphabet.contains(c),
            Symbol::Unk => true,
        })
        .collect()
}

/// Character inventory of a set of strings.
pub fn alphabet<'a>(texts: impl IntoIterator<Item = &'a str>) -> BTreeSet<char> {
    texts.into_iter().flat_map(str::chars).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moras(s: &str) -> Vec<String> {
        segment_moras(s)
            .unwrap()
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    #[test]
    fn segments_plain_and_geminate() {
        assert_eq!(moras("かいた"), ["か", "い", "た"]);
        assert_eq!(moras("たった"), ["た", "っ", "た"]);
    }

    #[test]
    fn glides_attach_to_preceding_base() {
        // Small-glyph table: ゃゅょ combine; っ never does.
        assert_eq!(moras("しゃべった"), ["しゃ", "べ", "っ", "た"]);
        assert_eq!(moras("きょう"), ["きょ", "う"]);
        assert_eq!(moras("っゃ"), ["っ", "ゃ"]);
        assert_eq!(moras("ゃ"), ["ゃ"]);
    }

    #[test]
    fn rejects_other_scripts() {
        assert_eq!(
            segment_moras("かイた"),
            Err(ScriptError::InvalidScript { index: 1, ch: 'イ' })
        );
        assert_eq!(
            segment_moras("書く"),
            Err(ScriptError::InvalidScript { index: 0, ch: '書' })
        );
        assert_eq!(segment_moras(""), Err(ScriptError::Empty));
        assert!(segment_moras("つっ<UNK>した").is_err());
    }

    #[test]
    fn long_vowel_mark_is_a_mora() {
        assert_eq!(moras("らーめん"), ["ら", "ー", "め", "ん"]);
        let f = kana_features(Mora::new(LONG_VOWEL_MARK));
        assert_eq!((f.row, f.vowel), (Row::Vowel, Vowel::None));
    }

    #[test]
    fn units_keep_the_sentinel() {
        let units = segment_units("つっ<UNK>した").unwrap();
        assert_eq!(units.len(), 5);
        assert_eq!(units[2], Unit::Unk);
        assert_eq!(join_units(&units), "つっ<UNK>した");
    }

    #[test]
    fn gojuon_features() {
        let f = |c| kana_features(Mora::new(c));
        assert_eq!(f('く'), KanaFeatures { row: Row::K, vowel: Vowel::U });
        assert_eq!(f('べ'), KanaFeatures { row: Row::B, vowel: Vowel::E });
        assert_eq!(f('っ'), KanaFeatures { row: Row::Sokuon, vowel: Vowel::None });
        assert_eq!(f('ん'), KanaFeatures { row: Row::NasalN, vowel: Vowel::None });
        assert_eq!(f('ぢ'), KanaFeatures { row: Row::D, vowel: Vowel::I });
        assert_ne!(f('か').row, f('が').row);
        let sha = kana_features(Mora::with_combiner('し', 'ゃ'));
        assert_eq!((sha.row, sha.vowel), (Row::S, Vowel::A));
    }

    #[test]
    fn features_total_over_block() {
        for c in '\u{3041}'..='\u{3096}' {
            let f = kana_features(Mora::new(c));
            if c == SOKUON || c == NASAL_N {
                assert_eq!(f.vowel, Vowel::None);
            } else {
                assert_ne!(f.vowel, Vowel::None, "{c}");
            }
        }
    }

    #[test]
    fn unknown_symbols() {
        let known = alphabet(["つっぷした"]);
        assert!(find_unknown_symbols("つっぷした", &known).is_empty());
        assert_eq!(
            find_unknown_symbols("つっ<UNK>した", &known),
            vec![(2, Symbol::Unk)]
        );
        let no_i = alphabet(["かた"]);
        assert_eq!(
            find_unknown_symbols("かいた", &no_i),
            vec![(1, Symbol::Char('い'))]
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn hiragana_string() -> impl Strategy<Value = String> {
            prop::collection::vec(
                prop_oneof![
                    prop::char::range('\u{3041}', '\u{3096}'),
                    Just(LONG_VOWEL_MARK),
                ],
                1..12,
            )
            .prop_map(|v| v.into_iter().collect())
        }

        proptest! {
            #[test]
            fn join_inverts_segment(s in hiragana_string()) {
                let m = segment_moras(&s).unwrap();
                prop_assert_eq!(join_moras(&m), s);
                prop_assert!(m.iter().all(|m| !m.is_sokuon() || m.combiner().is_none()));
            }
        }
    }
}
