use std::fmt;

use serde::{Deserialize, Serialize};

use super::align::{align_units, EditOp, EditScript, PlacedEdit};
use crate::hiragana::{segment_moras, segment_units, Unit, UNK};

/// Outcome of auditing one prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorLabel {
    Correct,
    GeminationOmission,
    GeminationInsertion,
    PhonologicalSubstitution,
    MorphemeBoundary,
    CharacterRecognition,
    CompoundVerb,
    StemAlternationOverreg,
    Other,
}

impl ErrorLabel {
    /// The seven failure modes, in report row order.
    pub const FAILURE_MODES: [ErrorLabel; 7] = [
        ErrorLabel::GeminationOmission,
        ErrorLabel::GeminationInsertion,
        ErrorLabel::PhonologicalSubstitution,
        ErrorLabel::MorphemeBoundary,
        ErrorLabel::CharacterRecognition,
        ErrorLabel::CompoundVerb,
        ErrorLabel::StemAlternationOverreg,
    ];

    /// Every non-correct label, `Other` last.
    pub const ERRORS: [ErrorLabel; 8] = [
        ErrorLabel::GeminationOmission,
        ErrorLabel::GeminationInsertion,
        ErrorLabel::PhonologicalSubstitution,
        ErrorLabel::MorphemeBoundary,
        ErrorLabel::CharacterRecognition,
        ErrorLabel::CompoundVerb,
        ErrorLabel::StemAlternationOverreg,
        ErrorLabel::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorLabel::Correct => "Correct",
            ErrorLabel::GeminationOmission => "Gemination omission",
            ErrorLabel::GeminationInsertion => "Gemination insertion",
            ErrorLabel::PhonologicalSubstitution => "Phonological substitution",
            ErrorLabel::MorphemeBoundary => "Morpheme boundary",
            ErrorLabel::CharacterRecognition => "Character recognition (UNK)",
            ErrorLabel::CompoundVerb => "Compound verb error",
            ErrorLabel::StemAlternationOverreg => "Stem alternation / overregularization",
            ErrorLabel::Other => "Other",
        }
    }

    pub fn is_gemination(self) -> bool {
        matches!(
            self,
            ErrorLabel::GeminationOmission | ErrorLabel::GeminationInsertion
        )
    }
}

impl fmt::Display for ErrorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Index where the suffix region of a gold past form begins: the final
/// た/だ, preceded by its っ when there is one.
pub fn suffix_start(gold: &[Unit]) -> usize {
    let n = gold.len();
    let is_suffix = |u: &Unit| {
        u.mora()
            .is_some_and(|m| m.combiner().is_none() && matches!(m.base(), 'た' | 'だ'))
    };
    if n == 0 || !is_suffix(&gold[n - 1]) {
        return n;
    }
    if n >= 2 && gold[n - 2].is_sokuon() {
        n - 2
    } else {
        n - 1
    }
}

fn is_stem_alternation_overreg(lemma: &str, gold: &str, pred: &str) -> bool {
    let Some(last) = lemma.chars().last() else {
        return false;
    };
    let stem = &lemma[..lemma.len() - last.len_utf8()];
    ["った", "っだ"].iter().any(|tail| {
        gold.strip_suffix(tail) == Some(stem) && pred.strip_suffix(tail) == Some(lemma)
    })
}

fn deletes_from_repeat(gold: &[Unit], edit: &PlacedEdit) -> bool {
    let EditOp::Delete(unit) = edit.op else {
        return false;
    };
    let p = edit.position;
    (p > 0 && gold[p - 1] == unit) || gold.get(p + 1) == Some(&unit)
}

/// Assigns exactly one label; the first matching rule wins.
///
/// 1. identical → `Correct`
/// 2. `<UNK>` in the prediction → `CharacterRecognition`
/// 3. a lone deleted っ → `GeminationOmission`
/// 4. a lone inserted っ → `GeminationInsertion`
/// 5. the whole lemma kept before っ + suffix where gold drops its final
///    kana → `StemAlternationOverreg`
/// 6. a lone non-っ substitution in the stem → `PhonologicalSubstitution`
/// 7. edits only in the suffix region, or one deletion out of a repeated
///    stem mora → `MorphemeBoundary`
/// 8. compound lemma with two or more stem deletions/substitutions →
///    `CompoundVerb`
/// 9. `Other`
pub fn classify_error(lemma: &str, gold: &str, pred: &str, compound: bool) -> ErrorLabel {
    classify_with_script(lemma, gold, pred, compound).0
}

pub(crate) fn classify_with_script(
    lemma: &str,
    gold: &str,
    pred: &str,
    compound: bool,
) -> (ErrorLabel, EditScript) {
    let gold_units: Vec<Unit> = match segment_moras(gold) {
        Ok(m) => m.into_iter().map(Unit::Mora).collect(),
        Err(_) => return (ErrorLabel::Other, EditScript::default()),
    };
    let pred_units = segment_units(pred).ok();
    let script = pred_units
        .as_ref()
        .map(|p| align_units(&gold_units, p))
        .unwrap_or_default();

    if gold == pred {
        return (ErrorLabel::Correct, script);
    }
    if pred.contains(UNK) {
        return (ErrorLabel::CharacterRecognition, script);
    }
    if pred_units.is_none() {
        return (ErrorLabel::Other, script);
    }

    let edits = script.edits();
    let stem_len = suffix_start(&gold_units);
    let label = match edits.as_slice() {
        [PlacedEdit { op: EditOp::Delete(u), .. }] if u.is_sokuon() => ErrorLabel::GeminationOmission,
        [PlacedEdit { op: EditOp::Insert(u), .. }] if u.is_sokuon() => ErrorLabel::GeminationInsertion,
        _ if is_stem_alternation_overreg(lemma, gold, pred) => ErrorLabel::StemAlternationOverreg,
        [PlacedEdit { position, op: EditOp::Substitute(g, p) }]
            if *position < stem_len && !g.is_sokuon() && !p.is_sokuon() =>
        {
            ErrorLabel::PhonologicalSubstitution
        }
        _ if edits.iter().all(|e| e.position >= stem_len) => ErrorLabel::MorphemeBoundary,
        [single] if single.position < stem_len && deletes_from_repeat(&gold_units, single) => {
            ErrorLabel::MorphemeBoundary
        }
        _ if compound
            && edits
                .iter()
                .filter(|e| {
                    e.position < stem_len
                        && matches!(e.op, EditOp::Delete(_) | EditOp::Substitute(..))
                })
                .count()
                >= 2 =>
        {
            ErrorLabel::CompoundVerb
        }
        _ => ErrorLabel::Other,
    };
    (label, script)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ErrorLabel::*;

    #[test]
    fn cited_examples() {
        assert_eq!(classify_error("あきれかえる", "あきれかえった", "あきれかえた", true), GeminationOmission);
        assert_eq!(classify_error("おきる", "おきた", "おきった", false), GeminationInsertion);
        assert_eq!(classify_error("まつ", "まった", "まつった", false), StemAlternationOverreg);
        assert_eq!(classify_error("ほめたたえる", "ほめたたえた", "ほめたえた", true), MorphemeBoundary);
        assert_eq!(classify_error("つっぷす", "つっぷした", "つっ<UNK>した", true), CharacterRecognition);
        assert_eq!(classify_error("みる", "みた", "みた", false), Correct);
    }

    #[test]
    fn unk_outranks_gemination() {
        assert_eq!(classify_error("まじる", "まじった", "ま<UNK>った", false), CharacterRecognition);
        assert_eq!(classify_error("まじる", "まじった", "<UNK>", false), CharacterRecognition);
    }

    #[test]
    fn stem_substitution() {
        assert_eq!(classify_error("およぐ", "およいだ", "おもいだ", false), PhonologicalSubstitution);
        // A substitution that produces っ is not a plain stem substitution.
        assert_eq!(classify_error("かく", "かいた", "かった", false), Other);
    }

    #[test]
    fn suffix_region_errors() {
        assert_eq!(classify_error("のむ", "のんだ", "のんた", false), MorphemeBoundary);
        assert_eq!(classify_error("たべる", "たべた", "たべたい", false), MorphemeBoundary);
        assert_eq!(classify_error("かう", "かった", "かいた", false), MorphemeBoundary);
    }

    #[test]
    fn compound_collapse_needs_flag() {
        let (lemma, gold, pred) = ("ひっくりかえる", "ひっくりかえった", "ひくかえった");
        assert_eq!(classify_error(lemma, gold, pred, true), CompoundVerb);
        assert_eq!(classify_error(lemma, gold, pred, false), Other);
    }

    #[test]
    fn voiced_overregularization() {
        // Hypothetical だ-suffixed geminate form keeps the same shape.
        assert!(is_stem_alternation_overreg("まつ", "まっだ", "まつっだ"));
        assert!(!is_stem_alternation_overreg("まつ", "まった", "まった"));
    }

    #[test]
    fn invalid_prediction_is_other() {
        assert_eq!(classify_error("かく", "かいた", "カイタ", false), Other);
        assert_eq!(classify_error("かく", "かいた", "", false), Other);
    }

    #[test]
    fn suffix_region_bounds() {
        let units = |s: &str| -> Vec<Unit> {
            segment_moras(s).unwrap().into_iter().map(Unit::Mora).collect()
        };
        assert_eq!(suffix_start(&units("かいた")), 2);
        assert_eq!(suffix_start(&units("まじった")), 2);
        assert_eq!(suffix_start(&units("のんだ")), 2);
        assert_eq!(suffix_start(&units("かく")), 2);
    }
}
