//! Verb classification and the past-tense rule table.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hiragana::{self, kana_features, Mora, Row, ScriptError, Vowel};

/// Conjugation type of a verb, following the refined Type 1/2/3/4 scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VerbType {
    /// Type 1: godan verbs.
    #[serde(rename = "type1")]
    Godan,
    /// Type 2: ichidan verbs.
    #[serde(rename = "type2")]
    Ichidan,
    /// Type 4-1: godan -iru verbs that look ichidan but geminate.
    #[serde(rename = "type4-1")]
    GeminatingI,
    /// Type 4-2: godan -eru verbs that look ichidan but geminate.
    #[serde(rename = "type4-2")]
    GeminatingE,
    /// Type 4-3: いく and compounds ending in いく.
    #[serde(rename = "type4-3")]
    Iku,
    /// Type 3 (する, くる) and polysemous lemmas; never emitted.
    #[serde(rename = "excluded")]
    Excluded,
}

impl VerbType {
    /// Emitted classes in table order.
    pub const EMITTED: [VerbType; 5] = [
        VerbType::Godan,
        VerbType::Ichidan,
        VerbType::GeminatingI,
        VerbType::GeminatingE,
        VerbType::Iku,
    ];

    /// Lexicon tag: `1`, `2`, `4-1`, `4-2`, `4-3` or `x`.
    pub fn tag(self) -> &'static str {
        match self {
            VerbType::Godan => "1",
            VerbType::Ichidan => "2",
            VerbType::GeminatingI => "4-1",
            VerbType::GeminatingE => "4-2",
            VerbType::Iku => "4-3",
            VerbType::Excluded => "x",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            VerbType::Godan => "Type 1",
            VerbType::Ichidan => "Type 2",
            VerbType::GeminatingI => "Type 4-1",
            VerbType::GeminatingE => "Type 4-2",
            VerbType::Iku => "Type 4-3",
            VerbType::Excluded => "Type 3",
        }
    }

    pub fn is_type4(self) -> bool {
        matches!(
            self,
            VerbType::GeminatingI | VerbType::GeminatingE | VerbType::Iku
        )
    }
}

impl fmt::Display for VerbType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown verb type tag {0:?}")]
pub struct UnknownTypeTag(pub String);

impl FromStr for VerbType {
    type Err = UnknownTypeTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "1" => VerbType::Godan,
            "2" => VerbType::Ichidan,
            "4-1" => VerbType::GeminatingI,
            "4-2" => VerbType::GeminatingE,
            "4-3" => VerbType::Iku,
            "x" => VerbType::Excluded,
            _ => return Err(UnknownTypeTag(s.to_owned())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConjugationError {
    #[error("{0} is excluded from past-tense generation")]
    ExcludedVerb(String),
    #[error("{lemma}: declared {declared} but the rules give {computed}")]
    DeclaredTypeMismatch {
        lemma: String,
        declared: VerbType,
        computed: VerbType,
    },
    #[error("{0}: not a dictionary-form verb ending")]
    InvalidEnding(String),
    #[error("{lemma}: ending does not fit {vtype}")]
    EndingTypeMismatch { lemma: String, vtype: VerbType },
    #[error("{0}: godan override requires an -iru or -eru lemma")]
    InvalidOverride(String),
    #[error(transparent)]
    Script(#[from] ScriptError),
}

/// Dictionary-form endings accepted in a lexicon.
pub const VERB_ENDINGS: &str = "うくぐすつぬぶむる";

const IRREGULAR: [&str; 2] = ["する", "くる"];

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LexicalEntry {
    pub lemma: String,
    pub declared_type: Option<VerbType>,
    /// Marks an -iru/-eru verb that conjugates as godan.
    pub godan_override: bool,
    pub polysemous: bool,
    pub compound: bool,
    /// 1-based source line, when read from a file.
    #[serde(skip)]
    pub line: Option<usize>,
}

impl LexicalEntry {
    pub fn new(lemma: impl Into<String>) -> Self {
        LexicalEntry {
            lemma: lemma.into(),
            ..Default::default()
        }
    }

    /// Builds an entry the way a lexicon row with this type tag would.
    pub fn typed(lemma: impl Into<String>, vtype: VerbType) -> Self {
        LexicalEntry {
            lemma: lemma.into(),
            declared_type: Some(vtype),
            godan_override: matches!(vtype, VerbType::GeminatingI | VerbType::GeminatingE),
            ..Default::default()
        }
    }

    pub fn compound(mut self, yes: bool) -> Self {
        self.compound = yes;
        self
    }

    pub fn polysemous(mut self, yes: bool) -> Self {
        self.polysemous = yes;
        self
    }
}

fn split_final(lemma: &str) -> Result<(&str, char), ConjugationError> {
    hiragana::validate(lemma)?;
    let last = lemma.chars().last().expect("validated non-empty");
    if !VERB_ENDINGS.contains(last) {
        return Err(ConjugationError::InvalidEnding(lemma.to_owned()));
    }
    Ok((&lemma[..lemma.len() - last.len_utf8()], last))
}

/// Vowel of the kana just before a final る, when there is one.
fn pre_ru_vowel(lemma: &str) -> Option<Vowel> {
    let stem = lemma.strip_suffix('る')?;
    let last = stem.chars().last()?;
    Some(kana_features(Mora::new(last)).vowel)
}

fn computed_type(entry: &LexicalEntry) -> Result<VerbType, ConjugationError> {
    let lemma = entry.lemma.as_str();
    split_final(lemma)?;
    if IRREGULAR.contains(&lemma) || entry.polysemous {
        return Ok(VerbType::Excluded);
    }
    if lemma.ends_with("いく") {
        return Ok(VerbType::Iku);
    }
    let vowel = pre_ru_vowel(lemma);
    if entry.godan_override && !matches!(vowel, Some(Vowel::I | Vowel::E)) {
        return Err(ConjugationError::InvalidOverride(lemma.to_owned()));
    }
    Ok(match (vowel, entry.godan_override) {
        (Some(Vowel::I), true) => VerbType::GeminatingI,
        (Some(Vowel::E), true) => VerbType::GeminatingE,
        (Some(Vowel::I | Vowel::E), false) => VerbType::Ichidan,
        _ => VerbType::Godan,
    })
}

/// Assigns the conjugation type; a declared type must agree with the rules.
pub fn classify_verb(entry: &LexicalEntry) -> Result<VerbType, ConjugationError> {
    let computed = computed_type(entry)?;
    match entry.declared_type {
        Some(declared) if declared != computed => Err(ConjugationError::DeclaredTypeMismatch {
            lemma: entry.lemma.clone(),
            declared,
            computed,
        }),
        _ => Ok(computed),
    }
}

/// Onbin replacement for the final kana and the suffix it selects.
fn godan_onbin(last: char) -> (&'static str, &'static str) {
    match last {
        'う' | 'つ' | 'る' => ("っ", "た"),
        'く' => ("い", "た"),
        'ぐ' => ("い", "だ"),
        'す' => ("し", "た"),
        // む, ぬ, ぶ
        _ => ("ん", "だ"),
    }
}

/// Past (-ta) form of `lemma` under `vtype`.
pub fn conjugate_past(lemma: &str, vtype: VerbType) -> Result<String, ConjugationError> {
    let (stem, last) = split_final(lemma)?;
    let mismatch = || ConjugationError::EndingTypeMismatch {
        lemma: lemma.to_owned(),
        vtype,
    };
    let (replacement, suffix) = match vtype {
        VerbType::Excluded => return Err(ConjugationError::ExcludedVerb(lemma.to_owned())),
        VerbType::Ichidan if last == 'る' => ("", "た"),
        VerbType::Iku if last == 'く' => ("っ", "た"),
        VerbType::GeminatingI | VerbType::GeminatingE if last == 'る' => ("っ", "た"),
        VerbType::Godan => godan_onbin(last),
        _ => return Err(mismatch()),
    };
    let mut out = String::with_capacity(stem.len() + 6);
    out.push_str(stem);
    out.push_str(replacement);
    out.push_str(suffix);
    Ok(out)
}

/// Whether the past form of a verb ending in `last` takes voiced だ.
pub fn takes_voiced_suffix(last: char) -> bool {
    matches!(
        kana_features(Mora::new(last)).row,
        Row::G | Row::M | Row::N | Row::B
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconIssue {
    DuplicateLemma { lemma: String, line: Option<usize> },
    DeclaredTypeMismatch {
        lemma: String,
        declared: VerbType,
        computed: VerbType,
        line: Option<usize>,
    },
    InvalidEntry { lemma: String, reason: String, line: Option<usize> },
    /// Type 3 or polysemous: kept in the lexicon, never emitted.
    ExcludedEntry { lemma: String, line: Option<usize> },
}

impl LexiconIssue {
    /// Excluded entries are expected in a lexicon; everything else is a data error.
    pub fn is_error(&self) -> bool {
        !matches!(self, LexiconIssue::ExcludedEntry { .. })
    }

    pub fn lemma(&self) -> &str {
        match self {
            LexiconIssue::DuplicateLemma { lemma, .. }
            | LexiconIssue::DeclaredTypeMismatch { lemma, .. }
            | LexiconIssue::InvalidEntry { lemma, .. }
            | LexiconIssue::ExcludedEntry { lemma, .. } => lemma,
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            LexiconIssue::DuplicateLemma { line, .. }
            | LexiconIssue::DeclaredTypeMismatch { line, .. }
            | LexiconIssue::InvalidEntry { line, .. }
            | LexiconIssue::ExcludedEntry { line, .. } => *line,
        }
    }
}

impl fmt::Display for LexiconIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line() {
            write!(f, "line {line}: ")?;
        }
        match self {
            LexiconIssue::DuplicateLemma { lemma, .. } => write!(f, "duplicate lemma {lemma}"),
            LexiconIssue::DeclaredTypeMismatch {
                lemma,
                declared,
                computed,
                ..
            } => write!(f, "{lemma}: declared {declared}, rules give {computed}"),
            LexiconIssue::InvalidEntry { lemma, reason, .. } => write!(f, "{lemma}: {reason}"),
            LexiconIssue::ExcludedEntry { lemma, .. } => write!(f, "{lemma}: excluded"),
        }
    }
}

pub fn validate_lexicon(entries: &[LexicalEntry]) -> Vec<LexiconIssue> {
    let mut issues = Vec::new();
    let mut seen: HashMap<&str, ()> = HashMap::with_capacity(entries.len());
    for entry in entries {
        let line = entry.line;
        let lemma = entry.lemma.clone();
        if seen.insert(entry.lemma.as_str(), ()).is_some() {
            issues.push(LexiconIssue::DuplicateLemma { lemma, line });
            continue;
        }
        match classify_verb(entry) {
            Ok(VerbType::Excluded) => issues.push(LexiconIssue::ExcludedEntry { lemma, line }),
            Ok(_) => {}
            Err(ConjugationError::DeclaredTypeMismatch {
                declared, computed, ..
            }) => issues.push(LexiconIssue::DeclaredTypeMismatch {
                lemma,
                declared,
                computed,
                line,
            }),
            Err(e) => issues.push(LexiconIssue::InvalidEntry {
                lemma,
                reason: e.to_string(),
                line,
            }),
        }
    }
    issues
}
