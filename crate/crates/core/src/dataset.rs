//! Lexicon ingestion, SIGMORPHON instance files, seeded splits and class counts.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::conjugator::{
    classify_verb, conjugate_past, validate_lexicon, ConjugationError, LexicalEntry, LexiconIssue,
    VerbType,
};
use crate::hiragana::{self, ScriptError};
use crate::rng::XorShift64Star;
use crate::table::group_thousands;

/// Placeholder feature tag carried by every instance.
pub const TAG: &str = "_";

/// The bundled replication lexicon (3,958 emitted verbs plus excluded rows).
pub const REPLICATION_LEXICON: &str = include_str!("../data/replication_lexicon.tsv");

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Script {
        line: usize,
        #[source]
        source: ScriptError,
    },
    #[error("need at least 10 items to split, got {0}")]
    TooFewItems(usize),
    #[error("no lexicon entry for {0}")]
    UnknownLemma(String),
    #[error(transparent)]
    Conjugation(#[from] ConjugationError),
}

impl DatasetError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        DatasetError::Io {
            path: path.to_owned(),
            source,
        }
    }

    fn parse(line: usize, message: impl Into<String>) -> Self {
        DatasetError::Parse {
            line,
            message: message.into(),
        }
    }
}

pub(crate) fn read_nfc(path: &Path) -> Result<String, DatasetError> {
    let raw = fs::read_to_string(path).map_err(|e| DatasetError::io(path, e))?;
    Ok(raw.nfc().collect())
}

/// Lexicon rows plus everything `validate_lexicon` had to say about them.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    pub entries: Vec<LexicalEntry>,
    pub issues: Vec<LexiconIssue>,
}

/// Type and annotation lookup by lemma, for audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntryInfo {
    pub vtype: VerbType,
    pub compound: bool,
}

pub type LexiconIndex = HashMap<String, EntryInfo>;

impl Lexicon {
    /// Parses lexicon TSV text: `lemma TAB type-tag [TAB flags]`.
    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            entries.push(parse_lexicon_line(raw, line)?);
        }
        let issues = validate_lexicon(&entries);
        Ok(Lexicon { entries, issues })
    }

    pub fn replication() -> Self {
        Self::parse(REPLICATION_LEXICON).expect("bundled lexicon parses")
    }

    pub fn errors(&self) -> impl Iterator<Item = &LexiconIssue> {
        self.issues.iter().filter(|i| i.is_error())
    }

    pub fn is_clean(&self) -> bool {
        self.errors().next().is_none()
    }

    /// Entries with their computed type; rows that fail classification are skipped.
    pub fn classified(&self) -> impl Iterator<Item = (&LexicalEntry, VerbType)> {
        self.entries
            .iter()
            .filter_map(|e| classify_verb(e).ok().map(|t| (e, t)))
    }

    pub fn index(&self) -> LexiconIndex {
        self.classified()
            .map(|(e, vtype)| {
                (
                    e.lemma.clone(),
                    EntryInfo {
                        vtype,
                        compound: e.compound,
                    },
                )
            })
            .collect()
    }
}

fn parse_lexicon_line(raw: &str, line: usize) -> Result<LexicalEntry, DatasetError> {
    let fields: Vec<&str> = raw.split('\t').collect();
    if !(2..=3).contains(&fields.len()) {
        return Err(DatasetError::parse(
            line,
            format!("expected 2 or 3 TAB-separated fields, found {}", fields.len()),
        ));
    }
    let lemma = fields[0].trim();
    hiragana::validate(lemma).map_err(|source| DatasetError::Script { line, source })?;
    let mut entry = LexicalEntry::new(lemma);
    entry.line = Some(line);

    let tag = fields[1].trim();
    if !tag.is_empty() {
        let vtype: VerbType = tag
            .parse()
            .map_err(|e: crate::conjugator::UnknownTypeTag| DatasetError::parse(line, e.to_string()))?;
        entry.godan_override = matches!(vtype, VerbType::GeminatingI | VerbType::GeminatingE);
        entry.declared_type = Some(vtype);
    }

    if let Some(flags) = fields.get(2) {
        for flag in flags.split(',').map(str::trim).filter(|f| !f.is_empty()) {
            match flag {
                "compound" => entry.compound = true,
                "polysemous" => entry.polysemous = true,
                other => return Err(DatasetError::parse(line, format!("unknown flag {other:?}"))),
            }
        }
    }
    Ok(entry)
}

pub fn ingest_lexicon(path: impl AsRef<Path>) -> Result<Lexicon, DatasetError> {
    Lexicon::parse(&read_nfc(path.as_ref())?)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InflectionPair {
    pub lemma: String,
    pub target: String,
    pub tag: String,
}

impl InflectionPair {
    pub fn new(lemma: impl Into<String>, target: impl Into<String>) -> Self {
        InflectionPair {
            lemma: lemma.into(),
            target: target.into(),
            tag: TAG.to_owned(),
        }
    }
}

/// One gold pair per emitted entry, in lexicon order.
pub fn generate_pairs(entries: &[LexicalEntry]) -> Result<Vec<InflectionPair>, ConjugationError> {
    let mut pairs = Vec::with_capacity(entries.len());
    for entry in entries {
        let vtype = classify_verb(entry)?;
        match conjugate_past(&entry.lemma, vtype) {
            Ok(target) => pairs.push(InflectionPair::new(entry.lemma.clone(), target)),
            Err(ConjugationError::ExcludedVerb(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitSet {
    pub train: Vec<InflectionPair>,
    pub dev: Vec<InflectionPair>,
    pub test: Vec<InflectionPair>,
    pub seed: u64,
}

/// ⌊0.8n⌋, ⌊0.1n⌋ and the remainder.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let train = n * 8 / 10;
    let dev = n / 10;
    (train, dev, n - train - dev)
}

fn slice(order: Vec<InflectionPair>, seed: u64) -> SplitSet {
    let (train_n, dev_n, _) = split_sizes(order.len());
    let mut rest = order;
    let mut dev = rest.split_off(train_n);
    let test = dev.split_off(dev_n);
    SplitSet {
        train: rest,
        dev,
        test,
        seed,
    }
}

/// Seeded instance-level 80/10/10 split.
///
/// Each lemma has exactly one instance, so this is also a lemma split.
pub fn split(pairs: &[InflectionPair], seed: u64) -> Result<SplitSet, DatasetError> {
    if pairs.len() < 10 {
        return Err(DatasetError::TooFewItems(pairs.len()));
    }
    let mut order = pairs.to_vec();
    XorShift64Star::new(seed).shuffle(&mut order);
    Ok(slice(order, seed))
}

/// Split that keeps verb-type proportions in every slice.
///
/// Each type is shuffled on its own; items are then interleaved by their
/// relative position `(rank + 0.5) / class_size` so every prefix of the
/// combined order holds each class in proportion, and sliced as in `split`.
pub fn split_stratified(
    pairs: &[InflectionPair],
    seed: u64,
    index: &LexiconIndex,
) -> Result<SplitSet, DatasetError> {
    if pairs.len() < 10 {
        return Err(DatasetError::TooFewItems(pairs.len()));
    }
    let mut groups: BTreeMap<VerbType, Vec<InflectionPair>> = BTreeMap::new();
    for pair in pairs {
        let info = index
            .get(&pair.lemma)
            .ok_or_else(|| DatasetError::UnknownLemma(pair.lemma.clone()))?;
        groups.entry(info.vtype).or_default().push(pair.clone());
    }
    let mut rng = XorShift64Star::new(seed);
    let mut keyed = Vec::with_capacity(pairs.len());
    for (vtype, mut group) in groups {
        rng.shuffle(&mut group);
        let n = group.len() as u64;
        for (rank, pair) in group.into_iter().enumerate() {
            // (2·rank + 1) / (2n) compared exactly via cross-multiplication below.
            keyed.push(((2 * rank as u64 + 1), 2 * n, vtype, pair));
        }
    }
    keyed.sort_by(|a, b| {
        (a.0 as u128 * b.1 as u128)
            .cmp(&(b.0 as u128 * a.1 as u128))
            .then(a.2.cmp(&b.2))
    });
    Ok(slice(keyed.into_iter().map(|k| k.3).collect(), seed))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeCounts {
    pub total: usize,
    pub by_type: BTreeMap<VerbType, usize>,
    /// Lexicon rows held back (Type 3 and polysemous); not part of `total`.
    pub excluded: usize,
}

impl TypeCounts {
    pub fn get(&self, vtype: VerbType) -> usize {
        self.by_type.get(&vtype).copied().unwrap_or(0)
    }

    pub fn type4(&self) -> usize {
        self.get(VerbType::GeminatingI) + self.get(VerbType::GeminatingE) + self.get(VerbType::Iku)
    }

    pub fn from_types(types: impl IntoIterator<Item = VerbType>) -> Self {
        let mut counts = TypeCounts::default();
        for vtype in VerbType::EMITTED {
            counts.by_type.insert(vtype, 0);
        }
        for vtype in types {
            if vtype == VerbType::Excluded {
                counts.excluded += 1;
            } else {
                counts.total += 1;
                *counts.by_type.entry(vtype).or_default() += 1;
            }
        }
        counts
    }

    /// Plain-text rendering in the layout of the dataset statistics table.
    pub fn render_table(&self) -> String {
        let rows: Vec<(&str, usize)> = vec![
            ("All verbs", self.total),
            ("Type 1 (Godan)", self.get(VerbType::Godan)),
            ("Type 2 (Ichidan)", self.get(VerbType::Ichidan)),
            ("Type 3 (canonical irregular; excluded)", 0),
            ("Type 4 (other irregular)", self.type4()),
            ("  Type 4-1 (stem-final /i/ + gemination)", self.get(VerbType::GeminatingI)),
            ("  Type 4-2 (stem-final /e/ + gemination)", self.get(VerbType::GeminatingE)),
            ("  Type 4-3 (localized)", self.get(VerbType::Iku)),
        ];
        let mut out = String::new();
        let _ = writeln!(out, "{:<42}{:>7}", "Verb Type", "Count");
        for (label, count) in rows {
            let _ = writeln!(out, "{:<42}{:>7}", label, group_thousands(count));
        }
        out
    }
}

/// Class counts over the lexicon; excluded rows are reported apart from the total.
pub fn stats(entries: &[LexicalEntry]) -> TypeCounts {
    TypeCounts::from_types(entries.iter().filter_map(|e| classify_verb(e).ok()))
}

pub fn render_sigmorphon(pairs: &[InflectionPair]) -> String {
    let mut out = String::with_capacity(pairs.len() * 32);
    for p in pairs {
        out.push_str(&p.lemma);
        out.push('\t');
        out.push_str(&p.target);
        out.push('\t');
        out.push_str(&p.tag);
        out.push('\n');
    }
    out
}

pub fn write_sigmorphon(pairs: &[InflectionPair], path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    fs::write(path, render_sigmorphon(pairs)).map_err(|e| DatasetError::io(path, e))
}

pub fn parse_sigmorphon(text: &str) -> Result<Vec<InflectionPair>, DatasetError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 3 {
            return Err(DatasetError::parse(
                line,
                format!("expected 3 TAB-separated fields, found {}", fields.len()),
            ));
        }
        if fields[2] != TAG {
            return Err(DatasetError::parse(
                line,
                format!("unsupported tag {:?}; only the past-tense placeholder {TAG:?} is accepted", fields[2]),
            ));
        }
        for form in &fields[..2] {
            hiragana::validate(form).map_err(|source| DatasetError::Script { line, source })?;
        }
        pairs.push(InflectionPair::new(fields[0], fields[1]));
    }
    Ok(pairs)
}

pub fn read_sigmorphon(path: impl AsRef<Path>) -> Result<Vec<InflectionPair>, DatasetError> {
    parse_sigmorphon(&read_nfc(path.as_ref())?)
}

/// Writes `{stem}.train`, `{stem}.dev` and `{stem}.test` into `dir`.
pub fn write_split(set: &SplitSet, dir: impl AsRef<Path>, stem: &str) -> Result<[PathBuf; 3], DatasetError> {
    let dir = dir.as_ref();
    let paths = ["train", "dev", "test"].map(|ext| dir.join(format!("{stem}.{ext}")));
    write_sigmorphon(&set.train, &paths[0])?;
    write_sigmorphon(&set.dev, &paths[1])?;
    write_sigmorphon(&set.test, &paths[2])?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn pairs(n: usize) -> Vec<InflectionPair> {
        (0..n)
            .map(|i| InflectionPair::new(format!("か{i}"), format!("かいた{i}")))
            .collect()
    }

    #[test]
    fn parses_lexicon_lines() {
        let lex = Lexicon::parse("# comment\nかく\t1\t\nまじる\t4-1\t\nつっぷす\t1\tcompound\n").unwrap();
        assert_eq!(lex.entries.len(), 3);
        assert_eq!(lex.entries[0].lemma, "かく");
        assert_eq!(lex.entries[0].declared_type, Some(VerbType::Godan));
        assert!(lex.entries[1].godan_override);
        assert_eq!(classify_verb(&lex.entries[1]), Ok(VerbType::GeminatingI));
        assert!(lex.entries[2].compound);
        assert_eq!(lex.entries[1].line, Some(3));
        assert!(lex.issues.is_empty());
    }

    #[test]
    fn space_separated_line_is_a_parse_error() {
        let err = Lexicon::parse("みる\t2\t\nかく 1\n").unwrap_err();
        assert!(matches!(err, DatasetError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn bad_script_reports_line() {
        let err = Lexicon::parse("かく\t1\t\n書く\t1\t\n").unwrap_err();
        assert!(matches!(err, DatasetError::Script { line: 2, .. }), "{err}");
        let err = Lexicon::parse("かく\t9\t\n").unwrap_err();
        assert!(matches!(err, DatasetError::Parse { line: 1, .. }));
        let err = Lexicon::parse("かく\t1\tfrequent\n").unwrap_err();
        assert!(matches!(err, DatasetError::Parse { line: 1, .. }));
    }

    #[test]
    fn excluded_rows_are_kept_and_marked() {
        let lex = Lexicon::parse("する\tx\t\nかえる\tx\tpolysemous\nかく\t1\t\n").unwrap();
        assert_eq!(lex.entries.len(), 3);
        assert!(lex.is_clean());
        assert_eq!(lex.issues.len(), 2);
        let s = stats(&lex.entries);
        assert_eq!((s.total, s.excluded), (1, 2));
    }

    #[test]
    fn generates_pairs_in_order() {
        let entries = [
            LexicalEntry::typed("みる", VerbType::Ichidan),
            LexicalEntry::typed("する", VerbType::Excluded),
            LexicalEntry::typed("かく", VerbType::Godan),
        ];
        assert_eq!(
            generate_pairs(&entries).unwrap(),
            vec![InflectionPair::new("みる", "みた"), InflectionPair::new("かく", "かいた")]
        );
        let negaeru = [LexicalEntry::typed("ねがえる", VerbType::GeminatingE)];
        assert_eq!(
            generate_pairs(&negaeru).unwrap(),
            vec![InflectionPair::new("ねがえる", "ねがえった")]
        );
        assert!(generate_pairs(&[LexicalEntry::new("する")]).unwrap().is_empty());
    }

    #[test]
    fn split_sizes_follow_floors() {
        assert_eq!(split_sizes(10), (8, 1, 1));
        assert_eq!(split_sizes(3958), (3166, 395, 397));
        let s = split(&pairs(10), 0).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (8, 1, 1));
        assert!(matches!(split(&pairs(9), 0), Err(DatasetError::TooFewItems(9))));
    }

    #[test]
    fn split_partitions_and_is_deterministic() {
        let p = pairs(137);
        let a = split(&p, 42).unwrap();
        let b = split(&p, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.train, split(&p, 43).unwrap().train);
        let all: HashSet<_> = a.train.iter().chain(&a.dev).chain(&a.test).map(|x| &x.lemma).collect();
        assert_eq!(all.len(), 137);
    }

    #[test]
    fn stratified_split_keeps_proportions() {
        let lex = Lexicon::replication();
        let gold = generate_pairs(&lex.entries).unwrap();
        let index = lex.index();
        let s = split_stratified(&gold, 1, &index).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), split_sizes(gold.len()));
        let type4_test = s
            .test
            .iter()
            .filter(|p| index[&p.lemma].vtype.is_type4())
            .count();
        // 157 of 3958 overall; a proportional test slice of 397 holds 15 or 16.
        assert!((15..=17).contains(&type4_test), "{type4_test}");
        assert_eq!(s, split_stratified(&gold, 1, &index).unwrap());
    }

    #[test]
    fn sigmorphon_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.tsv");
        let p = vec![
            InflectionPair::new("ねがえる", "ねがえった"),
            InflectionPair::new("みる", "みた"),
            InflectionPair::new("かく", "かいた"),
        ];
        write_sigmorphon(&p, &path).unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap().lines().next(),
            Some("ねがえる\tねがえった\t_")
        );
        assert_eq!(read_sigmorphon(&path).unwrap(), p);

        let err = parse_sigmorphon("みる\tみた\t_\nかく\tかいた\n").unwrap_err();
        assert!(matches!(err, DatasetError::Parse { line: 2, .. }));
        assert!(parse_sigmorphon("みる\tみない\tV;NEG\n").is_err());
    }

    #[test]
    fn decomposed_input_is_normalized() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nfd.tsv");
        // が written as か + combining dakuten.
        fs::write(&path, "およく\u{3099}\tおよいた\u{3099}\t_\n").unwrap();
        assert_eq!(read_sigmorphon(&path).unwrap(), vec![InflectionPair::new("およぐ", "およいだ")]);
    }

    #[test]
    fn stats_examples() {
        let empty = stats(&[]);
        assert_eq!(empty.total, 0);
        assert!(empty.by_type.values().all(|&c| c == 0));
        let two = stats(&[LexicalEntry::new("みる"), LexicalEntry::new("かく")]);
        assert_eq!(two.total, 2);
        assert_eq!(two.get(VerbType::Godan), 1);
        assert_eq!(two.get(VerbType::Ichidan), 1);
    }
}
