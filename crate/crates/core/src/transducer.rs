//! Suffix-rule transducer baseline and external prediction ingestion.
//!
//! Training strips the longest common prefix of lemma and target and records
//! the remaining rewrite, keyed by the lemma suffix it replaced and by each
//! leftward extension of that suffix up to `max_suffix_len` kana. Prediction
//! applies the best rule under the longest key the lemma ends with.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{read_nfc, DatasetError, InflectionPair};

pub const DEFAULT_MAX_SUFFIX_LEN: usize = 4;

#[derive(Debug, Error)]
pub enum TransducerError {
    #[error("cannot learn rules from an empty training set")]
    EmptyTraining,
    #[error("max suffix length must be at least 1")]
    ZeroSuffixLen,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: lemma {lemma} is not in the evaluated split")]
    UnknownLemma { line: usize, lemma: String },
    #[error("line {line}: second prediction for {lemma}")]
    DuplicatePrediction { line: usize, lemma: String },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixRule {
    pub lemma_suffix: String,
    pub output_suffix: String,
    pub count: usize,
}

impl SuffixRule {
    pub fn apply(&self, lemma: &str) -> Option<String> {
        lemma
            .strip_suffix(self.lemma_suffix.as_str())
            .map(|stem| format!("{stem}{}", self.output_suffix))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    rules: BTreeMap<String, Vec<SuffixRule>>,
    max_suffix_len: usize,
}

/// Result of applying a rule set to one lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicted {
    pub form: String,
    /// No key matched; `form` is the lemma echoed back.
    pub no_rule: bool,
}

fn common_prefix_len(a: &[char], b: &[char]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn rank(rules: &mut [SuffixRule]) {
    rules.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| a.output_suffix.cmp(&b.output_suffix))
    });
}

pub fn learn_rules(train: &[InflectionPair], max_suffix_len: usize) -> Result<RuleSet, TransducerError> {
    if train.is_empty() {
        return Err(TransducerError::EmptyTraining);
    }
    if max_suffix_len == 0 {
        return Err(TransducerError::ZeroSuffixLen);
    }
    let mut counts: HashMap<(String, String), usize> = HashMap::new();
    for pair in train {
        let lemma: Vec<char> = pair.lemma.chars().collect();
        let target: Vec<char> = pair.target.chars().collect();
        let lcp = common_prefix_len(&lemma, &target);
        let rewritten = &target[lcp..];
        let base_len = lemma.len() - lcp;
        let longest = max_suffix_len.min(lemma.len()).max(base_len);
        for key_len in base_len..=longest {
            let start = lemma.len() - key_len;
            let key: String = lemma[start..].iter().collect();
            let output: String = lemma[start..lcp].iter().chain(rewritten).collect();
            *counts.entry((key, output)).or_default() += 1;
        }
    }
    let mut rules: BTreeMap<String, Vec<SuffixRule>> = BTreeMap::new();
    for ((lemma_suffix, output_suffix), count) in counts {
        rules.entry(lemma_suffix.clone()).or_default().push(SuffixRule {
            lemma_suffix,
            output_suffix,
            count,
        });
    }
    for list in rules.values_mut() {
        rank(list);
    }
    Ok(RuleSet {
        rules,
        max_suffix_len,
    })
}

impl RuleSet {
    pub fn max_suffix_len(&self) -> usize {
        self.max_suffix_len
    }

    /// Rules under one key, best first.
    pub fn rules_for(&self, lemma_suffix: &str) -> &[SuffixRule] {
        self.rules.get(lemma_suffix).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.rules.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.rules.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Longest key that `lemma` ends with, including the empty key.
    pub fn matching_key<'a>(&'a self, lemma: &str) -> Option<&'a str> {
        let boundaries: Vec<usize> = lemma
            .char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(lemma.len()))
            .collect();
        boundaries
            .into_iter()
            .find_map(|start| self.rules.get_key_value(&lemma[start..]).map(|(k, _)| k.as_str()))
    }

    pub fn predict(&self, lemma: &str) -> Predicted {
        let best = self
            .matching_key(lemma)
            .and_then(|key| self.rules[key].first())
            .and_then(|rule| rule.apply(lemma));
        match best {
            Some(form) => Predicted { form, no_rule: false },
            None => Predicted {
                form: lemma.to_owned(),
                no_rule: true,
            },
        }
    }

    /// `lemma_suffix TAB output_suffix TAB count` lines, keys sorted, rules in rank order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for list in self.rules.values() {
            for r in list {
                let _ = writeln!(out, "{}\t{}\t{}", r.lemma_suffix, r.output_suffix, r.count);
            }
        }
        out
    }

    pub fn parse(text: &str, max_suffix_len: usize) -> Result<Self, TransducerError> {
        let mut rules: BTreeMap<String, Vec<SuffixRule>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            let parse_err = |message: String| TransducerError::Parse { line, message };
            if fields.len() != 3 {
                return Err(parse_err(format!("expected 3 fields, found {}", fields.len())));
            }
            let count: usize = fields[2]
                .parse()
                .ok()
                .filter(|&c| c >= 1)
                .ok_or_else(|| parse_err(format!("bad count {:?}", fields[2])))?;
            rules.entry(fields[0].to_owned()).or_default().push(SuffixRule {
                lemma_suffix: fields[0].to_owned(),
                output_suffix: fields[1].to_owned(),
                count,
            });
        }
        for list in rules.values_mut() {
            rank(list);
        }
        Ok(RuleSet {
            rules,
            max_suffix_len,
        })
    }
}

/// One system output for one lemma.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub lemma: String,
    pub predicted: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionSet {
    /// In split order.
    pub predictions: Vec<Prediction>,
    /// Split lemmas the file did not cover.
    pub missing: Vec<String>,
}

/// Parses `lemma TAB predicted` lines against the lemmas of `split`.
pub fn parse_predictions(
    text: &str,
    split: &[InflectionPair],
    source: &str,
) -> Result<PredictionSet, TransducerError> {
    let position: HashMap<&str, usize> = split
        .iter()
        .enumerate()
        .map(|(i, p)| (p.lemma.as_str(), i))
        .collect();
    let mut slots: Vec<Option<String>> = vec![None; split.len()];
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != 2 {
            return Err(TransducerError::Parse {
                line,
                message: format!("expected 2 TAB-separated fields, found {}", fields.len()),
            });
        }
        let (lemma, predicted) = (fields[0], fields[1]);
        let slot = *position
            .get(lemma)
            .ok_or_else(|| TransducerError::UnknownLemma {
                line,
                lemma: lemma.to_owned(),
            })?;
        if slots[slot].replace(predicted.to_owned()).is_some() {
            return Err(TransducerError::DuplicatePrediction {
                line,
                lemma: lemma.to_owned(),
            });
        }
    }
    let mut predictions = Vec::with_capacity(split.len());
    let mut missing = Vec::new();
    for (pair, slot) in split.iter().zip(slots) {
        match slot {
            Some(predicted) => predictions.push(Prediction {
                lemma: pair.lemma.clone(),
                predicted,
                source: source.to_owned(),
            }),
            None => missing.push(pair.lemma.clone()),
        }
    }
    Ok(PredictionSet { predictions, missing })
}

/// Reads a prediction file; the run id is the file stem.
pub fn ingest_predictions(
    path: impl AsRef<Path>,
    split: &[InflectionPair],
) -> Result<PredictionSet, TransducerError> {
    let path = path.as_ref();
    let source = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_predictions(&read_nfc(path)?, split, &source)
}

pub fn render_predictions(predictions: &[Prediction]) -> String {
    let mut out = String::new();
    for p in predictions {
        let _ = writeln!(out, "{}\t{}", p.lemma, p.predicted);
    }
    out
}

pub fn write_predictions(predictions: &[Prediction], path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    fs::write(path, render_predictions(predictions)).map_err(|e| DatasetError::io(path, e))
}

/// Runs the rule set over a split.
pub fn predict_split(rules: &RuleSet, split: &[InflectionPair], source: &str) -> Vec<Prediction> {
    split
        .iter()
        .map(|p| Prediction {
            lemma: p.lemma.clone(),
            predicted: rules.predict(&p.lemma).form,
            source: source.to_owned(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(l: &str, t: &str) -> InflectionPair {
        InflectionPair::new(l, t)
    }

    fn outputs(rs: &RuleSet, key: &str) -> Vec<(String, usize)> {
        rs.rules_for(key)
            .iter()
            .map(|r| (r.output_suffix.clone(), r.count))
            .collect()
    }

    #[test]
    fn single_pair_rules() {
        let rs = learn_rules(&[pair("かく", "かいた")], 4).unwrap();
        assert_eq!(outputs(&rs, "く"), [("いた".to_owned(), 1)]);
        assert_eq!(outputs(&rs, "かく"), [("かいた".to_owned(), 1)]);
        assert_eq!(rs.len(), 2);
    }

    #[test]
    fn ichidan_rule_dominates() {
        let rs = learn_rules(&[pair("みる", "みた"), pair("たべる", "たべた")], 4).unwrap();
        assert_eq!(outputs(&rs, "る"), [("た".to_owned(), 2)]);
        assert_eq!(rs.predict("おきる").form, "おきた");
    }

    #[test]
    fn tie_breaks_lexicographically() {
        // Hand trace: まじる/まじった has LCP まじ, so る→った, じる→じった,
        // まじる→まじった; みる/みた has LCP み, so る→た, みる→みた.
        // Key る holds た (1) and った (1); た < った by code point.
        let rs = learn_rules(&[pair("まじる", "まじった"), pair("みる", "みた")], 4).unwrap();
        assert_eq!(outputs(&rs, "じる"), [("じった".to_owned(), 1)]);
        assert_eq!(
            outputs(&rs, "る"),
            [("た".to_owned(), 1), ("った".to_owned(), 1)]
        );
        assert_eq!(outputs(&rs, "まじる"), [("まじった".to_owned(), 1)]);
        assert_eq!(rs.predict("はしる").form, "はした");
        assert_eq!(rs.predict("ねじる").form, "ねじった");
    }

    #[test]
    fn godan_iru_falls_to_ichidan_rule() {
        let train = [
            pair("かく", "かいた"),
            pair("とる", "とった"),
            pair("みる", "みた"),
            pair("かんじる", "かんじた"),
            pair("たべる", "たべた"),
        ];
        let rs = learn_rules(&train, 4).unwrap();
        // Longest matching key is じる, learned from an ichidan verb.
        assert_eq!(rs.predict("まじる").form, "まじた");
        assert_eq!(rs.predict("かく").form, "かいた");
    }

    #[test]
    fn no_rule_echoes_lemma() {
        let rs = learn_rules(&[pair("かく", "かいた")], 4).unwrap();
        let p = rs.predict("のむ");
        assert_eq!(p, Predicted { form: "のむ".into(), no_rule: true });
    }

    #[test]
    fn rejects_empty_training() {
        assert!(matches!(learn_rules(&[], 4), Err(TransducerError::EmptyTraining)));
        assert!(matches!(
            learn_rules(&[pair("かく", "かいた")], 0),
            Err(TransducerError::ZeroSuffixLen)
        ));
    }

    #[test]
    fn serialization_round_trip() {
        let train = [pair("まじる", "まじった"), pair("みる", "みた"), pair("かく", "かいた")];
        let rs = learn_rules(&train, 4).unwrap();
        let text = rs.to_text();
        assert_eq!(
            text,
            "かく\tかいた\t1\nく\tいた\t1\nじる\tじった\t1\nまじる\tまじった\t1\nみる\tみた\t1\nる\tた\t1\nる\tった\t1\n"
        );
        assert_eq!(RuleSet::parse(&text, 4).unwrap(), rs);
    }

    #[test]
    fn prediction_file_ingestion() {
        let split = vec![pair("かく", "かいた"), pair("つっぷす", "つっぷした")];
        let set = parse_predictions("つっぷす\tつっ<UNK>した\nかく\tかいた\n", &split, "m").unwrap();
        assert!(set.missing.is_empty());
        assert_eq!(set.predictions[0].lemma, "かく");
        assert_eq!(set.predictions[1].predicted, "つっ<UNK>した");

        let partial = parse_predictions("かく\tかいた\n", &split, "m").unwrap();
        assert_eq!(partial.missing, ["つっぷす"]);

        assert!(matches!(
            parse_predictions("のむ\tのんだ\n", &split, "m"),
            Err(TransducerError::UnknownLemma { line: 1, .. })
        ));
        assert!(matches!(
            parse_predictions("かく かいた\n", &split, "m"),
            Err(TransducerError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_predictions("かく\tかいた\nかく\tかった\n", &split, "m"),
            Err(TransducerError::DuplicatePrediction { line: 2, .. })
        ));
    }
}
