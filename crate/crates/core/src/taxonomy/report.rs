use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::align::EditScript;
use super::label::{classify_with_script, ErrorLabel};
use super::TaxonomyError;
use crate::canonical_json;
use crate::conjugator::VerbType;
use crate::dataset::{InflectionPair, LexiconIndex, TypeCounts};
use crate::table::{format_percent, group_thousands, percent_tenths};
use crate::transducer::Prediction;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditItem {
    pub lemma: String,
    pub gold: String,
    pub predicted: String,
    pub verb_type: VerbType,
    pub label: ErrorLabel,
    pub script: EditScript,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub run_id: String,
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Error labels only; `Correct` is never a key.
    pub counts_by_label: BTreeMap<ErrorLabel, usize>,
    /// Errors per verb type.
    pub counts_by_verbtype: BTreeMap<VerbType, usize>,
    pub items: Vec<AuditItem>,
}

fn accuracy(correct: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}

impl AuditReport {
    pub fn from_items(run_id: impl Into<String>, items: Vec<AuditItem>) -> Self {
        let mut counts_by_label = BTreeMap::new();
        let mut counts_by_verbtype = BTreeMap::new();
        let mut correct = 0;
        for item in &items {
            if item.label == ErrorLabel::Correct {
                correct += 1;
            } else {
                *counts_by_label.entry(item.label).or_insert(0) += 1;
                *counts_by_verbtype.entry(item.verb_type).or_insert(0) += 1;
            }
        }
        AuditReport {
            run_id: run_id.into(),
            total: items.len(),
            correct,
            accuracy: accuracy(correct, items.len()),
            counts_by_label,
            counts_by_verbtype,
            items,
        }
    }

    /// A report carrying counts only, e.g. to re-render published tables.
    pub fn from_counts(
        run_id: impl Into<String>,
        total: usize,
        counts_by_label: BTreeMap<ErrorLabel, usize>,
        counts_by_verbtype: BTreeMap<VerbType, usize>,
    ) -> Result<Self, TaxonomyError> {
        let by_label: usize = counts_by_label.values().sum();
        let by_type: usize = counts_by_verbtype.values().sum();
        if counts_by_label.contains_key(&ErrorLabel::Correct) || by_label != by_type || by_label > total {
            return Err(TaxonomyError::InconsistentCounts {
                by_label,
                by_type,
                total,
            });
        }
        let correct = total - by_label;
        Ok(AuditReport {
            run_id: run_id.into(),
            total,
            correct,
            accuracy: accuracy(correct, total),
            counts_by_label: counts_by_label.into_iter().filter(|(_, c)| *c > 0).collect(),
            counts_by_verbtype: counts_by_verbtype.into_iter().filter(|(_, c)| *c > 0).collect(),
            items: Vec::new(),
        })
    }

    pub fn errors(&self) -> usize {
        self.total - self.correct
    }

    pub fn label_count(&self, label: ErrorLabel) -> usize {
        self.counts_by_label.get(&label).copied().unwrap_or(0)
    }

    pub fn type_count(&self, vtype: VerbType) -> usize {
        self.counts_by_verbtype.get(&vtype).copied().unwrap_or(0)
    }

    pub fn error_lemmas(&self) -> BTreeSet<&str> {
        self.items
            .iter()
            .filter(|i| i.label != ErrorLabel::Correct)
            .map(|i| i.lemma.as_str())
            .collect()
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        canonical_json(self)
    }
}

/// Audits one prediction per split pair, in split order.
pub fn evaluate(
    run_id: &str,
    split: &[InflectionPair],
    predictions: &[Prediction],
    lexicon: &LexiconIndex,
) -> Result<AuditReport, TaxonomyError> {
    let by_lemma: HashMap<&str, &str> = predictions
        .iter()
        .map(|p| (p.lemma.as_str(), p.predicted.as_str()))
        .collect();
    let mut items = Vec::with_capacity(split.len());
    for pair in split {
        let predicted = *by_lemma
            .get(pair.lemma.as_str())
            .ok_or_else(|| TaxonomyError::MissingPrediction(pair.lemma.clone()))?;
        let info = lexicon
            .get(&pair.lemma)
            .ok_or_else(|| TaxonomyError::UnknownLemma(pair.lemma.clone()))?;
        let (label, script) = classify_with_script(&pair.lemma, &pair.target, predicted, info.compound);
        items.push(AuditItem {
            lemma: pair.lemma.clone(),
            gold: pair.target.clone(),
            predicted: predicted.to_owned(),
            verb_type: info.vtype,
            label,
            script,
        });
    }
    Ok(AuditReport::from_items(run_id, items))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub label: ErrorLabel,
    pub count: usize,
    /// Share of all errors, in tenths of a percent, rounded half-up.
    pub percent_tenths: u64,
}

impl DistributionRow {
    pub fn cell(&self, errors: usize) -> String {
        format!("{} ({})", self.count, format_percent(self.count, errors))
    }
}

/// Error-type rows: the six commonly observed modes always, then stem
/// alternation and `Other` when present. Empty when there are no errors.
pub fn error_distribution(report: &AuditReport) -> Vec<DistributionRow> {
    let errors = report.errors();
    if errors == 0 {
        return Vec::new();
    }
    ErrorLabel::ERRORS
        .iter()
        .filter(|&&label| {
            !matches!(label, ErrorLabel::StemAlternationOverreg | ErrorLabel::Other)
                || report.label_count(label) > 0
        })
        .map(|&label| {
            let count = report.label_count(label);
            DistributionRow {
                label,
                count,
                percent_tenths: percent_tenths(count, errors),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerbClassRow {
    pub verb_type: VerbType,
    pub errors: usize,
    pub percent_tenths: u64,
    pub dataset_count: usize,
    /// Error share divided by dataset share; `None` for an empty class.
    pub overrepresentation: Option<f64>,
}

impl VerbClassRow {
    pub fn cell(&self, total_errors: usize) -> String {
        if self.errors == 0 {
            "0".to_owned()
        } else {
            format!("{} ({})", self.errors, format_percent(self.errors, total_errors))
        }
    }
}

pub fn verb_class_distribution(report: &AuditReport, dataset: &TypeCounts) -> Vec<VerbClassRow> {
    let errors = report.errors();
    VerbType::EMITTED
        .iter()
        .map(|&vtype| {
            let count = report.type_count(vtype);
            let dataset_count = dataset.get(vtype);
            let overrepresentation = (dataset_count > 0 && dataset.total > 0).then(|| {
                if errors == 0 {
                    0.0
                } else {
                    (count as f64 / errors as f64) / (dataset_count as f64 / dataset.total as f64)
                }
            });
            VerbClassRow {
                verb_type: vtype,
                errors: count,
                percent_tenths: percent_tenths(count, errors),
                dataset_count,
                overrepresentation,
            }
        })
        .collect()
}

/// Left-aligned first column, right-aligned cells, each column sized to fit.
fn layout(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        for (c, cell) in row.iter().enumerate() {
            let w = widths[c];
            if c == 0 {
                let _ = write!(out, "{cell:<w$}");
            } else {
                let _ = write!(out, "  {cell:>w$}");
            }
        }
        out.push('\n');
    }
    out
}

/// Error-type table with one column per report.
pub fn render_error_table(reports: &[&AuditReport]) -> String {
    let mut rows = Vec::new();
    let mut header = vec!["Error Type".to_owned()];
    header.extend(reports.iter().map(|r| r.run_id.clone()));
    rows.push(header);
    let distributions: Vec<Vec<DistributionRow>> = reports.iter().map(|r| error_distribution(r)).collect();
    for label in ErrorLabel::ERRORS {
        if !distributions.iter().any(|d| d.iter().any(|row| row.label == label)) {
            continue;
        }
        let mut row = vec![label.name().to_owned()];
        row.extend(distributions.iter().zip(reports).map(|(d, r)| {
            d.iter()
                .find(|row| row.label == label)
                .map(|row| row.cell(r.errors()))
                .unwrap_or_else(|| "0".to_owned())
        }));
        rows.push(row);
    }
    let mut totals = vec!["Total".to_owned()];
    totals.extend(reports.iter().map(|r| r.errors().to_string()));
    rows.push(totals);
    layout(&rows)
}

/// Verb-type table with one error column per report plus dataset counts.
pub fn render_verb_class_table(reports: &[&AuditReport], dataset: &TypeCounts) -> String {
    let mut rows = Vec::new();
    let mut header = vec!["Verb Type".to_owned()];
    header.extend(reports.iter().map(|r| format!("{} errors", r.run_id)));
    header.push("Dataset Count".to_owned());
    rows.push(header);
    let tables: Vec<Vec<VerbClassRow>> = reports
        .iter()
        .map(|r| verb_class_distribution(r, dataset))
        .collect();
    for (i, vtype) in VerbType::EMITTED.iter().enumerate() {
        let mut row = vec![vtype.label().to_owned()];
        row.extend(tables.iter().zip(reports).map(|(t, r)| t[i].cell(r.errors())));
        row.push(group_thousands(dataset.get(*vtype)));
        rows.push(row);
    }
    let mut totals = vec!["Total".to_owned()];
    totals.extend(reports.iter().map(|r| r.errors().to_string()));
    totals.push(group_thousands(dataset.total));
    rows.push(totals);
    layout(&rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub range: f64,
}

impl ShareSummary {
    fn of(values: &[f64]) -> Self {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ShareSummary {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            min,
            max,
            range: max - min,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunShare {
    pub run_id: String,
    pub accuracy: f64,
    pub errors: usize,
    /// (omission + insertion) / errors.
    pub gemination_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub a: String,
    pub b: String,
    pub jaccard: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub runs: Vec<RunShare>,
    pub mean_accuracy: f64,
    pub label_shares: BTreeMap<ErrorLabel, ShareSummary>,
    pub gemination_share: ShareSummary,
    pub overlaps: Vec<Overlap>,
}

impl ConsistencyReport {
    pub fn to_canonical_json(&self) -> String {
        canonical_json(self)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<24}{:>10}{:>8}{:>12}", "Run", "Accuracy", "Errors", "Gemination");
        for r in &self.runs {
            let _ = writeln!(
                out,
                "{:<24}{:>10.4}{:>8}{:>11.1}%",
                r.run_id,
                r.accuracy,
                r.errors,
                r.gemination_share * 100.0
            );
        }
        let _ = writeln!(out, "mean accuracy {:.4}", self.mean_accuracy);
        let g = &self.gemination_share;
        let _ = writeln!(
            out,
            "gemination share {:.1}% (range {:.1}–{:.1}%)",
            g.mean * 100.0,
            g.min * 100.0,
            g.max * 100.0
        );
        if !self.overlaps.is_empty() {
            let mean = self.overlaps.iter().map(|o| o.jaccard).sum::<f64>() / self.overlaps.len() as f64;
            let _ = writeln!(out, "mean pairwise Jaccard of error lemmas {mean:.3}");
        }
        out
    }
}

fn share(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        part as f64 / whole as f64
    }
}

fn jaccard(a: &BTreeSet<&str>, b: &BTreeSet<&str>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

pub fn cross_run_consistency(reports: &[AuditReport]) -> Result<ConsistencyReport, TaxonomyError> {
    if reports.len() < 2 {
        return Err(TaxonomyError::TooFewRuns(reports.len()));
    }
    let runs: Vec<RunShare> = reports
        .iter()
        .map(|r| RunShare {
            run_id: r.run_id.clone(),
            accuracy: r.accuracy,
            errors: r.errors(),
            gemination_share: share(
                r.label_count(ErrorLabel::GeminationOmission) + r.label_count(ErrorLabel::GeminationInsertion),
                r.errors(),
            ),
        })
        .collect();
    let label_shares = ErrorLabel::ERRORS
        .iter()
        .map(|&label| {
            let values: Vec<f64> = reports
                .iter()
                .map(|r| share(r.label_count(label), r.errors()))
                .collect();
            (label, ShareSummary::of(&values))
        })
        .collect();
    let gemination: Vec<f64> = runs.iter().map(|r| r.gemination_share).collect();
    let lemma_sets: Vec<BTreeSet<&str>> = reports.iter().map(AuditReport::error_lemmas).collect();
    let mut overlaps = Vec::new();
    for i in 0..reports.len() {
        for j in i + 1..reports.len() {
            overlaps.push(Overlap {
                a: reports[i].run_id.clone(),
                b: reports[j].run_id.clone(),
                jaccard: jaccard(&lemma_sets[i], &lemma_sets[j]),
            });
        }
    }
    Ok(ConsistencyReport {
        mean_accuracy: runs.iter().map(|r| r.accuracy).sum::<f64>() / runs.len() as f64,
        runs,
        label_shares,
        gemination_share: ShareSummary::of(&gemination),
        overlaps,
    })
}
