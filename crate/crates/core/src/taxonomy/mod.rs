//! Orthography-aware error taxonomy: mora alignment, single-label error
//! classification, and the aggregate report tables.

mod align;
mod label;
mod report;

use thiserror::Error;

pub use align::{align, align_units, edit_distance, EditOp, EditScript, PlacedEdit};
pub use label::{classify_error, suffix_start, ErrorLabel};
pub use report::{
    cross_run_consistency, error_distribution, evaluate, render_error_table, render_verb_class_table,
    verb_class_distribution, AuditItem, AuditReport, ConsistencyReport, DistributionRow, Overlap, RunShare,
    ShareSummary, VerbClassRow,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("no prediction for {0}")]
    MissingPrediction(String),
    #[error("no lexicon entry for {0}")]
    UnknownLemma(String),
    #[error("consistency needs at least 2 runs, got {0}")]
    TooFewRuns(usize),
    #[error("label counts ({by_label}) and verb-type counts ({by_type}) disagree or exceed {total} items")]
    InconsistentCounts {
        by_label: usize,
        by_type: usize,
        total: usize,
    },
}
