//! Gold Japanese past-tense data, a suffix-rule inflection baseline, and an
//! orthography-aware audit of inflection errors in hiragana.
//!
//! The pipeline runs lexicon → [`conjugator`] → [`dataset`] splits →
//! [`transducer`] predictions (or an external prediction file) →
//! [`taxonomy`] reports.

pub mod cli;
pub mod conjugator;
pub mod dataset;
pub mod hiragana;
pub mod rng;
pub mod table;
pub mod taxonomy;
pub mod transducer;

use serde::Serialize;

/// Pretty JSON with every object's keys sorted, plus a trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json's Map is a BTreeMap unless `preserve_order` is enabled,
    // so a round trip through Value sorts the keys.
    let value = serde_json::to_value(value).expect("report types serialize");
    let mut out = serde_json::to_string_pretty(&value).expect("values serialize");
    out.push('\n');
    out
}
