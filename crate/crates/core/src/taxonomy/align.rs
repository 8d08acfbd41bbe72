//! Mora-level edit scripts with a canonical tie-break.
//!
//! Costs are unit (keep 0; insert, delete, substitute 1). Among minimal
//! scripts the canonical one is the lexicographically smallest sequence
//! under `Keep < Substitute < Delete < Insert`, which a forward walk over
//! suffix costs produces greedily. Preferring keeps early pushes every edit,
//! っ edits included, to its rightmost minimal position.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::hiragana::{segment_moras, segment_units, ScriptError, Unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum EditOp {
    Keep(Unit),
    Substitute(Unit, Unit),
    Delete(Unit),
    Insert(Unit),
}

impl EditOp {
    pub fn cost(&self) -> usize {
        match self {
            EditOp::Keep(_) => 0,
            _ => 1,
        }
    }

    pub fn is_edit(&self) -> bool {
        !matches!(self, EditOp::Keep(_))
    }

    fn rank(&self) -> u8 {
        match self {
            EditOp::Keep(_) => 0,
            EditOp::Substitute(..) => 1,
            EditOp::Delete(_) => 2,
            EditOp::Insert(_) => 3,
        }
    }

    /// Ordering used for the canonical tie-break: by operation kind only.
    pub fn kind_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl fmt::Display for EditOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EditOp::Keep(u) => write!(f, "keep:{u}"),
            EditOp::Substitute(g, p) => write!(f, "substitute:{g}>{p}"),
            EditOp::Delete(u) => write!(f, "delete:{u}"),
            EditOp::Insert(u) => write!(f, "insert:{u}"),
        }
    }
}

impl From<EditOp> for String {
    fn from(op: EditOp) -> String {
        op.to_string()
    }
}

fn one_unit(s: &str) -> Result<Unit, String> {
    match segment_units(s).map_err(|e| e.to_string())?.as_slice() {
        [u] => Ok(*u),
        _ => Err(format!("{s:?} is not a single mora")),
    }
}

impl FromStr for EditOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, body) = s.split_once(':').ok_or_else(|| format!("bad edit op {s:?}"))?;
        Ok(match kind {
            "keep" => EditOp::Keep(one_unit(body)?),
            "delete" => EditOp::Delete(one_unit(body)?),
            "insert" => EditOp::Insert(one_unit(body)?),
            "substitute" => {
                let (g, p) = body.split_once('>').ok_or_else(|| format!("bad substitution {s:?}"))?;
                EditOp::Substitute(one_unit(g)?, one_unit(p)?)
            }
            _ => return Err(format!("bad edit op {s:?}")),
        })
    }
}

impl TryFrom<String> for EditOp {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
}

/// An edit together with the gold position it acts at. Inserts sit before
/// the gold unit at `position` (or at the end when `position == gold.len()`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlacedEdit {
    pub position: usize,
    pub op: EditOp,
}

impl EditScript {
    pub fn cost(&self) -> usize {
        self.ops.iter().map(EditOp::cost).sum()
    }

    pub fn edits(&self) -> Vec<PlacedEdit> {
        let mut position = 0;
        let mut out = Vec::new();
        for op in &self.ops {
            if op.is_edit() {
                out.push(PlacedEdit { position, op: *op });
            }
            if !matches!(op, EditOp::Insert(_)) {
                position += 1;
            }
        }
        out
    }

    /// Replays the script over `gold`; `None` if it does not fit.
    pub fn apply(&self, gold: &[Unit]) -> Option<Vec<Unit>> {
        let mut out = Vec::with_capacity(gold.len() + 2);
        let mut g = gold.iter();
        for op in &self.ops {
            match op {
                EditOp::Keep(u) => {
                    if g.next()? != u {
                        return None;
                    }
                    out.push(*u);
                }
                EditOp::Substitute(from, to) => {
                    if g.next()? != from {
                        return None;
                    }
                    out.push(*to);
                }
                EditOp::Delete(u) => {
                    if g.next()? != u {
                        return None;
                    }
                }
                EditOp::Insert(u) => out.push(*u),
            }
        }
        g.next().is_none().then_some(out)
    }
}

impl fmt::Display for EditScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, op) in self.ops.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

/// Unit-cost edit distance between unit sequences.
pub fn edit_distance(gold: &[Unit], pred: &[Unit]) -> usize {
    suffix_costs(gold, pred)[0][0]
}

// costs[i][j]: minimal cost of aligning gold[i..] with pred[j..].
fn suffix_costs(gold: &[Unit], pred: &[Unit]) -> Vec<Vec<usize>> {
    let (n, m) = (gold.len(), pred.len());
    let mut costs = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            costs[i][j] = if i == n {
                m - j
            } else if j == m {
                n - i
            } else {
                let diag = costs[i + 1][j + 1] + usize::from(gold[i] != pred[j]);
                diag.min(costs[i + 1][j] + 1).min(costs[i][j + 1] + 1)
            };
        }
    }
    costs
}

pub fn align_units(gold: &[Unit], pred: &[Unit]) -> EditScript {
    let costs = suffix_costs(gold, pred);
    let (n, m) = (gold.len(), pred.len());
    let (mut i, mut j) = (0, 0);
    let mut ops = Vec::with_capacity(n.max(m));
    while i < n || j < m {
        let here = costs[i][j];
        if i < n && j < m && gold[i] == pred[j] && costs[i + 1][j + 1] == here {
            ops.push(EditOp::Keep(gold[i]));
            i += 1;
            j += 1;
        } else if i < n && j < m && gold[i] != pred[j] && costs[i + 1][j + 1] + 1 == here {
            ops.push(EditOp::Substitute(gold[i], pred[j]));
            i += 1;
            j += 1;
        } else if i < n && costs[i + 1][j] + 1 == here {
            ops.push(EditOp::Delete(gold[i]));
            i += 1;
        } else {
            ops.push(EditOp::Insert(pred[j]));
            j += 1;
        }
    }
    EditScript { ops }
}

/// Canonical minimal mora-level script turning `gold` into `pred`.
/// `pred` may contain the `<UNK>` sentinel.
pub fn align(gold: &str, pred: &str) -> Result<EditScript, ScriptError> {
    let gold: Vec<Unit> = segment_moras(gold)?.into_iter().map(Unit::Mora).collect();
    let pred = segment_units(pred)?;
    Ok(align_units(&gold, &pred))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hiragana::Mora;

    fn u(c: char) -> Unit {
        Unit::Mora(Mora::new(c))
    }

    fn script(gold: &str, pred: &str) -> Vec<EditOp> {
        align(gold, pred).unwrap().ops
    }

    #[test]
    fn omission_example() {
        let mut expected: Vec<EditOp> = "あきれかえ".chars().map(|c| EditOp::Keep(u(c))).collect();
        expected.push(EditOp::Delete(u('っ')));
        expected.push(EditOp::Keep(u('た')));
        assert_eq!(script("あきれかえった", "あきれかえた"), expected);
    }

    #[test]
    fn insertion_example() {
        assert_eq!(
            script("おきた", "おきった"),
            vec![
                EditOp::Keep(u('お')),
                EditOp::Keep(u('き')),
                EditOp::Insert(u('っ')),
                EditOp::Keep(u('た')),
            ]
        );
    }

    #[test]
    fn identity_and_stem_insert() {
        assert!(script("かいた", "かいた").iter().all(|op| !op.is_edit()));
        assert_eq!(
            script("まった", "まつった"),
            vec![
                EditOp::Keep(u('ま')),
                EditOp::Insert(u('つ')),
                EditOp::Keep(u('っ')),
                EditOp::Keep(u('た')),
            ]
        );
    }

    #[test]
    fn sokuon_edits_go_rightmost() {
        // Two equally cheap places for the extra っ; the later one wins.
        let ops = script("かった", "かっった");
        assert_eq!(ops[2], EditOp::Insert(u('っ')));
        let ops = script("ほめたたえた", "ほめたえた");
        assert_eq!(ops[3], EditOp::Delete(u('た')));
    }

    #[test]
    fn unk_is_one_unit() {
        let ops = script("つっぷした", "つっ<UNK>した");
        assert_eq!(ops[2], EditOp::Substitute(Unit::Mora(Mora::new('ぷ')), Unit::Unk));
        assert_eq!(ops.len(), 5);
    }

    #[test]
    fn placed_edits_and_replay() {
        let gold: Vec<Unit> = "おきた".chars().map(u).collect();
        let s = align_units(&gold, &"おきった".chars().map(u).collect::<Vec<_>>());
        assert_eq!(s.edits(), vec![PlacedEdit { position: 2, op: EditOp::Insert(u('っ')) }]);
        assert_eq!(s.apply(&gold).unwrap(), "おきった".chars().map(u).collect::<Vec<_>>());
        assert!(s.apply(&gold[..2]).is_none());
    }

    #[test]
    fn ops_serialize_as_strings() {
        let s = align("つっぷした", "つっ<UNK>した").unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"substitute:ぷ><UNK>\""), "{json}");
        let back: EditScript = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let sha: EditOp = "keep:しゃ".parse().unwrap();
        assert_eq!(sha, EditOp::Keep(Unit::Mora(Mora::with_combiner('し', 'ゃ'))));
    }
}
