//! Test-only oracles, independent of the library's alignment code.
#![allow(dead_code)]

use katsuyou::hiragana::{Mora, Unit};
use katsuyou::rng::XorShift64Star;
use katsuyou::taxonomy::EditOp;

/// Minimal unit-cost edit distance by exhaustive recursion over every
/// alignment path (no memoisation, no shared code with the library).
pub fn brute_force_cost(gold: &[Unit], pred: &[Unit]) -> usize {
    match (gold.split_first(), pred.split_first()) {
        (None, None) => 0,
        (Some(_), None) => gold.len(),
        (None, Some(_)) => pred.len(),
        (Some((g, gr)), Some((p, pr))) => {
            let diag = brute_force_cost(gr, pr) + usize::from(g != p);
            let del = brute_force_cost(gr, pred) + 1;
            let ins = brute_force_cost(gold, pr) + 1;
            diag.min(del).min(ins)
        }
    }
}

/// Every complete edit script from `gold` to `pred`.
pub fn all_scripts(gold: &[Unit], pred: &[Unit]) -> Vec<Vec<EditOp>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    enumerate(gold, pred, &mut current, &mut out);
    out
}

fn enumerate(gold: &[Unit], pred: &[Unit], current: &mut Vec<EditOp>, out: &mut Vec<Vec<EditOp>>) {
    if gold.is_empty() && pred.is_empty() {
        out.push(current.clone());
        return;
    }
    if let (Some((g, gr)), Some((p, pr))) = (gold.split_first(), pred.split_first()) {
        current.push(if g == p { EditOp::Keep(*g) } else { EditOp::Substitute(*g, *p) });
        enumerate(gr, pr, current, out);
        current.pop();
    }
    if let Some((g, gr)) = gold.split_first() {
        current.push(EditOp::Delete(*g));
        enumerate(gr, pred, current, out);
        current.pop();
    }
    if let Some((p, pr)) = pred.split_first() {
        current.push(EditOp::Insert(*p));
        enumerate(gold, pr, current, out);
        current.pop();
    }
}

fn kind(op: &EditOp) -> u8 {
    match op {
        EditOp::Keep(_) => 0,
        EditOp::Substitute(..) => 1,
        EditOp::Delete(_) => 2,
        EditOp::Insert(_) => 3,
    }
}

pub fn script_cost(ops: &[EditOp]) -> usize {
    ops.iter().filter(|op| !matches!(op, EditOp::Keep(_))).count()
}

/// The canonical script by definition: among minimal scripts, the
/// lexicographically smallest by operation kind (keep < substitute <
/// delete < insert).
pub fn brute_force_canonical(gold: &[Unit], pred: &[Unit]) -> Vec<EditOp> {
    let scripts = all_scripts(gold, pred);
    let best = scripts.iter().map(|s| script_cost(s)).min().unwrap();
    scripts
        .into_iter()
        .filter(|s| script_cost(s) == best)
        .min_by(|a, b| {
            let ka: Vec<u8> = a.iter().map(kind).collect();
            let kb: Vec<u8> = b.iter().map(kind).collect();
            ka.cmp(&kb)
        })
        .unwrap()
}

pub fn units(s: &str) -> Vec<Unit> {
    katsuyou::hiragana::segment_units(s).unwrap()
}

/// Small inventory for perturbations; っ and a repeated-looking set on purpose.
const PERTURB_KANA: &str = "ったいかんだるえし";

/// Applies 1 to 3 random mora edits to `gold`.
pub fn perturb(gold: &[Unit], rng: &mut XorShift64Star) -> Vec<Unit> {
    let alphabet: Vec<Unit> = PERTURB_KANA.chars().map(|c| Unit::Mora(Mora::new(c))).collect();
    let mut out = gold.to_vec();
    let edits = 1 + rng.below(3);
    for _ in 0..edits {
        let kana = alphabet[rng.below(alphabet.len())];
        match rng.below(3) {
            0 => {
                let at = rng.below(out.len() + 1);
                out.insert(at, kana);
            }
            1 if out.len() > 1 => {
                let at = rng.below(out.len());
                out.remove(at);
            }
            _ if !out.is_empty() => {
                let at = rng.below(out.len());
                out[at] = kana;
            }
            _ => out.push(kana),
        }
    }
    out
}
