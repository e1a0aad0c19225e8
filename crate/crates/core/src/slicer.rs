//! Minimal type error slices.
//!
//! A slice is the set of nodes an error depends on. Nodes outside it can be
//! replaced by holes without the error going away; replacing any node inside
//! it makes the error disappear. Errors are tracked by [`ErrorKey`] so that
//! the same error can be recognised in masked re-runs of inference.
//!
//! Slices are computed by top-down deletion: each node, in pre-order, is
//! tentatively holed. If the error survives the node stays holed, otherwise
//! it joins the slice and its children are tried in turn. A final pass
//! re-tests every slice member against the finished mask and drops members
//! that have become redundant.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::lang::{NodeId, Program};
use crate::typecheck::{errors_masked, infer_partial, ErrorKey};

pub const DEFAULT_BUDGET: Duration = Duration::from_secs(1);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SliceError {
    #[error("program is well-typed")]
    NotIllTyped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorSlice {
    /// Position of the error in `infer_partial(p).errors`.
    pub error_index: usize,
    pub error: ErrorKey,
    pub nodes: BTreeSet<NodeId>,
    /// False when the time budget ran out and undecided nodes were kept.
    pub minimal: bool,
}

impl ErrorSlice {
    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains(&id)
    }

    /// Hole mask leaving exactly the slice in place.
    pub fn complement_mask(&self, p: &Program) -> Vec<bool> {
        hole_roots(p, |id| self.nodes.contains(&id))
    }
}

pub fn minimal_slices(p: &Program) -> Result<Vec<ErrorSlice>, SliceError> {
    minimal_slices_with_budget(p, DEFAULT_BUDGET)
}

/// As [`minimal_slices`], with an explicit per-program time budget.
pub fn minimal_slices_with_budget(
    p: &Program,
    budget: Duration,
) -> Result<Vec<ErrorSlice>, SliceError> {
    let errors = infer_partial(p).errors;
    if errors.is_empty() {
        return Err(SliceError::NotIllTyped);
    }
    let deadline = Instant::now() + budget;
    Ok(errors
        .iter()
        .enumerate()
        .map(|(i, e)| slice_one(p, i, e.key(), deadline))
        .collect())
}

pub fn in_any_slice(slices: &[ErrorSlice], id: NodeId) -> bool {
    slices.iter().any(|s| s.contains(id))
}

/// Membership of every node in the union of `slices`, indexed by node id.
pub fn slice_union(p: &Program, slices: &[ErrorSlice]) -> Vec<bool> {
    p.ids().map(|id| in_any_slice(slices, id)).collect()
}

/// Mask holing the topmost nodes for which `keep` is false.
fn hole_roots(p: &Program, keep: impl Fn(NodeId) -> bool) -> Vec<bool> {
    let mut mask = vec![false; p.len()];
    let mut id = 0;
    while id < p.len() {
        if keep(id) {
            id += 1;
        } else {
            mask[id] = true;
            id += p.subtree_size(id).unwrap_or(1);
        }
    }
    mask
}

fn persists(p: &Program, mask: &[bool], key: ErrorKey) -> bool {
    errors_masked(p, mask).iter().any(|e| e.key() == key)
}

fn slice_one(p: &Program, error_index: usize, key: ErrorKey, deadline: Instant) -> ErrorSlice {
    let n = p.len();
    let mut mask = vec![false; n];
    let mut minimal = true;
    let mut id = 0;
    while id < n {
        if Instant::now() > deadline {
            minimal = false;
            break;
        }
        mask[id] = true;
        if persists(p, &mask, key) {
            id += p.subtree_size(id).unwrap_or(1);
        } else {
            mask[id] = false;
            id += 1;
        }
    }

    // Holes placed after a node was kept can make that node redundant.
    let mut changed = minimal;
    while changed {
        changed = false;
        for id in 0..n {
            if !live(p, &mask, id) {
                continue;
            }
            mask[id] = true;
            if persists(p, &mask, key) {
                changed = true;
            } else {
                mask[id] = false;
            }
        }
    }

    let nodes = (0..n).filter(|&id| live(p, &mask, id)).collect();
    ErrorSlice {
        error_index,
        error: key,
        nodes,
        minimal,
    }
}

/// Whether `id` is present, i.e. neither it nor any ancestor is holed.
fn live(p: &Program, mask: &[bool], id: NodeId) -> bool {
    let mut cur = Some(id);
    while let Some(c) = cur {
        if mask[c] {
            return false;
        }
        cur = p.parent(c);
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SliceCheck {
    pub error_index: usize,
    pub sufficient: bool,
    /// Slice members whose holing leaves the error in place.
    pub redundant: Vec<NodeId>,
}

impl SliceCheck {
    pub fn passed(&self) -> bool {
        self.sufficient && self.redundant.is_empty()
    }
}

/// Re-checks a slice against the hole semantics: the error survives when
/// everything outside the slice is holed, and disappears when any member
/// is additionally holed.
pub fn verify_slice(p: &Program, slice: &ErrorSlice) -> SliceCheck {
    let mask = slice.complement_mask(p);
    let sufficient = persists(p, &mask, slice.error);
    let redundant = slice
        .nodes
        .iter()
        .copied()
        .filter(|&id| {
            let mut m = mask.clone();
            m[id] = true;
            persists(p, &m, slice.error)
        })
        .collect();
    SliceCheck {
        error_index: slice.error_index,
        sufficient,
        redundant,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, ExprKind, SyntaxClass};

    #[test]
    fn int_plus_bool() {
        let p = parse("1 + true").unwrap();
        let slices = minimal_slices(&p).unwrap();
        assert_eq!(slices.len(), 1);
        // Holing `1` leaves `true` failing against int.
        assert_eq!(slices[0].nodes, BTreeSet::from([0, 2]));
        assert!(slices[0].minimal);
        assert!(verify_slice(&p, &slices[0]).passed());
    }

    #[test]
    fn well_typed_is_rejected() {
        let p = parse("1 + 2").unwrap();
        assert_eq!(minimal_slices(&p), Err(SliceError::NotIllTyped));
    }

    #[test]
    fn sum_list() {
        let p =
            parse("let rec sumList xs = match xs with | [] -> [] | hd :: tl -> hd + sumList tl")
                .unwrap();
        let slices = minimal_slices(&p).unwrap();
        let find = |pred: &dyn Fn(&ExprKind) -> bool| {
            p.ids().find(|&id| pred(&p.node(id).unwrap().kind)).unwrap()
        };
        let tl = find(&|k| matches!(k, ExprKind::Var(x) if x == "tl"));
        let nil = find(&|k| matches!(k, ExprKind::Nil));
        let plus = find(&|k| matches!(k, ExprKind::Plus(..)));
        let call = find(&|k| matches!(k, ExprKind::App(..)));
        assert!(!in_any_slice(&slices, tl));
        for id in [nil, plus, call] {
            assert!(in_any_slice(&slices, id), "{id}");
        }
        for s in &slices {
            assert!(verify_slice(&p, s).passed());
        }
    }

    #[test]
    fn independent_errors_get_separate_slices() {
        let p = parse("(1 + true, if 0 then 1 else 2)").unwrap();
        let slices = minimal_slices(&p).unwrap();
        assert_eq!(slices.len(), 2);
        let left: BTreeSet<_> = slices[0].nodes.iter().filter(|&&id| id != 0).collect();
        let right: BTreeSet<_> = slices[1].nodes.iter().filter(|&&id| id != 0).collect();
        assert!(left.is_disjoint(&right));
        assert!(slices[1]
            .nodes
            .iter()
            .any(|&id| p.class(id).unwrap() == SyntaxClass::If));
    }

    #[test]
    fn zero_budget_keeps_everything() {
        let p = parse("1 + true").unwrap();
        let slices = minimal_slices_with_budget(&p, Duration::ZERO).unwrap();
        assert!(!slices[0].minimal);
        assert_eq!(slices[0].nodes.len(), p.len());
    }
}
