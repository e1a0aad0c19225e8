use std::collections::BTreeSet;

use crate::lang::NodeId;

use super::blame::BlameReport;

/// Fraction of programs with some changed node among the first `k` entries.
pub fn top_k_accuracy(reports: &[BlameReport], labels: &[BTreeSet<NodeId>], k: usize) -> f64 {
    if reports.is_empty() {
        return 0.0;
    }
    let hits = reports
        .iter()
        .zip(labels)
        .filter(|(r, l)| r.top(k).iter().any(|e| l.contains(&e.node)))
        .count();
    hits as f64 / reports.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recall {
    pub value: f64,
    /// Programs left out because no changed node lies in the slice.
    pub skipped: usize,
}

/// Micro-averaged |top-3 ∩ oracle| / |oracle|, where the oracle is the set
/// of changed nodes inside the slice.
pub fn recall(
    reports: &[BlameReport],
    labels: &[BTreeSet<NodeId>],
    slices: &[BTreeSet<NodeId>],
) -> Recall {
    let mut found = 0;
    let mut total = 0;
    let mut skipped = 0;
    for ((r, l), s) in reports.iter().zip(labels).zip(slices) {
        let oracle: BTreeSet<NodeId> = l.intersection(s).copied().collect();
        if oracle.is_empty() {
            skipped += 1;
            continue;
        }
        total += oracle.len();
        found += r.top(3).iter().filter(|e| oracle.contains(&e.node)).count();
    }
    Recall {
        value: if total == 0 {
            0.0
        } else {
            found as f64 / total as f64
        },
        skipped,
    }
}
