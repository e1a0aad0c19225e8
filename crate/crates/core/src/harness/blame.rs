use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::features::{extract_program, FeatureSet, Sample};
use crate::lang::{NodeId, Program, Span};
use crate::models::Model;
use crate::slicer::{minimal_slices, slice_union, ErrorSlice};
use crate::typecheck::{infer_partial, PartialDerivation};

use super::HarnessError;

pub const DEFAULT_K: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlameEntry {
    pub node: NodeId,
    pub span: Span,
    pub confidence: f64,
}

/// Candidates in descending confidence, ties by node id, at most `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlameReport {
    pub entries: Vec<BlameEntry>,
    pub k: usize,
}

impl BlameReport {
    /// Ranks `scored` (node, confidence) pairs and keeps the best `k`.
    pub fn rank(p: &Program, mut scored: Vec<(NodeId, f64)>, k: usize) -> Self {
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        let entries = scored
            .into_iter()
            .map(|(node, confidence)| BlameEntry {
                node,
                span: p.span(node).unwrap_or_default(),
                confidence,
            })
            .collect();
        BlameReport { entries, k }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.entries.iter().map(|e| e.node)
    }

    pub fn top(&self, k: usize) -> &[BlameEntry] {
        &self.entries[..k.min(self.entries.len())]
    }
}

/// Scores every sample with `model`, projecting onto `features` first.
pub(crate) fn score(
    model: &Model,
    features: FeatureSet,
    samples: &[Sample],
) -> Result<Vec<(NodeId, f64)>, HarnessError> {
    let columns = features.columns();
    samples
        .iter()
        .map(|s| {
            let v: Vec<f64> = columns.iter().map(|&i| s.vector[i]).collect();
            Ok((s.node, model.eval(&v)?))
        })
        .collect()
}

pub(crate) fn rank_program(
    model: &Model,
    features: FeatureSet,
    p: &Program,
    d: &PartialDerivation,
    slices: &[ErrorSlice],
    filter_slice: bool,
    k: usize,
) -> Result<BlameReport, HarnessError> {
    let samples = extract_program(0, p, d, slices, None, filter_slice);
    let scored = score(model, features, &samples)?;
    Ok(BlameReport::rank(p, scored, k))
}

/// Ranks the slice members of an ill-typed program by blame confidence.
pub fn blame(
    model: &Model,
    features: FeatureSet,
    p: &Program,
    k: usize,
) -> Result<BlameReport, HarnessError> {
    let d = infer_partial(p);
    let slices = minimal_slices(p).map_err(|_| HarnessError::NotIllTyped)?;
    rank_program(model, features, p, &d, &slices, true, k)
}

/// `k` distinct nodes drawn uniformly from the slice union.
pub fn baseline_random_from(
    p: &Program,
    slices: &[ErrorSlice],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> BlameReport {
    let members: Vec<NodeId> = slice_union(p, slices)
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(id, _)| id)
        .collect();
    let n = k.min(members.len());
    let entries = sample(rng, members.len(), n)
        .into_iter()
        .enumerate()
        .map(|(rank, i)| BlameEntry {
            node: members[i],
            span: p.span(members[i]).unwrap_or_default(),
            confidence: 1.0 / (rank + 1) as f64,
        })
        .collect();
    BlameReport { entries, k }
}

pub fn baseline_random(p: &Program, seed: u64, k: usize) -> Result<BlameReport, HarnessError> {
    let slices = minimal_slices(p).map_err(|_| HarnessError::NotIllTyped)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(baseline_random_from(p, &slices, k, &mut rng))
}

pub(crate) fn first_error_from(p: &Program, d: &PartialDerivation, k: usize) -> BlameReport {
    let origin = d.errors.first().map(|e| e.origin());
    BlameReport::rank(p, origin.into_iter().map(|id| (id, 1.0)).collect(), k)
}

/// The origin of the first error, as a compiler would report it.
pub fn baseline_first_error(p: &Program, k: usize) -> Result<BlameReport, HarnessError> {
    let d = infer_partial(p);
    if d.well_typed {
        return Err(HarnessError::NotIllTyped);
    }
    Ok(first_error_from(p, &d, k))
}

/// Whether `entry` counts as a correct localization of `changed`.
pub(crate) fn is_hit(
    entry: &BlameEntry,
    changed: &BTreeSet<NodeId>,
    p: &Program,
    span_overlap: bool,
) -> bool {
    if changed.contains(&entry.node) {
        return true;
    }
    span_overlap
        && changed
            .iter()
            .any(|&c| p.span(c).map(|s| s.overlaps(&entry.span)).unwrap_or(false))
}
