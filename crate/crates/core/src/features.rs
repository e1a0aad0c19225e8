//! Bag-of-abstracted-terms feature vectors, one per node.
//!
//! Column layout: the node's own syntax class, the classes of its parent
//! and first three children, its subtree size, the type constructors
//! mentioned by the types of itself, its parent and first three children,
//! and slice membership.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::labeler::BlameLabels;
use crate::lang::{NodeId, Program, SyntaxClass};
use crate::slicer::{slice_union, ErrorSlice};
use crate::typecheck::{infer_partial, type_mentions, PartialDerivation, TypeCon};

pub const SCHEMA_VERSION: &str = "lml-boat-v1";

const N_SYN: usize = SyntaxClass::ALL.len();
const N_TY: usize = TypeCon::ALL.len();
/// Context slots: parent, then children one to three.
const SLOTS: [&str; 4] = ["P", "C1", "C2", "C3"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureGroup {
    LocalSyn,
    CtxSyn,
    Size,
    Type,
    Slice,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    pub version: &'static str,
    pub columns: Vec<(String, FeatureGroup)>,
}

impl FeatureSchema {
    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(n, _)| n == name)
    }

    pub fn count(&self, group: FeatureGroup) -> usize {
        self.columns.iter().filter(|(_, g)| *g == group).count()
    }
}

pub fn schema() -> &'static FeatureSchema {
    static SCHEMA: OnceLock<FeatureSchema> = OnceLock::new();
    SCHEMA.get_or_init(|| {
        let mut columns = Vec::new();
        for c in SyntaxClass::ALL {
            columns.push((format!("Is-{}", c.label()), FeatureGroup::LocalSyn));
        }
        for slot in SLOTS {
            for c in SyntaxClass::ALL {
                columns.push((format!("Is-{}-{slot}", c.label()), FeatureGroup::CtxSyn));
            }
        }
        columns.push(("Size".to_string(), FeatureGroup::Size));
        for c in TypeCon::ALL {
            columns.push((format!("Has-Type-{}", c.label()), FeatureGroup::Type));
        }
        for slot in SLOTS {
            for c in TypeCon::ALL {
                columns.push((format!("Has-Type-{}-{slot}", c.label()), FeatureGroup::Type));
            }
        }
        columns.push(("In-Slice".to_string(), FeatureGroup::Slice));
        FeatureSchema {
            version: SCHEMA_VERSION,
            columns,
        }
    })
}

const CTX_OFFSET: usize = N_SYN;
const SIZE_OFFSET: usize = N_SYN * 5;
const TYPE_OFFSET: usize = SIZE_OFFSET + 1;
const SLICE_OFFSET: usize = TYPE_OFFSET + N_TY * 5;
pub const WIDTH: usize = SLICE_OFFSET + 1;

/// Which optional groups a model sees. Local syntax is always included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSet {
    pub context: bool,
    pub size: bool,
    pub typing: bool,
    pub slice: bool,
}

impl FeatureSet {
    pub const ALL: FeatureSet = FeatureSet {
        context: true,
        size: true,
        typing: true,
        slice: true,
    };

    pub const LOCAL: FeatureSet = FeatureSet {
        context: false,
        size: false,
        typing: false,
        slice: false,
    };

    pub fn includes(&self, group: FeatureGroup) -> bool {
        match group {
            FeatureGroup::LocalSyn => true,
            FeatureGroup::CtxSyn => self.context,
            FeatureGroup::Size => self.size,
            FeatureGroup::Type => self.typing,
            FeatureGroup::Slice => self.slice,
        }
    }

    /// Indices of the selected schema columns, in schema order.
    pub fn columns(&self) -> Vec<usize> {
        schema()
            .columns
            .iter()
            .enumerate()
            .filter(|(_, (_, g))| self.includes(*g))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        self.columns().into_iter().map(|i| v[i]).collect()
    }
}

impl Default for FeatureSet {
    fn default() -> Self {
        FeatureSet::ALL
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == FeatureSet::ALL {
            return f.write_str("all");
        }
        f.write_str("local")?;
        for (on, name) in [
            (self.context, "context"),
            (self.size, "size"),
            (self.typing, "type"),
            (self.slice, "slice"),
        ] {
            if on {
                write!(f, "+{name}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for FeatureSet {
    type Err = String;

    /// Accepts `all` or `+`-joined group names, e.g. `local+type` or `+context`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = FeatureSet::LOCAL;
        for part in s.split('+').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "all" => set = FeatureSet::ALL,
                "local" => {}
                "context" => set.context = true,
                "size" => set.size = true,
                "type" => set.typing = true,
                "slice" => set.slice = true,
                other => return Err(format!("unknown feature group {other}")),
            }
        }
        Ok(set)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Index of the program in its corpus.
    pub program: usize,
    pub node: NodeId,
    pub vector: Vec<f64>,
    pub label: bool,
}

impl Sample {
    pub fn in_slice(&self) -> bool {
        self.vector[SLICE_OFFSET] != 0.0
    }
}

pub fn local_syntactic(p: &Program, id: NodeId) -> [f64; N_SYN] {
    let mut out = [0.0; N_SYN];
    if let Ok(c) = p.class(id) {
        out[c.index()] = 1.0;
    }
    out
}

/// Parent relatives first, then up to three children; absent slots are `None`.
fn relatives(p: &Program, id: NodeId) -> [Option<NodeId>; 4] {
    let children = p.children(id);
    [
        p.parent(id),
        children.first().copied(),
        children.get(1).copied(),
        children.get(2).copied(),
    ]
}

pub fn contextual_syntactic(p: &Program, id: NodeId) -> [f64; 4 * N_SYN] {
    let mut out = [0.0; 4 * N_SYN];
    for (slot, rel) in relatives(p, id).into_iter().enumerate() {
        if let Some(r) = rel {
            out[slot * N_SYN..(slot + 1) * N_SYN].copy_from_slice(&local_syntactic(p, r));
        }
    }
    out
}

pub fn size_feature(p: &Program, id: NodeId) -> usize {
    p.subtree_size(id).unwrap_or(1)
}

fn type_bits(d: &PartialDerivation, id: NodeId) -> [f64; N_TY] {
    let mut out = [0.0; N_TY];
    for c in type_mentions(&d.node_types[id]) {
        out[c.index()] = 1.0;
    }
    out
}

pub fn typing_features(p: &Program, d: &PartialDerivation, id: NodeId) -> [f64; 5 * N_TY] {
    let mut out = [0.0; 5 * N_TY];
    out[..N_TY].copy_from_slice(&type_bits(d, id));
    for (slot, rel) in relatives(p, id).into_iter().enumerate() {
        if let Some(r) = rel {
            out[(slot + 1) * N_TY..(slot + 2) * N_TY].copy_from_slice(&type_bits(d, r));
        }
    }
    out
}

/// Full-width vector for one node.
pub fn node_vector(p: &Program, d: &PartialDerivation, in_slice: bool, id: NodeId) -> Vec<f64> {
    let mut v = vec![0.0; WIDTH];
    v[..CTX_OFFSET].copy_from_slice(&local_syntactic(p, id));
    v[CTX_OFFSET..SIZE_OFFSET].copy_from_slice(&contextual_syntactic(p, id));
    v[SIZE_OFFSET] = size_feature(p, id) as f64;
    v[TYPE_OFFSET..SLICE_OFFSET].copy_from_slice(&typing_features(p, d, id));
    v[SLICE_OFFSET] = if in_slice { 1.0 } else { 0.0 };
    v
}

/// Samples for every node of `bad`, in pre-order. With `filter_slice`,
/// nodes outside every slice are dropped.
pub fn extract_program(
    program_ref: usize,
    bad: &Program,
    derivation: &PartialDerivation,
    slices: &[ErrorSlice],
    changed: Option<&BTreeSet<NodeId>>,
    filter_slice: bool,
) -> Vec<Sample> {
    let in_slice = slice_union(bad, slices);
    bad.ids()
        .filter(|&id| !filter_slice || in_slice[id])
        .map(|id| Sample {
            program: program_ref,
            node: id,
            vector: node_vector(bad, derivation, in_slice[id], id),
            label: changed.is_some_and(|c| c.contains(&id)),
        })
        .collect()
}

pub fn extract(
    pair: &crate::labeler::ProgramPair,
    slices: &[ErrorSlice],
    labels: &BlameLabels,
    filter_slice: bool,
) -> Vec<Sample> {
    let d = infer_partial(&pair.bad);
    extract_program(
        0,
        &pair.bad,
        &d,
        slices,
        Some(&labels.changed),
        filter_slice,
    )
}

/// CSV with a schema comment line, a header, and one row per sample.
pub fn write_csv(mut w: impl Write, samples: &[Sample]) -> std::io::Result<()> {
    let s = schema();
    writeln!(w, "# schema {} width {}", s.version, s.width())?;
    let header: Vec<&str> = s.names().chain(["label", "program", "node"]).collect();
    writeln!(w, "{}", header.join(","))?;
    for sample in samples {
        let mut row: Vec<String> = sample.vector.iter().map(|x| x.to_string()).collect();
        row.push(u8::from(sample.label).to_string());
        row.push(sample.program.to_string());
        row.push(sample.node.to_string());
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
