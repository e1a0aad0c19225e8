//! Blame labels from (ill-typed, fixed) program pairs.
//!
//! The two trees are walked together. Structurally equal subtrees are
//! skipped. A fix that wraps a bad subtree in a new operator blames the
//! wrapped node; a fix that drops a wrapper blames the removed operator.
//! Nodes of the same kind are compared child by child (blaming the node
//! itself when its own label changed), and anything else is a wholesale
//! replacement of the bad node.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::{parse, Expr, NodeId, Program, SyntaxError};
use crate::typecheck::infer_partial;

#[derive(Debug, Clone, PartialEq)]
pub struct ProgramPair {
    pub bad: Program,
    pub fix: Program,
    pub meta: serde_json::Value,
}

#[derive(Debug, Error)]
pub enum PairError {
    #[error("bad program: {0}")]
    BadSyntax(SyntaxError),
    #[error("fixed program: {0}")]
    FixSyntax(SyntaxError),
    #[error("bad program is well-typed")]
    BadIsWellTyped,
    #[error("fixed program is ill-typed: {0}")]
    FixIsIllTyped(String),
}

impl ProgramPair {
    /// Builds a pair, checking that `bad` is ill-typed and `fix` is not.
    pub fn new(bad: Program, fix: Program, meta: serde_json::Value) -> Result<Self, PairError> {
        if infer_partial(&bad).well_typed {
            return Err(PairError::BadIsWellTyped);
        }
        let fix_errors = infer_partial(&fix).errors;
        if let Some(e) = fix_errors.first() {
            return Err(PairError::FixIsIllTyped(e.to_string()));
        }
        Ok(ProgramPair { bad, fix, meta })
    }

    pub fn parse(bad: &str, fix: &str, meta: serde_json::Value) -> Result<Self, PairError> {
        let bad = parse(bad).map_err(PairError::BadSyntax)?;
        let fix = parse(fix).map_err(PairError::FixSyntax)?;
        Self::new(bad, fix, meta)
    }
}

/// One line of a corpus file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub bad: String,
    pub fix: String,
    #[serde(default)]
    pub meta: serde_json::Value,
}

impl From<&ProgramPair> for PairRecord {
    fn from(p: &ProgramPair) -> Self {
        PairRecord {
            bad: p.bad.source().to_string(),
            fix: p.fix.source().to_string(),
            meta: p.meta.clone(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: {source}")]
    Pair { line: usize, source: PairError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reads a JSON Lines corpus. Blank lines are skipped.
pub fn read_corpus(reader: impl BufRead) -> Result<Vec<ProgramPair>, CorpusError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PairRecord = serde_json::from_str(&line).map_err(|source| CorpusError::Json {
            line: i + 1,
            source,
        })?;
        let pair = ProgramPair::parse(&rec.bad, &rec.fix, rec.meta).map_err(|source| {
            CorpusError::Pair {
                line: i + 1,
                source,
            }
        })?;
        out.push(pair);
    }
    Ok(out)
}

pub fn write_corpus(mut writer: impl Write, pairs: &[ProgramPair]) -> std::io::Result<()> {
    for p in pairs {
        serde_json::to_writer(&mut writer, &PairRecord::from(p))?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlameLabels {
    pub changed: BTreeSet<NodeId>,
    /// Edited nodes of `bad` over its node count.
    pub diff_fraction: f64,
}

pub fn tree_diff(pair: &ProgramPair) -> BlameLabels {
    diff_programs(&pair.bad, &pair.fix)
}

/// Labels for an arbitrary pair of programs, without the typing invariants.
pub fn diff_programs(bad: &Program, fix: &Program) -> BlameLabels {
    let mut changed = BTreeSet::new();
    let edited = diff(bad.root(), fix.root(), &mut changed);
    BlameLabels {
        changed,
        diff_fraction: (edited as f64 / bad.len() as f64).min(1.0),
    }
}

/// Marks blamed nodes of `b` and returns how many of its nodes were edited.
fn diff(b: &Expr, f: &Expr, changed: &mut BTreeSet<NodeId>) -> usize {
    if b == f {
        return 0;
    }
    let wraps = f.children().contains(&b);
    let unwraps = b.children().contains(&f);
    if wraps || unwraps {
        changed.insert(b.id);
        return 1;
    }
    let bc = b.children();
    let fc = f.children();
    if b.class() == f.class() && bc.len() == fc.len() {
        let mut edited = 0;
        if !b.same_label(f) {
            changed.insert(b.id);
            edited += 1;
        }
        for (x, y) in bc.iter().zip(&fc) {
            edited += diff(x, y, changed);
        }
        return edited;
    }
    changed.insert(b.id);
    let kept: usize = bc
        .iter()
        .zip(&fc)
        .filter(|(x, y)| x == y)
        .map(|(x, _)| x.size())
        .sum();
    b.size() - kept
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutlierPolicy {
    Fixed(f64),
    /// Mean plus one standard deviation of the corpus fractions.
    Sigma,
}

impl Default for OutlierPolicy {
    fn default() -> Self {
        OutlierPolicy::Fixed(0.40)
    }
}

impl fmt::Display for OutlierPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutlierPolicy::Fixed(t) => write!(f, "fixed:{t}"),
            OutlierPolicy::Sigma => f.write_str("sigma"),
        }
    }
}

impl FromStr for OutlierPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "sigma" {
            return Ok(OutlierPolicy::Sigma);
        }
        let t = s
            .strip_prefix("fixed:")
            .ok_or_else(|| format!("expected fixed:<f> or sigma, got {s}"))?;
        let t: f64 = t.parse().map_err(|e| format!("bad threshold {t}: {e}"))?;
        if !(0.0..=1.0).contains(&t) {
            return Err(format!("threshold {t} outside [0, 1]"));
        }
        Ok(OutlierPolicy::Fixed(t))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("empty corpus")]
    EmptyCorpus,
}

/// The cutoff `policy` yields on `fractions`.
pub fn outlier_threshold(fractions: &[f64], policy: OutlierPolicy) -> Result<f64, FilterError> {
    match policy {
        OutlierPolicy::Fixed(t) => Ok(t),
        OutlierPolicy::Sigma => {
            if fractions.is_empty() {
                return Err(FilterError::EmptyCorpus);
            }
            let n = fractions.len() as f64;
            let mean = fractions.iter().sum::<f64>() / n;
            let var = fractions.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            Ok(mean + var.sqrt())
        }
    }
}

/// Splits `items` into (kept, discarded) by diff fraction.
pub fn filter_outliers<T>(
    items: Vec<T>,
    fraction: impl Fn(&T) -> f64,
    policy: OutlierPolicy,
) -> Result<(Vec<T>, Vec<T>), FilterError> {
    let fractions: Vec<f64> = items.iter().map(&fraction).collect();
    let threshold = outlier_threshold(&fractions, policy)?;
    // Tolerate rounding when every fraction equals the sigma threshold.
    let threshold = threshold + 1e-12;
    let mut kept = Vec::new();
    let mut discarded = Vec::new();
    for (item, x) in items.into_iter().zip(fractions) {
        if x <= threshold {
            kept.push(item);
        } else {
            discarded.push(item);
        }
    }
    Ok((kept, discarded))
}
