//! Hindley–Milner inference that keeps going past errors.
//!
//! Equations are unified in the order they are generated. A failing
//! equation becomes a [`TypeError`] and is dropped, so an ill-typed program
//! still gets a type for every node (a partial derivation).

mod infer;
mod types;
mod unify;

use std::fmt;

use serde::Serialize;

use crate::lang::{NodeId, Program};

pub use types::{type_mentions, TyVar, Type, TypeCon};
pub use unify::{unify, Substitution, UnifyError};

/// Why an equation was generated. Together with the origin node this
/// identifies an error across masked re-runs of inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConstraintRole {
    /// A node's type against the type its context expects.
    Expected,
    /// An operand of `+` against `int`.
    Operand,
    /// A function type against `argument -> result`.
    Apply,
    /// A match scrutinee against the matched shape.
    Scrutinee,
    /// An `if` condition against `bool`.
    Condition,
    /// The tail of `::` against a list of the head's type.
    ConsTail,
    /// Variable lookup. Never a unification constraint.
    Scope,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    /// The type the origin node has.
    pub lhs: Type,
    /// The type required of it.
    pub rhs: Type,
    pub origin: NodeId,
    pub role: ConstraintRole,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeErrorKind {
    Mismatch,
    OccursCheck,
    UnboundVar(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeError {
    /// The first equation that failed to unify.
    pub conflicting: Constraint,
    pub expected: Type,
    pub actual: Type,
    pub kind: TypeErrorKind,
}

/// Stable identity of an error: where it arose and why.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ErrorKey {
    pub origin: NodeId,
    pub role: ConstraintRole,
}

impl TypeError {
    pub fn key(&self) -> ErrorKey {
        ErrorKey {
            origin: self.conflicting.origin,
            role: self.conflicting.role,
        }
    }

    pub fn origin(&self) -> NodeId {
        self.conflicting.origin
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let node = self.conflicting.origin;
        match &self.kind {
            TypeErrorKind::UnboundVar(x) => write!(f, "node {node}: unbound variable {x}"),
            TypeErrorKind::OccursCheck => write!(
                f,
                "node {node}: expected {}, actual {} (cyclic type)",
                self.expected, self.actual
            ),
            TypeErrorKind::Mismatch => write!(
                f,
                "node {node}: expected {}, actual {}",
                self.expected, self.actual
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialDerivation {
    /// Indexed by node id.
    pub node_types: Vec<Type>,
    pub errors: Vec<TypeError>,
    pub well_typed: bool,
}

impl PartialDerivation {
    pub fn root_type(&self) -> &Type {
        &self.node_types[0]
    }

    pub fn has_error(&self, key: ErrorKey) -> bool {
        self.errors.iter().any(|e| e.key() == key)
    }
}

/// All equations of `p` in generation order, including those that fail.
pub fn generate_constraints(p: &Program) -> Vec<Constraint> {
    infer::run(p, None).constraints
}

pub fn infer_partial(p: &Program) -> PartialDerivation {
    derive(p, None)
}

/// Inference with every node whose `mask` entry is true treated as a hole.
/// Masked subtrees are not traversed.
pub fn infer_masked(p: &Program, mask: &[bool]) -> PartialDerivation {
    assert_eq!(mask.len(), p.len(), "mask length must match program size");
    derive(p, Some(mask))
}

/// Errors only, without resolving node types.
pub fn errors_masked(p: &Program, mask: &[bool]) -> Vec<TypeError> {
    infer::run(p, Some(mask)).errors
}

fn derive(p: &Program, mask: Option<&[bool]>) -> PartialDerivation {
    let out = infer::run(p, mask);
    // Types inside an erroneous subtree are read off the substitution as it
    // stood when that subtree was finished, before the context constrained
    // it. Everything else sees the final substitution.
    let mut cutoff = vec![usize::MAX; p.len()];
    for err in &out.errors {
        let origin = err.conflicting.origin;
        let at = out.completed_at[origin];
        for id in p.subtree(origin).unwrap_or(0..0) {
            cutoff[id] = cutoff[id].min(at);
        }
    }
    let mut next = out.next_var;
    let node_types = (0..p.len())
        .map(|id| match &out.raw_types[id] {
            Some(t) => out.subst.apply_before(t, cutoff[id]),
            None => {
                next += 1;
                Type::var(next - 1)
            }
        })
        .collect();
    PartialDerivation {
        node_types,
        well_typed: out.errors.is_empty(),
        errors: out.errors,
    }
}
