//! Constraint generation interleaved with left-to-right unification.
//!
//! Operators infer their operands first and then constrain them. Binding
//! and branching forms push an expected type inward: a recursive binding is
//! checked against its own type variable, a function checked against an
//! expected type fixes its arrow shape before its body, and match/if arms
//! are checked one after another against the shared result type. Each
//! equation is unified as soon as it is generated; a failing equation is
//! recorded and dropped.

use std::collections::BTreeSet;

use crate::lang::{Expr, ExprKind, NodeId, Program};

use super::types::{TyVar, Type};
use super::unify::{Substitution, UnifyError};
use super::{Constraint, ConstraintRole, TypeError, TypeErrorKind};

#[derive(Debug, Clone)]
struct Scheme {
    vars: Vec<TyVar>,
    ty: Type,
}

pub(crate) struct Outcome {
    pub constraints: Vec<Constraint>,
    pub errors: Vec<TypeError>,
    pub subst: Substitution,
    /// Type of each visited node before any substitution is applied.
    pub raw_types: Vec<Option<Type>>,
    /// Number of constraints generated when each node's subtree finished.
    pub completed_at: Vec<usize>,
    pub next_var: u32,
}

struct Engine<'a> {
    holes: Option<&'a [bool]>,
    env: Vec<(String, Scheme)>,
    next_var: u32,
    subst: Substitution,
    constraints: Vec<Constraint>,
    errors: Vec<TypeError>,
    raw_types: Vec<Option<Type>>,
    completed_at: Vec<usize>,
}

pub(crate) fn run(p: &Program, holes: Option<&[bool]>) -> Outcome {
    let mut engine = Engine {
        holes,
        env: Vec::new(),
        next_var: 0,
        subst: Substitution::new(),
        constraints: Vec::new(),
        errors: Vec::new(),
        raw_types: vec![None; p.len()],
        completed_at: vec![0; p.len()],
    };
    engine.infer(p.root());
    Outcome {
        constraints: engine.constraints,
        errors: engine.errors,
        subst: engine.subst,
        raw_types: engine.raw_types,
        completed_at: engine.completed_at,
        next_var: engine.next_var,
    }
}

impl Engine<'_> {
    fn fresh(&mut self) -> Type {
        let v = self.next_var;
        self.next_var += 1;
        Type::Var(TyVar(v))
    }

    fn is_hole(&self, e: &Expr) -> bool {
        matches!(e.kind, ExprKind::Hole) || self.holes.is_some_and(|h| h[e.id])
    }

    fn finish(&mut self, e: &Expr, t: &Type) {
        self.raw_types[e.id] = Some(t.clone());
        self.completed_at[e.id] = self.constraints.len();
    }

    fn emit(&mut self, actual: Type, expected: Type, origin: NodeId, role: ConstraintRole) {
        let stamp = self.constraints.len();
        let constraint = Constraint {
            lhs: actual,
            rhs: expected,
            origin,
            role,
        };
        if let Err(err) = self
            .subst
            .unify_in_place(&constraint.lhs, &constraint.rhs, stamp)
        {
            let kind = match err {
                UnifyError::OccursCheck { .. } => TypeErrorKind::OccursCheck,
                UnifyError::ConstructorClash { .. } => TypeErrorKind::Mismatch,
            };
            self.errors.push(TypeError {
                expected: self.subst.apply(&constraint.rhs),
                actual: self.subst.apply(&constraint.lhs),
                conflicting: constraint.clone(),
                kind,
            });
        }
        self.constraints.push(constraint);
    }

    fn lookup(&self, x: &str) -> Option<&Scheme> {
        self.env.iter().rev().find(|(y, _)| y == x).map(|(_, s)| s)
    }

    fn instantiate(&mut self, s: &Scheme) -> Type {
        if s.vars.is_empty() {
            return s.ty.clone();
        }
        let fresh: Vec<(TyVar, Type)> = s.vars.iter().map(|&v| (v, self.fresh())).collect();
        rename(&s.ty, &fresh)
    }

    fn generalize(&self, t: &Type) -> Scheme {
        let ty = self.subst.apply(t);
        let mut vars = BTreeSet::new();
        ty.free_vars(&mut vars);
        let mut in_env = BTreeSet::new();
        for (_, s) in &self.env {
            let mut fv = BTreeSet::new();
            self.subst.apply(&s.ty).free_vars(&mut fv);
            for v in &s.vars {
                fv.remove(v);
            }
            in_env.extend(fv);
        }
        Scheme {
            vars: vars.difference(&in_env).copied().collect(),
            ty,
        }
    }

    fn mono(t: Type) -> Scheme {
        Scheme {
            vars: Vec::new(),
            ty: t,
        }
    }

    fn with_binding<T>(&mut self, x: &str, s: Scheme, f: impl FnOnce(&mut Self) -> T) -> T {
        self.env.push((x.to_string(), s));
        let out = f(self);
        self.env.pop();
        out
    }

    fn with_bindings<T>(&mut self, xs: [(&str, Type); 2], f: impl FnOnce(&mut Self) -> T) -> T {
        let [(x, tx), (y, ty)] = xs;
        self.with_binding(x, Self::mono(tx), |this| {
            this.with_binding(y, Self::mono(ty), f)
        })
    }

    /// Generalized scheme for the bound expression of a `let`.
    fn bind(&mut self, rec: bool, name: &str, bound: &Expr) -> Scheme {
        if rec {
            let own = self.fresh();
            self.with_binding(name, Self::mono(own.clone()), |this| {
                this.check(bound, &own)
            });
            self.generalize(&own)
        } else {
            let t = self.infer(bound);
            self.generalize(&t)
        }
    }

    fn infer(&mut self, e: &Expr) -> Type {
        if self.is_hole(e) {
            let t = self.fresh();
            self.finish(e, &t);
            return t;
        }
        let t = match &e.kind {
            ExprKind::Var(x) => match self.lookup(x).cloned() {
                Some(s) => self.instantiate(&s),
                None => {
                    let t = self.fresh();
                    self.errors.push(TypeError {
                        conflicting: Constraint {
                            lhs: t.clone(),
                            rhs: t.clone(),
                            origin: e.id,
                            role: ConstraintRole::Scope,
                        },
                        expected: t.clone(),
                        actual: t.clone(),
                        kind: TypeErrorKind::UnboundVar(x.clone()),
                    });
                    t
                }
            },
            ExprKind::Int(_) => Type::Int,
            ExprKind::Bool(_) => Type::Bool,
            ExprKind::Nil => Type::list(self.fresh()),
            ExprKind::Hole => self.fresh(),
            ExprKind::Fun(x, body) => {
                let param = self.fresh();
                let result =
                    self.with_binding(x, Self::mono(param.clone()), |this| this.infer(body));
                Type::fun(param, result)
            }
            ExprKind::App(f, a) => {
                let tf = self.infer(f);
                let ta = self.infer(a);
                let result = self.fresh();
                self.emit(
                    tf,
                    Type::fun(ta, result.clone()),
                    e.id,
                    ConstraintRole::Apply,
                );
                result
            }
            ExprKind::Let {
                rec,
                name,
                bound,
                body,
            } => {
                let scheme = self.bind(*rec, name, bound);
                self.with_binding(name, scheme, |this| this.infer(body))
            }
            ExprKind::Plus(a, b) => {
                let ta = self.infer(a);
                let tb = self.infer(b);
                self.emit(ta, Type::Int, a.id, ConstraintRole::Operand);
                self.emit(tb, Type::Int, b.id, ConstraintRole::Operand);
                Type::Int
            }
            ExprKind::Pair(a, b) => {
                let ta = self.infer(a);
                let tb = self.infer(b);
                Type::prod(ta, tb)
            }
            ExprKind::Cons(h, t) => {
                let th = self.infer(h);
                let tt = self.infer(t);
                self.emit(tt, Type::list(th.clone()), t.id, ConstraintRole::ConsTail);
                Type::list(th)
            }
            ExprKind::If(..) | ExprKind::PairCase { .. } | ExprKind::ListCase { .. } => {
                let result = self.fresh();
                self.branches(e, &result);
                result
            }
        };
        self.finish(e, &t);
        t
    }

    /// Checks `e` against `expected`, pushing the expectation into binders
    /// and branches where the syntax allows it.
    fn check(&mut self, e: &Expr, expected: &Type) {
        if self.is_hole(e) {
            let t = self.fresh();
            self.finish(e, &t);
            return;
        }
        match &e.kind {
            ExprKind::Fun(x, body) => {
                let param = self.fresh();
                let result = self.fresh();
                let shape = Type::fun(param.clone(), result.clone());
                self.emit(
                    shape.clone(),
                    expected.clone(),
                    e.id,
                    ConstraintRole::Expected,
                );
                self.with_binding(x, Self::mono(param), |this| this.check(body, &result));
                self.finish(e, &shape);
            }
            ExprKind::Let {
                rec,
                name,
                bound,
                body,
            } => {
                let scheme = self.bind(*rec, name, bound);
                self.with_binding(name, scheme, |this| this.check(body, expected));
                self.finish(e, expected);
            }
            ExprKind::If(..) | ExprKind::PairCase { .. } | ExprKind::ListCase { .. } => {
                self.branches(e, expected);
                self.finish(e, expected);
            }
            _ => {
                let t = self.infer(e);
                self.emit(t, expected.clone(), e.id, ConstraintRole::Expected);
            }
        }
    }

    fn branches(&mut self, e: &Expr, expected: &Type) {
        match &e.kind {
            ExprKind::If(c, t, f) => {
                let tc = self.infer(c);
                self.emit(tc, Type::Bool, c.id, ConstraintRole::Condition);
                self.check(t, expected);
                self.check(f, expected);
            }
            ExprKind::PairCase {
                scrutinee,
                left,
                right,
                body,
            } => {
                let ts = self.infer(scrutinee);
                let (a, b) = (self.fresh(), self.fresh());
                self.emit(
                    ts,
                    Type::prod(a.clone(), b.clone()),
                    scrutinee.id,
                    ConstraintRole::Scrutinee,
                );
                self.with_bindings([(left, a), (right, b)], |this| this.check(body, expected));
            }
            ExprKind::ListCase {
                scrutinee,
                nil,
                head,
                tail,
                cons,
            } => {
                let ts = self.infer(scrutinee);
                let elem = self.fresh();
                self.emit(
                    ts,
                    Type::list(elem.clone()),
                    scrutinee.id,
                    ConstraintRole::Scrutinee,
                );
                self.check(nil, expected);
                self.with_bindings([(head, elem.clone()), (tail, Type::list(elem))], |this| {
                    this.check(cons, expected)
                });
            }
            _ => unreachable!("branches called on a non-branching node"),
        }
    }
}

fn rename(t: &Type, map: &[(TyVar, Type)]) -> Type {
    match t {
        Type::Var(v) => map
            .iter()
            .find(|(w, _)| w == v)
            .map_or_else(|| t.clone(), |(_, u)| u.clone()),
        Type::Int | Type::Bool => t.clone(),
        Type::Fun(a, b) => Type::fun(rename(a, map), rename(b, map)),
        Type::Prod(a, b) => Type::prod(rename(a, map), rename(b, map)),
        Type::List(a) => Type::list(rename(a, map)),
    }
}
