//! Oracles shared by the integration tests and the acceptance target: a
//! textbook algorithm W, a small-step evaluator, and a hole-based slice
//! checker that uses only `replace_subtree` and the type checker.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use nate_core::lang::{Expr, ExprKind, NodeId, Program};
use nate_core::typecheck::{errors_masked, ErrorKey, Type};

// ---------------------------------------------------------------------------
// Algorithm W

#[derive(Debug, Clone, PartialEq)]
pub enum T {
    V(u32),
    Int,
    Bool,
    Fun(Box<T>, Box<T>),
    Prod(Box<T>, Box<T>),
    List(Box<T>),
}

type Subst = HashMap<u32, T>;

#[derive(Clone)]
struct Scheme {
    vars: Vec<u32>,
    ty: T,
}

type Env = HashMap<String, Scheme>;

fn apply(s: &Subst, t: &T) -> T {
    match t {
        T::V(v) => match s.get(v) {
            Some(u) => apply(s, u),
            None => t.clone(),
        },
        T::Int | T::Bool => t.clone(),
        T::Fun(a, b) => T::Fun(Box::new(apply(s, a)), Box::new(apply(s, b))),
        T::Prod(a, b) => T::Prod(Box::new(apply(s, a)), Box::new(apply(s, b))),
        T::List(a) => T::List(Box::new(apply(s, a))),
    }
}

/// `s2 ∘ s1`.
fn compose(s2: &Subst, s1: &Subst) -> Subst {
    let mut out: Subst = s1.iter().map(|(&v, t)| (v, apply(s2, t))).collect();
    for (&v, t) in s2 {
        out.entry(v).or_insert_with(|| t.clone());
    }
    out
}

fn ftv(t: &T, out: &mut BTreeSet<u32>) {
    match t {
        T::V(v) => {
            out.insert(*v);
        }
        T::Int | T::Bool => {}
        T::Fun(a, b) | T::Prod(a, b) => {
            ftv(a, out);
            ftv(b, out);
        }
        T::List(a) => ftv(a, out),
    }
}

fn env_ftv(s: &Subst, env: &Env) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    for sc in env.values() {
        let mut inner = BTreeSet::new();
        ftv(&apply(s, &sc.ty), &mut inner);
        for v in &sc.vars {
            inner.remove(v);
        }
        out.extend(inner);
    }
    out
}

fn mgu(a: &T, b: &T) -> Option<Subst> {
    match (a, b) {
        (T::V(x), T::V(y)) if x == y => Some(Subst::new()),
        (T::V(x), t) | (t, T::V(x)) => {
            let mut fv = BTreeSet::new();
            ftv(t, &mut fv);
            if fv.contains(x) {
                return None;
            }
            Some(Subst::from([(*x, t.clone())]))
        }
        (T::Int, T::Int) | (T::Bool, T::Bool) => Some(Subst::new()),
        (T::Fun(a1, b1), T::Fun(a2, b2)) | (T::Prod(a1, b1), T::Prod(a2, b2)) => {
            let s1 = mgu(a1, a2)?;
            let s2 = mgu(&apply(&s1, b1), &apply(&s1, b2))?;
            Some(compose(&s2, &s1))
        }
        (T::List(a1), T::List(a2)) => mgu(a1, a2),
        _ => None,
    }
}

struct W {
    next: u32,
    types: Vec<Option<T>>,
}

impl W {
    fn fresh(&mut self) -> T {
        self.next += 1;
        T::V(self.next - 1)
    }

    fn instantiate(&mut self, sc: &Scheme) -> T {
        let s: Subst = sc.vars.iter().map(|&v| (v, self.fresh())).collect();
        apply(&s, &sc.ty)
    }

    fn w(&mut self, env: &Env, e: &Expr) -> Option<(Subst, T)> {
        let mono = |t: T| Scheme {
            vars: vec![],
            ty: t,
        };
        let (s, t) = match &e.kind {
            ExprKind::Var(x) => {
                let sc = env.get(x)?.clone();
                (Subst::new(), self.instantiate(&sc))
            }
            ExprKind::Fun(x, body) => {
                let a = self.fresh();
                let mut env2 = env.clone();
                env2.insert(x.clone(), mono(a.clone()));
                let (s, tb) = self.w(&env2, body)?;
                let t = T::Fun(Box::new(apply(&s, &a)), Box::new(tb));
                (s, t)
            }
            ExprKind::App(f, x) => {
                let (s1, tf) = self.w(env, f)?;
                let (s2, tx) = self.w(&sub_env(&s1, env), x)?;
                let r = self.fresh();
                let s3 = mgu(&apply(&s2, &tf), &T::Fun(Box::new(tx), Box::new(r.clone())))?;
                let t = apply(&s3, &r);
                (compose(&s3, &compose(&s2, &s1)), t)
            }
            ExprKind::Let {
                rec,
                name,
                bound,
                body,
            } => {
                let (s1, t1) = if *rec {
                    let a = self.fresh();
                    let mut env2 = env.clone();
                    env2.insert(name.clone(), mono(a.clone()));
                    let (s1, t1) = self.w(&env2, bound)?;
                    let s2 = mgu(&apply(&s1, &a), &t1)?;
                    let s = compose(&s2, &s1);
                    let t = apply(&s, &t1);
                    (s, t)
                } else {
                    self.w(env, bound)?
                };
                let env1 = sub_env(&s1, env);
                let mut fv = BTreeSet::new();
                ftv(&t1, &mut fv);
                let bound_vars = env_ftv(&Subst::new(), &env1);
                let vars = fv.difference(&bound_vars).copied().collect();
                let mut env2 = env1;
                env2.insert(name.clone(), Scheme { vars, ty: t1 });
                let (s2, t2) = self.w(&env2, body)?;
                (compose(&s2, &s1), t2)
            }
            ExprKind::Int(_) => (Subst::new(), T::Int),
            ExprKind::Bool(_) => (Subst::new(), T::Bool),
            ExprKind::Nil => (Subst::new(), T::List(Box::new(self.fresh()))),
            ExprKind::Hole => (Subst::new(), self.fresh()),
            ExprKind::Plus(a, b) => {
                let (s1, ta) = self.w(env, a)?;
                let (s2, tb) = self.w(&sub_env(&s1, env), b)?;
                let s3 = mgu(&apply(&s2, &ta), &T::Int)?;
                let s4 = mgu(&apply(&s3, &tb), &T::Int)?;
                (compose(&s4, &compose(&s3, &compose(&s2, &s1))), T::Int)
            }
            ExprKind::If(c, a, b) => {
                let (s1, tc) = self.w(env, c)?;
                let s2 = mgu(&tc, &T::Bool)?;
                let s = compose(&s2, &s1);
                let (s3, ta) = self.w(&sub_env(&s, env), a)?;
                let s = compose(&s3, &s);
                let (s4, tb) = self.w(&sub_env(&s, env), b)?;
                let s = compose(&s4, &s);
                let s5 = mgu(&apply(&s, &ta), &tb)?;
                let t = apply(&s5, &tb);
                (compose(&s5, &s), t)
            }
            ExprKind::Pair(a, b) => {
                let (s1, ta) = self.w(env, a)?;
                let (s2, tb) = self.w(&sub_env(&s1, env), b)?;
                let t = T::Prod(Box::new(apply(&s2, &ta)), Box::new(tb));
                (compose(&s2, &s1), t)
            }
            ExprKind::PairCase {
                scrutinee,
                left,
                right,
                body,
            } => {
                let (s1, ts) = self.w(env, scrutinee)?;
                let (a, b) = (self.fresh(), self.fresh());
                let s2 = mgu(&ts, &T::Prod(Box::new(a.clone()), Box::new(b.clone())))?;
                let s = compose(&s2, &s1);
                let mut env2 = sub_env(&s, env);
                env2.insert(left.clone(), mono(apply(&s, &a)));
                env2.insert(right.clone(), mono(apply(&s, &b)));
                let (s3, tb) = self.w(&env2, body)?;
                (compose(&s3, &s), tb)
            }
            ExprKind::Cons(h, t) => {
                let (s1, th) = self.w(env, h)?;
                let (s2, tt) = self.w(&sub_env(&s1, env), t)?;
                let s3 = mgu(&tt, &T::List(Box::new(apply(&s2, &th))))?;
                let ty = apply(&s3, &tt);
                (compose(&s3, &compose(&s2, &s1)), ty)
            }
            ExprKind::ListCase {
                scrutinee,
                nil,
                head,
                tail,
                cons,
            } => {
                let (s1, ts) = self.w(env, scrutinee)?;
                let a = self.fresh();
                let s2 = mgu(&ts, &T::List(Box::new(a.clone())))?;
                let s = compose(&s2, &s1);
                let (s3, tn) = self.w(&sub_env(&s, env), nil)?;
                let s = compose(&s3, &s);
                let mut env2 = sub_env(&s, env);
                let elem = apply(&s, &a);
                env2.insert(head.clone(), mono(elem.clone()));
                env2.insert(tail.clone(), mono(T::List(Box::new(elem))));
                let (s4, tc) = self.w(&env2, cons)?;
                let s = compose(&s4, &s);
                let s5 = mgu(&apply(&s, &tn), &tc)?;
                let t = apply(&s5, &tc);
                (compose(&s5, &s), t)
            }
        };
        self.types[e.id] = Some(t.clone());
        Some((s, t))
    }
}

fn sub_env(s: &Subst, env: &Env) -> Env {
    env.iter()
        .map(|(x, sc)| {
            let mut s = s.clone();
            for v in &sc.vars {
                s.remove(v);
            }
            (
                x.clone(),
                Scheme {
                    vars: sc.vars.clone(),
                    ty: apply(&s, &sc.ty),
                },
            )
        })
        .collect()
}

/// Per-node types from algorithm W, or `None` when `p` is ill-typed.
pub fn algorithm_w(p: &Program) -> Option<Vec<T>> {
    let mut w = W {
        next: 0,
        types: vec![None; p.len()],
    };
    let (s, _) = w.w(&Env::new(), p.root())?;
    Some(
        w.types
            .iter()
            .map(|t| apply(&s, t.as_ref().expect("every node typed")))
            .collect(),
    )
}

pub fn from_core(t: &Type) -> T {
    match t {
        Type::Var(v) => T::V(v.0),
        Type::Int => T::Int,
        Type::Bool => T::Bool,
        Type::Fun(a, b) => T::Fun(Box::new(from_core(a)), Box::new(from_core(b))),
        Type::Prod(a, b) => T::Prod(Box::new(from_core(a)), Box::new(from_core(b))),
        Type::List(a) => T::List(Box::new(from_core(a))),
    }
}

/// Renders `t` with variables numbered by first occurrence, so two types
/// that differ only by renaming print the same.
pub fn canonical(t: &T) -> String {
    fn go(t: &T, names: &mut HashMap<u32, usize>, out: &mut String) {
        match t {
            T::V(v) => {
                let n = names.len();
                let k = *names.entry(*v).or_insert(n);
                out.push_str(&format!("'{k}"));
            }
            T::Int => out.push_str("int"),
            T::Bool => out.push_str("bool"),
            T::Fun(a, b) => {
                out.push('(');
                go(a, names, out);
                out.push_str(" -> ");
                go(b, names, out);
                out.push(')');
            }
            T::Prod(a, b) => {
                out.push('(');
                go(a, names, out);
                out.push_str(" * ");
                go(b, names, out);
                out.push(')');
            }
            T::List(a) => {
                out.push('[');
                go(a, names, out);
                out.push(']');
            }
        }
    }
    let mut out = String::new();
    go(t, &mut HashMap::new(), &mut out);
    out
}

// ---------------------------------------------------------------------------
// Small-step evaluator

#[derive(Debug, PartialEq)]
pub enum Outcome {
    Value(Expr),
    Stuck(Expr),
    OutOfFuel,
}

fn is_value(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Fun(..) | ExprKind::Nil => true,
        ExprKind::Pair(a, b) | ExprKind::Cons(a, b) => is_value(a) && is_value(b),
        _ => false,
    }
}

/// `e[x := v]` for a closed term `v`, so capture cannot happen.
fn subst(e: &Expr, x: &str, v: &Expr) -> Expr {
    let go = |e: &Expr| subst(e, x, v);
    match &e.kind {
        ExprKind::Var(y) if y == x => v.clone(),
        ExprKind::Var(_)
        | ExprKind::Int(_)
        | ExprKind::Bool(_)
        | ExprKind::Nil
        | ExprKind::Hole => e.clone(),
        ExprKind::Fun(y, body) => {
            if y == x {
                e.clone()
            } else {
                Expr::fun(y, go(body))
            }
        }
        ExprKind::App(f, a) => Expr::app(go(f), go(a)),
        ExprKind::Let {
            rec,
            name,
            bound,
            body,
        } => {
            let bound = if *rec && name == x {
                (**bound).clone()
            } else {
                go(bound)
            };
            let body = if name == x {
                (**body).clone()
            } else {
                go(body)
            };
            if *rec {
                Expr::let_rec(name, bound, body)
            } else {
                Expr::let_(name, bound, body)
            }
        }
        ExprKind::Plus(a, b) => Expr::plus(go(a), go(b)),
        ExprKind::If(c, a, b) => Expr::if_(go(c), go(a), go(b)),
        ExprKind::Pair(a, b) => Expr::pair(go(a), go(b)),
        ExprKind::Cons(a, b) => Expr::cons(go(a), go(b)),
        ExprKind::PairCase {
            scrutinee,
            left,
            right,
            body,
        } => {
            let body = if left == x || right == x {
                (**body).clone()
            } else {
                go(body)
            };
            Expr::pair_case(go(scrutinee), left, right, body)
        }
        ExprKind::ListCase {
            scrutinee,
            nil,
            head,
            tail,
            cons,
        } => {
            let cons = if head == x || tail == x {
                (**cons).clone()
            } else {
                go(cons)
            };
            Expr::list_case(go(scrutinee), go(nil), head, tail, cons)
        }
    }
}

enum Step {
    Next(Expr),
    Done,
    Stuck,
}

fn step(e: &Expr) -> Step {
    use Step::*;
    if is_value(e) {
        return Done;
    }
    // Reduces the first non-value among `parts`, rebuilding with `build`.
    fn congruence(parts: &[&Expr], build: impl Fn(Vec<Expr>) -> Expr) -> Option<Step> {
        let i = parts.iter().position(|p| !is_value(p))?;
        Some(match step(parts[i]) {
            Next(n) => {
                let mut v: Vec<Expr> = parts.iter().map(|p| (*p).clone()).collect();
                v[i] = n;
                Next(build(v))
            }
            other => other,
        })
    }
    match &e.kind {
        ExprKind::App(f, a) => {
            if let Some(s) = congruence(&[f, a], |v| Expr::app(v[0].clone(), v[1].clone())) {
                return s;
            }
            match &f.kind {
                ExprKind::Fun(x, body) => Next(subst(body, x, a)),
                _ => Stuck,
            }
        }
        ExprKind::Let {
            rec: false,
            name,
            bound,
            body,
        } => {
            if !is_value(bound) {
                return match step(bound) {
                    Next(b) => Next(Expr::let_(name, b, (**body).clone())),
                    other => other,
                };
            }
            Next(subst(body, name, bound))
        }
        ExprKind::Let {
            rec: true,
            name,
            bound,
            body,
        } => {
            if !matches!(bound.kind, ExprKind::Fun(..)) {
                return Stuck;
            }
            // `let rec f = v in e` ~> e[f := (let rec f = v in f)] once
            // `f` is needed; unrolling one level keeps substituted terms
            // closed values.
            let knot = Expr::let_rec(name, (**bound).clone(), Expr::var(name));
            let unrolled = match &bound.kind {
                ExprKind::Fun(x, b) if x != name => Expr::fun(x, subst(b, name, &knot)),
                _ => (**bound).clone(),
            };
            if matches!(&body.kind, ExprKind::Var(y) if y == name) {
                return Next(unrolled);
            }
            Next(subst(body, name, &unrolled))
        }
        ExprKind::Plus(a, b) => {
            if let Some(s) = congruence(&[a, b], |v| Expr::plus(v[0].clone(), v[1].clone())) {
                return s;
            }
            match (&a.kind, &b.kind) {
                (ExprKind::Int(x), ExprKind::Int(y)) => Next(Expr::int(x.wrapping_add(*y))),
                _ => Stuck,
            }
        }
        ExprKind::If(c, a, b) => {
            if !is_value(c) {
                return match step(c) {
                    Next(c) => Next(Expr::if_(c, (**a).clone(), (**b).clone())),
                    other => other,
                };
            }
            match c.kind {
                ExprKind::Bool(true) => Next((**a).clone()),
                ExprKind::Bool(false) => Next((**b).clone()),
                _ => Stuck,
            }
        }
        ExprKind::Pair(a, b) => {
            congruence(&[a, b], |v| Expr::pair(v[0].clone(), v[1].clone())).unwrap_or(Stuck)
        }
        ExprKind::Cons(a, b) => {
            congruence(&[a, b], |v| Expr::cons(v[0].clone(), v[1].clone())).unwrap_or(Stuck)
        }
        ExprKind::PairCase {
            scrutinee,
            left,
            right,
            body,
        } => {
            if !is_value(scrutinee) {
                return match step(scrutinee) {
                    Next(s) => Next(Expr::pair_case(s, left, right, (**body).clone())),
                    other => other,
                };
            }
            match &scrutinee.kind {
                ExprKind::Pair(a, b) => {
                    let body = subst(body, right, b);
                    // A right binder named like the left one shadows it.
                    Next(if left == right {
                        body
                    } else {
                        subst(&body, left, a)
                    })
                }
                _ => Stuck,
            }
        }
        ExprKind::ListCase {
            scrutinee,
            nil,
            head,
            tail,
            cons,
        } => {
            if !is_value(scrutinee) {
                return match step(scrutinee) {
                    Next(s) => Next(Expr::list_case(
                        s,
                        (**nil).clone(),
                        head,
                        tail,
                        (**cons).clone(),
                    )),
                    other => other,
                };
            }
            match &scrutinee.kind {
                ExprKind::Nil => Next((**nil).clone()),
                ExprKind::Cons(h, t) => {
                    let body = subst(cons, tail, t);
                    Next(if head == tail {
                        body
                    } else {
                        subst(&body, head, h)
                    })
                }
                _ => Stuck,
            }
        }
        _ => Stuck,
    }
}

pub fn evaluate(e: &Expr, fuel: usize) -> Outcome {
    let mut cur = e.clone();
    for _ in 0..fuel {
        match step(&cur) {
            Step::Next(n) => cur = n,
            Step::Done => return Outcome::Value(cur),
            Step::Stuck => return Outcome::Stuck(cur),
        }
    }
    Outcome::OutOfFuel
}

// ---------------------------------------------------------------------------
// Hole oracle for slices

/// Replaces every maximal subtree disjoint from `keep` with a hole. Returns
/// the new program and, for each old id, its new id if the node survives.
pub fn hole_outside(p: &Program, keep: &BTreeSet<NodeId>) -> (Program, Vec<Option<NodeId>>) {
    let roots: Vec<NodeId> = p
        .ids()
        .filter(|&id| !keep.contains(&id) && p.parent(id).is_none_or(|q| keep.contains(&q)))
        .collect();
    hole_roots(p, &roots)
}

/// Holes the subtrees rooted at `roots` (pairwise disjoint).
pub fn hole_roots(p: &Program, roots: &[NodeId]) -> (Program, Vec<Option<NodeId>>) {
    let mut sorted = roots.to_vec();
    sorted.sort_unstable();
    let mut q = p.clone();
    for &r in sorted.iter().rev() {
        q = q.replace_subtree(r, Expr::hole()).expect("valid id");
    }
    let mut map = vec![None; p.len()];
    let mut shift = 0;
    let mut skip_until = 0;
    for id in p.ids() {
        if id < skip_until {
            continue;
        }
        map[id] = Some(id - shift);
        if sorted.binary_search(&id).is_ok() {
            let size = p.subtree_size(id).unwrap();
            shift += size - 1;
            skip_until = id + size;
        }
    }
    (q, map)
}

fn has_key(p: &Program, key: ErrorKey) -> bool {
    errors_masked(p, &vec![false; p.len()])
        .iter()
        .any(|e| e.key() == key)
}

#[derive(Debug, Default)]
pub struct SliceVerdict {
    pub sufficient: bool,
    /// Members whose holing leaves the error in place.
    pub redundant: Vec<NodeId>,
}

/// Holes everything outside `nodes` and checks the error survives, then
/// holes each member in turn and checks it disappears.
pub fn check_slice(p: &Program, nodes: &BTreeSet<NodeId>, key: ErrorKey) -> SliceVerdict {
    let (sliced, map) = hole_outside(p, nodes);
    let remap =
        |k: ErrorKey, m: &[Option<NodeId>]| m[k.origin].map(|origin| ErrorKey { origin, ..k });
    let Some(sliced_key) = remap(key, &map) else {
        return SliceVerdict::default();
    };
    let sufficient = has_key(&sliced, sliced_key);
    let redundant = nodes
        .iter()
        .copied()
        .filter(|&n| {
            let (q, m2) = hole_roots(&sliced, &[map[n].expect("slice members survive")]);
            match remap(sliced_key, &m2) {
                Some(k) => has_key(&q, k),
                None => false,
            }
        })
        .collect();
    SliceVerdict {
        sufficient,
        redundant,
    }
}

// ---------------------------------------------------------------------------
// Numerics

/// Central differences of `f` around `p` with step `h`.
pub fn numeric_gradient(p: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut q = p.to_vec();
    (0..p.len())
        .map(|i| {
            q[i] = p[i] + h;
            let up = f(&q);
            q[i] = p[i] - h;
            let down = f(&q);
            q[i] = p[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// ‖a − b‖ / max(‖a‖, ‖b‖), or 0 when both vanish.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let scale = norm(a).max(norm(b));
    if scale == 0.0 {
        0.0
    } else {
        norm(&diff) / scale
    }
}

/// Two Gaussian blobs centred at ±(2, 2, …) with standard deviation 0.5.
pub fn blobs(n: usize, width: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<bool>) {
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    let noise = Normal::new(0.0, 0.5).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % 2 == 0;
        let c = if label { 2.0 } else { -2.0 };
        x.push((0..width).map(|_| c + noise.sample(&mut rng)).collect());
        y.push(label);
    }
    (x, y)
}

/// A random batch for gradient checks: `n` rows of width `d` in [-1, 1].
pub fn random_batch(n: usize, d: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<bool>) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let x = (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let y = (0..n).map(|_| rng.gen()).collect();
    (x, y)
}

// ---------------------------------------------------------------------------
// Worked example

const TABLE1_BAD: &str = "let rec sumList xs =\n  match xs with\n  | [] -> []\n  | hd :: tl -> hd + sumList tl\nin sumList";
const TABLE1_FIX: &str = "let rec sumList xs =\n  match xs with\n  | [] -> 0\n  | hd :: tl -> hd + sumList tl\nin sumList";

pub const TABLE1_COLUMNS: [&str; 6] = [
    "Is-[]",
    "Is-Case(List)-P",
    "Size",
    "Has-Type-Int-C1",
    "Has-Type-[·]",
    "In-Slice",
];

pub const TABLE1_ROWS: [(&str, [f64; 6]); 4] = [
    ("[]", [1.0, 1.0, 1.0, 0.0, 1.0, 1.0]),
    ("hd + sumList tl", [0.0, 1.0, 5.0, 1.0, 0.0, 1.0]),
    ("sumList tl", [0.0, 0.0, 3.0, 0.0, 1.0, 1.0]),
    ("tl", [0.0, 0.0, 1.0, 0.0, 1.0, 0.0]),
];

/// Extracts the worked sumList example and returns, per expected row, the
/// expression text, the expected values and the extracted values.
pub fn table1() -> Vec<(&'static str, [f64; 6], Vec<f64>)> {
    use nate_core::features::{extract, schema};
    use nate_core::labeler::{tree_diff, ProgramPair};
    use nate_core::slicer::minimal_slices;

    let pair = ProgramPair::parse(TABLE1_BAD, TABLE1_FIX, serde_json::Value::Null).unwrap();
    let slices = minimal_slices(&pair.bad).unwrap();
    let samples = extract(&pair, &slices, &tree_diff(&pair), false);
    let cols: Vec<usize> = TABLE1_COLUMNS
        .iter()
        .map(|c| schema().index_of(c).unwrap())
        .collect();
    TABLE1_ROWS
        .iter()
        .map(|&(text, expected)| {
            // The last match, so `[]` is the branch body rather than the pattern.
            let id = pair
                .bad
                .ids()
                .rfind(|&i| {
                    let s = pair.bad.span(i).unwrap();
                    &TABLE1_BAD[s.start..s.end] == text
                })
                .unwrap_or_else(|| panic!("no node for {text}"));
            let v = &samples.iter().find(|s| s.node == id).unwrap().vector;
            (text, expected, cols.iter().map(|&c| v[c]).collect())
        })
        .collect()
}
