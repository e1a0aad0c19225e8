//! Seeded synthetic corpus of (ill-typed, fixed) program pairs.
//!
//! Fixed programs are drawn type-directed, so they are well-typed by
//! construction: mostly recursive list functions, accumulator loops, small
//! helpers and pair manipulations, each followed by a use site. One
//! type-breaking mutation then produces the ill-typed half of the pair.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::labeler::{diff_programs, ProgramPair};
use crate::lang::{parse, pretty_expr, Expr, ExprKind, NodeId, Program};
use crate::typecheck::{infer_partial, Type};

pub const STANDARD_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub pairs: usize,
    /// Share of pairs whose ill-typed half is an unrelated program, so the
    /// diff touches most of it.
    pub rewrite_fraction: f64,
    pub min_nodes: usize,
    pub max_nodes: usize,
}

impl CorpusSpec {
    /// 2,000 single-mutation pairs of 15 to 60 nodes.
    pub fn standard() -> Self {
        CorpusSpec {
            pairs: 2000,
            rewrite_fraction: 0.0,
            min_nodes: 15,
            max_nodes: 60,
        }
    }
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mutation {
    /// A literal replaced by one of another type, e.g. `0` by `[]`.
    WrongLiteral,
    /// `+` turned into `::` or back.
    SwapPlusCons,
    /// An application replaced by its function.
    DropArgument,
    /// An expression `e` replaced by `[e]`.
    WrapInList,
    /// The whole program replaced by an unrelated ill-typed one.
    Rewrite,
}

impl Mutation {
    pub const CATALOG: [Mutation; 4] = [
        Mutation::WrongLiteral,
        Mutation::SwapPlusCons,
        Mutation::DropArgument,
        Mutation::WrapInList,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::WrongLiteral => "wrong-literal",
            Mutation::SwapPlusCons => "swap-plus-cons",
            Mutation::DropArgument => "drop-argument",
            Mutation::WrapInList => "wrap-in-list",
            Mutation::Rewrite => "rewrite",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone)]
enum Callee {
    /// An ordinary variable.
    Plain,
    /// The recursive function itself; argument `index` is fixed to the
    /// tail variable so that generated recursion is structural.
    Recursive { index: usize, tail: String },
}

#[derive(Clone)]
struct Binding {
    name: String,
    ty: Type,
    callee: Callee,
}

type Env = Vec<Binding>;

fn bind(env: &Env, name: &str, ty: Type) -> Env {
    let mut env = env.clone();
    env.push(Binding {
        name: name.to_string(),
        ty,
        callee: Callee::Plain,
    });
    env
}

/// Argument types and final result of a curried function type.
fn uncurry(t: &Type) -> (Vec<Type>, Type) {
    let mut args = Vec::new();
    let mut t = t.clone();
    while let Type::Fun(a, b) = t {
        args.push(*a);
        t = *b;
    }
    (args, t)
}

fn curry(args: &[Type], result: Type) -> Type {
    args.iter()
        .rev()
        .fold(result, |acc, a| Type::fun(a.clone(), acc))
}

enum Choice {
    Var(usize),
    Call(usize),
    IntLit,
    Plus,
    BoolLit,
    Nil,
    Cons,
    ListLit,
    Pair,
    Lambda,
    If,
    Let,
    ListMatch(usize),
    PairMatch(usize),
}

/// Type-directed expression generator.
pub struct Gen<'r> {
    rng: &'r mut ChaCha8Rng,
    counter: usize,
}

const INT_NAMES: [&str; 6] = ["n", "x", "y", "k", "m", "i"];
const LIST_NAMES: [&str; 4] = ["xs", "ys", "l", "lst"];
const FN_NAMES: [&str; 12] = [
    "sumList", "total", "count", "double", "incAll", "append", "go", "loop", "digits", "collect",
    "walk", "build",
];
const HELPER_NAMES: [&str; 5] = ["helper", "step", "g", "bump", "pick"];

impl<'r> Gen<'r> {
    pub fn new(rng: &'r mut ChaCha8Rng) -> Self {
        Gen { rng, counter: 0 }
    }

    fn name(&mut self, pool: &[&str]) -> String {
        self.counter += 1;
        let base = pool.choose(self.rng).unwrap();
        format!("{base}{}", self.counter)
    }

    fn pick_weighted<T>(&mut self, mut options: Vec<(f64, T)>) -> T {
        let total: f64 = options.iter().map(|(w, _)| w).sum();
        let mut x = self.rng.gen_range(0.0..total);
        let last = options.len() - 1;
        for (i, (w, _)) in options.iter().enumerate() {
            if x < *w || i == last {
                return options.swap_remove(i).1;
            }
            x -= w;
        }
        unreachable!()
    }

    fn small_type(&mut self) -> Type {
        self.pick_weighted(vec![
            (4.0, Type::Int),
            (1.5, Type::Bool),
            (2.5, Type::list(Type::Int)),
            (0.7, Type::prod(Type::Int, Type::Int)),
            (0.5, Type::list(Type::Bool)),
            (0.4, Type::prod(Type::Int, Type::Bool)),
        ])
    }

    /// An expression of type `ty` under `env`. `depth` bounds nesting.
    fn expr(&mut self, ty: &Type, env: &Env, depth: usize) -> Expr {
        let mut options: Vec<(f64, Choice)> = Vec::new();
        for (i, b) in env.iter().enumerate() {
            if b.ty == *ty {
                options.push((3.0, Choice::Var(i)));
            }
            let (args, result) = uncurry(&b.ty);
            if depth > 0 && !args.is_empty() && result == *ty {
                let w = if matches!(b.callee, Callee::Recursive { .. }) {
                    8.0
                } else {
                    2.5
                };
                options.push((w, Choice::Call(i)));
            }
            if depth > 0 && matches!(b.ty, Type::List(_)) {
                options.push((0.4, Choice::ListMatch(i)));
            }
            if depth > 0 && matches!(b.ty, Type::Prod(..)) {
                options.push((0.8, Choice::PairMatch(i)));
            }
        }
        match ty {
            Type::Int => {
                options.push((2.0, Choice::IntLit));
                if depth > 0 {
                    options.push((2.0, Choice::Plus));
                }
            }
            Type::Bool => options.push((2.0, Choice::BoolLit)),
            Type::List(_) => {
                options.push((1.5, Choice::Nil));
                if depth > 0 {
                    options.push((2.0, Choice::Cons));
                    options.push((0.8, Choice::ListLit));
                }
            }
            Type::Prod(..) => options.push((3.0, Choice::Pair)),
            Type::Fun(..) => options.push((3.0, Choice::Lambda)),
            Type::Var(_) => options.push((1.0, Choice::IntLit)),
        }
        if depth > 1 {
            options.push((0.3, Choice::If));
            options.push((0.4, Choice::Let));
        }
        let choice = self.pick_weighted(options);
        let d = depth.saturating_sub(1);
        match choice {
            Choice::Var(i) => Expr::var(&env[i].name),
            Choice::Call(i) => self.call(&env[i], env, d),
            Choice::IntLit => Expr::int(self.rng.gen_range(0..10)),
            Choice::BoolLit => Expr::bool(self.rng.gen()),
            Choice::Plus => {
                let a = self.expr(&Type::Int, env, d);
                let b = self.expr(&Type::Int, env, d);
                Expr::plus(a, b)
            }
            Choice::Nil => Expr::nil(),
            Choice::Cons => {
                let Type::List(elem) = ty else { unreachable!() };
                let h = self.expr(elem, env, d);
                let t = self.expr(ty, env, d);
                Expr::cons(h, t)
            }
            Choice::ListLit => {
                let Type::List(elem) = ty else { unreachable!() };
                let n = self.rng.gen_range(1..=3);
                let items: Vec<Expr> = (0..n).map(|_| self.expr(elem, env, 0)).collect();
                items
                    .into_iter()
                    .rev()
                    .fold(Expr::nil(), |acc, x| Expr::cons(x, acc))
            }
            Choice::Pair => {
                let Type::Prod(a, b) = ty else { unreachable!() };
                let x = self.expr(a, env, d);
                let y = self.expr(b, env, d);
                Expr::pair(x, y)
            }
            Choice::Lambda => {
                let Type::Fun(a, b) = ty else { unreachable!() };
                let x = self.name(&INT_NAMES);
                let body = self.expr(b, &bind(env, &x, (**a).clone()), d);
                Expr::fun(&x, body)
            }
            Choice::If => {
                let c = self.expr(&Type::Bool, env, d);
                let t = self.expr(ty, env, d);
                let f = self.expr(ty, env, d);
                Expr::if_(c, t, f)
            }
            Choice::Let => {
                let t = self.small_type();
                let x = self.name(&INT_NAMES);
                let bound = self.expr(&t, env, d);
                let body = self.expr(ty, &bind(env, &x, t), d);
                Expr::let_(&x, bound, body)
            }
            Choice::ListMatch(i) => {
                let Type::List(elem) = &env[i].ty else {
                    unreachable!()
                };
                let h = self.name(&["h", "hd", "a"]);
                let t = self.name(&["t", "tl", "rest"]);
                let nil = self.expr(ty, env, d);
                let inner = bind(&bind(env, &h, (**elem).clone()), &t, env[i].ty.clone());
                let cons = self.expr(ty, &inner, d);
                Expr::list_case(Expr::var(&env[i].name), nil, &h, &t, cons)
            }
            Choice::PairMatch(i) => {
                let Type::Prod(a, b) = &env[i].ty else {
                    unreachable!()
                };
                let x = self.name(&["a", "p", "u"]);
                let y = self.name(&["b", "q", "v"]);
                let inner = bind(&bind(env, &x, (**a).clone()), &y, (**b).clone());
                let body = self.expr(ty, &inner, d);
                Expr::pair_case(Expr::var(&env[i].name), &x, &y, body)
            }
        }
    }

    fn call(&mut self, b: &Binding, env: &Env, depth: usize) -> Expr {
        let (args, _) = uncurry(&b.ty);
        let mut e = Expr::var(&b.name);
        for (k, a) in args.iter().enumerate() {
            let arg = match &b.callee {
                Callee::Recursive { index, tail } if *index == k => Expr::var(tail),
                _ => self.expr(a, env, depth.min(1)),
            };
            e = Expr::app(e, arg);
        }
        e
    }

    fn list_literal(&mut self, elem: &Type) -> Expr {
        let n = self.rng.gen_range(0..=4);
        let items: Vec<Expr> = (0..n).map(|_| self.expr(elem, &Vec::new(), 0)).collect();
        items
            .into_iter()
            .rev()
            .fold(Expr::nil(), |acc, x| Expr::cons(x, acc))
    }

    fn result_type(&mut self, elem: &Type) -> Type {
        let elem = elem.clone();
        self.pick_weighted(vec![
            (4.0, Type::Int),
            (3.0, Type::list(elem.clone())),
            (1.0, Type::list(Type::Int)),
            (0.8, Type::Bool),
            (0.6, Type::prod(Type::Int, Type::Int)),
        ])
    }

    /// `let rec f xs = match xs with [] -> .. | h :: t -> ..`, optionally with
    /// extra leading parameters threaded through the recursion.
    fn recursive_list_fn(&mut self, env: &Env, extra: usize) -> (String, Expr, Type) {
        let elem = if self.rng.gen_bool(0.8) {
            Type::Int
        } else {
            Type::Bool
        };
        let result = self.result_type(&elem);
        let f = self.name(&FN_NAMES);
        let params: Vec<(String, Type)> = (0..extra)
            .map(|_| {
                let t = if self.rng.gen_bool(0.7) {
                    result.clone()
                } else {
                    self.small_type()
                };
                (self.name(&["acc", "n", "z"]), t)
            })
            .collect();
        let xs = self.name(&LIST_NAMES);
        let h = self.name(&["h", "hd", "x"]);
        let t = self.name(&["t", "tl", "rest"]);
        let list = Type::list(elem.clone());
        let mut arg_types: Vec<Type> = params.iter().map(|(_, t)| t.clone()).collect();
        arg_types.push(list.clone());
        let f_ty = curry(&arg_types, result.clone());

        let mut outer = env.clone();
        for (x, ty) in &params {
            outer = bind(&outer, x, ty.clone());
        }
        let nil_env = bind(&outer, &xs, list.clone());
        let nil = self.expr(&result, &nil_env, 1);
        let mut cons_env = bind(&bind(&nil_env, &h, elem.clone()), &t, list.clone());
        cons_env.push(Binding {
            name: f.clone(),
            ty: f_ty.clone(),
            callee: Callee::Recursive {
                index: extra,
                tail: t.clone(),
            },
        });
        let cons = self.expr(&result, &cons_env, 3);
        let body = Expr::list_case(Expr::var(&xs), nil, &h, &t, cons);
        let mut bound = Expr::fun(&xs, body);
        for (x, _) in params.iter().rev() {
            bound = Expr::fun(x, bound);
        }
        (f, bound, f_ty)
    }

    /// Use site applying `f` to generated arguments.
    fn use_site(&mut self, f: &str, f_ty: &Type, env: &Env) -> Expr {
        let (args, _) = uncurry(f_ty);
        let mut e = Expr::var(f);
        for a in &args {
            let arg = match a {
                Type::List(elem) if self.rng.gen_bool(0.7) => self.list_literal(elem),
                _ => self.expr(a, env, 1),
            };
            e = Expr::app(e, arg);
        }
        e
    }

    /// A closed well-typed program.
    pub fn program(&mut self) -> Expr {
        let shape = self.rng.gen_range(0..100);
        let empty: Env = Vec::new();
        match shape {
            0..=44 => {
                let (f, bound, ty) = self.recursive_list_fn(&empty, 0);
                let body = self.use_site(&f, &ty, &empty);
                Expr::let_rec(&f, bound, body)
            }
            45..=59 => {
                let (f, bound, ty) = self.recursive_list_fn(&empty, 1);
                let body = self.use_site(&f, &ty, &empty);
                Expr::let_rec(&f, bound, body)
            }
            60..=74 => {
                let g = self.name(&HELPER_NAMES);
                let a = self.small_type();
                let r = self.small_type();
                let x = self.name(&INT_NAMES);
                let helper = self.expr(&r, &bind(&empty, &x, a.clone()), 2);
                let env = bind(&empty, &g, Type::fun(a, r));
                let (f, bound, ty) = self.recursive_list_fn(&env, 0);
                let body = self.use_site(&f, &ty, &env);
                Expr::let_(&g, Expr::fun(&x, helper), Expr::let_rec(&f, bound, body))
            }
            75..=84 => {
                let f = self.name(&["swap", "fst", "combine", "mix"]);
                let a = self.pick_weighted(vec![
                    (3.0, Type::Int),
                    (1.0, Type::Bool),
                    (1.0, Type::list(Type::Int)),
                ]);
                let b = self.pick_weighted(vec![
                    (3.0, Type::Int),
                    (1.0, Type::Bool),
                    (1.0, Type::list(Type::Int)),
                ]);
                let r = self.small_type();
                let p = self.name(&["p", "pr"]);
                let pty = Type::prod(a.clone(), b.clone());
                let x = self.name(&["a", "l"]);
                let y = self.name(&["b", "r"]);
                let inner = bind(&bind(&empty, &x, a), &y, b);
                let body = self.expr(&r, &inner, 3);
                let bound = Expr::fun(&p, Expr::pair_case(Expr::var(&p), &x, &y, body));
                let f_ty = Type::fun(pty, r);
                let use_site = self.use_site(&f, &f_ty, &empty);
                Expr::let_(&f, bound, use_site)
            }
            _ => {
                let t1 = self.small_type();
                let t2 = self.small_type();
                let x = self.name(&INT_NAMES);
                let bound = self.expr(&t1, &empty, 3);
                let body = self.expr(&t2, &bind(&empty, &x, t1), 3);
                Expr::let_(&x, bound, body)
            }
        }
    }
}

/// Pretty-prints and reparses, so the program carries real source and spans.
pub fn to_program(e: &Expr) -> Program {
    let src = pretty_expr(e);
    parse(&src).unwrap_or_else(|err| panic!("printer produced unparsable source {src:?}: {err}"))
}

/// A well-typed program with a node count in `[min, max]`.
pub fn well_typed_program(rng: &mut ChaCha8Rng, min: usize, max: usize) -> Program {
    loop {
        let e = Gen::new(rng).program();
        let n = e.size();
        if n < min || n > max {
            continue;
        }
        let p = to_program(&e);
        if infer_partial(&p).well_typed {
            return p;
        }
    }
}

fn wrong_literal(e: &Expr, rng: &mut ChaCha8Rng) -> Option<Expr> {
    let n = rng.gen_range(0..10);
    let options = match e.kind {
        ExprKind::Int(_) => vec![Expr::nil(), Expr::bool(rng.gen())],
        ExprKind::Bool(_) => vec![Expr::int(n), Expr::nil()],
        ExprKind::Nil => vec![Expr::int(n), Expr::bool(rng.gen())],
        _ => return None,
    };
    options.choose(rng).cloned()
}

/// The replacement `m` makes at `e`, if `m` applies there.
fn mutation_at(m: Mutation, e: &Expr, rng: &mut ChaCha8Rng) -> Option<Expr> {
    match (m, &e.kind) {
        (Mutation::WrongLiteral, _) => wrong_literal(e, rng),
        (Mutation::SwapPlusCons, ExprKind::Plus(a, b)) => {
            Some(Expr::cons((**a).clone(), (**b).clone()))
        }
        (Mutation::SwapPlusCons, ExprKind::Cons(a, b)) => {
            Some(Expr::plus((**a).clone(), (**b).clone()))
        }
        (Mutation::DropArgument, ExprKind::App(f, _)) => Some((**f).clone()),
        (
            Mutation::WrapInList,
            ExprKind::Var(_) | ExprKind::App(..) | ExprKind::Plus(..) | ExprKind::Int(_),
        ) => Some(Expr::cons(e.clone(), Expr::nil())),
        _ => None,
    }
}

/// Applies one mutation from the catalog, returning the ill-typed program,
/// the mutation and the id of the mutated position.
pub fn mutate(fix: &Program, rng: &mut ChaCha8Rng) -> Option<(Program, Mutation, NodeId)> {
    let mut sites: Vec<(Mutation, NodeId)> = Vec::new();
    for m in Mutation::CATALOG {
        for id in fix.ids() {
            let e = fix.node(id).ok()?;
            let applies = match (m, &e.kind) {
                (Mutation::WrongLiteral, ExprKind::Int(_) | ExprKind::Bool(_) | ExprKind::Nil) => {
                    true
                }
                (Mutation::SwapPlusCons, ExprKind::Plus(..) | ExprKind::Cons(..)) => true,
                (Mutation::DropArgument, ExprKind::App(..)) => true,
                (
                    Mutation::WrapInList,
                    ExprKind::Var(_) | ExprKind::App(..) | ExprKind::Plus(..) | ExprKind::Int(_),
                ) => id != 0,
                _ => false,
            };
            if applies {
                sites.push((m, id));
            }
        }
    }
    // Pick a mutation kind first so that rarer kinds are not swamped.
    for _ in 0..12 {
        let kinds: Vec<Mutation> = Mutation::CATALOG
            .into_iter()
            .filter(|m| sites.iter().any(|(k, _)| k == m))
            .collect();
        let m = *kinds.choose(rng)?;
        let candidates: Vec<NodeId> = sites
            .iter()
            .filter(|(k, _)| *k == m)
            .map(|(_, id)| *id)
            .collect();
        let id = *candidates.choose(rng)?;
        let replacement = mutation_at(m, fix.node(id).ok()?, rng)?;
        let bad = to_program(fix.replace_subtree(id, replacement).ok()?.root());
        if !infer_partial(&bad).well_typed {
            return Some((bad, m, id));
        }
    }
    None
}

/// One (bad, fix) pair with a single catalog mutation.
pub fn mutation_pair(rng: &mut ChaCha8Rng, spec: &CorpusSpec) -> (ProgramPair, Mutation, NodeId) {
    loop {
        let fix = well_typed_program(rng, spec.min_nodes, spec.max_nodes);
        if let Some((bad, m, id)) = mutate(&fix, rng) {
            let meta = serde_json::json!({"mutation": m.name(), "node": id});
            let pair =
                ProgramPair::new(bad, fix, meta).expect("mutation preserves pair invariants");
            return (pair, m, id);
        }
    }
}

fn rewrite_pair(rng: &mut ChaCha8Rng, spec: &CorpusSpec) -> ProgramPair {
    loop {
        let fix = well_typed_program(rng, spec.min_nodes, spec.max_nodes);
        let (other, _, _) = mutation_pair(rng, spec);
        let bad = other.bad;
        if diff_programs(&bad, &fix).diff_fraction > 0.4 {
            let meta = serde_json::json!({"mutation": Mutation::Rewrite.name()});
            return ProgramPair::new(bad, fix, meta).expect("rewrite preserves pair invariants");
        }
    }
}

/// Deterministic corpus: the same spec and seed give the same pairs in the
/// same order, whatever the thread count.
pub fn generate_corpus(spec: &CorpusSpec, seed: u64) -> Vec<ProgramPair> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let jobs: Vec<(u64, bool)> = (0..spec.pairs)
        .map(|_| {
            (
                master.gen(),
                master.gen_bool(spec.rewrite_fraction.clamp(0.0, 1.0)),
            )
        })
        .collect();
    jobs.into_par_iter()
        .enumerate()
        .map(|(i, (s, rewrite))| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut pair = if rewrite {
                rewrite_pair(&mut rng, spec)
            } else {
                mutation_pair(&mut rng, spec).0
            };
            if let serde_json::Value::Object(map) = &mut pair.meta {
                map.insert("index".into(), i.into());
            }
            pair
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditShape {
    /// A node replaced wholesale by a node of another class.
    Replace,
    /// A node wrapped by a new operator in the fix.
    Wrap,
}

/// A single untyped edit for checking the tree diff: returns (bad, fix,
/// shape, id of the edited node in bad).
pub fn single_edit_pair(rng: &mut ChaCha8Rng) -> (Program, Program, EditShape, NodeId) {
    loop {
        let bad = well_typed_program(rng, 8, 40);
        let id = rng.gen_range(0..bad.len());
        let target = bad.node(id).unwrap().clone();
        let shape = if rng.gen_bool(0.5) {
            EditShape::Replace
        } else {
            EditShape::Wrap
        };
        let mut g = Gen::new(rng);
        let env: Env = Vec::new();
        let replacement = match shape {
            EditShape::Replace => {
                let ty = g.small_type();
                let e = g.expr(&ty, &env, 2);
                if e.class() == target.class() {
                    continue;
                }
                // Skip replacements that also read as deleting a wrapper
                // elsewhere, e.g. `x :: []` becoming `[]` in `y :: x :: []`.
                let fix = bad.replace_subtree(id, e.clone()).unwrap();
                let ambiguous = bad.ids().any(|j| {
                    j != id
                        && bad.node(j).unwrap().children().into_iter().any(|c| {
                            bad.replace_subtree(j, c.clone()).unwrap().root() == fix.root()
                        })
                });
                if ambiguous {
                    continue;
                }
                e
            }
            EditShape::Wrap => {
                let other = g.expr(&Type::Int, &env, 1);
                let choice = g.rng.gen_range(0..5);
                let wrap = |t: &Expr| match choice {
                    0 => Expr::plus(t.clone(), other.clone()),
                    1 => Expr::plus(other.clone(), t.clone()),
                    2 => Expr::app(Expr::var("f"), t.clone()),
                    3 => Expr::cons(t.clone(), Expr::nil()),
                    _ => Expr::pair(t.clone(), other.clone()),
                };
                // Skip edits that the same wrapper at another node also
                // produces, e.g. `x :: []` inside `y :: x :: []`: the pair
                // alone cannot tell which node was wrapped.
                let fix = bad.replace_subtree(id, wrap(&target)).unwrap();
                let ambiguous = bad.ids().any(|j| {
                    j != id
                        && bad
                            .replace_subtree(j, wrap(bad.node(j).unwrap()))
                            .unwrap()
                            .root()
                            == fix.root()
                });
                if ambiguous {
                    continue;
                }
                wrap(&target)
            }
        };
        let fix = bad.replace_subtree(id, replacement).unwrap();
        let fix = to_program(fix.root());
        return (bad, fix, shape, id);
    }
}
