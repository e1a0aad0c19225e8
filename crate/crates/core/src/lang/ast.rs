//! Abstract syntax of λML and the [`Program`] wrapper that owns node identity.

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

/// Dense pre-order index of a node within one [`Program`].
pub type NodeId = usize;

/// Half-open byte range into the program source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
            || (self.start == self.end && other.contains(self))
            || (other.start == other.end && self.contains(other))
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// The fourteen syntactic classes of λML, in schema order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SyntaxClass {
    Var,
    Fun,
    App,
    Let,
    Int,
    Plus,
    Bool,
    If,
    Pair,
    PairCase,
    Nil,
    Cons,
    ListCase,
    Hole,
}

impl SyntaxClass {
    pub const ALL: [SyntaxClass; 14] = [
        SyntaxClass::Var,
        SyntaxClass::Fun,
        SyntaxClass::App,
        SyntaxClass::Let,
        SyntaxClass::Int,
        SyntaxClass::Plus,
        SyntaxClass::Bool,
        SyntaxClass::If,
        SyntaxClass::Pair,
        SyntaxClass::PairCase,
        SyntaxClass::Nil,
        SyntaxClass::Cons,
        SyntaxClass::ListCase,
        SyntaxClass::Hole,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Short label used in feature names (`Is-[]`, `Is-Case(List)`, ...).
    pub fn label(self) -> &'static str {
        match self {
            SyntaxClass::Var => "Var",
            SyntaxClass::Fun => "Fun",
            SyntaxClass::App => "App",
            SyntaxClass::Let => "Let",
            SyntaxClass::Int => "Int",
            SyntaxClass::Plus => "+",
            SyntaxClass::Bool => "Bool",
            SyntaxClass::If => "If",
            SyntaxClass::Pair => "Pair",
            SyntaxClass::PairCase => "Case(Pair)",
            SyntaxClass::Nil => "[]",
            SyntaxClass::Cons => "::",
            SyntaxClass::ListCase => "Case(List)",
            SyntaxClass::Hole => "Hole",
        }
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Var(String),
    Fun(String, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Let {
        rec: bool,
        name: String,
        bound: Box<Expr>,
        body: Box<Expr>,
    },
    Int(i64),
    Plus(Box<Expr>, Box<Expr>),
    Bool(bool),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    PairCase {
        scrutinee: Box<Expr>,
        left: String,
        right: String,
        body: Box<Expr>,
    },
    Nil,
    Cons(Box<Expr>, Box<Expr>),
    ListCase {
        scrutinee: Box<Expr>,
        nil: Box<Expr>,
        head: String,
        tail: String,
        cons: Box<Expr>,
    },
    Hole,
}

/// An AST node.
///
/// Equality and hashing are structural: `id` and `span` are ignored, so two
/// parses of differently formatted sources compare equal.
#[derive(Debug, Clone)]
pub struct Expr {
    pub id: NodeId,
    pub span: Span,
    pub kind: ExprKind,
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            id: 0,
            span: Span::default(),
            kind,
        }
    }

    pub fn with_span(kind: ExprKind, span: Span) -> Self {
        Expr { id: 0, span, kind }
    }

    pub fn class(&self) -> SyntaxClass {
        match &self.kind {
            ExprKind::Var(_) => SyntaxClass::Var,
            ExprKind::Fun(..) => SyntaxClass::Fun,
            ExprKind::App(..) => SyntaxClass::App,
            ExprKind::Let { .. } => SyntaxClass::Let,
            ExprKind::Int(_) => SyntaxClass::Int,
            ExprKind::Plus(..) => SyntaxClass::Plus,
            ExprKind::Bool(_) => SyntaxClass::Bool,
            ExprKind::If(..) => SyntaxClass::If,
            ExprKind::Pair(..) => SyntaxClass::Pair,
            ExprKind::PairCase { .. } => SyntaxClass::PairCase,
            ExprKind::Nil => SyntaxClass::Nil,
            ExprKind::Cons(..) => SyntaxClass::Cons,
            ExprKind::ListCase { .. } => SyntaxClass::ListCase,
            ExprKind::Hole => SyntaxClass::Hole,
        }
    }

    /// Children in left-to-right source order.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Var(_)
            | ExprKind::Int(_)
            | ExprKind::Bool(_)
            | ExprKind::Nil
            | ExprKind::Hole => vec![],
            ExprKind::Fun(_, body) => vec![body],
            ExprKind::App(a, b)
            | ExprKind::Plus(a, b)
            | ExprKind::Pair(a, b)
            | ExprKind::Cons(a, b) => vec![a, b],
            ExprKind::Let { bound, body, .. } => vec![bound, body],
            ExprKind::If(c, t, e) => vec![c, t, e],
            ExprKind::PairCase {
                scrutinee, body, ..
            } => vec![scrutinee, body],
            ExprKind::ListCase {
                scrutinee,
                nil,
                cons,
                ..
            } => vec![scrutinee, nil, cons],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Expr> {
        match &mut self.kind {
            ExprKind::Var(_)
            | ExprKind::Int(_)
            | ExprKind::Bool(_)
            | ExprKind::Nil
            | ExprKind::Hole => vec![],
            ExprKind::Fun(_, body) => vec![body],
            ExprKind::App(a, b)
            | ExprKind::Plus(a, b)
            | ExprKind::Pair(a, b)
            | ExprKind::Cons(a, b) => vec![a, b],
            ExprKind::Let { bound, body, .. } => vec![bound, body],
            ExprKind::If(c, t, e) => vec![c, t, e],
            ExprKind::PairCase {
                scrutinee, body, ..
            } => vec![scrutinee, body],
            ExprKind::ListCase {
                scrutinee,
                nil,
                cons,
                ..
            } => vec![scrutinee, nil, cons],
        }
    }

    /// Number of nodes in this subtree, including itself.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Visits the subtree in pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for child in self.children() {
            child.walk(f);
        }
    }

    fn renumber(&mut self, next: &mut NodeId) {
        self.id = *next;
        *next += 1;
        for child in self.children_mut() {
            child.renumber(next);
        }
    }

    /// Hashes the node's own label (class plus names/literals), not its children.
    pub(crate) fn hash_label<H: Hasher>(&self, state: &mut H) {
        self.class().hash(state);
        match &self.kind {
            ExprKind::Var(x) | ExprKind::Fun(x, _) => x.hash(state),
            ExprKind::Let { rec, name, .. } => {
                rec.hash(state);
                name.hash(state);
            }
            ExprKind::Int(n) => n.hash(state),
            ExprKind::Bool(b) => b.hash(state),
            ExprKind::PairCase { left, right, .. } => {
                left.hash(state);
                right.hash(state);
            }
            ExprKind::ListCase { head, tail, .. } => {
                head.hash(state);
                tail.hash(state);
            }
            _ => {}
        }
    }

    /// True when both nodes have the same class and the same names/literals,
    /// regardless of children.
    pub fn same_label(&self, other: &Expr) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Var(a), ExprKind::Var(b)) => a == b,
            (ExprKind::Fun(a, _), ExprKind::Fun(b, _)) => a == b,
            (
                ExprKind::Let { rec, name, .. },
                ExprKind::Let {
                    rec: rec2,
                    name: name2,
                    ..
                },
            ) => rec == rec2 && name == name2,
            (ExprKind::Int(a), ExprKind::Int(b)) => a == b,
            (ExprKind::Bool(a), ExprKind::Bool(b)) => a == b,
            (
                ExprKind::PairCase { left, right, .. },
                ExprKind::PairCase {
                    left: l2,
                    right: r2,
                    ..
                },
            ) => left == l2 && right == r2,
            (
                ExprKind::ListCase { head, tail, .. },
                ExprKind::ListCase {
                    head: h2, tail: t2, ..
                },
            ) => head == h2 && tail == t2,
            _ => self.class() == other.class(),
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.same_label(other)
            && self
                .children()
                .iter()
                .zip(other.children())
                .all(|(a, b)| *a == b)
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.hash_label(state);
        for child in self.children() {
            child.hash(state);
        }
    }
}

// Convenience constructors used by tests, the generator and the mutators.
impl Expr {
    pub fn var(x: &str) -> Expr {
        Expr::new(ExprKind::Var(x.to_string()))
    }
    pub fn fun(x: &str, body: Expr) -> Expr {
        Expr::new(ExprKind::Fun(x.to_string(), Box::new(body)))
    }
    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::new(ExprKind::App(Box::new(f), Box::new(a)))
    }
    pub fn let_(name: &str, bound: Expr, body: Expr) -> Expr {
        Expr::new(ExprKind::Let {
            rec: false,
            name: name.to_string(),
            bound: Box::new(bound),
            body: Box::new(body),
        })
    }
    pub fn let_rec(name: &str, bound: Expr, body: Expr) -> Expr {
        Expr::new(ExprKind::Let {
            rec: true,
            name: name.to_string(),
            bound: Box::new(bound),
            body: Box::new(body),
        })
    }
    pub fn int(n: i64) -> Expr {
        Expr::new(ExprKind::Int(n))
    }
    pub fn plus(a: Expr, b: Expr) -> Expr {
        Expr::new(ExprKind::Plus(Box::new(a), Box::new(b)))
    }
    pub fn bool(b: bool) -> Expr {
        Expr::new(ExprKind::Bool(b))
    }
    pub fn if_(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::new(ExprKind::If(Box::new(c), Box::new(t), Box::new(e)))
    }
    pub fn pair(a: Expr, b: Expr) -> Expr {
        Expr::new(ExprKind::Pair(Box::new(a), Box::new(b)))
    }
    pub fn pair_case(scrutinee: Expr, left: &str, right: &str, body: Expr) -> Expr {
        Expr::new(ExprKind::PairCase {
            scrutinee: Box::new(scrutinee),
            left: left.to_string(),
            right: right.to_string(),
            body: Box::new(body),
        })
    }
    pub fn nil() -> Expr {
        Expr::new(ExprKind::Nil)
    }
    pub fn cons(h: Expr, t: Expr) -> Expr {
        Expr::new(ExprKind::Cons(Box::new(h), Box::new(t)))
    }
    pub fn list_case(scrutinee: Expr, nil: Expr, head: &str, tail: &str, cons: Expr) -> Expr {
        Expr::new(ExprKind::ListCase {
            scrutinee: Box::new(scrutinee),
            nil: Box::new(nil),
            head: head.to_string(),
            tail: tail.to_string(),
            cons: Box::new(cons),
        })
    }
    pub fn hole() -> Expr {
        Expr::new(ExprKind::Hole)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NodeError {
    #[error("no node with id {0}")]
    UnknownNode(NodeId),
}

#[derive(Debug, Clone)]
struct NodeInfo {
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    span: Span,
    size: usize,
    depth: usize,
    class: SyntaxClass,
}

/// A numbered λML program together with the text it came from.
///
/// Construction renumbers the tree so that every node id equals its
/// pre-order index, and builds a flat navigation index.
#[derive(Debug, Clone)]
pub struct Program {
    root: Expr,
    source: String,
    index: Vec<NodeInfo>,
}

impl Program {
    pub fn new(mut root: Expr, source: impl Into<String>) -> Self {
        let mut next = 0;
        root.renumber(&mut next);
        let mut index = Vec::with_capacity(next);
        build_index(&root, None, 0, &mut index);
        Program {
            root,
            source: source.into(),
            index,
        }
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn into_root(self) -> Expr {
        self.root
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn ids(&self) -> std::ops::Range<NodeId> {
        0..self.index.len()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id < self.index.len()
    }

    fn info(&self, id: NodeId) -> Result<&NodeInfo, NodeError> {
        self.index.get(id).ok_or(NodeError::UnknownNode(id))
    }

    /// Parent and ordered children of `id`.
    pub fn navigate(&self, id: NodeId) -> Result<(Option<NodeId>, &[NodeId]), NodeError> {
        let info = self.info(id)?;
        Ok((info.parent, &info.children))
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.index.get(id).and_then(|i| i.parent)
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        self.index.get(id).map_or(&[], |i| &i.children)
    }

    pub fn span(&self, id: NodeId) -> Result<Span, NodeError> {
        Ok(self.info(id)?.span)
    }

    pub fn class(&self, id: NodeId) -> Result<SyntaxClass, NodeError> {
        Ok(self.info(id)?.class)
    }

    pub fn subtree_size(&self, id: NodeId) -> Result<usize, NodeError> {
        Ok(self.info(id)?.size)
    }

    pub fn depth(&self, id: NodeId) -> Result<usize, NodeError> {
        Ok(self.info(id)?.depth)
    }

    /// Ids covered by the subtree rooted at `id` (a contiguous pre-order range).
    pub fn subtree(&self, id: NodeId) -> Result<std::ops::Range<NodeId>, NodeError> {
        let size = self.info(id)?.size;
        Ok(id..id + size)
    }

    /// True if `ancestor` is `id` or one of its ancestors.
    pub fn is_ancestor_or_self(&self, ancestor: NodeId, id: NodeId) -> bool {
        match self.index.get(ancestor) {
            Some(info) => ancestor <= id && id < ancestor + info.size,
            None => false,
        }
    }

    /// Looks up a node by id.
    pub fn node(&self, id: NodeId) -> Result<&Expr, NodeError> {
        self.info(id)?;
        let mut cur = &self.root;
        while cur.id != id {
            cur = cur
                .children()
                .into_iter()
                .rev()
                .find(|c| c.id <= id)
                .expect("pre-order ids are dense");
        }
        Ok(cur)
    }

    /// Returns a new program with the subtree at `id` replaced.
    ///
    /// Node ids are recomputed. A replacement without a span inherits the span
    /// of the node it replaces; spans keep indexing the original source.
    pub fn replace_subtree(&self, id: NodeId, replacement: Expr) -> Result<Program, NodeError> {
        let span = self.info(id)?.span;
        let mut replacement = replacement;
        if replacement.span == Span::default() {
            replacement.span = span;
        }
        let mut root = self.root.clone();
        let mut slot = Some(replacement);
        replace_in(&mut root, id, &mut slot);
        Ok(Program::new(root, self.source.clone()))
    }
}

fn replace_in(e: &mut Expr, id: NodeId, slot: &mut Option<Expr>) {
    if e.id == id {
        if let Some(r) = slot.take() {
            *e = r;
        }
        return;
    }
    for child in e.children_mut() {
        if slot.is_none() {
            return;
        }
        replace_in(child, id, slot);
    }
}

fn build_index(e: &Expr, parent: Option<NodeId>, depth: usize, index: &mut Vec<NodeInfo>) -> usize {
    debug_assert_eq!(e.id, index.len());
    index.push(NodeInfo {
        parent,
        children: e.children().iter().map(|c| c.id).collect(),
        span: e.span,
        size: 1,
        depth,
        class: e.class(),
    });
    let mut size = 1;
    for child in e.children() {
        size += build_index(child, Some(e.id), depth + 1, index);
    }
    index[e.id].size = size;
    size
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::pretty::pretty_expr(&self.root))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_plus_true() -> Program {
        Program::new(Expr::plus(Expr::int(1), Expr::bool(true)), "")
    }

    #[test]
    fn ids_are_preorder() {
        let p = Program::new(
            Expr::app(
                Expr::fun("x", Expr::var("x")),
                Expr::plus(Expr::int(1), Expr::int(2)),
            ),
            "",
        );
        let mut seen = vec![];
        p.root().walk(&mut |e| seen.push(e.id));
        assert_eq!(seen, (0..p.len()).collect::<Vec<_>>());
        assert_eq!(p.len(), 6);
    }

    #[test]
    fn navigate_app() {
        let p = Program::new(Expr::app(Expr::var("f"), Expr::var("x")), "");
        assert_eq!(p.navigate(0).unwrap(), (None, &[1, 2][..]));
        assert_eq!(p.navigate(2).unwrap(), (Some(0), &[][..]));
        assert_eq!(p.navigate(3), Err(NodeError::UnknownNode(3)));
    }

    #[test]
    fn replace_root_with_hole() {
        let p = one_plus_true();
        let q = p.replace_subtree(0, Expr::hole()).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q.class(0).unwrap(), SyntaxClass::Hole);
    }

    #[test]
    fn replace_leaf_with_hole() {
        let p = one_plus_true();
        let q = p.replace_subtree(2, Expr::hole()).unwrap();
        assert_eq!(q.root(), &Expr::plus(Expr::int(1), Expr::hole()));
        assert_eq!(q.to_string(), "1 + ??");
        assert!(p.replace_subtree(9, Expr::hole()).is_err());
    }

    #[test]
    fn node_lookup() {
        let p = Program::new(
            Expr::if_(
                Expr::bool(true),
                Expr::plus(Expr::int(1), Expr::int(2)),
                Expr::int(3),
            ),
            "",
        );
        for id in p.ids() {
            assert_eq!(p.node(id).unwrap().id, id);
        }
        assert_eq!(p.node(3).unwrap(), &Expr::int(1));
    }

    #[test]
    fn structural_equality_ignores_ids() {
        let a = Expr::plus(Expr::int(1), Expr::int(2));
        let mut b = a.clone();
        b.id = 7;
        b.span = Span::new(3, 4);
        assert_eq!(a, b);
        assert_ne!(a, Expr::plus(Expr::int(1), Expr::int(3)));
    }
}
