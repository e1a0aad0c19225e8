//! λML: syntax tree, parser, printer and node navigation.

mod ast;
mod parser;
mod pretty;

pub use ast::{Expr, ExprKind, NodeError, NodeId, Program, Span, SyntaxClass};
pub use parser::{parse, SyntaxError};
pub use pretty::{pretty, pretty_expr};

/// Renders the tree one node per line as `id kind span`, indented by depth.
pub fn sexpr(p: &Program) -> String {
    let mut out = String::new();
    p.root().walk(&mut |e| {
        let depth = p.depth(e.id).unwrap_or(0);
        let kind = match &e.kind {
            ExprKind::Var(x) => format!("Var:{x}"),
            ExprKind::Fun(x, _) => format!("Fun:{x}"),
            ExprKind::Let { rec, name, .. } => {
                format!("{}:{name}", if *rec { "LetRec" } else { "Let" })
            }
            ExprKind::Int(n) => format!("Int:{n}"),
            ExprKind::Bool(b) => format!("Bool:{b}"),
            ExprKind::PairCase { left, right, .. } => format!("PairCase:{left},{right}"),
            ExprKind::ListCase { head, tail, .. } => format!("ListCase:{head},{tail}"),
            ExprKind::App(..) => "App".into(),
            ExprKind::Plus(..) => "Plus".into(),
            ExprKind::If(..) => "If".into(),
            ExprKind::Pair(..) => "Pair".into(),
            ExprKind::Nil => "Nil".into(),
            ExprKind::Cons(..) => "Cons".into(),
            ExprKind::Hole => "Hole".into(),
        };
        out.push_str(&format!(
            "{}({} {} {})\n",
            "  ".repeat(depth),
            e.id,
            kind,
            e.span
        ));
    });
    out
}
