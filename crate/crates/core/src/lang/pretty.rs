//! Printer producing source that reparses to a structurally equal tree.

use super::ast::{Expr, ExprKind, Program};

const OPEN: u8 = 0;
const CONS: u8 = 1;
const PLUS: u8 = 2;
const APP: u8 = 3;
const ATOM: u8 = 4;

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Fun(..)
        | ExprKind::Let { .. }
        | ExprKind::If(..)
        | ExprKind::PairCase { .. }
        | ExprKind::ListCase { .. } => OPEN,
        ExprKind::Cons(..) => CONS,
        ExprKind::Plus(..) => PLUS,
        ExprKind::App(..) => APP,
        _ => ATOM,
    }
}

pub fn pretty(p: &Program) -> String {
    pretty_expr(p.root())
}

pub fn pretty_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, OPEN, true, &mut out);
    out
}

/// `min` is the loosest precedence allowed unparenthesized at this position;
/// `tail` says whether an open form (fun/let/if/match) may extend to the
/// end of the enclosing construct here.
fn write_expr(e: &Expr, min: u8, tail: bool, out: &mut String) {
    let prec = precedence(e);
    if prec < min || (prec == OPEN && !tail) {
        out.push('(');
        write_expr(e, OPEN, true, out);
        out.push(')');
        return;
    }
    match &e.kind {
        ExprKind::Var(x) => out.push_str(x),
        ExprKind::Int(n) => out.push_str(&n.to_string()),
        ExprKind::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        ExprKind::Nil => out.push_str("[]"),
        ExprKind::Hole => out.push_str("??"),
        ExprKind::Fun(x, body) => {
            out.push_str("fun ");
            out.push_str(x);
            out.push_str(" -> ");
            write_expr(body, OPEN, tail, out);
        }
        ExprKind::App(f, a) => {
            write_expr(f, APP, false, out);
            out.push(' ');
            write_expr(a, ATOM, false, out);
        }
        ExprKind::Let {
            rec,
            name,
            bound,
            body,
        } => {
            out.push_str(if *rec { "let rec " } else { "let " });
            out.push_str(name);
            let mut bound = &**bound;
            while let ExprKind::Fun(x, body) = &bound.kind {
                out.push(' ');
                out.push_str(x);
                bound = body;
            }
            out.push_str(" = ");
            write_expr(bound, OPEN, true, out);
            out.push_str(" in ");
            write_expr(body, OPEN, tail, out);
        }
        ExprKind::Plus(a, b) => {
            write_expr(a, PLUS, false, out);
            out.push_str(" + ");
            write_expr(b, APP, false, out);
        }
        ExprKind::If(c, t, f) => {
            out.push_str("if ");
            write_expr(c, OPEN, true, out);
            out.push_str(" then ");
            write_expr(t, OPEN, true, out);
            out.push_str(" else ");
            write_expr(f, OPEN, tail, out);
        }
        ExprKind::Pair(a, b) => {
            out.push('(');
            write_expr(a, OPEN, true, out);
            out.push_str(", ");
            write_expr(b, OPEN, true, out);
            out.push(')');
        }
        ExprKind::PairCase {
            scrutinee,
            left,
            right,
            body,
        } => {
            out.push_str("match ");
            write_expr(scrutinee, OPEN, true, out);
            out.push_str(&format!(" with ({left}, {right}) -> "));
            write_expr(body, OPEN, tail, out);
        }
        ExprKind::Cons(h, t) => {
            write_expr(h, PLUS, false, out);
            out.push_str(" :: ");
            write_expr(t, CONS, false, out);
        }
        ExprKind::ListCase {
            scrutinee,
            nil,
            head,
            tail: tl,
            cons,
        } => {
            out.push_str("match ");
            write_expr(scrutinee, OPEN, true, out);
            out.push_str(" with [] -> ");
            write_expr(nil, OPEN, false, out);
            out.push_str(&format!(" | {head} :: {tl} -> "));
            write_expr(cons, OPEN, tail, out);
        }
    }
}
