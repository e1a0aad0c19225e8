//! Lexer and recursive-descent parser for the OCaml-like λML surface syntax.
//!
//! ```text
//! program ::= expr | decl+                      decl ::= let [rec] x x* = expr
//! expr    ::= fun x+ -> expr
//!           | let [rec] x x* = expr in expr
//!           | if expr then expr else expr
//!           | match expr with arms
//!           | cons
//! arms    ::= [|] [] -> expr | x :: x -> expr   (either order)
//!           | [|] (x, x) -> expr
//! cons    ::= plus [:: cons]
//! plus    ::= app (+ app)*
//! app     ::= atom atom*
//! atom    ::= x | n | -n | true | false | [] | [expr (; expr)*]
//!           | (expr) | (expr, expr)
//! ```
//!
//! A top-level sequence of declarations without `in` desugars to nested lets
//! whose final body is the last declared name. `let f x = e` desugars to
//! `let f = fun x -> e`, and `[a; b]` to `a :: b :: []`.

use thiserror::Error;

use super::ast::{Expr, ExprKind, Program, Span};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    True,
    False,
    Fun,
    Let,
    Rec,
    In,
    If,
    Then,
    Else,
    Match,
    With,
    Arrow,
    Eq,
    Plus,
    ColonColon,
    Bar,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Holes,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(x) => format!("identifier `{x}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", token_text(other)),
        }
    }
}

fn token_text(t: &Tok) -> &'static str {
    match t {
        Tok::True => "true",
        Tok::False => "false",
        Tok::Fun => "fun",
        Tok::Let => "let",
        Tok::Rec => "rec",
        Tok::In => "in",
        Tok::If => "if",
        Tok::Then => "then",
        Tok::Else => "else",
        Tok::Match => "match",
        Tok::With => "with",
        Tok::Arrow => "->",
        Tok::Eq => "=",
        Tok::Plus => "+",
        Tok::ColonColon => "::",
        Tok::Bar => "|",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBracket => "[",
        Tok::RBracket => "]",
        Tok::Comma => ",",
        Tok::Semi => ";",
        Tok::Holes => "??",
        Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
    }
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_trivia(&mut self) -> Result<(), (usize, String)> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.src[self.pos..].starts_with("(*") {
                let start = self.pos;
                let mut depth = 0usize;
                while self.pos < self.bytes.len() {
                    if self.src[self.pos..].starts_with("(*") {
                        depth += 1;
                        self.pos += 2;
                    } else if self.src[self.pos..].starts_with("*)") {
                        depth -= 1;
                        self.pos += 2;
                        if depth == 0 {
                            break;
                        }
                    } else {
                        self.pos += self.src[self.pos..]
                            .chars()
                            .next()
                            .map_or(1, char::len_utf8);
                    }
                }
                if depth != 0 {
                    return Err((start, "unterminated comment".to_string()));
                }
            } else {
                return Ok(());
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, Span), (usize, String)> {
        self.skip_trivia()?;
        let start = self.pos;
        let Some(&c) = self.bytes.get(self.pos) else {
            return Ok((Tok::Eof, Span::new(start, start)));
        };
        let rest = &self.src[self.pos..];
        let two = |t: Tok, this: &mut Self| {
            this.pos += 2;
            Ok((t, Span::new(start, start + 2)))
        };
        if rest.starts_with("->") {
            return two(Tok::Arrow, self);
        }
        if rest.starts_with("::") {
            return two(Tok::ColonColon, self);
        }
        if rest.starts_with("??") {
            return two(Tok::Holes, self);
        }
        let negative = c == b'-' && self.bytes.get(self.pos + 1).is_some_and(u8::is_ascii_digit);
        if c.is_ascii_digit() || negative {
            let mut end = self.pos + 1;
            while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
                end += 1;
            }
            let text = &self.src[self.pos..end];
            let n = text
                .parse::<i64>()
                .map_err(|_| (start, format!("integer literal `{text}` out of range")))?;
            self.pos = end;
            return Ok((Tok::Int(n), Span::new(start, end)));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = self.pos + 1;
            while end < self.bytes.len()
                && (self.bytes[end].is_ascii_alphanumeric()
                    || self.bytes[end] == b'_'
                    || self.bytes[end] == b'\'')
            {
                end += 1;
            }
            let word = &self.src[self.pos..end];
            self.pos = end;
            let tok = match word {
                "true" => Tok::True,
                "false" => Tok::False,
                "fun" => Tok::Fun,
                "let" => Tok::Let,
                "rec" => Tok::Rec,
                "in" => Tok::In,
                "if" => Tok::If,
                "then" => Tok::Then,
                "else" => Tok::Else,
                "match" => Tok::Match,
                "with" => Tok::With,
                _ => Tok::Ident(word.to_string()),
            };
            return Ok((tok, Span::new(start, end)));
        }
        let tok = match c {
            b'=' => Tok::Eq,
            b'+' => Tok::Plus,
            b'|' => Tok::Bar,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b',' => Tok::Comma,
            b';' => Tok::Semi,
            _ => {
                let ch = rest.chars().next().unwrap_or('?');
                return Err((start, format!("unexpected character `{ch}`")));
            }
        };
        self.pos += 1;
        Ok((tok, Span::new(start, start + 1)))
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, Span)>, (usize, String)> {
    let mut lexer = Lexer {
        src,
        bytes: src.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    loop {
        let (tok, span) = lexer.next()?;
        let done = tok == Tok::Eof;
        out.push((tok, span));
        if done {
            return Ok(out);
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].1.end
        }
    }

    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, offset: usize, message: impl Into<String>) -> SyntaxError {
        error_at(self.src, offset, message.into())
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        self.error_at(
            self.span().start,
            format!("expected {wanted}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&format!("`{}`", token_text(&tok))))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                let span = self.bump().1;
                Ok((x, span))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn program(&mut self) -> PResult<Expr> {
        let e = if *self.peek() == Tok::Let {
            self.let_expr(true)?
        } else {
            self.expr()?
        };
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected("end of input"));
        }
        Ok(e)
    }

    fn expr(&mut self) -> PResult<Expr> {
        match self.peek() {
            Tok::Fun => {
                let start = self.bump().1.start;
                let mut params = vec![self.ident()?];
                while let Tok::Ident(_) = self.peek() {
                    params.push(self.ident()?);
                }
                self.expect(Tok::Arrow)?;
                let body = self.expr()?;
                let mut e = body;
                for (i, (x, span)) in params.into_iter().enumerate().rev() {
                    let s = if i == 0 { start } else { span.start };
                    let sp = Span::new(s, e.span.end);
                    e = Expr::with_span(ExprKind::Fun(x, Box::new(e)), sp);
                }
                Ok(e)
            }
            Tok::Let => self.let_expr(false),
            Tok::If => {
                let start = self.bump().1.start;
                let c = self.expr()?;
                self.expect(Tok::Then)?;
                let t = self.expr()?;
                self.expect(Tok::Else)?;
                let e = self.expr()?;
                let span = Span::new(start, e.span.end);
                Ok(Expr::with_span(
                    ExprKind::If(Box::new(c), Box::new(t), Box::new(e)),
                    span,
                ))
            }
            Tok::Match => self.match_expr(),
            _ => self.cons(),
        }
    }

    /// `let [rec] f x* = e in e`, or a declaration when `top` is set.
    fn let_expr(&mut self, top: bool) -> PResult<Expr> {
        let start = self.expect(Tok::Let)?.start;
        let rec = if *self.peek() == Tok::Rec {
            self.bump();
            true
        } else {
            false
        };
        let (name, _) = self.ident()?;
        let mut params = Vec::new();
        while let Tok::Ident(_) = self.peek() {
            params.push(self.ident()?);
        }
        self.expect(Tok::Eq)?;
        let mut bound = self.expr()?;
        for (x, span) in params.into_iter().rev() {
            let sp = Span::new(span.start, bound.span.end);
            bound = Expr::with_span(ExprKind::Fun(x, Box::new(bound)), sp);
        }
        let body = match self.peek() {
            Tok::In => {
                self.bump();
                self.expr()?
            }
            Tok::Let if top => self.let_expr(true)?,
            Tok::Eof if top => {
                let at = self.prev_end();
                Expr::with_span(ExprKind::Var(name.clone()), Span::new(at, at))
            }
            _ => return Err(self.unexpected("`in`")),
        };
        let span = Span::new(start, body.span.end.max(bound.span.end));
        Ok(Expr::with_span(
            ExprKind::Let {
                rec,
                name,
                bound: Box::new(bound),
                body: Box::new(body),
            },
            span,
        ))
    }

    fn match_expr(&mut self) -> PResult<Expr> {
        let start = self.expect(Tok::Match)?.start;
        let scrutinee = self.expr()?;
        self.expect(Tok::With)?;
        if *self.peek() == Tok::Bar {
            self.bump();
        }
        if *self.peek() == Tok::LParen {
            self.bump();
            let (left, _) = self.ident()?;
            self.expect(Tok::Comma)?;
            let (right, _) = self.ident()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::Arrow)?;
            let body = self.expr()?;
            let span = Span::new(start, body.span.end);
            return Ok(Expr::with_span(
                ExprKind::PairCase {
                    scrutinee: Box::new(scrutinee),
                    left,
                    right,
                    body: Box::new(body),
                },
                span,
            ));
        }
        let mut nil = None;
        let mut cons = None;
        for arm in 0..2 {
            if arm == 1 {
                self.expect(Tok::Bar)?;
            }
            if *self.peek() == Tok::LBracket && *self.peek_at(1) == Tok::RBracket {
                let at = self.span().start;
                self.bump();
                self.bump();
                self.expect(Tok::Arrow)?;
                let body = self.expr()?;
                if nil.replace(body).is_some() {
                    return Err(self.error_at(at, "duplicate `[]` arm"));
                }
            } else if let Tok::Ident(_) = self.peek() {
                let at = self.span().start;
                let (head, _) = self.ident()?;
                self.expect(Tok::ColonColon)?;
                let (tail, _) = self.ident()?;
                self.expect(Tok::Arrow)?;
                let body = self.expr()?;
                if cons.replace((head, tail, body)).is_some() {
                    return Err(self.error_at(at, "duplicate `::` arm"));
                }
            } else {
                return Err(self.unexpected("a `[]`, `x :: y` or `(x, y)` pattern"));
            }
        }
        let (nil, (head, tail, cons)) = (nil.unwrap(), cons.unwrap());
        let span = Span::new(start, nil.span.end.max(cons.span.end));
        Ok(Expr::with_span(
            ExprKind::ListCase {
                scrutinee: Box::new(scrutinee),
                nil: Box::new(nil),
                head,
                tail,
                cons: Box::new(cons),
            },
            span,
        ))
    }

    fn cons(&mut self) -> PResult<Expr> {
        let head = self.plus()?;
        if *self.peek() == Tok::ColonColon {
            self.bump();
            let tail = self.cons()?;
            let span = head.span.join(tail.span);
            return Ok(Expr::with_span(
                ExprKind::Cons(Box::new(head), Box::new(tail)),
                span,
            ));
        }
        Ok(head)
    }

    fn plus(&mut self) -> PResult<Expr> {
        let mut lhs = self.app()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let rhs = self.app()?;
            let span = lhs.span.join(rhs.span);
            lhs = Expr::with_span(ExprKind::Plus(Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::Int(_)
                | Tok::True
                | Tok::False
                | Tok::LParen
                | Tok::LBracket
                | Tok::Holes
        )
    }

    fn app(&mut self) -> PResult<Expr> {
        let mut f = self.atom()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            let span = f.span.join(arg.span);
            f = Expr::with_span(ExprKind::App(Box::new(f), Box::new(arg)), span);
        }
        Ok(f)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(Expr::with_span(ExprKind::Var(x), span))
            }
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::with_span(ExprKind::Int(n), span))
            }
            Tok::True | Tok::False => {
                let (t, _) = self.bump();
                Ok(Expr::with_span(ExprKind::Bool(t == Tok::True), span))
            }
            Tok::Holes => Err(self.error_at(
                span.start,
                "`??` marks a hole and cannot appear in source programs",
            )),
            Tok::LBracket => {
                self.bump();
                if *self.peek() == Tok::RBracket {
                    let end = self.bump().1.end;
                    return Ok(Expr::with_span(ExprKind::Nil, Span::new(span.start, end)));
                }
                let mut items = vec![self.expr()?];
                while *self.peek() == Tok::Semi {
                    self.bump();
                    if *self.peek() == Tok::RBracket {
                        break;
                    }
                    items.push(self.expr()?);
                }
                let close = self.expect(Tok::RBracket)?;
                let mut list = Expr::with_span(ExprKind::Nil, close);
                for item in items.into_iter().rev() {
                    let sp = Span::new(item.span.start, close.end);
                    list = Expr::with_span(ExprKind::Cons(Box::new(item), Box::new(list)), sp);
                }
                Ok(list)
            }
            Tok::LParen => {
                self.bump();
                let first = self.expr()?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                    let second = self.expr()?;
                    let end = self.expect(Tok::RParen)?.end;
                    return Ok(Expr::with_span(
                        ExprKind::Pair(Box::new(first), Box::new(second)),
                        Span::new(span.start, end),
                    ));
                }
                self.expect(Tok::RParen)?;
                Ok(first)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

fn error_at(src: &str, offset: usize, message: String) -> SyntaxError {
    let offset = offset.min(src.len());
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    SyntaxError {
        line,
        column,
        offset,
        message,
    }
}

/// Parses λML source into a numbered [`Program`].
pub fn parse(source: &str) -> Result<Program, SyntaxError> {
    let toks = tokenize(source).map_err(|(at, msg)| error_at(source, at, msg))?;
    let mut parser = Parser {
        src: source,
        toks,
        pos: 0,
    };
    let root = parser.program()?;
    Ok(Program::new(root, source))
}
