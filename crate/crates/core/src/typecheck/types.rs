use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TyVar(pub u32);

impl fmt::Display for TyVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = (b'a' + (self.0 % 26) as u8) as char;
        match self.0 / 26 {
            0 => write!(f, "'{letter}"),
            n => write!(f, "'{letter}{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Var(TyVar),
    Int,
    Bool,
    Fun(Box<Type>, Box<Type>),
    Prod(Box<Type>, Box<Type>),
    List(Box<Type>),
}

impl Type {
    pub fn fun(a: Type, b: Type) -> Type {
        Type::Fun(Box::new(a), Box::new(b))
    }

    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    pub fn list(a: Type) -> Type {
        Type::List(Box::new(a))
    }

    pub fn var(n: u32) -> Type {
        Type::Var(TyVar(n))
    }

    pub fn free_vars(&self, out: &mut BTreeSet<TyVar>) {
        match self {
            Type::Var(v) => {
                out.insert(*v);
            }
            Type::Int | Type::Bool => {}
            Type::Fun(a, b) | Type::Prod(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            Type::List(a) => a.free_vars(out),
        }
    }

    pub fn occurs(&self, v: TyVar) -> bool {
        match self {
            Type::Var(w) => *w == v,
            Type::Int | Type::Bool => false,
            Type::Fun(a, b) | Type::Prod(a, b) => a.occurs(v) || b.occurs(v),
            Type::List(a) => a.occurs(v),
        }
    }

    /// Head constructor, or `None` for a variable.
    pub fn constructor(&self) -> Option<TypeCon> {
        match self {
            Type::Var(_) => None,
            Type::Int => Some(TypeCon::Int),
            Type::Bool => Some(TypeCon::Bool),
            Type::Fun(..) => Some(TypeCon::Fun),
            Type::Prod(..) => Some(TypeCon::Prod),
            Type::List(_) => Some(TypeCon::List),
        }
    }

    fn fmt_prec(&self, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // 0: arrow, 1: product, 2: list argument
        match self {
            Type::Var(v) => write!(f, "{v}"),
            Type::Int => f.write_str("int"),
            Type::Bool => f.write_str("bool"),
            Type::List(a) => {
                a.fmt_prec(2, f)?;
                f.write_str(" list")
            }
            Type::Prod(a, b) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                a.fmt_prec(2, f)?;
                f.write_str(" * ")?;
                b.fmt_prec(2, f)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Type::Fun(a, b) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                a.fmt_prec(1, f)?;
                f.write_str(" -> ")?;
                b.fmt_prec(0, f)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(0, f)
    }
}

/// Type constructors, in schema order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeCon {
    Int,
    Bool,
    Fun,
    Prod,
    List,
}

impl TypeCon {
    pub const ALL: [TypeCon; 5] = [
        TypeCon::Int,
        TypeCon::Bool,
        TypeCon::Fun,
        TypeCon::Prod,
        TypeCon::List,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            TypeCon::Int => "Int",
            TypeCon::Bool => "Bool",
            TypeCon::Fun => "Fun",
            TypeCon::Prod => "Prod",
            TypeCon::List => "[·]",
        }
    }
}

/// The set of constructors occurring anywhere in `t`.
pub fn type_mentions(t: &Type) -> BTreeSet<TypeCon> {
    fn go(t: &Type, out: &mut BTreeSet<TypeCon>) {
        if let Some(c) = t.constructor() {
            out.insert(c);
        }
        match t {
            Type::Fun(a, b) | Type::Prod(a, b) => {
                go(a, out);
                go(b, out);
            }
            Type::List(a) => go(a, out),
            Type::Var(_) | Type::Int | Type::Bool => {}
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut out);
    out
}
