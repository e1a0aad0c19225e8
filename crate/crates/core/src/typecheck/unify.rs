use thiserror::Error;

use super::types::{TyVar, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("occurs check: {var} occurs in {ty}")]
    OccursCheck { var: TyVar, ty: Type },
    #[error("cannot unify {left} with {right}")]
    ConstructorClash { left: Type, right: Type },
}

#[derive(Debug, Clone, PartialEq)]
struct Binding {
    ty: Type,
    /// Index of the constraint that created the binding.
    stamp: usize,
}

/// Triangular substitution. Each binding remembers when it was made, so the
/// substitution as it stood at any earlier point can be replayed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Substitution {
    bindings: Vec<Option<Binding>>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: TyVar) -> Option<&Type> {
        self.bindings
            .get(v.0 as usize)
            .and_then(|b| b.as_ref().map(|b| &b.ty))
    }

    pub fn len(&self) -> usize {
        self.bindings.iter().filter(|b| b.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn bind(&mut self, v: TyVar, ty: Type, stamp: usize) {
        let i = v.0 as usize;
        if self.bindings.len() <= i {
            self.bindings.resize(i + 1, None);
        }
        self.bindings[i] = Some(Binding { ty, stamp });
    }

    fn unbind(&mut self, v: TyVar) {
        self.bindings[v.0 as usize] = None;
    }

    /// Fully resolves `t`.
    pub fn apply(&self, t: &Type) -> Type {
        self.apply_before(t, usize::MAX)
    }

    /// Resolves `t` using only bindings made by constraints with index `< cutoff`.
    pub fn apply_before(&self, t: &Type, cutoff: usize) -> Type {
        match t {
            Type::Var(v) => match self.bindings.get(v.0 as usize) {
                Some(Some(b)) if b.stamp < cutoff => self.apply_before(&b.ty, cutoff),
                _ => t.clone(),
            },
            Type::Int | Type::Bool => t.clone(),
            Type::Fun(a, b) => {
                Type::fun(self.apply_before(a, cutoff), self.apply_before(b, cutoff))
            }
            Type::Prod(a, b) => {
                Type::prod(self.apply_before(a, cutoff), self.apply_before(b, cutoff))
            }
            Type::List(a) => Type::list(self.apply_before(a, cutoff)),
        }
    }

    fn shallow(&self, t: &Type) -> Type {
        let mut t = t.clone();
        while let Type::Var(v) = t {
            match self.get(v) {
                Some(next) => t = next.clone(),
                None => break,
            }
        }
        t
    }

    /// Unifies `a` and `b` in place. On failure every binding made during
    /// this call is undone, so a failing equation leaves no trace.
    pub fn unify_in_place(&mut self, a: &Type, b: &Type, stamp: usize) -> Result<(), UnifyError> {
        let mut trail = Vec::new();
        let result = self.unify_rec(a, b, stamp, &mut trail);
        if result.is_err() {
            for v in trail {
                self.unbind(v);
            }
        }
        result
    }

    fn unify_rec(
        &mut self,
        a: &Type,
        b: &Type,
        stamp: usize,
        trail: &mut Vec<TyVar>,
    ) -> Result<(), UnifyError> {
        let a = self.shallow(a);
        let b = self.shallow(b);
        match (&a, &b) {
            (Type::Var(x), Type::Var(y)) if x == y => Ok(()),
            (Type::Var(v), other) | (other, Type::Var(v)) => {
                let resolved = self.apply(other);
                if resolved.occurs(*v) {
                    return Err(UnifyError::OccursCheck {
                        var: *v,
                        ty: resolved,
                    });
                }
                self.bind(*v, other.clone(), stamp);
                trail.push(*v);
                Ok(())
            }
            (Type::Int, Type::Int) | (Type::Bool, Type::Bool) => Ok(()),
            (Type::Fun(a1, b1), Type::Fun(a2, b2)) | (Type::Prod(a1, b1), Type::Prod(a2, b2)) => {
                self.unify_rec(a1, a2, stamp, trail)?;
                self.unify_rec(b1, b2, stamp, trail)
            }
            (Type::List(a1), Type::List(a2)) => self.unify_rec(a1, a2, stamp, trail),
            _ => Err(UnifyError::ConstructorClash {
                left: self.apply(&a),
                right: self.apply(&b),
            }),
        }
    }
}

/// Most general unifier of `a` and `b` extending `s`.
pub fn unify(a: &Type, b: &Type, s: &Substitution) -> Result<Substitution, UnifyError> {
    let mut out = s.clone();
    let stamp = out
        .bindings
        .iter()
        .flatten()
        .map(|b| b.stamp + 1)
        .max()
        .unwrap_or(0);
    out.unify_in_place(a, b, stamp)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_with_int() {
        let s = unify(&Type::var(0), &Type::Int, &Substitution::new()).unwrap();
        assert_eq!(s.apply(&Type::var(0)), Type::Int);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn arrows() {
        let a = Type::fun(Type::var(0), Type::Bool);
        let b = Type::fun(Type::Int, Type::var(1));
        let s = unify(&a, &b, &Substitution::new()).unwrap();
        assert_eq!(s.apply(&Type::var(0)), Type::Int);
        assert_eq!(s.apply(&Type::var(1)), Type::Bool);
        assert_eq!(s.apply(&a), s.apply(&b));
    }

    #[test]
    fn cyclic_list_fails_occurs_check() {
        let err = unify(
            &Type::var(0),
            &Type::list(Type::var(0)),
            &Substitution::new(),
        )
        .unwrap_err();
        assert!(matches!(err, UnifyError::OccursCheck { .. }));
    }

    #[test]
    fn clash_rolls_back_partial_bindings() {
        let mut s = Substitution::new();
        let a = Type::fun(Type::var(0), Type::Int);
        let b = Type::fun(Type::Bool, Type::Bool);
        assert!(matches!(
            s.unify_in_place(&a, &b, 0),
            Err(UnifyError::ConstructorClash { .. })
        ));
        assert!(s.is_empty());
    }

    #[test]
    fn replay_before_cutoff() {
        let mut s = Substitution::new();
        s.unify_in_place(&Type::var(0), &Type::list(Type::var(1)), 0)
            .unwrap();
        s.unify_in_place(&Type::var(1), &Type::Int, 1).unwrap();
        assert_eq!(s.apply_before(&Type::var(0), 1), Type::list(Type::var(1)));
        assert_eq!(s.apply(&Type::var(0)), Type::list(Type::Int));
        assert_eq!(s.apply_before(&Type::var(0), 0), Type::var(0));
    }
}
