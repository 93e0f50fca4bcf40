//! λμ⊥ terms.
//!
//! Terms are stored with two independent de Bruijn index spaces: one for
//! λ-bound variables and one for μ-bound names. Free variables and free names
//! are kept by name. Binders carry the name they were written with, but only
//! as a printing hint: equality and hashing ignore hints, so `==` on [`Term`]
//! is alpha-equivalence.
//!
//! The target of a named subterm `μα.[β]M` is resolved *inside* the binder,
//! so `Ref::Bound(0)` in target position refers to `α` itself.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

pub type Ident = String;

/// A reference to a variable or a name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ref {
    /// Index into the enclosing binders of the matching kind.
    Bound(usize),
    Free(Ident),
}

impl Ref {
    pub fn free(name: impl Into<Ident>) -> Self {
        Ref::Free(name.into())
    }

    pub fn as_free(&self) -> Option<&str> {
        match self {
            Ref::Free(n) => Some(n),
            Ref::Bound(_) => None,
        }
    }

    fn shifted(&self, by: usize, cutoff: usize) -> Ref {
        match self {
            Ref::Bound(i) if *i >= cutoff => Ref::Bound(i + by),
            other => other.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Term {
    Var(Ref),
    /// `λx.M`; the string is the binder hint.
    Lam(Ident, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// `μα.[β]M`: hint for `α`, the target `β`, and the body.
    Mu(Ident, Ref, Box<Term>),
    Bot,
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Lam(_, a), Term::Lam(_, b)) => a == b,
            (Term::App(f, a), Term::App(g, b)) => f == g && a == b,
            (Term::Mu(_, s, a), Term::Mu(_, t, b)) => s == t && a == b,
            (Term::Bot, Term::Bot) => true,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Term::Var(r) => r.hash(state),
            Term::Lam(_, b) => b.hash(state),
            Term::App(f, a) => {
                f.hash(state);
                a.hash(state);
            }
            Term::Mu(_, t, b) => {
                t.hash(state);
                b.hash(state);
            }
            Term::Bot => {}
        }
    }
}

/// One step of a [`Position`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Fun,
    Arg,
    Body,
}

/// A path from the root of a term to one of its subterms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<Step>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, step: Step) -> Self {
        let mut path = self.0.clone();
        path.push(step);
        Position(path)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|s| match s {
                Step::Fun => "fun",
                Step::Arg => "arg",
                Step::Body => "body",
            })
            .collect();
        f.write_str(&parts.join("."))
    }
}

impl Term {
    pub fn var(name: impl Into<Ident>) -> Term {
        Term::Var(Ref::Free(name.into()))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    /// Left-nested application of `head` to `args`.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// `λx.body`, abstracting the free variable `x` of `body`.
    pub fn lam(x: &str, body: Term) -> Term {
        Term::Lam(x.to_string(), Box::new(body.close_var(x)))
    }

    /// `μα.[β]body`, abstracting the free name `α` (in the target too).
    pub fn mu(alpha: &str, beta: &str, body: Term) -> Term {
        let target = if alpha == beta {
            Ref::Bound(0)
        } else {
            Ref::Free(beta.to_string())
        };
        Term::Mu(alpha.to_string(), target, Box::new(body.close_name(alpha)))
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Term::Bot)
    }

    pub fn is_mu(&self) -> bool {
        matches!(self, Term::Mu(..))
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Bot => 1,
            Term::Lam(_, b) | Term::Mu(_, _, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    /// True iff the term contains no ⊥.
    pub fn is_bot_free(&self) -> bool {
        match self {
            Term::Bot => false,
            Term::Var(_) => true,
            Term::Lam(_, b) | Term::Mu(_, _, b) => b.is_bot_free(),
            Term::App(f, a) => f.is_bot_free() && a.is_bot_free(),
        }
    }

    /// Splits `h P1 … Pn` into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, a) = t {
            args.push(a.as_ref());
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn subterm(&self, pos: &Position) -> Option<&Term> {
        let mut t = self;
        for step in &pos.0 {
            t = match (step, t) {
                (Step::Fun, Term::App(f, _)) => f,
                (Step::Arg, Term::App(_, a)) => a,
                (Step::Body, Term::Lam(_, b)) | (Step::Body, Term::Mu(_, _, b)) => b,
                _ => return None,
            };
        }
        Some(t)
    }

    /// Replaces the subterm at `pos` by `f(subterm)`.
    pub fn map_at<E>(
        &self,
        pos: &[Step],
        f: &mut impl FnMut(&Term) -> Result<Term, E>,
        invalid: E,
    ) -> Result<Term, E> {
        let Some((step, rest)) = pos.split_first() else {
            return f(self);
        };
        match (step, self) {
            (Step::Fun, Term::App(g, a)) => {
                Ok(Term::App(Box::new(g.map_at(rest, f, invalid)?), a.clone()))
            }
            (Step::Arg, Term::App(g, a)) => {
                Ok(Term::App(g.clone(), Box::new(a.map_at(rest, f, invalid)?)))
            }
            (Step::Body, Term::Lam(h, b)) => {
                Ok(Term::Lam(h.clone(), Box::new(b.map_at(rest, f, invalid)?)))
            }
            (Step::Body, Term::Mu(h, t, b)) => Ok(Term::Mu(
                h.clone(),
                t.clone(),
                Box::new(b.map_at(rest, f, invalid)?),
            )),
            _ => Err(invalid),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out, &mut BTreeSet::new());
        out
    }

    pub fn free_names(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(&self, vars: &mut BTreeSet<Ident>, names: &mut BTreeSet<Ident>) {
        match self {
            Term::Var(Ref::Free(x)) => {
                vars.insert(x.clone());
            }
            Term::Var(Ref::Bound(_)) | Term::Bot => {}
            Term::Lam(_, b) => b.collect_free(vars, names),
            Term::App(f, a) => {
                f.collect_free(vars, names);
                a.collect_free(vars, names);
            }
            Term::Mu(_, t, b) => {
                if let Ref::Free(n) = t {
                    names.insert(n.clone());
                }
                b.collect_free(vars, names);
            }
        }
    }

    /// Every identifier occurring in the term: free variables, free names
    /// and binder hints.
    pub fn idents(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_idents(&mut out);
        out
    }

    fn collect_idents(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Term::Var(Ref::Free(x)) => {
                out.insert(x.clone());
            }
            Term::Var(_) | Term::Bot => {}
            Term::Lam(h, b) => {
                out.insert(h.clone());
                b.collect_idents(out);
            }
            Term::App(f, a) => {
                f.collect_idents(out);
                a.collect_idents(out);
            }
            Term::Mu(h, t, b) => {
                out.insert(h.clone());
                if let Ref::Free(n) = t {
                    out.insert(n.clone());
                }
                b.collect_idents(out);
            }
        }
    }

    /// True iff no bound index points past its binders.
    pub fn is_locally_closed(&self) -> bool {
        fn go(t: &Term, dv: usize, dn: usize) -> bool {
            match t {
                Term::Var(Ref::Bound(i)) => *i < dv,
                Term::Var(_) | Term::Bot => true,
                Term::Lam(_, b) => go(b, dv + 1, dn),
                Term::App(f, a) => go(f, dv, dn) && go(a, dv, dn),
                Term::Mu(_, t, b) => {
                    let ok = match t {
                        Ref::Bound(j) => *j < dn + 1,
                        Ref::Free(_) => true,
                    };
                    ok && go(b, dv, dn + 1)
                }
            }
        }
        go(self, 0, 0)
    }

    /// Adds `dv` to dangling variable indices and `dn` to dangling name
    /// indices.
    pub fn shift(&self, dv: usize, dn: usize) -> Term {
        if dv == 0 && dn == 0 {
            return self.clone();
        }
        self.shift_from(dv, dn, 0, 0)
    }

    fn shift_from(&self, dv: usize, dn: usize, cv: usize, cn: usize) -> Term {
        match self {
            Term::Var(r) => Term::Var(r.shifted(dv, cv)),
            Term::Bot => Term::Bot,
            Term::Lam(h, b) => Term::Lam(h.clone(), Box::new(b.shift_from(dv, dn, cv + 1, cn))),
            Term::App(f, a) => Term::app(f.shift_from(dv, dn, cv, cn), a.shift_from(dv, dn, cv, cn)),
            Term::Mu(h, t, b) => Term::Mu(
                h.clone(),
                t.shifted(dn, cn + 1),
                Box::new(b.shift_from(dv, dn, cv, cn + 1)),
            ),
        }
    }

    /// Instantiates the outermost dangling variable (index 0) with `arg`,
    /// where `arg` lives in the context outside the removed binder.
    pub fn instantiate_var(&self, arg: &Term) -> Term {
        fn go(t: &Term, arg: &Term, dv: usize, dn: usize) -> Term {
            match t {
                Term::Var(Ref::Bound(i)) => {
                    if *i == dv {
                        arg.shift(dv, dn)
                    } else if *i > dv {
                        Term::Var(Ref::Bound(i - 1))
                    } else {
                        t.clone()
                    }
                }
                Term::Var(_) | Term::Bot => t.clone(),
                Term::Lam(h, b) => Term::Lam(h.clone(), Box::new(go(b, arg, dv + 1, dn))),
                Term::App(f, a) => Term::app(go(f, arg, dv, dn), go(a, arg, dv, dn)),
                Term::Mu(h, tg, b) => {
                    Term::Mu(h.clone(), tg.clone(), Box::new(go(b, arg, dv, dn + 1)))
                }
            }
        }
        go(self, arg, 0, 0)
    }

    /// Instantiates the outermost dangling name (index 0) with `target`,
    /// given relative to the context outside the removed binder.
    pub fn instantiate_name(&self, target: &Ref) -> Term {
        fn resolve(r: &Ref, target: &Ref, depth: usize) -> Ref {
            match r {
                Ref::Bound(i) if *i == depth => target.shifted(depth, 0),
                Ref::Bound(i) if *i > depth => Ref::Bound(i - 1),
                other => other.clone(),
            }
        }
        fn go(t: &Term, target: &Ref, dn: usize) -> Term {
            match t {
                Term::Var(_) | Term::Bot => t.clone(),
                Term::Lam(h, b) => Term::Lam(h.clone(), Box::new(go(b, target, dn))),
                Term::App(f, a) => Term::app(go(f, target, dn), go(a, target, dn)),
                Term::Mu(h, tg, b) => Term::Mu(
                    h.clone(),
                    resolve(tg, target, dn + 1),
                    Box::new(go(b, target, dn + 1)),
                ),
            }
        }
        go(self, target, 0)
    }

    /// Opens a λ-body with the free variable `x`.
    pub fn open_var(&self, x: &str) -> Term {
        self.instantiate_var(&Term::var(x))
    }

    /// Opens a μ-body with the free name `a`.
    pub fn open_name(&self, a: &str) -> Term {
        self.instantiate_name(&Ref::free(a))
    }

    /// Abstracts the free variable `x` into index 0 of a new (implicit)
    /// λ-binder.
    pub fn close_var(&self, x: &str) -> Term {
        fn go(t: &Term, x: &str, dv: usize) -> Term {
            match t {
                Term::Var(Ref::Free(y)) if y == x => Term::Var(Ref::Bound(dv)),
                Term::Var(Ref::Bound(i)) if *i >= dv => Term::Var(Ref::Bound(i + 1)),
                Term::Var(_) | Term::Bot => t.clone(),
                Term::Lam(h, b) => Term::Lam(h.clone(), Box::new(go(b, x, dv + 1))),
                Term::App(f, a) => Term::app(go(f, x, dv), go(a, x, dv)),
                Term::Mu(h, tg, b) => Term::Mu(h.clone(), tg.clone(), Box::new(go(b, x, dv))),
            }
        }
        go(self, x, 0)
    }

    /// Abstracts the free name `a` into index 0 of a new (implicit) μ-binder.
    pub fn close_name(&self, a: &str) -> Term {
        fn close_ref(r: &Ref, a: &str, depth: usize) -> Ref {
            match r {
                Ref::Free(n) if n == a => Ref::Bound(depth),
                Ref::Bound(i) if *i >= depth => Ref::Bound(i + 1),
                other => other.clone(),
            }
        }
        fn go(t: &Term, a: &str, dn: usize) -> Term {
            match t {
                Term::Var(_) | Term::Bot => t.clone(),
                Term::Lam(h, b) => Term::Lam(h.clone(), Box::new(go(b, a, dn))),
                Term::App(f, x) => Term::app(go(f, a, dn), go(x, a, dn)),
                Term::Mu(h, tg, b) => Term::Mu(
                    h.clone(),
                    close_ref(tg, a, dn + 1),
                    Box::new(go(b, a, dn + 1)),
                ),
            }
        }
        go(self, a, 0)
    }

    /// Capture-avoiding term substitution `self[n/x]`.
    pub fn subst_term(&self, x: &str, n: &Term) -> Term {
        fn go(t: &Term, x: &str, n: &Term, dv: usize, dn: usize) -> Term {
            match t {
                Term::Var(Ref::Free(y)) if y == x => n.shift(dv, dn),
                Term::Var(_) | Term::Bot => t.clone(),
                Term::Lam(h, b) => Term::Lam(h.clone(), Box::new(go(b, x, n, dv + 1, dn))),
                Term::App(f, a) => Term::app(go(f, x, n, dv, dn), go(a, x, n, dv, dn)),
                Term::Mu(h, tg, b) => {
                    Term::Mu(h.clone(), tg.clone(), Box::new(go(b, x, n, dv, dn + 1)))
                }
            }
        }
        go(self, x, n, 0, 0)
    }

    /// Structural substitution `self[arg·new/old]`: every named subterm
    /// `[old]N` becomes `[new](N arg)`.
    ///
    /// `old` and `new` are given relative to the top of `self`; bound
    /// references are adjusted as the traversal enters μ-binders.
    pub fn struct_subst(&self, old: &Ref, arg: &Term, new: &Ref) -> Term {
        fn go(t: &Term, old: &Ref, arg: &Term, new: &Ref, dv: usize, dn: usize) -> Term {
            match t {
                Term::Var(_) | Term::Bot => t.clone(),
                Term::Lam(h, b) => {
                    Term::Lam(h.clone(), Box::new(go(b, old, arg, new, dv + 1, dn)))
                }
                Term::App(f, a) => Term::app(
                    go(f, old, arg, new, dv, dn),
                    go(a, old, arg, new, dv, dn),
                ),
                Term::Mu(h, tg, b) => {
                    let inner = dn + 1;
                    let body = go(b, old, arg, new, dv, inner);
                    if *tg == old.shifted(inner, 0) {
                        Term::Mu(
                            h.clone(),
                            new.shifted(inner, 0),
                            Box::new(Term::app(body, arg.shift(dv, inner))),
                        )
                    } else {
                        Term::Mu(h.clone(), tg.clone(), Box::new(body))
                    }
                }
            }
        }
        go(self, old, arg, new, 0, 0)
    }

    /// Structural substitution on free names, `self[l·gamma/alpha]`.
    pub fn subst_struct(&self, alpha: &str, l: &Term, gamma: &str) -> Term {
        self.struct_subst(&Ref::free(alpha), l, &Ref::free(gamma))
    }

    /// Renames the free name `from` to `to`.
    pub fn rename_name(&self, from: &str, to: &str) -> Term {
        match self {
            Term::Var(_) | Term::Bot => self.clone(),
            Term::Lam(h, b) => Term::Lam(h.clone(), Box::new(b.rename_name(from, to))),
            Term::App(f, a) => Term::app(f.rename_name(from, to), a.rename_name(from, to)),
            Term::Mu(h, tg, b) => {
                let tg = match tg {
                    Ref::Free(n) if n == from => Ref::free(to),
                    other => other.clone(),
                };
                Term::Mu(h.clone(), tg, Box::new(b.rename_name(from, to)))
            }
        }
    }

    /// Renames the free variable `from` to `to`.
    pub fn rename_var(&self, from: &str, to: &str) -> Term {
        self.subst_term(from, &Term::var(to))
    }

    /// Alpha-equivalence. Identical to `==`.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        self == other
    }
}

/// `base`, `base'`, `base''`, … : the first variant not in `avoid`.
pub fn fresh_ident(base: &str, avoid: &BTreeSet<Ident>) -> Ident {
    let mut candidate = base.to_string();
    while avoid.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x")
    }

    #[test]
    fn builders_resolve_binders() {
        let id = Term::lam("x", x());
        assert_eq!(id, Term::Lam("y".into(), Box::new(Term::Var(Ref::Bound(0)))));
        let m = Term::mu("a", "a", x());
        assert_eq!(m, Term::Mu("b".into(), Ref::Bound(0), Box::new(x())));
        let m = Term::mu("a", "b", x());
        assert_eq!(m, Term::Mu("c".into(), Ref::free("b"), Box::new(x())));
    }

    #[test]
    fn free_sets() {
        let t = Term::lam("x", Term::app(x(), Term::var("y")));
        assert_eq!(t.free_vars().into_iter().collect::<Vec<_>>(), vec!["y"]);
        let t = Term::mu("a", "b", x());
        assert_eq!(t.free_vars().into_iter().collect::<Vec<_>>(), vec!["x"]);
        assert_eq!(t.free_names().into_iter().collect::<Vec<_>>(), vec!["b"]);
        assert!(Term::mu("a", "a", x()).free_names().is_empty());
    }

    #[test]
    fn open_close_roundtrip() {
        let body = Term::app(x(), Term::lam("z", Term::app(x(), Term::var("z"))));
        let closed = body.close_var("x");
        assert_eq!(closed.open_var("x"), body);
        let body = Term::mu("b", "a", Term::mu("c", "a", x()));
        assert_eq!(body.close_name("a").open_name("a"), body);
    }

    #[test]
    fn substitution_avoids_capture() {
        // (\y.x)[y/x] = \y'.y
        let t = Term::lam("y", x());
        let r = t.subst_term("x", &Term::var("y"));
        assert_eq!(r, Term::lam("q", Term::var("y")));
        assert_ne!(r, Term::lam("y", Term::var("y")));
    }

    #[test]
    fn structural_substitution_nested() {
        // (mu b.[a] mu c.[a] x)[y·g/a] = mu b.[g] (mu c.[g] x y) y
        let t = Term::mu("b", "a", Term::mu("c", "a", x()));
        let r = t.subst_struct("a", &Term::var("y"), "g");
        let expected = Term::mu(
            "b",
            "g",
            Term::app(Term::mu("c", "g", Term::app(x(), Term::var("y"))), Term::var("y")),
        );
        assert_eq!(r, expected);
    }

    #[test]
    fn locally_closed() {
        assert!(Term::lam("x", x()).is_locally_closed());
        assert!(!Term::Var(Ref::Bound(0)).is_locally_closed());
        assert!(!Term::Mu("a".into(), Ref::Bound(1), Box::new(x())).is_locally_closed());
    }

    #[test]
    fn fresh_primes() {
        let avoid: BTreeSet<Ident> = ["g".to_string(), "g'".to_string()].into();
        assert_eq!(fresh_ident("g", &avoid), "g''");
        assert_eq!(fresh_ident("h", &avoid), "h");
    }
}
