//! Named, capture-free rendering of terms.
//!
//! Binders are printed with their hint, primed until the choice cannot
//! capture anything: it must differ from every free identifier of the whole
//! term and from every binder of the same kind that is still in scope.

use std::collections::BTreeSet;
use std::fmt;

use crate::term::{fresh_ident, Ident, Ref, Term};

#[derive(Clone, Copy, PartialEq)]
enum Slot {
    Top,
    Fun,
    Arg,
}

struct Printer {
    avoid: BTreeSet<Ident>,
    vars: Vec<Ident>,
    names: Vec<Ident>,
    out: String,
}

impl Printer {
    fn lookup(stack: &[Ident], r: &Ref) -> String {
        match r {
            Ref::Free(x) => x.clone(),
            Ref::Bound(i) => stack
                .len()
                .checked_sub(i + 1)
                .map(|k| stack[k].clone())
                .unwrap_or_else(|| format!("#{i}")),
        }
    }

    fn pick(&self, hint: &str, stack: &[Ident]) -> Ident {
        let mut avoid = self.avoid.clone();
        avoid.extend(stack.iter().cloned());
        let base = if hint.is_empty() { "x" } else { hint };
        fresh_ident(base, &avoid)
    }

    fn term(&mut self, t: &Term, slot: Slot) {
        match t {
            Term::Var(r) => {
                let s = Self::lookup(&self.vars, r);
                self.out.push_str(&s);
            }
            Term::Bot => self.out.push_str("bot"),
            Term::App(f, a) => {
                let paren = slot == Slot::Arg;
                if paren {
                    self.out.push('(');
                }
                self.term(f, Slot::Fun);
                self.out.push(' ');
                self.term(a, Slot::Arg);
                if paren {
                    self.out.push(')');
                }
            }
            Term::Lam(h, b) => {
                let paren = slot != Slot::Top;
                if paren {
                    self.out.push('(');
                }
                let x = self.pick(h, &self.vars);
                self.out.push('\\');
                self.out.push_str(&x);
                self.out.push('.');
                self.vars.push(x);
                self.term(b, Slot::Top);
                self.vars.pop();
                if paren {
                    self.out.push(')');
                }
            }
            Term::Mu(h, target, b) => {
                let paren = slot != Slot::Top;
                if paren {
                    self.out.push('(');
                }
                let a = self.pick(h, &self.names);
                self.names.push(a.clone());
                let tgt = Self::lookup(&self.names, target);
                self.out.push_str("mu ");
                self.out.push_str(&a);
                self.out.push_str(".[");
                self.out.push_str(&tgt);
                self.out.push_str("] ");
                self.term(b, Slot::Top);
                self.names.pop();
                if paren {
                    self.out.push(')');
                }
            }
        }
    }
}

/// Renders a term in the surface syntax accepted by [`crate::parse::parse`].
pub fn pretty(t: &Term) -> String {
    let mut avoid = t.free_vars();
    avoid.extend(t.free_names());
    avoid.insert("mu".into());
    avoid.insert("bot".into());
    let mut p = Printer {
        avoid,
        vars: Vec::new(),
        names: Vec::new(),
        out: String::new(),
    };
    p.term(t, Slot::Top);
    p.out
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_parentheses() {
        let t = Term::app(
            Term::lam("x", Term::app(Term::var("x"), Term::var("x"))),
            Term::lam("x", Term::app(Term::var("x"), Term::var("x"))),
        );
        assert_eq!(pretty(&t), "(\\x.x x) (\\x.x x)");
        let t = Term::apps(Term::var("x"), [Term::var("y"), Term::app(Term::var("z"), Term::Bot)]);
        assert_eq!(pretty(&t), "x y (z bot)");
        let t = Term::mu("a", "b", Term::app(Term::var("x"), Term::var("y")));
        assert_eq!(pretty(&t), "mu a.[b] x y");
    }

    #[test]
    fn binders_never_capture() {
        // \y.x with x := y
        let t = Term::lam("y", Term::var("x")).subst_term("x", &Term::var("y"));
        assert_eq!(pretty(&t), "\\y'.y");
        let t = Term::lam("x", Term::lam("x", Term::var("x")));
        assert_eq!(pretty(&t), "\\x.\\x'.x'");
    }
}
