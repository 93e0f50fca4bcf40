//! Constructive typing by reduction and expansion.
//!
//! The typer reduces a term with the leftmost strategy, types what it
//! reaches, and pulls the derivation back through each contraction by
//! subject expansion. Three modes select how far it goes:
//!
//! * `Hnf` stops at head normal form and gives unused arguments `ω`.
//! * `Nf` reaches the normal form and keeps contexts and type ω-free.
//! * `Sn` also types every erased operand, so no `ω` appears anywhere.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::deriv::{Derivation, Witness};
use crate::expand::{expand_root, ExpandError};
use crate::reduce::contract_root;
use crate::term::{fresh_ident, Ident, Ref, Term};
use crate::transform::recontext;
use crate::types::{inter_cont, inter_ctx, BasicType, ContType, InterType, NameContext, TypeConst, VarContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Hnf,
    Nf,
    Sn,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TyperError {
    #[error("fuel exhausted")]
    OutOfFuel,
    #[error("head is bot: no head normal form")]
    BotHead,
    #[error("term is not locally closed")]
    NotLocallyClosed,
    #[error("expansion failed: {0}")]
    Expand(#[from] ExpandError),
}

/// Types `m` in the given mode. `fuel` bounds the number of contractions.
pub fn type_term(m: &Term, mode: Mode, fuel: usize) -> Result<Derivation, TyperError> {
    if !m.is_locally_closed() {
        return Err(TyperError::NotLocallyClosed);
    }
    let mut t = Typer { mode, fuel, used: m.idents(), next_const: 0 };
    t.go(m)
}

struct Typer {
    mode: Mode,
    fuel: usize,
    used: BTreeSet<Ident>,
    next_const: usize,
}

impl Typer {
    fn fresh(&mut self, base: &str) -> Ident {
        let base = if base.is_empty() { "x" } else { base };
        let x = fresh_ident(base, &self.used);
        self.used.insert(x.clone());
        x
    }

    fn constant(&mut self) -> TypeConst {
        let c = TypeConst::indexed(self.next_const);
        self.next_const += 1;
        c
    }

    fn go(&mut self, m: &Term) -> Result<Derivation, TyperError> {
        match m {
            Term::Lam(h, body) => self.lam(h, body),
            Term::Mu(h, target, body) => self.mu(h, target, body),
            _ => self.spine(m),
        }
    }

    fn lam(&mut self, hint: &str, body: &Term) -> Result<Derivation, TyperError> {
        let x = self.fresh(hint);
        let mut d = self.go(&body.open_var(&x))?;
        if self.mode != Mode::Hnf && !d.concl.vctx.contains_key(&x) {
            let mut g = d.concl.vctx.clone();
            g.insert(x.clone(), InterType::single(BasicType::atom(self.constant())));
            d = recontext(&d, &g, &d.concl.nctx.clone());
        }
        let mut outer = d.concl.vctx.clone();
        outer.remove(&x);
        Ok(Derivation::abs(&x, hint, d, outer))
    }

    fn mu(&mut self, hint: &str, target: &Ref, body: &Term) -> Result<Derivation, TyperError> {
        let alpha = self.fresh(hint);
        let d = self.go(&body.open_name(&alpha))?;
        let dcont = d.concl.basic().expect("typer derivations are basic").cont.clone();
        let tgt = match target {
            Ref::Bound(0) => alpha.clone(),
            Ref::Free(b) => b.clone(),
            Ref::Bound(_) => return Err(TyperError::NotLocallyClosed),
        };
        let mut n = d.concl.nctx.clone();
        let lower = n.get(&tgt).map_or_else(|| dcont.clone(), |c| inter_cont(c, &dcont));
        n.insert(tgt.clone(), lower);
        let d = recontext(&d, &d.concl.vctx.clone(), &n);
        Ok(Derivation::mu(&alpha, &tgt, hint, d))
    }

    fn spine(&mut self, m: &Term) -> Result<Derivation, TyperError> {
        let (head, args) = m.spine();
        match head {
            Term::Var(Ref::Free(y)) => {
                let y = y.clone();
                let args: Vec<Term> = args.into_iter().cloned().collect();
                self.var_spine(&y, &args)
            }
            Term::Var(Ref::Bound(_)) => Err(TyperError::NotLocallyClosed),
            Term::Bot => Err(TyperError::BotHead),
            Term::Lam(..) | Term::Mu(..) => {
                let args: Vec<Term> = args.into_iter().cloned().collect();
                self.redex_spine(head, &args)
            }
            Term::App(..) => unreachable!("spine heads are not applications"),
        }
    }

    fn var_spine(&mut self, y: &str, args: &[Term]) -> Result<Derivation, TyperError> {
        let head = self.constant();
        let (arg_ds, g, n) = if self.mode == Mode::Hnf {
            let ds: Vec<Derivation> = args
                .iter()
                .map(|a| Derivation::omega(VarContext::new(), a.clone(), NameContext::new()))
                .collect();
            (ds, VarContext::new(), NameContext::new())
        } else {
            let mut ds = Vec::new();
            let (mut g, mut n) = (VarContext::new(), NameContext::new());
            for a in args {
                let d = self.go(a)?;
                g = inter_ctx(&g, &d.concl.vctx);
                n = inter_ctx(&n, &d.concl.nctx);
                ds.push(d);
            }
            (ds, g, n)
        };
        let cont = ContType(arg_ds.iter().map(|d| d.concl.ty.clone()).collect());
        let ty = BasicType::new(cont, head);
        let g = inter_ctx(&g, &VarContext::from([(y.to_string(), InterType::single(ty.clone()))]));
        let mut d = Derivation::ax(g.clone(), y, ty, n.clone());
        for a in &arg_ds {
            d = Derivation::app(d, recontext(a, &g, &n));
        }
        Ok(d)
    }

    /// Contracts head redexes until the head is a variable, then pulls the
    /// derivation back through each contraction in reverse.
    fn redex_spine(&mut self, head: &Term, args: &[Term]) -> Result<Derivation, TyperError> {
        let mut trail: Vec<(Term, Vec<Term>)> = Vec::new();
        let mut current = Term::apps(head.clone(), args.iter().cloned());
        loop {
            let (h, xs) = current.spine();
            if xs.is_empty() || !matches!(h, Term::Lam(..) | Term::Mu(..)) {
                break;
            }
            if self.fuel == 0 {
                return Err(TyperError::OutOfFuel);
            }
            self.fuel -= 1;
            let redex = Term::app(h.clone(), xs[0].clone());
            let rest: Vec<Term> = xs[1..].iter().map(|t| (*t).clone()).collect();
            let contracted = contract_root(&redex).expect("λ or μ applied is a redex");
            current = Term::apps(contracted, rest.iter().cloned());
            trail.push((redex, rest));
        }
        let mut d = self.go(&current)?;
        while let Some((redex, rest)) = trail.pop() {
            d = self.expand_step(d, &redex, rest.len())?;
        }
        Ok(d)
    }

    /// From a derivation of `r′ a2 … an`, one of `r a2 … an` where `r → r′`.
    fn expand_step(&mut self, d: Derivation, redex: &Term, nrest: usize) -> Result<Derivation, TyperError> {
        let mut rest_ds = Vec::new();
        let mut cur = d;
        for _ in 0..nrest {
            let mut ps = cur.premises;
            let arg = ps.pop().expect("App has two premises");
            rest_ds.push(arg);
            cur = ps.pop().expect("App has two premises");
        }
        rest_ds.reverse();

        let Term::App(_, q) = redex else { unreachable!("redexes here are applications") };
        let operand = if self.mode == Mode::Sn {
            self.go(q)?
        } else {
            Derivation::omega(VarContext::new(), (**q).clone(), NameContext::new())
        };
        let g = inter_ctx(&cur.concl.vctx, &operand.concl.vctx);
        let n = inter_ctx(&cur.concl.nctx, &operand.concl.nctx);
        let cur = recontext(&cur, &g, &n);
        let operand = recontext(&operand, &g, &n);
        let mut out = expand_root(&cur, redex, Some(&operand))?;
        self.used.extend(witnesses(&out));
        for a in &rest_ds {
            out = Derivation::app(out, recontext(a, &g, &n));
        }
        Ok(out)
    }
}

fn witnesses(d: &Derivation) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    d.for_each(&mut |n| match &n.witness {
        Witness::Var(x) => {
            out.insert(x.clone());
        }
        Witness::Name { name, .. } => {
            out.insert(name.clone());
        }
        Witness::None => {}
    });
    out
}
