//! Structural operations on derivations.
//!
//! None of these functions check their output; callers that need a
//! guarantee run [`crate::deriv::check_derivation`] on the result.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::approx::direct_approx;
use crate::deriv::{Derivation, Judgement, Rule, Witness};
use crate::reduce::{contract, redex_kind, RedexKind};
use crate::term::{fresh_ident, Ident, Position, Ref, Step, Term};
use crate::types::{BasicType, ContType, InterType, NameContext, VarContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("no redex at {0}")]
    NotARedex(Position),
    #[error("derivation does not follow the subject at {0}")]
    Shape(String),
    #[error("a named occurrence is typed with the empty continuation, so the operand has no place to go")]
    EmptyContinuation,
    #[error("type {0} is not below the derived type")]
    NotSelectable(String),
    #[error("term is not above the derived subject")]
    NotAbove,
}

/// Every identifier mentioned anywhere in `d`.
pub fn deriv_idents(d: &Derivation) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    d.for_each(&mut |n| {
        out.extend(n.concl.vctx.keys().cloned());
        out.extend(n.concl.nctx.keys().cloned());
        out.extend(n.concl.term.idents());
        match &n.witness {
            Witness::Var(x) => {
                out.insert(x.clone());
            }
            Witness::Name { name, .. } => {
                out.insert(name.clone());
            }
            Witness::None => {}
        }
    });
    out
}

fn rename_key<T: Clone>(ctx: &crate::types::Context<T>, from: &str, to: &str) -> crate::types::Context<T> {
    ctx.iter()
        .map(|(k, v)| (if k == from { to.to_string() } else { k.clone() }, v.clone()))
        .collect()
}

/// Renames the variable `from` to `to` throughout `d`: contexts, subjects
/// and witnesses. `to` must not occur in `d`.
pub fn rename_var_deriv(d: &Derivation, from: &str, to: &str) -> Derivation {
    Derivation {
        rule: d.rule,
        concl: Judgement {
            vctx: rename_key(&d.concl.vctx, from, to),
            term: d.concl.term.rename_var(from, to),
            ty: d.concl.ty.clone(),
            nctx: d.concl.nctx.clone(),
        },
        premises: d.premises.iter().map(|p| rename_var_deriv(p, from, to)).collect(),
        witness: match &d.witness {
            Witness::Var(x) if x == from => Witness::Var(to.to_string()),
            w => w.clone(),
        },
    }
}

/// Renames the name `from` to `to` throughout `d`. `to` must not occur in `d`.
pub fn rename_name_deriv(d: &Derivation, from: &str, to: &str) -> Derivation {
    Derivation {
        rule: d.rule,
        concl: Judgement {
            vctx: d.concl.vctx.clone(),
            term: d.concl.term.rename_name(from, to),
            ty: d.concl.ty.clone(),
            nctx: rename_key(&d.concl.nctx, from, to),
        },
        premises: d.premises.iter().map(|p| rename_name_deriv(p, from, to)).collect(),
        witness: match &d.witness {
            Witness::Name { name, cont } if name == from => {
                Witness::Name { name: to.to_string(), cont: cont.clone() }
            }
            w => w.clone(),
        },
    }
}

/// Renames every binder witness of `d` that lies in `avoid`.
pub fn freshen_witnesses(d: &Derivation, avoid: &BTreeSet<Ident>) -> Derivation {
    let mut used = deriv_idents(d);
    used.extend(avoid.iter().cloned());
    freshen_in(d, avoid, &mut used)
}

fn freshen_in(d: &Derivation, avoid: &BTreeSet<Ident>, used: &mut BTreeSet<Ident>) -> Derivation {
    let mut d = d.clone();
    match &d.witness {
        Witness::Var(x) if avoid.contains(x) => {
            let x2 = fresh_ident(x, used);
            used.insert(x2.clone());
            d.premises[0] = rename_var_deriv(&d.premises[0], x, &x2);
            d.witness = Witness::Var(x2);
        }
        Witness::Name { name, cont } if avoid.contains(name) => {
            let a2 = fresh_ident(name, used);
            used.insert(a2.clone());
            d.premises[0] = rename_name_deriv(&d.premises[0], name, &a2);
            d.witness = Witness::Name { name: a2, cont: cont.clone() };
        }
        _ => {}
    }
    d.premises = d.premises.iter().map(|p| freshen_in(p, avoid, used)).collect();
    d
}

/// Rebuilds `d` with new root contexts. Binder witnesses that clash with
/// the new contexts are renamed.
///
/// The result is valid when `vctx ≤ Γ` and `nctx ≤ Δ` for the original
/// contexts (extra subjects are allowed), or more generally when the new
/// contexts still justify every axiom and μ side condition.
pub fn recontext(d: &Derivation, vctx: &VarContext, nctx: &NameContext) -> Derivation {
    let mut avoid = deriv_idents(d);
    avoid.extend(vctx.keys().cloned());
    avoid.extend(nctx.keys().cloned());
    recontext_in(d, vctx, nctx, &mut avoid)
}

fn recontext_in(
    d: &Derivation,
    vctx: &VarContext,
    nctx: &NameContext,
    avoid: &mut BTreeSet<Ident>,
) -> Derivation {
    let concl = Judgement::new(vctx.clone(), d.concl.term.clone(), d.concl.ty.clone(), nctx.clone());
    match &d.witness {
        Witness::Var(x) => {
            let mut premise = d.premises[0].clone();
            let mut x = x.clone();
            if vctx.contains_key(&x) {
                let x2 = fresh_ident(&x, avoid);
                avoid.insert(x2.clone());
                premise = rename_var_deriv(&premise, &x, &x2);
                x = x2;
            }
            let mut g = vctx.clone();
            if let Some(s) = premise.concl.vctx.get(&x) {
                g.insert(x.clone(), s.clone());
            }
            let premise = recontext_in(&premise, &g, nctx, avoid);
            Derivation { rule: d.rule, concl, premises: vec![premise], witness: Witness::Var(x) }
        }
        Witness::Name { name, cont } => {
            let mut premise = d.premises[0].clone();
            let mut a = name.clone();
            if nctx.contains_key(&a) {
                let a2 = fresh_ident(&a, avoid);
                avoid.insert(a2.clone());
                premise = rename_name_deriv(&premise, &a, &a2);
                a = a2;
            }
            let mut n = nctx.clone();
            if let Some(c) = premise.concl.nctx.get(&a) {
                n.insert(a.clone(), c.clone());
            }
            let premise = recontext_in(&premise, vctx, &n, avoid);
            Derivation {
                rule: d.rule,
                concl,
                premises: vec![premise],
                witness: Witness::Name { name: a, cont: cont.clone() },
            }
        }
        Witness::None => Derivation {
            rule: d.rule,
            concl,
            premises: d.premises.iter().map(|p| recontext_in(p, vctx, nctx, avoid)).collect(),
            witness: Witness::None,
        },
    }
}

/// Narrows the conclusion type from `S` to some `T` with `S ≤ T`, by
/// selecting premises of an intersection.
pub fn strengthen_type(d: &Derivation, t: &InterType) -> Result<Derivation, TransformError> {
    if d.concl.ty == *t {
        return Ok(d.clone());
    }
    if !t.0.is_subset(&d.concl.ty.0) {
        return Err(TransformError::NotSelectable(t.to_string()));
    }
    let picked: Vec<Derivation> = t
        .conjuncts()
        .map(|a| component(d, a).expect("conjunct present").clone())
        .collect();
    if picked.is_empty() {
        let j = &d.concl;
        return Ok(Derivation::omega(j.vctx.clone(), j.term.clone(), j.nctx.clone()));
    }
    if picked.len() == 1 {
        return Ok(picked.into_iter().next().expect("one"));
    }
    let mut out = d.clone();
    out.concl.ty = t.clone();
    out.premises = picked;
    if out.rule == Rule::InterBot {
        out.concl.term = crate::approx::join_all(out.premises.iter().map(|p| &p.concl.term))
            .expect("sub-joins of a join exist");
    }
    Ok(out)
}

/// The sub-derivation of `d` concluding the basic type `a`.
pub fn component<'a>(d: &'a Derivation, a: &BasicType) -> Option<&'a Derivation> {
    if d.concl.basic() == Some(a) {
        return Some(d);
    }
    match d.rule {
        Rule::Inter | Rule::InterBot => d.premises.iter().find(|p| p.concl.basic() == Some(a)),
        _ => None,
    }
}

/// Removes the given subjects from every context of `d`. Valid when none
/// of them is free in the root subject.
pub fn drop_subjects(d: &Derivation, vars: &BTreeSet<Ident>, names: &BTreeSet<Ident>) -> Derivation {
    let mut out = d.clone();
    out.concl.vctx.retain(|k, _| !vars.contains(k));
    out.concl.nctx.retain(|k, _| !names.contains(k));
    out.premises = d.premises.iter().map(|p| drop_subjects(p, vars, names)).collect();
    out
}

/// Shrinks the root contexts to what the derivation actually uses: each
/// free variable gets the intersection of the types of its axioms, each
/// free name the intersection of the continuations it is required to be
/// below.
pub fn minimize_contexts(d: &Derivation) -> Derivation {
    let mut g = VarContext::new();
    let mut n = NameContext::new();
    let roots_v: BTreeSet<&Ident> = d.concl.vctx.keys().collect();
    let roots_n: BTreeSet<&Ident> = d.concl.nctx.keys().collect();
    d.for_each(&mut |node| match node.rule {
        Rule::Ax => {
            if let Term::Var(Ref::Free(x)) = &node.concl.term {
                if roots_v.contains(x) {
                    let e = g.entry(x.clone()).or_default();
                    e.0.extend(node.concl.ty.0.iter().cloned());
                }
            }
        }
        Rule::MuPrime => {
            if let (Term::Mu(_, Ref::Free(b), _), Witness::Name { cont, .. }) =
                (&node.concl.term, &node.witness)
            {
                if roots_n.contains(b) {
                    let merged = match n.get(b) {
                        Some(c) => crate::types::inter_cont(c, cont),
                        None => cont.clone(),
                    };
                    n.insert(b.clone(), merged);
                }
            }
        }
        _ => {}
    });
    recontext(d, &g, &n)
}

fn at_position(
    d: &Derivation,
    path: &[Step],
    f: &mut impl FnMut(&Derivation) -> Result<Derivation, TransformError>,
) -> Result<Derivation, TransformError> {
    let new_term = |t: &Term| -> Result<Term, TransformError> {
        contract(t, &Position(path.to_vec())).map_err(|_| TransformError::NotARedex(Position(path.to_vec())))
    };
    match d.rule {
        Rule::Inter | Rule::InterBot => {
            let mut out = d.clone();
            out.premises = d.premises.iter().map(|p| at_position(p, path, f)).collect::<Result<_, _>>()?;
            out.concl.term = new_term(&d.concl.term)?;
            return Ok(out);
        }
        _ => {}
    }
    let Some((step, rest)) = path.split_first() else {
        return f(d);
    };
    let idx = match (step, d.rule) {
        (Step::Fun, Rule::App) => 0,
        (Step::Arg, Rule::App) => 1,
        (Step::Body, Rule::Abs | Rule::Mu | Rule::MuPrime) => 0,
        _ => return Err(TransformError::Shape(Position(path.to_vec()).to_string())),
    };
    let mut out = d.clone();
    out.premises[idx] = at_position(&d.premises[idx], rest, f)?;
    out.concl.term = new_term(&d.concl.term)?;
    Ok(out)
}

/// Subject reduction: a derivation for the reduct of `d`'s subject at `pos`.
pub fn reduce_deriv(d: &Derivation, pos: &Position) -> Result<Derivation, TransformError> {
    let kind = d
        .concl
        .term
        .subterm(pos)
        .and_then(redex_kind)
        .ok_or_else(|| TransformError::NotARedex(pos.clone()))?;
    let avoid = deriv_idents(d);
    at_position(d, &pos.0, &mut |node| match kind {
        RedexKind::Beta => reduce_beta(node),
        RedexKind::MuNamed | RedexKind::MuOther => reduce_mu(node, &avoid),
        RedexKind::Ren => reduce_ren(node),
    })
}

fn shape(what: &str) -> TransformError {
    TransformError::Shape(what.to_string())
}

fn reduce_beta(node: &Derivation) -> Result<Derivation, TransformError> {
    if node.rule != Rule::App || node.premises[0].rule != Rule::Abs {
        return Err(shape("beta redex"));
    }
    let abs = &node.premises[0];
    let arg = &node.premises[1];
    let Witness::Var(x) = &abs.witness else { return Err(shape("abs witness")) };
    let q = &arg.concl.term;
    let mut avoid = q.free_vars();
    avoid.extend(q.free_names());
    let body = freshen_witnesses(&abs.premises[0], &avoid);
    subst_deriv(&body, x, arg)
}

/// Replaces the axioms for `x` in `d` by the matching components of `arg`.
fn subst_deriv(d: &Derivation, x: &str, arg: &Derivation) -> Result<Derivation, TransformError> {
    let mut vctx = d.concl.vctx.clone();
    vctx.remove(x);
    if d.rule == Rule::Ax && d.concl.term == Term::var(x) {
        let a = d.concl.basic().ok_or_else(|| shape("axiom type"))?;
        let comp = component(arg, a).ok_or_else(|| shape("argument component"))?;
        return Ok(recontext(comp, &vctx, &d.concl.nctx));
    }
    let mut out = d.clone();
    out.concl.vctx = vctx;
    out.concl.term = d.concl.term.subst_term(x, &arg.concl.term);
    out.premises = d.premises.iter().map(|p| subst_deriv(p, x, arg)).collect::<Result<_, _>>()?;
    Ok(out)
}

fn reduce_mu(node: &Derivation, avoid: &BTreeSet<Ident>) -> Result<Derivation, TransformError> {
    if node.rule != Rule::App || !matches!(node.premises[0].rule, Rule::Mu | Rule::MuPrime) {
        return Err(shape("structural redex"));
    }
    let f = &node.premises[0];
    let q_d = &node.premises[1];
    let Witness::Name { name: beta, cont: dcont } = &f.witness else { return Err(shape("mu witness")) };
    let c = node.concl.basic().ok_or_else(|| shape("redex type"))?.cont.clone();
    let q = &q_d.concl.term;
    let mut all = avoid.clone();
    all.extend(deriv_idents(node));
    let gamma = fresh_ident("g", &all);
    let mut clash = q.free_vars();
    clash.extend(q.free_names());
    clash.insert(gamma.clone());
    let r_d = freshen_witnesses(&f.premises[0], &clash);
    let r2 = struct_deriv(&r_d, beta, q_d, &gamma, &c)?;
    if f.rule == Rule::Mu {
        let (s1, rest) = dcont.0.split_first().ok_or(TransformError::EmptyContinuation)?;
        let d2 = ContType(rest.to_vec());
        let q_sel = recontext(&strengthen_type(q_d, s1)?, &r2.concl.vctx, &r2.concl.nctx);
        let app = Derivation::app(r2, q_sel);
        let out = Derivation::mu(&gamma, &gamma, crate::reduce::MU_HINT, app);
        debug_assert_eq!(out.witness, Witness::Name { name: gamma.clone(), cont: d2 });
        Ok(out)
    } else {
        let Term::Mu(_, Ref::Free(delta), _) = &f.concl.term else { return Err(shape("mu target")) };
        Ok(Derivation::mu(&gamma, delta, crate::reduce::MU_HINT, r2))
    }
}

/// `d` types `R` with `β : S×C`; the result types `R[Q·γ/β]` with `γ : C`.
fn struct_deriv(
    d: &Derivation,
    beta: &str,
    q_d: &Derivation,
    gamma: &str,
    c: &ContType,
) -> Result<Derivation, TransformError> {
    let q = &q_d.concl.term;
    let mut nctx = d.concl.nctx.clone();
    nctx.remove(beta);
    nctx.insert(gamma.to_string(), c.clone());
    let term = d.concl.term.subst_struct(beta, q, gamma);
    let premises = d
        .premises
        .iter()
        .map(|p| struct_deriv(p, beta, q_d, gamma, c))
        .collect::<Result<Vec<_>, _>>()?;
    let targets_beta = matches!(&d.concl.term, Term::Mu(_, Ref::Free(b), _) if b == beta);
    if d.rule == Rule::MuPrime && targets_beta {
        let Witness::Name { name: alpha, cont: d1 } = &d.witness else { return Err(shape("mu witness")) };
        let (s1, rest) = d1.0.split_first().ok_or(TransformError::EmptyContinuation)?;
        let inner = premises.into_iter().next().ok_or_else(|| shape("mu premise"))?;
        let q_sel = recontext(&strengthen_type(q_d, s1)?, &inner.concl.vctx, &inner.concl.nctx);
        let app = Derivation::app(inner, q_sel);
        let hint = match &d.concl.term {
            Term::Mu(h, _, _) => h.clone(),
            _ => unreachable!("checked above"),
        };
        let out = Derivation::mu(alpha, gamma, &hint, app);
        debug_assert_eq!(out.witness, Witness::Name { name: alpha.clone(), cont: ContType(rest.to_vec()) });
        return Ok(out);
    }
    Ok(Derivation {
        rule: d.rule,
        concl: Judgement::new(d.concl.vctx.clone(), term, d.concl.ty.clone(), nctx),
        premises,
        witness: d.witness.clone(),
    })
}

/// Drops `from` from every name context of `d` and redirects its named
/// occurrences to `into`.
pub fn merge_name(d: &Derivation, from: &str, into: &str) -> Derivation {
    let mut out = d.clone();
    out.concl.nctx.remove(from);
    out.concl.term = d.concl.term.rename_name(from, into);
    out.premises = d.premises.iter().map(|p| merge_name(p, from, into)).collect();
    out
}

fn reduce_ren(node: &Derivation) -> Result<Derivation, TransformError> {
    if !matches!(node.rule, Rule::Mu | Rule::MuPrime) {
        return Err(shape("renaming redex"));
    }
    let inner = &node.premises[0];
    let Witness::Name { name: alpha, .. } = &node.witness else { return Err(shape("mu witness")) };
    let Witness::Name { name: gamma, cont: d2 } = &inner.witness else { return Err(shape("inner witness")) };
    let outer_target = match &node.concl.term {
        Term::Mu(_, Ref::Bound(0), _) => alpha.clone(),
        Term::Mu(_, Ref::Free(b), _) => b.clone(),
        _ => return Err(shape("mu target")),
    };
    let inner_target = match &inner.concl.term {
        Term::Mu(_, Ref::Bound(0), _) => outer_target.clone(),
        Term::Mu(_, Ref::Free(d), _) => d.clone(),
        _ => return Err(shape("inner target")),
    };
    let body = merge_name(&inner.premises[0], gamma, &outer_target);
    let hint = match &node.concl.term {
        Term::Mu(h, _, _) => h.clone(),
        _ => unreachable!("checked above"),
    };
    let out = Derivation::mu(alpha, &inner_target, &hint, body);
    debug_assert_eq!(out.witness, Witness::Name { name: alpha.clone(), cont: d2.clone() });
    Ok(out)
}

/// From an `S`-derivation of `M`, a `Bot`-derivation with the same rule
/// tree for some `M′ ⊑ M`.
pub fn s_to_bot(d: &Derivation) -> Derivation {
    let premises: Vec<Derivation> = d.premises.iter().map(s_to_bot).collect();
    let mut out = d.clone();
    match d.rule {
        Rule::Inter | Rule::InterBot => {
            out.rule = Rule::InterBot;
            out.concl.term = crate::approx::join_all(premises.iter().map(|p| &p.concl.term))
                .expect("approximants of one term are compatible");
        }
        Rule::Ax => {}
        Rule::Abs => {
            let Witness::Var(x) = &d.witness else { unreachable!("Abs has a variable witness") };
            let hint = match &d.concl.term {
                Term::Lam(h, _) => h.clone(),
                _ => x.clone(),
            };
            out.concl.term = Term::Lam(hint, Box::new(premises[0].concl.term.close_var(x)));
        }
        Rule::App => {
            out.concl.term = Term::app(premises[0].concl.term.clone(), premises[1].concl.term.clone());
        }
        Rule::Mu | Rule::MuPrime => {
            let Witness::Name { name, .. } = &d.witness else { unreachable!("Mu has a name witness") };
            if let Term::Mu(h, t, _) = &d.concl.term {
                out.concl.term = Term::Mu(h.clone(), t.clone(), Box::new(premises[0].concl.term.close_name(name)));
            }
        }
    }
    out.premises = premises;
    out
}

/// From a `Bot`-derivation of `M′`, an `S`-derivation with the same rule
/// tree for any `target` with `M′ ⊑ target`.
pub fn bot_to_s(d: &Derivation, target: &Term) -> Result<Derivation, TransformError> {
    if !direct_approx(&d.concl.term, target) {
        return Err(TransformError::NotAbove);
    }
    let mut out = d.clone();
    out.concl.term = target.clone();
    match (d.rule, target) {
        (Rule::Inter | Rule::InterBot, _) => {
            out.rule = Rule::Inter;
            out.premises = d.premises.iter().map(|p| bot_to_s(p, target)).collect::<Result<_, _>>()?;
        }
        (Rule::Ax, _) => {}
        (Rule::Abs, Term::Lam(_, body)) => {
            let mut avoid = target.free_vars();
            avoid.extend(target.free_names());
            let fresh = freshen_witnesses(d, &avoid);
            let Witness::Var(x) = &fresh.witness else { unreachable!("Abs has a variable witness") };
            out.witness = fresh.witness.clone();
            out.premises = vec![bot_to_s(&fresh.premises[0], &body.open_var(x))?];
        }
        (Rule::App, Term::App(f, a)) => {
            out.premises = vec![bot_to_s(&d.premises[0], f)?, bot_to_s(&d.premises[1], a)?];
        }
        (Rule::Mu | Rule::MuPrime, Term::Mu(_, _, body)) => {
            let mut avoid = target.free_vars();
            avoid.extend(target.free_names());
            let fresh = freshen_witnesses(d, &avoid);
            let Witness::Name { name, .. } = &fresh.witness else { unreachable!("Mu has a name witness") };
            out.witness = fresh.witness.clone();
            out.premises = vec![bot_to_s(&fresh.premises[0], &body.open_name(name))?];
        }
        _ => return Err(TransformError::NotAbove),
    }
    Ok(out)
}
