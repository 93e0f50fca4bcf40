//! Subject expansion at the root.
//!
//! Each function takes a derivation for the contractum of a root redex and
//! returns one for the redex itself, with the same contexts and type. The
//! redex body is used as a template: walking it alongside the contractum's
//! derivation tells which sub-derivations came from the operand.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::deriv::{Derivation, Judgement, Rule, Witness};
use crate::reduce::contract_root;
use crate::term::{fresh_ident, Ident, Ref, Term};
use crate::transform::{deriv_idents, recontext};
use crate::types::{BasicType, ContType, InterType, NameContext, VarContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("term is not a redex of the expected kind")]
    NotARedex,
    #[error("derivation does not type the contractum")]
    WrongContractum,
    #[error("operand derivation does not match the redex")]
    WrongOperand,
    #[error("derivation does not follow the template: {0}")]
    Shape(&'static str),
}

type Res<T> = Result<T, ExpandError>;

fn check_contractum(d: &Derivation, redex: &Term) -> Res<()> {
    match contract_root(redex) {
        Some(c) if c == d.concl.term => Ok(()),
        _ => Err(ExpandError::WrongContractum),
    }
}

fn check_operand(d: &Derivation, q: &Term, op: &Derivation) -> Res<()> {
    let same = op.concl.term == *q && op.concl.vctx == d.concl.vctx && op.concl.nctx == d.concl.nctx;
    if same {
        Ok(())
    } else {
        Err(ExpandError::WrongOperand)
    }
}

/// Applies `f` to each basic component of `d`, rebuilding an intersection
/// over `term` when `d` concludes one.
fn per_component(d: &Derivation, term: &Term, f: &mut impl FnMut(&Derivation) -> Res<Derivation>) -> Res<Derivation> {
    match d.rule {
        Rule::Inter => {
            let ps = d.premises.iter().map(|p| f(p)).collect::<Res<Vec<_>>>()?;
            Ok(Derivation::inter(d.concl.vctx.clone(), term.clone(), d.concl.nctx.clone(), ps))
        }
        _ => f(d),
    }
}

fn basic_components(d: &Derivation) -> Vec<&Derivation> {
    match d.rule {
        Rule::Inter | Rule::InterBot => d.premises.iter().collect(),
        _ => vec![d],
    }
}

fn fresh_for(ds: &[&Derivation], terms: &[&Term], base: &str) -> Ident {
    let mut avoid = BTreeSet::new();
    for d in ds {
        avoid.extend(deriv_idents(d));
    }
    for t in terms {
        avoid.extend(t.idents());
    }
    fresh_ident(base, &avoid)
}

/// The opened premise template of a binder node, given the node's
/// template.
fn open_child(tmpl: &Term, d: &Derivation) -> Res<Term> {
    match (tmpl, &d.witness) {
        (Term::Lam(_, b), Witness::Var(x)) => Ok(b.open_var(x)),
        (Term::Mu(_, _, b), Witness::Name { name, .. }) => Ok(b.open_name(name)),
        _ => Err(ExpandError::Shape("binder")),
    }
}

/// Children templates of `d` for template `tmpl`, in premise order.
fn child_templates(tmpl: &Term, d: &Derivation) -> Res<Vec<Term>> {
    match d.rule {
        Rule::Ax => Ok(Vec::new()),
        Rule::Inter | Rule::InterBot => Ok(vec![tmpl.clone(); d.premises.len()]),
        Rule::App => match tmpl {
            Term::App(f, a) => Ok(vec![(**f).clone(), (**a).clone()]),
            _ => Err(ExpandError::Shape("application")),
        },
        Rule::Abs | Rule::Mu | Rule::MuPrime => Ok(vec![open_child(tmpl, d)?]),
    }
}

/// Collected operand derivations, keyed by type, moved to the root contexts.
struct Collected {
    comps: BTreeMap<BasicType, Derivation>,
}

impl Collected {
    fn new() -> Self {
        Collected { comps: BTreeMap::new() }
    }

    fn add(&mut self, d: &Derivation, vctx: &VarContext, nctx: &NameContext) {
        for c in basic_components(d) {
            if let Some(a) = c.concl.basic() {
                self.comps.entry(a.clone()).or_insert_with(|| recontext(c, vctx, nctx));
            }
        }
    }

    /// The operand type and its derivation; falls back to `operand` when
    /// nothing was collected.
    fn finish(self, q: &Term, operand: &Derivation) -> (InterType, Derivation) {
        if self.comps.is_empty() {
            return (operand.concl.ty.clone(), operand.clone());
        }
        let ty: InterType = self.comps.keys().cloned().collect();
        let mut ds: Vec<Derivation> = self.comps.into_values().collect();
        let d = if ds.len() == 1 {
            ds.pop().expect("one")
        } else {
            Derivation::inter(operand.concl.vctx.clone(), q.clone(), operand.concl.nctx.clone(), ds)
        };
        (ty, d)
    }
}

/// `(λx.P)Q` from a derivation of `P[Q/x]` and one of `Q` in the same
/// contexts.
pub fn expand_beta(contractum: &Derivation, redex: &Term, operand: &Derivation) -> Res<Derivation> {
    let Term::App(f, q) = redex else { return Err(ExpandError::NotARedex) };
    let Term::Lam(hint, body) = f.as_ref() else { return Err(ExpandError::NotARedex) };
    check_contractum(contractum, redex)?;
    check_operand(contractum, q, operand)?;
    per_component(contractum, redex, &mut |d| {
        let x = fresh_for(&[d, operand], &[redex], "x");
        let tmpl = body.open_var(&x);
        let (g, n) = (&d.concl.vctx, &d.concl.nctx);
        let mut col = Collected::new();
        collect_var(&tmpl, d, &x, &mut col, g, n)?;
        let (s, arg) = col.finish(q, operand);
        let rebuilt = rebuild_var(&tmpl, d, &x, &s)?;
        let abs = Derivation::abs(&x, hint, rebuilt, g.clone());
        Ok(Derivation::app(abs, arg))
    })
}

fn collect_var(tmpl: &Term, d: &Derivation, x: &str, col: &mut Collected, g: &VarContext, n: &NameContext) -> Res<()> {
    if *tmpl == Term::var(x) {
        col.add(d, g, n);
        return Ok(());
    }
    for (t, p) in child_templates(tmpl, d)?.iter().zip(&d.premises) {
        collect_var(t, p, x, col, g, n)?;
    }
    Ok(())
}

fn rebuild_var(tmpl: &Term, d: &Derivation, x: &str, s: &InterType) -> Res<Derivation> {
    let mut vctx = d.concl.vctx.clone();
    if !s.is_omega() {
        vctx.insert(x.to_string(), s.clone());
    }
    let nctx = d.concl.nctx.clone();
    if *tmpl == Term::var(x) {
        let axioms: Vec<Derivation> = d
            .concl
            .ty
            .conjuncts()
            .map(|a| Derivation::ax(vctx.clone(), x, a.clone(), nctx.clone()))
            .collect();
        return Ok(match (d.rule, axioms.len()) {
            (Rule::Inter, _) => Derivation::inter(vctx, tmpl.clone(), nctx, axioms),
            (_, 1) => axioms.into_iter().next().expect("one"),
            _ => return Err(ExpandError::Shape("operand occurrence")),
        });
    }
    let premises = child_templates(tmpl, d)?
        .iter()
        .zip(&d.premises)
        .map(|(t, p)| rebuild_var(t, p, x, s))
        .collect::<Res<Vec<_>>>()?;
    Ok(Derivation {
        rule: d.rule,
        concl: Judgement::new(vctx, tmpl.clone(), d.concl.ty.clone(), nctx),
        premises,
        witness: d.witness.clone(),
    })
}

/// `(μβ.[δ]R)Q` from a derivation of its contractum and one of `Q` in the
/// same contexts.
pub fn expand_mu(contractum: &Derivation, redex: &Term, operand: &Derivation) -> Res<Derivation> {
    let Term::App(f, q) = redex else { return Err(ExpandError::NotARedex) };
    let Term::Mu(hint, target, body) = f.as_ref() else { return Err(ExpandError::NotARedex) };
    check_contractum(contractum, redex)?;
    check_operand(contractum, q, operand)?;
    let named = *target == Ref::Bound(0);
    per_component(contractum, redex, &mut |d| {
        let Witness::Name { name: gamma, .. } = &d.witness else {
            return Err(ExpandError::Shape("contractum root"));
        };
        let c = d.concl.basic().ok_or(ExpandError::Shape("root type"))?.cont.clone();
        let beta = fresh_for(&[d, operand], &[redex], "b");
        let tmpl = body.open_name(&beta);
        let (g, n) = (&d.concl.vctx, &d.concl.nctx);
        let mut col = Collected::new();
        let inner = &d.premises[0];
        let r_d = if named {
            if inner.rule != Rule::App {
                return Err(ExpandError::Shape("named contractum body"));
            }
            col.add(&inner.premises[1], g, n);
            &inner.premises[0]
        } else {
            inner
        };
        collect_struct(&tmpl, r_d, &beta, &mut col, g, n)?;
        let (s, arg) = col.finish(q, operand);
        let beta_ty = c.cons(s);
        let rebuilt = rebuild_struct(&tmpl, r_d, &beta, gamma, &beta_ty)?;
        let tgt = match target {
            Ref::Bound(0) => beta.clone(),
            Ref::Free(delta) => delta.clone(),
            Ref::Bound(_) => return Err(ExpandError::NotARedex),
        };
        let mu = Derivation::mu(&beta, &tgt, hint, rebuilt);
        Ok(Derivation::app(mu, arg))
    })
}

fn targets(tmpl: &Term, name: &str) -> bool {
    matches!(tmpl, Term::Mu(_, Ref::Free(b), _) if b == name)
}

fn collect_struct(
    tmpl: &Term,
    d: &Derivation,
    beta: &str,
    col: &mut Collected,
    g: &VarContext,
    n: &NameContext,
) -> Res<()> {
    if targets(tmpl, beta) && d.rule == Rule::MuPrime {
        let app = &d.premises[0];
        if app.rule != Rule::App {
            return Err(ExpandError::Shape("named operand"));
        }
        col.add(&app.premises[1], g, n);
        let t = open_child(tmpl, d)?;
        return collect_struct(&t, &app.premises[0], beta, col, g, n);
    }
    for (t, p) in child_templates(tmpl, d)?.iter().zip(&d.premises) {
        collect_struct(t, p, beta, col, g, n)?;
    }
    Ok(())
}

fn rebuild_struct(tmpl: &Term, d: &Derivation, beta: &str, gamma: &str, beta_ty: &ContType) -> Res<Derivation> {
    if targets(tmpl, beta) && d.rule == Rule::MuPrime {
        let Witness::Name { name: alpha, .. } = &d.witness else {
            return Err(ExpandError::Shape("mu witness"));
        };
        let Term::Mu(h, _, _) = tmpl else { unreachable!("targets checked the shape") };
        let t = open_child(tmpl, d)?;
        let premise = rebuild_struct(&t, &d.premises[0].premises[0], beta, gamma, beta_ty)?;
        return Ok(Derivation::mu(alpha, beta, h, premise));
    }
    let mut nctx = d.concl.nctx.clone();
    nctx.remove(gamma);
    nctx.insert(beta.to_string(), beta_ty.clone());
    let premises = child_templates(tmpl, d)?
        .iter()
        .zip(&d.premises)
        .map(|(t, p)| rebuild_struct(t, p, beta, gamma, beta_ty))
        .collect::<Res<Vec<_>>>()?;
    Ok(Derivation {
        rule: d.rule,
        concl: Judgement::new(d.concl.vctx.clone(), tmpl.clone(), d.concl.ty.clone(), nctx),
        premises,
        witness: d.witness.clone(),
    })
}

/// `μα.[β]μγ.[δ]M` from a derivation of its contractum.
pub fn expand_ren(contractum: &Derivation, redex: &Term) -> Res<Derivation> {
    let Term::Mu(ha, outer_t, inner) = redex else { return Err(ExpandError::NotARedex) };
    let Term::Mu(hg, _, _) = inner.as_ref() else { return Err(ExpandError::NotARedex) };
    check_contractum(contractum, redex)?;
    per_component(contractum, redex, &mut |d| {
        let Witness::Name { name: alpha, .. } = &d.witness else {
            return Err(ExpandError::Shape("contractum root"));
        };
        let beta = match outer_t {
            Ref::Bound(0) => alpha.clone(),
            Ref::Free(b) => b.clone(),
            Ref::Bound(_) => return Err(ExpandError::NotARedex),
        };
        let mut d = d.clone();
        if beta != *alpha && !d.concl.nctx.contains_key(&beta) {
            let mut n = d.concl.nctx.clone();
            n.insert(beta.clone(), ContType::omega());
            d = recontext(&d, &d.concl.vctx.clone(), &n);
        }
        let premise = &d.premises[0];
        let c_beta = premise.concl.nctx.get(&beta).cloned().ok_or(ExpandError::Shape("target type"))?;
        let gamma = fresh_for(&[&d], &[redex], "g");
        let inner_open = inner.open_name(alpha);
        let Term::Mu(_, inner_t, m) = &inner_open else { unreachable!("opened a μ") };
        let tmpl = m.open_name(&gamma);
        let inner_target = match inner_t {
            Ref::Bound(0) => gamma.clone(),
            Ref::Free(x) => x.clone(),
            Ref::Bound(_) => return Err(ExpandError::NotARedex),
        };
        let rebuilt = rebuild_ren(&tmpl, premise, &gamma, &c_beta)?;
        let inner_d = Derivation::mu(&gamma, &inner_target, hg, rebuilt);
        Ok(Derivation::mu(alpha, &beta, ha, inner_d))
    })
}

fn rebuild_ren(tmpl: &Term, d: &Derivation, gamma: &str, c_beta: &ContType) -> Res<Derivation> {
    let premises = child_templates(tmpl, d)?
        .iter()
        .zip(&d.premises)
        .map(|(t, p)| rebuild_ren(t, p, gamma, c_beta))
        .collect::<Res<Vec<_>>>()?;
    if targets(tmpl, gamma) {
        let Witness::Name { name: alpha, .. } = &d.witness else {
            return Err(ExpandError::Shape("mu witness"));
        };
        let Term::Mu(h, _, _) = tmpl else { unreachable!("targets checked the shape") };
        let premise = premises.into_iter().next().ok_or(ExpandError::Shape("mu premise"))?;
        return Ok(Derivation::mu(alpha, gamma, h, premise));
    }
    let mut nctx = d.concl.nctx.clone();
    nctx.insert(gamma.to_string(), c_beta.clone());
    Ok(Derivation {
        rule: d.rule,
        concl: Judgement::new(d.concl.vctx.clone(), tmpl.clone(), d.concl.ty.clone(), nctx),
        premises,
        witness: d.witness.clone(),
    })
}

/// Expands any root redex. `operand` is required for β and μ redexes.
pub fn expand_root(contractum: &Derivation, redex: &Term, operand: Option<&Derivation>) -> Res<Derivation> {
    use crate::reduce::{redex_kind, RedexKind};
    match redex_kind(redex) {
        Some(RedexKind::Beta) => expand_beta(contractum, redex, operand.ok_or(ExpandError::WrongOperand)?),
        Some(RedexKind::MuNamed | RedexKind::MuOther) => {
            expand_mu(contractum, redex, operand.ok_or(ExpandError::WrongOperand)?)
        }
        Some(RedexKind::Ren) => expand_ren(contractum, redex),
        None => Err(ExpandError::NotARedex),
    }
}
