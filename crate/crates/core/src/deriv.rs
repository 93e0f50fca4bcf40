//! Derivations and their checker.
//!
//! A derivation is an explicit tree of rule applications. Every node stores
//! its full conclusion, and the nodes for `Abs`, `Mu` and `MuPrime` also
//! store the witness used to open the binder (the fresh variable or name,
//! and for the μ rules the continuation `D` of the premise).

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::approx::join_all;
use crate::pretty::pretty;
use crate::term::{Ident, Ref, Term};
use crate::types::{
    ctx_omega_free, subtype_cont, subtype_inter, BasicType, ContType, InterType, NameContext,
    VarContext,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum System {
    /// The strict system.
    S,
    /// ω only for ⊥, intersections of compatible subjects by join.
    Bot,
    /// ω-free types, intersections of at least two conjuncts.
    SN,
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::S => "S",
            System::Bot => "Bot",
            System::SN => "SN",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    Ax,
    Inter,
    Abs,
    App,
    Mu,
    MuPrime,
    InterBot,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Ax => "Ax",
            Rule::Inter => "Inter",
            Rule::Abs => "Abs",
            Rule::App => "App",
            Rule::Mu => "Mu",
            Rule::MuPrime => "MuPrime",
            Rule::InterBot => "InterBot",
        }
    }

    pub fn from_name(s: &str) -> Option<Rule> {
        [
            Rule::Ax,
            Rule::Inter,
            Rule::Abs,
            Rule::App,
            Rule::Mu,
            Rule::MuPrime,
            Rule::InterBot,
        ]
        .into_iter()
        .find(|r| r.name() == s)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Judgement {
    pub vctx: VarContext,
    pub term: Term,
    pub ty: InterType,
    pub nctx: NameContext,
}

impl Judgement {
    pub fn new(vctx: VarContext, term: Term, ty: InterType, nctx: NameContext) -> Self {
        Judgement { vctx, term, ty, nctx }
    }

    /// The conclusion type when it is a single basic type.
    pub fn basic(&self) -> Option<&BasicType> {
        self.ty.as_basic()
    }
}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.vctx.iter().map(|(x, s)| format!("{x}:{s}")).collect();
        let d: Vec<String> = self.nctx.iter().map(|(a, c)| format!("{a}:{c}")).collect();
        write!(
            f,
            "{{{}}} |- {} : {} | {{{}}}",
            g.join(", "),
            pretty(&self.term),
            self.ty,
            d.join(", ")
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Witness {
    None,
    /// The variable opening an abstraction.
    Var(Ident),
    /// The name opening a μ-binder and the continuation `D` of the premise.
    Name { name: Ident, cont: ContType },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub rule: Rule,
    pub concl: Judgement,
    pub premises: Vec<Derivation>,
    pub witness: Witness,
}

/// The rule tree of a derivation, with both intersection rules identified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    pub rule: Rule,
    pub children: Vec<Skeleton>,
}

impl Derivation {
    pub fn ax(vctx: VarContext, x: &str, a: BasicType, nctx: NameContext) -> Self {
        Derivation {
            rule: Rule::Ax,
            concl: Judgement::new(vctx, Term::var(x), InterType::single(a), nctx),
            premises: Vec::new(),
            witness: Witness::None,
        }
    }

    /// `(∩)` over derivations of basic types for the same subject.
    pub fn inter(vctx: VarContext, term: Term, nctx: NameContext, premises: Vec<Derivation>) -> Self {
        let ty = premises.iter().flat_map(|d| d.concl.ty.0.iter().cloned()).collect();
        Derivation {
            rule: Rule::Inter,
            concl: Judgement::new(vctx, term, ty, nctx),
            premises,
            witness: Witness::None,
        }
    }

    /// `Γ ⊢ M : ω | Δ` by the empty intersection.
    pub fn omega(vctx: VarContext, term: Term, nctx: NameContext) -> Self {
        Derivation::inter(vctx, term, nctx, Vec::new())
    }

    /// `(∩⊥)`: the subject is the join of the premise subjects.
    pub fn inter_bot(premises: Vec<Derivation>, vctx: VarContext, nctx: NameContext) -> Option<Self> {
        let term = join_all(premises.iter().map(|d| &d.concl.term))?;
        let ty = premises.iter().flat_map(|d| d.concl.ty.0.iter().cloned()).collect();
        Some(Derivation {
            rule: Rule::InterBot,
            concl: Judgement::new(vctx, term, ty, nctx),
            premises,
            witness: Witness::None,
        })
    }

    /// `(Abs)` from a premise typing the body opened with `x`.
    pub fn abs(x: &str, hint: &str, premise: Derivation, vctx: VarContext) -> Self {
        let s = premise.concl.vctx.get(x).cloned().unwrap_or_default();
        let body_ty = premise.concl.basic().expect("Abs premise has a basic type").clone();
        let term = Term::Lam(hint.to_string(), Box::new(premise.concl.term.close_var(x)));
        Derivation {
            rule: Rule::Abs,
            concl: Judgement::new(vctx, term, InterType::single(body_ty.cons(s)), premise.concl.nctx.clone()),
            premises: vec![premise],
            witness: Witness::Var(x.to_string()),
        }
    }

    /// `(App)`; the conclusion contexts are those of the function premise.
    pub fn app(fun: Derivation, arg: Derivation) -> Self {
        let (_, rest) = fun.concl.basic().and_then(|b| b.uncons()).expect("App function has an arrow type");
        let concl = Judgement::new(
            fun.concl.vctx.clone(),
            Term::app(fun.concl.term.clone(), arg.concl.term.clone()),
            InterType::single(rest),
            fun.concl.nctx.clone(),
        );
        Derivation { rule: Rule::App, concl, premises: vec![fun, arg], witness: Witness::None }
    }

    /// `(μ)` or `(μ′)`: binds the name `alpha` of the premise, which names
    /// its body with `target` (`alpha` itself for `(μ)`).
    pub fn mu(alpha: &str, target: &str, hint: &str, premise: Derivation) -> Self {
        let mut nctx = premise.concl.nctx.clone();
        let c = nctx.remove(alpha).unwrap_or_default();
        let d = premise.concl.basic().expect("Mu premise has a basic type").clone();
        let tref = if target == alpha { Ref::Bound(0) } else { Ref::free(target) };
        let term = Term::Mu(hint.to_string(), tref, Box::new(premise.concl.term.close_name(alpha)));
        let rule = if target == alpha { Rule::Mu } else { Rule::MuPrime };
        Derivation {
            rule,
            concl: Judgement::new(
                premise.concl.vctx.clone(),
                term,
                InterType::single(BasicType::new(c, d.head.clone())),
                nctx,
            ),
            witness: Witness::Name { name: alpha.to_string(), cont: d.cont },
            premises: vec![premise],
        }
    }

    pub fn skeleton(&self) -> Skeleton {
        let rule = if self.rule == Rule::InterBot { Rule::Inter } else { self.rule };
        Skeleton { rule, children: self.premises.iter().map(Derivation::skeleton).collect() }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    /// Visits every node, premises before conclusions.
    pub fn for_each(&self, f: &mut impl FnMut(&Derivation)) {
        for p in &self.premises {
            p.for_each(f);
        }
        f(self);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckErrorKind {
    #[error("rule {0} is not part of system {1}")]
    RuleNotInSystem(Rule, System),
    #[error("rule {rule} expects {expected} premises, found {found}")]
    Arity { rule: Rule, expected: String, found: usize },
    #[error("subject does not fit rule {rule}: {term}")]
    Subject { rule: Rule, term: String },
    #[error("type {ty} does not fit rule {rule}")]
    Type { rule: Rule, ty: String },
    #[error("side condition {lhs} <= {rhs} fails")]
    NotLeq { lhs: String, rhs: String },
    #[error("{0}")]
    Context(String),
    #[error("premise {index} does not match: {detail}")]
    Premise { index: usize, detail: String },
    #[error("witness does not fit rule {rule}")]
    Witness { rule: Rule },
    #[error("omega occurs in {0}")]
    Omega(String),
    #[error("join of the premise subjects is undefined")]
    JoinUndefined,
    #[error("subject has dangling bound indices")]
    NotLocallyClosed,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("at {}: {kind}", path_string(path))]
pub struct CheckError {
    /// Premise indices from the root to the failing node.
    pub path: Vec<usize>,
    pub kind: CheckErrorKind,
}

fn path_string(path: &[usize]) -> String {
    if path.is_empty() {
        "root".into()
    } else {
        path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Validates every node of `d` against the rules of `system`.
pub fn check_derivation(d: &Derivation, system: System) -> Result<(), CheckError> {
    let mut path = Vec::new();
    check_node(d, system, &mut path)
}

fn check_node(d: &Derivation, system: System, path: &mut Vec<usize>) -> Result<(), CheckError> {
    check_local(d, system).map_err(|kind| CheckError { path: path.clone(), kind })?;
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_node(p, system, path)?;
        path.pop();
    }
    Ok(())
}

type Check = Result<(), CheckErrorKind>;

fn arity(rule: Rule, d: &Derivation, expected: usize) -> Check {
    if d.premises.len() == expected {
        Ok(())
    } else {
        Err(CheckErrorKind::Arity { rule, expected: expected.to_string(), found: d.premises.len() })
    }
}

fn subject_err(rule: Rule, t: &Term) -> CheckErrorKind {
    CheckErrorKind::Subject { rule, term: pretty(t) }
}

fn basic_of(rule: Rule, j: &Judgement) -> Result<&BasicType, CheckErrorKind> {
    j.basic().ok_or_else(|| CheckErrorKind::Type { rule, ty: j.ty.to_string() })
}

fn premise_eq<T: PartialEq + fmt::Display>(index: usize, what: &str, got: &T, want: &T) -> Check {
    if got == want {
        Ok(())
    } else {
        Err(CheckErrorKind::Premise { index, detail: format!("{what} is {got}, expected {want}") })
    }
}

struct CtxDisplay<'a, T>(&'a crate::types::Context<T>);

impl<T: fmt::Display> fmt::Display for CtxDisplay<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl<T: PartialEq> PartialEq for CtxDisplay<'_, T> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

fn same_contexts(index: usize, p: &Judgement, vctx: &VarContext, nctx: &NameContext) -> Check {
    premise_eq(index, "variable context", &CtxDisplay(&p.vctx), &CtxDisplay(vctx))?;
    premise_eq(index, "name context", &CtxDisplay(&p.nctx), &CtxDisplay(nctx))
}

fn check_local(d: &Derivation, system: System) -> Check {
    let j = &d.concl;
    if !j.term.is_locally_closed() {
        return Err(CheckErrorKind::NotLocallyClosed);
    }
    if system == System::SN {
        if !j.ty.omega_free() {
            return Err(CheckErrorKind::Omega(format!("type {}", j.ty)));
        }
        if !ctx_omega_free(&j.vctx) {
            return Err(CheckErrorKind::Omega("the variable context".into()));
        }
        if !ctx_omega_free(&j.nctx) {
            return Err(CheckErrorKind::Omega("the name context".into()));
        }
        if let Witness::Name { cont, .. } = &d.witness {
            if !cont.omega_free() {
                return Err(CheckErrorKind::Omega(format!("witness {cont}")));
            }
        }
    }
    if !matches!(
        (d.rule, &d.witness),
        (Rule::Abs, Witness::Var(_))
            | (Rule::Mu | Rule::MuPrime, Witness::Name { .. })
            | (Rule::Ax | Rule::Inter | Rule::InterBot | Rule::App, Witness::None)
    ) {
        return Err(CheckErrorKind::Witness { rule: d.rule });
    }
    match d.rule {
        Rule::Ax => check_ax(d),
        Rule::Inter | Rule::InterBot => check_inter(d, system),
        Rule::Abs => check_abs(d),
        Rule::App => check_app(d),
        Rule::Mu | Rule::MuPrime => check_mu(d),
    }
}

fn check_ax(d: &Derivation) -> Check {
    arity(Rule::Ax, d, 0)?;
    let j = &d.concl;
    let Term::Var(Ref::Free(x)) = &j.term else {
        return Err(subject_err(Rule::Ax, &j.term));
    };
    let a = basic_of(Rule::Ax, j)?;
    let s = j
        .vctx
        .get(x)
        .ok_or_else(|| CheckErrorKind::Context(format!("{x} is not in the variable context")))?;
    if subtype_inter(s, &j.ty) {
        Ok(())
    } else {
        Err(CheckErrorKind::NotLeq { lhs: s.to_string(), rhs: a.to_string() })
    }
}

fn check_inter(d: &Derivation, system: System) -> Check {
    let j = &d.concl;
    let rule = d.rule;
    match (rule, system) {
        (Rule::Inter, System::Bot) => return Err(CheckErrorKind::RuleNotInSystem(rule, system)),
        (Rule::InterBot, System::S | System::SN) => {
            return Err(CheckErrorKind::RuleNotInSystem(rule, system))
        }
        _ => {}
    }
    let n = d.premises.len();
    let arity_ok = match system {
        System::SN => n >= 2,
        _ => n == 0 || n >= 2,
    };
    if !arity_ok {
        let expected = if system == System::SN { "at least 2" } else { "0 or at least 2" };
        return Err(CheckErrorKind::Arity { rule, expected: expected.into(), found: n });
    }
    let mut conjuncts = InterType::omega();
    for (i, p) in d.premises.iter().enumerate() {
        same_contexts(i, &p.concl, &j.vctx, &j.nctx)?;
        let a = p.concl.basic().ok_or_else(|| CheckErrorKind::Premise {
            index: i,
            detail: format!("type {} is not basic", p.concl.ty),
        })?;
        conjuncts.0.insert(a.clone());
        if rule == Rule::Inter {
            premise_eq(i, "subject", &PrettyTerm(&p.concl.term), &PrettyTerm(&j.term))?;
        }
    }
    if conjuncts != j.ty {
        return Err(CheckErrorKind::Type { rule, ty: j.ty.to_string() });
    }
    if rule == Rule::InterBot {
        let joined = join_all(d.premises.iter().map(|p| &p.concl.term)).ok_or(CheckErrorKind::JoinUndefined)?;
        if joined != j.term {
            return Err(CheckErrorKind::Subject { rule, term: pretty(&j.term) });
        }
    }
    Ok(())
}

struct PrettyTerm<'a>(&'a Term);

impl fmt::Display for PrettyTerm<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self.0))
    }
}

impl PartialEq for PrettyTerm<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

fn check_abs(d: &Derivation) -> Check {
    arity(Rule::Abs, d, 1)?;
    let j = &d.concl;
    let Term::Lam(_, body) = &j.term else {
        return Err(subject_err(Rule::Abs, &j.term));
    };
    let Witness::Var(x) = &d.witness else { unreachable!("witness checked") };
    let a = basic_of(Rule::Abs, j)?;
    let (s, rest) = a
        .uncons()
        .ok_or_else(|| CheckErrorKind::Type { rule: Rule::Abs, ty: j.ty.to_string() })?;
    if j.vctx.contains_key(x) {
        return Err(CheckErrorKind::Context(format!("bound variable {x} is already in the context")));
    }
    if j.term.free_vars().contains(x) {
        return Err(CheckErrorKind::Context(format!("bound variable {x} occurs free in the subject")));
    }
    let p = &d.premises[0].concl;
    let mut extended = j.vctx.clone();
    extended.insert(x.clone(), s.clone());
    let ok_ctx = p.vctx == extended || (s.is_omega() && p.vctx == j.vctx);
    if !ok_ctx {
        premise_eq(0, "variable context", &CtxDisplay(&p.vctx), &CtxDisplay(&extended))?;
    }
    premise_eq(0, "name context", &CtxDisplay(&p.nctx), &CtxDisplay(&j.nctx))?;
    premise_eq(0, "subject", &PrettyTerm(&p.term), &PrettyTerm(&body.open_var(x)))?;
    premise_eq(0, "type", &p.ty, &InterType::single(rest))
}

fn check_app(d: &Derivation) -> Check {
    arity(Rule::App, d, 2)?;
    let j = &d.concl;
    let Term::App(m, n) = &j.term else {
        return Err(subject_err(Rule::App, &j.term));
    };
    let c = basic_of(Rule::App, j)?;
    let (f, a) = (&d.premises[0].concl, &d.premises[1].concl);
    same_contexts(0, f, &j.vctx, &j.nctx)?;
    same_contexts(1, a, &j.vctx, &j.nctx)?;
    premise_eq(0, "subject", &PrettyTerm(&f.term), &PrettyTerm(m))?;
    premise_eq(1, "subject", &PrettyTerm(&a.term), &PrettyTerm(n))?;
    premise_eq(0, "type", &f.ty, &InterType::single(c.cons(a.ty.clone())))
}

fn check_mu(d: &Derivation) -> Check {
    arity(d.rule, d, 1)?;
    let j = &d.concl;
    let Term::Mu(_, target, body) = &j.term else {
        return Err(subject_err(d.rule, &j.term));
    };
    let Witness::Name { name: alpha, cont: dcont } = &d.witness else { unreachable!("witness checked") };
    match (d.rule, target) {
        (Rule::Mu, Ref::Bound(0)) | (Rule::MuPrime, Ref::Free(_)) => {}
        _ => return Err(subject_err(d.rule, &j.term)),
    }
    let c = basic_of(d.rule, j)?;
    if j.nctx.contains_key(alpha) {
        return Err(CheckErrorKind::Context(format!("bound name {alpha} is already in the name context")));
    }
    if j.term.free_names().contains(alpha) {
        return Err(CheckErrorKind::Context(format!("bound name {alpha} occurs free in the subject")));
    }
    let lower = match target {
        Ref::Free(beta) => j
            .nctx
            .get(beta)
            .ok_or_else(|| CheckErrorKind::Context(format!("{beta} is not in the name context")))?,
        Ref::Bound(_) => &c.cont,
    };
    if !subtype_cont(lower, dcont) {
        return Err(CheckErrorKind::NotLeq { lhs: lower.to_string(), rhs: dcont.to_string() });
    }
    let p = &d.premises[0].concl;
    let mut extended = j.nctx.clone();
    extended.insert(alpha.clone(), c.cont.clone());
    premise_eq(0, "variable context", &CtxDisplay(&p.vctx), &CtxDisplay(&j.vctx))?;
    if !(c.cont.is_omega() && p.nctx == j.nctx) {
        premise_eq(0, "name context", &CtxDisplay(&p.nctx), &CtxDisplay(&extended))?;
    }
    premise_eq(0, "subject", &PrettyTerm(&p.term), &PrettyTerm(&body.open_name(alpha)))?;
    premise_eq(
        0,
        "type",
        &p.ty,
        &InterType::single(BasicType::new(dcont.clone(), c.head.clone())),
    )
}
