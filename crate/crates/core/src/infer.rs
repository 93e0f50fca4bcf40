//! Bounded type inference and the characterisation reports built on it.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::deriv::{check_derivation, Derivation, System};
use crate::exhaustive::{prove, search, Search, SearchBounds, Target};
use crate::graph::{is_sn, reduction_graph, SnResult};
use crate::reduce::{is_hnf, is_nf, normalize, Strategy};
use crate::term::{Position, Term};
use crate::transform::reduce_deriv;
use crate::typer::{type_term, Mode};
use crate::types::{BasicType, ContType, InterType, NameContext, VarContext};

/// Results returned by [`infer`] at most.
pub const INFER_LIMIT: usize = 32;
/// Contractions allowed to the constructive typer inside [`infer`].
pub const INFER_FUEL: usize = 1000;

fn cont_width(c: &ContType) -> usize {
    c.0.iter().map(inter_width).fold(c.0.len(), usize::max)
}

fn basic_width(a: &BasicType) -> usize {
    cont_width(&a.cont)
}

fn inter_width(s: &InterType) -> usize {
    s.conjuncts().map(basic_width).fold(s.0.len(), usize::max)
}

/// The largest intersection arity or continuation length appearing in a
/// conclusion type or μ-witness of `d`.
pub fn derivation_width(d: &Derivation) -> usize {
    let mut w = 0;
    d.for_each(&mut |n| {
        w = w.max(inter_width(&n.concl.ty));
        if let crate::deriv::Witness::Name { cont, .. } = &n.witness {
            w = w.max(cont_width(cont));
        }
    });
    w
}

fn within(d: &Derivation, depth: usize, width: usize) -> bool {
    d.height() <= depth && derivation_width(d) <= width
}

type Triple = (VarContext, InterType, NameContext);

fn triple(d: &Derivation) -> Triple {
    (d.concl.vctx.clone(), d.concl.ty.clone(), d.concl.nctx.clone())
}

/// Derivations for `m` in `system` of height at most `depth` and width at
/// most `width`, with distinct conclusions. Every result passes
/// [`check_derivation`]. An empty list means nothing was found.
pub fn infer(m: &Term, system: System, depth: usize, width: usize) -> Vec<Derivation> {
    infer_with(m, system, &SearchBounds::new(depth, width), INFER_FUEL)
}

pub fn infer_with(m: &Term, system: System, bounds: &SearchBounds, fuel: usize) -> Vec<Derivation> {
    let mut out: Vec<Derivation> = Vec::new();
    let mut seen: BTreeSet<Triple> = BTreeSet::new();
    let mut push = |d: Derivation, out: &mut Vec<Derivation>| {
        if out.len() < INFER_LIMIT
            && within(&d, bounds.depth, bounds.width)
            && check_derivation(&d, system).is_ok()
            && seen.insert(triple(&d))
        {
            out.push(d);
        }
    };
    let modes: &[Mode] = match system {
        System::SN => &[Mode::Sn],
        System::S => {
            push(Derivation::omega(VarContext::new(), m.clone(), NameContext::new()), &mut out);
            &[Mode::Hnf, Mode::Nf]
        }
        System::Bot => return out,
    };
    for &mode in modes {
        if let Ok(d) = type_term(m, mode, fuel) {
            push(d, &mut out);
        }
    }
    let target = if system == System::SN { Target::SN } else { Target::S };
    if let Search::Found(ds) = search(m, target, bounds, INFER_LIMIT) {
        for d in ds {
            push(d, &mut out);
        }
    }
    out
}

/// A three-valued answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Unknown => "unknown",
        })
    }
}

/// The typing side of a characterisation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Typing {
    Found(Box<Derivation>),
    /// The bounded space was searched exhaustively.
    NotFound,
    Unknown,
}

impl Typing {
    pub fn tri(&self) -> Tri {
        match self {
            Typing::Found(_) => Tri::Yes,
            Typing::NotFound => Tri::No,
            Typing::Unknown => Tri::Unknown,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub hnf_by_reduction: Tri,
    pub nf_by_reduction: Tri,
    pub sn_by_graph: SnResult,
    pub typeable_s_nonomega: Typing,
    pub typeable_omega_free: Typing,
    pub typeable_sn: Typing,
}

/// One characterisation: a reduction property against a typing property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub name: &'static str,
    pub reduction: Tri,
    pub typing: Tri,
}

impl Comparison {
    pub fn conclusive(&self) -> bool {
        self.reduction != Tri::Unknown && self.typing != Tri::Unknown
    }

    pub fn agrees(&self) -> bool {
        !self.conclusive() || self.reduction == self.typing
    }
}

impl Report {
    pub fn sn_tri(&self) -> Tri {
        match self.sn_by_graph {
            SnResult::Sn(_) => Tri::Yes,
            SnResult::NotSn(_) => Tri::No,
            SnResult::Unknown => Tri::Unknown,
        }
    }

    pub fn comparisons(&self) -> [Comparison; 3] {
        [
            Comparison { name: "hnf", reduction: self.hnf_by_reduction, typing: self.typeable_s_nonomega.tri() },
            Comparison { name: "nf", reduction: self.nf_by_reduction, typing: self.typeable_omega_free.tri() },
            Comparison { name: "sn", reduction: self.sn_tri(), typing: self.typeable_sn.tri() },
        ]
    }

    /// True when some characterisation fails on conclusive evidence.
    pub fn disagreement(&self) -> bool {
        self.comparisons().iter().any(|c| !c.agrees())
    }
}

/// Whether some reduct satisfies `good`: yes if lor finds one or the graph
/// contains one, no if the graph is complete and has none.
fn reaches(m: &Term, fuel: usize, good: fn(&Term) -> bool) -> Tri {
    let out = normalize(m, Strategy::Lor, fuel);
    if good(m) || out.steps.iter().any(|s| good(&s.result)) {
        return Tri::Yes;
    }
    let g = reduction_graph(m, fuel);
    if g.nodes.iter().any(good) {
        Tri::Yes
    } else if g.complete {
        Tri::No
    } else {
        Tri::Unknown
    }
}

fn typing_side(m: &Term, mode: Mode, target: Target, fuel: usize, bounds: &SearchBounds) -> Typing {
    if let Ok(d) = type_term(m, mode, fuel) {
        if check_derivation(&d, target.system()).is_ok() {
            return Typing::Found(Box::new(d));
        }
    }
    match search(m, target, bounds, 1) {
        Search::Found(mut ds) => Typing::Found(Box::new(ds.remove(0))),
        Search::NotFound => Typing::NotFound,
        Search::Unknown => Typing::Unknown,
    }
}

/// Computes both sides of the head-normalisation, normalisation and strong
/// normalisation characterisations independently.
pub fn classify(m: &Term, fuel: usize, depth: usize, width: usize) -> Report {
    let bounds = SearchBounds::new(depth, width);
    Report {
        hnf_by_reduction: reaches(m, fuel, is_hnf),
        nf_by_reduction: reaches(m, fuel, is_nf),
        sn_by_graph: is_sn(m, fuel),
        typeable_s_nonomega: typing_side(m, Mode::Hnf, Target::S, fuel, &bounds),
        typeable_omega_free: typing_side(m, Mode::Nf, Target::OmegaFree, fuel, &bounds),
        typeable_sn: typing_side(m, Mode::Sn, Target::SN, fuel, &bounds),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubjectReduction {
    /// A derivation with the same contexts and type for the contractum.
    Ok(Box<Derivation>),
    /// Neither the direct transformation nor the bounded search produced one.
    Unknown(String),
}

/// Finds a derivation for the reduct of `d`'s subject at `pos` with the
/// same contexts and type, first by transforming `d` and otherwise by
/// bounded search.
pub fn check_subject_reduction(d: &Derivation, pos: &Position, system: System, bounds: &SearchBounds) -> SubjectReduction {
    let why = match reduce_deriv(d, pos) {
        Ok(r) => match check_derivation(&r, system) {
            Ok(()) => return SubjectReduction::Ok(Box::new(r)),
            Err(e) => e.to_string(),
        },
        Err(e) => e.to_string(),
    };
    let Ok(reduct) = crate::reduce::contract(&d.concl.term, pos) else {
        return SubjectReduction::Unknown(format!("{pos} is not a redex"));
    };
    let j = &d.concl;
    match prove(&j.vctx, &reduct, &j.ty, &j.nctx, system, bounds) {
        Search::Found(mut ds) => SubjectReduction::Ok(Box::new(ds.remove(0))),
        _ => SubjectReduction::Unknown(why),
    }
}

/// A derivation `Γ ⊢ a : S | Δ` for an approximant, by a search that needs
/// no type guessing because approximants contain no redexes.
pub fn type_approximant(g: &VarContext, a: &Term, s: &InterType, n: &NameContext) -> Option<Derivation> {
    let width = 1 + max_arity(g, s, n);
    let bounds = SearchBounds { depth: 3 * a.size() + 3, width, nesting: 0, budget: 500_000 };
    match prove(g, a, s, n, System::S, &bounds) {
        Search::Found(mut ds) => Some(ds.remove(0)),
        _ => None,
    }
}

fn max_arity(g: &VarContext, s: &InterType, n: &NameContext) -> usize {
    let w = g.values().map(inter_width).chain(n.values().map(cont_width)).max().unwrap_or(0);
    w.max(inter_width(s))
}

/// The approximants of `m` (within `fuel` steps) admitting exactly the
/// conclusion of `d`, with their derivations.
pub fn approximant_witness(m: &Term, d: &Derivation, fuel: usize) -> Option<(Term, Derivation)> {
    let set = crate::approx::approximants(m, fuel);
    let j = &d.concl;
    set.maximal
        .iter()
        .find_map(|a| type_approximant(&j.vctx, a, &j.ty, &j.nctx).map(|ad| (a.clone(), ad)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;
    use crate::type_syntax::parse_inter;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn identity_in_sn() {
        let ds = infer(&p("\\x.x"), System::SN, 3, 1);
        let want = parse_inter("((O)->'p0 * O)->'p0").unwrap();
        assert!(ds.iter().any(|d| d.concl.ty == want && d.concl.vctx.is_empty() && d.concl.nctx.is_empty()));
    }

    #[test]
    fn omega_always_in_s() {
        for src in ["x", "(\\x.x x) (\\x.x x)", "bot", "mu a.[b] x"] {
            let ds = infer(&p(src), System::S, 1, 1);
            assert!(ds.iter().any(|d| d.concl.ty.is_omega() && d.concl.vctx.is_empty()), "{src}");
        }
    }

    #[test]
    fn omega_not_sn_typeable() {
        for (d, w) in [(2, 1), (4, 2), (6, 2)] {
            assert!(infer(&p("(\\x.x x) (\\x.x x)"), System::SN, d, w).is_empty());
        }
    }

    #[test]
    fn classify_examples() {
        let r = classify(&p("\\x.x"), 100, 6, 3);
        assert!(r.comparisons().iter().all(|c| c.reduction == Tri::Yes && c.typing == Tri::Yes));

        let r = classify(&p("(\\x.x x) (\\x.x x)"), 100, 6, 2);
        assert_eq!(r.hnf_by_reduction, Tri::No);
        assert_eq!(r.nf_by_reduction, Tri::No);
        assert!(matches!(r.sn_by_graph, SnResult::NotSn(_)));
        assert_eq!(r.typeable_s_nonomega, Typing::NotFound);
        assert_eq!(r.typeable_omega_free, Typing::NotFound);
        assert_eq!(r.typeable_sn, Typing::NotFound);

        let r = classify(&p("mu a.[b] x"), 100, 6, 3);
        assert_eq!(r.hnf_by_reduction, Tri::Yes);
        assert!(matches!(r.typeable_s_nonomega, Typing::Found(_)));

        let r = classify(&p("mu a.[b] mu g.[d] x"), 100, 6, 3);
        assert!(!is_hnf(&p("mu a.[b] mu g.[d] x")));
        assert_eq!(r.hnf_by_reduction, Tri::Yes);
        assert!(matches!(r.typeable_s_nonomega, Typing::Found(_)));
        assert!(!r.disagreement());
    }

    #[test]
    fn subject_reduction_examples() {
        let m = p("(\\x.x) y");
        let d = type_term(&m, Mode::Sn, 10).unwrap();
        let b = SearchBounds::new(4, 2);
        assert!(matches!(check_subject_reduction(&d, &Position::root(), System::S, &b), SubjectReduction::Ok(_)));
        let w = Derivation::omega(VarContext::new(), m, NameContext::new());
        assert!(matches!(check_subject_reduction(&w, &Position::root(), System::S, &b), SubjectReduction::Ok(_)));
    }

    #[test]
    fn approximant_witness_found() {
        for src in ["(\\x.x) y", "x ((\\y.y y) (\\y.y y))", "mu a.[b] (\\x.x) y", "(mu b.[b] x) y"] {
            let m = p(src);
            let d = type_term(&m, Mode::Hnf, 100).unwrap();
            let (a, ad) = approximant_witness(&m, &d, 50).unwrap_or_else(|| panic!("{src}"));
            check_derivation(&ad, System::S).unwrap();
            assert_eq!(ad.concl.term, a);
            assert_eq!((&ad.concl.vctx, &ad.concl.ty, &ad.concl.nctx), (&d.concl.vctx, &d.concl.ty, &d.concl.nctx));
        }
    }
}
