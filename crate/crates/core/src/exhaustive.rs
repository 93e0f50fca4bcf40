//! Bounded derivation search.
//!
//! The search is goal directed: given contexts, a subject and a basic type
//! it tries every rule that can conclude the goal. Types are drawn from a
//! finite universe: basic types of nesting at most `nesting` over the
//! constants `p0` and `p1`, with intersections of arity and continuations
//! of length at most `width`. Within that universe and the height bound the
//! search is complete, so an empty answer is a real negative for those
//! bounds. A work budget turns very large searches into `Unknown`.
//!
//! Most choices are forced. Axioms and applications headed by a variable
//! read the argument types off the context, abstractions read the bound
//! type off the goal, and a μ-binder's continuation must weaken a known
//! lower bound. Only an application headed by a redex needs to guess the
//! operand type `S`. Typeability is monotone in a variable's context entry,
//! so it suffices to try the largest `S` the operand can actually be given.

use std::collections::{BTreeSet, HashMap};

use crate::deriv::{check_derivation, Derivation, System};
use crate::term::{fresh_ident, Ident, Ref, Term};
use crate::transform::minimize_contexts;
use crate::types::{BasicType, ContType, InterType, NameContext, TypeConst, VarContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Maximum derivation height.
    pub depth: usize,
    /// Maximum intersection arity and continuation length.
    pub width: usize,
    /// Maximum nesting of arrows in a basic type.
    pub nesting: usize,
    /// Goals examined before giving up.
    pub budget: usize,
}

impl SearchBounds {
    pub fn new(depth: usize, width: usize) -> Self {
        SearchBounds { depth, width, nesting: 1, budget: 200_000 }
    }
}

/// What the root judgement has to satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Target {
    /// Any basic type in the strict system.
    S,
    /// The strict system with ω-free contexts and type.
    OmegaFree,
    /// The ω-free system.
    SN,
}

impl Target {
    pub fn system(self) -> System {
        match self {
            Target::S | Target::OmegaFree => System::S,
            Target::SN => System::SN,
        }
    }

    fn root_omega_free(self) -> bool {
        self != Target::S
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Search {
    Found(Vec<Derivation>),
    /// The whole bounded space was explored.
    NotFound,
    /// The budget ran out first.
    Unknown,
}

impl Search {
    pub fn found(&self) -> Option<&[Derivation]> {
        match self {
            Search::Found(ds) => Some(ds),
            _ => None,
        }
    }
}

struct OutOfBudget;

type Step<T> = Result<T, OutOfBudget>;

/// All intersections of `1..=max` elements of `items`, smallest first.
fn subsets(items: &[BasicType], max: usize) -> Vec<InterType> {
    fn go(items: &[BasicType], k: usize, start: usize, cur: &mut Vec<BasicType>, out: &mut Vec<InterType>) {
        if cur.len() == k {
            out.push(cur.iter().cloned().collect());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for k in 1..=max.min(items.len()) {
        go(items, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Basic types of nesting at most `nesting`, bucketed by level.
/// `levels[k]` contains `levels[k - 1]`.
fn universe(nesting: usize, width: usize, omega: bool, consts: &[TypeConst]) -> Vec<Vec<BasicType>> {
    let mut levels: Vec<Vec<BasicType>> = vec![consts.iter().cloned().map(BasicType::atom).collect()];
    for _ in 0..nesting {
        let prev = levels.last().expect("level 0 exists");
        let mut comps = subsets(prev, width);
        if omega {
            comps.insert(0, InterType::omega());
        }
        let mut conts = vec![ContType::omega()];
        let mut frontier = vec![ContType::omega()];
        for _ in 0..width {
            let next: Vec<ContType> = frontier
                .iter()
                .flat_map(|c| comps.iter().map(move |s| ContType({
                    let mut v = c.0.clone();
                    v.push(s.clone());
                    v
                })))
                .collect();
            conts.extend(next.iter().cloned());
            frontier = next;
        }
        let level = conts
            .iter()
            .flat_map(|c| consts.iter().map(move |p| BasicType::new(c.clone(), p.clone())))
            .collect();
        levels.push(level);
    }
    levels
}

/// Every `D` with `lower ≤ D` whose components have arity at most `width`.
fn weakenings(lower: &ContType, width: usize, omega: bool) -> Vec<ContType> {
    let choices: Vec<Vec<InterType>> = lower
        .0
        .iter()
        .map(|s| {
            let items: Vec<BasicType> = s.conjuncts().cloned().collect();
            let mut v = subsets(&items, width);
            if omega {
                v.insert(0, InterType::omega());
            }
            v
        })
        .collect();
    let mut out = vec![ContType::omega()];
    let mut frontier = vec![ContType::omega()];
    for opts in choices.iter().take(width) {
        let next: Vec<ContType> = frontier
            .iter()
            .flat_map(|c| opts.iter().map(move |s| {
                let mut v = c.0.clone();
                v.push(s.clone());
                ContType(v)
            }))
            .collect();
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

type Key = (Term, BasicType, usize, VarContext, NameContext);

struct Searcher {
    omega: bool,
    width: usize,
    /// Candidate conjuncts for guessed operand types.
    operand_basics: Vec<BasicType>,
    budget: usize,
    memo: HashMap<Key, Option<Derivation>>,
}

impl Searcher {
    fn tick(&mut self) -> Step<()> {
        if self.budget == 0 {
            return Err(OutOfBudget);
        }
        self.budget -= 1;
        Ok(())
    }

    fn inter(&mut self, g: &VarContext, m: &Term, s: &InterType, n: &NameContext, h: usize) -> Step<Option<Derivation>> {
        if s.is_omega() {
            return Ok((self.omega && h >= 1).then(|| Derivation::omega(g.clone(), m.clone(), n.clone())));
        }
        if let Some(a) = s.as_basic() {
            return self.basic(g, m, a, n, h);
        }
        if h < 2 || s.0.len() > self.width {
            return Ok(None);
        }
        let mut ps = Vec::new();
        for a in s.conjuncts() {
            match self.basic(g, m, a, n, h - 1)? {
                Some(d) => ps.push(d),
                None => return Ok(None),
            }
        }
        Ok(Some(Derivation::inter(g.clone(), m.clone(), n.clone(), ps)))
    }

    fn basic(&mut self, g: &VarContext, m: &Term, a: &BasicType, n: &NameContext, h: usize) -> Step<Option<Derivation>> {
        if h == 0 {
            return Ok(None);
        }
        let key = (m.clone(), a.clone(), h, g.clone(), n.clone());
        if let Some(r) = self.memo.get(&key) {
            return Ok(r.clone());
        }
        self.tick()?;
        let r = match m {
            Term::Var(Ref::Free(x)) => g
                .get(x)
                .filter(|s| s.0.contains(a))
                .map(|_| Derivation::ax(g.clone(), x, a.clone(), n.clone())),
            Term::Lam(hint, body) => self.lam(g, m, hint, body, a, n, h)?,
            Term::Mu(hint, target, body) => self.mu(g, m, hint, target, body, a, n, h)?,
            Term::App(f, q) => self.app(g, f, q, a, n, h)?,
            Term::Var(Ref::Bound(_)) | Term::Bot => None,
        };
        self.memo.insert(key, r.clone());
        Ok(r)
    }

    #[allow(clippy::too_many_arguments)]
    fn lam(
        &mut self,
        g: &VarContext,
        m: &Term,
        hint: &str,
        body: &Term,
        a: &BasicType,
        n: &NameContext,
        h: usize,
    ) -> Step<Option<Derivation>> {
        let Some((s, rest)) = a.uncons() else { return Ok(None) };
        if s.is_omega() && !self.omega {
            return Ok(None);
        }
        let mut avoid: BTreeSet<Ident> = g.keys().cloned().collect();
        avoid.extend(m.idents());
        let x = fresh_ident(if hint.is_empty() { "x" } else { hint }, &avoid);
        let mut g2 = g.clone();
        if !s.is_omega() {
            g2.insert(x.clone(), s.clone());
        }
        Ok(self
            .basic(&g2, &body.open_var(&x), &rest, n, h - 1)?
            .map(|p| Derivation::abs(&x, hint, p, g.clone())))
    }

    #[allow(clippy::too_many_arguments)]
    fn mu(
        &mut self,
        g: &VarContext,
        m: &Term,
        hint: &str,
        target: &Ref,
        body: &Term,
        a: &BasicType,
        n: &NameContext,
        h: usize,
    ) -> Step<Option<Derivation>> {
        let mut avoid: BTreeSet<Ident> = n.keys().cloned().collect();
        avoid.extend(m.idents());
        let alpha = fresh_ident(if hint.is_empty() { "a" } else { hint }, &avoid);
        let (tgt, lower) = match target {
            Ref::Bound(0) => (alpha.clone(), a.cont.clone()),
            Ref::Free(b) => match n.get(b) {
                Some(c) => (b.clone(), c.clone()),
                None => return Ok(None),
            },
            Ref::Bound(_) => return Ok(None),
        };
        let mut n2 = n.clone();
        n2.insert(alpha.clone(), a.cont.clone());
        let opened = body.open_name(&alpha);
        for d in weakenings(&lower, self.width, self.omega) {
            let goal = BasicType::new(d, a.head.clone());
            if let Some(p) = self.basic(g, &opened, &goal, &n2, h - 1)? {
                return Ok(Some(Derivation::mu(&alpha, &tgt, hint, p)));
            }
        }
        Ok(None)
    }

    fn app(&mut self, g: &VarContext, f: &Term, q: &Term, a: &BasicType, n: &NameContext, h: usize) -> Step<Option<Derivation>> {
        for s in self.operand_candidates(g, f, q, a, n, h)? {
            let fun_ty = a.cons(s.clone());
            let Some(fd) = self.basic(g, f, &fun_ty, n, h - 1)? else { continue };
            if let Some(qd) = self.inter(g, q, &s, n, h - 1)? {
                return Ok(Some(Derivation::app(fd, qd)));
            }
        }
        Ok(None)
    }

    /// Operand types worth trying for `f q : a`.
    fn operand_candidates(
        &mut self,
        g: &VarContext,
        f: &Term,
        q: &Term,
        a: &BasicType,
        n: &NameContext,
        h: usize,
    ) -> Step<Vec<InterType>> {
        let (head, args) = f.spine();
        if let Term::Var(Ref::Free(y)) = head {
            let j = args.len();
            let mut out: Vec<InterType> = Vec::new();
            for b in g.get(y).into_iter().flat_map(|s| s.conjuncts()) {
                if b.head == a.head && b.cont.0.len() == j + 1 + a.cont.0.len() && b.cont.0[j + 1..] == a.cont.0[..] {
                    let s = b.cont.0[j].clone();
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
            return Ok(out);
        }
        if a.cont.0.len() + 1 > self.width {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let basics = self.operand_basics.clone();
        let mut single = Vec::new();
        let mut multi = Vec::new();
        for b in &basics {
            if self.basic(g, q, b, n, h - 1)?.is_some() {
                single.push(b.clone());
            }
            if h >= 3 && self.basic(g, q, b, n, h - 2)?.is_some() {
                multi.push(b.clone());
            }
        }
        if multi.len() >= 2 {
            let k = multi.len().min(self.width);
            out.extend(subsets(&multi, k).into_iter().filter(|s| s.0.len() == k && k >= 2));
        }
        out.extend(single.into_iter().map(InterType::single));
        if self.omega {
            out.push(InterType::omega());
        }
        Ok(out)
    }
}

fn constants() -> Vec<TypeConst> {
    vec![TypeConst::indexed(0), TypeConst::indexed(1)]
}

fn new_searcher(target: Target, bounds: &SearchBounds, levels: &[Vec<BasicType>]) -> Searcher {
    let below = if levels.len() >= 2 { &levels[levels.len() - 2] } else { &levels[0] };
    Searcher {
        omega: target != Target::SN,
        width: bounds.width,
        operand_basics: below.clone(),
        budget: bounds.budget,
        memo: HashMap::new(),
    }
}

/// Searches for root judgements `Γ ⊢ m : A | Δ`, returning up to `limit`
/// derivations with distinct conclusions, minimal contexts, in order of
/// height, then width, then type.
pub fn search(m: &Term, target: Target, bounds: &SearchBounds, limit: usize) -> Search {
    if !m.is_locally_closed() || limit == 0 {
        return Search::NotFound;
    }
    let consts = constants();
    let mut found: Vec<Derivation> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut budget = bounds.budget;
    for h in 1..=bounds.depth {
        for w in 1..=bounds.width {
            let b = SearchBounds { width: w, budget, ..*bounds };
            let levels = universe(bounds.nesting, w, target == Target::S, &consts);
            let top = levels.last().expect("nonempty");
            let below = if levels.len() >= 2 { &levels[levels.len() - 2] } else { &levels[0] };
            let ok = |t: &BasicType| !target.root_omega_free() || t.omega_free();
            let all: InterType = top.iter().filter(|t| ok(t)).cloned().collect();
            let comp: InterType = below.iter().filter(|t| ok(t)).cloned().collect();
            let g: VarContext = m.free_vars().into_iter().map(|x| (x, all.clone())).collect();
            let n: NameContext = m.free_names().into_iter().map(|a| (a, ContType(vec![comp.clone(); w]))).collect();
            let mut s = new_searcher(target, &b, &levels);
            for a in top.iter().filter(|t| ok(t)) {
                match s.basic(&g, m, a, &n, h) {
                    Ok(Some(d)) => {
                        let d = minimize_contexts(&d);
                        debug_assert!(check_derivation(&d, target.system()).is_ok());
                        let key = (d.concl.vctx.clone(), d.concl.ty.clone(), d.concl.nctx.clone());
                        if seen.insert(key) {
                            found.push(d);
                            if found.len() >= limit {
                                return Search::Found(found);
                            }
                        }
                    }
                    Ok(None) => {}
                    Err(OutOfBudget) => {
                        return if found.is_empty() { Search::Unknown } else { Search::Found(found) };
                    }
                }
            }
            budget = s.budget;
        }
    }
    if found.is_empty() {
        Search::NotFound
    } else {
        Search::Found(found)
    }
}

/// Searches for a derivation of the fixed judgement `Γ ⊢ m : S | Δ`.
pub fn prove(
    g: &VarContext,
    m: &Term,
    s: &InterType,
    n: &NameContext,
    system: System,
    bounds: &SearchBounds,
) -> Search {
    let levels = universe(bounds.nesting, bounds.width, system != System::SN, &constants());
    let target = if system == System::SN { Target::SN } else { Target::S };
    let mut sr = new_searcher(target, bounds, &levels);
    for h in 1..=bounds.depth {
        match sr.inter(g, m, s, n, h) {
            Ok(Some(d)) => return Search::Found(vec![d]),
            Ok(None) => {}
            Err(OutOfBudget) => return Search::Unknown,
        }
    }
    Search::NotFound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;
    use crate::type_syntax::parse_inter;

    fn run(src: &str, target: Target, depth: usize, width: usize) -> Search {
        search(&parse(src).unwrap(), target, &SearchBounds::new(depth, width), 8)
    }

    #[test]
    fn universe_sizes() {
        let c = constants();
        assert_eq!(universe(1, 1, false, &c)[1].len(), 2 * (1 + 2));
        assert_eq!(universe(1, 2, false, &c)[1].len(), 2 * (1 + 3 + 9));
        assert_eq!(universe(1, 2, true, &c)[1].len(), 2 * (1 + 4 + 16));
        assert_eq!(weakenings(&ContType::omega(), 3, true), vec![ContType::omega()]);
    }

    #[test]
    fn identity_in_sn() {
        let r = run("\\x.x", Target::SN, 3, 1);
        let ds = r.found().expect("found");
        let want = parse_inter("((O)->'p0 * O)->'p0").unwrap();
        assert!(ds.iter().any(|d| d.concl.ty == want && d.concl.vctx.is_empty()));
        for d in ds {
            check_derivation(d, System::SN).unwrap();
        }
    }

    #[test]
    fn omega_has_nothing() {
        for target in [Target::S, Target::OmegaFree, Target::SN] {
            assert_eq!(run("(\\x.x x) (\\x.x x)", target, 6, 2), Search::NotFound, "{target:?}");
        }
        assert_eq!(run("\\y.(\\x.x x) (\\x.x x)", Target::SN, 6, 2), Search::NotFound);
    }

    #[test]
    fn erasing_redex() {
        let m = "(\\x.\\y.y) ((\\z.z z) (\\z.z z))";
        assert!(run(m, Target::OmegaFree, 5, 2).found().is_some());
        assert_eq!(run(m, Target::SN, 6, 2), Search::NotFound);
    }

    #[test]
    fn names() {
        for src in ["mu a.[b] x", "mu a.[a] x", "(mu b.[b] x) y", "x y"] {
            let r = run(src, Target::SN, 5, 2);
            let ds = r.found().unwrap_or_else(|| panic!("{src}: {r:?}"));
            for d in ds {
                check_derivation(d, System::SN).unwrap();
            }
        }
    }

    #[test]
    fn deeper_nesting() {
        let m = parse("x (\\y.y)").unwrap();
        let shallow = SearchBounds::new(4, 1);
        assert_eq!(search(&m, Target::SN, &shallow, 1), Search::NotFound);
        let deep = SearchBounds { nesting: 2, ..shallow };
        assert!(search(&m, Target::SN, &deep, 1).found().is_some());
    }

    #[test]
    fn prove_fixed_goal() {
        let m = parse("(\\x.x) y").unwrap();
        let a = parse_inter("'p0").unwrap();
        let g: VarContext = [("y".to_string(), a.clone())].into();
        let r = prove(&g, &m, &a, &NameContext::new(), System::SN, &SearchBounds::new(4, 1));
        check_derivation(&r.found().unwrap()[0], System::SN).unwrap();
    }
}
