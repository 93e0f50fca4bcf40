//! Approximants, direct approximation and join.

use std::collections::{HashSet, VecDeque};

use crate::pretty::pretty;
use crate::reduce::{contract, redexes};
use crate::term::Term;

/// Upper bound on the number of distinct reducts explored by
/// [`approximants`], independent of the depth bound.
pub const APPROX_NODE_CAP: usize = 5000;

/// Membership in the approximant grammar.
pub fn is_approximant(t: &Term) -> bool {
    match t {
        Term::Bot => true,
        Term::Lam(_, b) => !b.is_bot() && is_approximant(b),
        Term::Mu(_, _, b) => !b.is_bot() && !b.is_mu() && is_approximant(b),
        _ => {
            let (head, args) = t.spine();
            matches!(head, Term::Var(_)) && args.into_iter().all(is_approximant)
        }
    }
}

/// `a ⊑ m`: `m` with some subterms replaced by ⊥ gives `a`.
pub fn direct_approx(a: &Term, m: &Term) -> bool {
    match (a, m) {
        (Term::Bot, _) => true,
        (Term::Var(x), Term::Var(y)) => x == y,
        (Term::Lam(_, b), Term::Lam(_, c)) => direct_approx(b, c),
        (Term::Mu(_, s, b), Term::Mu(_, t, c)) => s == t && direct_approx(b, c),
        (Term::App(f, x), Term::App(g, y)) => direct_approx(f, g) && direct_approx(x, y),
        _ => false,
    }
}

/// The largest approximant below `n`.
pub fn truncate(n: &Term) -> Term {
    match n {
        Term::Var(_) | Term::Bot => n.clone(),
        Term::Lam(h, b) => match truncate(b) {
            Term::Bot => Term::Bot,
            a => Term::Lam(h.clone(), Box::new(a)),
        },
        Term::Mu(h, t, b) => {
            if b.is_mu() {
                return Term::Bot;
            }
            match truncate(b) {
                Term::Bot => Term::Bot,
                a => Term::Mu(h.clone(), t.clone(), Box::new(a)),
            }
        }
        Term::App(..) => {
            let (head, args) = n.spine();
            if matches!(head, Term::Var(_)) {
                Term::apps(head.clone(), args.into_iter().map(truncate))
            } else {
                Term::Bot
            }
        }
    }
}

/// The partial least upper bound of two terms.
pub fn join(p: &Term, q: &Term) -> Option<Term> {
    match (p, q) {
        (Term::Bot, m) | (m, Term::Bot) => Some(m.clone()),
        (Term::Var(x), Term::Var(y)) if x == y => Some(p.clone()),
        (Term::Lam(h, b), Term::Lam(_, c)) => Some(Term::Lam(h.clone(), Box::new(join(b, c)?))),
        (Term::Mu(h, s, b), Term::Mu(_, t, c)) if s == t => {
            Some(Term::Mu(h.clone(), s.clone(), Box::new(join(b, c)?)))
        }
        (Term::App(f, x), Term::App(g, y)) => Some(Term::app(join(f, g)?, join(x, y)?)),
        _ => None,
    }
}

/// Join of a list of terms; ⊥ for the empty list.
pub fn join_all<'a>(ts: impl IntoIterator<Item = &'a Term>) -> Option<Term> {
    ts.into_iter().try_fold(Term::Bot, |acc, t| join(&acc, t))
}

/// A finite representation of the approximants of a term: the maximal
/// elements found, with membership decided by ⊑.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxSet {
    /// Pairwise ⊑-incomparable, sorted by printed form.
    pub maximal: Vec<Term>,
    pub fuel: usize,
    /// True when every reduct of the term was explored, so that the set
    /// is exact rather than a lower bound.
    pub complete: bool,
}

impl ApproxSet {
    pub fn contains(&self, a: &Term) -> bool {
        is_approximant(a) && self.maximal.iter().any(|p| direct_approx(a, p))
    }
}

/// Keeps the ⊑-maximal elements, sorted by printed form.
pub fn antichain(mut ts: Vec<Term>) -> Vec<Term> {
    let mut seen = HashSet::new();
    ts.retain(|t| seen.insert(t.clone()));
    let keep: Vec<bool> = ts
        .iter()
        .map(|a| !ts.iter().any(|b| a != b && direct_approx(a, b)))
        .collect();
    let mut out: Vec<Term> = ts.into_iter().zip(keep).filter(|(_, k)| *k).map(|(t, _)| t).collect();
    out.sort_by_cached_key(pretty);
    out
}

/// The approximants of the reducts of `m` reachable in at most `fuel`
/// steps.
pub fn approximants(m: &Term, fuel: usize) -> ApproxSet {
    let mut seen: HashSet<Term> = HashSet::from([m.clone()]);
    let mut queue = VecDeque::from([(m.clone(), 0usize)]);
    let mut truncations = Vec::new();
    let mut complete = true;
    while let Some((t, depth)) = queue.pop_front() {
        truncations.push(truncate(&t));
        let rs = redexes(&t);
        if rs.is_empty() {
            continue;
        }
        if depth >= fuel {
            complete = false;
            continue;
        }
        for (pos, _) in rs {
            let r = contract(&t, &pos).expect("listed redex contracts");
            if seen.contains(&r) {
                continue;
            }
            if seen.len() >= APPROX_NODE_CAP {
                complete = false;
                continue;
            }
            seen.insert(r.clone());
            queue.push_back((r, depth + 1));
        }
    }
    ApproxSet { maximal: antichain(truncations), fuel, complete }
}

/// `⊔ A(m)`, computed over the reducts within `fuel` steps.
pub fn semantics(m: &Term, fuel: usize) -> Term {
    let set = approximants(m, fuel);
    join_all(&set.maximal).expect("approximants of one term are compatible")
}
