//! One-step →βμ reduction, strategies and normal-form predicates.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::term::{Position, Ref, Step, Term};

/// Hint given to the binder created by a structural step.
pub const MU_HINT: &str = "g";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RedexKind {
    Beta,
    /// `(μβ.[β]P)Q`
    MuNamed,
    /// `(μβ.[δ]P)Q` with `δ ≠ β`
    MuOther,
    /// `μα.[β]μγ.[δ]M`
    Ren,
}

impl RedexKind {
    pub fn label(self) -> &'static str {
        match self {
            RedexKind::Beta => "beta",
            RedexKind::MuNamed => "mu-named",
            RedexKind::MuOther => "mu-other",
            RedexKind::Ren => "ren",
        }
    }
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("no subterm at position {0}")]
    BadPosition(Position),
    #[error("no redex at position {0}")]
    NotARedex(Position),
}

/// The kind of redex rooted at `t`, if any.
pub fn redex_kind(t: &Term) -> Option<RedexKind> {
    match t {
        Term::App(f, _) => match f.as_ref() {
            Term::Lam(..) => Some(RedexKind::Beta),
            Term::Mu(_, Ref::Bound(0), _) => Some(RedexKind::MuNamed),
            Term::Mu(..) => Some(RedexKind::MuOther),
            _ => None,
        },
        Term::Mu(_, _, b) if b.is_mu() => Some(RedexKind::Ren),
        _ => None,
    }
}

/// All redexes of `m` in leftmost-outermost order.
pub fn redexes(m: &Term) -> Vec<(Position, RedexKind)> {
    fn go(t: &Term, path: &mut Vec<Step>, out: &mut Vec<(Position, RedexKind)>) {
        if let Some(k) = redex_kind(t) {
            out.push((Position(path.clone()), k));
        }
        match t {
            Term::App(f, a) => {
                path.push(Step::Fun);
                go(f, path, out);
                path.pop();
                path.push(Step::Arg);
                go(a, path, out);
                path.pop();
            }
            Term::Lam(_, b) | Term::Mu(_, _, b) => {
                path.push(Step::Body);
                go(b, path, out);
                path.pop();
            }
            Term::Var(_) | Term::Bot => {}
        }
    }
    let mut out = Vec::new();
    go(m, &mut Vec::new(), &mut out);
    out
}

/// Contracts the redex rooted at `t`.
pub fn contract_root(t: &Term) -> Option<Term> {
    match t {
        Term::App(f, q) => match f.as_ref() {
            Term::Lam(_, body) => Some(body.instantiate_var(q)),
            Term::Mu(_, target, p) => {
                let q_in = q.shift(0, 1);
                let p2 = p.struct_subst(&Ref::Bound(0), &q_in, &Ref::Bound(0));
                Some(if *target == Ref::Bound(0) {
                    Term::Mu(MU_HINT.into(), Ref::Bound(0), Box::new(Term::app(p2, q_in)))
                } else {
                    Term::Mu(MU_HINT.into(), target.clone(), Box::new(p2))
                })
            }
            _ => None,
        },
        Term::Mu(a, b, inner) => match inner.as_ref() {
            Term::Mu(_, d, m) => {
                let m2 = m.instantiate_name(b);
                let target = match d {
                    Ref::Bound(0) => b.clone(),
                    Ref::Bound(k) => Ref::Bound(k - 1),
                    free => free.clone(),
                };
                Some(Term::Mu(a.clone(), target, Box::new(m2)))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Contracts the redex at `pos`.
pub fn contract(m: &Term, pos: &Position) -> Result<Term, ReduceError> {
    if m.subterm(pos).is_none() {
        return Err(ReduceError::BadPosition(pos.clone()));
    }
    m.map_at(
        &pos.0,
        &mut |t| contract_root(t).ok_or_else(|| ReduceError::NotARedex(pos.clone())),
        ReduceError::BadPosition(pos.clone()),
    )
}

/// Contracts the leftmost-outermost redex, if there is one.
pub fn step_lor(m: &Term) -> Option<Term> {
    let (pos, _) = redexes(m).into_iter().next()?;
    contract(m, &pos).ok()
}

pub fn is_nf(m: &Term) -> bool {
    redexes(m).is_empty()
}

/// Head-normal forms: `x M1…Mn`, `λx.H` and `μα.[β]H` with `H` not a μ.
pub fn is_hnf(m: &Term) -> bool {
    match m {
        Term::Lam(_, b) => is_hnf(b),
        Term::Mu(_, _, b) => !b.is_mu() && is_hnf(b),
        _ => matches!(m.spine().0, Term::Var(_)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Lor,
    RightmostInnermost,
    Random(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Normal,
    FuelExhausted,
}

#[derive(Clone, Debug)]
pub struct ReductionStep {
    pub position: Position,
    pub kind: RedexKind,
    pub result: Term,
}

#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    pub status: Status,
    pub final_term: Term,
    pub steps: Vec<ReductionStep>,
}

/// Reduces `m` for at most `fuel` steps with the given strategy.
pub fn normalize(m: &Term, strategy: Strategy, fuel: usize) -> ReductionOutcome {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut current = m.clone();
    let mut steps = Vec::new();
    loop {
        let mut rs = redexes(&current);
        if rs.is_empty() {
            return ReductionOutcome { status: Status::Normal, final_term: current, steps };
        }
        if steps.len() >= fuel {
            return ReductionOutcome { status: Status::FuelExhausted, final_term: current, steps };
        }
        let idx = match (strategy, rng.as_mut()) {
            (Strategy::Lor, _) => 0,
            (Strategy::RightmostInnermost, _) => rs.len() - 1,
            (_, Some(r)) => r.gen_range(0..rs.len()),
            (Strategy::Random(_), None) => unreachable!("rng is seeded for random strategy"),
        };
        let (pos, kind) = rs.swap_remove(idx);
        current = contract(&current, &pos).expect("listed redex contracts");
        steps.push(ReductionStep { position: pos, kind, result: current.clone() });
    }
}
