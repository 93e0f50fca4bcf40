//! Strict intersection types.
//!
//! ```text
//! A, B    ::= C → ψ                basic types
//! S, T    ::= ω | A1 ∩ … ∩ An      intersection types (n ≥ 1)
//! C, D    ::= Ω | S × C            continuation types
//! ```
//!
//! Intersections are kept as ordered sets, so `ω` is the empty set and
//! duplicates vanish. Continuations are the list of their components, with
//! `Ω` the empty list.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::term::Ident;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeConst(pub String);

impl TypeConst {
    pub fn new(name: impl Into<String>) -> Self {
        TypeConst(name.into())
    }

    /// The `i`-th constant of the fixed supply used by the typers.
    pub fn indexed(i: usize) -> Self {
        TypeConst(format!("p{i}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasicType {
    pub cont: ContType,
    pub head: TypeConst,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InterType(pub BTreeSet<BasicType>);

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContType(pub Vec<InterType>);

impl BasicType {
    pub fn new(cont: ContType, head: TypeConst) -> Self {
        BasicType { cont, head }
    }

    /// `Ω → ψ`.
    pub fn atom(head: TypeConst) -> Self {
        BasicType { cont: ContType::omega(), head }
    }

    /// `S × C → ψ` split into `(S, C → ψ)`, or `None` when the
    /// continuation is `Ω`.
    pub fn uncons(&self) -> Option<(&InterType, BasicType)> {
        let (first, rest) = self.cont.0.split_first()?;
        Some((first, BasicType::new(ContType(rest.to_vec()), self.head.clone())))
    }

    /// `S × (C → ψ)` for `self = C → ψ`.
    pub fn cons(&self, s: InterType) -> BasicType {
        BasicType::new(self.cont.cons(s), self.head.clone())
    }

    pub fn omega_free(&self) -> bool {
        self.cont.omega_free()
    }

    pub fn size(&self) -> usize {
        1 + self.cont.size()
    }
}

impl InterType {
    pub fn omega() -> Self {
        InterType(BTreeSet::new())
    }

    pub fn single(a: BasicType) -> Self {
        InterType(BTreeSet::from([a]))
    }

    pub fn is_omega(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_basic(&self) -> Option<&BasicType> {
        if self.0.len() == 1 {
            self.0.iter().next()
        } else {
            None
        }
    }

    pub fn conjuncts(&self) -> impl Iterator<Item = &BasicType> {
        self.0.iter()
    }

    pub fn omega_free(&self) -> bool {
        !self.is_omega() && self.0.iter().all(BasicType::omega_free)
    }

    pub fn size(&self) -> usize {
        if self.is_omega() {
            1
        } else {
            self.0.iter().map(BasicType::size).sum::<usize>() + self.0.len() - 1
        }
    }
}

impl FromIterator<BasicType> for InterType {
    fn from_iter<I: IntoIterator<Item = BasicType>>(iter: I) -> Self {
        InterType(iter.into_iter().collect())
    }
}

impl ContType {
    pub fn omega() -> Self {
        ContType(Vec::new())
    }

    pub fn is_omega(&self) -> bool {
        self.0.is_empty()
    }

    pub fn cons(&self, s: InterType) -> ContType {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(s);
        v.extend(self.0.iter().cloned());
        ContType(v)
    }

    pub fn omega_free(&self) -> bool {
        self.0.iter().all(InterType::omega_free)
    }

    pub fn size(&self) -> usize {
        self.0.iter().map(|s| 1 + s.size()).sum()
    }
}

/// `A ≤ B` on basic types. The only rule concluding a basic type on the
/// right is selection from a one-element intersection, so this is equality.
pub fn subtype_basic(a: &BasicType, b: &BasicType) -> bool {
    a == b
}

/// `S ≤ T`: every conjunct of `T` occurs in `S`.
pub fn subtype_inter(s: &InterType, t: &InterType) -> bool {
    t.0.iter().all(|b| s.0.iter().any(|a| subtype_basic(a, b)))
}

/// `C ≤ D`: componentwise on the common prefix, and `D` no longer than `C`.
pub fn subtype_cont(c: &ContType, d: &ContType) -> bool {
    d.0.len() <= c.0.len() && c.0.iter().zip(&d.0).all(|(s, t)| subtype_inter(s, t))
}

pub fn inter_types(s: &InterType, t: &InterType) -> InterType {
    InterType(s.0.union(&t.0).cloned().collect())
}

/// Pointwise intersection, keeping the tail of the longer continuation.
pub fn inter_cont(c: &ContType, d: &ContType) -> ContType {
    let (long, short) = if c.0.len() >= d.0.len() { (c, d) } else { (d, c) };
    ContType(
        long.0
            .iter()
            .enumerate()
            .map(|(i, s)| match short.0.get(i) {
                Some(t) => inter_types(s, t),
                None => s.clone(),
            })
            .collect(),
    )
}

/// A finite map from subjects to types.
pub type Context<T> = BTreeMap<Ident, T>;
pub type VarContext = Context<InterType>;
pub type NameContext = Context<ContType>;

/// Types that carry an intersection and an order.
pub trait StrictType: Clone + Eq + fmt::Display {
    fn meet(&self, other: &Self) -> Self;
    fn leq(&self, other: &Self) -> bool;
    fn omega_free(&self) -> bool;
}

impl StrictType for InterType {
    fn meet(&self, other: &Self) -> Self {
        inter_types(self, other)
    }
    fn leq(&self, other: &Self) -> bool {
        subtype_inter(self, other)
    }
    fn omega_free(&self) -> bool {
        InterType::omega_free(self)
    }
}

impl StrictType for ContType {
    fn meet(&self, other: &Self) -> Self {
        inter_cont(self, other)
    }
    fn leq(&self, other: &Self) -> bool {
        subtype_cont(self, other)
    }
    fn omega_free(&self) -> bool {
        ContType::omega_free(self)
    }
}

/// Pointwise intersection where both bind, union elsewhere.
pub fn inter_ctx<T: StrictType>(g1: &Context<T>, g2: &Context<T>) -> Context<T> {
    let mut out = g1.clone();
    for (x, t) in g2 {
        let merged = match out.get(x) {
            Some(s) => s.meet(t),
            None => t.clone(),
        };
        out.insert(x.clone(), merged);
    }
    out
}

/// `g_small ≤ g_big`: every statement `x:S` of `g_big` has some `x:T` in
/// `g_small` with `T ≤ S`.
///
/// Name contexts use the same orientation, even though a smaller name
/// context then carries longer (more informative) continuations.
pub fn ctx_leq<T: StrictType>(g_small: &Context<T>, g_big: &Context<T>) -> bool {
    g_big
        .iter()
        .all(|(x, s)| g_small.get(x).is_some_and(|t| t.leq(s)))
}

pub fn ctx_omega_free<T: StrictType>(g: &Context<T>) -> bool {
    g.values().all(StrictType::omega_free)
}
