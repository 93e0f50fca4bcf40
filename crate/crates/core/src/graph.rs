//! Reduction graphs and strong-normalisation checks.
//!
//! Nodes are terms up to alpha-equivalence, so the fresh binders introduced
//! by structural steps do not produce distinct copies of the same term.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::reduce::{contract, redexes, RedexKind};
use crate::term::{Position, Term};

#[derive(Clone, Debug)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub position: Position,
    pub kind: RedexKind,
}

#[derive(Clone, Debug)]
pub struct ReductionGraph {
    /// `nodes[0]` is the start term.
    pub nodes: Vec<Term>,
    pub edges: Vec<Edge>,
    /// True when every node was expanded and every successor is present.
    pub complete: bool,
}

impl ReductionGraph {
    pub fn successors(&self, n: usize) -> BTreeSet<usize> {
        self.edges.iter().filter(|e| e.from == n).map(|e| e.to).collect()
    }

    /// Nodes without outgoing edges.
    pub fn leaves(&self) -> Vec<usize> {
        let sources: BTreeSet<usize> = self.edges.iter().map(|e| e.from).collect();
        (0..self.nodes.len()).filter(|n| !sources.contains(n)).collect()
    }

    /// Nodes reachable from `n` in zero or more steps.
    pub fn reachable(&self, n: usize) -> BTreeSet<usize> {
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for e in &self.edges {
            adj.entry(e.from).or_default().push(e.to);
        }
        let mut seen = BTreeSet::from([n]);
        let mut stack = vec![n];
        while let Some(k) = stack.pop() {
            for &m in adj.get(&k).into_iter().flatten() {
                if seen.insert(m) {
                    stack.push(m);
                }
            }
        }
        seen
    }
}

/// Explores the reducts of `m` breadth-first, keeping at most `fuel` nodes.
pub fn reduction_graph(m: &Term, fuel: usize) -> ReductionGraph {
    let mut nodes = vec![m.clone()];
    let mut index: HashMap<Term, usize> = HashMap::from([(m.clone(), 0)]);
    let mut edges = Vec::new();
    let mut complete = fuel > 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        let t = nodes[n].clone();
        for (pos, kind) in redexes(&t) {
            let r = contract(&t, &pos).expect("listed redex contracts");
            let to = match index.get(&r) {
                Some(&k) => k,
                None if nodes.len() < fuel => {
                    nodes.push(r.clone());
                    index.insert(r, nodes.len() - 1);
                    queue.push_back(nodes.len() - 1);
                    nodes.len() - 1
                }
                None => {
                    complete = false;
                    continue;
                }
            };
            edges.push(Edge { from: n, to, position: pos, kind });
        }
    }
    ReductionGraph { nodes, edges, complete }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SnResult {
    /// Every reduction path terminates; the payload is the longest length.
    Sn(usize),
    /// A reachable cycle, listed from its first term back to it.
    NotSn(Vec<Term>),
    /// The budget ran out before either was established.
    Unknown,
}

struct SnSearch {
    budget: usize,
    longest: HashMap<Term, usize>,
    stack: Vec<Term>,
    exhausted: bool,
}

impl SnSearch {
    /// Longest path from `t`, or `Err(cycle)` when a cycle is found.
    fn visit(&mut self, t: &Term) -> Result<Option<usize>, Vec<Term>> {
        if let Some(&k) = self.longest.get(t) {
            return Ok(Some(k));
        }
        if let Some(i) = self.stack.iter().position(|s| s == t) {
            return Err(self.stack[i..].to_vec());
        }
        if self.longest.len() + self.stack.len() >= self.budget {
            self.exhausted = true;
            return Ok(None);
        }
        self.stack.push(t.clone());
        let mut best = Some(0);
        for (pos, _) in redexes(t) {
            let r = contract(t, &pos).expect("listed redex contracts");
            match self.visit(&r)? {
                Some(k) => best = best.map(|b: usize| b.max(k + 1)),
                None => best = None,
            }
        }
        self.stack.pop();
        if let Some(k) = best {
            self.longest.insert(t.clone(), k);
        }
        Ok(best)
    }
}

/// Decides strong normalisation of `m` by exhaustive exploration of at most
/// `fuel` distinct terms. `NotSn` is reported only on a proven cycle.
pub fn is_sn(m: &Term, fuel: usize) -> SnResult {
    let mut search = SnSearch {
        budget: fuel.max(1),
        longest: HashMap::new(),
        stack: Vec::new(),
        exhausted: false,
    };
    match search.visit(m) {
        Err(cycle) => SnResult::NotSn(cycle),
        Ok(Some(k)) if !search.exhausted => SnResult::Sn(k),
        Ok(_) => SnResult::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    const OMEGA: &str = "(\\x.x x) (\\x.x x)";

    #[test]
    fn graphs() {
        let g = reduction_graph(&p(OMEGA), 5);
        assert_eq!(g.nodes.len(), 1);
        assert_eq!(g.edges.len(), 1);
        assert_eq!((g.edges[0].from, g.edges[0].to), (0, 0));
        assert!(g.complete);

        let g = reduction_graph(&p("(\\x.x) y"), 10);
        assert_eq!((g.nodes.len(), g.edges.len()), (2, 1));

        let g = reduction_graph(&p("(\\x.x) ((\\y.y) z)"), 10);
        assert!(g.complete);
        assert_eq!(g.nodes.len(), 3);
        assert_eq!(g.leaves(), vec![g.nodes.iter().position(|t| *t == p("z")).unwrap()]);
    }

    #[test]
    fn graph_budget() {
        let g = reduction_graph(&p("(\\x.x x x) (\\x.x x x)"), 4);
        assert!(!g.complete);
        assert_eq!(g.nodes.len(), 4);
    }

    #[test]
    fn strong_normalisation() {
        assert_eq!(is_sn(&p("\\x.x"), 10), SnResult::Sn(0));
        assert_eq!(is_sn(&p("(\\x.x) ((\\y.y) z)"), 10), SnResult::Sn(2));
        match is_sn(&p(OMEGA), 10) {
            SnResult::NotSn(c) => assert_eq!(c, vec![p(OMEGA)]),
            other => panic!("{other:?}"),
        }
        assert!(matches!(is_sn(&p(&format!("(\\x.y) ({OMEGA})")), 10), SnResult::NotSn(_)));
        assert_eq!(is_sn(&p("(\\x.x x x) (\\x.x x x)"), 20), SnResult::Unknown);
    }
}
