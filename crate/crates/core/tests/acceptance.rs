//! Acceptance criteria 1 to 10. Each prints one PASS or FAIL line; the test
//! fails if any criterion does.

mod common;

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use common::Gen;
use lmu::approx::{direct_approx, is_approximant, join, truncate};
use lmu::corpus::corpus;
use lmu::deriv::{check_derivation, Derivation, System};
use lmu::exhaustive::{search, Search, SearchBounds, Target};
use lmu::expand::expand_root;
use lmu::graph::reduction_graph;
use lmu::infer::{approximant_witness, classify, infer, Tri};
use lmu::reduce::{contract, contract_root, redex_kind, redexes, RedexKind};
use lmu::transform::{bot_to_s, recontext, s_to_bot};
use lmu::typer::{type_term, Mode};
use lmu::types::{inter_ctx, subtype_cont, subtype_inter, BasicType, ContType, InterType, TypeConst};
use lmu::{parse, pretty, Term};

/// Default classification bounds.
const FUEL: usize = 1000;
const DEPTH: usize = 6;
const WIDTH: usize = 3;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(n: usize, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let in_time = limit.map_or(true, |l| took <= l);
    let pass = o.pass && in_time;
    let limit_note = limit.map_or(String::new(), |l| format!(", limit {:.0}s", l.as_secs_f64()));
    println!(
        "criterion {n}: {} ({}; {:.2}s{limit_note})",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64()
    );
    pass
}

fn p(s: &str) -> Term {
    parse(s).unwrap()
}

fn reduction_rules() -> Outcome {
    let cases = [
        ("(\\x.x) y", "y", RedexKind::Beta),
        ("(mu b.[b] x) y", "mu g.[g] x y", RedexKind::MuNamed),
        ("(mu b.[d] x) y", "mu g.[d] x", RedexKind::MuOther),
        ("mu a.[b] mu g.[d] x", "mu a.[d] x", RedexKind::Ren),
        ("mu a.[b] mu g.[g] x", "mu a.[b] x", RedexKind::Ren),
    ];
    let mut bad = Vec::new();
    for (src, want, kind) in cases {
        let m = p(src);
        let got = contract_root(&m).map(|t| pretty(&t));
        if got.as_deref() != Some(want) || redex_kind(&m) != Some(kind) {
            bad.push(format!("{src} gave {got:?}"));
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{} single steps, mismatches {:?}", cases.len(), bad) }
}

fn confluence() -> Outcome {
    let mut g = Gen::new(2, false);
    let (mut done, mut tries, mut violations) = (0, 0, Vec::new());
    while done < 500 && tries < 50_000 {
        tries += 1;
        let m = g.small(12);
        if redexes(&m).is_empty() {
            continue;
        }
        let graph = reduction_graph(&m, 200);
        if !graph.complete {
            continue;
        }
        done += 1;
        let leaves: std::collections::HashSet<&Term> = graph.leaves().into_iter().map(|i| &graph.nodes[i]).collect();
        if leaves.len() > 1 {
            violations.push(format!("{}: {} normal forms", pretty(&m), leaves.len()));
        }
        let reach: Vec<BTreeSet<usize>> = (0..graph.nodes.len()).map(|i| graph.reachable(i)).collect();
        for i in 0..graph.nodes.len() {
            let succ: Vec<usize> = graph.successors(i).into_iter().collect();
            for (k, &s1) in succ.iter().enumerate() {
                for &s2 in &succ[k + 1..] {
                    if reach[s1].is_disjoint(&reach[s2]) {
                        violations.push(format!("{}: fork at {}", pretty(&m), pretty(&graph.nodes[i])));
                    }
                }
            }
        }
    }
    Outcome {
        pass: done == 500 && violations.is_empty(),
        detail: format!("{done} terms with finite graphs, violations {}", violations.len()),
    }
}

/// Every way of replacing subterms of `t` by ⊥.
fn prunings(t: &Term) -> Vec<Term> {
    let mut out = vec![Term::Bot];
    match t {
        Term::Bot => return out,
        Term::Var(_) => out.push(t.clone()),
        Term::Lam(h, b) => out.extend(prunings(b).into_iter().map(|b| Term::Lam(h.clone(), Box::new(b)))),
        Term::Mu(h, r, b) => {
            out.extend(prunings(b).into_iter().map(|b| Term::Mu(h.clone(), r.clone(), Box::new(b))))
        }
        Term::App(f, a) => {
            let fs = prunings(f);
            let as_ = prunings(a);
            for f in &fs {
                for a in &as_ {
                    out.push(Term::app(f.clone(), a.clone()));
                }
            }
        }
    }
    out
}

fn approximation() -> Outcome {
    let mut g = Gen::new(3, true);
    let mut v: HashMap<&str, usize> = HashMap::new();
    let mut bump = |k: &'static str| *v.entry(k).or_default() += 1;
    let mut checked = 0;
    while checked < 1000 {
        let m = g.small(8);
        let ps = prunings(&m);
        if ps.len() > 4000 {
            continue;
        }
        checked += 1;
        let pick = |g: &mut Gen| ps[rand::Rng::gen_range(&mut g.rng, 0..ps.len())].clone();
        let (a, b, c) = (pick(&mut g), pick(&mut g), pick(&mut g));

        // join is the least upper bound below the common bound m.
        match join(&a, &b) {
            None => bump("join undefined under a bound"),
            Some(j) => {
                if !(direct_approx(&a, &j) && direct_approx(&b, &j) && direct_approx(&j, &m)) {
                    bump("join not an upper bound");
                }
                let least = ps
                    .iter()
                    .filter(|u| direct_approx(&a, u) && direct_approx(&b, u))
                    .all(|u| direct_approx(&j, u));
                if !least {
                    bump("join not least");
                }
            }
        }
        if join(&a, &b) != join(&b, &a) {
            bump("commutativity");
        }
        if join(&a, &a).as_ref() != Some(&a) {
            bump("idempotence");
        }
        let l = join(&a, &b).and_then(|ab| join(&ab, &c));
        let r = join(&b, &c).and_then(|bc| join(&a, &bc));
        if l != r {
            bump("associativity");
        }
        let other = g.small(8);
        if join(&a, &other) != join(&other, &a) {
            bump("commutativity on unrelated terms");
        }

        // Approximants below m stay below its reducts.
        let approx: Vec<&Term> = ps.iter().filter(|t| is_approximant(t)).collect();
        for (pos, _) in redexes(&m) {
            let n = contract(&m, &pos).unwrap();
            for t in &approx {
                if !direct_approx(t, &n) {
                    bump("preservation under reduction");
                }
            }
        }

        // truncate(m) is the largest approximant below m.
        let t = truncate(&m);
        if !is_approximant(&t) || !direct_approx(&t, &m) || !approx.contains(&&t) {
            bump("truncate not an approximant below");
        }
        if approx.iter().any(|x| !direct_approx(x, &t)) {
            bump("truncate not maximal");
        }
    }
    let total: usize = v.values().sum();
    Outcome { pass: total == 0, detail: format!("{checked} generated terms, violations {v:?}") }
}

fn characterisation(which: &'static str) -> Outcome {
    let mut conclusive = 0;
    let mut bad = Vec::new();
    let entries = corpus();
    for e in &entries {
        let r = classify(&e.term, FUEL, DEPTH, WIDTH);
        let (c, tag) = match which {
            "hnf" => (r.comparisons()[0], e.hnf),
            _ => (r.comparisons()[1], e.nf),
        };
        if c.conclusive() {
            conclusive += 1;
        }
        let want = if tag { Tri::Yes } else { Tri::No };
        if !c.agrees() || (c.reduction != Tri::Unknown && c.reduction != want) {
            bad.push(format!("{} ({:?} vs {:?})", e.source, c.reduction, c.typing));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("{} corpus terms, {conclusive} conclusive, disagreements {bad:?}", entries.len()),
    }
}

fn strong_normalisation() -> Outcome {
    let entries = corpus();
    let mut missing = Vec::new();
    let mut sn = 0;
    for e in entries.iter().filter(|e| e.sn) {
        sn += 1;
        let ds = infer(&e.term, System::SN, 8, 3);
        if ds.is_empty() || ds.iter().any(|d| check_derivation(d, System::SN).is_err()) {
            missing.push(e.source.clone());
        }
    }
    let negatives = [
        "(\\x.x x) (\\x.x x)",
        "\\x.(\\y.y y) (\\y.y y)",
        "(\\x.(\\y.y y) (\\y.y y)) z",
        "x (\\x.(\\y.y y) (\\y.y y))",
        "mu a.[a] (\\x.x x) (\\x.x x)",
        "mu a.[b] (\\x.x x) (\\x.x x)",
        "(mu b.[b] \\x.x x) (\\x.x x)",
    ];
    let bounds = SearchBounds::new(6, 2);
    let mut wrong = Vec::new();
    for src in negatives {
        let r = search(&p(src), Target::SN, &bounds, 1);
        if r != Search::NotFound {
            wrong.push(format!("{src}: {}", if r == Search::Unknown { "unknown" } else { "found" }));
        }
    }
    Outcome {
        pass: missing.is_empty() && wrong.is_empty(),
        detail: format!(
            "{sn} SN corpus terms typed within depth 8 width 3, untyped {missing:?}; {} negatives exhausted at depth 6 width 2, failures {wrong:?}",
            negatives.len()
        ),
    }
}

fn approximation_theorem() -> Outcome {
    let (mut cases, mut bad) = (0, Vec::new());
    for e in corpus() {
        if !reduction_graph(&e.term, 200).complete {
            continue;
        }
        for mode in [Mode::Hnf, Mode::Nf] {
            let Ok(d) = type_term(&e.term, mode, FUEL) else { continue };
            cases += 1;
            match approximant_witness(&e.term, &d, 200) {
                Some((a, ad)) if check_derivation(&ad, System::S).is_ok() && ad.concl.term == a => {}
                _ => bad.push(format!("{} ({mode:?})", e.source)),
            }
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{cases} typed corpus cases with finite graphs, failures {bad:?}") }
}

/// Types of size at most `n` over two constants, as intersections and
/// continuations.
struct SmallTypes {
    inters: Vec<InterType>,
    conts: Vec<ContType>,
}

fn small_types(n: usize) -> SmallTypes {
    let consts = [TypeConst::new("p"), TypeConst::new("q")];
    let mut conts_by: Vec<Vec<ContType>> = vec![Vec::new(); n + 1];
    let mut basics_by: Vec<Vec<BasicType>> = vec![Vec::new(); n + 1];
    let mut inters_by: Vec<Vec<InterType>> = vec![Vec::new(); n + 1];
    conts_by[0].push(ContType::omega());
    for s in 1..=n {
        // basics of size s have continuations of size s - 1
        for c in conts_by[s - 1].clone() {
            for k in &consts {
                basics_by[s].push(BasicType::new(c.clone(), k.clone()));
            }
        }
        // intersections of size s
        if s == 1 {
            inters_by[1].push(InterType::omega());
        }
        let all: Vec<(usize, BasicType)> =
            (1..=s).flat_map(|k| basics_by[k].iter().map(move |b| (k, b.clone()))).collect();
        fn sets(all: &[(usize, BasicType)], start: usize, left: usize, first: bool, cur: &mut Vec<BasicType>, out: &mut Vec<InterType>) {
            if left == 0 && !cur.is_empty() {
                out.push(cur.iter().cloned().collect());
                return;
            }
            for i in start..all.len() {
                let cost = all[i].0 + usize::from(!first);
                if cost <= left {
                    cur.push(all[i].1.clone());
                    sets(all, i + 1, left - cost, false, cur, out);
                    cur.pop();
                }
            }
        }
        let mut found = Vec::new();
        sets(&all, 0, s, true, &mut Vec::new(), &mut found);
        inters_by[s].extend(found);
        // continuations S × C of size s = 1 + |S| + |C|
        for si in 1..s {
            let ci = s - 1 - si;
            for a in inters_by[si].clone() {
                let new: Vec<ContType> = conts_by[ci].iter().map(|c| c.cons(a.clone())).collect();
                conts_by[s].extend(new);
            }
        }
    }
    let mut inters: Vec<InterType> = inters_by.into_iter().flatten().collect();
    inters.sort();
    inters.dedup();
    let mut conts: Vec<ContType> = conts_by.into_iter().flatten().collect();
    conts.sort();
    conts.dedup();
    SmallTypes { inters, conts }
}

/// The least relation closed under the five inclusion rules, reflexivity
/// and transitivity, over a finite set of types.
fn rule_closure(t: &SmallTypes) -> (Vec<Vec<bool>>, Vec<Vec<bool>>) {
    let ni = t.inters.len();
    let nc = t.conts.len();
    let idx_i: HashMap<&InterType, usize> = t.inters.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let idx_c: HashMap<&ContType, usize> = t.conts.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut ri = vec![vec![false; ni]; ni];
    let mut rc = vec![vec![false; nc]; nc];
    loop {
        let mut changed = false;
        let mut set = |r: &mut Vec<Vec<bool>>, x: usize, y: usize| {
            if !r[x][y] {
                r[x][y] = true;
                changed = true;
            }
        };
        for x in 0..ni {
            for y in 0..ni {
                let (s, u) = (&t.inters[x], &t.inters[y]);
                let derived = x == y
                    || u.is_omega()
                    || (u.0.len() == 1 && s.0.is_superset(&u.0))
                    || (u.0.len() >= 2
                        && u.conjuncts().all(|a| {
                            idx_i.get(&InterType::single(a.clone())).is_some_and(|&k| ri[x][k])
                        }));
                if derived {
                    set(&mut ri, x, y);
                }
            }
        }
        for x in 0..nc {
            for y in 0..nc {
                let (c, d) = (&t.conts[x], &t.conts[y]);
                let derived = x == y
                    || d.is_omega()
                    || match (c.0.split_first(), d.0.split_first()) {
                        (Some((s, c2)), Some((u, d2))) => {
                            let c2 = ContType(c2.to_vec());
                            let d2 = ContType(d2.to_vec());
                            match (idx_i.get(s), idx_i.get(u), idx_c.get(&c2), idx_c.get(&d2)) {
                                (Some(&a), Some(&b), Some(&e), Some(&f)) => ri[a][b] && rc[e][f],
                                _ => false,
                            }
                        }
                        _ => false,
                    };
                if derived {
                    set(&mut rc, x, y);
                }
            }
        }
        for r in [&mut ri, &mut rc] {
            let n = r.len();
            for k in 0..n {
                for x in 0..n {
                    if r[x][k] {
                        for y in 0..n {
                            if r[k][y] && !r[x][y] {
                                r[x][y] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            return (ri, rc);
        }
    }
}

fn subtype_oracle() -> Outcome {
    let t = small_types(5);
    let (ri, rc) = rule_closure(&t);
    let mut pairs = 0;
    let mut bad = Vec::new();
    for (x, s) in t.inters.iter().enumerate() {
        for (y, u) in t.inters.iter().enumerate() {
            pairs += 1;
            if ri[x][y] != subtype_inter(s, u) {
                bad.push(format!("{s} <= {u}"));
            }
        }
    }
    for (x, c) in t.conts.iter().enumerate() {
        for (y, d) in t.conts.iter().enumerate() {
            pairs += 1;
            if rc[x][y] != subtype_cont(c, d) {
                bad.push(format!("{c} <= {d}"));
            }
        }
    }
    Outcome {
        pass: bad.is_empty() && pairs >= 2000,
        detail: format!(
            "{} intersections, {} continuations, {pairs} pairs, mismatches {}",
            t.inters.len(),
            t.conts.len(),
            bad.len()
        ),
    }
}

fn bot_translation() -> Outcome {
    let (mut cases, mut bad) = (0, Vec::new());
    for e in corpus() {
        for mode in [Mode::Hnf, Mode::Nf, Mode::Sn] {
            let Ok(d) = type_term(&e.term, mode, FUEL) else { continue };
            cases += 1;
            let b = s_to_bot(&d);
            let down = check_derivation(&b, System::Bot).is_ok()
                && direct_approx(&b.concl.term, &e.term)
                && b.skeleton() == d.skeleton();
            let up = |target: &Term| {
                bot_to_s(&b, target)
                    .map(|s| check_derivation(&s, System::S).is_ok() && s.skeleton() == b.skeleton())
                    .unwrap_or(false)
            };
            if !(down && up(&e.term) && up(&b.concl.term)) {
                bad.push(format!("{} ({mode:?})", e.source));
            }
        }
    }
    Outcome { pass: bad.is_empty() && cases > 0, detail: format!("{cases} corpus derivations, failures {bad:?}") }
}

fn merged(c: &Derivation, q: &Derivation) -> (Derivation, Derivation) {
    let g = inter_ctx(&c.concl.vctx, &q.concl.vctx);
    let n = inter_ctx(&c.concl.nctx, &q.concl.nctx);
    (recontext(c, &g, &n), recontext(q, &g, &n))
}

fn expansion() -> Outcome {
    let mut g = Gen::new(10, false);
    let mut per_kind: HashMap<RedexKind, usize> = HashMap::new();
    let (mut instances, mut tries, mut bad) = (0, 0, Vec::new());
    let kinds = [RedexKind::Beta, RedexKind::MuNamed, RedexKind::MuOther, RedexKind::Ren];
    while instances < 200 && tries < 20_000 {
        let kind = kinds[tries % 4];
        tries += 1;
        let body = g.small(6);
        let q = g.small(4);
        let redex = match kind {
            RedexKind::Beta => Term::app(Term::lam("x", body), q.clone()),
            RedexKind::MuNamed => Term::app(Term::mu("b", "b", body), q.clone()),
            RedexKind::MuOther => Term::app(Term::mu("b", "c", body), q.clone()),
            RedexKind::Ren => Term::mu("a", "b", Term::mu("g", if tries % 8 < 4 { "g" } else { "c" }, body)),
        };
        if redex_kind(&redex) != Some(kind) {
            continue;
        }
        let contractum = contract_root(&redex).unwrap();
        let Ok(cd) = type_term(&contractum, Mode::Sn, 50) else { continue };
        let result = if kind == RedexKind::Ren {
            expand_root(&cd, &redex, None)
        } else {
            let Ok(qd) = type_term(&q, Mode::Sn, 50) else { continue };
            let (cd, qd) = merged(&cd, &qd);
            expand_root(&cd, &redex, Some(&qd))
        };
        instances += 1;
        *per_kind.entry(kind).or_default() += 1;
        match result {
            Ok(d) if check_derivation(&d, System::SN).is_ok() && d.concl.term == redex => {}
            Ok(d) => bad.push(format!("{}: {:?}", pretty(&redex), check_derivation(&d, System::SN).err())),
            Err(e) => bad.push(format!("{}: {e}", pretty(&redex))),
        }
    }
    let mut counts: Vec<String> = kinds.iter().map(|k| format!("{}={}", k.label(), per_kind.get(k).unwrap_or(&0))).collect();
    counts.sort();
    Outcome {
        pass: instances == 200 && bad.is_empty() && kinds.iter().all(|k| per_kind.contains_key(k)),
        detail: format!("{instances} redexes ({}), failures {bad:?}", counts.join(" ")),
    }
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        report(1, Some(s(1)), reduction_rules),
        report(2, Some(s(60)), confluence),
        report(3, Some(s(120)), approximation),
        report(4, Some(s(120)), || characterisation("hnf")),
        report(5, None, || characterisation("nf")),
        report(6, None, strong_normalisation),
        report(7, None, approximation_theorem),
        report(8, Some(s(30)), subtype_oracle),
        report(9, None, bot_translation),
        report(10, None, expansion),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
