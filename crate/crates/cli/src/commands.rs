use std::fs;
use std::io::Read;
use std::path::Path;

use lmu::approx::{approximants, join_all};
use lmu::corpus::{corpus, parse_corpus, Entry};
use lmu::deriv::{check_derivation, Derivation, System};
use lmu::graph::SnResult;
use lmu::infer::{classify, infer_with, Report, Tri, Typing};
use lmu::json::{derivation_from_json, derivation_to_json};
use lmu::reduce::{is_hnf, is_nf, normalize, redexes, Status, Strategy};
use lmu::type_syntax::{parse_cont, parse_inter};
use lmu::types::{subtype_cont, subtype_inter};
use lmu::exhaustive::SearchBounds;
use lmu::{parse, pretty, Term};
use serde_json::{json, Value};

use crate::exit::*;
use crate::style::{bad, dim, good};
use crate::{Cli, Command, CorpusCommand, Format, Global, Input, StrategyArg, SystemArg};

/// Failure that ends a command early with a message on stderr.
struct Fail(u8, String);

type Res = Result<u8, Fail>;

fn malformed(msg: impl std::fmt::Display) -> Fail {
    Fail(MALFORMED, msg.to_string())
}

pub fn run(cli: &Cli) -> u8 {
    let g = &cli.global;
    let res = match &cli.command {
        Command::Parse(input) => cmd_parse(g, input),
        Command::Reduce { input, strategy } => cmd_reduce(g, input, *strategy),
        Command::Classify(input) => cmd_classify(g, input),
        Command::Approx(input) => cmd_approx(g, input),
        Command::Join { exprs } => cmd_join(g, exprs),
        Command::Subtype { types, cont } => cmd_subtype(g, types, *cont),
        Command::Check { file, system } => cmd_check(g, file, *system),
        Command::Infer { input, system, tree } => cmd_infer(g, input, *system, *tree),
        Command::Corpus(CorpusCommand::Run { file }) => cmd_corpus_run(g, file.as_deref()),
        Command::Corpus(CorpusCommand::List { file }) => cmd_corpus_list(g, file.as_deref()),
    };
    match res {
        Ok(code) => code,
        Err(Fail(code, msg)) => {
            eprintln!("lmu: {msg}");
            code
        }
    }
}

fn read_source(path: &Path) -> Result<String, Fail> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(malformed)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| malformed(format!("{}: {e}", path.display())))
    }
}

fn read_term(input: &Input) -> Result<Term, Fail> {
    let text = match (&input.expr, &input.file) {
        (Some(e), _) => e.clone(),
        (None, Some(f)) => read_source(f)?,
        (None, None) => return Err(malformed("no term given")),
    };
    parse(text.trim()).map_err(malformed)
}

fn emit(v: Value) {
    println!("{}", serde_json::to_string_pretty(&v).expect("serialisable"));
}

fn system_of(s: SystemArg) -> System {
    match s {
        SystemArg::S => System::S,
        SystemArg::Bot => System::Bot,
        SystemArg::Sn => System::SN,
    }
}

fn cmd_parse(g: &Global, input: &Input) -> Res {
    let m = read_term(input)?;
    match g.format {
        Format::Text => println!("{}", pretty(&m)),
        Format::Json => emit(json!({
            "term": pretty(&m),
            "size": m.size(),
            "free_vars": m.free_vars(),
            "free_names": m.free_names(),
            "hnf": is_hnf(&m),
            "nf": is_nf(&m),
            "redexes": redexes(&m)
                .iter()
                .map(|(p, k)| json!({"position": p.to_string(), "kind": k.label()}))
                .collect::<Vec<_>>(),
        })),
    }
    Ok(OK)
}

fn cmd_reduce(g: &Global, input: &Input, strategy: StrategyArg) -> Res {
    let m = read_term(input)?;
    let strategy = match strategy {
        StrategyArg::Lor => Strategy::Lor,
        StrategyArg::RightmostInnermost => Strategy::RightmostInnermost,
        StrategyArg::Random => match g.seed {
            Some(s) => Strategy::Random(s),
            None => return Err(malformed("--strategy random needs --seed")),
        },
    };
    let out = normalize(&m, strategy, g.fuel);
    let code = match out.status {
        Status::Normal => OK,
        Status::FuelExhausted => FUEL_EXHAUSTED,
    };
    match g.format {
        Format::Text => {
            println!("{}", dim(&format!("0: {}", pretty(&m))));
            for (i, s) in out.steps.iter().enumerate() {
                let note = format!("[{} at {}]", s.kind.label(), s.position);
                println!("{}  {}", dim(&format!("{}: {}", i + 1, pretty(&s.result))), dim(&note));
            }
            match out.status {
                Status::Normal => println!("{}", pretty(&out.final_term)),
                Status::FuelExhausted => {
                    println!("{}", pretty(&out.final_term));
                    eprintln!("lmu: fuel exhausted after {} steps", out.steps.len());
                }
            }
        }
        Format::Json => emit(json!({
            "status": out.status,
            "final": pretty(&out.final_term),
            "steps": out.steps.iter().map(|s| json!({
                "position": s.position.to_string(),
                "kind": s.kind.label(),
                "term": pretty(&s.result),
            })).collect::<Vec<_>>(),
        })),
    }
    Ok(code)
}

fn typing_text(t: &Typing) -> String {
    match t {
        Typing::Found(d) => format!("yes  {}", d.concl),
        Typing::NotFound => "no".into(),
        Typing::Unknown => "unknown".into(),
    }
}

fn typing_json(t: &Typing) -> Value {
    match t {
        Typing::Found(d) => json!({"answer": "yes", "judgement": d.concl.to_string()}),
        Typing::NotFound => json!({"answer": "no"}),
        Typing::Unknown => json!({"answer": "unknown"}),
    }
}

fn sn_text(r: &Report) -> String {
    match &r.sn_by_graph {
        SnResult::Sn(n) => format!("yes  (longest reduction {n})"),
        SnResult::NotSn(cycle) => format!("no  (loops through {})", pretty(&cycle[0])),
        SnResult::Unknown => "unknown".into(),
    }
}

fn report_json(m: &Term, r: &Report) -> Value {
    json!({
        "term": pretty(m),
        "hnf_by_reduction": r.hnf_by_reduction,
        "nf_by_reduction": r.nf_by_reduction,
        "sn_by_graph": r.sn_tri(),
        "typeable_s_nonomega": typing_json(&r.typeable_s_nonomega),
        "typeable_omega_free": typing_json(&r.typeable_omega_free),
        "typeable_sn": typing_json(&r.typeable_sn),
        "comparisons": r.comparisons().iter().map(|c| json!({
            "name": c.name,
            "reduction": c.reduction,
            "typing": c.typing,
            "agrees": c.agrees(),
        })).collect::<Vec<_>>(),
        "disagreement": r.disagreement(),
    })
}

fn tri_styled(t: Tri) -> String {
    match t {
        Tri::Yes => good("yes"),
        Tri::No => bad("no"),
        Tri::Unknown => dim("unknown"),
    }
}

fn cmd_classify(g: &Global, input: &Input) -> Res {
    let m = read_term(input)?;
    let r = classify(&m, g.fuel, g.depth, g.width);
    match g.format {
        Format::Text => {
            println!("term                  {}", pretty(&m));
            println!("head normal form      {}", tri_styled(r.hnf_by_reduction));
            println!("normal form           {}", tri_styled(r.nf_by_reduction));
            println!("strongly normalising  {}", sn_text(&r));
            println!("typeable in S, not ω  {}", typing_text(&r.typeable_s_nonomega));
            println!("typeable ω-free       {}", typing_text(&r.typeable_omega_free));
            println!("typeable in SN        {}", typing_text(&r.typeable_sn));
            for c in r.comparisons() {
                let verdict = if !c.conclusive() {
                    dim("inconclusive")
                } else if c.agrees() {
                    good("agree")
                } else {
                    bad("DISAGREE")
                };
                println!("{:<4} reduction={} typing={}  {}", c.name, c.reduction, c.typing, verdict);
            }
        }
        Format::Json => emit(report_json(&m, &r)),
    }
    Ok(if r.disagreement() { DISAGREEMENT } else { OK })
}

fn cmd_approx(g: &Global, input: &Input) -> Res {
    let m = read_term(input)?;
    let set = approximants(&m, g.fuel);
    let join = join_all(set.maximal.iter());
    match g.format {
        Format::Text => {
            for a in &set.maximal {
                println!("{}", pretty(a));
            }
            if !set.complete {
                println!("{}", dim("(incomplete: fuel ran out before every reduct was explored)"));
            }
            if let Some(j) = &join {
                if set.maximal.len() > 1 {
                    println!("join: {}", pretty(j));
                }
            }
        }
        Format::Json => emit(json!({
            "maximal": set.maximal.iter().map(pretty).collect::<Vec<_>>(),
            "complete": set.complete,
            "join": join.as_ref().map(pretty),
        })),
    }
    Ok(OK)
}

fn cmd_join(g: &Global, exprs: &[String]) -> Res {
    let terms: Vec<Term> = exprs.iter().map(|e| parse(e.trim()).map_err(malformed)).collect::<Result<_, _>>()?;
    let j = join_all(terms.iter());
    match g.format {
        Format::Text => println!("{}", j.as_ref().map_or_else(|| "undefined".to_string(), pretty)),
        Format::Json => emit(json!({"join": j.as_ref().map(pretty)})),
    }
    Ok(if j.is_some() { OK } else { NEGATIVE })
}

fn cmd_subtype(g: &Global, types: &[String], cont: bool) -> Res {
    if types.len() != 2 {
        return Err(malformed("subtype needs exactly two -t arguments"));
    }
    let holds = if cont {
        let c = parse_cont(&types[0]).map_err(malformed)?;
        let d = parse_cont(&types[1]).map_err(malformed)?;
        subtype_cont(&c, &d)
    } else {
        let s = parse_inter(&types[0]).map_err(malformed)?;
        let t = parse_inter(&types[1]).map_err(malformed)?;
        subtype_inter(&s, &t)
    };
    match g.format {
        Format::Text => println!("{holds}"),
        Format::Json => emit(json!({"subtype": holds})),
    }
    Ok(if holds { OK } else { NEGATIVE })
}

fn cmd_check(g: &Global, file: &Path, system: SystemArg) -> Res {
    let text = read_source(file)?;
    let v: Value = serde_json::from_str(&text).map_err(malformed)?;
    let d = derivation_from_json(&v).map_err(malformed)?;
    let system = system_of(system);
    let res = check_derivation(&d, system);
    match g.format {
        Format::Text => match &res {
            Ok(()) => println!("{}", good("ok")),
            Err(e) => println!("{}", bad(&e.to_string())),
        },
        Format::Json => emit(json!({
            "system": system,
            "ok": res.is_ok(),
            "conclusion": d.concl.to_string(),
            "error": res.as_ref().err().map(|e| e.to_string()),
        })),
    }
    Ok(if res.is_ok() { OK } else { NEGATIVE })
}

fn tree_lines(d: &Derivation, indent: usize, out: &mut Vec<String>) {
    out.push(format!("{}{}  {}", "  ".repeat(indent), dim(&format!("[{}]", d.rule)), d.concl));
    for p in &d.premises {
        tree_lines(p, indent + 1, out);
    }
}

fn cmd_infer(g: &Global, input: &Input, system: SystemArg, tree: bool) -> Res {
    let m = read_term(input)?;
    let system = system_of(system);
    let bounds = SearchBounds::new(g.depth, g.width);
    let found = infer_with(&m, system, &bounds, g.fuel);
    match g.format {
        Format::Text => {
            for d in &found {
                println!("{}", d.concl);
                if tree {
                    let mut lines = Vec::new();
                    tree_lines(d, 1, &mut lines);
                    for l in lines {
                        println!("{l}");
                    }
                }
            }
            if found.is_empty() {
                println!("no typing within depth {} and width {}", g.depth, g.width);
            }
        }
        Format::Json => emit(json!({
            "system": system,
            "derivations": found.iter().map(|d| if tree {
                derivation_to_json(d)
            } else {
                json!(d.concl.to_string())
            }).collect::<Vec<_>>(),
        })),
    }
    Ok(if found.is_empty() { NEGATIVE } else { OK })
}

fn load_corpus(file: Option<&Path>) -> Result<Vec<Entry>, Fail> {
    match file {
        None => Ok(corpus()),
        Some(p) => parse_corpus(&read_source(p)?).map_err(malformed),
    }
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_corpus_list(g: &Global, file: Option<&Path>) -> Res {
    let entries = load_corpus(file)?;
    match g.format {
        Format::Text => {
            for e in &entries {
                println!("{:<40} hnf={} nf={} sn={}", pretty(&e.term), yn(e.hnf), yn(e.nf), yn(e.sn));
            }
        }
        Format::Json => emit(json!(entries
            .iter()
            .map(|e| json!({"line": e.line, "term": pretty(&e.term), "hnf": e.hnf, "nf": e.nf, "sn": e.sn}))
            .collect::<Vec<_>>())),
    }
    Ok(OK)
}

/// Whether a conclusive answer contradicts the expected tag.
fn contradicts(t: Tri, expected: bool) -> bool {
    t != Tri::Unknown && (t == Tri::Yes) != expected
}

fn cmd_corpus_run(g: &Global, file: Option<&Path>) -> Res {
    let entries = load_corpus(file)?;
    let (mut disagreements, mut mismatches, mut inconclusive) = (0, 0, 0);
    let mut rows = Vec::new();
    for e in &entries {
        let r = classify(&e.term, g.fuel, g.depth, g.width);
        let cs = r.comparisons();
        let tags = [e.hnf, e.nf, e.sn];
        let mismatch = cs.iter().zip(tags).any(|(c, t)| contradicts(c.reduction, t) || contradicts(c.typing, t));
        let unknown = cs.iter().any(|c| !c.conclusive());
        disagreements += usize::from(r.disagreement());
        mismatches += usize::from(mismatch);
        inconclusive += usize::from(unknown);
        if g.format == Format::Text {
            let verdict = if r.disagreement() {
                bad("DISAGREE")
            } else if mismatch {
                bad("TAG MISMATCH")
            } else if unknown {
                dim("inconclusive")
            } else {
                good("ok")
            };
            let cols: Vec<String> = cs.iter().map(|c| format!("{}={}/{}", c.name, c.reduction, c.typing)).collect();
            println!("{:<40} {}  {}", pretty(&e.term), cols.join(" "), verdict);
        } else {
            let mut v = report_json(&e.term, &r);
            v["line"] = json!(e.line);
            v["tag_mismatch"] = json!(mismatch);
            rows.push(v);
        }
    }
    match g.format {
        Format::Text => println!(
            "{} terms, {} disagreements, {} tag mismatches, {} inconclusive",
            entries.len(),
            disagreements,
            mismatches,
            inconclusive
        ),
        Format::Json => emit(json!({
            "terms": rows,
            "disagreements": disagreements,
            "tag_mismatches": mismatches,
            "inconclusive": inconclusive,
        })),
    }
    Ok(if disagreements > 0 {
        DISAGREEMENT
    } else if mismatches > 0 {
        NEGATIVE
    } else {
        OK
    })
}
