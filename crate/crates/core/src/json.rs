//! JSON form of derivations.
//!
//! Each node is an object
//!
//! ```json
//! {"rule": "Abs", "ctx": {"y": "(O)->'p"}, "term": "\\x.x",
//!  "type": "...", "nctx": {}, "witness": {"var": "x"}, "premises": [...]}
//! ```
//!
//! Terms and types use the text syntax. `witness` is `null`, `{"var": x}`
//! or `{"name": a, "cont": C}`.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::deriv::{Derivation, Judgement, Rule, Witness};
use crate::parse::parse;
use crate::pretty::pretty;
use crate::type_syntax::{parse_cont, parse_inter};
use crate::types::{NameContext, VarContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad derivation JSON at {path}: {msg}")]
pub struct JsonError {
    pub path: String,
    pub msg: String,
}

pub fn derivation_to_json(d: &Derivation) -> Value {
    let j = &d.concl;
    let ctx: Map<String, Value> = j.vctx.iter().map(|(x, s)| (x.clone(), json!(s.to_string()))).collect();
    let nctx: Map<String, Value> = j.nctx.iter().map(|(a, c)| (a.clone(), json!(c.to_string()))).collect();
    let witness = match &d.witness {
        Witness::None => Value::Null,
        Witness::Var(x) => json!({ "var": x }),
        Witness::Name { name, cont } => json!({ "name": name, "cont": cont.to_string() }),
    };
    json!({
        "rule": d.rule.name(),
        "ctx": ctx,
        "term": pretty(&j.term),
        "type": j.ty.to_string(),
        "nctx": nctx,
        "witness": witness,
        "premises": d.premises.iter().map(derivation_to_json).collect::<Vec<_>>(),
    })
}

pub fn derivation_from_json(v: &Value) -> Result<Derivation, JsonError> {
    node(v, "root")
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value, JsonError> {
    v.get(key).ok_or_else(|| JsonError { path: path.into(), msg: format!("missing field `{key}`") })
}

fn string<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a str, JsonError> {
    field(v, key, path)?
        .as_str()
        .ok_or_else(|| JsonError { path: path.into(), msg: format!("`{key}` must be a string") })
}

fn object<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Map<String, Value>, JsonError> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(EMPTY.get_or_init(Map::new)),
        Some(Value::Object(m)) => Ok(m),
        Some(_) => Err(JsonError { path: path.into(), msg: format!("`{key}` must be an object") }),
    }
}

static EMPTY: std::sync::OnceLock<Map<String, Value>> = std::sync::OnceLock::new();

fn node(v: &Value, path: &str) -> Result<Derivation, JsonError> {
    let err = |msg: String| JsonError { path: path.into(), msg };
    let rule_name = string(v, "rule", path)?;
    let rule = Rule::from_name(rule_name).ok_or_else(|| err(format!("unknown rule `{rule_name}`")))?;
    let term = parse(string(v, "term", path)?).map_err(|e| err(e.to_string()))?;
    let ty = parse_inter(string(v, "type", path)?).map_err(|e| err(e.to_string()))?;
    let mut vctx = VarContext::new();
    for (x, s) in object(v, "ctx", path)? {
        let s = s.as_str().ok_or_else(|| err(format!("type of {x} must be a string")))?;
        vctx.insert(x.clone(), parse_inter(s).map_err(|e| err(e.to_string()))?);
    }
    let mut nctx = NameContext::new();
    for (a, c) in object(v, "nctx", path)? {
        let c = c.as_str().ok_or_else(|| err(format!("type of {a} must be a string")))?;
        nctx.insert(a.clone(), parse_cont(c).map_err(|e| err(e.to_string()))?);
    }
    let witness = match v.get("witness") {
        None | Some(Value::Null) => Witness::None,
        Some(w) => {
            if let Some(x) = w.get("var").and_then(Value::as_str) {
                Witness::Var(x.to_string())
            } else if let Some(a) = w.get("name").and_then(Value::as_str) {
                let cont = parse_cont(string(w, "cont", path)?).map_err(|e| err(e.to_string()))?;
                Witness::Name { name: a.to_string(), cont }
            } else {
                return Err(err("witness needs `var` or `name`".into()));
            }
        }
    };
    let premises = match v.get("premises") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(ps)) => ps
            .iter()
            .enumerate()
            .map(|(i, p)| node(p, &format!("{path}.{i}")))
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(err("`premises` must be an array".into())),
    };
    Ok(Derivation { rule, concl: Judgement::new(vctx, term, ty, nctx), premises, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deriv::{check_derivation, System};
    use crate::typer::{type_term, Mode};

    #[test]
    fn round_trip() {
        for src in ["\\x.x", "(\\f.\\x.f (f x)) (\\y.y) z", "(mu b.[b] mu c.[b] x) y z", "mu a.[b] mu c.[a] x"] {
            let m = parse(src).unwrap();
            for mode in [Mode::Hnf, Mode::Sn] {
                let d = type_term(&m, mode, 50).unwrap();
                let back = derivation_from_json(&derivation_to_json(&d)).unwrap();
                assert_eq!(back, d, "{src}");
                check_derivation(&back, System::S).unwrap();
            }
        }
    }

    #[test]
    fn errors_have_paths() {
        let v = json!({"rule": "App", "term": "x y", "type": "'p", "premises": [{"rule": "Nope"}]});
        let e = derivation_from_json(&v).unwrap_err();
        assert_eq!(e.path, "root.0");
        assert!(derivation_from_json(&json!({"rule": "Ax", "term": "x"})).is_err());
    }
}
