//! The bundled corpus of terms with known reduction behaviour.

use thiserror::Error;

use crate::parse::parse;
use crate::term::Term;

/// The bundled corpus source.
pub const CORPUS: &str = include_str!("../corpus/terms.lmu");

#[derive(Clone, Debug)]
pub struct Entry {
    pub line: usize,
    pub source: String,
    pub term: Term,
    pub hnf: bool,
    pub nf: bool,
    pub sn: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("corpus line {line}: {msg}")]
pub struct CorpusError {
    pub line: usize,
    pub msg: String,
}

/// Parses corpus text. Blank lines and lines starting with `#` are skipped;
/// every other line is a term followed by `# hnf=.. nf=.. sn=..`.
pub fn parse_corpus(text: &str) -> Result<Vec<Entry>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| CorpusError { line, msg };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (src, tags) = trimmed.split_once('#').ok_or_else(|| err("missing status tags".into()))?;
        let term = parse(src.trim()).map_err(|e| err(e.to_string()))?;
        let (mut hnf, mut nf, mut sn) = (None, None, None);
        for tag in tags.split_whitespace() {
            let (k, v) = tag.split_once('=').ok_or_else(|| err(format!("bad tag `{tag}`")))?;
            let v = match v {
                "yes" => true,
                "no" => false,
                _ => return Err(err(format!("bad value in `{tag}`"))),
            };
            match k {
                "hnf" => hnf = Some(v),
                "nf" => nf = Some(v),
                "sn" => sn = Some(v),
                _ => return Err(err(format!("unknown tag `{k}`"))),
            }
        }
        let need = |t: Option<bool>, k: &str| t.ok_or_else(|| err(format!("missing `{k}` tag")));
        out.push(Entry {
            line,
            source: src.trim().to_string(),
            term,
            hnf: need(hnf, "hnf")?,
            nf: need(nf, "nf")?,
            sn: need(sn, "sn")?,
        });
    }
    Ok(out)
}

/// The bundled corpus.
pub fn corpus() -> Vec<Entry> {
    parse_corpus(CORPUS).expect("bundled corpus parses")
}
