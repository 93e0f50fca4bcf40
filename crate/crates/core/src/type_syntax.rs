//! Text syntax for types.
//!
//! ```text
//! basic := "(" cont ")" "->" const  |  const        // 'c means (O)->'c
//! inter := "w" | basic ("&" basic)* | "(" inter ")"
//! cont  := "O" | inter ("*" cont)?                  // S alone means S * O
//! const := "'" ident
//! ```
//!
//! The printer always emits the long forms: `(O)->'a`, `'a` never appears
//! bare. `ω`, `Ω`, `→`, `∩` and `×` are accepted as synonyms.

use std::fmt;

use thiserror::Error;

use crate::parse::{is_ident_char, is_ident_start};
use crate::types::{BasicType, ContType, InterType, TypeConst};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type syntax error at column {col}: {msg}")]
pub struct TypeParseError {
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Arrow,
    Amp,
    Star,
    Omega,
    BigOmega,
    Const(String),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, TypeParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let err = |msg: String| TypeParseError { col, msg };
        i += 1;
        let tok = match c {
            c if c.is_whitespace() => continue,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '&' | '∩' => Tok::Amp,
            '*' | '×' => Tok::Star,
            '→' => Tok::Arrow,
            'ω' => Tok::Omega,
            'Ω' => Tok::BigOmega,
            '-' if chars.get(i) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            '\'' => {
                let start = i;
                if !chars.get(i).is_some_and(|&d| is_ident_start(d)) {
                    return Err(err("expected a constant name after `'`".into()));
                }
                while chars.get(i).is_some_and(|&d| is_ident_char(d) && d != '\'') {
                    i += 1;
                }
                Tok::Const(chars[start..i].iter().collect())
            }
            c if is_ident_start(c) => {
                let start = i - 1;
                while chars.get(i).is_some_and(|&d| is_ident_char(d)) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match word.as_str() {
                    "w" => Tok::Omega,
                    "O" => Tok::BigOmega,
                    _ => return Err(err(format!("unknown word `{word}`; constants are written 'name"))),
                }
            }
            other => return Err(err(format!("unexpected `{other}`"))),
        };
        out.push((tok, col));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn error(&self, msg: &str) -> TypeParseError {
        let col = self.toks.get(self.pos).map(|(_, c)| *c).unwrap_or(self.end);
        TypeParseError { col, msg: msg.to_string() }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn cont(&mut self) -> Result<ContType, TypeParseError> {
        if self.eat(&Tok::BigOmega) {
            return Ok(ContType::omega());
        }
        let s = self.inter()?;
        let rest = if self.eat(&Tok::Star) { self.cont()? } else { ContType::omega() };
        Ok(rest.cons(s))
    }

    fn inter(&mut self) -> Result<InterType, TypeParseError> {
        if self.eat(&Tok::Omega) {
            return Ok(InterType::omega());
        }
        let mut acc = self.inter_atom()?;
        while self.eat(&Tok::Amp) {
            let more = self.inter_atom()?;
            acc.0.extend(more.0);
        }
        Ok(acc)
    }

    /// A basic type, or a parenthesised intersection.
    fn inter_atom(&mut self) -> Result<InterType, TypeParseError> {
        match self.peek() {
            Some(Tok::Const(c)) => {
                let c = TypeConst::new(c.clone());
                self.pos += 1;
                Ok(InterType::single(BasicType::atom(c)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.cont()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.error("expected `)`"));
                }
                if self.eat(&Tok::Arrow) {
                    match self.peek() {
                        Some(Tok::Const(c)) => {
                            let c = TypeConst::new(c.clone());
                            self.pos += 1;
                            Ok(InterType::single(BasicType::new(inner, c)))
                        }
                        _ => Err(self.error("expected a type constant after `->`")),
                    }
                } else if inner.0.len() == 1 {
                    Ok(inner.0.into_iter().next().expect("one component"))
                } else {
                    Err(self.error("expected `->` after a parenthesised continuation"))
                }
            }
            _ => Err(self.error("expected a type")),
        }
    }

    fn finish(&self) -> Result<(), TypeParseError> {
        if self.pos < self.toks.len() {
            Err(self.error("unexpected trailing input"))
        } else {
            Ok(())
        }
    }
}

fn parser(text: &str) -> Result<Parser, TypeParseError> {
    Ok(Parser { toks: lex(text)?, pos: 0, end: text.chars().count() + 1 })
}

pub fn parse_inter(text: &str) -> Result<InterType, TypeParseError> {
    let mut p = parser(text)?;
    let t = p.inter()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_cont(text: &str) -> Result<ContType, TypeParseError> {
    let mut p = parser(text)?;
    let t = p.cont()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_basic(text: &str) -> Result<BasicType, TypeParseError> {
    let t = parse_inter(text)?;
    t.as_basic()
        .cloned()
        .ok_or_else(|| TypeParseError { col: 1, msg: "expected a single basic type".into() })
}

impl fmt::Display for TypeConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "'{}", self.0)
    }
}

impl fmt::Display for BasicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})->{}", self.cont, self.head)
    }
}

impl fmt::Display for InterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_omega() {
            return f.write_str("w");
        }
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(" & "))
    }
}

impl fmt::Display for ContType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            if s.0.len() > 1 {
                write!(f, "({s}) * ")?;
            } else {
                write!(f, "{s} * ")?;
            }
        }
        f.write_str("O")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sugar_and_long_forms_agree() {
        assert_eq!(parse_inter("'a").unwrap(), parse_inter("(O)->'a").unwrap());
        assert_eq!(parse_cont("'a").unwrap(), parse_cont("(O)->'a * O").unwrap());
        assert_eq!(parse_cont("w").unwrap(), parse_cont("w * O").unwrap());
        assert_eq!(parse_inter("ω").unwrap(), InterType::omega());
        assert_eq!(parse_cont("Ω").unwrap(), ContType::omega());
    }

    #[test]
    fn printing_is_canonical() {
        let t = parse_inter("(('a)->'p * O) -> 'p").unwrap();
        assert_eq!(t.to_string(), "(((O)->'a * O)->'p * O)->'p");
        let c = parse_cont("('b & 'a) * w").unwrap();
        assert_eq!(c.to_string(), "((O)->'a & (O)->'b) * w * O");
        assert_eq!(parse_inter("w").unwrap().to_string(), "w");
    }

    #[test]
    fn round_trip() {
        for s in ["'a & ('b * 'c)->'d", "(w * O)->'p", "('a & 'b)", "(O)->'p"] {
            let t = parse_inter(s).unwrap();
            assert_eq!(parse_inter(&t.to_string()).unwrap(), t, "{s}");
        }
    }

    #[test]
    fn errors() {
        assert!(parse_inter("").is_err());
        assert!(parse_inter("'a &").is_err());
        assert!(parse_inter("(O)").is_err());
        assert!(parse_inter("a").is_err());
        assert!(parse_inter("(O)->'a 'b").is_err());
        assert!(parse_basic("'a & 'b").is_err());
    }
}
