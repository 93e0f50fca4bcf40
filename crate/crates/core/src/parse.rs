//! Parser for the term surface syntax.
//!
//! ```text
//! term  := lam | mu | app
//! lam   := "\" ident "." term
//! mu    := "mu" ident "." "[" ident "]" term
//! app   := atom atom*
//! atom  := ident | "bot" | "(" term ")"
//! ```
//!
//! `λ`, `μ` and `⊥` are accepted as synonyms for `\`, `mu` and `bot`. Unbound identifiers are free.

use thiserror::Error;

use crate::term::{Ident, Ref, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Lambda,
    Dot,
    LBrack,
    RBrack,
    LParen,
    RParen,
    Mu,
    Bot,
    Ident(Ident),
    Other(char),
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Vec<Spanned> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, k) = (line, col);
        chars.next();
        if c == '\n' {
            line += 1;
            col = 1;
            continue;
        }
        col += 1;
        if c.is_whitespace() {
            continue;
        }
        let tok = match c {
            '\\' | 'λ' => Tok::Lambda,
            'μ' => Tok::Mu,
            '⊥' => Tok::Bot,
            '.' => Tok::Dot,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            c if is_ident_start(c) => {
                let mut s = String::from(c);
                while let Some(&d) = chars.peek() {
                    if !is_ident_char(d) {
                        break;
                    }
                    s.push(d);
                    chars.next();
                    col += 1;
                }
                match s.as_str() {
                    "mu" => Tok::Mu,
                    "bot" => Tok::Bot,
                    _ => Tok::Ident(s),
                }
            }
            other => Tok::Other(other),
        };
        toks.push(Spanned { tok, line: l, col: k });
    }
    toks
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
    vars: Vec<Ident>,
    names: Vec<Ident>,
}

fn resolve(stack: &[Ident], x: &str) -> Ref {
    match stack.iter().rev().position(|y| y == x) {
        Some(i) => Ref::Bound(i),
        None => Ref::Free(x.to_string()),
    }
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or(self.end);
        ParseError { line, col, msg: msg.into() }
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of input".into(),
            Some(Tok::Ident(s)) => format!("identifier `{s}`"),
            Some(Tok::Other(c)) => format!("`{c}`"),
            Some(t) => format!("{t:?}"),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", self.describe())))
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        if let Some(Tok::Ident(s)) = self.peek() {
            let s = s.clone();
            self.pos += 1;
            Ok(s)
        } else {
            Err(self.error(format!("expected identifier, found {}", self.describe())))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::Lambda) => {
                self.pos += 1;
                let x = self.ident()?;
                self.expect(Tok::Dot, "`.`")?;
                self.vars.push(x.clone());
                let body = self.term();
                self.vars.pop();
                Ok(Term::Lam(x, Box::new(body?)))
            }
            Some(Tok::Mu) => {
                self.pos += 1;
                let a = self.ident()?;
                self.expect(Tok::Dot, "`.`")?;
                self.expect(Tok::LBrack, "`[`")?;
                let b = self.ident()?;
                self.expect(Tok::RBrack, "`]`")?;
                self.names.push(a.clone());
                let target = resolve(&self.names, &b);
                let body = self.term();
                self.names.pop();
                Ok(Term::Mu(a, target, Box::new(body?)))
            }
            _ => self.app(),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_) | Tok::Bot | Tok::LParen | Tok::Lambda | Tok::Mu)
        )
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut t = self.atom()?;
        while self.starts_atom() {
            // A trailing abstraction extends to the right: `x \y.y z`.
            let arg = if matches!(self.peek(), Some(Tok::Lambda | Tok::Mu)) {
                self.term()?
            } else {
                self.atom()?
            };
            t = Term::app(t, arg);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::Ident(x)) => {
                let r = resolve(&self.vars, x);
                self.pos += 1;
                Ok(Term::Var(r))
            }
            Some(Tok::Bot) => {
                self.pos += 1;
                Ok(Term::Bot)
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.error(format!("expected a term, found {}", self.describe()))),
        }
    }
}

/// Parses a term.
pub fn parse(text: &str) -> Result<Term, ParseError> {
    let toks = lex(text);
    let end = text
        .lines()
        .enumerate()
        .last()
        .map(|(i, l)| (i + 1, l.chars().count() + 1))
        .unwrap_or((1, 1));
    let mut p = Parser { toks, pos: 0, end, vars: Vec::new(), names: Vec::new() };
    let t = p.term()?;
    if p.pos < p.toks.len() {
        return Err(p.error(format!("unexpected {}", p.describe())));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pretty::pretty;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(p("\\x.x"), Term::lam("x", Term::var("x")));
        assert_eq!(
            p("mu a.[b] x y"),
            Term::mu("a", "b", Term::app(Term::var("x"), Term::var("y")))
        );
        let w = Term::lam("x", Term::app(Term::var("x"), Term::var("x")));
        assert_eq!(p("(\\x.x x)(\\x.x x)"), Term::app(w.clone(), w));
    }

    #[test]
    fn unicode_synonyms() {
        assert_eq!(parse("λx.μa.[a] x ⊥").unwrap(), parse("\\x.mu a.[a] x bot").unwrap());
    }

    #[test]
    fn self_target_and_shadowing() {
        assert_eq!(p("mu a.[a] x"), Term::mu("a", "a", Term::var("x")));
        assert_eq!(p("\\x.\\x.x"), Term::lam("y", Term::lam("x", Term::var("x"))));
        assert!(p("\\x.x").alpha_eq(&p("\\y.y")));
        assert!(p("mu a.[a]x").alpha_eq(&p("mu b.[b]x")));
        assert!(!p("mu a.[b]x").alpha_eq(&p("mu a.[c]x")));
    }

    #[test]
    fn trailing_binder_in_argument() {
        assert_eq!(p("x \\y.y z"), p("x (\\y.y z)"));
    }

    #[test]
    fn errors_carry_position() {
        let e = parse("\\x x").unwrap_err();
        assert_eq!((e.line, e.col), (1, 4));
        let e = parse("(x\n  y").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(parse("mu.[a] x").is_err());
        assert!(parse("x )").is_err());
        assert!(parse("").is_err());
        assert!(parse("x $").is_err());
    }

    #[test]
    fn round_trip() {
        for s in [
            "\\x.x",
            "mu a.[b] mu g.[d] x",
            "(mu b.[b] x) y",
            "\\x.\\x'.x x'",
            "x (\\y.y) (mu a.[a] bot)",
        ] {
            let t = p(s);
            assert_eq!(p(&pretty(&t)), t, "{s}");
        }
    }
}
