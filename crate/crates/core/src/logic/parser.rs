//! Recursive-descent parser for the formula surface syntax.
//!
//! ```text
//! expr    := imp
//! imp     := or ( ("->" | "<->") imp )?
//! or      := and ( "|" and )*
//! and     := bin ( "&" bin )*
//! bin     := unary ( ("U" | "R") bin )?
//! unary   := ("!" | "X" | "F" | "G" | "FP") unary | atom | "(" expr ")"
//! atom    := [a-zA-Z][a-zA-Z0-9_]*
//! ```
//!
//! Negation is pushed to the atoms during parsing; negating (or using as an
//! implication antecedent) a subformula that contains `FP` is rejected.

use std::collections::BTreeSet;

use super::alphabet::Partition;
use super::formula::Formula;
use crate::error::{Error, Result};

const KEYWORDS: [&str; 6] = ["X", "F", "G", "FP", "U", "R"];

pub fn is_keyword(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    Next,
    Finally,
    Globally,
    Prompt,
    Until,
    Release,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 2;
                Tok::Iff
            }
            c if c.is_ascii_alphabetic() => {
                while i + 1 < bytes.len() && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_') {
                    i += 1;
                }
                match &text[start..=i] {
                    "X" => Tok::Next,
                    "F" => Tok::Finally,
                    "G" => Tok::Globally,
                    "FP" => Tok::Prompt,
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    ident => Tok::Ident(ident.to_string()),
                }
            }
            _ => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{}`", text[i..].chars().next().unwrap()),
                })
            }
        };
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    atoms: &'a dyn Fn(&str) -> bool,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos,
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Formula> {
        let start = self.pos();
        let lhs = self.or()?;
        match self.peek() {
            Some(Tok::Implies) => {
                self.at += 1;
                let rhs = self.expr()?;
                match Formula::implies(lhs, rhs) {
                    Some(f) => Ok(f),
                    None => self.err(start, "antecedent of `->` contains FP"),
                }
            }
            Some(Tok::Iff) => {
                let op = self.pos();
                self.at += 1;
                let rhs = self.expr()?;
                match Formula::iff(lhs, rhs) {
                    Some(f) => Ok(f),
                    None => self.err(op, "operand of `<->` contains FP"),
                }
            }
            _ => Ok(lhs),
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.at += 1;
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.binary()?;
        while self.peek() == Some(&Tok::And) {
            self.at += 1;
            lhs = Formula::and(lhs, self.binary()?);
        }
        Ok(lhs)
    }

    fn binary(&mut self) -> Result<Formula> {
        let lhs = self.unary()?;
        match self.peek() {
            Some(Tok::Until) => {
                self.at += 1;
                Ok(Formula::until(lhs, self.binary()?))
            }
            Some(Tok::Release) => {
                self.at += 1;
                Ok(Formula::release(lhs, self.binary()?))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        let pos = self.pos();
        let Some(tok) = self.peek().cloned() else {
            return self.err(pos, "unexpected end of input");
        };
        self.at += 1;
        match tok {
            Tok::Not => {
                let inner = self.unary()?;
                match inner.negate() {
                    Some(f) => Ok(f),
                    None => self.err(pos, "negation over a subformula containing FP"),
                }
            }
            Tok::Next => Ok(Formula::next(self.unary()?)),
            Tok::Finally => Ok(Formula::finally(self.unary()?)),
            Tok::Globally => Ok(Formula::globally(self.unary()?)),
            Tok::Prompt => Ok(Formula::prompt(self.unary()?)),
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err(self.pos(), "expected `)`");
                }
                self.at += 1;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if !(self.atoms)(&name) {
                    return self.err(pos, format!("undeclared proposition `{name}`"));
                }
                Ok(Formula::Atom(name))
            }
            other => self.err(pos, format!("unexpected token {other:?}")),
        }
    }
}

fn parse(text: &str, atoms: &dyn Fn(&str) -> bool) -> Result<Formula> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        at: 0,
        end: text.len(),
        atoms,
    };
    let f = parser.expr()?;
    if parser.at != parser.toks.len() {
        return parser.err(parser.pos(), "trailing input");
    }
    Ok(f)
}

/// Parses a delay-game winning condition; every atom must be declared in
/// `part`.
pub fn parse_formula(text: &str, part: &Partition) -> Result<Formula> {
    parse(text, &|a| part.contains(a))
}

/// Parses over an explicit set of allowed atoms (which may include the
/// coloring proposition).
pub fn parse_with_atoms<S: AsRef<str>>(text: &str, atoms: &[S]) -> Result<Formula> {
    let set: BTreeSet<&str> = atoms.iter().map(AsRef::as_ref).collect();
    parse(text, &|a| set.contains(a))
}
