//! Text format for algebra elements.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := '-'* factor+                 juxtaposition is the product
//! factor  := primary '*'* ('^' uint)?     '*' is the involution
//! primary := rational | letter | '(' expr ')'
//! ```
//!
//! A `/` between factors divides by a constant factor, so coefficients
//! like `(1-p)/p` are accepted. Rational literals look like `3/4` or `-2`. Identifiers name either a
//! letter of the alphabet (`a`, `f_1`; `a*` is the star of `a`) or a
//! deformation parameter (`p`, `q`) bound to a rational value.
//! `print` followed by `parse` is the identity on canonical forms.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::ncpoly::{Alphabet, NCPoly, Word};
use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Rat(Scalar),
    Ident(String),
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Plus,
    Minus,
}

fn tokenize(input: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            '^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            '/' => {
                toks.push((i, Tok::Slash));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut text = input[start..i].to_string();
                // a '/' directly followed by digits continues the rational
                if i < bytes.len() && bytes[i] == b'/' {
                    let mut j = i + 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j > i + 1 {
                        text.push_str(&input[i..j]);
                        i = j;
                    }
                }
                let v = crate::scalar::parse_scalar(&text).map_err(|_| Error::Parse {
                    pos: start,
                    msg: format!("bad rational literal {text:?}"),
                })?;
                toks.push((start, Tok::Rat(v)));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(input[start..i].to_string())));
            }
            _ => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character {c:?}"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    alph: &'a Arc<Alphabet>,
    params: &'a BTreeMap<String, Scalar>,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<NCPoly> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.bump();
                    acc = acc.checked_add(&self.term()?)?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.checked_sub(&self.term()?)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<NCPoly> {
        let mut sign = 1i64;
        while matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            sign = -sign;
        }
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Rat(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = acc.checked_mul(&self.factor()?)?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let divisor = self.factor()?;
                    match divisor.as_constant() {
                        Some(c) if !c.is_zero() => {
                            let inv = Scalar::new(c.denom().clone(), c.numer().clone());
                            acc = acc.scale(&inv);
                        }
                        _ => return self.err("division is only defined by a nonzero constant"),
                    }
                }
                _ => break,
            }
        }
        if sign < 0 {
            acc = acc.neg();
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<NCPoly> {
        let mut base = self.primary()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.bump();
            base = base.star();
        }
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            match self.bump() {
                Some(Tok::Rat(r)) if r.denom() == &num_bigint::BigInt::from(1) && !r.is_zero() => {
                    let n: usize = r.numer().try_into().map_err(|_| Error::Parse {
                        pos: self.pos(),
                        msg: "exponent must be a positive integer".into(),
                    })?;
                    base = base.pow(n);
                }
                _ => return self.err("expected positive integer exponent after '^'"),
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<NCPoly> {
        match self.bump() {
            Some(Tok::Rat(v)) => Ok(NCPoly::constant(self.alph, v)),
            Some(Tok::Ident(name)) => {
                if let Some(v) = self.params.get(&name) {
                    return Ok(NCPoly::constant(self.alph, v.clone()));
                }
                if let Some(l) = self.alph.lookup(&name) {
                    return Ok(NCPoly::letter(self.alph, l));
                }
                self.err(format!("unknown letter or parameter {name:?}"))
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => self.err("expected ')'"),
                }
            }
            _ => self.err("expected a rational, a letter, or '('"),
        }
    }
}

/// Parses a polynomial over `alph`, with parameter identifiers bound by
/// `params`.
pub fn parse_poly(
    alph: &Arc<Alphabet>,
    params: &BTreeMap<String, Scalar>,
    input: &str,
) -> Result<NCPoly> {
    let toks = tokenize(input)?;
    let mut p = Parser {
        toks,
        at: 0,
        alph,
        params,
        end: input.len(),
    };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parses a single monomial with coefficient 1 (used for rule left-hand
/// sides).
pub fn parse_word(alph: &Arc<Alphabet>, input: &str) -> Result<Word> {
    let poly = parse_poly(alph, &BTreeMap::new(), input)?;
    let mut terms = poly.terms();
    match (terms.next(), terms.next()) {
        (Some((w, c)), None) if c == &Scalar::from(num_bigint::BigInt::from(1)) => Ok(w.clone()),
        _ => Err(Error::Parse {
            pos: 0,
            msg: format!("not a monomial word: {input:?}"),
        }),
    }
}
