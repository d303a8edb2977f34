//! Operator literals such as `dt^2 + 1/2 dt - lap` or `t0 dt^3 + dt^2 - (1 + t1 dt) lap`.
//!
//! Grammar:
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := factor (['*'] factor)*
//! factor  := primary ['^' integer]
//! primary := number ['/' number] | 'i' | 'dt' | 'dx' | 'dy' | 'dz' | 'lap' | 'id'
//!          | param-name | '(' expr ')'
//! ```

use std::collections::BTreeMap;

use num_rational::BigRational;

use super::{Coeff, DiffOp};
use crate::error::{Error, Result};

/// Named rational parameters substituted into operator literals.
pub type Params = BTreeMap<String, BigRational>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((start, Tok::Plus)),
            '-' => out.push((start, Tok::Minus)),
            '*' => out.push((start, Tok::Star)),
            '/' => out.push((start, Tok::Slash)),
            '^' => out.push((start, Tok::Caret)),
            '(' => out.push((start, Tok::LParen)),
            ')' => out.push((start, Tok::RParen)),
            c if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent: e.g. 1e-3, 2.5E+4
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let v = Coeff::parse_rational(lit)
                    .ok_or_else(|| Error::Parse { pos: start, msg: format!("bad number {lit:?}") })?;
                out.push((start, Tok::Num(v)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(Error::Parse { pos: start, msg: format!("unexpected character {other:?}") });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    dim: usize,
    params: &'a Params,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.offset(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<DiffOp> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Minus) => {
                negate = true;
                self.pos += 1;
            }
            Some(Tok::Plus) => self.pos += 1,
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { first.neg() } else { first };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen))
    }

    fn term(&mut self) -> Result<DiffOp> {
        let mut acc = self.factor()?;
        loop {
            if matches!(self.peek(), Some(Tok::Star)) {
                self.pos += 1;
                acc = acc.mul(&self.factor()?)?;
            } else if self.starts_factor() {
                acc = acc.mul(&self.factor()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<DiffOp> {
        let base = self.primary()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(n)) if n.is_integer() && n >= BigRational::from_integer(0.into()) => {
                    self.pos += 1;
                    let e: u32 = n
                        .to_integer()
                        .try_into()
                        .map_err(|_| Error::Parse { pos: self.offset(), msg: "exponent too large".into() })?;
                    if e > 64 {
                        return self.err("exponent too large");
                    }
                    Ok(base.pow(e))
                }
                _ => self.err("expected a non-negative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<DiffOp> {
        let dim = self.dim;
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let mut value = n;
                if matches!(self.peek(), Some(Tok::Slash)) {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Num(d)) if d != BigRational::from_integer(0.into()) => {
                            self.pos += 1;
                            value /= d;
                        }
                        _ => return self.err("expected a non-zero denominator"),
                    }
                }
                Ok(DiffOp::scalar(dim, Coeff::real(value)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let axis = |ax: usize| -> Result<DiffOp> {
                    if ax < dim {
                        Ok(DiffOp::dx(dim, ax, 1))
                    } else {
                        Err(Error::Parse { pos: 0, msg: format!("{name} is not available in dimension {dim}") })
                    }
                };
                match name.as_str() {
                    "dt" => Ok(DiffOp::dt(dim, 1)),
                    "dx" => axis(0),
                    "dy" => axis(1),
                    "dz" => axis(2),
                    "lap" => Ok(DiffOp::laplacian(dim)),
                    "id" => Ok(DiffOp::identity(dim)),
                    "i" => Ok(DiffOp::scalar(dim, Coeff::i())),
                    other => match self.params.get(other) {
                        Some(v) => Ok(DiffOp::scalar(dim, Coeff::real(v.clone()))),
                        None => {
                            self.pos -= 1;
                            self.err(format!("unknown identifier {other:?}"))
                        }
                    },
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !matches!(self.peek(), Some(Tok::RParen)) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

pub(super) fn parse(text: &str, dim: usize, params: &Params) -> Result<DiffOp> {
    super::check_dim(dim)?;
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Parse { pos: 0, msg: "empty operator literal".into() });
    }
    let mut p = Parser { toks, pos: 0, dim, params, len: text.len() };
    let op = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn params_and_grouping() {
        let mut p = Params::new();
        p.insert("t0".into(), Coeff::parse_rational("1/2").unwrap());
        p.insert("t1".into(), Coeff::parse_rational("0.25").unwrap());
        let a = DiffOp::parse_with("t0 dt^3 + dt^2 - (1 + t1 dt) lap", 1, &p).unwrap();
        assert_eq!(a, DiffOp::parse("1/2 dt^3 + dt^2 - dx^2 - 1/4 dt dx^2", 1).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(DiffOp::parse("dt +", 1), Err(Error::Parse { .. })));
        assert!(matches!(DiffOp::parse("dy", 1), Err(Error::Parse { .. })));
        assert!(matches!(DiffOp::parse("foo dt", 1), Err(Error::Parse { .. })));
        assert!(matches!(DiffOp::parse("dt^x", 1), Err(Error::Parse { .. })));
        assert!(matches!(DiffOp::parse("1/0 dt", 1), Err(Error::Parse { .. })));
        assert!(matches!(DiffOp::parse("dt", 2), Err(Error::UnsupportedDimension(2))));
        assert!(matches!(DiffOp::parse("", 1), Err(Error::Parse { .. })));
    }

    fn coeff_strategy() -> impl Strategy<Value = Coeff> {
        (-20i64..20, 1i64..7, -3i64..4).prop_map(|(n, d, im)| {
            let mut c = Coeff::ratio(n, d);
            c.im = BigRational::from_integer(im.into()) / BigRational::from_integer(2.into());
            c
        })
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(
            terms in proptest::collection::vec(((0u32..4, 0u32..3, 0u32..3, 0u32..3), coeff_strategy()), 0..6),
            three_d in any::<bool>(),
        ) {
            let dim = if three_d { 3 } else { 1 };
            let op = DiffOp::from_terms(dim, terms.into_iter().map(|((a, b, c, d), k)| {
                let idx = if three_d { [a, b, c, d] } else { [a, b + c + d, 0, 0] };
                (super::super::MultiIndex(idx), k)
            })).unwrap();
            let printed = op.to_string();
            let back = DiffOp::parse(&printed, dim).unwrap();
            prop_assert_eq!(&back, &op);
            prop_assert_eq!(back.to_string(), printed);
        }
    }
}
