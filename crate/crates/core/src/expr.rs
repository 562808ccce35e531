//! Parser for superfunction expressions over a chart.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | atom
//! atom   := INT ('/' INT)? | NAME ('^' INT)? | '(' expr ')'
//! ```
//!
//! Exponents are only accepted directly after an even coordinate name.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::grassmann::{Chart, GradedPoly, Parity};

/// Parse failure with a byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    fn new(pos: usize, msg: impl fmt::Display) -> Self {
        ParseError { pos, msg: msg.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'/' => out.push((start, Tok::Slash)),
            b'^' => out.push((start, Tok::Caret)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = src[start..i].parse().expect("digits");
                out.push((start, Tok::Int(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Name(src[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap();
                return Err(ParseError::new(start, format!("unexpected character `{ch}`")));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    chart: &'a Chart,
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expr(&mut self) -> Result<GradedPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc += &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc -= &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<GradedPoly, ParseError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<GradedPoly, ParseError> {
        match self.peek() {
            Some(Tok::Plus) => {
                self.bump();
                self.unary()
            }
            Some(Tok::Minus) => {
                self.bump();
                Ok(-self.unary()?)
            }
            _ => self.atom(),
        }
    }

    fn int(&mut self, what: &str) -> Result<BigInt, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(n),
            _ => Err(ParseError::new(pos, format!("expected {what}"))),
        }
    }

    fn atom(&mut self) -> Result<GradedPoly, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => {
                let mut value = BigRational::from_integer(n);
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let dpos = self.pos();
                    let d = self.int("integer denominator")?;
                    if d.is_zero() {
                        return Err(ParseError::new(dpos, "zero denominator"));
                    }
                    value /= BigRational::from_integer(d);
                }
                if let Some(Tok::Caret) = self.peek() {
                    return Err(ParseError::new(self.pos(), "exponents are only allowed on even coordinates"));
                }
                Ok(GradedPoly::constant(self.chart, value))
            }
            Some(Tok::Name(name)) => {
                let a = self
                    .chart
                    .index(&name)
                    .ok_or_else(|| ParseError::new(pos, format!("unknown coordinate `{name}`")))?;
                let base = GradedPoly::coord(self.chart, a);
                if let Some(Tok::Caret) = self.peek() {
                    let cpos = self.pos();
                    if self.chart.parity(a) == Parity::Odd {
                        return Err(ParseError::new(cpos, format!("odd coordinate `{name}` cannot carry an exponent")));
                    }
                    self.bump();
                    let kpos = self.pos();
                    let k = self.int("integer exponent")?;
                    let k: u32 = k
                        .try_into()
                        .ok()
                        .filter(|&k| k <= u16::MAX as u32)
                        .ok_or_else(|| ParseError::new(kpos, "exponent out of range"))?;
                    let mut out = GradedPoly::one(self.chart);
                    for _ in 0..k {
                        out = &out * &base;
                    }
                    return Ok(out);
                }
                Ok(base)
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let cpos = self.pos();
                match self.bump() {
                    Some(Tok::RParen) => {}
                    _ => return Err(ParseError::new(cpos, "expected `)`")),
                }
                if let Some(Tok::Caret) = self.peek() {
                    return Err(ParseError::new(self.pos(), "exponents are only allowed on even coordinates"));
                }
                Ok(inner)
            }
            Some(t) => Err(ParseError::new(pos, format!("unexpected {}", describe(&t)))),
            None => Err(ParseError::new(pos, "unexpected end of expression")),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number `{n}`"),
        Tok::Name(s) => format!("name `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
    }
}

/// Parse an expression into a polynomial on `chart`.
pub fn parse_expr(chart: &Chart, src: &str) -> Result<GradedPoly, ParseError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(ParseError::new(0, "empty expression"));
    }
    let mut p = Parser { chart, toks, at: 0, end: src.len() };
    let out = p.expr()?;
    if p.at < p.toks.len() {
        let t = p.toks[p.at].1.clone();
        return Err(ParseError::new(p.pos(), format!("unexpected {}", describe(&t))));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{q, qq, ChartSignature};

    fn chart() -> Chart {
        ChartSignature::new(["t", "x"], ["th1", "th2"]).unwrap()
    }

    #[test]
    fn round_trips_display() {
        let c = chart();
        for src in ["0", "1", "-3/2", "t^2 + 3/2 * t * th1 * th2 - th1", "x * th2 - 7 * t^3 * x"] {
            let p = parse_expr(&c, src).unwrap();
            let again = parse_expr(&c, &p.to_string()).unwrap();
            assert_eq!(p, again, "{src}");
        }
    }

    #[test]
    fn koszul_and_precedence() {
        let c = chart();
        let a = parse_expr(&c, "th2*th1").unwrap();
        let b = parse_expr(&c, "-(th1 * th2)").unwrap();
        assert_eq!(a, b);
        let e = parse_expr(&c, "2 * (t + 1) - -t").unwrap();
        let t = GradedPoly::coord(&c, 0);
        assert_eq!(e, &t.scale(&q(3)) + &GradedPoly::int(&c, 2));
        assert_eq!(parse_expr(&c, "1/2").unwrap().as_constant(), Some(qq(1, 2)));
    }

    #[test]
    fn whitespace_insensitive() {
        let c = chart();
        assert_eq!(parse_expr(&c, "t^2*th1").unwrap(), parse_expr(&c, "  t ^ 2 *\tth1 ").unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let c = chart();
        assert_eq!(parse_expr(&c, "th1^2").unwrap_err().pos, 3);
        assert_eq!(parse_expr(&c, "t + y").unwrap_err().pos, 4);
        assert_eq!(parse_expr(&c, "(t").unwrap_err().pos, 2);
        assert_eq!(parse_expr(&c, "1/0").unwrap_err().pos, 2);
        assert_eq!(parse_expr(&c, "t $").unwrap_err().pos, 2);
        assert_eq!(parse_expr(&c, "t t").unwrap_err().pos, 2);
        assert!(parse_expr(&c, "").is_err());
        assert!(parse_expr(&c, "t / 2").is_err());
    }
}
