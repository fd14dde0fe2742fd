//! Parser for exact scalar literals.
//!
//! ```text
//! <rat>  := [+-]? digits ( '/' digits )?
//! <quad> := <rat> | <rat> ('+'|'-') <rat> '*sqrt(' digits ')'
//! ```

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{QuadScalar, Rational};
use crate::error::{Error, Result};

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Self { text, pos: 0 }
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t')) {
            self.pos += 1;
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax { position: self.pos, message: message.into() }
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.text[self.pos..].starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<&'a str> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        Ok(&self.text[start..self.pos])
    }

    fn rational(&mut self) -> Result<Rational> {
        self.skip_ws();
        let negative = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let numer: BigInt = self.digits()?.parse().expect("digit run");
        let denom: BigInt = if self.eat("/") {
            let at = self.pos;
            let d: BigInt = self.digits()?.parse().expect("digit run");
            if d.is_zero() {
                return Err(Error::Syntax { position: at, message: "zero denominator".into() });
            }
            d
        } else {
            BigInt::from(1)
        };
        let r = Rational::new(numer, denom);
        Ok(if negative { -r } else { r })
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos != self.text.len() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(())
    }
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let mut c = Cursor::new(text);
    let r = c.rational()?;
    c.finish()?;
    Ok(r)
}

pub fn parse_quad(text: &str) -> Result<QuadScalar> {
    let mut c = Cursor::new(text);
    let a = c.rational()?;
    c.skip_ws();
    let sign = match c.peek() {
        None => return Ok(QuadScalar::from_rational(a)),
        Some(b'+') => 1,
        Some(b'-') => -1,
        Some(_) => return Err(c.err("expected `+`, `-` or end of literal")),
    };
    c.pos += 1;
    let mut b = c.rational()?;
    if sign < 0 {
        b = -b;
    }
    c.skip_ws();
    if !c.eat("*sqrt(") {
        return Err(c.err("expected `*sqrt(`"));
    }
    let at = c.pos;
    let radicand: u64 = c
        .digits()?
        .parse()
        .map_err(|_| Error::Syntax { position: at, message: "radicand too large".into() })?;
    if !c.eat(")") {
        return Err(c.err("expected `)`"));
    }
    c.finish()?;
    QuadScalar::new(a, b, radicand).map_err(|_| Error::Syntax {
        position: at,
        message: format!("radicand {radicand} is not square-free"),
    })
}

impl FromStr for QuadScalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_quad(s)
    }
}
