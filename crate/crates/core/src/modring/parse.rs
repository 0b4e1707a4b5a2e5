//! Recursive-descent parser for rational functions in `X`.
//!
//! Grammar (juxtaposition binds tighter than `*` and `/`, so `1/3X` is `1/(3X)`):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := ('-' | '+') factor | juxt
//! juxt   := power power*
//! power  := atom ('^' digits)?
//! atom   := digits | 'X' | 'x' | '(' expr ')'
//! ```

use num_bigint::BigInt;

use super::rational::RationalFunction;
use crate::error::{Error, Result};

const MAX_EXPONENT: u32 = 64;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(format!("{} at column {}", msg.into(), self.pos + 1))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn digits(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("ascii digits parse"))
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(b'/') => {
                    self.bump();
                    let rhs = self.factor()?;
                    acc = acc.div(&rhs).map_err(|_| self.err("division by zero"))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(b'-') => {
                self.bump();
                Ok(self.factor()?.neg())
            }
            Some(b'+') => {
                self.bump();
                self.factor()
            }
            _ => self.juxt(),
        }
    }

    fn juxt(&mut self) -> Result<RationalFunction> {
        let mut acc = self.power()?;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'X' || c == b'x' || c == b'(') {
            acc = acc.mul(&self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.digits()?;
            let e: u32 = e
                .try_into()
                .ok()
                .filter(|&e| e <= MAX_EXPONENT)
                .ok_or_else(|| self.err(format!("exponent above {MAX_EXPONENT}")))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(b'X' | b'x') => {
                self.bump();
                Ok(RationalFunction::x())
            }
            Some(b'(') => {
                self.bump();
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.bump();
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(RationalFunction::constant(self.digits()?)),
            Some(c) => Err(self.err(format!("unexpected '{}'", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

pub fn parse_rational_function(s: &str) -> Result<RationalFunction> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let f = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

/// Splits a comma-separated list at top-level commas and parses each entry.
pub fn parse_rational_function_list(s: &str) -> Result<Vec<RationalFunction>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(parse_rational_function(&s[start..i])?);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(parse_rational_function(&s[start..])?);
    Ok(out)
}
