//! Recursive-descent reader for the polynomial text syntax, e.g. `3/2*q1^2*p2 - (t + 1)^2`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Polynomial, VariableTable};
use crate::error::ParseError;
use crate::rational::Rational;

/// Parses `text` over `table`. Division is allowed only by nonzero constants.
pub fn parse_polynomial(text: &str, table: &Arc<VariableTable>) -> Result<Polynomial, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        table,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    table: &'a Arc<VariableTable>,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ParseError {
        ParseError::new(msg, self.pos)
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

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let rhs = self.unary()?;
            if c == b'*' {
                acc = &acc * &rhs;
            } else {
                let d = rhs.constant_term();
                if !rhs.is_constant() || d.is_zero() {
                    return Err(ParseError::new("division by a non-constant or zero", at));
                }
                acc = acc.scale(&(Rational::from_integer(1.into()) / d));
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(ParseError::new("expected a non-negative integer exponent", start));
            }
            let e: u32 = digits
                .parse()
                .map_err(|_| ParseError::new("exponent too large", start))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let digits = self.digits();
                if matches!(self.src.get(self.pos), Some(b'.' | b'e' | b'E')) {
                    return Err(ParseError::new("floating-point literals are not accepted", start));
                }
                let n: BigInt = digits.parse().expect("ascii digits");
                Ok(Polynomial::constant(self.table, Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.table.index_of(name) {
                    Ok(idx) => Ok(Polynomial::var(self.table, idx)),
                    Err(_) => Err(ParseError::new(format!("unknown variable `{name}`"), start)),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(ParseError::new("unexpected end of input", start.max(self.pos))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn parse(s: &str) -> Result<Polynomial, ParseError> {
        parse_polynomial(s, &VariableTable::phase_space(2))
    }

    #[test]
    fn round_trips_display() {
        for s in ["3/2*q1^2*p2", "-1/2*q1^2", "q1*p2 + 1/2*p1^2 + 1/2*q1^2", "0", "t - 1"] {
            let p = parse(s).unwrap();
            assert_eq!(parse(&p.to_string()).unwrap(), p, "{s}");
        }
        assert_eq!(parse("3/2*q1^2*p2").unwrap().to_string(), "3/2*q1^2*p2");
    }

    #[test]
    fn precedence_and_grouping() {
        assert_eq!(parse("-q1^2").unwrap(), -parse("q1*q1").unwrap());
        assert_eq!(
            parse("(q1 + 1)*(q1 - 1)").unwrap(),
            parse("q1^2 - 1").unwrap()
        );
        assert_eq!(parse("q1/2").unwrap(), parse("q1").unwrap().scale(&rat(1, 2)));
        assert_eq!(parse("2 - 3 - 4").unwrap(), parse("-5").unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse("0.5*q1").is_err());
        assert!(parse("1e3").is_err());
        assert!(parse("q1/q2").is_err());
        assert!(parse("q1/0").is_err());
        let e = parse("q1 + x9").unwrap_err();
        assert_eq!(e.offset, 5);
        assert!(parse("(q1").is_err());
        assert!(parse("q1 q2").is_err());
        assert!(parse("").is_err());
    }
}
