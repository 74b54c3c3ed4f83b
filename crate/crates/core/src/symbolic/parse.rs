// SPDX-License-Identifier: Apache-2.0

//! Recursive-descent parser for the plain-text expression grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' exponent)?
//! exponent:= '-'? integer | '(' expr ')'      (must fold to an integer)
//! primary := number | identifier | 'exp' '(' expr ')' | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numbers are integers or decimal literals (decimals are read exactly, so
//! `0.25` is `1/4`); `a/b` with constant operands folds to a rational.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::Expression;
use crate::error::{Error, Result};
use crate::scalar::Rational;

pub fn parse_expression(text: &str) -> Result<Expression> {
    let mut p = Parser { src: text, chars: text.char_indices().collect(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected `{}`", p.chars[p.pos].1)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        let offset = self.chars.get(self.pos).map(|(o, _)| *o).unwrap_or(self.src.len());
        let before = &self.src[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
        Error::Parse { line, column, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expression> {
        let mut items = vec![self.term()?];
        loop {
            if self.eat('+') {
                items.push(self.term()?);
            } else if self.eat('-') {
                items.push(-self.term()?);
            } else {
                break;
            }
        }
        Ok(Expression::sum(items))
    }

    fn term(&mut self) -> Result<Expression> {
        let mut items = vec![self.unary()?];
        loop {
            if self.eat('*') {
                items.push(self.unary()?);
            } else if self.eat('/') {
                let at = self.pos;
                let divisor = self.unary()?;
                if divisor.is_literal_zero() {
                    self.pos = at;
                    return Err(self.error("division by zero"));
                }
                items.push(divisor.pow(-1));
            } else {
                break;
            }
        }
        Ok(Expression::product(items))
    }

    fn unary(&mut self) -> Result<Expression> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expression> {
        let base = self.primary()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.pos;
        let exponent = if self.eat('(') {
            let e = self.expr()?;
            self.expect(')')?;
            e
        } else if self.eat('-') {
            -self.number()?
        } else {
            self.number()?
        };
        let k = match exponent.as_const() {
            Some(c) if c.is_integer() => c.to_integer().to_i32(),
            _ => None,
        };
        match k {
            Some(k) => {
                if k < 0 && base.is_literal_zero() {
                    self.pos = at;
                    return Err(self.error("negative power of zero"));
                }
                Ok(base.pow(k))
            }
            None => {
                self.pos = at;
                Err(self.error("exponent must be an integer constant"))
            }
        }
    }

    fn number(&mut self) -> Result<Expression> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_ascii_digit() {
            self.pos += 1;
        }
        let int_end = self.pos;
        let mut frac_end = int_end;
        if self.pos < self.chars.len() && self.chars[self.pos].1 == '.' {
            self.pos += 1;
            while self.pos < self.chars.len() && self.chars[self.pos].1.is_ascii_digit() {
                self.pos += 1;
            }
            frac_end = self.pos;
        }
        if start == int_end && frac_end <= int_end + 1 {
            self.pos = start;
            return Err(self.error("expected a number"));
        }
        let digits: String = self.chars[start..int_end].iter().map(|(_, c)| *c).collect();
        let frac: String = if frac_end > int_end {
            self.chars[int_end + 1..frac_end].iter().map(|(_, c)| *c).collect()
        } else {
            String::new()
        };
        let int_part: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().unwrap() };
        let mut value = Rational::from_integer(int_part);
        if !frac.is_empty() {
            let num: BigInt = frac.parse().unwrap();
            let den = num_traits::pow(BigInt::from(10), frac.len());
            value += Rational::new(num, den);
        }
        Ok(Expression::Const(value))
    }

    fn identifier(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos].1;
            if c.is_alphanumeric() || c == '_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.chars[start..self.pos].iter().map(|(_, c)| *c).collect()
    }

    fn primary(&mut self) -> Result<Expression> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let at = self.pos;
                let name = self.identifier();
                match name.as_str() {
                    "exp" | "sqrt" => {
                        if !self.eat('(') {
                            self.pos = at;
                            return Err(self.error(format!("`{name}` must be applied with parentheses")));
                        }
                        let arg = self.expr()?;
                        self.expect(')')?;
                        Ok(if name == "exp" { arg.exp() } else { arg.sqrt() })
                    }
                    _ => Ok(Expression::Symbol(name)),
                }
            }
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn rationals_fold() {
        assert_eq!(parse_expression("1/2").unwrap(), Expression::Const(ratio(1, 2)));
        assert_eq!(parse_expression("-3/4").unwrap(), Expression::Const(ratio(-3, 4)));
        assert_eq!(parse_expression("0.25").unwrap(), Expression::Const(ratio(1, 4)));
    }

    #[test]
    fn precedence() {
        let e = parse_expression("-x^2").unwrap();
        assert_eq!(e.eval_at(&[("x", 3.0)]).unwrap(), -9.0);
        let e = parse_expression("2*x^-1 + (x - 1)*(x + 1)").unwrap();
        assert_eq!(e.eval_at(&[("x", 2.0)]).unwrap(), 4.0);
        let e = parse_expression("exp(-z)*sqrt(4)").unwrap();
        assert!((e.eval_at(&[("z", 0.0)]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn errors_are_located() {
        match parse_expression("m1 +\n  * m2") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_expression("x^y").is_err());
        assert!(parse_expression("exp x").is_err());
        assert!(parse_expression("(x").is_err());
        assert!(parse_expression("1/0").is_err());
    }
}
