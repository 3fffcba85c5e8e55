//! Scalar expressions over the rationals and the generator symbol `t`,
//! e.g. `"t"`, `"t+1"`, `"1/2"`, `"(3 - t)/2"`, `"2t^2"`.

use std::sync::Arc;

use super::field::{AlgebraicScalar, NumberField};
use super::rational::parse_rational;
use super::ArithmeticError;

pub fn parse_scalar(field: &Arc<NumberField>, src: &str) -> Result<AlgebraicScalar, ArithmeticError> {
    let mut p = Parser { field, src, chars: src.char_indices().peekable() };
    let v = p.expr()?;
    p.skip_ws();
    if let Some(&(i, c)) = p.chars.peek() {
        return Err(p.err(&format!("unexpected {c:?} at offset {i}")));
    }
    Ok(v)
}

struct Parser<'a> {
    field: &'a Arc<NumberField>,
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ArithmeticError {
        ArithmeticError::Parse(format!("{msg} in expression {:?}", self.src))
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|&(_, c)| c)
    }

    fn expr(&mut self) -> Result<AlgebraicScalar, ArithmeticError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.chars.next();
                    acc = &acc + &self.term()?;
                }
                Some('-') => {
                    self.chars.next();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<AlgebraicScalar, ArithmeticError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.chars.next();
                    acc = &acc * &self.power()?;
                }
                Some('/') => {
                    self.chars.next();
                    let d = self.power()?;
                    let inv = d.inv().ok_or_else(|| self.err("division by zero"))?;
                    acc = &acc * &inv;
                }
                // implicit product such as "2t" or "3(t+1)"
                Some(c) if c == 't' || c == '(' => acc = &acc * &self.power()?,
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<AlgebraicScalar, ArithmeticError> {
        let base = self.unary()?;
        if self.peek() == Some('^') {
            self.chars.next();
            self.skip_ws();
            let mut digits = String::new();
            while let Some(&(_, c)) = self.chars.peek() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    self.chars.next();
                } else {
                    break;
                }
            }
            let e: u32 = digits.parse().map_err(|_| self.err("exponent must be a non-negative integer"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<AlgebraicScalar, ArithmeticError> {
        match self.peek() {
            Some('-') => {
                self.chars.next();
                Ok(self.unary()?.neg())
            }
            Some('+') => {
                self.chars.next();
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<AlgebraicScalar, ArithmeticError> {
        match self.peek() {
            Some('t') => {
                self.chars.next();
                Ok(AlgebraicScalar::theta(self.field))
            }
            Some('(') => {
                self.chars.next();
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("missing ')'"));
                }
                self.chars.next();
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let mut num = String::new();
                while let Some(&(_, c)) = self.chars.peek() {
                    if c.is_ascii_digit() || c == '.' {
                        num.push(c);
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                let r = parse_rational(&num)?;
                Ok(AlgebraicScalar::from_rational(self.field, r))
            }
            Some(c) => Err(self.err(&format!("unexpected {c:?}"))),
            None => Err(self.err("unexpected end")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::rational::{int, rat};
    use num_bigint::BigInt;

    fn golden() -> Arc<NumberField> {
        NumberField::new(&[BigInt::from(-1), BigInt::from(-1), BigInt::from(1)], int(1), int(2)).unwrap()
    }

    #[test]
    fn parses_basic_forms() {
        let k = golden();
        assert_eq!(parse_scalar(&k, "t").unwrap(), AlgebraicScalar::theta(&k));
        assert_eq!(parse_scalar(&k, "t+1").unwrap().coeffs(), &[int(1), int(1)]);
        assert_eq!(parse_scalar(&k, "1/2").unwrap().coeffs(), &[rat(1, 2), int(0)]);
        assert_eq!(parse_scalar(&k, "t^2").unwrap().coeffs(), &[int(1), int(1)]);
        assert_eq!(parse_scalar(&k, "2t - (t+1)/2").unwrap().coeffs(), &[rat(-1, 2), rat(3, 2)]);
        assert_eq!(parse_scalar(&k, "1/t").unwrap().coeffs(), &[int(-1), int(1)]);
        assert_eq!(parse_scalar(&k, "-0.5").unwrap().coeffs(), &[rat(-1, 2), int(0)]);
    }

    #[test]
    fn rejects_garbage() {
        let k = golden();
        assert!(parse_scalar(&k, "x+1").is_err());
        assert!(parse_scalar(&k, "1/0").is_err());
        assert!(parse_scalar(&k, "(t").is_err());
        assert!(parse_scalar(&k, "").is_err());
    }
}
