//! Text grammar for polynomials and ideal files.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*      division only by constants
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::{Polynomial, Vars};
use crate::matrix::Rational;

const MAX_EXPONENT: u32 = 256;
const MAX_PRODUCT_TERMS: usize = 1_000_000;
const MAX_DEPTH: usize = 200;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    vars: &'a Vars,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { line: self.line, column: self.pos + 1, message: message.into() })
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
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.err("expression nested too deeply");
        }
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { acc.add(&t) } else { acc.sub(&t) };
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let f = self.unary()?;
            if c == b'*' {
                if acc.num_terms().saturating_mul(f.num_terms()) > MAX_PRODUCT_TERMS {
                    return self.err("product too large");
                }
                acc = acc.mul(&f);
            } else {
                if !f.is_constant() {
                    return self.err("division by a non-constant polynomial");
                }
                let d = f.constant_term();
                if d.is_zero() {
                    return self.err("division by zero");
                }
                acc = acc.scale(&d.recip());
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.guarded(|p| p.unary()).map(|p| p.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.guarded(|p| p.unary())
            }
            _ => self.power(),
        }
    }

    fn guarded(&mut self, f: impl FnOnce(&mut Self) -> Result<Polynomial, ParseError>) -> Result<Polynomial, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.err("expression nested too deeply");
        }
        let r = f(self);
        self.depth -= 1;
        r
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            self.pos = start;
            return self.err("expected a nonnegative integer exponent");
        }
        let Ok(e) = digits.parse::<u32>() else {
            return self.err("exponent too large");
        };
        if e > MAX_EXPONENT {
            return self.err(format!("exponent above {MAX_EXPONENT}"));
        }
        if base.num_terms() > 1 {
            // monomials of degree <= e*deg in the support variables bound the result size
            let s = base.support().len() as f64;
            let top = (e as f64) * base.total_degree() as f64;
            let mut bound = 1f64;
            for k in 1..=(s as usize) {
                bound *= (top + k as f64) / k as f64;
            }
            if bound * base.num_terms() as f64 > 100.0 * MAX_PRODUCT_TERMS as f64 {
                return self.err("power too large");
            }
        }
        Ok(base.pow(e))
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits();
                let n: BigInt = d.parse().expect("digit string");
                Ok(Polynomial::constant(self.vars.clone(), Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                match Polynomial::var_named(self.vars.clone(), &name) {
                    Some(p) => Ok(p),
                    None => {
                        self.pos = start;
                        self.err(format!("unknown variable '{name}'"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

fn parse_line(text: &str, vars: &Vars, line: usize) -> Result<Polynomial, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, line, vars, depth: 0 };
    if p.peek().is_none() {
        return p.err("empty polynomial");
    }
    let out = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(out)
}

/// Parses one polynomial over the given variables.
pub fn parse_polynomial(text: &str, vars: &Vars) -> Result<Polynomial, ParseError> {
    parse_line(text, vars, 1)
}

/// Parses an ideal file: one polynomial per line, `#` starts a comment.
pub fn parse_ideal_file(text: &str, vars: &Vars) -> Result<Vec<Polynomial>, ParseError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        out.push(parse_line(body, vars, k + 1)?);
    }
    Ok(out)
}

/// `p/q` or integer literal, as used in representation files.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;

    #[test]
    fn matrix_entry_variables() {
        let v = vars(&["x_1_1", "x_1_2", "x_2_1", "x_2_2", "t_1"]);
        let p = parse_polynomial("x_1_1*x_2_2 - x_1_2*x_2_1 - 1 + 0*t_1", &v).unwrap();
        assert_eq!(p.num_terms(), 3);
        let q = parse_polynomial("(x_1_1 + 1/2)^2 - 3/4", &v).unwrap();
        assert_eq!(q.to_string(), "x_1_1^2 + x_1_1 - 1/2");
    }

    #[test]
    fn errors_carry_positions() {
        let v = vars(&["x"]);
        let e = parse_polynomial("x + y", &v).unwrap_err();
        assert_eq!(e, ParseError::Syntax { line: 1, column: 5, message: "unknown variable 'y'".into() });
        assert!(parse_polynomial("x^", &v).is_err());
        assert!(parse_polynomial("x / x", &v).is_err());
        assert!(parse_polynomial("(x", &v).is_err());
        assert!(parse_polynomial("x^100000", &v).is_err());
    }

    #[test]
    fn ideal_file_with_comments() {
        let v = vars(&["a", "d"]);
        let src = "# trace condition\na + d - 2\n\n  a*d - 1 # determinant\n";
        let gens = parse_ideal_file(src, &v).unwrap();
        assert_eq!(gens.len(), 2);
        let e = parse_ideal_file("a\n\nb\n", &v).unwrap_err();
        assert!(matches!(e, ParseError::Syntax { line: 3, .. }));
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("-3/6"), Some(Rational::new((-1).into(), 2.into())));
        assert_eq!(parse_rational("7"), Some(Rational::from_integer(7.into())));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
