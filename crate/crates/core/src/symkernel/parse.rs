//! Text grammar for polynomials and vector-field expressions.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/" | <juxtaposition>) unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" integer)?
//! atom   := integer | "i" | variable | derivation | "(" expr ")"
//! ```
//!
//! Division is only allowed by nonzero constants, which is how rationals
//! `p/q` are written. A derivation token is `d<suffix>` where `z<suffix>` or
//! `<suffix>` names a declared variable; it denotes the coordinate field
//! ∂/∂(that variable) and is only accepted when parsing vector fields.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::poly::{vars_from, Poly, Vars};
use super::scalar::ExactScalar;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            ' ' | '\t' => {
                i += 1;
                continue;
            }
            '+' => out.push((Tok::Plus, col)),
            '-' => out.push((Tok::Minus, col)),
            '*' => out.push((Tok::Star, col)),
            '/' => out.push((Tok::Slash, col)),
            '^' => out.push((Tok::Caret, col)),
            '(' => out.push((Tok::LParen, col)),
            ')' => out.push((Tok::RParen, col)),
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == '.' || chars[i] == 'e') {
                    return Err(Error::parse(
                        0,
                        col,
                        "only integers and p/q rationals are accepted as coefficients",
                    ));
                }
                let s: String = chars[start..i].iter().collect();
                out.push((Tok::Int(s.parse().unwrap()), col));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
                continue;
            }
            _ => return Err(Error::parse(0, col, format!("unexpected character '{c}'"))),
        }
        i += 1;
    }
    Ok(out)
}

/// Result of parsing: a polynomial, or a vector of components (a field).
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(Poly),
    Vector(Vec<Poly>),
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: Vars,
    allow_derivations: bool,
    end_col: usize,
    _src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::parse(0, self.col(), msg))
    }

    fn derivation_index(&self, name: &str) -> Option<usize> {
        if !self.allow_derivations || self.vars.iter().any(|v| v == name) {
            return None;
        }
        let suffix = name.strip_prefix('d')?;
        if suffix.is_empty() {
            return None;
        }
        let z = format!("z{suffix}");
        self.vars
            .iter()
            .position(|v| *v == z)
            .or_else(|| self.vars.iter().position(|v| v == suffix))
    }

    fn expr(&mut self) -> Result<Value> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.combine_add(acc, rhs, false)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.combine_add(acc, rhs, true)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn combine_add(&self, a: Value, b: Value, sub: bool) -> Result<Value> {
        let op = |x: &Poly, y: &Poly| if sub { x.sub(y) } else { x.add(y) };
        match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(op(&x, &y))),
            (Value::Vector(x), Value::Vector(y)) => {
                Ok(Value::Vector(x.iter().zip(&y).map(|(p, q)| op(p, q)).collect()))
            }
            // A literal zero may be added to a field.
            (Value::Vector(x), Value::Scalar(y)) if y.is_zero() => Ok(Value::Vector(x)),
            (Value::Scalar(x), Value::Vector(y)) if x.is_zero() => {
                Ok(Value::Vector(if sub { y.iter().map(Poly::neg).collect() } else { y }))
            }
            _ => self.err("cannot add a polynomial to a vector field"),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Int(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen))
    }

    fn term(&mut self) -> Result<Value> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = self.combine_mul(acc, rhs)?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let col = self.col();
                    let rhs = self.unary()?;
                    let c = match &rhs {
                        Value::Scalar(p) if p.is_constant() && !p.is_zero() => p.constant_value(),
                        _ => return Err(Error::parse(0, col, "division only by nonzero constants")),
                    };
                    let inv = c.inv().unwrap();
                    acc = match acc {
                        Value::Scalar(p) => Value::Scalar(p.scale(&inv)),
                        Value::Vector(v) => Value::Vector(v.iter().map(|p| p.scale(&inv)).collect()),
                    };
                }
                _ if self.starts_atom() => {
                    let rhs = self.power()?;
                    acc = self.combine_mul(acc, rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn combine_mul(&self, a: Value, b: Value) -> Result<Value> {
        match (a, b) {
            (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x.mul(&y))),
            (Value::Scalar(x), Value::Vector(v)) | (Value::Vector(v), Value::Scalar(x)) => {
                Ok(Value::Vector(v.iter().map(|p| p.mul(&x)).collect()))
            }
            _ => self.err("cannot multiply two vector fields"),
        }
    }

    fn unary(&mut self) -> Result<Value> {
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            return Ok(match self.unary()? {
                Value::Scalar(p) => Value::Scalar(p.neg()),
                Value::Vector(v) => Value::Vector(v.iter().map(Poly::neg).collect()),
            });
        }
        if let Some(Tok::Plus) = self.peek() {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Value> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let e = match self.peek() {
                Some(Tok::Int(n)) => n.clone(),
                _ => return self.err("expected a non-negative integer exponent"),
            };
            let e: u32 = match e.try_into() {
                Ok(e) => e,
                Err(_) => return self.err("exponent too large"),
            };
            self.pos += 1;
            return match base {
                Value::Scalar(p) => Ok(Value::Scalar(p.pow(e))),
                Value::Vector(_) => self.err("cannot raise a vector field to a power"),
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Value> {
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of expression");
        };
        match tok {
            Tok::Int(n) => {
                self.pos += 1;
                let c = ExactScalar::real(BigRational::from_integer(n));
                Ok(Value::Scalar(Poly::constant(self.vars.clone(), c)))
            }
            Tok::Ident(name) => {
                if let Some(idx) = self.vars.iter().position(|v| *v == name) {
                    self.pos += 1;
                    return Ok(Value::Scalar(Poly::var(self.vars.clone(), idx)));
                }
                if name == "i" {
                    self.pos += 1;
                    return Ok(Value::Scalar(Poly::constant(self.vars.clone(), ExactScalar::i())));
                }
                if let Some(k) = self.derivation_index(&name) {
                    self.pos += 1;
                    let mut v = vec![Poly::zero(self.vars.clone()); self.vars.len()];
                    v[k] = Poly::one(self.vars.clone());
                    return Ok(Value::Vector(v));
                }
                self.err(format!("unknown identifier '{name}'"))
            }
            Tok::LParen => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(v)
            }
            _ => self.err("expected a number, variable or '('"),
        }
    }
}

/// Parse an expression that may mention derivation tokens.
pub fn parse_value(src: &str, vars: &Vars, allow_derivations: bool) -> Result<Value> {
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars: vars.clone(),
        allow_derivations,
        end_col: src.chars().count() + 1,
        _src: src,
    };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(v)
}

/// Parse a polynomial over the given variables.
pub fn parse_poly<S: AsRef<str>>(src: &str, vars: &[S]) -> Result<Poly> {
    parse_poly_in(src, &vars_from(vars))
}

pub fn parse_poly_in(src: &str, vars: &Vars) -> Result<Poly> {
    match parse_value(src, vars, false)? {
        Value::Scalar(p) => Ok(p),
        Value::Vector(_) => Err(Error::parse(0, 1, "expected a polynomial")),
    }
}

/// Parse a constant (no variables) as a Gaussian rational.
pub fn parse_scalar(src: &str) -> Result<ExactScalar> {
    let p = parse_poly::<&str>(src, &[])?;
    if p.is_zero() {
        return Ok(ExactScalar::zero());
    }
    Ok(p.constant_value())
}
