use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::poly::Q;
use super::scalar::Scalar;
use super::symbol::Symbol;
use crate::error::{Error, Result};

/// Names treated as parameters by [`parse`]; every other identifier is a coordinate.
pub const DEFAULT_PARAMETERS: [&str; 4] = ["alpha", "beta", "gamma", "c"];

#[derive(Debug, Clone)]
enum Ast {
    Num(BigInt),
    Sym(String, usize),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>, usize),
    Pow(Box<Ast>, i32, u32, usize),
    Call(String, Box<Ast>, usize),
}

/// Expression parser with a configurable parameter set.
#[derive(Debug, Clone)]
pub struct Parser {
    parameters: BTreeSet<String>,
}

impl Default for Parser {
    fn default() -> Self {
        Parser {
            parameters: DEFAULT_PARAMETERS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Parser {
    pub fn with_parameters<I, S>(names: I) -> Parser
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Parser {
            parameters: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn parse(&self, text: &str) -> Result<Scalar> {
        let mut lx = Lexer {
            src: text.as_bytes(),
            pos: 0,
        };
        let ast = lx.expr()?;
        lx.skip_ws();
        if lx.pos < lx.src.len() {
            return Err(lx.err("unexpected trailing input"));
        }
        self.eval(&ast)
    }

    fn symbol(&self, name: &str, pos: usize) -> Result<Symbol> {
        let found = if self.parameters.contains(name) {
            Symbol::parameter(name)
        } else {
            Symbol::coordinate(name)
        };
        found.map_err(|e| match e {
            Error::UnknownSymbol(msg) => Error::Syntax { pos, msg },
            other => other,
        })
    }

    fn eval(&self, ast: &Ast) -> Result<Scalar> {
        Ok(match ast {
            Ast::Num(n) => Scalar::from_big_rational(Q::from_integer(n.clone())),
            Ast::Sym(name, pos) => Scalar::symbol(&self.symbol(name, *pos)?),
            Ast::Neg(a) => -self.eval(a)?,
            Ast::Add(a, b) => self.eval(a)? + self.eval(b)?,
            Ast::Sub(a, b) => self.eval(a)? - self.eval(b)?,
            Ast::Mul(a, b) => self.eval(a)? * self.eval(b)?,
            Ast::Div(a, b, pos) => {
                // divide factor by factor so printed denominators come back unchanged
                let mut out = self.eval(a)?;
                let mut factors = Vec::new();
                flatten(b, 1, &mut factors);
                for (f, e) in factors {
                    let v = self.eval(f)?;
                    let v = v.pow(e).map_err(|err| at(err, *pos))?;
                    out = out.try_div(&v).map_err(|err| at(err, *pos))?;
                }
                out
            }
            Ast::Pow(a, n, d, pos) => self
                .eval(a)?
                .pow_ratio(*n, *d)
                .map_err(|err| at(err, *pos))?,
            Ast::Call(name, a, pos) => {
                let v = self.eval(a)?;
                let r = match name.as_str() {
                    "exp" => v.exp(),
                    "sqrt" => v.sqrt(),
                    "cbrt" => v.cbrt(),
                    "sinh" => v.sinh(),
                    "cosh" => v.cosh(),
                    _ => {
                        return Err(Error::Syntax {
                            pos: *pos,
                            msg: format!("unknown function {name}"),
                        })
                    }
                };
                r.map_err(|err| at(err, *pos))?
            }
        })
    }
}

fn at(err: Error, pos: usize) -> Error {
    match err {
        Error::DivisionByZero => Error::Syntax {
            pos,
            msg: "division by zero".into(),
        },
        other => other,
    }
}

fn flatten<'a>(ast: &'a Ast, e: i32, out: &mut Vec<(&'a Ast, i32)>) {
    match ast {
        Ast::Mul(a, b) => {
            flatten(a, e, out);
            flatten(b, e, out);
        }
        Ast::Div(a, b, _) => {
            flatten(a, e, out);
            flatten(b, -e, out);
        }
        Ast::Pow(a, n, 1, _) => flatten(a, e * n, out),
        other => out.push((other, e)),
    }
}

/// Parses with the default parameter set.
///
/// ```
/// let s = g2monge::parse("1/(alpha^2-1)").unwrap();
/// assert_eq!(s.to_string(), "1/(alpha^2 - 1)");
/// ```
pub fn parse(text: &str) -> Result<Scalar> {
    Parser::default().parse(text)
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Lexer<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek() == Some(b'/') {
                let pos = self.pos;
                self.pos += 1;
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?), pos);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.eat(b'-') {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        let pos = self.pos;
        self.pos += 1;
        let (n, d) = if self.eat(b'(') {
            let n = self.signed_int()?;
            let d = if self.eat(b'/') { self.int()? } else { 1 };
            self.expect(b')')?;
            (n, d)
        } else {
            (self.signed_int()?, 1)
        };
        if d == 0 {
            return Err(Error::Syntax {
                pos,
                msg: "zero denominator in exponent".into(),
            });
        }
        let d = u32::try_from(d).map_err(|_| self.err("exponent too large"))?;
        let n = i32::try_from(n).map_err(|_| self.err("exponent too large"))?;
        Ok(Ast::Pow(Box::new(base), n, d, pos))
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        let v = self.int()?;
        Ok(if neg { -v } else { v })
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .parse()
            .map_err(|_| Error::Syntax {
                pos: start,
                msg: "integer out of range".into(),
            })
    }

    fn atom(&mut self) -> Result<Ast> {
        let Some(c) = self.peek() else {
            return Err(self.err("unexpected end of input"));
        };
        let start = self.pos;
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            return Ok(Ast::Num(digits.parse().expect("digits")));
        }
        if c.is_ascii_alphabetic() {
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos])
                .expect("ascii")
                .to_string();
            if self.peek() == Some(b'(') {
                self.pos += 1;
                let arg = self.expr()?;
                self.expect(b')')?;
                return Ok(Ast::Call(name, Box::new(arg), start));
            }
            return Ok(Ast::Sym(name, start));
        }
        Err(self.err(&format!("unexpected character '{}'", c as char)))
    }
}
