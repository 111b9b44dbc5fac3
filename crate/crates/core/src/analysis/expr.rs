//! Univariate expressions in `x`: parsing, printing and point evaluation.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::numeric::{format_rational, parse_rational};

type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    X,
    Const(Q),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer powers only; other exponents become `exp(b · ln a)`.
    Pow(Box<Expr>, i64),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Abs(Box<Expr>),
    Sqrt(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("column {col}: expected {}, found {found}", expected.join(" or "))]
    SyntaxError { col: usize, expected: Vec<&'static str>, found: String },
    #[error("column {col}: unknown function `{name}`")]
    UnknownFunction { col: usize, name: String },
}

impl ExprError {
    pub fn column(&self) -> usize {
        match self {
            ExprError::SyntaxError { col, .. } | ExprError::UnknownFunction { col, .. } => *col,
        }
    }
}

/// Larger integer exponents go through `exp(b · ln a)` like any other.
pub const MAX_INTEGER_POWER: i64 = 4096;

const FUNCTIONS: [&str; 7] = ["sin", "cos", "exp", "ln", "log", "abs", "sqrt"];

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn constant(q: Q) -> Expr {
        Expr::Const(q)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Q::from_integer(n.into()))
    }

    fn b(self) -> Box<Expr> {
        Box::new(self)
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(q) => Expr::Const(-q),
            a => Expr::Neg(a.b()),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(p), Expr::Const(q)) => Expr::Const(p + q),
            (a, b) => Expr::Add(a.b(), b.b()),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(p), Expr::Const(q)) => Expr::Const(p - q),
            (a, b) => Expr::Sub(a.b(), b.b()),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(p), Expr::Const(q)) => Expr::Const(p * q),
            (a, b) => Expr::Mul(a.b(), b.b()),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a, b) {
            (Expr::Const(p), Expr::Const(q)) if !q.is_zero() => Expr::Const(p / q),
            (a, b) => Expr::Div(a.b(), b.b()),
        }
    }

    pub fn pow(a: Expr, n: i64) -> Expr {
        match a {
            Expr::Const(p) if n >= 0 || !p.is_zero() => {
                let e = i32::try_from(n).ok().filter(|e| e.abs() <= 64);
                match e {
                    Some(e) => Expr::Const(num_traits::Pow::pow(&p, e)),
                    None => Expr::Pow(Expr::Const(p).b(), n),
                }
            }
            a => Expr::Pow(a.b(), n),
        }
    }

    /// `a ^ b` for an arbitrary exponent expression.
    pub fn power(a: Expr, b: Expr) -> Expr {
        if let Expr::Const(q) = &b {
            if q.is_integer() {
                if let Some(n) = q.to_integer().to_i64().filter(|n| n.abs() <= MAX_INTEGER_POWER) {
                    return Expr::pow(a, n);
                }
            }
        }
        Expr::Exp(Expr::mul(b, Expr::Ln(a.b())).b())
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::X | Expr::Const(_) => vec![],
            Expr::Neg(a)
            | Expr::Pow(a, _)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::Exp(a)
            | Expr::Ln(a)
            | Expr::Abs(a)
            | Expr::Sqrt(a) => vec![a],
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => vec![a, b],
        }
    }

    /// Replaces every `x` by `by`.
    pub fn substitute(&self, by: &Expr) -> Expr {
        let s = |a: &Expr| a.substitute(by);
        match self {
            Expr::X => by.clone(),
            Expr::Const(q) => Expr::Const(q.clone()),
            Expr::Neg(a) => Expr::neg(s(a)),
            Expr::Add(a, b) => Expr::add(s(a), s(b)),
            Expr::Sub(a, b) => Expr::sub(s(a), s(b)),
            Expr::Mul(a, b) => Expr::mul(s(a), s(b)),
            Expr::Div(a, b) => match (s(a), s(b)) {
                // c / (1 / t) = c · t
                (n, Expr::Div(one, t)) if *one == Expr::int(1) => Expr::mul(n, *t),
                (n, d) => Expr::div(n, d),
            },
            Expr::Pow(a, n) => Expr::pow(s(a), *n),
            Expr::Sin(a) => Expr::Sin(s(a).b()),
            Expr::Cos(a) => Expr::Cos(s(a).b()),
            Expr::Exp(a) => Expr::Exp(s(a).b()),
            Expr::Ln(a) => Expr::Ln(s(a).b()),
            Expr::Abs(a) => Expr::Abs(s(a).b()),
            Expr::Sqrt(a) => Expr::Sqrt(s(a).b()),
        }
    }

    /// Point evaluation; `None` where the expression is undefined or the
    /// result is not finite.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let v = match self {
            Expr::X => x,
            Expr::Const(q) => q.to_f64()?,
            Expr::Neg(a) => -a.eval(x)?,
            Expr::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Expr::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Expr::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Expr::Div(a, b) => {
                let (n, d) = (a.eval(x)?, b.eval(x)?);
                if d == 0.0 {
                    return None;
                }
                n / d
            }
            Expr::Pow(a, n) => {
                let v = a.eval(x)?;
                // sequential products, matching the interval power
                let mut p = 1.0;
                for _ in 0..n.unsigned_abs() {
                    p *= v;
                    if !p.is_finite() {
                        return None;
                    }
                }
                if *n < 0 {
                    if p == 0.0 {
                        return None;
                    }
                    p = 1.0 / p;
                }
                p
            }
            Expr::Sin(a) => a.eval(x)?.sin(),
            Expr::Cos(a) => a.eval(x)?.cos(),
            Expr::Exp(a) => a.eval(x)?.exp(),
            Expr::Ln(a) => {
                let v = a.eval(x)?;
                if v <= 0.0 {
                    return None;
                }
                v.ln()
            }
            Expr::Abs(a) => a.eval(x)?.abs(),
            Expr::Sqrt(a) => {
                let v = a.eval(x)?;
                if v < 0.0 {
                    return None;
                }
                v.sqrt()
            }
        };
        v.is_finite().then_some(v)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(q) if q.is_negative() => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Self, ExprError> {
        parse_expr(s)
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bin = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr, p: u8| {
            write_child(f, a, p)?;
            write!(f, " {op} ")?;
            write_child(f, b, p + 1)
        };
        match self {
            Expr::X => write!(f, "x"),
            Expr::Const(q) => {
                let s = format_rational(q);
                if s.contains('/') {
                    write!(f, "({s})")
                } else {
                    write!(f, "{s}")
                }
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_child(f, a, 3)
            }
            Expr::Add(a, b) => bin(f, a, "+", b, 1),
            Expr::Sub(a, b) => bin(f, a, "-", b, 1),
            Expr::Mul(a, b) => bin(f, a, "*", b, 2),
            Expr::Div(a, b) => bin(f, a, "/", b, 2),
            Expr::Pow(a, n) => {
                write_child(f, a, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Ln(a) => write!(f, "ln({a})"),
            Expr::Abs(a) => write!(f, "abs({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Op(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(q) => format!("number {}", format_rational(q)),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let q = parse_rational(&text).ok_or_else(|| ExprError::SyntaxError {
                col,
                expected: vec!["number"],
                found: format!("`{text}`"),
            })?;
            out.push((col, Tok::Num(q)));
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((col, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((col, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ExprError::SyntaxError { col, expected: vec!["expression"], found: format!("`{c}`") });
        }
    }
    out.push((chars.len() + 1, Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn col(&self) -> usize {
        self.toks[self.pos].0
    }

    fn error(&self, expected: Vec<&'static str>) -> ExprError {
        ExprError::SyntaxError { col: self.col(), expected, found: self.peek().describe() }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Op(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = Expr::add(acc, self.term()?);
            } else if self.eat('-') {
                acc = Expr::sub(acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = Expr::mul(acc, self.unary()?);
            } else if self.eat('/') {
                acc = Expr::div(acc, self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::neg(self.unary()?));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.eat('^') {
            let exponent = self.unary()?;
            return Ok(Expr::power(base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let col = self.col();
        match self.peek().clone() {
            Tok::Num(q) => {
                self.pos += 1;
                Ok(Expr::Const(q))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error(vec!["`)`"]));
                }
                Ok(e)
            }
            Tok::Ident(name) if name == "x" => {
                self.pos += 1;
                Ok(Expr::X)
            }
            Tok::Ident(name) => {
                if !FUNCTIONS.contains(&name.as_str()) {
                    return Err(ExprError::UnknownFunction { col, name });
                }
                self.pos += 1;
                if !self.eat('(') {
                    return Err(self.error(vec!["`(`"]));
                }
                let a = Box::new(self.expr()?);
                if !self.eat(')') {
                    return Err(self.error(vec!["`)`"]));
                }
                Ok(match name.as_str() {
                    "sin" => Expr::Sin(a),
                    "cos" => Expr::Cos(a),
                    "exp" => Expr::Exp(a),
                    "ln" | "log" => Expr::Ln(a),
                    "abs" => Expr::Abs(a),
                    _ => Expr::Sqrt(a),
                })
            }
            _ => Err(self.error(vec!["number", "`x`", "function", "`(`"])),
        }
    }
}

/// Parses an expression in `x`. Precedence from loosest: `+ -`, `* /`,
/// unary minus, then right-associative `^`.
pub fn parse_expr(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(vec!["operator", "end of input"]));
    }
    Ok(e)
}
