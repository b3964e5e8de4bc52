//! Tiny arithmetic and set-literal expression language shared by every
//! module that reads maps, kernels or comparison functions from text.
//!
//! The grammar covers exactly what the bundled problems need: decimal
//! numbers (fractions spelled `a/b` are ordinary division), named
//! variables, `+ - * / ^`, unary minus, `exp`, `ln`, `sqrt`, `abs`,
//! closed-interval set literals `[a,b]`, finite-set literals `{a,b}` and
//! the union operator `|` between set literals.

use std::fmt;

use crate::error::{Error, Result};
use crate::set::ClosedSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
}

/// Scalar expression over a fixed, ordered list of variables.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluates with `vals[i]` bound to variable `i`. Total: division by
    /// zero and domain faults surface as `inf`/`NaN`, which map
    /// validation rejects up front.
    pub fn eval(&self, vals: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => vals[*i],
            Expr::Neg(e) => -e.eval(vals),
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval(vals), b.eval(vals));
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x / y,
                    BinOp::Pow => x.powf(y),
                }
            }
            Expr::Call(f, e) => {
                let v = e.eval(vals);
                match f {
                    Func::Exp => v.exp(),
                    Func::Ln => v.ln(),
                    Func::Sqrt => v.sqrt(),
                    Func::Abs => v.abs(),
                }
            }
        }
    }
}

/// One term of a set-valued expression.
#[derive(Debug, Clone, PartialEq)]
pub enum SetTerm {
    /// `[lo, hi]` with expression bounds.
    Interval(Expr, Expr),
    /// `{a, b, ...}` finite point list.
    Points(Vec<Expr>),
}

/// Set-valued expression: a union of interval and point literals.
#[derive(Debug, Clone, PartialEq)]
pub struct SetExpr {
    pub terms: Vec<SetTerm>,
}

impl SetExpr {
    /// Evaluates every term and returns the canonical union.
    pub fn eval(&self, vals: &[f64]) -> Result<ClosedSet> {
        let mut raw: Vec<(f64, f64)> = Vec::new();
        for term in &self.terms {
            match term {
                SetTerm::Interval(lo, hi) => {
                    let (a, b) = (lo.eval(vals), hi.eval(vals));
                    if a > b {
                        return Err(Error::MalformedSet(format!(
                            "interval bounds out of order: [{a},{b}]"
                        )));
                    }
                    raw.push((a, b));
                }
                SetTerm::Points(pts) => {
                    for p in pts {
                        let v = p.eval(vals);
                        raw.push((v, v));
                    }
                }
            }
        }
        ClosedSet::from_intervals(raw)
    }
}

// ---------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Pipe,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Num(v) => return write!(f, "number {v}"),
            Tok::Ident(s) => return write!(f, "identifier '{s}'"),
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Caret => "^",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Pipe => "|",
        };
        write!(f, "'{s}'")
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            ';' => Tok::Semi,
            '|' => Tok::Pipe,
            _ if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                }
                // exponent only when 'e' is followed by a (signed) digit,
                // so `2exp(x)` still lexes as a number then an identifier
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| Error::Syntax {
                    pos: start,
                    msg: format!("bad number literal '{s}'"),
                })?;
                toks.push((Tok::Num(v), start));
                continue;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                return Err(Error::Syntax {
                    pos: i,
                    msg: format!("unexpected character '{c}'"),
                })
            }
        };
        toks.push((tok, start));
        i += 1;
    }
    Ok(toks)
}

// ---------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------

pub(crate) struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: Vec<String>,
    end: usize,
}

impl Parser {
    pub(crate) fn new(text: &str, vars: &[&str]) -> Result<Self> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            vars: vars.iter().map(|s| s.to_string()).collect(),
            end: text.len(),
        })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, t: &Tok) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.err(format!(
                "expected {t}, found {}",
                self.peek()
                    .map_or("end of input".to_string(), |x| x.to_string())
            )))
        }
    }

    pub(crate) fn err(&self, msg: String) -> Error {
        Error::Syntax {
            pos: self.here(),
            msg,
        }
    }

    pub(crate) fn expect_end(&self) -> Result<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.err(format!("unexpected trailing {}", self.toks[self.pos].0)))
        }
    }

    pub(crate) fn parse_expr(&mut self) -> Result<Expr> {
        let mut left = self.parse_term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let right = self.parse_term()?;
            left = Expr::Bin(op, Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_term(&mut self) -> Result<Expr> {
        let mut left = self.parse_unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => break,
            };
            self.pos += 1;
            let right = self.parse_unary()?;
            left = Expr::Bin(op, Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<Expr> {
        if self.eat(&Tok::Minus) {
            Ok(Expr::Neg(Box::new(self.parse_unary()?)))
        } else {
            self.parse_power()
        }
    }

    fn parse_power(&mut self) -> Result<Expr> {
        let base = self.parse_atom()?;
        if self.eat(&Tok::Caret) {
            let exp = self.parse_unary()?;
            Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::Ident(name)) => {
                let func = match name.as_str() {
                    "exp" => Some(Func::Exp),
                    "ln" => Some(Func::Ln),
                    "sqrt" => Some(Func::Sqrt),
                    "abs" => Some(Func::Abs),
                    _ => None,
                };
                if let Some(func) = func {
                    self.expect(&Tok::LParen)?;
                    let arg = self.parse_expr()?;
                    self.expect(&Tok::RParen)?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => Err(self.err(format!(
                        "unknown identifier '{name}' (variables here: {})",
                        self.vars.join(", ")
                    ))),
                }
            }
            Some(Tok::LParen) => {
                let e = self.parse_expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            other => Err(self.err(format!(
                "expected a value, found {}",
                other.map_or("end of input".to_string(), |t| t.to_string())
            ))),
        }
    }

    /// `setexpr := setterm ('|' setterm)*` with
    /// `setterm := '[' expr ',' expr ']' | '{' expr (',' expr)* '}'`.
    pub(crate) fn parse_set_expr(&mut self) -> Result<SetExpr> {
        let mut terms = vec![self.parse_set_term()?];
        while self.eat(&Tok::Pipe) {
            terms.push(self.parse_set_term()?);
        }
        Ok(SetExpr { terms })
    }

    fn parse_set_term(&mut self) -> Result<SetTerm> {
        if self.eat(&Tok::LBracket) {
            let lo = self.parse_expr()?;
            self.expect(&Tok::Comma)?;
            let hi = self.parse_expr()?;
            self.expect(&Tok::RBracket)?;
            Ok(SetTerm::Interval(lo, hi))
        } else if self.eat(&Tok::LBrace) {
            let mut pts = vec![self.parse_expr()?];
            while self.eat(&Tok::Comma) {
                pts.push(self.parse_expr()?);
            }
            self.expect(&Tok::RBrace)?;
            Ok(SetTerm::Points(pts))
        } else {
            Err(self.err("expected a set literal '[a,b]' or '{a,...}'".into()))
        }
    }

    /// A constant scalar expression (no variables), evaluated eagerly.
    /// Used for condition-interval bounds and config numbers, so that
    /// fractions like `1/2` work anywhere a number is expected.
    pub(crate) fn parse_const(&mut self) -> Result<f64> {
        let start = self.here();
        let e = self.parse_expr()?;
        if contains_var(&e) {
            return Err(Error::Syntax {
                pos: start,
                msg: "expected a constant (no variables) here".into(),
            });
        }
        let v = e.eval(&[]);
        if !v.is_finite() {
            return Err(self.err(format!(
                "constant does not evaluate to a finite number ({v})"
            )));
        }
        Ok(v)
    }
}

fn contains_var(e: &Expr) -> bool {
    match e {
        Expr::Num(_) => false,
        Expr::Var(_) => true,
        Expr::Neg(i) | Expr::Call(_, i) => contains_var(i),
        Expr::Bin(_, a, b) => contains_var(a) || contains_var(b),
    }
}

/// Parses a scalar expression over the given variable names.
pub fn parse_expr(text: &str, vars: &[&str]) -> Result<Expr> {
    let mut p = Parser::new(text, vars)?;
    let e = p.parse_expr()?;
    p.expect_end()?;
    Ok(e)
}

/// One-variable convenience wrapper.
pub fn parse_expr1(text: &str, var: &str) -> Result<Expr> {
    parse_expr(text, &[var])
}

/// Two-variable evaluator sharing the same grammar (used by the
/// dynamic-programming instances).
pub fn parse_expr2(text: &str, vars: [&str; 2]) -> Result<Expr> {
    parse_expr(text, &vars)
}

/// Three-variable evaluator sharing the same grammar.
pub fn parse_expr3(text: &str, vars: [&str; 3]) -> Result<Expr> {
    parse_expr(text, &vars)
}

/// Parses a set-valued expression over the given variable names.
pub fn parse_set_expr(text: &str, vars: &[&str]) -> Result<SetExpr> {
    let mut p = Parser::new(text, vars)?;
    let e = p.parse_set_expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Parses and evaluates a constant (no variables allowed).
pub fn parse_const(text: &str) -> Result<f64> {
    let mut p = Parser::new(text, &[])?;
    let v = p.parse_const()?;
    p.expect_end()?;
    Ok(v)
}

// ---------------------------------------------------------------------
// Pretty-printing (round-trips through the parser)
// ---------------------------------------------------------------------

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        Expr::Bin(BinOp::Pow, ..) => 4,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
    }
}

/// Display needs variable names; `Expr` alone stores only indices.
pub struct ExprDisplay<'a> {
    pub expr: &'a Expr,
    pub vars: &'a [&'a str],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, self.vars)
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, vars: &[&str], min_prec: u8) -> fmt::Result {
    if prec(e) < min_prec {
        write!(f, "(")?;
        write_expr(f, e, vars)?;
        write!(f, ")")
    } else {
        write_expr(f, e, vars)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, vars: &[&str]) -> fmt::Result {
    match e {
        Expr::Num(v) => write!(f, "{v}"),
        Expr::Var(i) => write!(f, "{}", vars.get(*i).copied().unwrap_or("?")),
        Expr::Neg(inner) => {
            write!(f, "-")?;
            write_child(f, inner, vars, 4)
        }
        Expr::Bin(op, l, r) => {
            let (sym, lmin, rmin) = match op {
                BinOp::Add => ("+", 1, 2),
                BinOp::Sub => ("-", 1, 2),
                BinOp::Mul => ("*", 2, 3),
                BinOp::Div => ("/", 2, 3),
                BinOp::Pow => ("^", 5, 4),
            };
            write_child(f, l, vars, lmin)?;
            write!(f, "{sym}")?;
            write_child(f, r, vars, rmin)
        }
        Expr::Call(func, arg) => {
            let name = match func {
                Func::Exp => "exp",
                Func::Ln => "ln",
                Func::Sqrt => "sqrt",
                Func::Abs => "abs",
            };
            write!(f, "{name}(")?;
            write_expr(f, arg, vars)?;
            write!(f, ")")
        }
    }
}

/// Display wrapper for set expressions.
pub struct SetExprDisplay<'a> {
    pub expr: &'a SetExpr,
    pub vars: &'a [&'a str],
}

impl fmt::Display for SetExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, term) in self.expr.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            match term {
                SetTerm::Interval(lo, hi) => {
                    write!(
                        f,
                        "[{},{}]",
                        ExprDisplay {
                            expr: lo,
                            vars: self.vars
                        },
                        ExprDisplay {
                            expr: hi,
                            vars: self.vars
                        }
                    )?;
                }
                SetTerm::Points(pts) => {
                    write!(f, "{{")?;
                    for (j, p) in pts.iter().enumerate() {
                        if j > 0 {
                            write!(f, ",")?;
                        }
                        write!(
                            f,
                            "{}",
                            ExprDisplay {
                                expr: p,
                                vars: self.vars
                            }
                        )?;
                    }
                    write!(f, "}}")?;
                }
            }
        }
        Ok(())
    }
}
