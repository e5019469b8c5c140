//! Recursive-descent parser for polynomial expressions.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' INTEGER)?
//! atom   := INTEGER | NAME | NAME '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Division is only allowed by nonzero constants, which is how rational
//! literals `a/b` are written. The function atoms `sqrt(q)` and `root(q, p)`
//! denote radicals and are only accepted when parsing into [`Surd`]
//! coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{KovaError, Result};
use crate::poly::{MultiPoly, Vars};
use crate::scalar::Field;
use crate::surd::{Surd, SurdField};

/// Parsed expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Integer literal.
    Num(BigInt),
    /// Variable reference.
    Var(String),
    /// Function call (`sqrt`, `root`).
    Call(String, Vec<Expr>),
    /// Negation.
    Neg(Box<Expr>),
    /// Sum.
    Add(Box<Expr>, Box<Expr>),
    /// Difference.
    Sub(Box<Expr>, Box<Expr>),
    /// Product.
    Mul(Box<Expr>, Box<Expr>),
    /// Quotient (divisor must be a nonzero constant).
    Div(Box<Expr>, Box<Expr>),
    /// Non-negative integer power.
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Name(String),
    Sym(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Lexer> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            toks.push((Tok::Num(s.parse().expect("digits")), line, col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Name(chars[start..i].iter().collect()), line, col));
        } else if "+-*/^(),".contains(c) {
            toks.push((Tok::Sym(c), line, col));
            i += 1;
        } else {
            return Err(KovaError::Syntax {
                line,
                col,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    toks.push((Tok::End, line, col0 + chars.len()));
    Ok(Lexer { toks, pos: 0 })
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.1, t.2)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self.here();
        Err(KovaError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Sym('/') => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            match self.bump() {
                Tok::Num(n) => match n.to_u32() {
                    Some(k) => Ok(Expr::Pow(Box::new(base), k)),
                    None => self.err("exponent too large"),
                },
                _ => {
                    self.pos -= 1;
                    self.err("exponent must be a non-negative integer literal")
                }
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Num(n))
            }
            Tok::Name(name) => {
                self.bump();
                if *self.peek() == Tok::Sym('(') {
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while *self.peek() == Tok::Sym(',') {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::End => self.err("unexpected end of expression"),
            Tok::Sym(c) => self.err(format!("unexpected `{c}`")),
        }
    }
}

/// Parses an expression; `line`/`col` locate it in the enclosing document
/// for error messages (both 1-based).
pub fn parse_expr_at(text: &str, line: usize, col: usize) -> Result<Expr> {
    let mut lx = lex(text, line, col)?;
    let e = lx.expr()?;
    if *lx.peek() != Tok::End {
        return lx.err("unexpected trailing input");
    }
    Ok(e)
}

/// Parses a standalone expression.
pub fn parse_expr(text: &str) -> Result<Expr> {
    parse_expr_at(text, 1, 1)
}

/// Hook turning function atoms into coefficients.
pub type CallHook<'a, F> = &'a dyn Fn(&str, &[BigRational]) -> Result<F>;

impl Expr {
    /// Converts to a polynomial over `vars`; `call` resolves function atoms
    /// with constant rational arguments.
    pub fn to_poly_with<F: Field>(
        &self,
        vars: &Vars,
        call: Option<CallHook<'_, F>>,
    ) -> Result<MultiPoly<F>> {
        Ok(match self {
            Expr::Num(n) => MultiPoly::constant(vars, F::from_rational(&BigRational::from_integer(n.clone()))),
            Expr::Var(v) => MultiPoly::var_named(vars, v)?,
            Expr::Call(name, args) => {
                let hook = call.ok_or_else(|| {
                    KovaError::Precondition(format!("function `{name}` not allowed here"))
                })?;
                let mut vals = Vec::new();
                for a in args {
                    let p: MultiPoly<BigRational> = a.to_poly_with(vars, None)?;
                    if !p.is_constant() {
                        return Err(KovaError::Precondition(format!(
                            "arguments of `{name}` must be constants"
                        )));
                    }
                    vals.push(p.constant_term());
                }
                MultiPoly::constant(vars, hook(name, &vals)?)
            }
            Expr::Neg(a) => a.to_poly_with(vars, call)?.neg(),
            Expr::Add(a, b) => a.to_poly_with(vars, call)?.add(&b.to_poly_with(vars, call)?),
            Expr::Sub(a, b) => a.to_poly_with(vars, call)?.sub(&b.to_poly_with(vars, call)?),
            Expr::Mul(a, b) => a.to_poly_with(vars, call)?.mul(&b.to_poly_with(vars, call)?),
            Expr::Div(a, b) => {
                let d = b.to_poly_with(vars, call)?;
                if !d.is_constant() || d.is_zero() {
                    return Err(KovaError::Precondition(
                        "division is only allowed by nonzero constants".into(),
                    ));
                }
                a.to_poly_with(vars, call)?
                    .scale(&(F::one() / d.constant_term()))
            }
            Expr::Pow(a, k) => a.to_poly_with(vars, call)?.pow(*k),
        })
    }

    /// Converts to a polynomial with rational coefficients.
    pub fn to_poly(&self, vars: &Vars) -> Result<MultiPoly<BigRational>> {
        self.to_poly_with(vars, None)
    }
}

/// Parses an expression into a rational polynomial over `vars`.
pub fn parse_poly(text: &str, vars: &Vars) -> Result<MultiPoly<BigRational>> {
    parse_expr(text)?.to_poly(vars)
}

/// Resolves `sqrt(q)` and `root(q, p)` into radical-extension elements.
pub fn surd_call(name: &str, args: &[BigRational]) -> Result<Surd> {
    let (c, p) = match (name, args) {
        ("sqrt", [c]) => (c.clone(), 2u32),
        ("root", [c, p]) => {
            let p = if p.is_integer() { p.numer().to_u32() } else { None };
            match p {
                Some(p) if p > 0 => (c.clone(), p),
                _ => {
                    return Err(KovaError::Precondition(
                        "root degree must be a positive integer".into(),
                    ))
                }
            }
        }
        _ => {
            return Err(KovaError::Precondition(format!(
                "unknown function `{name}` with {} arguments",
                args.len()
            )))
        }
    };
    if c.is_zero() {
        return Ok(Surd::zero());
    }
    Ok(SurdField::new(&c, p)?.gen_elem())
}

/// Parses an expression whose coefficients may contain radicals.
pub fn parse_surd_poly(text: &str, vars: &Vars) -> Result<MultiPoly<Surd>> {
    parse_expr(text)?.to_poly_with(vars, Some(&surd_call))
}
