//! Text syntax for differential polynomials, scalar differential operators and
//! λ-polynomials.
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := rational | var | 'D' | 'l' uint | '(' expr ')'
//! var    := 'u' uint ("'"* | '_' uint)
//! ```
//!
//! `D` is only accepted by [`parse_op_poly`] and `l<k>` only by [`parse_lambda_poly`].

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::diffpoly::{DiffPoly, DiffVar};
use crate::error::{Error, Result};
use crate::matop::OpPoly;
use crate::polyvec::LambdaPoly;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
enum Ast {
    Num(Rational),
    Var(DiffVar),
    D(Pos),
    Lambda(usize, Pos),
    Sum(Vec<(bool, Ast)>),
    Product(Vec<Ast>),
    Power(Box<Ast>, u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pos {
    line: usize,
    column: usize,
}

struct Parser {
    chars: Vec<char>,
    at: usize,
    pos: Vec<Pos>,
}

impl Parser {
    fn new(src: &str) -> Self {
        let chars: Vec<char> = src.chars().collect();
        let mut pos = Vec::with_capacity(chars.len() + 1);
        let (mut line, mut column) = (1, 1);
        for &c in &chars {
            pos.push(Pos { line, column });
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
        }
        pos.push(Pos { line, column });
        Parser { chars, at: 0, pos }
    }

    fn error_at(&self, at: usize, message: impl Into<String>) -> Error {
        let p = self.pos[at.min(self.pos.len() - 1)];
        Error::Syntax {
            line: p.line,
            column: p.column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.at < self.chars.len() && self.chars[self.at].is_whitespace() {
            self.at += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.at).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.at;
        while self.at < self.chars.len() && self.chars[self.at].is_ascii_digit() {
            self.at += 1;
        }
        if start == self.at {
            return Err(self.error_at(start, "expected a number"));
        }
        let s: String = self.chars[start..self.at].iter().collect();
        Ok(s.parse().expect("digits parse"))
    }

    fn small(&mut self) -> Result<usize> {
        let start = self.at;
        let n = self.digits()?;
        usize::try_from(n).map_err(|_| self.error_at(start, "number too large"))
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut terms = Vec::new();
        let mut negative = false;
        if self.eat('-') {
            negative = true;
        } else {
            self.eat('+');
        }
        terms.push((negative, self.term()?));
        loop {
            if self.eat('+') {
                terms.push((false, self.term()?));
            } else if self.eat('-') {
                terms.push((true, self.term()?));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 && !terms[0].0 {
            terms.pop().unwrap().1
        } else {
            Ast::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Ast> {
        let mut factors = vec![self.factor()?];
        while self.eat('*') {
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Ast::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if self.eat('^') {
            let start = self.at;
            let e = self.small()?;
            let e = u32::try_from(e).map_err(|_| self.error_at(start, "exponent too large"))?;
            return Ok(Ast::Power(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast> {
        let start = {
            self.skip_ws();
            self.at
        };
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.digits()?;
                if self.eat('/') {
                    let at = self.at;
                    let d = self.digits()?;
                    if d.is_zero() {
                        return Err(self.error_at(at, "division by zero"));
                    }
                    return Ok(Ast::Num(Rational::new(n, d)));
                }
                Ok(Ast::Num(Rational::from_integer(n)))
            }
            Some('(') => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error_at(self.at, "expected ')'"));
                }
                Ok(inner)
            }
            Some('u') => {
                self.at += 1;
                let idx = self.small()?;
                if idx == 0 {
                    return Err(self.error_at(start, "variables are numbered from u1"));
                }
                let mut order = 0;
                if self.chars.get(self.at) == Some(&'_') {
                    self.at += 1;
                    order = self.small()?;
                } else {
                    while self.chars.get(self.at) == Some(&'\'') {
                        order += 1;
                        self.at += 1;
                    }
                }
                Ok(Ast::Var(DiffVar::new(idx - 1, order)))
            }
            Some('D') => {
                self.at += 1;
                Ok(Ast::D(self.pos[start]))
            }
            Some('l') => {
                self.at += 1;
                Ok(Ast::Lambda(self.small()?, self.pos[start]))
            }
            Some(c) => Err(self.error_at(start, format!("unexpected '{c}'"))),
            None => Err(self.error_at(start, "unexpected end of input")),
        }
    }

    fn finish(mut self) -> Result<Ast> {
        let ast = self.expr()?;
        if let Some(c) = self.peek() {
            return Err(self.error_at(self.at, format!("unexpected '{c}'")));
        }
        Ok(ast)
    }
}

fn parse(text: &str) -> Result<Ast> {
    Parser::new(text).finish()
}

trait Algebra {
    type T: Clone;
    fn num(&self, q: Rational) -> Self::T;
    fn var(&self, v: DiffVar) -> Result<Self::T>;
    fn d(&self, at: Pos) -> Result<Self::T>;
    fn lambda(&self, t: usize, at: Pos) -> Result<Self::T>;
    fn add(&self, a: &Self::T, b: &Self::T) -> Self::T;
    fn neg(&self, a: &Self::T) -> Self::T;
    fn mul(&self, a: &Self::T, b: &Self::T) -> Self::T;
}

fn eval<A: Algebra>(alg: &A, ast: &Ast) -> Result<A::T> {
    Ok(match ast {
        Ast::Num(q) => alg.num(q.clone()),
        Ast::Var(v) => alg.var(*v)?,
        Ast::D(at) => alg.d(*at)?,
        Ast::Lambda(t, at) => alg.lambda(*t, *at)?,
        Ast::Sum(terms) => {
            let mut acc = alg.num(Rational::zero());
            for (neg, t) in terms {
                let v = eval(alg, t)?;
                acc = alg.add(&acc, &if *neg { alg.neg(&v) } else { v });
            }
            acc
        }
        Ast::Product(fs) => {
            let mut acc = alg.num(Rational::one());
            for f in fs {
                acc = alg.mul(&acc, &eval(alg, f)?);
            }
            acc
        }
        Ast::Power(b, e) => {
            let b = eval(alg, b)?;
            let mut acc = alg.num(Rational::one());
            for _ in 0..*e {
                acc = alg.mul(&acc, &b);
            }
            acc
        }
    })
}

fn not_here(what: &str, at: Pos) -> Error {
    Error::Syntax {
        line: at.line,
        column: at.column,
        message: format!("{what} is not allowed in this expression"),
    }
}

struct Plain {
    ell: Option<usize>,
}

fn check_var(ell: Option<usize>, v: DiffVar) -> Result<()> {
    match ell {
        Some(ell) if v.index >= ell => Err(Error::VariableOutOfRange { index: v.index + 1, ell }),
        _ => Ok(()),
    }
}

impl Algebra for Plain {
    type T = DiffPoly;
    fn num(&self, q: Rational) -> DiffPoly {
        DiffPoly::constant(q)
    }
    fn var(&self, v: DiffVar) -> Result<DiffPoly> {
        check_var(self.ell, v)?;
        Ok(DiffPoly::var(v.index, v.order))
    }
    fn d(&self, at: Pos) -> Result<DiffPoly> {
        Err(not_here("D", at))
    }
    fn lambda(&self, _: usize, at: Pos) -> Result<DiffPoly> {
        Err(not_here("a λ variable", at))
    }
    fn add(&self, a: &DiffPoly, b: &DiffPoly) -> DiffPoly {
        a + b
    }
    fn neg(&self, a: &DiffPoly) -> DiffPoly {
        -a
    }
    fn mul(&self, a: &DiffPoly, b: &DiffPoly) -> DiffPoly {
        a * b
    }
}

struct Ops {
    ell: Option<usize>,
}

impl Algebra for Ops {
    type T = OpPoly;
    fn num(&self, q: Rational) -> OpPoly {
        OpPoly::constant(q)
    }
    fn var(&self, v: DiffVar) -> Result<OpPoly> {
        check_var(self.ell, v)?;
        Ok(OpPoly::monomial(DiffPoly::var(v.index, v.order), 0))
    }
    fn d(&self, _: Pos) -> Result<OpPoly> {
        Ok(OpPoly::d())
    }
    fn lambda(&self, _: usize, at: Pos) -> Result<OpPoly> {
        Err(not_here("a λ variable", at))
    }
    fn add(&self, a: &OpPoly, b: &OpPoly) -> OpPoly {
        a + b
    }
    fn neg(&self, a: &OpPoly) -> OpPoly {
        -a
    }
    fn mul(&self, a: &OpPoly, b: &OpPoly) -> OpPoly {
        a.compose(b)
    }
}

struct Lambdas {
    ell: Option<usize>,
    nvars: usize,
}

impl Algebra for Lambdas {
    type T = LambdaPoly;
    fn num(&self, q: Rational) -> LambdaPoly {
        LambdaPoly::constant(self.nvars, DiffPoly::constant(q))
    }
    fn var(&self, v: DiffVar) -> Result<LambdaPoly> {
        check_var(self.ell, v)?;
        Ok(LambdaPoly::constant(self.nvars, DiffPoly::var(v.index, v.order)))
    }
    fn d(&self, at: Pos) -> Result<LambdaPoly> {
        Err(not_here("D", at))
    }
    fn lambda(&self, t: usize, at: Pos) -> Result<LambdaPoly> {
        if t >= self.nvars {
            return Err(Error::Syntax {
                line: at.line,
                column: at.column,
                message: format!("l{t} is out of range for {} λ variables", self.nvars),
            });
        }
        Ok(LambdaPoly::var(self.nvars, t))
    }
    fn add(&self, a: &LambdaPoly, b: &LambdaPoly) -> LambdaPoly {
        a + b
    }
    fn neg(&self, a: &LambdaPoly) -> LambdaPoly {
        -a
    }
    fn mul(&self, a: &LambdaPoly, b: &LambdaPoly) -> LambdaPoly {
        let mut out = LambdaPoly::zero(self.nvars);
        for (e, c) in b.terms() {
            out += &a.mul_lambda(e).mul_left(c);
        }
        out
    }
}

pub fn parse_expr(text: &str) -> Result<DiffPoly> {
    eval(&Plain { ell: None }, &parse(text)?)
}

/// Like [`parse_expr`], rejecting variables beyond `u_ell`.
pub fn parse_expr_in(text: &str, ell: usize) -> Result<DiffPoly> {
    eval(&Plain { ell: Some(ell) }, &parse(text)?)
}

pub fn print_expr(p: &DiffPoly) -> String {
    p.to_string()
}

/// A scalar operator; products compose, so `D*u1 = u1*D + u1'`.
pub fn parse_op_poly(text: &str, ell: Option<usize>) -> Result<OpPoly> {
    eval(&Ops { ell }, &parse(text)?)
}

/// A polynomial in `l0, ..., l{nvars-1}` with coefficients in the differential
/// polynomials; λ's commute with everything.
pub fn parse_lambda_poly(text: &str, nvars: usize, ell: Option<usize>) -> Result<LambdaPoly> {
    eval(&Lambdas { ell, nvars }, &parse(text)?)
}
