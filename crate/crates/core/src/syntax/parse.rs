//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr     := term { ("+" | "-") term }
//! term     := [ "-" ] factor { "*" factor }
//! factor   := base [ "^" integer ]        (negative only for hbar)
//! base     := rational | "i" | "hbar" | var | "(" expr ")"
//! var      := ("q"|"p") index  (classical)  |  ("Q"|"P") index  (operator)
//! rational := integer [ "/" positive-integer ]
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::operator::OperatorPolynomial;
use crate::phase::{PhasePolynomial, Var, VarKind};
use crate::scalar::{Coefficient, GaussianRational};

/// The operations the parser needs from a target algebra.
pub trait ExprAlgebra: Sized + Clone {
    /// Letters naming variables in this algebra, `(q-letter, p-letter)`.
    const LETTERS: (char, char);
    fn scalar(dof: usize, c: Coefficient) -> Self;
    fn variable(dof: usize, v: Var) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn power(&self, e: u32) -> Self;
}

impl ExprAlgebra for PhasePolynomial {
    const LETTERS: (char, char) = ('q', 'p');
    fn scalar(dof: usize, c: Coefficient) -> Self {
        PhasePolynomial::constant(dof, c)
    }
    fn variable(dof: usize, v: Var) -> Self {
        PhasePolynomial::var(dof, v)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn power(&self, e: u32) -> Self {
        self.pow(e)
    }
}

impl ExprAlgebra for OperatorPolynomial {
    const LETTERS: (char, char) = ('Q', 'P');
    fn scalar(dof: usize, c: Coefficient) -> Self {
        OperatorPolynomial::constant(dof, c)
    }
    fn variable(dof: usize, v: Var) -> Self {
        OperatorPolynomial::letter(dof, v)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn power(&self, e: u32) -> Self {
        self.pow(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("integer {n}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of input".into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                column += 1;
            }
            out.push(Token { tok: Tok::Int(s.parse().unwrap()), line: l, column: col });
        } else if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric()) {
                s.push(d);
                chars.next();
                column += 1;
            }
            out.push(Token { tok: Tok::Ident(s), line: l, column: col });
        } else if "+-*/^()".contains(c) {
            chars.next();
            column += 1;
            out.push(Token { tok: Tok::Sym(c), line: l, column: col });
        } else {
            return Err(Error::Parse {
                line: l,
                column: col,
                message: format!("unexpected character '{c}'"),
                expected: base_expected(('q', 'p')),
            });
        }
    }
    out.push(Token { tok: Tok::End, line, column });
    Ok(out)
}

fn base_expected(letters: (char, char)) -> Vec<String> {
    vec![
        "integer".into(),
        "'i'".into(),
        "'hbar'".into(),
        format!("'{}<n>'", letters.0),
        format!("'{}<n>'", letters.1),
        "'('".into(),
    ]
}

struct Parser<A> {
    tokens: Vec<Token>,
    pos: usize,
    dof: usize,
    _marker: std::marker::PhantomData<A>,
}

impl<A: ExprAlgebra> Parser<A> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>, expected: Vec<String>) -> Error {
        let t = self.peek();
        Error::Parse { line: t.line, column: t.column, message: message.into(), expected }
    }

    fn unexpected(&self, expected: Vec<String>) -> Error {
        self.error(format!("unexpected {}", describe(&self.peek().tok)), expected)
    }

    fn at_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expr(&mut self) -> Result<A> {
        let mut acc = self.term()?;
        loop {
            if self.at_sym('+') {
                self.bump();
                acc = acc.plus(&self.term()?);
            } else if self.at_sym('-') {
                self.bump();
                acc = acc.minus(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<A> {
        let negate = if self.at_sym('-') {
            self.bump();
            true
        } else {
            false
        };
        let mut acc = self.factor()?;
        while self.at_sym('*') {
            self.bump();
            acc = acc.times(&self.factor()?);
        }
        if negate {
            acc = A::scalar(self.dof, Coefficient::zero()).minus(&acc);
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<i64> {
        let negative = if self.at_sym('-') {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().tok.clone() {
            Tok::Int(n) => {
                let value = n
                    .to_i64()
                    .filter(|v| *v <= u32::MAX as i64)
                    .ok_or_else(|| self.error("exponent too large", vec![]))?;
                self.bump();
                Ok(if negative { -value } else { value })
            }
            _ => Err(self.unexpected(vec!["integer".into()])),
        }
    }

    fn factor(&mut self) -> Result<A> {
        let is_hbar = matches!(&self.peek().tok, Tok::Ident(s) if s == "hbar");
        let base = self.base()?;
        if !self.at_sym('^') {
            return Ok(base);
        }
        self.bump();
        let exp_token = self.peek().clone();
        let e = self.exponent()?;
        if is_hbar {
            return Ok(A::scalar(self.dof, Coefficient::hbar_pow(e as i32)));
        }
        if e < 0 {
            return Err(Error::Parse {
                line: exp_token.line,
                column: exp_token.column,
                message: "negative exponents are only allowed on hbar".into(),
                expected: vec!["nonnegative integer".into()],
            });
        }
        Ok(base.power(e as u32))
    }

    fn base(&mut self) -> Result<A> {
        let letters = A::LETTERS;
        let token = self.peek().clone();
        match token.tok {
            Tok::Int(n) => {
                self.bump();
                let mut value = BigRational::from_integer(n);
                if self.at_sym('/') {
                    self.bump();
                    match self.peek().tok.clone() {
                        Tok::Int(d) if !d.is_zero() => {
                            self.bump();
                            value /= BigRational::from_integer(d);
                        }
                        Tok::Int(_) => return Err(self.error("zero denominator", vec!["positive integer".into()])),
                        _ => return Err(self.unexpected(vec!["positive integer".into()])),
                    }
                }
                Ok(A::scalar(self.dof, Coefficient::from_rational(value)))
            }
            Tok::Sym('(') => {
                self.bump();
                let inner = self.expr()?;
                if !self.at_sym(')') {
                    return Err(self.unexpected(vec!["'+'".into(), "'-'".into(), "'*'".into(), "')'".into()]));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(ref s) if s == "i" => {
                self.bump();
                Ok(A::scalar(self.dof, Coefficient::constant(GaussianRational::i())))
            }
            Tok::Ident(ref s) if s == "hbar" => {
                self.bump();
                Ok(A::scalar(self.dof, Coefficient::hbar()))
            }
            Tok::Ident(ref s) => {
                let mut chars = s.chars();
                let head = chars.next().unwrap();
                let index = chars.as_str();
                let kind = if head == letters.0 {
                    Some(VarKind::Q)
                } else if head == letters.1 {
                    Some(VarKind::P)
                } else {
                    None
                };
                match (kind, index.parse::<usize>()) {
                    (Some(kind), Ok(mode)) if !index.is_empty() && index.chars().all(|c| c.is_ascii_digit()) => {
                        if mode >= self.dof {
                            return Err(Error::IndexOutOfRange { index: mode, dof: self.dof });
                        }
                        self.bump();
                        Ok(A::variable(self.dof, Var { kind, mode }))
                    }
                    _ => Err(self.error(format!("unknown identifier '{s}'"), base_expected(letters))),
                }
            }
            _ => Err(self.unexpected(base_expected(letters))),
        }
    }
}

fn parse_with<A: ExprAlgebra>(text: &str, dof: usize) -> Result<A> {
    if dof == 0 {
        return Err(Error::Precondition("degrees of freedom must be positive".into()));
    }
    let tokens = tokenize(text)?;
    let mut parser = Parser::<A> { tokens, pos: 0, dof, _marker: std::marker::PhantomData };
    let value = parser.expr()?;
    if parser.peek().tok != Tok::End {
        return Err(parser.unexpected(vec![
            "'+'".into(),
            "'-'".into(),
            "'*'".into(),
            "'^'".into(),
            "end of input".into(),
        ]));
    }
    Ok(value)
}

/// Parses a classical (commutative) expression in `q<n>`, `p<n>`.
pub fn parse_classical(text: &str, dof: usize) -> Result<PhasePolynomial> {
    parse_with(text, dof)
}

/// Parses an operator expression in `Q<n>`, `P<n>`; `*` is the ordered product.
pub fn parse_operator(text: &str, dof: usize) -> Result<OperatorPolynomial> {
    parse_with(text, dof)
}
