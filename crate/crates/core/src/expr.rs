//! Expression language for functions of a real variable `t`.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = ("-" | "+") unary | power ;
//! power   = atom [ "^" unary ] ;                    (* right-associative *)
//! atom    = number | imag | "i" | "t" | "pi" | "e"
//!         | catalog-id
//!         | func "(" expr ")"
//!         | "(" expr { "," expr } ")" ;
//! func    = "sin" | "cos" | "exp" | "sqrt" | "abs" | "conj" | "re" | "im" ;
//! number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//! imag    = number "i" ;                            (* no space: 2i, 0.5i *)
//! ```
//!
//! `^` binds tighter than unary minus, so `-t^2` is `-(t^2)`. A parenthesized
//! list with more than one element is a tuple and gives a vector value.
//! Scalars broadcast over tuples for `*` and `/`; `+` and `-` need equal
//! arity. Functions act componentwise. Catalog identifiers (`linear_ii`, ...)
//! stand for the corresponding built-in function of `t`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::CatalogId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
    Conj,
    Re,
    Im,
}

impl Func {
    const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Sqrt,
        Func::Abs,
        Func::Conj,
        Func::Re,
        Func::Im,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Conj => "conj",
            Func::Re => "re",
            Func::Im => "im",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Exp => z.exp(),
            Func::Sqrt => z.sqrt(),
            Func::Abs => Complex64::new(z.norm(), 0.0),
            Func::Conj => z.conj(),
            Func::Re => Complex64::new(z.re, 0.0),
            Func::Im => Complex64::new(z.im, 0.0),
        }
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Imaginary literal such as `2i`.
    Imag(f64),
    I,
    T,
    Pi,
    E,
    Catalog(CatalogId),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Tuple(Vec<Expr>),
}

impl Expr {
    /// Whether the expression mentions `t`, directly or through a catalog entry.
    pub fn depends_on_t(&self) -> bool {
        match self {
            Expr::T | Expr::Catalog(_) => true,
            Expr::Num(_) | Expr::Imag(_) | Expr::I | Expr::Pi | Expr::E => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.depends_on_t(),
            Expr::Binary(_, l, r) => l.depends_on_t() || r.depends_on_t(),
            Expr::Tuple(items) => items.iter().any(Expr::depends_on_t),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, _, _) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Num(x) if x.is_sign_negative() => 3,
            Expr::Imag(y) if y.is_sign_negative() => 3,
            _ => 5,
        }
    }

    fn eval_scalar(&self, t: f64) -> std::result::Result<Complex64, String> {
        Ok(match self {
            Expr::Num(x) => Complex64::new(*x, 0.0),
            Expr::Imag(y) => Complex64::new(0.0, *y),
            Expr::I => Complex64::i(),
            Expr::T => Complex64::new(t, 0.0),
            Expr::Pi => Complex64::new(std::f64::consts::PI, 0.0),
            Expr::E => Complex64::new(std::f64::consts::E, 0.0),
            Expr::Catalog(id) => id.eval_scalar(t),
            Expr::Neg(e) => -e.eval_scalar(t)?,
            Expr::Call(f, e) => f.apply(e.eval_scalar(t)?),
            Expr::Binary(op, l, r) => scalar_op(*op, l.eval_scalar(t)?, r.eval_scalar(t)?)?,
            Expr::Tuple(items) => items[0].eval_scalar(t)?,
        })
    }

    fn eval_vec(&self, t: f64, arity: usize) -> std::result::Result<Vec<Complex64>, String> {
        if arity == 1 {
            return Ok(vec![self.eval_scalar(t)?]);
        }
        match self {
            Expr::Catalog(id) => Ok(id.eval(t).components().to_vec()),
            Expr::Tuple(items) => items.iter().map(|e| e.eval_scalar(t)).collect(),
            Expr::Neg(e) => Ok(e.eval_vec(t, arity)?.into_iter().map(|z| -z).collect()),
            Expr::Call(f, e) => Ok(e
                .eval_vec(t, arity)?
                .into_iter()
                .map(|z| f.apply(z))
                .collect()),
            Expr::Binary(op, l, r) => {
                let la = l.arity().map_err(|e| e.to_string())?;
                let ra = r.arity().map_err(|e| e.to_string())?;
                let lv = l.eval_vec(t, la)?;
                let rv = r.eval_vec(t, ra)?;
                (0..arity)
                    .map(|i| {
                        let a = if la == 1 { lv[0] } else { lv[i] };
                        let b = if ra == 1 { rv[0] } else { rv[i] };
                        scalar_op(*op, a, b)
                    })
                    .collect()
            }
            _ => unreachable!("scalar node with vector arity"),
        }
    }

    /// Static tuple arity, or an arity error for ill-shaped combinations.
    pub fn arity(&self) -> Result<usize> {
        match self {
            Expr::Num(_) | Expr::Imag(_) | Expr::I | Expr::T | Expr::Pi | Expr::E => Ok(1),
            Expr::Catalog(id) => Ok(id.dim()),
            Expr::Neg(e) | Expr::Call(_, e) => e.arity(),
            Expr::Tuple(items) => {
                for item in items {
                    let a = item.arity()?;
                    if a != 1 {
                        return Err(Error::Arity {
                            expected: 1,
                            got: a,
                        });
                    }
                }
                Ok(items.len())
            }
            Expr::Binary(op, l, r) => {
                let (la, ra) = (l.arity()?, r.arity()?);
                match op {
                    BinOp::Add | BinOp::Sub if la == ra => Ok(la),
                    BinOp::Add | BinOp::Sub => Err(Error::Arity {
                        expected: la,
                        got: ra,
                    }),
                    BinOp::Mul if la == 1 || ra == 1 => Ok(la.max(ra)),
                    BinOp::Div if ra == 1 => Ok(la),
                    BinOp::Pow if la == 1 && ra == 1 => Ok(1),
                    BinOp::Mul | BinOp::Div | BinOp::Pow => Err(Error::Arity {
                        expected: 1,
                        got: la.max(ra),
                    }),
                }
            }
        }
    }
}

fn scalar_op(op: BinOp, a: Complex64, b: Complex64) -> std::result::Result<Complex64, String> {
    let zero = Complex64::new(0.0, 0.0);
    match op {
        BinOp::Add => Ok(a + b),
        BinOp::Sub => Ok(a - b),
        BinOp::Mul => Ok(a * b),
        BinOp::Div => {
            if b == zero {
                Err("division by zero".into())
            } else {
                Ok(a / b)
            }
        }
        BinOp::Pow => power(a, b),
    }
}

fn power(base: Complex64, exp: Complex64) -> std::result::Result<Complex64, String> {
    let zero = Complex64::new(0.0, 0.0);
    if exp.im == 0.0 && exp.re.fract() == 0.0 && exp.re.abs() <= i32::MAX as f64 {
        let n = exp.re as i32;
        if base == zero && n < 0 {
            return Err("zero raised to a negative power".into());
        }
        return Ok(base.powi(n));
    }
    if base == zero {
        return if exp.re > 0.0 {
            Ok(zero)
        } else {
            Err("zero raised to a non-positive power".into())
        };
    }
    Ok(base.powc(exp))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) if x.is_sign_negative() => write!(f, "-{:?}", -x),
            Expr::Num(x) => write!(f, "{x:?}"),
            Expr::Imag(y) if y.is_sign_negative() => write!(f, "-{:?}i", -y),
            Expr::Imag(y) => write!(f, "{y:?}i"),
            Expr::I => f.write_str("i"),
            Expr::T => f.write_str("t"),
            Expr::Pi => f.write_str("pi"),
            Expr::E => f.write_str("e"),
            Expr::Catalog(id) => f.write_str(id.name()),
            Expr::Neg(e) => {
                f.write_str("-")?;
                write_operand(f, e, e.precedence() < 3)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Tuple(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                let (left_parens, right_parens) = if *op == BinOp::Pow {
                    (l.precedence() <= p, r.precedence() < 3)
                } else {
                    (l.precedence() < p, r.precedence() <= p)
                };
                write_operand(f, l, left_parens)?;
                if *op == BinOp::Pow {
                    f.write_str(op.symbol())?;
                } else {
                    write!(f, " {} ", op.symbol())?;
                }
                write_operand(f, r, right_parens)
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// A parsed expression together with its tuple arity.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Expr,
    arity: usize,
}

impl Expression {
    pub fn new(root: Expr) -> Result<Self> {
        let arity = root.arity()?;
        Ok(Self { root, arity })
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Evaluates at `t`; non-finite results are errors.
    pub fn eval(&self, t: f64) -> Result<Vec<Complex64>> {
        let out = self
            .root
            .eval_vec(t, self.arity)
            .map_err(|message| Error::Evaluation { t, message })?;
        if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Evaluation {
                t,
                message: "non-finite value".into(),
            });
        }
        Ok(out)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

/// Parses `text` into an expression over `t`.
pub fn parse_expression(text: &str) -> Result<Expression> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let root = parser.expr()?;
    if let Some(tok) = parser.peek() {
        return Err(syntax(tok.offset, format!("unexpected {}", tok.kind)));
    }
    let arity = root.arity()?;
    Ok(Expression { root, arity })
}

/// Parses a constant expression (no `t`) and evaluates it.
pub fn parse_constant(text: &str) -> Result<Vec<Complex64>> {
    let e = parse_expression(text)?;
    if e.root.depends_on_t() {
        return Err(Error::Config(format!(
            "`{text}` must be constant but depends on t"
        )));
    }
    e.eval(0.0)
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(f64),
    Imag(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Num(x) => write!(f, "number {x}"),
            TokenKind::Imag(y) => write!(f, "imaginary literal {y}i"),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Op(c) => write!(f, "`{c}`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Comma => f.write_str("`,`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                i += 1;
                TokenKind::Op(c as char)
            }
            b'(' => {
                i += 1;
                TokenKind::LParen
            }
            b')' => {
                i += 1;
                TokenKind::RParen
            }
            b',' => {
                i += 1;
                TokenKind::Comma
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let value: f64 = text[start..i].parse().map_err(|_| {
                    syntax(start, format!("malformed number `{}`", &text[start..i]))
                })?;
                let imaginary = i < bytes.len()
                    && bytes[i] == b'i'
                    && !bytes
                        .get(i + 1)
                        .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_');
                if imaginary {
                    i += 1;
                    TokenKind::Imag(value)
                } else {
                    TokenKind::Num(value)
                }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                TokenKind::Ident(text[start..i].to_string())
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        out.push(Token {
            kind,
            offset: start,
        });
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn next(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        tok
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Op(c),
                ..
            }) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<()> {
        match self.peek() {
            Some(tok) if tok.kind == kind => {
                self.pos += 1;
                Ok(())
            }
            Some(tok) => Err(syntax(
                tok.offset,
                format!("expected {kind}, found {}", tok.kind),
            )),
            None => Err(syntax(
                self.end,
                format!("expected {kind}, found end of input"),
            )),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.eat_op(&['-', '+']) {
            Some('-') => Ok(Expr::Neg(Box::new(self.unary()?))),
            Some(_) => self.unary(),
            None => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        let Some(tok) = self.next() else {
            return Err(syntax(offset, "unexpected end of input"));
        };
        match tok.kind {
            TokenKind::Num(x) => Ok(Expr::Num(x)),
            TokenKind::Imag(y) => Ok(Expr::Imag(y)),
            TokenKind::LParen => {
                let mut items = vec![self.expr()?];
                while let Some(TokenKind::Comma) = self.peek().map(|t| &t.kind) {
                    self.pos += 1;
                    items.push(self.expr()?);
                }
                self.expect(TokenKind::RParen)?;
                if items.len() == 1 {
                    Ok(items.pop().unwrap())
                } else {
                    Ok(Expr::Tuple(items))
                }
            }
            TokenKind::Ident(name) => match name.as_str() {
                "i" => Ok(Expr::I),
                "t" => Ok(Expr::T),
                "pi" => Ok(Expr::Pi),
                "e" => Ok(Expr::E),
                _ => {
                    if let Some(func) = Func::from_name(&name) {
                        self.expect(TokenKind::LParen)?;
                        let arg = self.expr()?;
                        self.expect(TokenKind::RParen)?;
                        Ok(Expr::Call(func, Box::new(arg)))
                    } else if let Some(id) = CatalogId::from_name(&name) {
                        Ok(Expr::Catalog(id))
                    } else {
                        Err(syntax(tok.offset, format!("unknown identifier `{name}`")))
                    }
                }
            },
            other => Err(syntax(tok.offset, format!("unexpected {other}"))),
        }
    }
}
