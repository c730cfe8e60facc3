//! Expressions in one variable `t`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?
//! atom   := number | 't' | 'e' | 'pi' | fname '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-2^2` is
//! `-4` and `2^3^2` is `512`. Printing uses the fewest parentheses that
//! reparse to the same tree; `+` and `-` are surrounded by single spaces and
//! the other operators are written without spaces.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::elementary::{
    euler, exp_construct, hyperbolic, log_construct, pow_construct, Hyperbolic,
};
use crate::error::{Error, Result};
use crate::partitions::Integrand;

/// Accuracy requested from the constructive `exp`/`log` during evaluation.
pub const EVAL_EPS: f64 = 1e-14;

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Ident,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub offset: usize,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let kind = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => TokenKind::Plus,
            b'-' => TokenKind::Minus,
            b'*' => TokenKind::Star,
            b'/' => TokenKind::Slash,
            b'^' => TokenKind::Caret,
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b',' => TokenKind::Comma,
            b'0'..=b'9' | b'.' => {
                i = scan_number(bytes, i).ok_or_else(|| parse_err(start, "malformed number"))?;
                tokens.push(Token {
                    kind: TokenKind::Number,
                    lexeme: text[start..i].to_string(),
                    offset: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Ident,
                    lexeme: text[start..i].to_string(),
                    offset: start,
                });
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(parse_err(start, format!("unexpected character '{ch}'")));
            }
        };
        i += 1;
        tokens.push(Token {
            kind,
            lexeme: text[start..i].to_string(),
            offset: start,
        });
    }
    Ok(tokens)
}

/// Digits, optional fraction, optional exponent. Returns the end offset.
fn scan_number(b: &[u8], mut i: usize) -> Option<usize> {
    let digits = |i: &mut usize| {
        let s = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        *i - s
    };
    let mut n = digits(&mut i);
    if i < b.len() && b[i] == b'.' {
        i += 1;
        n += digits(&mut i);
    }
    if n == 0 {
        return None;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        if j < b.len() && b[j].is_ascii_digit() {
            digits(&mut j);
            i = j;
        }
    }
    Some(i)
}

fn parse_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

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
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sec,
    Csc,
    Cot,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
    Atan,
    Asin,
}

impl Func {
    pub const ALL: [Func; 15] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sec,
        Func::Csc,
        Func::Cot,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
        Func::Atan,
        Func::Asin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sec => "sec",
            Func::Csc => "csc",
            Func::Cot => "cot",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Atan => "atan",
            Func::Asin => "asin",
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, x: f64, t: f64) -> Result<f64> {
        let recip = |d: f64, what: &str| {
            if d == 0.0 {
                Err(Error::eval(t, format!("{what} has a pole here")))
            } else {
                Ok(1.0 / d)
            }
        };
        let hyp = |k| hyperbolic(k, x).map_err(|e| Error::eval(t, e.to_string()));
        match self {
            Func::Sin => Ok(x.sin()),
            Func::Cos => Ok(x.cos()),
            Func::Tan => Ok(x.tan()),
            Func::Sec => recip(x.cos(), "sec"),
            Func::Csc => recip(x.sin(), "csc"),
            Func::Cot => recip(x.tan(), "cot"),
            Func::Sinh => hyp(Hyperbolic::Sinh),
            Func::Cosh => hyp(Hyperbolic::Cosh),
            Func::Tanh => hyp(Hyperbolic::Tanh),
            Func::Exp => Ok(exp_construct(x, EVAL_EPS)),
            Func::Log => log_construct(x, EVAL_EPS)
                .map(|v| v.value)
                .map_err(|_| Error::eval(t, format!("log of non-positive value {x}"))),
            Func::Sqrt if x < 0.0 => Err(Error::eval(t, format!("sqrt of negative value {x}"))),
            Func::Sqrt => Ok(x.sqrt()),
            Func::Abs => Ok(x.abs()),
            Func::Atan => Ok(x.atan()),
            Func::Asin if x.abs() > 1.0 => {
                Err(Error::eval(t, format!("asin outside [-1, 1]: {x}")))
            }
            Func::Asin => Ok(x.asin()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    Var,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Neg(Box::new(e))
    }

    pub fn call(f: Func, e: Expr) -> Expr {
        Expr::Call(f, Box::new(e))
    }

    /// True when the expression does not mention `t`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Constant(_) => true,
            Expr::Var => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.is_constant(),
            Expr::Binary(_, l, r) => l.is_constant() && r.is_constant(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Constant(_) | Expr::Var => 1,
            Expr::Neg(e) | Expr::Call(_, e) => 1 + e.depth(),
            Expr::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let v = match self {
            Expr::Constant(c) => *c,
            Expr::Var => t,
            Expr::Neg(e) => -e.eval(t)?,
            Expr::Call(f, e) => f.apply(e.eval(t)?, t)?,
            Expr::Binary(op, l, r) => {
                let (a, b) = (l.eval(t)?, r.eval(t)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b == 0.0 => return Err(Error::eval(t, "division by zero")),
                    BinOp::Div => a / b,
                    BinOp::Pow => power(a, b, t)?,
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::eval(t, format!("non-finite value {v}")))
        }
    }

    /// Binding strength used by the printer; higher binds tighter.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Constant(c) if c.is_sign_negative() => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

pub fn eval_expr(e: &Expr, t: f64) -> Result<f64> {
    e.eval(t)
}

fn power(b: f64, x: f64, t: f64) -> Result<f64> {
    if x.fract() == 0.0 && x.abs() <= 64.0 {
        let mut acc = 1.0;
        for _ in 0..x.abs() as u32 {
            acc *= b;
        }
        if x < 0.0 {
            if acc == 0.0 {
                return Err(Error::eval(t, "zero raised to a negative power"));
            }
            acc = 1.0 / acc;
        }
        return Ok(acc);
    }
    if b == euler() {
        return Ok(exp_construct(x, EVAL_EPS));
    }
    if b > 0.0 {
        return pow_construct(b, x, EVAL_EPS).map_err(|e| Error::eval(t, e.to_string()));
    }
    if b == 0.0 && x > 0.0 {
        return Ok(0.0);
    }
    Err(Error::eval(
        t,
        format!("{b}^{x}: non-integer power needs a positive base"),
    ))
}

impl Integrand for Expr {
    fn sample(&self, t: f64) -> Result<f64> {
        self.eval(t)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool| {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Var => f.write_str("t"),
            Expr::Constant(c) if *c == PI => f.write_str("pi"),
            Expr::Constant(c) if *c == euler() => f.write_str("e"),
            Expr::Constant(c) if c.is_sign_negative() => write!(f, "-{}", -c),
            Expr::Constant(c) => write!(f, "{c}"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                wrap(f, e, e.precedence() < 3)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(op, l, r) => {
                let (lp, rp) = match op {
                    BinOp::Add | BinOp::Sub => (l.precedence() < 1, r.precedence() <= 1),
                    BinOp::Mul | BinOp::Div => (l.precedence() < 2, r.precedence() <= 2),
                    BinOp::Pow => (l.precedence() < 5, r.precedence() < 3),
                };
                wrap(f, l, lp)?;
                f.write_str(op.symbol())?;
                wrap(f, r, rp)
            }
        }
    }
}

impl FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        parse(s)
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        depth: 0,
    };
    let e = p.expr()?;
    if let Some(tok) = p.peek() {
        return Err(parse_err(
            tok.offset,
            format!("unexpected '{}', expected end of input", tok.lexeme),
        ));
    }
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<()> {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            Ok(())
        } else {
            Err(parse_err(self.offset(), format!("expected {what}")))
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(parse_err(self.offset(), "expression nested too deeply"))
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek_kind() {
                Some(TokenKind::Star) => BinOp::Mul,
                Some(TokenKind::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::binary(op, lhs, self.factor()?);
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        self.enter()?;
        let e = if self.peek_kind() == Some(TokenKind::Minus) {
            self.pos += 1;
            Expr::neg(self.factor()?)
        } else {
            let base = self.atom()?;
            if self.peek_kind() == Some(TokenKind::Caret) {
                self.pos += 1;
                Expr::binary(BinOp::Pow, base, self.factor()?)
            } else {
                base
            }
        };
        self.depth -= 1;
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        let Some(tok) = self.bump() else {
            return Err(parse_err(offset, "expected expression"));
        };
        match tok.kind {
            TokenKind::Number => {
                let v: f64 = tok
                    .lexeme
                    .parse()
                    .map_err(|_| parse_err(offset, "malformed number"))?;
                if !v.is_finite() {
                    return Err(parse_err(offset, "number out of range"));
                }
                Ok(Expr::Constant(v))
            }
            TokenKind::LParen => {
                let e = self.expr()?;
                self.expect(TokenKind::RParen, "')'")?;
                Ok(e)
            }
            TokenKind::Ident => match tok.lexeme.as_str() {
                "t" => Ok(Expr::Var),
                "e" => Ok(Expr::Constant(euler())),
                "pi" => Ok(Expr::Constant(PI)),
                name => {
                    let func = Func::lookup(name)
                        .ok_or_else(|| parse_err(offset, format!("unknown identifier '{name}'")))?;
                    self.expect(TokenKind::LParen, &format!("'(' after '{name}'"))?;
                    let arg = self.expr()?;
                    self.expect(TokenKind::RParen, "')'")?;
                    Ok(Expr::call(func, arg))
                }
            },
            _ => {
                self.pos -= 1;
                Err(parse_err(offset, "expected expression"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, t: f64) -> f64 {
        parse(s).unwrap().eval(t).unwrap()
    }

    fn err_at(s: &str) -> (usize, String) {
        match parse(s).unwrap_err() {
            Error::Parse { offset, message } => (offset, message),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("2+3*4", 0.0), 14.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("-2^2", 0.0), -4.0);
        assert_eq!(ev("8/4/2", 0.0), 1.0);
        assert_eq!(ev("10-4-3", 0.0), 3.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("-t", 3.0), -3.0);
        assert_eq!(ev("1/(1+t^2)", 1.0), 0.5);
    }

    #[test]
    fn functions_and_constants() {
        assert!((ev("sin(t)^2 + cos(t)^2", 0.7) - 1.0).abs() <= 1e-15);
        assert!((ev("e^t", 1.0) - std::f64::consts::E).abs() < 1e-10);
        assert!((ev("log(e)", 0.0) - 1.0).abs() < 1e-14);
        assert!((ev("exp(log(t))", 5.0) - 5.0).abs() < 1e-13);
        assert_eq!(ev("pi", 0.0), PI);
        assert!((ev("t^0.5", 2.0) - 2f64.sqrt()).abs() < 1e-14);
        assert!((ev("2.5e-1*4", 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn evaluation_errors_carry_t() {
        let e = parse("log(t)").unwrap().eval(-1.0).unwrap_err();
        assert!(matches!(e, Error::Evaluation { t, .. } if t == -1.0));
        assert!(parse("1/t").unwrap().eval(0.0).is_err());
        assert!(parse("t^0.5").unwrap().eval(-2.0).is_err());
        assert_eq!(ev("t^3", -2.0), -8.0);
        assert!(parse("sqrt(t)").unwrap().eval(-1.0).is_err());
        assert!(parse("csc(t)").unwrap().eval(0.0).is_err());
    }

    #[test]
    fn error_offsets() {
        assert_eq!(err_at("sec("), (4, "expected expression".into()));
        assert_eq!(err_at("(1+2"), (4, "expected ')'".into()));
        assert_eq!(err_at("foo(t)"), (0, "unknown identifier 'foo'".into()));
        assert_eq!(err_at("1 + x"), (4, "unknown identifier 'x'".into()));
        assert_eq!(
            err_at("1 2"),
            (2, "unexpected '2', expected end of input".into())
        );
        assert_eq!(
            err_at("t)"),
            (1, "unexpected ')', expected end of input".into())
        );
        assert_eq!(err_at("sin t"), (4, "expected '(' after 'sin'".into()));
        assert_eq!(err_at("2 $ 3"), (2, "unexpected character '$'".into()));
        assert_eq!(err_at(""), (0, "expected expression".into()));
        assert_eq!(err_at("1e999"), (0, "number out of range".into()));
    }

    #[test]
    fn tokens_carry_offsets() {
        let toks = tokenize("sin( t )*2.5e3").unwrap();
        let offs: Vec<usize> = toks.iter().map(|t| t.offset).collect();
        assert_eq!(offs, vec![0, 3, 5, 7, 8, 9]);
        assert_eq!(toks[5].lexeme, "2.5e3");
        assert_eq!(toks[5].kind, TokenKind::Number);
    }

    #[test]
    fn printing_is_minimal() {
        for (src, printed) in [
            ("(2+3)*4", "(2 + 3)*4"),
            ("2+(3*4)", "2 + 3*4"),
            ("(2^3)^2", "(2^3)^2"),
            ("2^(3^2)", "2^3^2"),
            ("-(2^2)", "-2^2"),
            ("(-2)^2", "(-2)^2"),
            ("1-(2-3)", "1 - (2 - 3)"),
            ("(1-2)-3", "1 - 2 - 3"),
            ("t/(2*t)", "t/(2*t)"),
            ("2^-t", "2^-t"),
            ("sin(t)^2+cos(t)^2", "sin(t)^2 + cos(t)^2"),
            ("e^t*pi", "e^t*pi"),
        ] {
            let e = parse(src).unwrap();
            assert_eq!(e.to_string(), printed, "{src}");
            assert_eq!(parse(printed).unwrap(), e);
        }
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let s = format!("{}t{}", "(".repeat(5000), ")".repeat(5000));
        assert!(matches!(parse(&s), Err(Error::Parse { .. })));
    }
}
