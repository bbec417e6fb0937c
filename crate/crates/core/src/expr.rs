//! Single-variable arithmetic expressions.
//!
//! Every function the toolkit consumes (tails, dominating bounds, scale
//! functions, representation pairs) can be written as text in configs and
//! CLI flags. The grammar supports `+ - * / ^`, parentheses, the calls
//! `exp ln sqrt abs min max`, the variable `x` and the constants `e`, `pi`.
//! `^` binds tighter than unary minus and associates to the right; there is
//! no implicit multiplication.

use std::fmt;

/// Parsed expression tree. Unary minus is folded into constants where
/// possible and desugared to `0 - e` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Sqrt(Box<Expr>),
    Abs(Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

/// Syntax or identifier error, with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

/// Evaluation failure naming the subexpression that produced it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("domain error in `{subexpr}` at x = {x}: {detail}")]
pub struct EvalError {
    pub subexpr: String,
    pub detail: String,
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok<'a> {
    Num(f64),
    Ident(&'a str),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Result<(Tok<'a>, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let c = match rest.chars().next() {
            None => return Ok((Tok::Eof, start)),
            Some(c) => c,
        };
        let one = |tok, me: &mut Self| {
            me.pos += 1;
            Ok((tok, start))
        };
        match c {
            '+' => one(Tok::Plus, self),
            '-' => one(Tok::Minus, self),
            '*' => one(Tok::Star, self),
            '/' => one(Tok::Slash, self),
            '^' => one(Tok::Caret, self),
            '(' => one(Tok::LParen, self),
            ')' => one(Tok::RParen, self),
            ',' => one(Tok::Comma, self),
            '0'..='9' | '.' => {
                let mut end = start;
                let bytes = self.src.as_bytes();
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                if end < bytes.len() && bytes[end] == b'.' {
                    end += 1;
                    while end < bytes.len() && bytes[end].is_ascii_digit() {
                        end += 1;
                    }
                }
                if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                    let mut exp_end = end + 1;
                    if exp_end < bytes.len() && (bytes[exp_end] == b'+' || bytes[exp_end] == b'-')
                    {
                        exp_end += 1;
                    }
                    if exp_end < bytes.len() && bytes[exp_end].is_ascii_digit() {
                        while exp_end < bytes.len() && bytes[exp_end].is_ascii_digit() {
                            exp_end += 1;
                        }
                        end = exp_end;
                    }
                }
                let text = &self.src[start..end];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    message: format!("malformed number literal `{text}`"),
                })?;
                self.pos = end;
                Ok((Tok::Num(value), start))
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = start;
                let bytes = self.src.as_bytes();
                while end < bytes.len()
                    && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_')
                {
                    end += 1;
                }
                self.pos = end;
                Ok((Tok::Ident(&self.src[start..end]), start))
            }
            _ => Err(ParseError {
                offset: start,
                message: format!("unexpected character `{c}`"),
            }),
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok<'a>,
    tok_offset: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (tok, tok_offset) = lexer.next()?;
        Ok(Parser {
            lexer,
            tok,
            tok_offset,
        })
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let (tok, off) = self.lexer.next()?;
        self.tok = tok;
        self.tok_offset = off;
        Ok(())
    }

    fn expect(&mut self, tok: Tok<'a>, what: &str) -> Result<(), ParseError> {
        if self.tok == tok {
            self.advance()
        } else {
            Err(ParseError {
                offset: self.tok_offset,
                message: format!("expected {what}, found {}", describe(&self.tok)),
            })
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.advance()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.advance()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // term := factor (('*'|'/') factor)*
    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.advance()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.advance()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // factor := '-' factor | power ; power binds tighter than unary minus
    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Minus {
            self.advance()?;
            let inner = self.factor()?;
            return Ok(match inner {
                Expr::Const(c) => Expr::Const(-c),
                other => Expr::Sub(Box::new(Expr::Const(0.0)), Box::new(other)),
            });
        }
        self.power()
    }

    // power := atom ('^' factor)? — right-associative, exponent may be signed
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.tok == Tok::Caret {
            self.advance()?;
            let exponent = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.tok {
            Tok::Num(value) => {
                self.advance()?;
                Ok(Expr::Const(value))
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let offset = self.tok_offset;
                self.advance()?;
                if self.tok == Tok::LParen {
                    self.advance()?;
                    let first = self.expr()?;
                    let expr = match name {
                        "exp" | "ln" | "sqrt" | "abs" => {
                            let arg = Box::new(first);
                            match name {
                                "exp" => Expr::Exp(arg),
                                "ln" => Expr::Ln(arg),
                                "sqrt" => Expr::Sqrt(arg),
                                _ => Expr::Abs(arg),
                            }
                        }
                        "min" | "max" => {
                            self.expect(Tok::Comma, "`,` (two arguments required)")?;
                            let second = self.expr()?;
                            if name == "min" {
                                Expr::Min(Box::new(first), Box::new(second))
                            } else {
                                Expr::Max(Box::new(first), Box::new(second))
                            }
                        }
                        _ => {
                            return Err(ParseError {
                                offset,
                                message: format!("unknown function `{name}`"),
                            })
                        }
                    };
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(expr)
                } else {
                    match name {
                        "x" => Ok(Expr::Var),
                        "e" => Ok(Expr::Const(std::f64::consts::E)),
                        "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                        _ => Err(ParseError {
                            offset,
                            message: format!("unknown identifier `{name}`"),
                        }),
                    }
                }
            }
            ref other => Err(ParseError {
                offset: self.tok_offset,
                message: format!(
                    "expected a number, `x`, `(` or a function call, found {}",
                    describe(other)
                ),
            }),
        }
    }
}

fn describe(tok: &Tok<'_>) -> String {
    match tok {
        Tok::Num(v) => format!("number `{v}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parse `text` into an expression tree.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut parser = Parser::new(text)?;
    let expr = parser.expr()?;
    if parser.tok != Tok::Eof {
        return Err(ParseError {
            offset: parser.tok_offset,
            message: format!(
                "expected an operator or end of input, found {}",
                describe(&parser.tok)
            ),
        });
    }
    Ok(expr)
}

fn err(expr: &Expr, detail: impl Into<String>, x: f64) -> EvalError {
    EvalError {
        subexpr: expr.to_string(),
        detail: detail.into(),
        x,
    }
}

/// Evaluate at `x` in IEEE double precision. Domain violations (log or
/// square root of a negative number, division by zero, fractional powers of
/// negative bases) are reported with the offending subexpression; overflow
/// to infinity is not an error.
pub fn eval(expr: &Expr, x: f64) -> Result<f64, EvalError> {
    match expr {
        Expr::Const(c) => Ok(*c),
        Expr::Var => Ok(x),
        Expr::Add(a, b) => Ok(eval(a, x)? + eval(b, x)?),
        Expr::Sub(a, b) => Ok(eval(a, x)? - eval(b, x)?),
        Expr::Mul(a, b) => Ok(eval(a, x)? * eval(b, x)?),
        Expr::Div(a, b) => {
            let d = eval(b, x)?;
            if d == 0.0 {
                return Err(err(expr, "division by zero", x));
            }
            Ok(eval(a, x)? / d)
        }
        Expr::Pow(b, e) => {
            let base = eval(b, x)?;
            let exponent = eval(e, x)?;
            if base < 0.0 && exponent.fract() != 0.0 {
                return Err(err(expr, "negative base with non-integer exponent", x));
            }
            if base == 0.0 && exponent < 0.0 {
                return Err(err(expr, "zero base with negative exponent", x));
            }
            Ok(base.powf(exponent))
        }
        Expr::Exp(a) => Ok(eval(a, x)?.exp()),
        Expr::Ln(a) => {
            let v = eval(a, x)?;
            if v <= 0.0 {
                return Err(err(expr, format!("ln of non-positive value {v}"), x));
            }
            Ok(v.ln())
        }
        Expr::Sqrt(a) => {
            let v = eval(a, x)?;
            if v < 0.0 {
                return Err(err(expr, format!("sqrt of negative value {v}"), x));
            }
            Ok(v.sqrt())
        }
        Expr::Abs(a) => Ok(eval(a, x)?.abs()),
        Expr::Min(a, b) => Ok(eval(a, x)?.min(eval(b, x)?)),
        Expr::Max(a, b) => Ok(eval(a, x)?.max(eval(b, x)?)),
    }
}

/// Evaluate `ln` of the expression at `x`, working structurally through
/// `exp`, `^`, `*`, `/` and `sqrt` so that expressions like `exp(x^0.6)`
/// keep a finite logarithm far beyond the overflow range of plain
/// evaluation. Falls back to `ln(eval(..))` for other shapes.
pub fn eval_log(expr: &Expr, x: f64) -> Result<f64, EvalError> {
    match structural_log(expr, x) {
        Ok(v) => Ok(v),
        Err(_) => {
            let v = eval(expr, x)?;
            if v > 0.0 {
                Ok(v.ln())
            } else {
                Err(err(expr, format!("non-positive value {v} has no logarithm"), x))
            }
        }
    }
}

fn structural_log(expr: &Expr, x: f64) -> Result<f64, EvalError> {
    match expr {
        Expr::Exp(a) => eval(a, x),
        Expr::Pow(b, e) => {
            let base = eval(b, x)?;
            if base > 0.0 {
                Ok(eval(e, x)? * base.ln())
            } else {
                Err(err(expr, "non-positive base in log evaluation", x))
            }
        }
        Expr::Mul(a, b) => Ok(structural_log(a, x)? + structural_log(b, x)?),
        Expr::Div(a, b) => Ok(structural_log(a, x)? - structural_log(b, x)?),
        Expr::Sqrt(a) => Ok(0.5 * structural_log(a, x)?),
        Expr::Const(c) if *c > 0.0 => Ok(c.ln()),
        Expr::Var if x > 0.0 => Ok(x.ln()),
        other => {
            let v = eval(other, x)?;
            if v > 0.0 {
                Ok(v.ln())
            } else {
                Err(err(other, "non-positive value in log evaluation", x))
            }
        }
    }
}

// Precedence levels used by the printer. A child is parenthesized whenever
// its level is below what its position requires, which keeps the reparsed
// tree identical to the printed one (associativity included).
fn prec(expr: &Expr) -> u8 {
    match expr {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Const(c) if *c < 0.0 || c.is_sign_negative() => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Expr, min: u8) -> fmt::Result {
    if prec(child) < min {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var => write!(f, "x"),
            Expr::Add(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " + ")?;
                write_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " - ")?;
                write_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_child(f, a, 2)?;
                write!(f, " * ")?;
                write_child(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_child(f, a, 2)?;
                write!(f, " / ")?;
                write_child(f, b, 3)
            }
            Expr::Pow(a, b) => {
                write_child(f, a, 5)?;
                write!(f, "^")?;
                write_child(f, b, 3)
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Ln(a) => write!(f, "ln({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
            Expr::Abs(a) => write!(f, "abs({a})"),
            Expr::Min(a, b) => write!(f, "min({a}, {b})"),
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
        }
    }
}
