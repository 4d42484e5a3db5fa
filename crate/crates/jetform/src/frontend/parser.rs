//! Recursive-descent parser for Lagrangian densities and forms.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/\' | '/' | <juxtaposition>) unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' integer)?
//! primary := number | '(' sum ')' | atom
//! atom    := x3 | u | u_12 | u_xy | dx2 | ds | ds(1,2) | w(u) | w(u,12) | dy(u,1)
//! ```
//!
//! `*`, `/\` and juxtaposition all mean the wedge product (which is the
//! ordinary product on scalars). Division is by rational constants only.

use num::{BigInt, Zero};

use super::Names;
use crate::error::{JetError, Result};
use crate::forms::Form;
use crate::multiindex::MultiIndex;
use crate::symexpr::{BundleContext, Coord, Expr, Q};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Wedge,
    Caret,
    LParen,
    RParen,
    Comma,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> JetError {
    JetError::SyntaxError {
        line,
        column,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut push = |t: Tok| out.push(Token { tok: t, line: l0, column: c0 });
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            push(Tok::Num(s.parse().unwrap()));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            push(Tok::Ident(s));
            continue;
        }
        let t = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '/' => {
                if chars.get(i + 1) == Some(&'\\') {
                    i += 1;
                    col += 1;
                    Tok::Wedge
                } else {
                    Tok::Slash
                }
            }
            other => return Err(syntax(l0, c0, format!("unexpected character `{}`", other))),
        };
        push(t);
        i += 1;
        col += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    ctx: &'a BundleContext,
    names: &'a Names,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.line, t.column)).unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> JetError {
        let (l, c) = self.here();
        syntax(l, c, msg)
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {}", what)))
        }
    }

    fn sum(&mut self) -> Result<Form> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.product()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.sub(&self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Form> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) | Some(Tok::Wedge) => {
                    self.pos += 1;
                    acc = acc.wedge(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.here();
                    let d = self.unary()?;
                    let c = constant_of(&d).ok_or_else(|| syntax(at.0, at.1, "division is only by rational constants"))?;
                    if c.is_zero() {
                        return Err(syntax(at.0, at.1, "division by zero"));
                    }
                    acc = acc.scale(&(Q::from_integer(1.into()) / c));
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = acc.wedge(&self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Form> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Form> {
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = match self.peek().cloned() {
                Some(Tok::Num(k)) => {
                    self.pos += 1;
                    k
                }
                _ => return Err(self.err("expected a non-negative integer exponent")),
            };
            let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            if base.degrees().iter().any(|&d| d > 0) {
                return Err(self.err("powers apply to scalars only"));
            }
            let s = base.coefficient(&[]);
            return Ok(Form::scalar(s.pow(e)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Form> {
        let (line, column) = self.here();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Form::scalar(Expr::constant(Q::from_integer(v))))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                self.atom(&name, line, column)
            }
            Some(_) => Err(self.err("expected a number, identifier or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    /// Index list inside `w(...)`, `dy(...)` or `ds(...)`.
    fn index_args(&mut self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            let (l, c) = self.here();
            match self.peek().cloned() {
                Some(Tok::Num(v)) => {
                    self.pos += 1;
                    out.extend(self.subscript(&v.to_string(), l, c)?);
                }
                Some(Tok::Ident(s)) => {
                    self.pos += 1;
                    out.extend(self.subscript(&s, l, c)?);
                }
                _ => return Err(self.err("expected an index")),
            }
        }
        Ok(out)
    }

    fn subscript(&self, s: &str, line: usize, column: usize) -> Result<Vec<u8>> {
        let n = self.ctx.n;
        let mut out = Vec::new();
        for ch in s.chars() {
            let i = match ch {
                '1'..='9' => ch as u8 - b'0',
                'x' if n <= 3 => 1,
                'y' if n <= 3 => 2,
                'z' if n <= 3 => 3,
                _ => return Err(syntax(line, column, format!("bad index `{}` in `{}`", ch, s))),
            };
            if i == 0 || i > n {
                return Err(syntax(line, column, format!("index {} out of range 1..{}", i, n)));
            }
            out.push(i);
        }
        Ok(out)
    }

    fn field(&mut self) -> Result<u8> {
        match self.peek().cloned() {
            Some(Tok::Ident(f)) => {
                self.pos += 1;
                self.names.lookup(&f).ok_or(JetError::UnknownIdentifier(f))
            }
            _ => Err(self.err("expected a field name")),
        }
    }

    fn check_order(&self, sigma: u8, j: &[u8]) -> Result<()> {
        if j.len() > self.ctx.r as usize {
            let c = Coord::Y(sigma, MultiIndex::new(j));
            return Err(JetError::OrderViolation {
                coord: super::print::expr_text(&Expr::coord(c), self.names),
                order: self.ctx.r as usize,
            });
        }
        Ok(())
    }

    fn atom(&mut self, name: &str, line: usize, column: usize) -> Result<Form> {
        let n = self.ctx.n;
        match name {
            "w" | "dy" => {
                self.expect(Tok::LParen, "`(`")?;
                let sigma = self.field()?;
                let j = self.index_args()?;
                self.expect(Tok::RParen, "`)`")?;
                if name == "w" {
                    Ok(Form::omega(sigma, &j))
                } else {
                    self.check_order(sigma, &j)?;
                    Ok(Form::dy(sigma, &j, self.ctx))
                }
            }
            "ds" => {
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let (l, c) = self.here();
                    let mut block = Vec::new();
                    loop {
                        match self.peek().cloned() {
                            Some(Tok::Num(v)) => {
                                self.pos += 1;
                                block.extend(self.subscript(&v.to_string(), l, c)?);
                            }
                            Some(Tok::Ident(s)) => {
                                self.pos += 1;
                                block.extend(self.subscript(&s, l, c)?);
                            }
                            _ => return Err(self.err("expected an index")),
                        }
                        if self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Form::ds(n, &block))
                } else {
                    Ok(Form::ds(n, &[]))
                }
            }
            _ => {
                if let Some(sigma) = self.names.lookup(name) {
                    return Ok(Form::scalar(Expr::y(sigma, &[])));
                }
                if let Some((base, sub)) = name.split_once('_') {
                    if let Some(sigma) = self.names.lookup(base) {
                        let j = self.subscript(sub, line, column)?;
                        self.check_order(sigma, &j)?;
                        return Ok(Form::scalar(Expr::y(sigma, &j)));
                    }
                }
                if let Some(rest) = name.strip_prefix("dx") {
                    if let Ok(i) = rest.parse::<u8>() {
                        if (1..=n).contains(&i) {
                            return Ok(Form::dx(i));
                        }
                    }
                }
                if let Some(rest) = name.strip_prefix('x') {
                    if let Ok(i) = rest.parse::<u8>() {
                        if (1..=n).contains(&i) {
                            return Ok(Form::scalar(Expr::x(i)));
                        }
                    }
                }
                Err(JetError::UnknownIdentifier(name.to_string()))
            }
        }
    }
}

fn constant_of(f: &Form) -> Option<Q> {
    if f.is_zero() {
        return Some(Q::zero());
    }
    if f.degrees().iter().any(|&d| d > 0) {
        return None;
    }
    f.coefficient(&[]).as_constant()
}

/// Parses a form (scalars are 0-forms). `dy` inputs are expanded in the
/// contact basis on the spot.
pub fn parse_form(src: &str, ctx: &BundleContext, names: &Names) -> Result<Form> {
    let toks = lex(src)?;
    let last = src.lines().count().max(1);
    let end_col = src.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let mut p = Parser {
        toks,
        pos: 0,
        ctx,
        names,
        end: (last, end_col),
    };
    let f = p.sum()?;
    if p.pos < p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

/// Parses a scalar density; forms are rejected.
pub fn parse_expr(src: &str, ctx: &BundleContext, names: &Names) -> Result<Expr> {
    let f = parse_form(src, ctx, names)?;
    if f.degrees().iter().any(|&d| d > 0) {
        return Err(syntax(1, 1, "expected a scalar expression, found a form"));
    }
    Ok(f.coefficient(&[]))
}
