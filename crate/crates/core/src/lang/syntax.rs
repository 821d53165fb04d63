use std::sync::Arc;

use super::{BinOp, Command, Expr, UnOp, Value};
use crate::error::{Error, Result};

const KEYWORDS: &[&str] = &[
    "skip", "break", "continue", "if", "then", "else", "for", "assert", "exists", "forall", "true", "false",
];

// longest first so that prefixes do not shadow
const SYMBOLS: &[&str] = &[
    ";;", "/\\", "\\/", "->", "==", "!=", "<=", ">=", "&&", "||", "(", ")", "[", "]", "{", "}", "=", "<", ">", "+",
    "-", "*", "/", "%", "!", "~", ".", ":", ",",
];

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(Value),
    Sym(&'static str),
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start_col = col;
        if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            col += i - s;
            toks.push((Tok::Ident(text[s..i].to_string()), line, start_col));
            continue;
        }
        if c.is_ascii_digit() {
            let s = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            col += i - s;
            let n = text[s..i]
                .parse::<Value>()
                .map_err(|_| Error::Syntax { line, col: start_col, msg: "integer literal too large".into() })?;
            toks.push((Tok::Num(n), line, start_col));
            continue;
        }
        match SYMBOLS.iter().find(|s| text[i..].starts_with(**s)) {
            Some(s) => {
                i += s.len();
                col += s.len();
                toks.push((Tok::Sym(s), line, start_col));
            }
            None => {
                return Err(Error::Syntax { line, col, msg: format!("unexpected character `{c}`") });
            }
        }
    }
    toks.push((Tok::Eof, line, col));
    Ok(toks)
}

/// Recursive-descent parser over the shared token stream of commands,
/// expressions and assertions.
pub struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    pub fn new(text: &str) -> Result<Parser> {
        Ok(Parser { toks: lex(text)?, pos: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn reset(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (_, line, col) = &self.toks[self.pos];
        Err(Error::Syntax { line: *line, col: *col, msg: msg.into() })
    }

    pub fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    pub fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == kw)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", self.peek()))
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> Result<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.error(format!("expected `{kw}`, found {}", self.peek()))
        }
    }

    pub fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if is_identifier(&s) => {
                self.bump();
                Ok(s)
            }
            t => self.error(format!("expected identifier, found {t}")),
        }
    }

    pub fn number(&mut self) -> Result<Value> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            t => self.error(format!("expected number, found {t}")),
        }
    }

    pub fn expect_eof(&self) -> Result<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => self.error(format!("unexpected {t}")),
        }
    }

    pub fn expr(&mut self) -> Result<Expr> {
        self.binary(1)
    }

    fn binary(&mut self, min: u8) -> Result<Expr> {
        if min > 5 {
            return self.unary();
        }
        let mut lhs = self.binary(min + 1)?;
        loop {
            let (op, flip) = match self.peek() {
                Tok::Sym(s) => match (*s, min) {
                    ("||", 1) => (BinOp::Or, false),
                    ("&&", 2) => (BinOp::And, false),
                    ("==", 3) => (BinOp::Eq, false),
                    ("!=", 3) => (BinOp::Ne, false),
                    ("<", 3) => (BinOp::Lt, false),
                    ("<=", 3) => (BinOp::Le, false),
                    (">", 3) => (BinOp::Lt, true),
                    (">=", 3) => (BinOp::Le, true),
                    ("+", 4) => (BinOp::Add, false),
                    ("-", 4) => (BinOp::Sub, false),
                    ("*", 5) => (BinOp::Mul, false),
                    ("/", 5) => (BinOp::Div, false),
                    ("%", 5) => (BinOp::Mod, false),
                    _ => break,
                },
                _ => break,
            };
            self.bump();
            let rhs = self.binary(min + 1)?;
            lhs = if flip { Expr::bin(op, rhs, lhs) } else { Expr::bin(op, lhs, rhs) };
            if min == 3 {
                // comparisons do not chain
                break;
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_sym("-") {
            return Ok(Expr::un(UnOp::Neg, self.unary()?));
        }
        if self.eat_sym("!") {
            return Ok(Expr::un(UnOp::Not, self.unary()?));
        }
        if self.eat_sym("(") {
            let e = self.expr()?;
            self.expect_sym(")")?;
            return Ok(e);
        }
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Const(n))
            }
            Tok::Ident(_) => Ok(Expr::Var(self.ident()?)),
            t => self.error(format!("expected expression, found {t}")),
        }
    }

    pub fn command(&mut self) -> Result<Command> {
        let first = self.simple_command()?;
        if self.eat_sym(";;") {
            let rest = self.command()?;
            Ok(Command::Seq(Arc::new(first), Arc::new(rest)))
        } else {
            Ok(first)
        }
    }

    fn simple_command(&mut self) -> Result<Command> {
        if self.eat_kw("skip") {
            return Ok(Command::Skip);
        }
        if self.eat_kw("break") {
            return Ok(Command::Break);
        }
        if self.eat_kw("continue") {
            return Ok(Command::Continue);
        }
        if self.eat_kw("if") {
            let e = self.expr()?;
            self.expect_kw("then")?;
            let a = self.command()?;
            self.expect_kw("else")?;
            let b = self.simple_command()?;
            return Ok(Command::If(e, Arc::new(a), Arc::new(b)));
        }
        if self.eat_kw("for") {
            self.expect_sym("(")?;
            self.expect_sym(";;")?;
            let incr = self.command()?;
            self.expect_sym(")")?;
            let body = self.simple_command()?;
            return Ok(Command::For(Arc::new(body), Arc::new(incr)));
        }
        if self.eat_sym("(") {
            let c = self.command()?;
            self.expect_sym(")")?;
            return Ok(c);
        }
        if let Tok::Ident(_) = self.peek() {
            let x = self.ident()?;
            self.expect_sym("=")?;
            let e = self.expr()?;
            return Ok(Command::Assign(x, e));
        }
        self.error(format!("expected command, found {}", self.peek()))
    }
}

pub fn parse_command(text: &str) -> Result<Command> {
    let mut p = Parser::new(text)?;
    let c = p.command()?;
    p.expect_eof()?;
    Ok(c)
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}
