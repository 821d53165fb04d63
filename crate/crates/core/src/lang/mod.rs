//! Abstract syntax, evaluation and program states for While-CF.
//!
//! Values are residues modulo the footprint's modulus `M`. Division and
//! remainder by zero are the only runtime errors of the language.

mod gen;
mod syntax;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use gen::{gen_command, gen_expr, gen_random_command, GenConfig};
pub use syntax::{parse_command, parse_expr, Parser, Tok};

/// Residue in `[0, M)`.
pub type Value = u32;

/// Shared command node.
pub type Cmd = Arc<Command>;

/// Budget for exhaustive enumerations (states, environments, continuations).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub enumeration: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { enumeration: 1 << 22 }
    }
}

impl Caps {
    pub fn ensure(&self, needed: u128) -> Result<()> {
        if needed > self.enumeration as u128 {
            Err(Error::CapExceeded { needed, cap: self.enumeration })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct FootprintData {
    vars: Vec<String>,
    modulus: u32,
}

/// Declared program variables and the value modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Footprint(Arc<FootprintData>);

impl Footprint {
    pub fn new<S: AsRef<str>>(vars: &[S], modulus: u32) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::Footprint("no variables declared".into()));
        }
        if modulus < 2 {
            return Err(Error::Footprint(format!("modulus {modulus} is below 2")));
        }
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        for (i, v) in vars.iter().enumerate() {
            if !syntax::is_identifier(v) {
                return Err(Error::Footprint(format!("`{v}` is not an identifier")));
            }
            if vars[..i].contains(v) {
                return Err(Error::Footprint(format!("duplicate variable `{v}`")));
            }
        }
        Ok(Footprint(Arc::new(FootprintData { vars, modulus })))
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn modulus(&self) -> u32 {
        self.0.modulus
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn state_count(&self) -> u128 {
        (self.modulus() as u128).pow(self.vars().len() as u32)
    }

    /// State with every variable set to zero.
    pub fn zero_state(&self) -> State {
        State { fp: self.clone(), vals: vec![0; self.vars().len()] }
    }

    pub fn state(&self, vals: &[Value]) -> Result<State> {
        if vals.len() != self.vars().len() {
            return Err(Error::Footprint(format!(
                "expected {} values, got {}",
                self.vars().len(),
                vals.len()
            )));
        }
        if let Some(v) = vals.iter().find(|v| **v >= self.modulus()) {
            return Err(Error::Footprint(format!("value {v} out of range")));
        }
        Ok(State { fp: self.clone(), vals: vals.to_vec() })
    }

    /// The `index`-th state in enumeration order (first variable most significant).
    pub fn state_at(&self, mut index: u64) -> State {
        let m = self.modulus() as u64;
        let mut vals = vec![0; self.vars().len()];
        for slot in vals.iter_mut().rev() {
            *slot = (index % m) as Value;
            index /= m;
        }
        State { fp: self.clone(), vals }
    }
}

impl fmt::Display for Footprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.vars().join(" "), self.modulus())
    }
}

/// Total map from footprint variables to values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    fp: Footprint,
    vals: Vec<Value>,
}

impl std::hash::Hash for State {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.vals.hash(h)
    }
}

impl State {
    pub fn footprint(&self) -> &Footprint {
        &self.fp
    }

    pub fn values(&self) -> &[Value] {
        &self.vals
    }

    pub fn get(&self, name: &str) -> Option<Value> {
        self.fp.index_of(name).map(|i| self.vals[i])
    }

    pub fn set(&mut self, name: &str, v: Value) -> bool {
        match self.fp.index_of(name) {
            Some(i) => {
                self.vals[i] = v % self.fp.modulus();
                true
            }
            None => false,
        }
    }

    pub fn with(&self, name: &str, v: Value) -> State {
        let mut s = self.clone();
        s.set(name, v);
        s
    }

    /// Position of this state in [`enumerate_states`] order.
    pub fn index(&self) -> u64 {
        let m = self.fp.modulus() as u64;
        self.vals.iter().fold(0, |acc, v| acc * m + *v as u64)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (n, v)) in self.fp.vars().iter().zip(&self.vals).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}:{v}")?;
        }
        write!(f, "}}")
    }
}

/// All `M^|vars|` states in a fixed order.
pub fn enumerate_states(fp: &Footprint, caps: &Caps) -> Result<Vec<State>> {
    let n = fp.state_count();
    caps.ensure(n)?;
    Ok((0..n as u64).map(|i| fp.state_at(i)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExitKind {
    Normal,
    Brk,
    Con,
}

impl fmt::Display for ExitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExitKind::Normal => "Normal",
            ExitKind::Brk => "Break",
            ExitKind::Con => "Continue",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 5,
        }
    }

    pub const ALL: [BinOp; 11] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Mod,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Le,
        BinOp::And,
        BinOp::Or,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Value),
    Var(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivByZero,
    #[error("unbound variable `{0}`")]
    Unbound(String),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn un(op: UnOp, a: Expr) -> Expr {
        Expr::Unary(op, Box::new(a))
    }

    /// Evaluates with an arbitrary variable lookup.
    pub fn eval_with(&self, m: u32, lookup: &dyn Fn(&str) -> Option<Value>) -> std::result::Result<Value, EvalError> {
        let m64 = m as u64;
        Ok(match self {
            Expr::Const(v) => v % m,
            Expr::Var(x) => lookup(x).ok_or_else(|| EvalError::Unbound(x.clone()))? % m,
            Expr::Unary(op, a) => {
                let a = a.eval_with(m, lookup)?;
                match op {
                    UnOp::Neg => (m - a) % m,
                    UnOp::Not => (a == 0) as Value,
                }
            }
            Expr::Binary(op, a, b) => {
                let a = a.eval_with(m, lookup)? as u64;
                let b = b.eval_with(m, lookup)? as u64;
                let r = match op {
                    BinOp::Add => (a + b) % m64,
                    BinOp::Sub => (a + m64 - b) % m64,
                    BinOp::Mul => (a * b) % m64,
                    BinOp::Div => {
                        if b == 0 {
                            return Err(EvalError::DivByZero);
                        }
                        a / b
                    }
                    BinOp::Mod => {
                        if b == 0 {
                            return Err(EvalError::DivByZero);
                        }
                        a % b
                    }
                    BinOp::Eq => (a == b) as u64,
                    BinOp::Ne => (a != b) as u64,
                    BinOp::Lt => (a < b) as u64,
                    BinOp::Le => (a <= b) as u64,
                    BinOp::And => (a != 0 && b != 0) as u64,
                    BinOp::Or => (a != 0 || b != 0) as u64,
                };
                r as Value
            }
        })
    }

    /// True when evaluation can fail on some state (contains `/` or `%`).
    pub fn may_fail(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Unary(_, a) => a.may_fail(),
            Expr::Binary(op, a, b) => matches!(op, BinOp::Div | BinOp::Mod) || a.may_fail() || b.may_fail(),
        }
    }

    pub fn mentions(&self, x: &str) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(y) => y == x,
            Expr::Unary(_, a) => a.mentions(x),
            Expr::Binary(_, a, b) => a.mentions(x) || b.mentions(x),
        }
    }

    pub fn vars_into(&self, out: &mut Vec<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(y) => {
                if !out.contains(y) {
                    out.push(y.clone())
                }
            }
            Expr::Unary(_, a) => a.vars_into(out),
            Expr::Binary(_, a, b) => {
                a.vars_into(out);
                b.vars_into(out)
            }
        }
    }

    /// Replaces every `Var(x)` by `e`.
    pub fn subst(&self, x: &str, e: &Expr) -> Expr {
        match self {
            Expr::Var(y) if y == x => e.clone(),
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Unary(op, a) => Expr::Unary(*op, Box::new(a.subst(x, e))),
            Expr::Binary(op, a, b) => Expr::Binary(*op, Box::new(a.subst(x, e)), Box::new(b.subst(x, e))),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Unary(_, a) => 1 + a.size(),
            Expr::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }
}

pub fn eval_expr(e: &Expr, s: &State) -> std::result::Result<Value, EvalError> {
    e.eval_with(s.fp.modulus(), &|x| s.get(x))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Skip,
    Assign(String, Expr),
    Seq(Cmd, Cmd),
    If(Expr, Cmd, Cmd),
    /// `for(;; incr) body`, stored as `(body, incr)`.
    For(Cmd, Cmd),
    Break,
    Continue,
}

impl Command {
    pub fn assign(x: &str, e: Expr) -> Command {
        Command::Assign(x.to_string(), e)
    }

    pub fn seq(a: Command, b: Command) -> Command {
        Command::Seq(Arc::new(a), Arc::new(b))
    }

    pub fn if_(e: Expr, a: Command, b: Command) -> Command {
        Command::If(e, Arc::new(a), Arc::new(b))
    }

    pub fn for_(body: Command, incr: Command) -> Command {
        Command::For(Arc::new(body), Arc::new(incr))
    }

    /// `for(;; skip) skip`, the always-safe divergent loop.
    pub fn dead() -> Command {
        Command::for_(Command::Skip, Command::Skip)
    }

    /// Number of command nodes (expressions not counted).
    pub fn size(&self) -> usize {
        match self {
            Command::Skip | Command::Assign(..) | Command::Break | Command::Continue => 1,
            Command::Seq(a, b) | Command::If(_, a, b) | Command::For(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.vars_into(&mut out);
        out
    }

    fn vars_into(&self, out: &mut Vec<String>) {
        match self {
            Command::Skip | Command::Break | Command::Continue => {}
            Command::Assign(x, e) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
                e.vars_into(out);
            }
            Command::Seq(a, b) | Command::For(a, b) => {
                a.vars_into(out);
                b.vars_into(out);
            }
            Command::If(e, a, b) => {
                e.vars_into(out);
                a.vars_into(out);
                b.vars_into(out);
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Command::Skip => "skip",
            Command::Assign(..) => "assign",
            Command::Seq(..) => "seq",
            Command::If(..) => "if",
            Command::For(..) => "for",
            Command::Break => "break",
            Command::Continue => "continue",
        }
    }
}

/// True iff some `continue` in `c` is not enclosed by a loop inside `c`.
pub fn has_toplevel_continue(c: &Command) -> bool {
    match c {
        Command::Continue => true,
        Command::Skip | Command::Assign(..) | Command::Break | Command::For(..) => false,
        Command::Seq(a, b) | Command::If(_, a, b) => has_toplevel_continue(a) || has_toplevel_continue(b),
    }
}

/// Same as [`has_toplevel_continue`] for `break`.
pub fn has_toplevel_break(c: &Command) -> bool {
    match c {
        Command::Break => true,
        Command::Skip | Command::Assign(..) | Command::Continue | Command::For(..) => false,
        Command::Seq(a, b) | Command::If(_, a, b) => has_toplevel_break(a) || has_toplevel_break(b),
    }
}

pub fn pretty_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

fn write_expr(out: &mut String, e: &Expr, ctx: u8) {
    match e {
        Expr::Const(v) => out.push_str(&v.to_string()),
        Expr::Var(x) => out.push_str(x),
        Expr::Unary(op, a) => {
            out.push(match op {
                UnOp::Neg => '-',
                UnOp::Not => '!',
            });
            let wrap = matches!(**a, Expr::Binary(..));
            if wrap {
                out.push('(');
            }
            write_expr(out, a, 0);
            if wrap {
                out.push(')');
            }
        }
        Expr::Binary(op, a, b) => {
            let p = op.precedence();
            let wrap = p < ctx;
            if wrap {
                out.push('(');
            }
            // comparisons do not associate
            let left_ctx = if p == 3 { p + 1 } else { p };
            write_expr(out, a, left_ctx);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_expr(out, b, p + 1);
            if wrap {
                out.push(')');
            }
        }
    }
}

pub fn pretty(c: &Command) -> String {
    let mut s = String::new();
    write_cmd(&mut s, c);
    s
}

fn write_cmd(out: &mut String, c: &Command) {
    match c {
        Command::Skip => out.push_str("skip"),
        Command::Break => out.push_str("break"),
        Command::Continue => out.push_str("continue"),
        Command::Assign(x, e) => {
            out.push_str(x);
            out.push_str(" = ");
            write_expr(out, e, 0);
        }
        Command::Seq(a, b) => {
            write_simple_or_wrapped(out, a, matches!(**a, Command::Seq(..)));
            out.push_str(" ;; ");
            write_cmd(out, b);
        }
        Command::If(e, a, b) => {
            out.push_str("if ");
            write_expr(out, e, 0);
            out.push_str(" then ");
            write_cmd(out, a);
            out.push_str(" else ");
            write_simple_or_wrapped(out, b, matches!(**b, Command::Seq(..)));
        }
        Command::For(body, incr) => {
            out.push_str("for(;; ");
            write_cmd(out, incr);
            out.push_str(") ");
            write_simple_or_wrapped(out, body, matches!(**body, Command::Seq(..)));
        }
    }
}

fn write_simple_or_wrapped(out: &mut String, c: &Command, wrap: bool) {
    if wrap {
        out.push('(');
        write_cmd(out, c);
        out.push(')');
    } else {
        write_cmd(out, c);
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_expr(self))
    }
}
