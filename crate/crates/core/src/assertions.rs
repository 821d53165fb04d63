//! Assertion language over program states with logic variables.
//!
//! An atom whose program expression fails to evaluate is false. Free logic
//! variables are read as universally quantified by [`entails`] and by the
//! validity oracles.

use std::fmt;

use crate::error::Result;
use crate::lang::{enumerate_states, pretty_expr, Caps, Expr, Footprint, Parser, State, Tok, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ATerm {
    LVar(String),
    Lit(Value),
    /// `[e]`, the value of a program expression in the current state.
    Prog(Expr),
    Arith(ArithOp, Box<ATerm>, Box<ATerm>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Eq,
    Le,
    Lt,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Assertion {
    True,
    False,
    Cmp(Rel, ATerm, ATerm),
    Not(Box<Assertion>),
    And(Box<Assertion>, Box<Assertion>),
    Or(Box<Assertion>, Box<Assertion>),
    Implies(Box<Assertion>, Box<Assertion>),
    Forall(String, Box<Assertion>),
    Exists(String, Box<Assertion>),
}

/// Interpretation of logic variables. Later bindings shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Env(Vec<(String, Value)>);

impl Env {
    pub fn new() -> Env {
        Env(Vec::new())
    }

    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, Value)]) -> Env {
        Env(pairs.iter().map(|(n, v)| (n.as_ref().to_string(), *v)).collect())
    }

    pub fn get(&self, name: &str) -> Option<Value> {
        self.0.iter().rev().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn push(&mut self, name: &str, v: Value) {
        self.0.push((name.to_string(), v));
    }

    pub fn pop(&mut self) {
        self.0.pop();
    }

    pub fn bindings(&self) -> &[(String, Value)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (n, v)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}:{v}")?;
        }
        write!(f, "}}")
    }
}

/// All environments binding `names` over `[0, M)`, in lexicographic order.
pub fn enumerate_envs(names: &[String], m: u32, caps: &Caps) -> Result<Vec<Env>> {
    caps.ensure((m as u128).pow(names.len() as u32))?;
    let mut out = vec![Env::new()];
    for n in names {
        let mut next = Vec::with_capacity(out.len() * m as usize);
        for env in &out {
            for v in 0..m {
                let mut e = env.clone();
                e.push(n, v);
                next.push(e);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Replayable evidence attached to a refutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub state: State,
    pub env: Env,
    pub detail: Option<String>,
}

impl Witness {
    pub fn new(state: State, env: Env) -> Witness {
        Witness { state, env, detail: None }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Witness {
        self.detail = Some(detail.into());
        self
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "state {}", self.state)?;
        if !self.env.is_empty() {
            write!(f, " with {}", self.env)?;
        }
        if let Some(d) = &self.detail {
            write!(f, " ({d})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    CounterExample(Witness),
    Inconclusive(Vec<Witness>),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn is_counterexample(&self) -> bool {
        matches!(self, Verdict::CounterExample(_))
    }

    pub fn is_conclusive(&self) -> bool {
        !matches!(self, Verdict::Inconclusive(_))
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Verdict::Holds => "Holds",
            Verdict::CounterExample(_) => "CounterExample",
            Verdict::Inconclusive(_) => "Inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => write!(f, "Holds"),
            Verdict::CounterExample(w) => write!(f, "CounterExample: {w}"),
            Verdict::Inconclusive(ws) => write!(f, "Inconclusive ({} fuel-exhausted states)", ws.len()),
        }
    }
}

impl ATerm {
    pub fn prog(e: Expr) -> ATerm {
        ATerm::Prog(e)
    }

    pub fn lvar(n: &str) -> ATerm {
        ATerm::LVar(n.to_string())
    }

    pub fn arith(op: ArithOp, a: ATerm, b: ATerm) -> ATerm {
        ATerm::Arith(op, Box::new(a), Box::new(b))
    }

    fn eval(&self, s: &State, env: &Env) -> Option<Value> {
        let m = s.footprint().modulus();
        match self {
            ATerm::LVar(n) => env.get(n).map(|v| v % m),
            ATerm::Lit(v) => Some(v % m),
            ATerm::Prog(e) => e.eval_with(m, &|x| s.get(x).or_else(|| env.get(x))).ok(),
            ATerm::Arith(op, a, b) => {
                let (a, b) = (a.eval(s, env)? as u64, b.eval(s, env)? as u64);
                let m = m as u64;
                Some(match op {
                    ArithOp::Add => (a + b) % m,
                    ArithOp::Sub => (a + m - b) % m,
                    ArithOp::Mul => (a * b) % m,
                } as Value)
            }
        }
    }

    fn map_vars(&self, f: &dyn Fn(&ATerm) -> Option<ATerm>, fe: &dyn Fn(&Expr) -> Expr) -> ATerm {
        if let Some(t) = f(self) {
            return t;
        }
        match self {
            ATerm::LVar(_) | ATerm::Lit(_) => self.clone(),
            ATerm::Prog(e) => ATerm::Prog(fe(e)),
            ATerm::Arith(op, a, b) => ATerm::arith(*op, a.map_vars(f, fe), b.map_vars(f, fe)),
        }
    }

    fn names_into(&self, out: &mut Vec<String>) {
        match self {
            ATerm::LVar(n) => push_unique(out, n),
            ATerm::Lit(_) => {}
            ATerm::Prog(e) => {
                let mut vs = Vec::new();
                e.vars_into(&mut vs);
                for v in vs {
                    push_unique(out, &v);
                }
            }
            ATerm::Arith(_, a, b) => {
                a.names_into(out);
                b.names_into(out);
            }
        }
    }
}

fn push_unique(out: &mut Vec<String>, n: &str) {
    if !out.iter().any(|m| m == n) {
        out.push(n.to_string());
    }
}

impl Assertion {
    pub fn cmp(rel: Rel, a: ATerm, b: ATerm) -> Assertion {
        Assertion::Cmp(rel, a, b)
    }

    pub fn not(a: Assertion) -> Assertion {
        Assertion::Not(Box::new(a))
    }

    /// Plain conjunction node, no simplification.
    pub fn and(a: Assertion, b: Assertion) -> Assertion {
        Assertion::And(Box::new(a), Box::new(b))
    }

    /// Plain disjunction node, no simplification.
    pub fn or(a: Assertion, b: Assertion) -> Assertion {
        Assertion::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Assertion, b: Assertion) -> Assertion {
        Assertion::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(n: &str, a: Assertion) -> Assertion {
        Assertion::Exists(n.to_string(), Box::new(a))
    }

    pub fn forall(n: &str, a: Assertion) -> Assertion {
        Assertion::Forall(n.to_string(), Box::new(a))
    }

    /// Disjunction that drops `False` operands and collapses equal ones.
    pub fn join(a: Assertion, b: Assertion) -> Assertion {
        match (&a, &b) {
            (Assertion::False, _) => b,
            (_, Assertion::False) => a,
            (Assertion::True, _) | (_, Assertion::True) => Assertion::True,
            _ if a == b => a,
            _ => Assertion::or(a, b),
        }
    }

    /// Conjunction that absorbs `True` and short-circuits on `False`.
    pub fn meet(a: Assertion, b: Assertion) -> Assertion {
        match (&a, &b) {
            (Assertion::False, _) | (_, Assertion::False) => Assertion::False,
            (Assertion::True, _) => b,
            (_, Assertion::True) => a,
            _ if a == b => a,
            _ => Assertion::and(a, b),
        }
    }

    pub fn join_all(items: impl IntoIterator<Item = Assertion>) -> Assertion {
        items.into_iter().fold(Assertion::False, Assertion::join)
    }

    /// `[e] = v`.
    pub fn prog_eq(e: Expr, v: Value) -> Assertion {
        Assertion::Cmp(Rel::Eq, ATerm::Prog(e), ATerm::Lit(v))
    }

    /// `0 < [e]`: the condition is true, and `e` evaluates.
    pub fn truthy(e: &Expr) -> Assertion {
        Assertion::Cmp(Rel::Lt, ATerm::Lit(0), ATerm::Prog(e.clone()))
    }

    /// `[e] = 0`: the condition is false, and `e` evaluates.
    pub fn falsy(e: &Expr) -> Assertion {
        Assertion::Cmp(Rel::Eq, ATerm::Prog(e.clone()), ATerm::Lit(0))
    }

    /// `[e] = [e]`: holds exactly where `e` evaluates.
    pub fn defined(e: &Expr) -> Assertion {
        Assertion::Cmp(Rel::Eq, ATerm::Prog(e.clone()), ATerm::Prog(e.clone()))
    }

    pub fn size(&self) -> usize {
        match self {
            Assertion::True | Assertion::False | Assertion::Cmp(..) => 1,
            Assertion::Not(a) | Assertion::Forall(_, a) | Assertion::Exists(_, a) => 1 + a.size(),
            Assertion::And(a, b) | Assertion::Or(a, b) | Assertion::Implies(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Every identifier occurring anywhere, bound or free.
    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.names_into(&mut out);
        out
    }

    fn names_into(&self, out: &mut Vec<String>) {
        match self {
            Assertion::True | Assertion::False => {}
            Assertion::Cmp(_, a, b) => {
                a.names_into(out);
                b.names_into(out);
            }
            Assertion::Not(a) => a.names_into(out),
            Assertion::And(a, b) | Assertion::Or(a, b) | Assertion::Implies(a, b) => {
                a.names_into(out);
                b.names_into(out);
            }
            Assertion::Forall(n, a) | Assertion::Exists(n, a) => {
                push_unique(out, n);
                a.names_into(out);
            }
        }
    }

    /// Free logic variables: names not bound by a quantifier and not in `fp`.
    pub fn free_lvars(&self, fp: &Footprint) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.free_into(fp, &mut bound, &mut out);
        out
    }

    fn free_into(&self, fp: &Footprint, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            Assertion::True | Assertion::False => {}
            Assertion::Cmp(_, a, b) => {
                let mut ns = Vec::new();
                a.names_into(&mut ns);
                b.names_into(&mut ns);
                for n in ns {
                    if !fp.contains(&n) && !bound.contains(&n) {
                        push_unique(out, &n);
                    }
                }
            }
            Assertion::Not(a) => a.free_into(fp, bound, out),
            Assertion::And(a, b) | Assertion::Or(a, b) | Assertion::Implies(a, b) => {
                a.free_into(fp, bound, out);
                b.free_into(fp, bound, out);
            }
            Assertion::Forall(n, a) | Assertion::Exists(n, a) => {
                bound.push(n.clone());
                a.free_into(fp, bound, out);
                bound.pop();
            }
        }
    }

    /// Whether program variable `x` is read by some `[e]` (binders never name program variables).
    pub fn mentions_prog_var(&self, x: &str) -> bool {
        match self {
            Assertion::True | Assertion::False => false,
            Assertion::Cmp(_, a, b) => term_mentions(a, x) || term_mentions(b, x),
            Assertion::Not(a) => a.mentions_prog_var(x),
            Assertion::And(a, b) | Assertion::Or(a, b) | Assertion::Implies(a, b) => {
                a.mentions_prog_var(x) || b.mentions_prog_var(x)
            }
            Assertion::Forall(n, a) | Assertion::Exists(n, a) => n != x && a.mentions_prog_var(x),
        }
    }

    fn map_atoms(&self, f: &dyn Fn(&ATerm) -> ATerm) -> Assertion {
        match self {
            Assertion::True | Assertion::False => self.clone(),
            Assertion::Cmp(r, a, b) => Assertion::Cmp(*r, f(a), f(b)),
            Assertion::Not(a) => Assertion::not(a.map_atoms(f)),
            Assertion::And(a, b) => Assertion::and(a.map_atoms(f), b.map_atoms(f)),
            Assertion::Or(a, b) => Assertion::or(a.map_atoms(f), b.map_atoms(f)),
            Assertion::Implies(a, b) => Assertion::implies(a.map_atoms(f), b.map_atoms(f)),
            Assertion::Forall(n, a) => Assertion::forall(n, a.map_atoms(f)),
            Assertion::Exists(n, a) => Assertion::exists(n, a.map_atoms(f)),
        }
    }

    /// Renames free occurrences of logic variable `from` to `to`.
    fn rename(&self, from: &str, to: &str) -> Assertion {
        match self {
            Assertion::Forall(n, _) | Assertion::Exists(n, _) if n == from => self.clone(),
            Assertion::Forall(n, a) => Assertion::forall(n, a.rename(from, to)),
            Assertion::Exists(n, a) => Assertion::exists(n, a.rename(from, to)),
            Assertion::Not(a) => Assertion::not(a.rename(from, to)),
            Assertion::And(a, b) => Assertion::and(a.rename(from, to), b.rename(from, to)),
            Assertion::Or(a, b) => Assertion::or(a.rename(from, to), b.rename(from, to)),
            Assertion::Implies(a, b) => Assertion::implies(a.rename(from, to), b.rename(from, to)),
            Assertion::True | Assertion::False => self.clone(),
            Assertion::Cmp(r, a, b) => {
                let f = |t: &ATerm| match t {
                    ATerm::LVar(n) if n == from => Some(ATerm::lvar(to)),
                    _ => None,
                };
                let fe = |e: &Expr| e.subst(from, &Expr::var(to));
                Assertion::Cmp(*r, a.map_vars(&f, &fe), b.map_vars(&f, &fe))
            }
        }
    }

    /// Instantiates free logic variable `n` with the value `v`.
    pub fn instantiate(&self, n: &str, v: Value) -> Assertion {
        match self {
            Assertion::Forall(b, _) | Assertion::Exists(b, _) if b == n => self.clone(),
            Assertion::Forall(b, a) => Assertion::forall(b, a.instantiate(n, v)),
            Assertion::Exists(b, a) => Assertion::exists(b, a.instantiate(n, v)),
            Assertion::Not(a) => Assertion::not(a.instantiate(n, v)),
            Assertion::And(a, b) => Assertion::and(a.instantiate(n, v), b.instantiate(n, v)),
            Assertion::Or(a, b) => Assertion::or(a.instantiate(n, v), b.instantiate(n, v)),
            Assertion::Implies(a, b) => Assertion::implies(a.instantiate(n, v), b.instantiate(n, v)),
            Assertion::True | Assertion::False => self.clone(),
            Assertion::Cmp(..) => {
                let f = |t: &ATerm| match t {
                    ATerm::LVar(m) if m == n => Some(ATerm::Lit(v)),
                    _ => None,
                };
                let fe = |e: &Expr| e.subst(n, &Expr::Const(v));
                self.map_atoms(&|t| t.map_vars(&f, &fe))
            }
        }
    }
}

fn term_mentions(t: &ATerm, x: &str) -> bool {
    match t {
        ATerm::LVar(_) | ATerm::Lit(_) => false,
        ATerm::Prog(e) => e.mentions(x),
        ATerm::Arith(_, a, b) => term_mentions(a, x) || term_mentions(b, x),
    }
}

/// A name starting with `base` for which `taken` is false.
pub fn fresh_name(base: &str, taken: &dyn Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    (0..)
        .map(|i| format!("{base}_{i}"))
        .find(|n| !taken(n))
        .expect("infinite supply of names")
}

/// Replaces program variable `x` by `e` inside every `[e']`, renaming binders to avoid capture.
pub fn subst(p: &Assertion, x: &str, e: &Expr) -> Assertion {
    match p {
        Assertion::True | Assertion::False => p.clone(),
        Assertion::Cmp(r, a, b) => {
            let f = |_: &ATerm| None;
            let fe = |e2: &Expr| e2.subst(x, e);
            Assertion::Cmp(*r, a.map_vars(&f, &fe), b.map_vars(&f, &fe))
        }
        Assertion::Not(a) => Assertion::not(subst(a, x, e)),
        Assertion::And(a, b) => Assertion::and(subst(a, x, e), subst(b, x, e)),
        Assertion::Or(a, b) => Assertion::or(subst(a, x, e), subst(b, x, e)),
        Assertion::Implies(a, b) => Assertion::implies(subst(a, x, e), subst(b, x, e)),
        Assertion::Forall(n, _) | Assertion::Exists(n, _) if n == x => p.clone(),
        Assertion::Forall(n, a) | Assertion::Exists(n, a) => {
            let (n2, body) = if e.mentions(n) {
                let names = a.names();
                let fresh = fresh_name(n, &|c| c == x || e.mentions(c) || names.iter().any(|m| m == c));
                let body = a.rename(n, &fresh);
                (fresh, body)
            } else {
                (n.clone(), (**a).clone())
            };
            let body = subst(&body, x, e);
            match p {
                Assertion::Forall(..) => Assertion::forall(&n2, body),
                _ => Assertion::exists(&n2, body),
            }
        }
    }
}

pub fn satisfies(s: &State, env: &Env, p: &Assertion) -> bool {
    let mut env = env.clone();
    sat(s, &mut env, p)
}

fn sat(s: &State, env: &mut Env, p: &Assertion) -> bool {
    match p {
        Assertion::True => true,
        Assertion::False => false,
        Assertion::Cmp(r, a, b) => match (a.eval(s, env), b.eval(s, env)) {
            (Some(a), Some(b)) => match r {
                Rel::Eq => a == b,
                Rel::Le => a <= b,
                Rel::Lt => a < b,
            },
            _ => false,
        },
        Assertion::Not(a) => !sat(s, env, a),
        Assertion::And(a, b) => sat(s, env, a) && sat(s, env, b),
        Assertion::Or(a, b) => sat(s, env, a) || sat(s, env, b),
        Assertion::Implies(a, b) => !sat(s, env, a) || sat(s, env, b),
        Assertion::Forall(n, a) => (0..s.footprint().modulus()).all(|v| {
            env.push(n, v);
            let r = sat(s, env, a);
            env.pop();
            r
        }),
        Assertion::Exists(n, a) => (0..s.footprint().modulus()).any(|v| {
            env.push(n, v);
            let r = sat(s, env, a);
            env.pop();
            r
        }),
    }
}

/// `P ⊢ Q` by enumeration of states and of the free logic variables of both sides.
pub fn entails(p: &Assertion, q: &Assertion, fp: &Footprint, caps: &Caps) -> Result<Verdict> {
    if p == q || *p == Assertion::False || *q == Assertion::True {
        return Ok(Verdict::Holds);
    }
    let mut free = p.free_lvars(fp);
    for n in q.free_lvars(fp) {
        push_unique(&mut free, &n);
    }
    caps.ensure(fp.state_count() * (fp.modulus() as u128).pow(free.len() as u32))?;
    let envs = enumerate_envs(&free, fp.modulus(), caps)?;
    for s in enumerate_states(fp, caps)? {
        for env in &envs {
            if satisfies(&s, env, p) && !satisfies(&s, env, q) {
                return Ok(Verdict::CounterExample(Witness::new(s, env.clone())));
            }
        }
    }
    Ok(Verdict::Holds)
}

/// States satisfying a closed assertion (free logic variables read from `env`).
pub fn states_satisfying(p: &Assertion, env: &Env, fp: &Footprint, caps: &Caps) -> Result<Vec<State>> {
    Ok(enumerate_states(fp, caps)?.into_iter().filter(|s| satisfies(s, env, p)).collect())
}

/// Every `(σ, J)` with `σ ⊨ P` under `J`, where `J` ranges over all
/// valuations of `lvars` (which must include the free logic variables of `p`).
pub fn models(p: &Assertion, lvars: &[String], fp: &Footprint, caps: &Caps) -> Result<Vec<(State, Env)>> {
    caps.ensure(fp.state_count() * (fp.modulus() as u128).pow(lvars.len() as u32))?;
    let envs = enumerate_envs(lvars, fp.modulus(), caps)?;
    let states = enumerate_states(fp, caps)?;
    let mut out = Vec::new();
    for env in &envs {
        for s in &states {
            if satisfies(s, env, p) {
                out.push((s.clone(), env.clone()));
            }
        }
    }
    Ok(out)
}

pub fn pretty_term(t: &ATerm) -> String {
    let mut s = String::new();
    write_term(&mut s, t, 0);
    s
}

fn write_term(out: &mut String, t: &ATerm, ctx: u8) {
    match t {
        ATerm::LVar(n) => out.push_str(n),
        ATerm::Lit(v) => out.push_str(&v.to_string()),
        ATerm::Prog(e) => {
            out.push('[');
            out.push_str(&pretty_expr(e));
            out.push(']');
        }
        ATerm::Arith(op, a, b) => {
            let (p, sym) = match op {
                ArithOp::Add => (1, "+"),
                ArithOp::Sub => (1, "-"),
                ArithOp::Mul => (2, "*"),
            };
            if p < ctx {
                out.push('(');
            }
            write_term(out, a, p);
            out.push(' ');
            out.push_str(sym);
            out.push(' ');
            write_term(out, b, p + 1);
            if p < ctx {
                out.push(')');
            }
        }
    }
}

pub fn pretty_assertion(a: &Assertion) -> String {
    let mut s = String::new();
    write_assertion(&mut s, a, 0);
    s
}

fn prec(a: &Assertion) -> u8 {
    match a {
        Assertion::Forall(..) | Assertion::Exists(..) => 0,
        Assertion::Implies(..) => 1,
        Assertion::Or(..) => 2,
        Assertion::And(..) => 3,
        Assertion::Not(..) => 4,
        _ => 5,
    }
}

fn write_assertion(out: &mut String, a: &Assertion, ctx: u8) {
    let wrap = prec(a) < ctx;
    if wrap {
        out.push('(');
    }
    match a {
        Assertion::True => out.push_str("true"),
        Assertion::False => out.push_str("false"),
        Assertion::Cmp(r, x, y) => {
            write_term(out, x, 0);
            out.push_str(match r {
                Rel::Eq => " = ",
                Rel::Le => " <= ",
                Rel::Lt => " < ",
            });
            write_term(out, y, 0);
        }
        Assertion::Not(x) => {
            out.push('~');
            if matches!(**x, Assertion::Cmp(..)) {
                out.push('(');
                write_assertion(out, x, 0);
                out.push(')');
            } else {
                write_assertion(out, x, 5);
            }
        }
        Assertion::And(x, y) => {
            write_assertion(out, x, 3);
            out.push_str(" /\\ ");
            write_assertion(out, y, 4);
        }
        Assertion::Or(x, y) => {
            write_assertion(out, x, 2);
            out.push_str(" \\/ ");
            write_assertion(out, y, 3);
        }
        Assertion::Implies(x, y) => {
            write_assertion(out, x, 2);
            out.push_str(" -> ");
            write_assertion(out, y, 1);
        }
        Assertion::Forall(n, x) | Assertion::Exists(n, x) => {
            out.push_str(if matches!(a, Assertion::Forall(..)) { "forall " } else { "exists " });
            out.push_str(n);
            out.push_str(". ");
            write_assertion(out, x, 0);
        }
    }
    if wrap {
        out.push(')');
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_assertion(self))
    }
}

impl fmt::Display for ATerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_term(self))
    }
}

impl Parser {
    pub fn assertion(&mut self) -> Result<Assertion> {
        if self.at_kw("exists") || self.at_kw("forall") {
            return self.quantified();
        }
        let lhs = self.disjunction()?;
        if self.eat_sym("->") {
            let rhs = self.assertion()?;
            return Ok(Assertion::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn quantified(&mut self) -> Result<Assertion> {
        let universal = self.at_kw("forall");
        self.bump();
        let n = self.ident()?;
        self.expect_sym(".")?;
        let body = self.assertion()?;
        Ok(if universal { Assertion::forall(&n, body) } else { Assertion::exists(&n, body) })
    }

    fn disjunction(&mut self) -> Result<Assertion> {
        let mut lhs = self.conjunction()?;
        while self.eat_sym("\\/") {
            let rhs = self.conjunction()?;
            lhs = Assertion::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Assertion> {
        let mut lhs = self.assertion_unary()?;
        while self.eat_sym("/\\") {
            let rhs = self.assertion_unary()?;
            lhs = Assertion::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn assertion_unary(&mut self) -> Result<Assertion> {
        if self.eat_sym("~") {
            return Ok(Assertion::not(self.assertion_unary()?));
        }
        if self.eat_kw("true") {
            return Ok(Assertion::True);
        }
        if self.eat_kw("false") {
            return Ok(Assertion::False);
        }
        if self.at_kw("exists") || self.at_kw("forall") {
            return self.quantified();
        }
        if self.at_sym("(") {
            let save = self.position();
            self.bump();
            if let Ok(a) = self.assertion() {
                if self.eat_sym(")") && !self.at_term_continuation() {
                    return Ok(a);
                }
            }
            self.reset(save);
        }
        self.atom()
    }

    fn at_term_continuation(&self) -> bool {
        ["=", "<", "<=", ">", ">=", "+", "-", "*"].iter().any(|s| self.at_sym(s))
    }

    fn atom(&mut self) -> Result<Assertion> {
        let a = self.term()?;
        let (rel, flip) = match self.peek() {
            Tok::Sym("=") => (Rel::Eq, false),
            Tok::Sym("<=") => (Rel::Le, false),
            Tok::Sym("<") => (Rel::Lt, false),
            Tok::Sym(">=") => (Rel::Le, true),
            Tok::Sym(">") => (Rel::Lt, true),
            t => return self.error(format!("expected `=`, `<=` or `<`, found {t}")),
        };
        self.bump();
        let b = self.term()?;
        Ok(if flip { Assertion::Cmp(rel, b, a) } else { Assertion::Cmp(rel, a, b) })
    }

    pub fn term(&mut self) -> Result<ATerm> {
        let mut lhs = self.term_product()?;
        loop {
            let op = if self.eat_sym("+") {
                ArithOp::Add
            } else if self.eat_sym("-") {
                ArithOp::Sub
            } else {
                break;
            };
            let rhs = self.term_product()?;
            lhs = ATerm::arith(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term_product(&mut self) -> Result<ATerm> {
        let mut lhs = self.term_atom()?;
        while self.eat_sym("*") {
            let rhs = self.term_atom()?;
            lhs = ATerm::arith(ArithOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term_atom(&mut self) -> Result<ATerm> {
        if self.eat_sym("[") {
            let e = self.expr()?;
            self.expect_sym("]")?;
            return Ok(ATerm::Prog(e));
        }
        if self.eat_sym("(") {
            let t = self.term()?;
            self.expect_sym(")")?;
            return Ok(t);
        }
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(ATerm::Lit(n))
            }
            Tok::Ident(_) => Ok(ATerm::LVar(self.ident()?)),
            t => self.error(format!("expected term, found {t}")),
        }
    }
}

pub fn parse_assertion(text: &str) -> Result<Assertion> {
    let mut p = Parser::new(text)?;
    let a = p.assertion()?;
    p.expect_eof()?;
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_expr;

    fn fp2() -> Footprint {
        Footprint::new(&["x", "y"], 8).unwrap()
    }

    fn a(s: &str) -> Assertion {
        parse_assertion(s).unwrap()
    }

    #[test]
    fn satisfaction_examples() {
        let fp = Footprint::new(&["x"], 8).unwrap();
        let s = fp.state(&[4]).unwrap();
        assert!(satisfies(&s, &Env::new(), &a("[x] = 4")));
        let s = fp2().state(&[6, 2]).unwrap();
        assert!(satisfies(&s, &Env::new(), &a("exists n. [x] = n * [y]")));
        assert!(!satisfies(&s, &Env::new(), &Assertion::False));
    }

    #[test]
    fn erroring_atoms_are_false() {
        let s = fp2().state(&[3, 0]).unwrap();
        assert!(!satisfies(&s, &Env::new(), &a("[x / y] = 0")));
        assert!(satisfies(&s, &Env::new(), &a("~([x / y] = 0)")));
        assert!(!satisfies(&s, &Env::new(), &Assertion::defined(&parse_expr("x / y").unwrap())));
        assert!(satisfies(&s, &Env::new(), &Assertion::defined(&parse_expr("y / x").unwrap())));
    }

    #[test]
    fn substitution_examples() {
        let p = subst(&a("[x] = 1"), "x", &parse_expr("y + 1").unwrap());
        assert_eq!(p, a("[y + 1] = 1"));
        let p = subst(&a("exists n. [x] = n"), "x", &Expr::Const(0));
        assert_eq!(p, a("exists n. [0] = n"));
    }

    #[test]
    fn substitution_avoids_capture() {
        // n is a logic variable inside the substituted expression
        let p = subst(&a("exists n. [x] = n + 1"), "x", &Expr::var("n"));
        match &p {
            Assertion::Exists(b, _) => assert_ne!(b, "n"),
            other => panic!("{other}"),
        }
        let fp = Footprint::new(&["x"], 4).unwrap();
        let s = fp.state(&[0]).unwrap();
        for v in 0..4 {
            let env = Env::from_pairs(&[("n", v)]);
            // exists n'. n = n' + 1 is always true mod 4
            assert!(satisfies(&s, &env, &p));
        }
    }

    #[test]
    fn entailment_examples() {
        let caps = Caps::default();
        let fp = fp2();
        assert!(entails(&Assertion::False, &a("[x] = 3"), &fp, &caps).unwrap().holds());
        assert!(entails(&a("[x] = 1 /\\ [y] = 2"), &a("[x] = 1"), &fp, &caps).unwrap().holds());
        let fp1 = Footprint::new(&["x"], 8).unwrap();
        match entails(&a("[x] <= 2"), &a("[x] = 1"), &fp1, &caps).unwrap() {
            Verdict::CounterExample(w) => assert_eq!(w.state.values(), &[0]),
            v => panic!("{v}"),
        }
    }

    #[test]
    fn free_logic_variables_are_universal() {
        let caps = Caps::default();
        let fp = fp2();
        assert!(entails(&a("[x] = m"), &a("[x] = m"), &fp, &caps).unwrap().holds());
        assert!(entails(&a("[x] = m /\\ m = 1"), &a("[x] = 1"), &fp, &caps).unwrap().holds());
        assert!(entails(&a("[x] = m"), &a("[x] = 1"), &fp, &caps).unwrap().is_counterexample());
        assert_eq!(a("exists n. [x] = n * m /\\ [y] = m").free_lvars(&fp), vec!["m".to_string()]);
        assert_eq!(a("[x + k] = 0").free_lvars(&fp), vec!["k".to_string()]);
    }

    #[test]
    fn printing_round_trips() {
        for s in [
            "exists n. [x] = n * m /\\ [y] = m",
            "~([x] = 1) \\/ [y] < 2 -> [x] <= [y + 1]",
            "(exists n. [x] = n) /\\ (forall k. k <= [y] \\/ [x] = k)",
            "~(exists n. [x] = n)",
            "([x] + 1) * 2 = n - (k - 1)",
            "([x] = 1 -> [y] = 2) -> true",
            "[x] = 1 /\\ ([y] = 2 \\/ false)",
            "0 < [x / y]",
        ] {
            let p = a(s);
            assert_eq!(pretty_assertion(&p), s);
            assert_eq!(a(&pretty_assertion(&p)), p);
        }
    }

    #[test]
    fn smart_constructors() {
        let p = a("[x] = 1");
        assert_eq!(Assertion::join(Assertion::False, p.clone()), p);
        assert_eq!(Assertion::join(p.clone(), p.clone()), p);
        assert_eq!(Assertion::meet(Assertion::True, p.clone()), p);
        assert_eq!(Assertion::meet(Assertion::False, p.clone()), Assertion::False);
    }

    #[test]
    fn instantiation() {
        let p = a("[x] = n /\\ exists n. [y] = n");
        assert_eq!(p.instantiate("n", 3), a("[x] = 3 /\\ exists n. [y] = n"));
        assert_eq!(a("[x + n] = 0").instantiate("n", 2), a("[x + 2] = 0"));
    }
}
