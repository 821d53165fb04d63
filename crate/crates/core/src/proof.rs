//! Deeply embedded proof trees over the primary rules, with a checker
//! that discharges consequence side conditions by enumeration.

use std::collections::HashMap;
use std::fmt;

use crate::assertions::{entails, pretty_assertion, subst, Assertion, Verdict, Witness};
use crate::error::{Error, Result};
use crate::lang::{pretty, pretty_expr, Caps, Command, Expr, Footprint, Parser};
use crate::smallstep::Posts;

/// `{P} c {Q, [Rb, Rc]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub pre: Assertion,
    pub cmd: Command,
    pub post: Assertion,
    pub brk: Assertion,
    pub con: Assertion,
}

impl Triple {
    pub fn new(pre: Assertion, cmd: Command, post: Assertion, brk: Assertion, con: Assertion) -> Triple {
        Triple { pre, cmd, post, brk, con }
    }

    pub fn posts(&self) -> Posts {
        Posts::new(self.post.clone(), self.brk.clone(), self.con.clone())
    }

    /// Free logic variables of all four assertions, in order of appearance.
    pub fn free_lvars(&self, fp: &Footprint) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for a in [&self.pre, &self.post, &self.brk, &self.con] {
            for n in a.free_lvars(fp) {
                if !out.contains(&n) {
                    out.push(n);
                }
            }
        }
        out
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}} {} {{{}, [{}, {}]}}", self.pre, pretty(&self.cmd), self.post, self.brk, self.con)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProofTree {
    RSkip(Assertion),
    RBreak(Assertion),
    RContinue(Assertion),
    /// Backward assignment: the precondition is computed from the post.
    RAssign(String, Expr, Assertion),
    RSeq(Assertion, Box<ProofTree>, Box<ProofTree>),
    RIf(Expr, Box<ProofTree>, Box<ProofTree>),
    /// Body precondition, increment precondition, body proof, increment proof.
    RLoop(Assertion, Assertion, Box<ProofTree>, Box<ProofTree>),
    /// Child, then the concluded `P`, `Q`, `Rb`, `Rc`.
    RConseq(Box<ProofTree>, Assertion, Assertion, Assertion, Assertion),
}

/// Precondition of the assignment rule for `x = e` and post `q`.
pub fn assign_pre(x: &str, e: &Expr, q: &Assertion) -> Assertion {
    let p = subst(q, x, e);
    if e.may_fail() {
        Assertion::and(p, Assertion::defined(e))
    } else {
        p
    }
}

/// Branch preconditions of the conditional rule.
pub fn branch_pres(p: &Assertion, e: &Expr) -> (Assertion, Assertion) {
    (Assertion::and(p.clone(), Assertion::truthy(e)), Assertion::and(p.clone(), Assertion::falsy(e)))
}

fn malformed<T>(path: &str, reason: impl Into<String>) -> Result<T> {
    Err(Error::MalformedNode { path: path.to_string(), reason: reason.into() })
}

impl ProofTree {
    pub fn seq(mid: Assertion, l: ProofTree, r: ProofTree) -> ProofTree {
        ProofTree::RSeq(mid, Box::new(l), Box::new(r))
    }

    pub fn if_(e: Expr, l: ProofTree, r: ProofTree) -> ProofTree {
        ProofTree::RIf(e, Box::new(l), Box::new(r))
    }

    pub fn loop_(p: Assertion, i: Assertion, body: ProofTree, incr: ProofTree) -> ProofTree {
        ProofTree::RLoop(p, i, Box::new(body), Box::new(incr))
    }

    pub fn conseq(child: ProofTree, p: Assertion, q: Assertion, rb: Assertion, rc: Assertion) -> ProofTree {
        ProofTree::RConseq(Box::new(child), p, q, rb, rc)
    }

    pub fn rule_name(&self) -> &'static str {
        match self {
            ProofTree::RSkip(_) => "hoare-skip",
            ProofTree::RBreak(_) => "hoare-break",
            ProofTree::RContinue(_) => "hoare-continue",
            ProofTree::RAssign(..) => "hoare-assign",
            ProofTree::RSeq(..) => "hoare-seq",
            ProofTree::RIf(..) => "hoare-if",
            ProofTree::RLoop(..) => "hoare-loop",
            ProofTree::RConseq(..) => "hoare-consequence",
        }
    }

    /// The command this node concludes about.
    pub fn command(&self) -> Command {
        match self {
            ProofTree::RSkip(_) => Command::Skip,
            ProofTree::RBreak(_) => Command::Break,
            ProofTree::RContinue(_) => Command::Continue,
            ProofTree::RAssign(x, e, _) => Command::assign(x, e.clone()),
            ProofTree::RSeq(_, l, r) => Command::seq(l.command(), r.command()),
            ProofTree::RIf(e, l, r) => Command::if_(e.clone(), l.command(), r.command()),
            ProofTree::RLoop(_, _, b, c) => Command::for_(b.command(), c.command()),
            ProofTree::RConseq(c, ..) => c.command(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            ProofTree::RSkip(_) | ProofTree::RBreak(_) | ProofTree::RContinue(_) | ProofTree::RAssign(..) => 1,
            ProofTree::RSeq(_, l, r) | ProofTree::RIf(_, l, r) | ProofTree::RLoop(_, _, l, r) => {
                1 + l.node_count() + r.node_count()
            }
            ProofTree::RConseq(c, ..) => 1 + c.node_count(),
        }
    }
}

pub fn conclusion(t: &ProofTree) -> Result<Triple> {
    conclusion_at(t, "root")
}

fn conclusion_at(t: &ProofTree, path: &str) -> Result<Triple> {
    let f = || Assertion::False;
    Ok(match t {
        ProofTree::RSkip(p) => Triple::new(p.clone(), Command::Skip, p.clone(), f(), f()),
        ProofTree::RBreak(p) => Triple::new(p.clone(), Command::Break, f(), p.clone(), f()),
        ProofTree::RContinue(p) => Triple::new(p.clone(), Command::Continue, f(), f(), p.clone()),
        ProofTree::RAssign(x, e, q) => Triple::new(assign_pre(x, e, q), Command::assign(x, e.clone()), q.clone(), f(), f()),
        ProofTree::RSeq(mid, l, r) => {
            let a = conclusion_at(l, &format!("{path}/left"))?;
            let b = conclusion_at(r, &format!("{path}/right"))?;
            if a.post != *mid {
                return malformed(path, format!("left post {} differs from the middle {}", a.post, mid));
            }
            if b.pre != *mid {
                return malformed(path, format!("right pre {} differs from the middle {}", b.pre, mid));
            }
            if a.brk != b.brk || a.con != b.con {
                return malformed(path, "children disagree on the break or continue post");
            }
            Triple::new(a.pre, Command::seq(a.cmd, b.cmd), b.post, b.brk, b.con)
        }
        ProofTree::RIf(e, l, r) => {
            let a = conclusion_at(l, &format!("{path}/then"))?;
            let b = conclusion_at(r, &format!("{path}/else"))?;
            let p = match &a.pre {
                Assertion::And(p, nz) if **nz == Assertion::truthy(e) => (**p).clone(),
                other => return malformed(path, format!("then-branch pre {other} is not of the form P /\\ 0 < [e]")),
            };
            if b.pre != branch_pres(&p, e).1 {
                return malformed(path, format!("else-branch pre {} is not {}", b.pre, branch_pres(&p, e).1));
            }
            if (&a.post, &a.brk, &a.con) != (&b.post, &b.brk, &b.con) {
                return malformed(path, "branches disagree on their posts");
            }
            Triple::new(p, Command::if_(e.clone(), a.cmd, b.cmd), a.post, a.brk, a.con)
        }
        ProofTree::RLoop(p, i, body, incr) => {
            let b = conclusion_at(body, &format!("{path}/body"))?;
            let c = conclusion_at(incr, &format!("{path}/incr"))?;
            if b.pre != *p || b.post != *i || b.con != *i {
                return malformed(path, format!("body must conclude {{{p}}} _ {{{i}, [_, {i}]}}"));
            }
            if c.pre != *i || c.post != *p {
                return malformed(path, format!("increment must conclude {{{i}}} _ {{{p}, _}}"));
            }
            if c.brk != b.brk {
                return malformed(path, "body and increment disagree on the loop post");
            }
            if c.con != Assertion::False {
                return malformed(path, "increment continue post must be false");
            }
            Triple::new(p.clone(), Command::for_(b.cmd, c.cmd), b.brk, f(), f())
        }
        ProofTree::RConseq(c, p, q, rb, rc) => {
            Triple::new(p.clone(), c.command(), q.clone(), rb.clone(), rc.clone())
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckFailure {
    pub path: String,
    pub obligation: String,
    pub witness: Option<Witness>,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.obligation)?;
        if let Some(w) = &self.witness {
            write!(f, " (counterexample {w})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub ok: bool,
    pub failures: Vec<CheckFailure>,
    pub conclusion: Option<Triple>,
    /// Distinct entailments discharged.
    pub entailments: usize,
}

struct Checker<'a> {
    fp: &'a Footprint,
    caps: &'a Caps,
    cache: HashMap<(Assertion, Assertion), Verdict>,
    failures: Vec<CheckFailure>,
}

impl Checker<'_> {
    fn entail(&mut self, path: &str, what: &str, p: &Assertion, q: &Assertion) -> Result<()> {
        let key = (p.clone(), q.clone());
        let v = match self.cache.get(&key) {
            Some(v) => v.clone(),
            None => {
                let v = entails(p, q, self.fp, self.caps)?;
                self.cache.insert(key, v.clone());
                v
            }
        };
        if let Verdict::CounterExample(w) = v {
            self.failures.push(CheckFailure {
                path: path.to_string(),
                obligation: format!("{what}: {p} |- {q}"),
                witness: Some(w),
            });
        }
        Ok(())
    }

    fn node(&mut self, t: &ProofTree, path: &str) -> Result<Option<Triple>> {
        let children: Vec<(&ProofTree, &str)> = match t {
            ProofTree::RSeq(_, l, r) => vec![(l, "left"), (r, "right")],
            ProofTree::RIf(_, l, r) => vec![(l, "then"), (r, "else")],
            ProofTree::RLoop(_, _, b, c) => vec![(b, "body"), (c, "incr")],
            ProofTree::RConseq(c, ..) => vec![(c, "child")],
            _ => vec![],
        };
        let mut sub = Vec::new();
        for (c, name) in children {
            sub.push(self.node(c, &format!("{path}/{name}"))?);
        }
        if sub.iter().any(Option::is_none) {
            return Ok(None);
        }
        for name in t.command().vars() {
            if !self.fp.contains(&name) {
                self.failures.push(CheckFailure {
                    path: path.to_string(),
                    obligation: format!("variable `{name}` is outside the footprint"),
                    witness: None,
                });
                return Ok(None);
            }
        }
        let concl = match conclusion_at(t, path) {
            Ok(c) => c,
            Err(Error::MalformedNode { path, reason }) => {
                self.failures.push(CheckFailure { path, obligation: reason, witness: None });
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        match t {
            ProofTree::RIf(e, ..) if e.may_fail() => {
                self.entail(path, "condition is defined", &concl.pre, &Assertion::defined(e))?;
            }
            ProofTree::RConseq(..) => {
                let inner = sub[0].as_ref().expect("checked above");
                self.entail(path, "strengthen pre", &concl.pre, &inner.pre)?;
                self.entail(path, "weaken post", &inner.post, &concl.post)?;
                self.entail(path, "weaken break post", &inner.brk, &concl.brk)?;
                self.entail(path, "weaken continue post", &inner.con, &concl.con)?;
            }
            _ => {}
        }
        Ok(Some(concl))
    }
}

/// Validates every node; `CapExceeded` from the entailment oracle propagates.
pub fn check(t: &ProofTree, fp: &Footprint, caps: &Caps) -> Result<CheckReport> {
    let mut ck = Checker { fp, caps, cache: HashMap::new(), failures: Vec::new() };
    let concl = ck.node(t, "root")?;
    Ok(CheckReport {
        ok: ck.failures.is_empty(),
        failures: ck.failures,
        conclusion: concl,
        entailments: ck.cache.len(),
    })
}

/// Shorthand for `check(..).ok`.
pub fn checks(t: &ProofTree, fp: &Footprint, caps: &Caps) -> Result<bool> {
    Ok(check(t, fp, caps)?.ok)
}

fn braces(a: &Assertion) -> String {
    format!("{{{}}}", pretty_assertion(a))
}

/// Text form of a proof tree, two spaces per nesting level.
pub fn pretty_tree(t: &ProofTree) -> String {
    let mut out = String::new();
    write_tree(&mut out, t, 0);
    out
}

fn write_tree(out: &mut String, t: &ProofTree, indent: usize) {
    let pad = "  ".repeat(indent + 1);
    let children = |out: &mut String, kids: &[&ProofTree]| {
        for k in kids {
            out.push('\n');
            out.push_str(&pad);
            write_tree(out, k, indent + 1);
        }
        out.push(')');
    };
    match t {
        ProofTree::RSkip(p) => out.push_str(&format!("(skip {})", braces(p))),
        ProofTree::RBreak(p) => out.push_str(&format!("(break {})", braces(p))),
        ProofTree::RContinue(p) => out.push_str(&format!("(continue {})", braces(p))),
        ProofTree::RAssign(x, e, q) => out.push_str(&format!("(assign {x} {{{}}} {})", pretty_expr(e), braces(q))),
        ProofTree::RSeq(m, l, r) => {
            out.push_str(&format!("(seq {}", braces(m)));
            children(out, &[l, r]);
        }
        ProofTree::RIf(e, l, r) => {
            out.push_str(&format!("(if {{{}}}", pretty_expr(e)));
            children(out, &[l, r]);
        }
        ProofTree::RLoop(p, i, b, c) => {
            out.push_str(&format!("(loop {} {}", braces(p), braces(i)));
            children(out, &[b, c]);
        }
        ProofTree::RConseq(c, p, q, rb, rc) => {
            out.push_str(&format!("(conseq {} {} {} {}", braces(p), braces(q), braces(rb), braces(rc)));
            children(out, &[c]);
        }
    }
}

impl fmt::Display for ProofTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_tree(self))
    }
}

impl Parser {
    fn braced_assertion(&mut self) -> Result<Assertion> {
        self.expect_sym("{")?;
        let a = self.assertion()?;
        self.expect_sym("}")?;
        Ok(a)
    }

    fn braced_expr(&mut self) -> Result<Expr> {
        self.expect_sym("{")?;
        let e = self.expr()?;
        self.expect_sym("}")?;
        Ok(e)
    }

    pub fn proof_tree(&mut self) -> Result<ProofTree> {
        self.expect_sym("(")?;
        let t = if self.eat_kw("skip") {
            ProofTree::RSkip(self.braced_assertion()?)
        } else if self.eat_kw("break") {
            ProofTree::RBreak(self.braced_assertion()?)
        } else if self.eat_kw("continue") {
            ProofTree::RContinue(self.braced_assertion()?)
        } else if self.eat_kw("assign") {
            let x = self.ident()?;
            let e = self.braced_expr()?;
            ProofTree::RAssign(x, e, self.braced_assertion()?)
        } else if self.eat_kw("seq") {
            let m = self.braced_assertion()?;
            ProofTree::seq(m, self.proof_tree()?, self.proof_tree()?)
        } else if self.eat_kw("if") {
            let e = self.braced_expr()?;
            ProofTree::if_(e, self.proof_tree()?, self.proof_tree()?)
        } else if self.eat_kw("loop") {
            let p = self.braced_assertion()?;
            let i = self.braced_assertion()?;
            ProofTree::loop_(p, i, self.proof_tree()?, self.proof_tree()?)
        } else if self.eat_kw("conseq") {
            let p = self.braced_assertion()?;
            let q = self.braced_assertion()?;
            let rb = self.braced_assertion()?;
            let rc = self.braced_assertion()?;
            let c = self.proof_tree()?;
            ProofTree::conseq(c, p, q, rb, rc)
        } else {
            return self.error(format!("expected a rule name, found {}", self.peek()));
        };
        self.expect_sym(")")?;
        Ok(t)
    }
}

pub fn parse_tree(text: &str) -> Result<ProofTree> {
    let mut p = Parser::new(text)?;
    let t = p.proof_tree()?;
    p.expect_eof()?;
    Ok(t)
}
