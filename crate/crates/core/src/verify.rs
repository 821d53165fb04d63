//! Forward symbolic execution over annotated programs. The executor builds
//! a proof tree whose consequence steps are the verification conditions;
//! once those are discharged the tree is emitted as a certificate.

use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::assertions::{entails, fresh_name, subst, ATerm, Assertion, Rel, Verdict};
use crate::error::{Error, Result};
use crate::extended;
use crate::lang::{has_toplevel_continue, Caps, Command, Expr, Footprint, Parser, Tok};
use crate::proof::{assign_pre, branch_pres, check, conclusion, parse_tree, pretty_tree, CheckReport, ProofTree, Triple};
use crate::smallstep::Posts;

/// A command with loop invariants and intermediate assertions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnnCommand {
    Skip,
    Break,
    Continue,
    Assign(String, Expr),
    Seq(Box<AnnCommand>, Box<AnnCommand>),
    If(Expr, Box<AnnCommand>, Box<AnnCommand>),
    /// `{inv: I1} {incr_inv: I2} for(;; incr) body`; `I1` holds before the
    /// body and `I2` before the increment.
    For {
        body: Box<AnnCommand>,
        incr: Box<AnnCommand>,
        inv: Option<Assertion>,
        incr_inv: Option<Assertion>,
    },
    /// `assert A`, which runs as `skip`.
    Assert(Assertion),
}

impl AnnCommand {
    pub fn seq(a: AnnCommand, b: AnnCommand) -> AnnCommand {
        AnnCommand::Seq(Box::new(a), Box::new(b))
    }

    /// The plain command, with `assert` read as `skip`.
    pub fn erase(&self) -> Command {
        match self {
            AnnCommand::Skip | AnnCommand::Assert(_) => Command::Skip,
            AnnCommand::Break => Command::Break,
            AnnCommand::Continue => Command::Continue,
            AnnCommand::Assign(x, e) => Command::Assign(x.clone(), e.clone()),
            AnnCommand::Seq(a, b) => Command::Seq(Arc::new(a.erase()), Arc::new(b.erase())),
            AnnCommand::If(e, a, b) => Command::If(e.clone(), Arc::new(a.erase()), Arc::new(b.erase())),
            AnnCommand::For { body, incr, .. } => Command::For(Arc::new(body.erase()), Arc::new(incr.erase())),
        }
    }

    /// The annotated command with no annotations.
    pub fn plain(c: &Command) -> AnnCommand {
        match c {
            Command::Skip => AnnCommand::Skip,
            Command::Break => AnnCommand::Break,
            Command::Continue => AnnCommand::Continue,
            Command::Assign(x, e) => AnnCommand::Assign(x.clone(), e.clone()),
            Command::Seq(a, b) => AnnCommand::seq(AnnCommand::plain(a), AnnCommand::plain(b)),
            Command::If(e, a, b) => AnnCommand::If(e.clone(), Box::new(AnnCommand::plain(a)), Box::new(AnnCommand::plain(b))),
            Command::For(a, b) => AnnCommand::For {
                body: Box::new(AnnCommand::plain(a)),
                incr: Box::new(AnnCommand::plain(b)),
                inv: None,
                incr_inv: None,
            },
        }
    }
}

impl Parser {
    pub fn ann_command(&mut self) -> Result<AnnCommand> {
        let first = self.ann_simple()?;
        if self.eat_sym(";;") {
            Ok(AnnCommand::seq(first, self.ann_command()?))
        } else {
            Ok(first)
        }
    }

    fn annotation(&mut self, key: &str) -> Result<Option<Assertion>> {
        if !self.at_sym("{") || *self.peek_at(1) != Tok::Ident(key.to_string()) {
            return Ok(None);
        }
        self.bump();
        self.bump();
        self.expect_sym(":")?;
        let a = self.assertion()?;
        self.expect_sym("}")?;
        Ok(Some(a))
    }

    fn ann_simple(&mut self) -> Result<AnnCommand> {
        if self.at_sym("{") {
            let inv = self.annotation("inv")?;
            let incr_inv = self.annotation("incr_inv")?;
            if inv.is_none() && incr_inv.is_none() {
                return self.error("expected `{inv: ...}` or `{incr_inv: ...}`");
            }
            if !self.at_kw("for") {
                return self.error("loop annotations must precede a `for`");
            }
            return match self.ann_simple()? {
                AnnCommand::For { body, incr, .. } => Ok(AnnCommand::For { body, incr, inv, incr_inv }),
                _ => unreachable!("`for` parses to a loop"),
            };
        }
        if self.eat_kw("assert") {
            return Ok(AnnCommand::Assert(self.assertion()?));
        }
        if self.eat_kw("skip") {
            return Ok(AnnCommand::Skip);
        }
        if self.eat_kw("break") {
            return Ok(AnnCommand::Break);
        }
        if self.eat_kw("continue") {
            return Ok(AnnCommand::Continue);
        }
        if self.eat_kw("if") {
            let e = self.expr()?;
            self.expect_kw("then")?;
            let a = self.ann_command()?;
            self.expect_kw("else")?;
            let b = self.ann_simple()?;
            return Ok(AnnCommand::If(e, Box::new(a), Box::new(b)));
        }
        if self.eat_kw("for") {
            self.expect_sym("(")?;
            self.expect_sym(";;")?;
            let incr = self.ann_command()?;
            self.expect_sym(")")?;
            let body = self.ann_simple()?;
            return Ok(AnnCommand::For { body: Box::new(body), incr: Box::new(incr), inv: None, incr_inv: None });
        }
        if self.eat_sym("(") {
            let c = self.ann_command()?;
            self.expect_sym(")")?;
            return Ok(c);
        }
        if let Tok::Ident(_) = self.peek() {
            let x = self.ident()?;
            self.expect_sym("=")?;
            return Ok(AnnCommand::Assign(x, self.expr()?));
        }
        self.error(format!("expected command, found {}", self.peek()))
    }
}

pub fn parse_annotated(text: &str) -> Result<AnnCommand> {
    let mut p = Parser::new(text)?;
    let c = p.ann_command()?;
    p.expect_eof()?;
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VcKind {
    /// Definedness and assignment steps; these hold whenever the program is safe.
    Safety,
    Entry,
    Incr,
    Continue,
    LoopBack,
    Assert,
    Exit,
}

impl fmt::Display for VcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Verification condition `lhs |- rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vc {
    pub kind: VcKind,
    pub lhs: Assertion,
    pub rhs: Assertion,
    pub origin: String,
}

impl Vc {
    /// Holds syntactically.
    pub fn is_trivial(&self) -> bool {
        self.lhs == self.rhs || self.lhs == Assertion::False || self.rhs == Assertion::True
    }
}

impl fmt::Display for Vc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {} |- {}", self.kind, self.origin, self.lhs, self.rhs)
    }
}

/// The goals left for the user: non-trivial conditions other than safety steps.
pub fn residual_goals(vcs: &[Vc]) -> Vec<&Vc> {
    vcs.iter().filter(|v| v.kind != VcKind::Safety && !v.is_trivial()).collect()
}

/// How a preprocessing step is enabled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Toggle {
    /// Applied where a heuristic says it helps.
    #[default]
    Auto,
    On,
    Off,
}

/// Preprocessing switches. Right-associating sequences is always on.
///
/// With `Auto`, `if_seq` distributes a trailing command into a conditional
/// when one branch is a bare `break` or `continue`, and `loop_nocontinue`
/// fuses a loop that has an invariant but no increment invariant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub if_seq: Toggle,
    pub loop_nocontinue: Toggle,
}

#[derive(Clone, Debug)]
pub struct SymOutput {
    pub tree: ProofTree,
    pub posts: Posts,
    pub vcs: Vec<Vc>,
}

struct Exec<'a> {
    fp: &'a Footprint,
    opts: Options,
    vcs: Vec<Vc>,
}

fn is_jump(c: &AnnCommand) -> bool {
    matches!(c, AnnCommand::Break | AnnCommand::Continue)
}

fn wrap(t: ProofTree, p: &Assertion, q: &Assertion, rb: &Assertion, rc: &Assertion) -> Result<ProofTree> {
    extended::wrap(t, p.clone(), q.clone(), rb.clone(), rc.clone())
}

impl Exec<'_> {
    fn vc(&mut self, kind: VcKind, lhs: &Assertion, rhs: &Assertion, origin: &str) {
        let v = Vc { kind, lhs: lhs.clone(), rhs: rhs.clone(), origin: origin.to_string() };
        if !v.is_trivial() {
            self.vcs.push(v);
        }
    }

    /// Strongest post of `x = e`: `exists v. [x] = [e[x := v]] /\ P[x := v]`.
    fn forward(&self, p: &Assertion, x: &str, e: &Expr) -> Assertion {
        match p {
            Assertion::False => Assertion::False,
            Assertion::Exists(n, body) if !self.fp.contains(n) => Assertion::exists(n, self.forward(body, x, e)),
            _ if !p.mentions_prog_var(x) && !e.mentions(x) => {
                Assertion::and(Assertion::cmp(Rel::Eq, ATerm::prog(Expr::var(x)), ATerm::prog(e.clone())), p.clone())
            }
            _ => {
                let names = p.names();
                let fp = self.fp;
                let v = fresh_name("v", &|n| names.iter().any(|m| m == n) || fp.contains(n));
                let old = Expr::var(&v);
                let eq = Assertion::cmp(Rel::Eq, ATerm::prog(Expr::var(x)), ATerm::prog(e.subst(x, &old)));
                Assertion::exists(&v, Assertion::and(eq, subst(p, x, &old)))
            }
        }
    }

    fn run(&mut self, c: &AnnCommand, p: &Assertion, path: &str) -> Result<(ProofTree, Posts)> {
        let f = Assertion::False;
        Ok(match c {
            AnnCommand::Skip => (ProofTree::RSkip(p.clone()), Posts::new(p.clone(), f.clone(), f)),
            AnnCommand::Break => (ProofTree::RBreak(p.clone()), Posts::new(f.clone(), p.clone(), f)),
            AnnCommand::Continue => (ProofTree::RContinue(p.clone()), Posts::new(f.clone(), f, p.clone())),
            AnnCommand::Assert(a) => {
                self.vc(VcKind::Assert, p, a, path);
                let t = wrap(ProofTree::RSkip(a.clone()), p, a, &f, &f)?;
                (t, Posts::new(a.clone(), f.clone(), f))
            }
            AnnCommand::Assign(x, e) => {
                let q = self.forward(p, x, e);
                self.vc(VcKind::Safety, p, &assign_pre(x, e, &q), path);
                let t = wrap(ProofTree::RAssign(x.clone(), e.clone(), q.clone()), p, &q, &f, &f)?;
                (t, Posts::new(q, f.clone(), f))
            }
            AnnCommand::Seq(a, b) => return self.run_seq(a, b, p, path),
            AnnCommand::If(e, a, b) => {
                if e.may_fail() {
                    self.vc(VcKind::Safety, p, &Assertion::defined(e), path);
                }
                let (pt, pe) = branch_pres(p, e);
                let (ta, qa) = self.run(a, &pt, &format!("{path}/then"))?;
                let (tb, qb) = self.run(b, &pe, &format!("{path}/else"))?;
                let posts = join_posts(&qa, &qb);
                let ta = wrap(ta, &pt, &posts.normal, &posts.brk, &posts.con)?;
                let tb = wrap(tb, &pe, &posts.normal, &posts.brk, &posts.con)?;
                (ProofTree::if_(e.clone(), ta, tb), posts)
            }
            AnnCommand::For { body, incr, inv, incr_inv } => return self.run_loop(body, incr, inv, incr_inv, p, path),
        })
    }

    fn run_seq(&mut self, a: &AnnCommand, b: &AnnCommand, p: &Assertion, path: &str) -> Result<(ProofTree, Posts)> {
        if let AnnCommand::Seq(a1, a2) = a {
            let flat = AnnCommand::seq((**a1).clone(), AnnCommand::seq((**a2).clone(), b.clone()));
            let (t, posts) = self.run(&flat, p, path)?;
            return Ok((extended::seq_assoc_inv(&t)?, posts));
        }
        if let AnnCommand::If(e, c1, c2) = a {
            let wanted = match self.opts.if_seq {
                Toggle::On => true,
                Toggle::Off => false,
                Toggle::Auto => is_jump(c1) || is_jump(c2),
            };
            if wanted {
                let dist = AnnCommand::If(
                    e.clone(),
                    Box::new(AnnCommand::seq((**c1).clone(), b.clone())),
                    Box::new(AnnCommand::seq((**c2).clone(), b.clone())),
                );
                let (t, posts) = self.run(&dist, p, path)?;
                return Ok((extended::if_seq(&t)?, posts));
            }
        }
        let (ta, qa) = self.run(a, p, &format!("{path}/left"))?;
        let (tb, qb) = self.run(b, &qa.normal, &format!("{path}/right"))?;
        let brk = Assertion::join(qa.brk.clone(), qb.brk.clone());
        let con = Assertion::join(qa.con.clone(), qb.con.clone());
        let ta = wrap(ta, p, &qa.normal, &brk, &con)?;
        let tb = wrap(tb, &qa.normal, &qb.normal, &brk, &con)?;
        Ok((ProofTree::seq(qa.normal.clone(), ta, tb), Posts::new(qb.normal, brk, con)))
    }

    fn run_loop(
        &mut self,
        body: &AnnCommand,
        incr: &AnnCommand,
        inv: &Option<Assertion>,
        incr_inv: &Option<Assertion>,
        p: &Assertion,
        path: &str,
    ) -> Result<(ProofTree, Posts)> {
        let no_continue = !has_toplevel_continue(&body.erase()) && !has_toplevel_continue(&incr.erase());
        let fuse = match self.opts.loop_nocontinue {
            Toggle::On => no_continue,
            Toggle::Off => false,
            Toggle::Auto => no_continue && incr_inv.is_none(),
        };
        match (inv, incr_inv) {
            (Some(i), _) if fuse => {
                let fused = AnnCommand::seq(body.clone(), incr.clone());
                let (t, posts) = self.run_annotated_loop(&fused, &AnnCommand::Skip, i, i, p, path)?;
                Ok((extended::loop_nocontinue(&t)?, posts))
            }
            (Some(i1), Some(i2)) => self.run_annotated_loop(body, incr, i1, i2, p, path),
            (None, None) => match body {
                AnnCommand::Seq(c1, rest) => match &**rest {
                    AnnCommand::Seq(mark, c2) if matches!(**mark, AnnCommand::Assert(_)) => {
                        let AnnCommand::Assert(i) = &**mark else { unreachable!() };
                        self.run_reordered_loop(c1, i, c2, incr, p, path)
                    }
                    _ => Err(missing(path)),
                },
                _ => Err(missing(path)),
            },
            _ => Err(missing(path)),
        }
    }

    fn run_annotated_loop(
        &mut self,
        body: &AnnCommand,
        incr: &AnnCommand,
        i1: &Assertion,
        i2: &Assertion,
        p: &Assertion,
        path: &str,
    ) -> Result<(ProofTree, Posts)> {
        let f = Assertion::False;
        self.vc(VcKind::Entry, p, i1, path);
        let (tb, qb) = self.run(body, i1, &format!("{path}/body"))?;
        self.vc(VcKind::Incr, &qb.normal, i2, &format!("{path}/body"));
        self.vc(VcKind::Continue, &qb.con, i2, &format!("{path}/body"));
        let (ti, qi) = self.run(incr, i2, &format!("{path}/incr"))?;
        self.vc(VcKind::LoopBack, &qi.normal, i1, &format!("{path}/incr"));
        self.vc(VcKind::Safety, &qi.con, &f, &format!("{path}/incr"));
        let q = Assertion::join(qb.brk.clone(), qi.brk.clone());
        let tb = wrap(tb, i1, i2, &q, i2)?;
        let ti = wrap(ti, i2, i1, &q, &f)?;
        let t = wrap(ProofTree::loop_(i1.clone(), i2.clone(), tb, ti), p, &q, &f, &f)?;
        Ok((t, Posts::new(q, f.clone(), f)))
    }

    /// `for(;; c3) (c1 ;; assert I ;; c2)`: `c1` from the precondition and
    /// the rotated body `c2 ;; c3 ;; c1` from `I` must both reach `I`.
    fn run_reordered_loop(
        &mut self,
        c1: &AnnCommand,
        i: &Assertion,
        c2: &AnnCommand,
        c3: &AnnCommand,
        p: &Assertion,
        path: &str,
    ) -> Result<(ProofTree, Posts)> {
        let f = Assertion::False;
        let (t1, q1) = self.run(c1, p, &format!("{path}/body/left"))?;
        self.vc(VcKind::Assert, &q1.normal, i, &format!("{path}/body/right"));
        self.vc(VcKind::Continue, &q1.con, &f, &format!("{path}/body/left"));
        let rotated = AnnCommand::seq(c2.clone(), AnnCommand::seq(c3.clone(), c1.clone()));
        let (tr, qr) = self.run(&rotated, i, &format!("{path}/rotated"))?;
        self.vc(VcKind::LoopBack, &qr.normal, i, &format!("{path}/rotated"));
        self.vc(VcKind::Continue, &qr.con, &f, &format!("{path}/rotated"));
        let q = Assertion::join(q1.brk.clone(), qr.brk.clone());
        let t1 = wrap(t1, p, i, &q, &f)?;
        let tr = wrap(tr, i, i, &q, &f)?;
        let t = extended::loop_reorder(&t1, &tr)?;
        Ok((t, Posts::new(q, f.clone(), f)))
    }
}

fn missing(path: &str) -> Error {
    Error::AnnotationMissing(format!("loop at {path} needs `{{inv: ..}}`, both invariants, or a body `c1 ;; assert I ;; c2`"))
}

fn join_posts(a: &Posts, b: &Posts) -> Posts {
    Posts::new(
        Assertion::join(a.normal.clone(), b.normal.clone()),
        Assertion::join(a.brk.clone(), b.brk.clone()),
        Assertion::join(a.con.clone(), b.con.clone()),
    )
}

/// Symbolically executes `c` from `p`. The tree concludes
/// `{p} erase(c) {posts}` and checks once every returned condition holds.
pub fn symexec(c: &AnnCommand, p: &Assertion, fp: &Footprint, opts: Options) -> Result<SymOutput> {
    let erased = c.erase();
    for x in erased.vars() {
        if !fp.contains(&x) {
            return Err(Error::Footprint(format!("variable `{x}` is not in the footprint")));
        }
    }
    let mut ex = Exec { fp, opts, vcs: Vec::new() };
    let (tree, posts) = ex.run(c, p, "root")?;
    Ok(SymOutput { tree, posts, vcs: ex.vcs })
}

/// Symbolic execution against a full specification: adds the exit
/// conditions and closes the tree over the specified triple.
pub fn symexec_spec(c: &AnnCommand, spec: &Spec, opts: Options) -> Result<SymOutput> {
    let mut out = symexec(c, &spec.pre, &spec.footprint, opts)?;
    let exits = [(&out.posts.normal, &spec.post), (&out.posts.brk, &spec.brk), (&out.posts.con, &spec.con)];
    for (lhs, rhs) in exits {
        let v = Vc { kind: VcKind::Exit, lhs: lhs.clone(), rhs: rhs.clone(), origin: "root".into() };
        if !v.is_trivial() {
            out.vcs.push(v);
        }
    }
    out.tree = extended::wrap(out.tree, spec.pre.clone(), spec.post.clone(), spec.brk.clone(), spec.con.clone())?;
    Ok(out)
}

/// Decides each condition by enumeration.
pub fn discharge(vcs: &[Vc], fp: &Footprint, caps: &Caps) -> Result<Vec<(Vc, Verdict)>> {
    vcs.iter().map(|v| Ok((v.clone(), entails(&v.lhs, &v.rhs, fp, caps)?))).collect()
}

/// Footprint and specified triple, read from `key: value` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spec {
    pub footprint: Footprint,
    pub pre: Assertion,
    pub post: Assertion,
    pub brk: Assertion,
    pub con: Assertion,
}

impl Spec {
    pub fn triple(&self, c: Command) -> Triple {
        Triple::new(self.pre.clone(), c, self.post.clone(), self.brk.clone(), self.con.clone())
    }
}

/// Keys: `vars`, `modulus` (default 8), `pre`, `post`, `break` and
/// `continue` (both default `false`). `#` starts a comment line.
pub fn parse_spec(text: &str) -> Result<Spec> {
    let mut vars: Option<Vec<String>> = None;
    let mut modulus = 8;
    let (mut pre, mut post) = (None, None);
    let (mut brk, mut con) = (Assertion::False, Assertion::False);
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Syntax { line: n + 1, col: 1, msg };
        let (key, value) = line.split_once(':').ok_or_else(|| err("expected `key: value`".into()))?;
        let value = value.trim();
        let assertion = || crate::assertions::parse_assertion(value).map_err(|e| err(format!("in `{}`: {e}", key.trim())));
        match key.trim() {
            "vars" => vars = Some(value.split_whitespace().map(str::to_string).collect()),
            "modulus" | "mod" => modulus = value.parse().map_err(|_| err(format!("bad modulus `{value}`")))?,
            "pre" => pre = Some(assertion()?),
            "post" => post = Some(assertion()?),
            "break" | "brk" => brk = assertion()?,
            "continue" | "con" => con = assertion()?,
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    let missing = |k: &str| Error::Syntax { line: 0, col: 0, msg: format!("spec is missing `{k}`") };
    let vars = vars.ok_or_else(|| missing("vars"))?;
    Ok(Spec {
        footprint: Footprint::new(&vars, modulus)?,
        pre: pre.ok_or_else(|| missing("pre"))?,
        post: post.ok_or_else(|| missing("post"))?,
        brk,
        con,
    })
}

/// A proof tree together with the footprint it checks on and a digest of
/// the sources it was produced from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub tree: ProofTree,
    pub footprint: Footprint,
    pub source_hash: String,
}

pub fn source_hash(program: &str, spec: &str) -> String {
    let mut h = Sha256::new();
    h.update(program.as_bytes());
    h.update(b"\n--\n");
    h.update(spec.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl Certificate {
    pub fn to_text(&self) -> String {
        format!(
            "certificate v1\nfootprint {} mod {}\nsource-hash {}\n{}\n",
            self.footprint.vars().join(" "),
            self.footprint.modulus(),
            self.source_hash,
            pretty_tree(&self.tree)
        )
    }

    pub fn conclusion(&self) -> Result<Triple> {
        conclusion(&self.tree)
    }

    pub fn check(&self, caps: &Caps) -> Result<CheckReport> {
        check(&self.tree, &self.footprint, caps)
    }
}

pub fn parse_certificate(text: &str) -> Result<Certificate> {
    let mut lines = text.splitn(4, '\n');
    let header = |n: usize, msg: &str| Error::Format(format!("line {n}: {msg}"));
    if lines.next().map(str::trim) != Some("certificate v1") {
        return Err(header(1, "expected `certificate v1`"));
    }
    let fp_line = lines.next().unwrap_or("");
    let words: Vec<&str> = fp_line.split_whitespace().collect();
    let footprint = match words.as_slice() {
        ["footprint", vars @ .., "mod", m] => {
            let m: u32 = m.parse().map_err(|_| header(2, "bad modulus"))?;
            Footprint::new(vars, m)?
        }
        _ => return Err(header(2, "expected `footprint <vars> mod <m>`")),
    };
    let source_hash = match lines.next().and_then(|l| l.trim().strip_prefix("source-hash ")) {
        Some(h) => h.trim().to_string(),
        None => return Err(header(3, "expected `source-hash <hex>`")),
    };
    let tree = parse_tree(lines.next().unwrap_or(""))?;
    Ok(Certificate { tree, footprint, source_hash })
}

/// Outcome of the verification pipeline.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub spec: Spec,
    pub vcs: Vec<(Vc, Verdict)>,
    /// Present when every condition holds and the tree checks.
    pub certificate: Option<Certificate>,
    pub check: Option<CheckReport>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.certificate.is_some()
    }

    pub fn failed(&self) -> impl Iterator<Item = &(Vc, Verdict)> {
        self.vcs.iter().filter(|(_, v)| !v.holds())
    }
}

/// Parse, symbolically execute, discharge, and emit a certificate.
pub fn verify_file(program: &str, spec_text: &str, opts: Options, caps: &Caps) -> Result<VerifyReport> {
    let spec = parse_spec(spec_text)?;
    let ac = parse_annotated(program)?;
    let out = symexec_spec(&ac, &spec, opts)?;
    let vcs = discharge(&out.vcs, &spec.footprint, caps)?;
    if vcs.iter().any(|(_, v)| !v.holds()) {
        return Ok(VerifyReport { spec, vcs, certificate: None, check: None });
    }
    let report = check(&out.tree, &spec.footprint, caps)?;
    let certificate = report.ok.then(|| Certificate {
        tree: out.tree,
        footprint: spec.footprint.clone(),
        source_hash: source_hash(program, spec_text),
    });
    Ok(VerifyReport { spec, vcs, certificate, check: Some(report) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assertions::parse_assertion;
    use crate::bigstep::valid_big;

    fn a(s: &str) -> Assertion {
        parse_assertion(s).unwrap()
    }

    #[test]
    fn annotated_parsing() {
        let c = parse_annotated("x = 0 ;; {inv: [x] <= 2} {incr_inv: true} for(;; x = x + 1) (assert true ;; skip)").unwrap();
        assert_eq!(c.erase(), crate::lang::parse_command("x = 0 ;; for(;; x = x + 1) (skip ;; skip)").unwrap());
        assert!(parse_annotated("{inv: true} skip").is_err());
        assert!(parse_annotated("{foo: true} for(;; skip) skip").is_err());
    }

    #[test]
    fn skip_from_p() {
        let fp = Footprint::new(&["x"], 4).unwrap();
        let out = symexec(&AnnCommand::Skip, &a("[x] = 1"), &fp, Options::default()).unwrap();
        assert_eq!(out.tree, ProofTree::RSkip(a("[x] = 1")));
        assert_eq!(out.posts.normal, a("[x] = 1"));
        assert!(out.vcs.is_empty());
    }

    #[test]
    fn trivial_spec_gives_one_node() {
        let r = verify_file("skip", "vars: x\npre: true\npost: true", Options::default(), &Caps::default()).unwrap();
        let cert = r.certificate.unwrap();
        assert_eq!(cert.tree.node_count(), 1);
        let back = parse_certificate(&cert.to_text()).unwrap();
        assert_eq!(back, cert);
    }

    #[test]
    fn bounded_counter() {
        let prog = "x = 0 ;; {inv: [x] <= 2} {incr_inv: [x] <= 1} for(;; x = x + 1) if x == 2 then break else skip";
        let spec = "vars: x y\nmodulus: 4\npre: true\npost: [x] = 2";
        let r = verify_file(prog, spec, Options::default(), &Caps::default()).unwrap();
        let cert = r.certificate.expect("verifies");
        let t = cert.conclusion().unwrap();
        assert!(valid_big(&t, &cert.footprint, 1000, &Caps::default()).unwrap().holds());
        let bad = "vars: x y\nmodulus: 4\npre: true\npost: [x] = 1";
        let r = verify_file(prog, bad, Options::default(), &Caps::default()).unwrap();
        assert!(!r.ok());
        assert_eq!(r.failed().next().unwrap().0.kind, VcKind::Exit);
    }

    #[test]
    fn missing_invariant() {
        let spec = parse_spec("vars: x\npre: true\npost: true").unwrap();
        let c = parse_annotated("for(;; skip) x = 1").unwrap();
        assert!(matches!(symexec_spec(&c, &spec, Options::default()), Err(Error::AnnotationMissing(_))));
    }

    #[test]
    fn spec_errors() {
        assert!(parse_spec("vars: x\npre: true").is_err());
        assert!(parse_spec("vars: x\nfoo: 1\npre: true\npost: true").is_err());
        assert!(matches!(parse_certificate("nope"), Err(Error::Format(_))));
    }
}
