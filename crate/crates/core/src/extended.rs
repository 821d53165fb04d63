//! Extended proof rules as proof-tree transformers.
//!
//! Every transformer is structural: it rearranges nodes and inserts
//! consequence steps, and [`crate::proof::check`] remains the judge of the
//! output. On checked inputs the outputs check.

use crate::assertions::{entails, Assertion, Verdict};
use crate::error::{Error, Result};
use crate::lang::{has_toplevel_continue, Caps, Command, Footprint, Value};
use crate::proof::{branch_pres, conclusion, ProofTree, Triple};

/// Premises recovered from a proof about `c1 ;; c2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitResult {
    pub mid: Assertion,
    pub left: ProofTree,
    pub right: ProofTree,
}

/// Premises recovered from a proof about `for(;; c2) c1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSplit {
    pub i1: Assertion,
    pub i2: Assertion,
    pub body: ProofTree,
    pub incr: ProofTree,
    /// `(P, I1)`: the loop precondition entails the body precondition.
    pub entry: (Assertion, Assertion),
}

fn shape<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Shape(msg.into()))
}

fn side<T>(msg: impl Into<String>, v: Option<Verdict>) -> Result<T> {
    let witness = match v {
        Some(Verdict::CounterExample(w)) => Some(w),
        _ => None,
    };
    Err(Error::SideCondition { msg: msg.into(), witness })
}

/// Consequence step to the given quadruple. Nested consequence steps are
/// collapsed, and a step that changes nothing is dropped.
pub fn wrap(t: ProofTree, p: Assertion, q: Assertion, rb: Assertion, rc: Assertion) -> Result<ProofTree> {
    let c = conclusion(&t)?;
    if (&c.pre, &c.post, &c.brk, &c.con) == (&p, &q, &rb, &rc) {
        return Ok(t);
    }
    let inner = match t {
        ProofTree::RConseq(child, ..) => *child,
        other => other,
    };
    let ic = conclusion(&inner)?;
    if (&ic.pre, &ic.post, &ic.brk, &ic.con) == (&p, &q, &rb, &rc) {
        return Ok(inner);
    }
    Ok(ProofTree::conseq(inner, p, q, rb, rc))
}

fn wrap_to(t: ProofTree, target: &Triple) -> Result<ProofTree> {
    wrap(t, target.pre.clone(), target.post.clone(), target.brk.clone(), target.con.clone())
}

/// The first syntax-directed node below any consequence steps.
fn core(t: &ProofTree) -> &ProofTree {
    match t {
        ProofTree::RConseq(c, ..) => core(c),
        other => other,
    }
}

pub fn inv_seq(t: &ProofTree) -> Result<SplitResult> {
    match t {
        ProofTree::RSeq(mid, l, r) => Ok(SplitResult { mid: mid.clone(), left: (**l).clone(), right: (**r).clone() }),
        ProofTree::RConseq(c, p, q, rb, rc) => {
            let s = inv_seq(c)?;
            let left = wrap(s.left, p.clone(), s.mid.clone(), rb.clone(), rc.clone())?;
            let right = wrap(s.right, s.mid.clone(), q.clone(), rb.clone(), rc.clone())?;
            Ok(SplitResult { mid: s.mid, left, right })
        }
        other => shape(format!("expected a proof about a sequence, found {}", other.rule_name())),
    }
}

/// Branch proofs `{P /\ 0 < [e]} c1 {..}` and `{P /\ [e] = 0} c2 {..}`.
pub fn inv_if(t: &ProofTree) -> Result<(ProofTree, ProofTree)> {
    match t {
        ProofTree::RIf(_, l, r) => Ok(((**l).clone(), (**r).clone())),
        ProofTree::RConseq(c, p, q, rb, rc) => {
            let e = match core(c) {
                ProofTree::RIf(e, ..) => e.clone(),
                other => return shape(format!("expected a proof about a conditional, found {}", other.rule_name())),
            };
            let (l, r) = inv_if(c)?;
            let (pt, pe) = branch_pres(p, &e);
            Ok((wrap(l, pt, q.clone(), rb.clone(), rc.clone())?, wrap(r, pe, q.clone(), rb.clone(), rc.clone())?))
        }
        other => shape(format!("expected a proof about a conditional, found {}", other.rule_name())),
    }
}

pub fn inv_loop(t: &ProofTree) -> Result<LoopSplit> {
    match t {
        ProofTree::RLoop(p, i, b, c) => Ok(LoopSplit {
            i1: p.clone(),
            i2: i.clone(),
            body: (**b).clone(),
            incr: (**c).clone(),
            entry: (p.clone(), p.clone()),
        }),
        ProofTree::RConseq(c, p, q, _, _) => {
            let s = inv_loop(c)?;
            let body = wrap(s.body, s.i1.clone(), s.i2.clone(), q.clone(), s.i2.clone())?;
            let incr = wrap(s.incr, s.i2.clone(), s.i1.clone(), q.clone(), Assertion::False)?;
            Ok(LoopSplit { entry: (p.clone(), s.i1.clone()), i1: s.i1, i2: s.i2, body, incr })
        }
        other => shape(format!("expected a proof about a loop, found {}", other.rule_name())),
    }
}

fn join(a: &Assertion, b: &Assertion) -> Assertion {
    Assertion::join(a.clone(), b.clone())
}

fn joined(a: &Triple, b: &Triple) -> Triple {
    Triple::new(join(&a.pre, &b.pre), a.cmd.clone(), join(&a.post, &b.post), join(&a.brk, &b.brk), join(&a.con, &b.con))
}

/// `{P1 \/ P2} c {Q1 \/ Q2, [Rb1 \/ Rb2, Rc1 \/ Rc2]}` from proofs of both
/// disjuncts. Disjunctions are formed with [`Assertion::join`].
pub fn merge_disj(t1: &ProofTree, t2: &ProofTree) -> Result<ProofTree> {
    let (a, b) = (conclusion(t1)?, conclusion(t2)?);
    if a.cmd != b.cmd {
        return shape(format!("cannot merge proofs about different commands `{}` and `{}`", a.cmd, b.cmd));
    }
    let target = joined(&a, &b);
    if t1 == t2 {
        return Ok(t1.clone());
    }
    let merged = merge_cores(core(t1), core(t2))?;
    wrap_to(merged, &target)
}

fn merge_cores(t1: &ProofTree, t2: &ProofTree) -> Result<ProofTree> {
    use ProofTree::*;
    Ok(match (t1, t2) {
        (RSkip(a), RSkip(b)) => RSkip(join(a, b)),
        (RBreak(a), RBreak(b)) => RBreak(join(a, b)),
        (RContinue(a), RContinue(b)) => RContinue(join(a, b)),
        (RAssign(x, e, q1), RAssign(_, _, q2)) => {
            let (a, b) = (conclusion(t1)?, conclusion(t2)?);
            let t = RAssign(x.clone(), e.clone(), join(q1, q2));
            wrap_to(t, &joined(&a, &b))?
        }
        (RSeq(m1, l1, r1), RSeq(m2, l2, r2)) => ProofTree::seq(join(m1, m2), merge_disj(l1, l2)?, merge_disj(r1, r2)?),
        (RIf(e, l1, r1), RIf(_, l2, r2)) => {
            let (a, b) = (conclusion(t1)?, conclusion(t2)?);
            let (pt, pe) = branch_pres(&join(&a.pre, &b.pre), e);
            let l = merge_disj(l1, l2)?;
            let r = merge_disj(r1, r2)?;
            let lc = conclusion(&l)?;
            let rc = conclusion(&r)?;
            ProofTree::if_(
                e.clone(),
                wrap(l, pt, lc.post, lc.brk, lc.con)?,
                wrap(r, pe, rc.post, rc.brk, rc.con)?,
            )
        }
        (RLoop(p1, i1, b1, c1), RLoop(p2, i2, b2, c2)) => {
            ProofTree::loop_(join(p1, p2), join(i1, i2), merge_disj(b1, b2)?, merge_disj(c1, c2)?)
        }
        _ => return shape(format!("cannot merge {} with {}", t1.rule_name(), t2.rule_name())),
    })
}

/// Finite instance of the existential rule: from proofs of
/// `{template[var := d]} c {Q, [R]}` for every `d` in the family, a proof of
/// `{exists var. guard /\ template} c {Q, [R]}` where the guard restricts
/// `var` to the family's domain.
pub fn ex_finite(var: &str, template: &Assertion, family: &[(Value, ProofTree)], fp: &Footprint) -> Result<ProofTree> {
    if family.is_empty() {
        return Err(Error::EmptyDomain);
    }
    if fp.contains(var) {
        return shape(format!("`{var}` is a program variable"));
    }
    let first = conclusion(&family[0].1)?;
    let mut acc: Option<ProofTree> = None;
    for (d, t) in family {
        let c = conclusion(t)?;
        if c.pre != template.instantiate(var, *d) {
            return shape(format!("proof for {var} = {d} has precondition {}", c.pre));
        }
        if (&c.cmd, &c.post, &c.brk, &c.con) != (&first.cmd, &first.post, &first.brk, &first.con) {
            return shape(format!("proof for {var} = {d} differs in its command or posts"));
        }
        acc = Some(match acc {
            None => t.clone(),
            Some(prev) => merge_disj(&prev, t)?,
        });
    }
    let mut domain: Vec<Value> = family.iter().map(|(d, _)| *d).collect();
    domain.sort_unstable();
    domain.dedup();
    let lv = crate::assertions::ATerm::lvar(var);
    let guard = if domain.len() as u32 == fp.modulus() {
        None
    } else if domain.iter().enumerate().all(|(i, d)| *d == i as Value) {
        let k = *domain.last().expect("non-empty");
        Some(Assertion::cmp(crate::assertions::Rel::Le, lv, crate::assertions::ATerm::Lit(k)))
    } else {
        Some(Assertion::join_all(
            domain.iter().map(|d| Assertion::cmp(crate::assertions::Rel::Eq, lv.clone(), crate::assertions::ATerm::Lit(*d))),
        ))
    };
    let body = match guard {
        Some(g) => Assertion::and(g, template.clone()),
        None => template.clone(),
    };
    let acc = acc.expect("non-empty family");
    let c = conclusion(&acc)?;
    wrap(acc, Assertion::exists(var, body), c.post, c.brk, c.con)
}

fn drop_continue_posts(t: &ProofTree) -> Result<ProofTree> {
    use ProofTree::*;
    Ok(match t {
        RSkip(_) | RBreak(_) | RAssign(..) | RLoop(..) => t.clone(),
        RContinue(_) => return side("command contains a continue outside any loop", None),
        RSeq(m, l, r) => ProofTree::seq(m.clone(), drop_continue_posts(l)?, drop_continue_posts(r)?),
        RIf(e, l, r) => ProofTree::if_(e.clone(), drop_continue_posts(l)?, drop_continue_posts(r)?),
        RConseq(c, p, q, rb, _) => ProofTree::conseq(drop_continue_posts(c)?, p.clone(), q.clone(), rb.clone(), Assertion::False),
    })
}

/// Replaces the continue post of a proof about a command without top-level `continue`.
pub fn nocontinue(t: &ProofTree, rc: &Assertion) -> Result<ProofTree> {
    let c = conclusion(t)?;
    if has_toplevel_continue(&c.cmd) {
        return side(format!("`{}` contains a continue outside any loop", c.cmd), None);
    }
    wrap(drop_continue_posts(t)?, c.pre, c.post, c.brk, rc.clone())
}

/// From a proof about `if e then c1 ;; c3 else c2 ;; c3`, one about
/// `(if e then c1 else c2) ;; c3` with the same conclusion.
pub fn if_seq(t: &ProofTree) -> Result<ProofTree> {
    let top = conclusion(t)?;
    let (e, c3) = match &top.cmd {
        Command::If(e, a, b) => match (&**a, &**b) {
            (Command::Seq(_, x), Command::Seq(_, y)) if x == y => (e.clone(), (**x).clone()),
            _ => return shape("both branches must end with the same command"),
        },
        other => return shape(format!("expected a conditional, found `{other}`")),
    };
    let (l, r) = inv_if(t)?;
    let sl = inv_seq(&l)?;
    let sr = inv_seq(&r)?;
    let (mid, tail) = if sl.mid == sr.mid {
        (sl.mid.clone(), sl.right)
    } else {
        (join(&sl.mid, &sr.mid), merge_disj(&sl.right, &sr.right)?)
    };
    debug_assert_eq!(conclusion(&tail)?.cmd, c3);
    let (pt, pe) = branch_pres(&top.pre, &e);
    let then_ = wrap(sl.left, pt, mid.clone(), top.brk.clone(), top.con.clone())?;
    let else_ = wrap(sr.left, pe, mid.clone(), top.brk.clone(), top.con.clone())?;
    let out = ProofTree::seq(mid, ProofTree::if_(e, then_, else_), tail);
    wrap_to(out, &top)
}

/// From a proof about `for(;; skip) (c1 ;; c2)`, one about `for(;; c2) c1`,
/// when neither command has a top-level `continue`.
pub fn loop_nocontinue(t: &ProofTree) -> Result<ProofTree> {
    let top = conclusion(t)?;
    let (c1, c2) = match &top.cmd {
        Command::For(body, incr) if **incr == Command::Skip => match &**body {
            Command::Seq(a, b) => ((**a).clone(), (**b).clone()),
            _ => return shape("loop body must be a sequence"),
        },
        other => return shape(format!("expected `for(;; skip) (c1 ;; c2)`, found `{other}`")),
    };
    if has_toplevel_continue(&c1) || has_toplevel_continue(&c2) {
        return side("loop body contains a continue outside any nested loop", None);
    }
    let q = core_loop_post(t)?;
    let ls = inv_loop(t)?;
    // skip inversion: the increment proof gives I2 |- I1
    let body = wrap(ls.body, ls.i1.clone(), ls.i1.clone(), q.clone(), ls.i1.clone())?;
    let s = inv_seq(&body)?;
    let b1 = nocontinue(&s.left, &s.mid)?;
    let b2 = nocontinue(&s.right, &Assertion::False)?;
    let lp = ProofTree::loop_(ls.i1.clone(), s.mid, b1, b2);
    wrap_to(lp, &top)
}

/// The normal post as seen by [`inv_loop`]: the outermost one.
fn core_loop_post(t: &ProofTree) -> Result<Assertion> {
    Ok(conclusion(t)?.post)
}

/// Peels the first iteration. `t1` proves `{P} c1 {P1, [Rb, P1]}`, `t2`
/// proves `{P1} c2 {P2, [Rb, _]}` and `t3` proves `{P2} for(;; c2) c1 {Q, [R]}`.
/// Requires `Rb |- Q` and that `c2` has no top-level `continue`.
pub fn loop_unroll1(t1: &ProofTree, t2: &ProofTree, t3: &ProofTree, fp: &Footprint, caps: &Caps) -> Result<ProofTree> {
    let (a, b, top) = (conclusion(t1)?, conclusion(t2)?, conclusion(t3)?);
    let (c1, c2) = match &top.cmd {
        Command::For(x, y) => ((**x).clone(), (**y).clone()),
        other => return shape(format!("expected a loop, found `{other}`")),
    };
    if a.cmd != c1 || b.cmd != c2 {
        return shape("first-iteration proofs do not match the loop body and increment");
    }
    if a.con != a.post || b.pre != a.post || b.brk != a.brk || b.post != top.pre {
        return shape("first-iteration proofs do not chain as {P} c1 {P1, [Rb, P1]} and {P1} c2 {P2, [Rb, _]}");
    }
    if has_toplevel_continue(&c2) {
        return side("the increment contains a continue outside any loop", None);
    }
    let q = top.post.clone();
    let v = entails(&a.brk, &q, fp, caps)?;
    if !v.holds() {
        return side(format!("break post {} does not entail the loop post {}", a.brk, q), Some(v));
    }
    let ls = inv_loop(t3)?;
    let first_body = wrap(t1.clone(), a.pre.clone(), a.post.clone(), q.clone(), a.post.clone())?;
    let body = merge_disj(&first_body, &ls.body)?;
    let first_incr = wrap(nocontinue(t2, &Assertion::False)?, b.pre.clone(), ls.i1.clone(), q.clone(), Assertion::False)?;
    let incr = merge_disj(&first_incr, &ls.incr)?;
    let inv = join(&a.pre, &ls.i1);
    let mid = join(&a.post, &ls.i2);
    let incr = wrap(incr, mid.clone(), inv.clone(), q.clone(), Assertion::False)?;
    let lp = ProofTree::loop_(inv, mid, body, incr);
    wrap(lp, a.pre, top.post, top.brk, top.con)
}

/// `(c1 ;; c2) ;; c3` to `c1 ;; (c2 ;; c3)`.
pub fn seq_assoc(t: &ProofTree) -> Result<ProofTree> {
    let top = conclusion(t)?;
    let outer = inv_seq(t)?;
    let inner = inv_seq(&outer.left)?;
    let out = ProofTree::seq(inner.mid, inner.left, ProofTree::seq(outer.mid, inner.right, outer.right));
    wrap_to(out, &top)
}

/// `c1 ;; (c2 ;; c3)` to `(c1 ;; c2) ;; c3`.
pub fn seq_assoc_inv(t: &ProofTree) -> Result<ProofTree> {
    let top = conclusion(t)?;
    let outer = inv_seq(t)?;
    let inner = inv_seq(&outer.right)?;
    let out = ProofTree::seq(inner.mid, ProofTree::seq(outer.mid, outer.left, inner.left), inner.right);
    wrap_to(out, &top)
}

/// Strengthens the precondition to `p`, which must entail the current one.
pub fn conseq_pre(t: &ProofTree, p: &Assertion, fp: &Footprint, caps: &Caps) -> Result<ProofTree> {
    let c = conclusion(t)?;
    let v = entails(p, &c.pre, fp, caps)?;
    if !v.holds() {
        return side(format!("{p} does not entail {}", c.pre), Some(v));
    }
    wrap(t.clone(), p.clone(), c.post, c.brk, c.con)
}

/// Loop proof for `for(;; c3) (c1 ;; skip ;; c2)` where the `skip` marks an
/// intermediate assertion `I`, from `{P} c1 {I, [Q, false]}` and
/// `{I} c2 ;; (c3 ;; c1) {I, [Q, false]}`. The two remaining loop invariants
/// are recovered by splitting the second proof.
pub fn loop_reorder(pre: &ProofTree, rotated: &ProofTree) -> Result<ProofTree> {
    let a = conclusion(pre)?;
    let r = conclusion(rotated)?;
    let i = a.post.clone();
    let q = a.brk.clone();
    if r.pre != i || r.post != i || r.brk != q || a.con != Assertion::False || r.con != Assertion::False {
        return shape("premises must be {P} c1 {I, [Q, false]} and {I} c2 ;; (c3 ;; c1) {I, [Q, false]}");
    }
    let s = inv_seq(rotated)?;
    let tail = inv_seq(&s.right)?;
    let (i2, c2proof) = (s.mid, s.left);
    let (i1, c3proof, c1proof) = (tail.mid, tail.left, tail.right);
    if conclusion(&c1proof)?.cmd != a.cmd {
        return shape("the rotated body must end with the first command");
    }
    let merged = merge_disj(pre, &c1proof)?;
    let inv = join(&a.pre, &i1);
    let marker = ProofTree::conseq(ProofTree::RSkip(i.clone()), i.clone(), i.clone(), q.clone(), Assertion::False);
    let body = ProofTree::seq(i.clone(), merged, ProofTree::seq(i.clone(), marker, c2proof));
    let body = wrap(body, inv.clone(), i2.clone(), q.clone(), i2.clone())?;
    let incr = wrap(c3proof, i2.clone(), inv.clone(), q.clone(), Assertion::False)?;
    let lp = ProofTree::loop_(inv, i2, body, incr);
    let c = conclusion(&lp)?;
    wrap(lp, a.pre, c.post, Assertion::False, Assertion::False)
}
