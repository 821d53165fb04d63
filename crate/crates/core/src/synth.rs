//! Exact proofs from the collecting semantics.
//!
//! Every assertion produced here is a disjunction of complete state
//! descriptions, so the trees check by construction. Used to manufacture
//! valid premise proofs for random commands.

use std::collections::BTreeSet;

use crate::assertions::Assertion;
use crate::error::{Error, Result};
use crate::lang::{eval_expr, Command, Expr, Footprint, State};
use crate::proof::{branch_pres, ProofTree};

/// A finite set of states, by index.
pub type StateSet = BTreeSet<u64>;

/// Exit state sets of a command run from a set of states.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Exits {
    pub normal: StateSet,
    pub brk: StateSet,
    pub con: StateSet,
}

/// The assertion describing exactly the states in `set`.
pub fn describe(set: &StateSet, fp: &Footprint) -> Assertion {
    if set.is_empty() {
        return Assertion::False;
    }
    if set.len() as u128 == fp.state_count() {
        return Assertion::True;
    }
    Assertion::join_all(set.iter().map(|i| describe_state(&fp.state_at(*i))))
}

pub fn describe_state(s: &State) -> Assertion {
    let fp = s.footprint();
    fp.vars()
        .iter()
        .zip(s.values())
        .map(|(x, v)| Assertion::prog_eq(Expr::var(x), *v))
        .reduce(Assertion::and)
        .unwrap_or(Assertion::True)
}

fn runtime_error(c: &Command, s: &State) -> Error {
    Error::SideCondition { msg: format!("`{c}` errors from {s}"), witness: None }
}

/// Collecting semantics of `c` from every state in `from`.
pub fn collect(c: &Command, from: &StateSet, fp: &Footprint) -> Result<Exits> {
    let mut out = Exits::default();
    match c {
        Command::Skip => out.normal = from.clone(),
        Command::Break => out.brk = from.clone(),
        Command::Continue => out.con = from.clone(),
        Command::Assign(x, e) => {
            for i in from {
                let s = fp.state_at(*i);
                let v = eval_expr(e, &s).map_err(|_| runtime_error(c, &s))?;
                out.normal.insert(s.with(x, v).index());
            }
        }
        Command::Seq(a, b) => {
            let ea = collect(a, from, fp)?;
            let eb = collect(b, &ea.normal, fp)?;
            out = Exits {
                normal: eb.normal,
                brk: &ea.brk | &eb.brk,
                con: &ea.con | &eb.con,
            };
        }
        Command::If(e, a, b) => {
            let (t, f) = split(e, from, fp, c)?;
            let ea = collect(a, &t, fp)?;
            let eb = collect(b, &f, fp)?;
            out = Exits {
                normal: &ea.normal | &eb.normal,
                brk: &ea.brk | &eb.brk,
                con: &ea.con | &eb.con,
            };
        }
        Command::For(body, incr) => {
            let sets = loop_sets(body, incr, from, fp)?;
            out.normal = sets.exit;
        }
    }
    Ok(out)
}

fn split(e: &Expr, from: &StateSet, fp: &Footprint, c: &Command) -> Result<(StateSet, StateSet)> {
    let (mut t, mut f) = (StateSet::new(), StateSet::new());
    for i in from {
        let s = fp.state_at(*i);
        match eval_expr(e, &s) {
            Ok(0) => f.insert(*i),
            Ok(_) => t.insert(*i),
            Err(_) => return Err(runtime_error(c, &s)),
        };
    }
    Ok((t, f))
}

/// Reachable states of a loop: before the body, before the increment, and on exit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSets {
    pub head: StateSet,
    pub mid: StateSet,
    pub exit: StateSet,
}

pub fn loop_sets(body: &Command, incr: &Command, from: &StateSet, fp: &Footprint) -> Result<LoopSets> {
    let mut head = from.clone();
    let mut frontier = from.clone();
    let mut mid = StateSet::new();
    let mut exit = StateSet::new();
    while !frontier.is_empty() {
        let eb = collect(body, &frontier, fp)?;
        exit.extend(eb.brk);
        let new_mid: StateSet = eb.normal.union(&eb.con).copied().filter(|i| !mid.contains(i)).collect();
        mid.extend(new_mid.iter().copied());
        let ei = collect(incr, &new_mid, fp)?;
        if let Some(i) = ei.con.iter().next() {
            return Err(runtime_error(incr, &fp.state_at(*i)));
        }
        exit.extend(ei.brk);
        frontier = ei.normal.into_iter().filter(|i| !head.contains(i)).collect();
        head.extend(frontier.iter().copied());
    }
    Ok(LoopSets { head, mid, exit })
}

/// An exact proof of `{describe(from)} c {describe(normal), [describe(brk), describe(con)]}`.
pub fn synth_proof(c: &Command, from: &StateSet, fp: &Footprint) -> Result<(ProofTree, Exits)> {
    let pre = describe(from, fp);
    Ok(match c {
        Command::Skip => (ProofTree::RSkip(pre), collect(c, from, fp)?),
        Command::Break => (ProofTree::RBreak(pre), collect(c, from, fp)?),
        Command::Continue => (ProofTree::RContinue(pre), collect(c, from, fp)?),
        Command::Assign(x, e) => {
            let ex = collect(c, from, fp)?;
            let t = ProofTree::RAssign(x.clone(), e.clone(), describe(&ex.normal, fp));
            let t = ProofTree::conseq(t, pre, describe(&ex.normal, fp), Assertion::False, Assertion::False);
            (t, ex)
        }
        Command::Seq(a, b) => {
            let (ta, ea) = synth_proof(a, from, fp)?;
            let (tb, eb) = synth_proof(b, &ea.normal, fp)?;
            let ex = Exits { normal: eb.normal.clone(), brk: &ea.brk | &eb.brk, con: &ea.con | &eb.con };
            let (rb, rc) = (describe(&ex.brk, fp), describe(&ex.con, fp));
            let mid = describe(&ea.normal, fp);
            let ta = wrap_posts(ta, pre.clone(), mid.clone(), rb.clone(), rc.clone());
            let tb = wrap_posts(tb, mid.clone(), describe(&eb.normal, fp), rb, rc);
            (ProofTree::seq(mid, ta, tb), ex)
        }
        Command::If(e, a, b) => {
            let (t, f) = split(e, from, fp, c)?;
            let (ta, ea) = synth_proof(a, &t, fp)?;
            let (tb, eb) = synth_proof(b, &f, fp)?;
            let ex = Exits {
                normal: &ea.normal | &eb.normal,
                brk: &ea.brk | &eb.brk,
                con: &ea.con | &eb.con,
            };
            let (q, rb, rc) = (describe(&ex.normal, fp), describe(&ex.brk, fp), describe(&ex.con, fp));
            let (pt, pe) = branch_pres(&pre, e);
            let ta = wrap_posts(ta, pt, q.clone(), rb.clone(), rc.clone());
            let tb = wrap_posts(tb, pe, q, rb, rc);
            (ProofTree::if_(e.clone(), ta, tb), ex)
        }
        Command::For(body, incr) => {
            let sets = loop_sets(body, incr, from, fp)?;
            let (i1, i2, q) = (describe(&sets.head, fp), describe(&sets.mid, fp), describe(&sets.exit, fp));
            let (tb, _) = synth_proof(body, &sets.head, fp)?;
            let (ti, _) = synth_proof(incr, &sets.mid, fp)?;
            let tb = wrap_posts(tb, i1.clone(), i2.clone(), q.clone(), i2.clone());
            let ti = wrap_posts(ti, i2.clone(), i1.clone(), q.clone(), Assertion::False);
            let t = ProofTree::loop_(i1.clone(), i2, tb, ti);
            let t = wrap_posts(t, pre, q, Assertion::False, Assertion::False);
            (t, Exits { normal: sets.exit, ..Exits::default() })
        }
    })
}

fn wrap_posts(t: ProofTree, p: Assertion, q: Assertion, rb: Assertion, rc: Assertion) -> ProofTree {
    crate::extended::wrap(t, p, q, rb, rc).expect("synthesized trees are well formed")
}

/// States from which `c` runs without a runtime error, per the collecting semantics.
pub fn safe_states(c: &Command, fp: &Footprint) -> StateSet {
    (0..fp.state_count() as u64)
        .filter(|i| collect(c, &StateSet::from([*i]), fp).is_ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigstep::valid_big;
    use crate::lang::{gen_random_command, parse_command, Caps};
    use crate::proof::{check, conclusion};

    #[test]
    fn descriptions() {
        let fp = Footprint::new(&["x"], 2).unwrap();
        assert_eq!(describe(&StateSet::new(), &fp), Assertion::False);
        assert_eq!(describe(&StateSet::from([0, 1]), &fp), Assertion::True);
        assert_eq!(describe(&StateSet::from([1]), &fp).to_string(), "[x] = 1");
    }

    #[test]
    fn loop_sets_are_exact() {
        let fp = Footprint::new(&["x", "y"], 4).unwrap();
        let c = parse_command("for(;; x = x + 1) if x == 2 then break else skip").unwrap();
        let from = StateSet::from([fp.zero_state().index()]);
        let ex = collect(&c, &from, &fp).unwrap();
        assert_eq!(ex.normal, StateSet::from([fp.state(&[2, 0]).unwrap().index()]));
        let bad = parse_command("x = 1 / y").unwrap();
        assert!(collect(&bad, &from, &fp).is_err());
        assert_eq!(safe_states(&bad, &fp).len(), 12);
    }

    #[test]
    fn random_synthesized_proofs_check() {
        let fp = Footprint::new(&["x", "y"], 3).unwrap();
        let caps = Caps::default();
        for seed in 0..40 {
            let c = gen_random_command(seed, 8, &fp);
            let safe = safe_states(&c, &fp);
            let (t, _) = synth_proof(&c, &safe, &fp).unwrap();
            let r = check(&t, &fp, &caps).unwrap();
            assert!(r.ok, "{c}: {:?}", r.failures);
            let concl = conclusion(&t).unwrap();
            assert_eq!(concl.cmd, c);
            assert!(!valid_big(&concl, &fp, 2000, &caps).unwrap().is_counterexample());
        }
    }
}
