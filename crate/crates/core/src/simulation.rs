//! Simulation relations between (command, continuation) pairs, small-step
//! refinement, and the lifting of simulations to weakest preconditions and
//! guard predicates.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::assertions::{enumerate_envs, models, Assertion, Env, Verdict, Witness};
use crate::bigstep::Outcome;
use crate::error::{Error, Result};
use crate::lang::{enumerate_states, has_toplevel_continue, pretty, Caps, Cmd, Command, Expr, Footprint, State};
use crate::smallstep::{run_bounded, run_small, step, wp_run, Config, Cont, Frame, Posts, RunEnd, Step, WpEnd};

/// A program component: a command running under a continuation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Prog {
    pub cmd: Cmd,
    pub cont: Cont,
}

impl Prog {
    pub fn new(cmd: Command, cont: Cont) -> Prog {
        Prog { cmd: Arc::new(cmd), cont }
    }

    pub fn top(cmd: Command) -> Prog {
        Prog::new(cmd, Cont::empty())
    }

    fn at(&self, s: &State) -> Config {
        Config { cmd: self.cmd.clone(), cont: self.cont.clone(), state: s.clone() }
    }

    fn of(cfg: &Config) -> Prog {
        Prog { cmd: cfg.cmd.clone(), cont: cfg.cont.clone() }
    }
}

impl fmt::Display for Prog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", pretty(&self.cmd), self.cont)
    }
}

/// `lhs ∼ rhs`: the source `lhs` is simulated by the target `rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProgPair {
    pub lhs: Prog,
    pub rhs: Prog,
}

impl fmt::Display for ProgPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ~ {}", self.lhs, self.rhs)
    }
}

/// Which variant of the termination clause applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimMode {
    /// The target must reach the same terminal configuration.
    Wp,
    /// The target may instead diverge without changing the state.
    Guard,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationTable {
    pairs: Vec<ProgPair>,
    index: HashSet<ProgPair>,
    pub match_bound: usize,
    pub mode: SimMode,
}

impl RelationTable {
    pub fn new(match_bound: usize, mode: SimMode) -> RelationTable {
        RelationTable { pairs: Vec::new(), index: HashSet::new(), match_bound, mode }
    }

    /// Adds a pair; returns false if it was already present.
    pub fn insert(&mut self, p: ProgPair) -> bool {
        if self.index.insert(p.clone()) {
            self.pairs.push(p);
            true
        } else {
            false
        }
    }

    pub fn contains(&self, p: &ProgPair) -> bool {
        self.index.contains(p)
    }

    pub fn pairs(&self) -> &[ProgPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The same table with pair `i` replaced.
    pub fn with_pair(&self, i: usize, p: ProgPair) -> RelationTable {
        let mut out = RelationTable::new(self.match_bound, self.mode);
        for (j, q) in self.pairs.iter().enumerate() {
            out.insert(if i == j { p.clone() } else { q.clone() });
        }
        out
    }
}

impl fmt::Display for RelationTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.pairs {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Limits for the closure construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub match_bound: usize,
    pub max_pairs: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { match_bound: 6, max_pairs: 4096 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    Termination,
    Preservation,
    Error,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Termination => "Termination",
            Clause::Preservation => "Preservation",
            Clause::Error => "Error",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub pair: ProgPair,
    pub state: State,
    pub clause: Clause,
    /// The target's run that failed to match.
    pub trace: Vec<Config>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} violated at {} for {}", self.clause, self.state, self.pair)?;
        for c in &self.trace {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// The target's run from `start`, at most `n` steps, stopping early when it
/// leaves the machine.
fn target_path(start: &Config, n: usize) -> Vec<Config> {
    let mut out = vec![start.clone()];
    for _ in 0..n {
        match step(out.last().expect("non-empty")) {
            Step::Next(c) => out.push(c),
            _ => break,
        }
    }
    out
}

/// For a source step from `pair.lhs` at `s`, the source successor and the
/// target steps that match it in `rel`, if any.
pub fn match_trace(rel: &RelationTable, pair: &ProgPair, s: &State) -> Option<(Config, Vec<Config>)> {
    let Step::Next(l2) = step(&pair.lhs.at(s)) else {
        return None;
    };
    let path = target_path(&pair.rhs.at(s), rel.match_bound);
    let k = path.iter().position(|r| {
        r.state == l2.state && rel.contains(&ProgPair { lhs: Prog::of(&l2), rhs: Prog::of(r) })
    })?;
    Some((l2, path[..=k].to_vec()))
}

fn diverges_in_place(start: &Config, fuel: u64) -> bool {
    let mut seen = HashSet::new();
    let mut cur = start.clone();
    for _ in 0..fuel {
        if cur.state != start.state {
            return false;
        }
        if !seen.insert(cur.clone()) {
            return true;
        }
        match step(&cur) {
            Step::Next(n) => cur = n,
            _ => return false,
        }
    }
    false
}

fn check_pair(rel: &RelationTable, pair: &ProgPair, s: &State, fuel: u64) -> Option<Violation> {
    let violation = |clause, trace| Some(Violation { pair: pair.clone(), state: s.clone(), clause, trace });
    let target = pair.rhs.at(s);
    match step(&pair.lhs.at(s)) {
        Step::Terminal(..) => {
            let path = target_path(&target, rel.match_bound);
            let reached = path.iter().position(|r| r.cont.is_empty() && r.cmd == pair.lhs.cmd);
            let clean = reached.is_some_and(|k| path[..=k].iter().all(|r| r.state == *s));
            if clean || (rel.mode == SimMode::Guard && diverges_in_place(&target, fuel)) {
                None
            } else {
                violation(Clause::Termination, path)
            }
        }
        Step::Next(_) => match match_trace(rel, pair, s) {
            Some(_) => None,
            None => violation(Clause::Preservation, target_path(&target, rel.match_bound)),
        },
        Step::Stuck => match run_bounded(&target, fuel) {
            RunEnd::Stuck(_) => None,
            _ => violation(Clause::Error, target_path(&target, rel.match_bound)),
        },
    }
}

/// Checks the termination, preservation and error clauses for every pair
/// and every state of the footprint.
pub fn check_simulation(rel: &RelationTable, fp: &Footprint, fuel: u64, caps: &Caps) -> Result<SimReport> {
    caps.ensure(fp.state_count() * rel.len() as u128)?;
    let states = enumerate_states(fp, caps)?;
    let violations: Vec<Violation> = rel
        .pairs()
        .iter()
        .flat_map(|p| states.iter().filter_map(move |s| check_pair(rel, p, s, fuel)))
        .collect();
    Ok(SimReport { ok: violations.is_empty(), violations })
}

/// Closes `{initial}` under source steps: each source successor is paired
/// with the first target configuration, within the match bound, that
/// `related` accepts.
pub fn build_closure(
    initial: ProgPair,
    related: &dyn Fn(&Prog, &Prog) -> bool,
    mode: SimMode,
    fp: &Footprint,
    bounds: Bounds,
    caps: &Caps,
) -> Result<RelationTable> {
    let states = enumerate_states(fp, caps)?;
    let mut rel = RelationTable::new(bounds.match_bound, mode);
    let mut work = VecDeque::new();
    rel.insert(initial.clone());
    work.push_back(initial);
    while let Some(pair) = work.pop_front() {
        for s in &states {
            let Step::Next(l2) = step(&pair.lhs.at(s)) else { continue };
            let lp = Prog::of(&l2);
            let path = target_path(&pair.rhs.at(s), bounds.match_bound);
            if let Some(r) = path.iter().find(|r| r.state == l2.state && related(&lp, &Prog::of(r))) {
                let next = ProgPair { lhs: lp.clone(), rhs: Prog::of(r) };
                if rel.insert(next.clone()) {
                    if rel.len() > bounds.max_pairs {
                        return Err(Error::CapExceeded { needed: rel.len() as u128, cap: bounds.max_pairs as u64 });
                    }
                    work.push_back(next);
                }
            }
        }
    }
    Ok(rel)
}

/// `{(c, κ) ∼ (c, κ)}` over the components reachable from `(c, ε)`.
pub fn identity_table(c: &Command, fp: &Footprint, bounds: Bounds, caps: &Caps) -> Result<RelationTable> {
    let p = Prog::top(c.clone());
    build_closure(ProgPair { lhs: p.clone(), rhs: p }, &|a, b| a == b, SimMode::Wp, fp, bounds, caps)
}

fn seq(a: &Cmd, b: &Cmd) -> Cmd {
    Arc::new(Command::Seq(a.clone(), b.clone()))
}

fn arc(c: Command) -> Cmd {
    Arc::new(c)
}

/// The relation for `(if e then c1 else c2) ;; c3` against
/// `if e then c1 ;; c3 else c2 ;; c3`.
pub fn build_rel_ifseq(e: &Expr, c1: &Command, c2: &Command, c3: &Command, fp: &Footprint, bounds: Bounds, caps: &Caps) -> Result<RelationTable> {
    let (a, b, c) = (arc(c1.clone()), arc(c2.clone()), arc(c3.clone()));
    let src_if = arc(Command::If(e.clone(), a.clone(), b.clone()));
    let tgt = arc(Command::If(e.clone(), seq(&a, &c), seq(&b, &c)));
    let src = seq(&src_if, &c);
    let related = |l: &Prog, r: &Prog| {
        if l == r {
            return true;
        }
        if r.cmd != tgt {
            return false;
        }
        if l.cmd == src && l.cont == r.cont {
            return true;
        }
        let lf = l.cont.top_first();
        l.cmd == src_if && lf.first() == Some(&Frame::KSeq(c.clone())) && lf[1..] == r.cont.top_first()[..]
    };
    let initial = ProgPair { lhs: Prog { cmd: src.clone(), cont: Cont::empty() }, rhs: Prog { cmd: tgt.clone(), cont: Cont::empty() } };
    build_closure(initial, &related, SimMode::Wp, fp, bounds, caps)
}

/// Whether a `continue` raised by `c0` or by the frames of `k0` could travel
/// past the bottom of `k0`.
fn continue_escapes(c0: &Command, k0: &[Frame]) -> bool {
    let mut live = has_toplevel_continue(c0);
    for f in k0 {
        match f {
            Frame::KSeq(c) => live |= has_toplevel_continue(c),
            Frame::KLoop1(..) | Frame::KLoop2(..) => live = false,
        }
    }
    live
}

/// Does `l = κ0 · ls · κ` and `r = κ0 · rs · κ` for some `κ0`, `κ`?
fn split_match(c0: &Command, l: &[Frame], r: &[Frame], ls: &[Frame], rs: &[Frame], guard_k0: bool) -> bool {
    if l.len() < ls.len() || r.len() < rs.len() || l.len() - ls.len() != r.len() - rs.len() {
        return false;
    }
    (0..=l.len() - ls.len()).any(|i| {
        l[..i] == r[..i]
            && l[i..i + ls.len()] == *ls
            && r.len() >= i + rs.len()
            && r[i..i + rs.len()] == *rs
            && l[i + ls.len()..] == r[i + rs.len()..]
            && (!guard_k0 || !continue_escapes(c0, &l[..i]))
    })
}

/// The relation for `for(;; c2) c1` against `for(;; skip) (c1 ;; c2)`.
pub fn build_rel_loop_nocontinue(c1: &Command, c2: &Command, fp: &Footprint, bounds: Bounds, caps: &Caps) -> Result<RelationTable> {
    if has_toplevel_continue(c1) || has_toplevel_continue(c2) {
        return Err(Error::SideCondition { msg: "loop body or increment contains a continue".into(), witness: None });
    }
    let (a, b) = (arc(c1.clone()), arc(c2.clone()));
    let skip = arc(Command::Skip);
    let cont = arc(Command::Continue);
    let fused = seq(&a, &b);
    let f = arc(Command::For(a.clone(), b.clone()));
    let g = arc(Command::For(fused.clone(), skip.clone()));
    let l1 = Frame::KLoop1(a.clone(), b.clone());
    let l2 = Frame::KLoop2(a.clone(), b.clone());
    let l1f = Frame::KLoop1(fused.clone(), skip.clone());
    let l2f = Frame::KLoop2(fused.clone(), skip.clone());
    let kc = Frame::KSeq(cont.clone());
    let kb = Frame::KSeq(b.clone());
    let a_then_continue = seq(&a, &cont);
    let related = |l: &Prog, r: &Prog| {
        if l == r {
            return true;
        }
        let (lf, rf) = (l.cont.top_first(), r.cont.top_first());
        let same_cmd = l.cmd == r.cmd;
        let suffix = |n: usize, m: usize| lf.len() >= n && rf.len() >= m && lf[n..] == rf[m..];
        // (for(;; c2) c1, κ) ~ (for(;; skip) (c1 ;; c2), κ)
        if l.cmd == f && r.cmd == g && lf == rf {
            return true;
        }
        // (c1 ;; continue, KLoop1 · κ) ~ (c1, c2 · continue · KLoop1' · κ)
        if l.cmd == a_then_continue && r.cmd == a && lf.first() == Some(&l1) && rf.len() >= 3 && rf[..3] == [kb.clone(), kc.clone(), l1f.clone()] && suffix(1, 3) {
            return true;
        }
        // (continue, KLoop1 · κ) ~ (c2, continue · KLoop1' · κ)
        if *l.cmd == Command::Continue && r.cmd == b && lf.first() == Some(&l1) && rf.len() >= 2 && rf[..2] == [kc.clone(), l1f.clone()] && suffix(1, 2) {
            return true;
        }
        if same_cmd {
            let c0 = &*l.cmd;
            // (c0, κ0 · continue · KLoop1 · κ) ~ (c0, κ0 · c2 · continue · KLoop1' · κ)
            if split_match(c0, &lf, &rf, &[kc.clone(), l1.clone()], &[kb.clone(), kc.clone(), l1f.clone()], true) {
                return true;
            }
            // (c0, κ0 · KLoop2 · κ) ~ (c0, κ0 · continue · KLoop1' · κ)
            if split_match(c0, &lf, &rf, std::slice::from_ref(&l2), &[kc.clone(), l1f.clone()], true) {
                return true;
            }
            let plain = matches!(c0, Command::Skip | Command::Break);
            // (skip | break, KLoop2 · κ) ~ (skip | break, KLoop2' · κ)
            if plain && lf.first() == Some(&l2) && rf.first() == Some(&l2f) && suffix(1, 1) {
                return true;
            }
            // (break, KLoop1 · κ) ~ (break, KLoop1' · κ)
            if *c0 == Command::Break && lf.first() == Some(&l1) && rf.first() == Some(&l1f) && suffix(1, 1) {
                return true;
            }
        }
        false
    };
    let initial = ProgPair { lhs: Prog { cmd: f.clone(), cont: Cont::empty() }, rhs: Prog { cmd: g.clone(), cont: Cont::empty() } };
    build_closure(initial, &related, SimMode::Wp, fp, bounds, caps)
}

/// Pairs every component reachable from `(c, ε)` with the same component
/// running on top of `dead`. Guard mode: the target diverges where the
/// source terminates normally.
pub fn build_rel_dead(c: &Command, fp: &Footprint, bounds: Bounds, caps: &Caps) -> Result<RelationTable> {
    let dead = Frame::KSeq(arc(Command::dead()));
    let related = |l: &Prog, r: &Prog| {
        let (lf, rf) = (l.cont.top_first(), r.cont.top_first());
        l.cmd == r.cmd && rf.len() == lf.len() + 1 && rf[..lf.len()] == lf[..] && rf.last() == Some(&dead)
    };
    let initial = ProgPair {
        lhs: Prog::top(c.clone()),
        rhs: Prog::new(c.clone(), Cont::from_top_first(vec![dead.clone()])),
    };
    build_closure(initial, &related, SimMode::Guard, fp, bounds, caps)
}

/// Replaces the target of pair `i` by one that the checker must reject: a
/// terminated target where the source can get stuck, otherwise a stuck one.
pub fn mutate(rel: &RelationTable, i: usize, fp: &Footprint, caps: &Caps) -> Result<RelationTable> {
    let pair = &rel.pairs()[i];
    let states = enumerate_states(fp, caps)?;
    let can_stick = states.iter().any(|s| step(&pair.lhs.at(s)) == Step::Stuck);
    let rhs = if can_stick {
        Prog::top(Command::Skip)
    } else {
        let k = Cont::from_top_first(vec![Frame::loop2(Command::Skip, Command::Skip)]);
        Prog::new(Command::Continue, k)
    };
    Ok(rel.with_pair(i, ProgPair { lhs: pair.lhs.clone(), rhs }))
}

/// Small-step refinement: each terminal outcome and each error of `(c1, ε, σ)`
/// is one of `(c2, ε, σ)`.
pub fn refines_small(c1: &Command, c2: &Command, fp: &Footprint, fuel: u64, caps: &Caps) -> Result<Verdict> {
    let mut pending = Vec::new();
    for s in enumerate_states(fp, caps)? {
        let o1 = run_small(&Config::initial(c1, &s), fuel);
        if o1 == Outcome::OutOfFuel {
            continue;
        }
        let o2 = run_small(&Config::initial(c2, &s), fuel);
        if o2 == Outcome::OutOfFuel {
            pending.push(Witness::new(s, Env::new()));
        } else if o1 != o2 {
            let detail = format!("left gives {o1}, right gives {o2}");
            return Ok(Verdict::CounterExample(Witness::new(s, Env::new()).with_detail(detail)));
        }
    }
    Ok(if pending.is_empty() { Verdict::Holds } else { Verdict::Inconclusive(pending) })
}

fn posts_lvars(posts: &Posts, fp: &Footprint) -> Vec<String> {
    let mut out = Vec::new();
    for a in [&posts.normal, &posts.brk, &posts.con] {
        for n in a.free_lvars(fp) {
            if !out.contains(&n) {
                out.push(n);
            }
        }
    }
    out
}

/// For every pair `source ∼ target` and state: the target's weakest
/// precondition entails the source's.
pub fn lemma_wp_sim_check(rel: &RelationTable, posts: &Posts, fp: &Footprint, fuel: u64, caps: &Caps) -> Result<Verdict> {
    let states = enumerate_states(fp, caps)?;
    let envs = enumerate_envs(&posts_lvars(posts, fp), fp.modulus(), caps)?;
    let mut pending = Vec::new();
    for pair in rel.pairs() {
        for env in &envs {
            for s in &states {
                let tgt = wp_run(s, &pair.rhs.cmd, &pair.rhs.cont, posts, env, fuel);
                if tgt == WpEnd::Fails {
                    continue;
                }
                if wp_run(s, &pair.lhs.cmd, &pair.lhs.cont, posts, env, fuel) == WpEnd::Fails {
                    let w = Witness::new(s.clone(), env.clone()).with_detail(format!("{pair}"));
                    if tgt == WpEnd::Holds {
                        return Ok(Verdict::CounterExample(w));
                    }
                    pending.push(w);
                }
            }
        }
    }
    Ok(if pending.is_empty() { Verdict::Holds } else { Verdict::Inconclusive(pending) })
}

/// For every pair `source ∼ target`: `P guards target` implies `P guards source`.
pub fn lemma_guard_sim_check(rel: &RelationTable, p: &Assertion, fp: &Footprint, fuel: u64, caps: &Caps) -> Result<Verdict> {
    let mut pending = Vec::new();
    let ms = models(p, &p.free_lvars(fp), fp, caps)?;
    for pair in rel.pairs() {
        let target_safe: Vec<Option<bool>> = ms
            .iter()
            .map(|(s, _)| match run_bounded(&pair.rhs.at(s), fuel) {
                RunEnd::Stuck(_) => Some(false),
                RunEnd::Exhausted => None,
                _ => Some(true),
            })
            .collect();
        if target_safe.contains(&Some(false)) {
            continue;
        }
        for ((s, env), t) in ms.iter().zip(&target_safe) {
            if let RunEnd::Stuck(_) = run_bounded(&pair.lhs.at(s), fuel) {
                let w = Witness::new(s.clone(), env.clone()).with_detail(format!("{pair}"));
                if t.is_some() && !target_safe.contains(&None) {
                    return Ok(Verdict::CounterExample(w));
                }
                pending.push(w);
            }
        }
    }
    Ok(if pending.is_empty() { Verdict::Holds } else { Verdict::Inconclusive(pending) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_command, parse_expr};

    fn fp() -> Footprint {
        Footprint::new(&["x", "y"], 3).unwrap()
    }

    fn cmd(s: &str) -> Command {
        parse_command(s).unwrap()
    }

    fn ok(rel: &RelationTable) {
        let r = check_simulation(rel, &fp(), 200, &Caps::default()).unwrap();
        assert!(r.ok, "{}\n{}", rel, r.violations.iter().map(|v| v.to_string()).collect::<String>());
    }

    #[test]
    fn identity_is_a_simulation() {
        let rel = identity_table(&cmd("for(;; x = x + 1) if x == 2 then break else y = 1 / x"), &fp(), Bounds::default(), &Caps::default()).unwrap();
        assert!(rel.len() > 5);
        ok(&rel);
    }

    #[test]
    fn skip_against_break() {
        let mut rel = RelationTable::new(3, SimMode::Wp);
        rel.insert(ProgPair { lhs: Prog::top(Command::Skip), rhs: Prog::top(Command::Break) });
        let r = check_simulation(&rel, &fp(), 50, &Caps::default()).unwrap();
        assert!(!r.ok);
        assert_eq!(r.violations[0].clause, Clause::Termination);
    }

    #[test]
    fn ifseq_table() {
        let e = parse_expr("x").unwrap();
        let rel = build_rel_ifseq(&e, &cmd("break"), &cmd("x = 1 / y"), &cmd("y = y + 1"), &fp(), Bounds::default(), &Caps::default()).unwrap();
        ok(&rel);
        assert_eq!(rel.pairs()[0].lhs.cont, Cont::empty());
    }

    #[test]
    fn loop_nocontinue_table_and_intro_match() {
        let (c1, c2) = (cmd("if x == 2 then break else x = x + 1"), cmd("y = x"));
        let rel = build_rel_loop_nocontinue(&c1, &c2, &fp(), Bounds::default(), &Caps::default()).unwrap();
        ok(&rel);
        let (_, path) = match_trace(&rel, &rel.pairs()[0], &fp().zero_state()).unwrap();
        assert_eq!(path.len() - 1, 3);
        assert!(build_rel_loop_nocontinue(&cmd("continue"), &c2, &fp(), Bounds::default(), &Caps::default()).is_err());
    }

    #[test]
    fn dead_table_needs_guard_mode() {
        let rel = build_rel_dead(&cmd("x = 1 / y ;; if x then break else skip"), &fp(), Bounds::default(), &Caps::default()).unwrap();
        ok(&rel);
        let mut wp = rel.clone();
        wp.mode = SimMode::Wp;
        assert!(!check_simulation(&wp, &fp(), 200, &Caps::default()).unwrap().ok);
        let v = lemma_guard_sim_check(&rel, &Assertion::True, &fp(), 200, &Caps::default()).unwrap();
        assert!(v.holds(), "{v}");
    }

    #[test]
    fn mutations_are_caught() {
        let rel = build_rel_loop_nocontinue(&cmd("x = x / y"), &cmd("if x then break else skip"), &fp(), Bounds::default(), &Caps::default()).unwrap();
        for i in 0..rel.len() {
            let m = mutate(&rel, i, &fp(), &Caps::default()).unwrap();
            assert!(!check_simulation(&m, &fp(), 200, &Caps::default()).unwrap().ok, "pair {i}");
        }
    }

    #[test]
    fn lemmas_on_tables() {
        let caps = Caps::default();
        let rel = build_rel_loop_nocontinue(&cmd("y = 2 / x"), &cmd("if y then break else x = x + 1"), &fp(), Bounds::default(), &caps).unwrap();
        ok(&rel);
        let posts = Posts::new(crate::assertions::parse_assertion("[y] = 1").unwrap(), Assertion::False, Assertion::False);
        assert!(lemma_wp_sim_check(&rel, &posts, &fp(), 300, &caps).unwrap().holds());
        let bad = rel.with_pair(0, ProgPair { lhs: rel.pairs()[0].lhs.clone(), rhs: Prog::top(Command::Skip) });
        let v = lemma_wp_sim_check(&bad, &Posts::new(Assertion::True, Assertion::True, Assertion::True), &fp(), 300, &caps).unwrap();
        assert!(v.is_counterexample());
        let v = lemma_guard_sim_check(&bad, &Assertion::True, &fp(), 300, &caps).unwrap();
        assert!(v.is_counterexample());
    }

    #[test]
    fn small_step_refinement() {
        let caps = Caps::default();
        let c = cmd("for(;; y = y + 1) if x < y then break else x = x + 1");
        assert!(refines_small(&c, &c, &fp(), 300, &caps).unwrap().holds());
        assert!(refines_small(&Command::Skip, &Command::Break, &fp(), 10, &caps).unwrap().is_counterexample());
    }
}
