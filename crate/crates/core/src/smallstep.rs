//! Continuation-stack small-step machine, step-indexed weakest
//! preconditions, and continuation-guard validity.

use std::fmt;
use std::sync::Arc;

use crate::assertions::{enumerate_envs, models, satisfies, Assertion, Env, Witness};
use crate::bigstep::{Outcome, Verdict};
use crate::error::Result;
use crate::lang::{enumerate_states, eval_expr, pretty, BinOp, Caps, Cmd, Command, ExitKind, Expr, Footprint, State};
use crate::proof::Triple;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    KSeq(Cmd),
    /// Inside the loop body.
    KLoop1(Cmd, Cmd),
    /// Inside the increment.
    KLoop2(Cmd, Cmd),
}

impl Frame {
    pub fn seq(c: Command) -> Frame {
        Frame::KSeq(Arc::new(c))
    }

    pub fn loop1(c1: Command, c2: Command) -> Frame {
        Frame::KLoop1(Arc::new(c1), Arc::new(c2))
    }

    pub fn loop2(c1: Command, c2: Command) -> Frame {
        Frame::KLoop2(Arc::new(c1), Arc::new(c2))
    }

    fn mentions_continue(&self) -> bool {
        match self {
            Frame::KSeq(c) => crate::lang::has_toplevel_continue(c),
            // a loop frame only resumes its own body through `c1 ;; continue`
            Frame::KLoop1(..) | Frame::KLoop2(..) => false,
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::KSeq(c) => write!(f, "KSeq({})", pretty(c)),
            Frame::KLoop1(a, b) => write!(f, "KLoop1({}, {})", pretty(a), pretty(b)),
            Frame::KLoop2(a, b) => write!(f, "KLoop2({}, {})", pretty(a), pretty(b)),
        }
    }
}

/// Control stack. Stored with the innermost frame last; the public view is top first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Cont(Vec<Frame>);

impl Cont {
    pub fn empty() -> Cont {
        Cont(Vec::new())
    }

    pub fn from_top_first(frames: Vec<Frame>) -> Cont {
        let mut v = frames;
        v.reverse();
        Cont(v)
    }

    pub fn top_first(&self) -> Vec<Frame> {
        self.0.iter().rev().cloned().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn top(&self) -> Option<&Frame> {
        self.0.last()
    }

    pub fn push(&mut self, f: Frame) {
        self.0.push(f)
    }

    pub fn pop(&mut self) -> Option<Frame> {
        self.0.pop()
    }

    /// `self · rest`: the frames of `self` on top of `rest`.
    pub fn append(&self, rest: &Cont) -> Cont {
        let mut v = rest.0.clone();
        v.extend(self.0.iter().cloned());
        Cont(v)
    }

    /// True when no `KSeq` frame holds a `continue` outside a loop.
    pub fn no_continue(&self) -> bool {
        !self.0.iter().any(Frame::mentions_continue)
    }
}

impl fmt::Display for Cont {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fr in self.0.iter().rev() {
            write!(f, "{fr} · ")?;
        }
        write!(f, "ε")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub cmd: Cmd,
    pub cont: Cont,
    pub state: State,
}

impl Config {
    pub fn new(cmd: Command, cont: Cont, state: State) -> Config {
        Config { cmd: Arc::new(cmd), cont, state }
    }

    pub fn initial(cmd: &Command, state: &State) -> Config {
        Config::new(cmd.clone(), Cont::empty(), state.clone())
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", pretty(&self.cmd), self.cont, self.state)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Next(Config),
    Terminal(ExitKind, State),
    Stuck,
}

fn body_then_continue(c1: &Cmd) -> Cmd {
    Arc::new(Command::Seq(c1.clone(), Arc::new(Command::Continue)))
}

pub fn step(cfg: &Config) -> Step {
    let Config { cmd, cont, state } = cfg;
    let next = |c: Cmd, k: Cont, s: State| Step::Next(Config { cmd: c, cont: k, state: s });
    let popped = || {
        let mut k = cont.clone();
        let top = k.pop();
        (top, k)
    };
    match &**cmd {
        Command::Assign(x, e) => match eval_expr(e, state) {
            Ok(v) => next(Arc::new(Command::Skip), cont.clone(), state.with(x, v)),
            Err(_) => Step::Stuck,
        },
        Command::Seq(a, b) => {
            let mut k = cont.clone();
            k.push(Frame::KSeq(b.clone()));
            next(a.clone(), k, state.clone())
        }
        Command::If(e, a, b) => match eval_expr(e, state) {
            Ok(0) => next(b.clone(), cont.clone(), state.clone()),
            Ok(_) => next(a.clone(), cont.clone(), state.clone()),
            Err(_) => Step::Stuck,
        },
        Command::For(c1, c2) => {
            let mut k = cont.clone();
            k.push(Frame::KLoop1(c1.clone(), c2.clone()));
            next(body_then_continue(c1), k, state.clone())
        }
        Command::Skip => match popped() {
            (None, _) => Step::Terminal(ExitKind::Normal, state.clone()),
            (Some(Frame::KSeq(c)), k) => next(c, k, state.clone()),
            (Some(Frame::KLoop1(c1, c2)), mut k) => {
                k.push(Frame::KLoop2(c1, c2.clone()));
                next(c2, k, state.clone())
            }
            (Some(Frame::KLoop2(c1, c2)), mut k) => {
                k.push(Frame::KLoop1(c1.clone(), c2));
                next(body_then_continue(&c1), k, state.clone())
            }
        },
        Command::Break => match popped() {
            (None, _) => Step::Terminal(ExitKind::Brk, state.clone()),
            (Some(Frame::KSeq(_)), k) => next(cmd.clone(), k, state.clone()),
            (Some(Frame::KLoop1(..) | Frame::KLoop2(..)), k) => next(Arc::new(Command::Skip), k, state.clone()),
        },
        Command::Continue => match popped() {
            (None, _) => Step::Terminal(ExitKind::Con, state.clone()),
            (Some(Frame::KSeq(_)), k) => next(cmd.clone(), k, state.clone()),
            (Some(Frame::KLoop1(c1, c2)), mut k) => {
                k.push(Frame::KLoop2(c1, c2.clone()));
                next(c2, k, state.clone())
            }
            (Some(Frame::KLoop2(..)), _) => Step::Stuck,
        },
    }
}

/// What a bounded run of the machine established.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunEnd {
    Terminal(ExitKind, State),
    Stuck(Config),
    /// A configuration repeated, so the run diverges.
    Cycle,
    Exhausted,
}

/// Runs at most `fuel` steps, with Brent cycle detection.
pub fn run_bounded(cfg: &Config, fuel: u64) -> RunEnd {
    let mut cur = cfg.clone();
    let mut saved = cur.clone();
    let (mut power, mut lam) = (1u64, 0u64);
    for _ in 0..fuel {
        match step(&cur) {
            Step::Terminal(ek, s) => return RunEnd::Terminal(ek, s),
            Step::Stuck => return RunEnd::Stuck(cur),
            Step::Next(n) => cur = n,
        }
        if cur == saved {
            return RunEnd::Cycle;
        }
        lam += 1;
        if lam == power {
            saved = cur.clone();
            power *= 2;
            lam = 0;
        }
    }
    RunEnd::Exhausted
}

/// Iterates `step` at most `fuel` times.
pub fn run_small(cfg: &Config, fuel: u64) -> Outcome {
    match run_bounded(cfg, fuel) {
        RunEnd::Terminal(ek, s) => Outcome::Terminated(ek, s),
        RunEnd::Stuck(_) => Outcome::Error,
        RunEnd::Cycle | RunEnd::Exhausted => Outcome::OutOfFuel,
    }
}

/// The full step sequence from `cfg`, ending with the final `Step`.
pub fn trace(cfg: &Config, fuel: u64) -> (Vec<Config>, Option<Step>) {
    let mut out = vec![cfg.clone()];
    for _ in 0..fuel {
        match step(out.last().unwrap()) {
            Step::Next(n) => out.push(n),
            other => return (out, Some(other)),
        }
    }
    (out, None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Posts {
    pub normal: Assertion,
    pub brk: Assertion,
    pub con: Assertion,
}

impl Posts {
    pub fn new(normal: Assertion, brk: Assertion, con: Assertion) -> Posts {
        Posts { normal, brk, con }
    }

    pub fn get(&self, ek: ExitKind) -> &Assertion {
        match ek {
            ExitKind::Normal => &self.normal,
            ExitKind::Brk => &self.brk,
            ExitKind::Con => &self.con,
        }
    }
}

/// Three-way result of the indexed weakest precondition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WpEnd {
    /// Terminated in the matching post, or diverged safely.
    Holds,
    Fails,
    /// Neither settled within the index; the indexed WP still holds.
    Exhausted,
}

pub fn wp_run(s: &crate::lang::State, c: &Command, k: &Cont, posts: &Posts, env: &Env, n: u64) -> WpEnd {
    match run_bounded(&Config::new(c.clone(), k.clone(), s.clone()), n) {
        RunEnd::Terminal(ek, s2) => {
            if satisfies(&s2, env, posts.get(ek)) {
                WpEnd::Holds
            } else {
                WpEnd::Fails
            }
        }
        RunEnd::Stuck(_) => WpEnd::Fails,
        RunEnd::Cycle => WpEnd::Holds,
        RunEnd::Exhausted => WpEnd::Exhausted,
    }
}

/// `σ ⊨ WP_n (c, κ) {Q, [Rb, Rc]}` with free logic variables read from `env`.
///
/// Index 0 holds everywhere; at `n > 0` a terminal configuration must meet the
/// matching post, and a reducible one must satisfy the successor at `n - 1`.
pub fn wp_indexed(s: &State, c: &Command, k: &Cont, posts: &Posts, env: &Env, n: u64) -> bool {
    wp_run(s, c, k, posts, env, n) != WpEnd::Fails
}

/// `⊨_w {P} c {Q, [Rb, Rc]}` at index `fuel`.
pub fn valid_wp(t: &Triple, fp: &Footprint, fuel: u64, caps: &Caps) -> Result<Verdict> {
    let posts = t.posts();
    let mut pending = Vec::new();
    for (s, env) in models(&t.pre, &t.free_lvars(fp), fp, caps)? {
        match wp_run(&s, &t.cmd, &Cont::empty(), &posts, &env, fuel) {
            WpEnd::Holds => {}
            WpEnd::Fails => return Ok(Verdict::CounterExample(Witness::new(s, env))),
            WpEnd::Exhausted => pending.push(Witness::new(s, env)),
        }
    }
    Ok(if pending.is_empty() { Verdict::Holds } else { Verdict::Inconclusive(pending) })
}

/// `safe_n(c, κ, σ)`: no stuck configuration within `n` steps.
pub fn safe_indexed(c: &Command, k: &Cont, s: &State, n: u64) -> bool {
    !matches!(run_bounded(&Config::new(c.clone(), k.clone(), s.clone()), n), RunEnd::Stuck(_))
}

fn guards_env(p: &Assertion, c: &Command, k: &Cont, env: &Env, states: &[State], fuel: u64) -> Option<State> {
    states.iter().find(|s| satisfies(s, env, p) && !safe_indexed(c, k, s, fuel)).cloned()
}

/// `P guards (c, κ)`, with the free logic variables of `P` universally closed.
pub fn guards(p: &Assertion, c: &Command, k: &Cont, fp: &Footprint, fuel: u64, caps: &Caps) -> Result<Verdict> {
    for (s, env) in models(p, &p.free_lvars(fp), fp, caps)? {
        if !safe_indexed(c, k, &s, fuel) {
            return Ok(Verdict::CounterExample(Witness::new(s, env)));
        }
    }
    Ok(Verdict::Holds)
}

/// Boolean expression true exactly on the states satisfying `p` under `env`.
fn state_set_expr(p: &Assertion, env: &Env, fp: &Footprint, states: &[State]) -> Expr {
    let members: Vec<&State> = states.iter().filter(|s| satisfies(s, env, p)).collect();
    if members.len() == states.len() {
        return Expr::Const(1);
    }
    let disjuncts = members.iter().map(|s| {
        fp.vars()
            .iter()
            .zip(s.values())
            .map(|(x, v)| Expr::bin(BinOp::Eq, Expr::var(x), Expr::Const(*v)))
            .reduce(|a, b| Expr::bin(BinOp::And, a, b))
            .expect("footprints are non-empty")
    });
    disjuncts.reduce(|a, b| Expr::bin(BinOp::Or, a, b)).unwrap_or(Expr::Const(0))
}

/// Continuations that turn each postcondition into a safety check for fixed `env`:
/// `KSeq(check Q) · KLoop1(skip, check Rc) · KSeq(check Rb)`, where `check X`
/// diverges on `X`-states and divides by zero elsewhere.
pub fn probe_continuations(t: &Triple, fp: &Footprint, env: &Env, caps: &Caps) -> Result<Vec<Cont>> {
    let states = enumerate_states(fp, caps)?;
    let x = &fp.vars()[0];
    let crash = Command::assign(x, Expr::bin(BinOp::Div, Expr::var(x), Expr::Const(0)));
    let check = |a: &Assertion| Command::if_(state_set_expr(a, env, fp, &states), Command::dead(), crash.clone());
    Ok(vec![Cont::from_top_first(vec![
        Frame::seq(check(&t.post)),
        Frame::loop1(Command::Skip, check(&t.con)),
        Frame::seq(check(&t.brk)),
    ])])
}

/// Continuation validity over `family` plus the probe continuations.
///
/// The paper quantifies over every continuation; a `Holds` here is bounded by
/// the family, while a counterexample is genuine.
pub fn valid_cont(t: &Triple, fp: &Footprint, fuel: u64, family: &[Cont], caps: &Caps) -> Result<Verdict> {
    let states = enumerate_states(fp, caps)?;
    let lvars = t.free_lvars(fp);
    let skip = Command::Skip;
    for env in enumerate_envs(&lvars, fp.modulus(), caps)? {
        let probes = probe_continuations(t, fp, &env, caps)?;
        for k in family.iter().chain(probes.iter()) {
            let premise = guards_env(&t.post, &skip, k, &env, &states, fuel).is_none()
                && guards_env(&t.brk, &Command::Break, k, &env, &states, fuel).is_none()
                && guards_env(&t.con, &Command::Continue, k, &env, &states, fuel).is_none();
            if !premise {
                continue;
            }
            if let Some(s) = guards_env(&t.pre, &t.cmd, k, &env, &states, fuel) {
                return Ok(Verdict::CounterExample(Witness::new(s, env).with_detail(format!("continuation {k}"))));
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Commands available inside generated continuation frames.
fn pool(fp: &Footprint, size: usize) -> Vec<Vec<Command>> {
    let x = &fp.vars()[0];
    let mut by_size: Vec<Vec<Command>> = vec![Vec::new(); size + 1];
    if size >= 1 {
        by_size[1] = vec![
            Command::Skip,
            Command::Break,
            Command::Continue,
            Command::assign(x, Expr::bin(BinOp::Add, Expr::var(x), Expr::Const(1))),
        ];
    }
    for k in 3..=size {
        let mut out = Vec::new();
        for i in 1..k - 1 {
            let j = k - 1 - i;
            for a in &by_size[i] {
                for b in &by_size[j] {
                    out.push(Command::seq(a.clone(), b.clone()));
                    out.push(Command::if_(Expr::var(x), a.clone(), b.clone()));
                    out.push(Command::for_(a.clone(), b.clone()));
                }
            }
        }
        by_size[k] = out;
    }
    by_size
}

/// Every stack of at most `depth` frames whose frame weights sum to at most
/// `size`, plus `ε`. A `KSeq(c)` frame weighs `|c|`; a loop frame weighs the
/// larger of its two commands. Frame commands come from a fixed pool: `skip`,
/// `break`, `continue`, an increment of the first variable, and sequences,
/// conditionals on the first variable, and loops built from them.
pub fn enumerate_continuations(fp: &Footprint, depth: usize, size: usize, caps: &Caps) -> Result<Vec<Cont>> {
    caps.ensure(count_continuations(depth, size))?;
    let by_size = pool(fp, size);
    let mut frames_by_weight: Vec<Vec<Frame>> = vec![Vec::new(); size + 1];
    for w in 1..=size {
        for c in &by_size[w] {
            frames_by_weight[w].push(Frame::seq(c.clone()));
        }
        for wa in 1..=w {
            for wb in 1..=w {
                if wa.max(wb) != w {
                    continue;
                }
                for a in &by_size[wa] {
                    for b in &by_size[wb] {
                        frames_by_weight[w].push(Frame::loop1(a.clone(), b.clone()));
                        frames_by_weight[w].push(Frame::loop2(a.clone(), b.clone()));
                    }
                }
            }
        }
    }
    let mut out = vec![Cont::empty()];
    let mut layer: Vec<(Vec<Frame>, usize)> = vec![(Vec::new(), 0)];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (frames, used) in &layer {
            for w in 1..=size.saturating_sub(*used) {
                for fr in &frames_by_weight[w] {
                    let mut f = frames.clone();
                    f.push(fr.clone());
                    next.push((f, used + w));
                }
            }
        }
        out.extend(next.iter().map(|(f, _)| Cont::from_top_first(f.clone())));
        layer = next;
    }
    Ok(out)
}

/// Size of [`enumerate_continuations`] for the given bounds, by counting alone.
pub fn count_continuations(depth: usize, size: usize) -> u128 {
    // commands of each size: 4 leaves, 3 binary constructors
    let mut cmds = vec![0u128; size + 1];
    if size >= 1 {
        cmds[1] = 4;
    }
    for k in 3..=size {
        cmds[k] = (1..k - 1).map(|i| 3 * cmds[i] * cmds[k - 1 - i]).sum();
    }
    let upto = |w: usize| cmds[..=w].iter().sum::<u128>();
    let frames: Vec<u128> = (0..=size)
        .map(|w| if w == 0 { 0 } else { cmds[w] + 2 * (upto(w).pow(2) - upto(w - 1).pow(2)) })
        .collect();
    // stacks[d][u]: stacks with d frames and total weight u
    let mut total = 1u128;
    let mut layer = vec![0u128; size + 1];
    layer[0] = 1;
    for _ in 0..depth {
        let mut next = vec![0u128; size + 1];
        for (u, n) in layer.iter().enumerate() {
            for w in 1..=size - u {
                next[u + w] += n * frames[w];
            }
        }
        total += next.iter().sum::<u128>();
        layer = next;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assertions::parse_assertion;
    use crate::bigstep::eval_big;
    use crate::lang::parse_command;

    fn fp() -> Footprint {
        Footprint::new(&["x", "y", "z"], 8).unwrap()
    }

    fn cfg(c: &str, k: Vec<Frame>) -> Config {
        Config::new(parse_command(c).unwrap(), Cont::from_top_first(k), fp().zero_state())
    }

    #[test]
    fn loop_introduction() {
        let c = cfg("for(;; y = 1) x = 2", vec![]);
        let c1 = parse_command("x = 2").unwrap();
        let c2 = parse_command("y = 1").unwrap();
        assert_eq!(
            step(&c),
            Step::Next(Config::new(
                Command::seq(c1.clone(), Command::Continue),
                Cont::from_top_first(vec![Frame::loop1(c1, c2)]),
                fp().zero_state()
            ))
        );
    }

    #[test]
    fn control_rules() {
        let c = cfg("continue", vec![Frame::seq(Command::Skip)]);
        assert_eq!(step(&c), Step::Next(cfg("continue", vec![])));
        let c = cfg("continue", vec![Frame::loop2(Command::Skip, Command::Skip)]);
        assert_eq!(step(&c), Step::Stuck);
        let c = cfg("break", vec![Frame::loop2(Command::Skip, Command::Skip), Frame::seq(Command::Break)]);
        assert_eq!(step(&c), Step::Next(cfg("skip", vec![Frame::seq(Command::Break)])));
        assert_eq!(run_small(&cfg("break", vec![]), 10), Outcome::Terminated(ExitKind::Brk, fp().zero_state()));
    }

    #[test]
    fn step_count() {
        let (configs, last) = trace(&cfg("skip ;; skip", vec![]), 10);
        // two reductions, then the terminal check
        assert_eq!(configs.len() + 1, 4);
        assert_eq!(last, Some(Step::Terminal(ExitKind::Normal, fp().zero_state())));
        assert!(run_small(&cfg("skip ;; skip", vec![]), 3).is_conclusive());
        assert!(!run_small(&cfg("skip ;; skip", vec![]), 2).is_conclusive());
    }

    #[test]
    fn agrees_with_big_step_on_samples() {
        let fp = Footprint::new(&["x", "y", "z"], 4).unwrap();
        for seed in 0..200 {
            let c = crate::lang::gen_random_command(seed, 12, &fp);
            for s in enumerate_states(&fp, &Caps::default()).unwrap().iter().step_by(7) {
                let b = eval_big(&c, s, 400);
                let m = run_small(&Config::initial(&c, s), 4000);
                if b.is_conclusive() && m.is_conclusive() {
                    assert_eq!(b, m, "{c} from {s}");
                }
            }
        }
    }

    #[test]
    fn wp_and_guards() {
        let fp = fp();
        let caps = Caps::default();
        let s = fp.state(&[1, 0, 0]).unwrap();
        let posts = Posts::new(Assertion::True, Assertion::False, Assertion::False);
        let div = parse_command("z = x / y").unwrap();
        assert!(!wp_indexed(&s, &div, &Cont::empty(), &posts, &Env::new(), 5));
        assert!(wp_indexed(&s, &div, &Cont::empty(), &posts, &Env::new(), 0));
        assert!(wp_indexed(&s, &Command::dead(), &Cont::empty(), &posts, &Env::new(), 1000));
        assert!(!safe_indexed(&div, &Cont::empty(), &s, 1));
        assert!(safe_indexed(&Command::Continue, &Cont::empty(), &s, 3));
        assert!(safe_indexed(&Command::dead(), &Cont::empty(), &s, 10_000));
        let y0 = parse_assertion("[y] = 0").unwrap();
        assert!(guards(&Assertion::False, &div, &Cont::empty(), &fp, 10, &caps).unwrap().holds());
        assert!(guards(&Assertion::True, &Command::Skip, &Cont::empty(), &fp, 10, &caps).unwrap().holds());
        assert!(guards(&y0, &div, &Cont::empty(), &fp, 10, &caps).unwrap().is_counterexample());
    }

    #[test]
    fn continuation_validity() {
        let fp = Footprint::new(&["x", "y"], 4).unwrap();
        let caps = Caps::default();
        let eps = vec![Cont::empty()];
        let p = parse_assertion("[x] = 1").unwrap();
        let t = Triple::new(p.clone(), Command::Skip, p.clone(), Assertion::False, Assertion::False);
        assert!(valid_cont(&t, &fp, 100, &eps, &caps).unwrap().holds());
        let t = Triple::new(Assertion::True, Command::Break, Assertion::False, Assertion::True, Assertion::False);
        assert!(valid_cont(&t, &fp, 100, &eps, &caps).unwrap().holds());
        // wrong post, only visible through the probes
        let t = Triple::new(Assertion::True, Command::Skip, p, Assertion::False, Assertion::False);
        assert!(valid_cont(&t, &fp, 100, &eps, &caps).unwrap().is_counterexample());
    }

    #[test]
    fn continuation_family_shapes() {
        let fp = Footprint::new(&["x"], 2).unwrap();
        let caps = Caps::default();
        assert_eq!(enumerate_continuations(&fp, 0, 3, &caps).unwrap(), vec![Cont::empty()]);
        let fam = enumerate_continuations(&fp, 1, 1, &caps).unwrap();
        for fr in [
            Frame::seq(Command::Skip),
            Frame::loop1(Command::Skip, Command::Skip),
            Frame::loop2(Command::Skip, Command::Skip),
        ] {
            assert!(fam.contains(&Cont::from_top_first(vec![fr])));
        }
        for (d, s) in [(0, 0), (1, 1), (2, 1), (2, 2), (1, 3), (2, 3), (3, 2)] {
            assert_eq!(enumerate_continuations(&fp, d, s, &caps).unwrap().len() as u128, count_continuations(d, s));
        }
    }
}
