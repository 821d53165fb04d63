//! Seeded property suites.
//!
//! A suite is a list of properties. Each instance draws its commands from a
//! per-instance stream, derives every other random choice from a sub-seed,
//! and asks the oracles. A failing instance is shrunk on its commands, then
//! reported with the smallest failing state the oracle found.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assertions::{entails, states_satisfying, ATerm, ArithOp, Assertion, Env, Rel, Verdict};
use crate::bigstep::{eval_big, refines_big, valid_big};
use crate::error::{Error, Result};
use crate::extended;
use crate::lang::{
    enumerate_states, eval_expr, gen_command, gen_expr, has_toplevel_continue, pretty, Caps, Command, Expr, Footprint,
    GenConfig, State,
};
use crate::proof::{branch_pres, check, conclusion, ProofTree, Triple};
use crate::simulation::{
    build_rel_ifseq, build_rel_loop_nocontinue, check_simulation, lemma_guard_sim_check, lemma_wp_sim_check, mutate,
    refines_small, Bounds, RelationTable,
};
use crate::smallstep::{run_small, valid_wp, Config, Posts};
use crate::synth::{collect, describe, loop_sets, safe_states, synth_proof, Exits, StateSet};
use crate::verify::{discharge, parse_certificate, source_hash, symexec_spec, AnnCommand, Certificate, Options, Spec, Toggle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    /// Big-step and small-step outcomes agree.
    Semantics,
    /// The big-step and weakest-precondition validity oracles agree.
    Oracles,
    /// Each primary rule turns valid premises into a valid conclusion.
    Rules,
    /// Symbolic-execution certificates re-check and are never refuted.
    Certificates,
    /// Each extended-rule transformer yields a checking tree for the expected triple.
    Transformers,
    /// The if-seq and loop-nocontinue refinements, big-step and small-step.
    Refinements,
    /// Simulation tables, the two transfer lemmas, and mutation detection.
    Simulation,
    /// Big-step if-seq and nocontinue as implications between validities.
    Implications,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Semantics,
        Suite::Oracles,
        Suite::Rules,
        Suite::Certificates,
        Suite::Transformers,
        Suite::Refinements,
        Suite::Simulation,
        Suite::Implications,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Semantics => "semantics",
            Suite::Oracles => "oracles",
            Suite::Rules => "rules",
            Suite::Certificates => "certificates",
            Suite::Transformers => "transformers",
            Suite::Refinements => "refinements",
            Suite::Simulation => "simulation",
            Suite::Implications => "implications",
        }
    }

    /// Property labels, one per independent batch of instances.
    pub fn labels(self) -> Vec<&'static str> {
        cases(self).iter().map(|c| c.label).collect()
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub footprint: Footprint,
    pub fuel: u64,
    pub seed: u64,
    /// Instances per property.
    pub count: usize,
    /// Largest generated command.
    pub size: usize,
    pub caps: Caps,
    /// Worker threads; 0 means one per available core.
    pub workers: usize,
}

impl FuzzConfig {
    pub fn new(footprint: Footprint) -> FuzzConfig {
        FuzzConfig { footprint, fuel: 10_000, seed: 0, count: 100, size: 12, caps: Caps::default(), workers: 0 }
    }
}

/// A shrunk failing instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub label: &'static str,
    pub instance: usize,
    /// Seed of the instance's derived choices; replaying needs the commands too.
    pub sub_seed: u64,
    pub commands: Vec<Command>,
    pub original_size: usize,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} #{} (sub-seed {:#018x}): {}", self.label, self.instance, self.sub_seed, self.message)?;
        let size: usize = self.commands.iter().map(Command::size).sum();
        writeln!(f, "  shrunk from size {} to {}", self.original_size, size)?;
        for (i, c) in self.commands.iter().enumerate() {
            writeln!(f, "  c{} = {}", i + 1, pretty(c))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelStats {
    pub label: &'static str,
    pub passed: usize,
    /// Some oracle ran out of fuel; nothing was refuted.
    pub inconclusive: usize,
    /// No instance satisfying the property's preconditions turned up.
    pub skipped: usize,
    pub failed: usize,
}

impl LabelStats {
    /// Instances on which the property was evaluated.
    pub fn checked(&self) -> usize {
        self.passed + self.inconclusive + self.failed
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub labels: Vec<LabelStats>,
    pub findings: Vec<Finding>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn checked(&self) -> usize {
        self.labels.iter().map(LabelStats::checked).sum()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}: {} instances, {} violations", self.suite, self.checked(), self.findings.len())?;
        for l in &self.labels {
            writeln!(
                f,
                "  {:<16} passed {:>4}  inconclusive {:>4}  skipped {:>4}  failed {:>4}",
                l.label, l.passed, l.inconclusive, l.skipped, l.failed
            )?;
        }
        for x in &self.findings {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

enum Check {
    Pass,
    Inconclusive,
    Skip,
    Fail(String),
}

type Gen = fn(&mut ChaCha8Rng, &FuzzConfig) -> Vec<Command>;
type Prop = fn(&FuzzConfig, &[Command], &mut ChaCha8Rng) -> Result<Check>;

struct Case {
    label: &'static str,
    gen: Gen,
    prop: Prop,
}

const ATTEMPTS: u64 = 64;
const SHRINK_BUDGET: usize = 400;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

enum End {
    Pass,
    Inconclusive,
    Skipped,
    Fail(Finding),
}

fn run_prop(case: &Case, cfg: &FuzzConfig, cmds: &[Command], sub: u64) -> Result<Check> {
    match (case.prop)(cfg, cmds, &mut stream_rng(sub, 0)) {
        Err(e @ Error::CapExceeded { .. }) => Err(e),
        Err(e) => Ok(Check::Fail(e.to_string())),
        Ok(c) => Ok(c),
    }
}

fn run_instance(case: &Case, label_index: usize, i: usize, cfg: &FuzzConfig) -> Result<End> {
    for attempt in 0..ATTEMPTS {
        let mut rng = stream_rng(cfg.seed, ((label_index as u64) << 40) | ((i as u64) << 8) | attempt);
        let cmds = (case.gen)(&mut rng, cfg);
        let sub: u64 = rng.random();
        match run_prop(case, cfg, &cmds, sub)? {
            Check::Skip => continue,
            Check::Pass => return Ok(End::Pass),
            Check::Inconclusive => return Ok(End::Inconclusive),
            Check::Fail(msg) => {
                let original_size = cmds.iter().map(Command::size).sum();
                let (commands, message) = shrink(case, cfg, cmds, sub, msg)?;
                return Ok(End::Fail(Finding { label: case.label, instance: i, sub_seed: sub, commands, original_size, message }));
            }
        }
    }
    Ok(End::Skipped)
}

/// Greedy shrinking: replace one command by a smaller variant while the
/// property still fails.
fn shrink(case: &Case, cfg: &FuzzConfig, mut cur: Vec<Command>, sub: u64, mut msg: String) -> Result<(Vec<Command>, String)> {
    let mut budget = SHRINK_BUDGET;
    'outer: loop {
        for k in 0..cur.len() {
            for cand in smaller(&cur[k]) {
                if budget == 0 {
                    break 'outer;
                }
                budget -= 1;
                let mut next = cur.clone();
                next[k] = cand;
                if let Check::Fail(m) = run_prop(case, cfg, &next, sub)? {
                    cur = next;
                    msg = m;
                    continue 'outer;
                }
            }
        }
        break;
    }
    Ok((cur, msg))
}

/// Strictly smaller variants of `c`, smallest first.
pub fn smaller(c: &Command) -> Vec<Command> {
    let mut out = Vec::new();
    match c {
        Command::Skip => {}
        Command::Break | Command::Continue | Command::Assign(..) => out.push(Command::Skip),
        Command::Seq(a, b) | Command::If(_, a, b) | Command::For(a, b) => {
            out.push(Command::Skip);
            out.push((**a).clone());
            out.push((**b).clone());
            let rebuild = |x: Command, y: Command| match c {
                Command::Seq(..) => Command::seq(x, y),
                Command::If(e, ..) => Command::if_(e.clone(), x, y),
                _ => Command::for_(x, y),
            };
            for a2 in smaller(a) {
                out.push(rebuild(a2, (**b).clone()));
            }
            for b2 in smaller(b) {
                out.push(rebuild((**a).clone(), b2));
            }
        }
    }
    let n = c.size();
    out.retain(|x| x.size() < n);
    out.sort_by_key(Command::size);
    out.dedup();
    out
}

fn workers(cfg: &FuzzConfig) -> usize {
    if cfg.workers > 0 {
        cfg.workers
    } else {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    }
}

/// Instances `0..n` on a small worker pool; results come back in order.
fn par_instances(case: &Case, label_index: usize, cfg: &FuzzConfig) -> Result<Vec<End>> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<End>>>> = Mutex::new((0..cfg.count).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers(cfg).min(cfg.count.max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cfg.count {
                    break;
                }
                let r = run_instance(case, label_index, i, cfg);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every instance ran"))
        .collect()
}

/// Runs every property of `suite` on `cfg.count` instances.
pub fn run_suite(suite: Suite, cfg: &FuzzConfig) -> Result<SuiteReport> {
    run_labels(suite, cfg, |_| true)
}

/// Runs the properties of `suite` whose label passes `keep`.
pub fn run_labels(suite: Suite, cfg: &FuzzConfig, keep: impl Fn(&str) -> bool) -> Result<SuiteReport> {
    let mut report = SuiteReport { suite, labels: Vec::new(), findings: Vec::new() };
    for (li, case) in cases(suite).iter().enumerate() {
        if !keep(case.label) {
            continue;
        }
        let mut stats = LabelStats { label: case.label, ..LabelStats::default() };
        for end in par_instances(case, li, cfg)? {
            match end {
                End::Pass => stats.passed += 1,
                End::Inconclusive => stats.inconclusive += 1,
                End::Skipped => stats.skipped += 1,
                End::Fail(f) => {
                    stats.failed += 1;
                    report.findings.push(f);
                }
            }
        }
        report.labels.push(stats);
    }
    Ok(report)
}

fn cases(suite: Suite) -> Vec<Case> {
    let case = |label, gen, prop| Case { label, gen, prop };
    match suite {
        Suite::Semantics => vec![case("big-small", gen_one, prop_semantics)],
        Suite::Oracles => vec![case("big-wp", gen_one, prop_oracles)],
        Suite::Rules => vec![
            case("skip", gen_none, prop_rule_skip),
            case("break", gen_none, prop_rule_break),
            case("continue", gen_none, prop_rule_continue),
            case("assign", gen_assign, prop_rule_assign),
            case("seq", gen_two, prop_rule_seq),
            case("if", gen_two, prop_rule_if),
            case("loop", gen_two, prop_rule_loop),
            case("consequence", gen_one, prop_rule_conseq),
        ],
        Suite::Certificates => vec![case("symexec", gen_one, prop_certificate)],
        Suite::Transformers => vec![
            case("inv_seq", gen_two, prop_inv_seq),
            case("inv_loop", gen_two, prop_inv_loop),
            case("inv_if", gen_two, prop_inv_if),
            case("merge_disj", gen_one, prop_merge_disj),
            case("ex_finite", gen_one, prop_ex_finite),
            case("nocontinue", gen_one_nocontinue, prop_nocontinue),
            case("if_seq", gen_three, prop_if_seq),
            case("loop_nocontinue", gen_two_nocontinue, prop_loop_nocontinue),
            case("loop_unroll1", gen_two, prop_loop_unroll1),
            case("seq_assoc", gen_three, prop_seq_assoc),
            case("conseq_pre", gen_one, prop_conseq_pre),
        ],
        Suite::Refinements => vec![
            case("if-seq", gen_three, prop_refine_ifseq),
            case("loop-nocontinue", gen_two_nocontinue, prop_refine_loop),
        ],
        Suite::Simulation => vec![
            case("if-seq", gen_three_small, prop_sim_ifseq),
            case("loop-nocontinue", gen_two_small_nocontinue, prop_sim_loop),
        ],
        Suite::Implications => vec![
            case("if-seq", gen_three, prop_impl_ifseq),
            case("nocontinue", gen_one_nocontinue, prop_impl_nocontinue),
        ],
    }
}

// ---------------------------------------------------------------- generators

fn gen_cmd(rng: &mut ChaCha8Rng, fp: &Footprint, max: usize) -> Command {
    let max = max.max(1);
    let size = rng.random_range(max.div_ceil(2)..=max);
    gen_command(rng, size, fp, &GenConfig::default())
}

fn gen_cmd_without_continue(rng: &mut ChaCha8Rng, fp: &Footprint, max: usize) -> Command {
    for _ in 0..100 {
        let c = gen_cmd(rng, fp, max);
        if !has_toplevel_continue(&c) {
            return c;
        }
    }
    Command::Skip
}

fn gen_none(_: &mut ChaCha8Rng, _: &FuzzConfig) -> Vec<Command> {
    Vec::new()
}

fn gen_one(rng: &mut ChaCha8Rng, cfg: &FuzzConfig) -> Vec<Command> {
    vec![gen_cmd(rng, &cfg.footprint, cfg.size)]
}

fn gen_one_nocontinue(rng: &mut ChaCha8Rng, cfg: &FuzzConfig) -> Vec<Command> {
    vec![gen_cmd_without_continue(rng, &cfg.footprint, cfg.size)]
}

fn gen_assign(rng: &mut ChaCha8Rng, cfg: &FuzzConfig) -> Vec<Command> {
    let fp = &cfg.footprint;
    let x = fp.vars()[rng.random_range(0..fp.vars().len())].clone();
    vec![Command::assign(&x, gen_expr(rng, fp, 2, true))]
}

fn gen_two(rng: &mut ChaCha8Rng, cfg: &FuzzConfig) -> Vec<Command> {
    let half = (cfg.size / 2).max(1);
    vec![gen_cmd(rng, &cfg.footprint, half), gen_cmd(rng, &cfg.footprint, half)]
}

fn gen_two_nocontinue(rng: &mut ChaCha8Rng, cfg: &FuzzConfig) -> Vec<Command> {
    let half = (cfg.size / 2).max(1);
    vec![gen_cmd_without_continue(rng, &cfg.footprint, half), gen_cmd_without_continue(rng, &cfg.footprint, half)]
}

fn gen_three(rng: &mut ChaCha8Rng, cfg: &FuzzConfig) -> Vec<Command> {
    let third = (cfg.size / 3).max(1);
    (0..3).map(|_| gen_cmd(rng, &cfg.footprint, third)).collect()
}

fn gen_three_small(rng: &mut ChaCha8Rng, cfg: &FuzzConfig) -> Vec<Command> {
    let third = (cfg.size / 3).clamp(1, 3);
    (0..3).map(|_| gen_cmd(rng, &cfg.footprint, third)).collect()
}

fn gen_two_small_nocontinue(rng: &mut ChaCha8Rng, cfg: &FuzzConfig) -> Vec<Command> {
    let half = (cfg.size / 2).clamp(1, 4);
    vec![gen_cmd_without_continue(rng, &cfg.footprint, half), gen_cmd_without_continue(rng, &cfg.footprint, half)]
}

/// Random assertion without free logic variables.
pub fn gen_assertion<R: Rng>(rng: &mut R, fp: &Footprint, depth: u32) -> Assertion {
    gen_assertion_in(rng, fp, depth, false)
}

fn gen_assertion_in<R: Rng>(rng: &mut R, fp: &Footprint, depth: u32, bound: bool) -> Assertion {
    if depth == 0 || rng.random_bool(0.35) {
        if rng.random_bool(0.05) {
            return Assertion::True;
        }
        let rel = [Rel::Eq, Rel::Le, Rel::Lt][rng.random_range(0..3)];
        return Assertion::cmp(rel, gen_term(rng, fp, bound), gen_term(rng, fp, bound));
    }
    let d = depth - 1;
    match rng.random_range(0..10) {
        0..=3 => Assertion::and(gen_assertion_in(rng, fp, d, bound), gen_assertion_in(rng, fp, d, bound)),
        4..=6 => Assertion::or(gen_assertion_in(rng, fp, d, bound), gen_assertion_in(rng, fp, d, bound)),
        7 => Assertion::not(gen_assertion_in(rng, fp, d, bound)),
        _ if !bound => Assertion::exists("n", gen_assertion_in(rng, fp, d, true)),
        _ => gen_assertion_in(rng, fp, d, bound),
    }
}

fn gen_term<R: Rng>(rng: &mut R, fp: &Footprint, bound: bool) -> ATerm {
    let m = fp.modulus();
    match rng.random_range(0..10) {
        0..=5 => {
            let partial = rng.random_bool(0.15);
            ATerm::Prog(gen_expr(rng, fp, 1, partial))
        }
        8..=9 if bound => {
            let n = ATerm::lvar("n");
            match rng.random_range(0..3) {
                0 => n,
                1 => ATerm::arith(ArithOp::Add, n, ATerm::Lit(rng.random_range(0..m))),
                _ => ATerm::arith(ArithOp::Mul, n, ATerm::Prog(Expr::var(&fp.vars()[rng.random_range(0..fp.vars().len())]))),
            }
        }
        _ => ATerm::Lit(rng.random_range(0..m)),
    }
}

fn weaken(rng: &mut ChaCha8Rng, fp: &Footprint, a: Assertion) -> Assertion {
    if rng.random_bool(0.4) {
        Assertion::join(a, gen_assertion(rng, fp, 2))
    } else {
        a
    }
}

fn strengthen(rng: &mut ChaCha8Rng, fp: &Footprint, a: Assertion) -> Assertion {
    if rng.random_bool(0.6) {
        Assertion::meet(a, gen_assertion(rng, fp, 2))
    } else {
        a
    }
}

fn random_toggle(rng: &mut ChaCha8Rng) -> Toggle {
    [Toggle::Auto, Toggle::On, Toggle::Off][rng.random_range(0..3)]
}

// ------------------------------------------------------------------- helpers

fn state_set(p: &Assertion, cfg: &FuzzConfig) -> Result<StateSet> {
    Ok(states_satisfying(p, &Env::new(), &cfg.footprint, &cfg.caps)?.iter().map(State::index).collect())
}

/// A random precondition from whose states `c` runs without error.
fn safe_pre(rng: &mut ChaCha8Rng, cfg: &FuzzConfig, c: &Command) -> Result<Assertion> {
    let p = gen_assertion(rng, &cfg.footprint, 2);
    let from = state_set(&p, cfg)?;
    let safe = safe_states(c, &cfg.footprint);
    Ok(if from.is_subset(&safe) { p } else { Assertion::meet(p, describe(&safe, &cfg.footprint)) })
}

/// Exact proof of `c` with precondition `p`, or `None` when `c` can fail
/// from a state of `p`.
fn prove(cfg: &FuzzConfig, c: &Command, p: &Assertion) -> Result<Option<(ProofTree, Exits)>> {
    let from = state_set(p, cfg)?;
    match synth_proof(c, &from, &cfg.footprint) {
        Ok((t, ex)) => {
            let k = conclusion(&t)?;
            Ok(Some((extended::wrap(t, p.clone(), k.post, k.brk, k.con)?, ex)))
        }
        Err(Error::SideCondition { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// A valid proof about `c` from a random precondition, posts loosened at random.
fn premise(rng: &mut ChaCha8Rng, cfg: &FuzzConfig, c: &Command) -> Result<Option<ProofTree>> {
    let fp = &cfg.footprint;
    let p = safe_pre(rng, cfg, c)?;
    let Some((t, ex)) = prove(cfg, c, &p)? else {
        return Ok(None);
    };
    let q = weaken(rng, fp, describe(&ex.normal, fp));
    let rb = weaken(rng, fp, describe(&ex.brk, fp));
    let rc = weaken(rng, fp, describe(&ex.con, fp));
    Ok(Some(extended::wrap(t, p, q, rb, rc)?))
}

fn random_triple(rng: &mut ChaCha8Rng, fp: &Footprint, c: &Command) -> Triple {
    Triple::new(gen_assertion(rng, fp, 2), c.clone(), gen_assertion(rng, fp, 2), gen_assertion(rng, fp, 1), gen_assertion(rng, fp, 1))
}

/// A valid triple about `c` most of the time, otherwise an arbitrary one.
fn likely_valid_triple(rng: &mut ChaCha8Rng, cfg: &FuzzConfig, c: &Command) -> Result<Triple> {
    if rng.random_bool(0.7) {
        if let Some(t) = premise(rng, cfg, c)? {
            return conclusion(&t);
        }
    }
    Ok(random_triple(rng, &cfg.footprint, c))
}

fn judge(verdicts: &[(&str, Verdict)], subject: &dyn fmt::Display) -> Check {
    for (what, v) in verdicts {
        if let Verdict::CounterExample(w) = v {
            return Check::Fail(format!("{what} refutes {subject}: {w}"));
        }
    }
    if verdicts.iter().all(|(_, v)| v.holds()) {
        Check::Pass
    } else {
        Check::Inconclusive
    }
}

/// Premises must be oracle-valid before a rule is applied to them.
fn premises_hold(cfg: &FuzzConfig, trees: &[&ProofTree]) -> Result<Option<Check>> {
    let mut pending = false;
    for t in trees {
        match valid_big(&conclusion(t)?, &cfg.footprint, cfg.fuel, &cfg.caps)? {
            Verdict::Holds => {}
            Verdict::CounterExample(_) => return Ok(Some(Check::Skip)),
            Verdict::Inconclusive(_) => pending = true,
        }
    }
    Ok(pending.then_some(Check::Inconclusive))
}

/// `t` checks, concludes `expected` when given, and both oracles accept the conclusion.
fn conclude(cfg: &FuzzConfig, t: &ProofTree, expected: Option<&Triple>, wp: bool) -> Result<Check> {
    let r = check(t, &cfg.footprint, &cfg.caps)?;
    if !r.ok {
        return Ok(Check::Fail(format!("tree does not check: {}", r.failures[0])));
    }
    let got = conclusion(t)?;
    if let Some(e) = expected {
        if &got != e {
            return Ok(Check::Fail(format!("concludes {got}, expected {e}")));
        }
    }
    let mut vs = vec![("big-step", valid_big(&got, &cfg.footprint, cfg.fuel, &cfg.caps)?)];
    if wp {
        vs.push(("wp", valid_wp(&got, &cfg.footprint, cfg.fuel, &cfg.caps)?));
    }
    Ok(judge(&vs, &got))
}

fn with_posts(t: ProofTree, p: &Assertion, q: &Assertion, rb: &Assertion, rc: &Assertion) -> Result<ProofTree> {
    extended::wrap(t, p.clone(), q.clone(), rb.clone(), rc.clone())
}

fn union(a: &StateSet, b: &StateSet) -> StateSet {
    a | b
}

macro_rules! some_or_skip {
    ($e:expr) => {
        match $e {
            Some(x) => x,
            None => return Ok(Check::Skip),
        }
    };
}

macro_rules! gate {
    ($cfg:expr, $trees:expr) => {
        if let Some(c) = premises_hold($cfg, $trees)? {
            return Ok(c);
        }
    };
}

// ----------------------------------------------------------------- semantics

fn prop_semantics(cfg: &FuzzConfig, cs: &[Command], _: &mut ChaCha8Rng) -> Result<Check> {
    let c = &cs[0];
    for s in enumerate_states(&cfg.footprint, &cfg.caps)? {
        let big = eval_big(c, &s, cfg.fuel);
        let small = run_small(&Config::initial(c, &s), cfg.fuel);
        if big == small {
            continue;
        }
        // one side ran out of fuel: give both a much larger budget
        let (big, small) = if big.is_conclusive() && small.is_conclusive() {
            (big, small)
        } else {
            (eval_big(c, &s, cfg.fuel * 100), run_small(&Config::initial(c, &s), cfg.fuel * 100))
        };
        if big != small {
            return Ok(Check::Fail(format!("from {s}: big-step {big}, small-step {small}")));
        }
    }
    Ok(Check::Pass)
}

fn prop_oracles(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let t = likely_valid_triple(rng, cfg, &cs[0])?;
    let b = valid_big(&t, &cfg.footprint, cfg.fuel, &cfg.caps)?;
    let w = valid_wp(&t, &cfg.footprint, cfg.fuel, &cfg.caps)?;
    if !b.is_conclusive() || !w.is_conclusive() {
        return Ok(Check::Inconclusive);
    }
    if b.holds() != w.holds() {
        return Ok(Check::Fail(format!("{t}: big-step says {b}, wp says {w}")));
    }
    Ok(Check::Pass)
}

// --------------------------------------------------------------------- rules

fn axiom(cfg: &FuzzConfig, rng: &mut ChaCha8Rng, mk: fn(Assertion) -> ProofTree) -> Result<Check> {
    let t = mk(gen_assertion(rng, &cfg.footprint, 2));
    conclude(cfg, &t, None, true)
}

fn prop_rule_skip(cfg: &FuzzConfig, _: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    axiom(cfg, rng, ProofTree::RSkip)
}

fn prop_rule_break(cfg: &FuzzConfig, _: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    axiom(cfg, rng, ProofTree::RBreak)
}

fn prop_rule_continue(cfg: &FuzzConfig, _: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    axiom(cfg, rng, ProofTree::RContinue)
}

fn prop_rule_assign(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let Command::Assign(x, e) = &cs[0] else {
        return Ok(Check::Skip);
    };
    let q = gen_assertion(rng, &cfg.footprint, 2);
    conclude(cfg, &ProofTree::RAssign(x.clone(), e.clone(), q), None, true)
}

fn prop_rule_seq(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let fp = &cfg.footprint;
    let (c1, c2) = (&cs[0], &cs[1]);
    let whole = Command::seq(c1.clone(), c2.clone());
    let p = safe_pre(rng, cfg, &whole)?;
    let (t1, e1) = some_or_skip!(prove(cfg, c1, &p)?);
    let mid = describe(&e1.normal, fp);
    let mid = if rng.random_bool(0.3) { weaken(rng, fp, mid) } else { mid };
    // a loosened midpoint may admit states `c2` fails from
    let (t2, e2) = some_or_skip!(prove(cfg, c2, &mid)?);
    let q = weaken(rng, fp, describe(&e2.normal, fp));
    let rb = weaken(rng, fp, describe(&union(&e1.brk, &e2.brk), fp));
    let rc = weaken(rng, fp, describe(&union(&e1.con, &e2.con), fp));
    let t1 = with_posts(t1, &p, &mid, &rb, &rc)?;
    let t2 = with_posts(t2, &mid, &q, &rb, &rc)?;
    gate!(cfg, &[&t1, &t2]);
    let t = ProofTree::seq(mid, t1, t2);
    conclude(cfg, &t, Some(&Triple::new(p, whole, q, rb, rc)), true)
}

fn prop_rule_if(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let fp = &cfg.footprint;
    let e = gen_expr(rng, fp, 2, true);
    let whole = Command::if_(e.clone(), cs[0].clone(), cs[1].clone());
    let p = safe_pre(rng, cfg, &whole)?;
    let (pt, pe) = branch_pres(&p, &e);
    let (t1, e1) = some_or_skip!(prove(cfg, &cs[0], &pt)?);
    let (t2, e2) = some_or_skip!(prove(cfg, &cs[1], &pe)?);
    let q = weaken(rng, fp, describe(&union(&e1.normal, &e2.normal), fp));
    let rb = weaken(rng, fp, describe(&union(&e1.brk, &e2.brk), fp));
    let rc = weaken(rng, fp, describe(&union(&e1.con, &e2.con), fp));
    let t1 = with_posts(t1, &pt, &q, &rb, &rc)?;
    let t2 = with_posts(t2, &pe, &q, &rb, &rc)?;
    gate!(cfg, &[&t1, &t2]);
    let t = ProofTree::if_(e, t1, t2);
    conclude(cfg, &t, Some(&Triple::new(p, whole, q, rb, rc)), true)
}

fn prop_rule_loop(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let fp = &cfg.footprint;
    let (body, incr) = (&cs[0], &cs[1]);
    let whole = Command::for_(body.clone(), incr.clone());
    let p = safe_pre(rng, cfg, &whole)?;
    let sets = match loop_sets(body, incr, &state_set(&p, cfg)?, fp) {
        Ok(s) => s,
        Err(Error::SideCondition { .. }) => return Ok(Check::Skip),
        Err(e) => return Err(e),
    };
    let (i1, i2) = (describe(&sets.head, fp), describe(&sets.mid, fp));
    let q = weaken(rng, fp, describe(&sets.exit, fp));
    let (tb, _) = synth_proof(body, &sets.head, fp)?;
    let (ti, _) = synth_proof(incr, &sets.mid, fp)?;
    let tb = with_posts(tb, &i1, &i2, &q, &i2)?;
    let ti = with_posts(ti, &i2, &i1, &q, &Assertion::False)?;
    gate!(cfg, &[&tb, &ti]);
    let t = ProofTree::loop_(i1.clone(), i2, tb, ti);
    conclude(cfg, &t, Some(&Triple::new(i1, whole, q, Assertion::False, Assertion::False)), true)
}

fn prop_rule_conseq(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let fp = &cfg.footprint;
    let t = some_or_skip!(premise(rng, cfg, &cs[0])?);
    gate!(cfg, &[&t]);
    let k = conclusion(&t)?;
    let p = strengthen(rng, fp, k.pre.clone());
    let (q, rb, rc) = (weaken(rng, fp, k.post), weaken(rng, fp, k.brk), weaken(rng, fp, k.con));
    let t = ProofTree::conseq(t, p.clone(), q.clone(), rb.clone(), rc.clone());
    conclude(cfg, &t, Some(&Triple::new(p, cs[0].clone(), q, rb, rc)), true)
}

// -------------------------------------------------------------- certificates

/// `c` annotated with the exact loop invariants reached from `from`.
fn annotate(c: &Command, from: &StateSet, fp: &Footprint, fuse: bool, rng: &mut ChaCha8Rng) -> Option<AnnCommand> {
    Some(match c {
        Command::Seq(a, b) => {
            let ea = collect(a, from, fp).ok()?;
            AnnCommand::seq(annotate(a, from, fp, fuse, rng)?, annotate(b, &ea.normal, fp, fuse, rng)?)
        }
        Command::If(e, a, b) => {
            let (mut t, mut f) = (StateSet::new(), StateSet::new());
            for i in from {
                match eval_expr(e, &fp.state_at(*i)).ok()? {
                    0 => f.insert(*i),
                    _ => t.insert(*i),
                };
            }
            AnnCommand::If(e.clone(), Box::new(annotate(a, &t, fp, fuse, rng)?), Box::new(annotate(b, &f, fp, fuse, rng)?))
        }
        Command::For(b, i) => {
            let sets = loop_sets(b, i, from, fp).ok()?;
            // without an increment invariant the loop must be fused
            let fusable = fuse && !has_toplevel_continue(b) && !has_toplevel_continue(i);
            let incr_inv = (!fusable || rng.random_bool(0.6)).then(|| describe(&sets.mid, fp));
            AnnCommand::For {
                body: Box::new(annotate(b, &sets.head, fp, fuse, rng)?),
                incr: Box::new(annotate(i, &sets.mid, fp, fuse, rng)?),
                inv: Some(describe(&sets.head, fp)),
                incr_inv,
            }
        }
        other => AnnCommand::plain(other),
    })
}

fn prop_certificate(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let fp = &cfg.footprint;
    let c = &cs[0];
    let pre = safe_pre(rng, cfg, c)?;
    let from = state_set(&pre, cfg)?;
    let opts = Options { if_seq: random_toggle(rng), loop_nocontinue: random_toggle(rng) };
    let ann = some_or_skip!(annotate(c, &from, fp, opts.loop_nocontinue != Toggle::Off, rng));
    let ex = collect(c, &from, fp)?;
    let spec = Spec {
        footprint: fp.clone(),
        pre,
        post: weaken(rng, fp, describe(&ex.normal, fp)),
        brk: weaken(rng, fp, describe(&ex.brk, fp)),
        con: weaken(rng, fp, describe(&ex.con, fp)),
    };
    let out = match symexec_spec(&ann, &spec, opts) {
        Ok(o) => o,
        Err(e @ Error::CapExceeded { .. }) => return Err(e),
        Err(e) => return Ok(Check::Fail(format!("symbolic execution with {opts:?} failed: {e}"))),
    };
    if let Some((vc, v)) = discharge(&out.vcs, fp, &cfg.caps)?.into_iter().find(|(_, v)| !v.holds()) {
        return Ok(Check::Fail(format!("exact annotations leave {vc} unproved with {opts:?}: {v}")));
    }
    let cert = Certificate { tree: out.tree, footprint: fp.clone(), source_hash: source_hash(&pretty(c), "") };
    let back = parse_certificate(&cert.to_text())?;
    if back != cert {
        return Ok(Check::Fail("certificate does not survive a text round trip".into()));
    }
    let expected = spec.triple(c.clone());
    conclude(cfg, &back.tree, Some(&expected), false)
}

// -------------------------------------------------------------- transformers

fn expect_output(cfg: &FuzzConfig, out: Result<ProofTree>, expected: &Triple) -> Result<Check> {
    match out {
        Ok(t) => conclude(cfg, &t, Some(expected), false),
        Err(e @ Error::CapExceeded { .. }) => Err(e),
        Err(e) => Ok(Check::Fail(format!("transformer rejected a valid premise: {e}"))),
    }
}

fn both(a: Check, b: Check) -> Check {
    match (a, b) {
        (Check::Fail(m), _) | (_, Check::Fail(m)) => Check::Fail(m),
        (Check::Skip, _) | (_, Check::Skip) => Check::Skip,
        (Check::Pass, Check::Pass) => Check::Pass,
        _ => Check::Inconclusive,
    }
}

fn prop_inv_seq(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let t = some_or_skip!(premise(rng, cfg, &Command::seq(cs[0].clone(), cs[1].clone()))?);
    let k = conclusion(&t)?;
    let s = extended::inv_seq(&t)?;
    let l = Triple::new(k.pre.clone(), cs[0].clone(), s.mid.clone(), k.brk.clone(), k.con.clone());
    let r = Triple::new(s.mid.clone(), cs[1].clone(), k.post, k.brk, k.con);
    Ok(both(expect_output(cfg, Ok(s.left), &l)?, expect_output(cfg, Ok(s.right), &r)?))
}

fn prop_inv_if(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let e = gen_expr(rng, &cfg.footprint, 2, true);
    let t = some_or_skip!(premise(rng, cfg, &Command::if_(e.clone(), cs[0].clone(), cs[1].clone()))?);
    let k = conclusion(&t)?;
    let (l, r) = extended::inv_if(&t)?;
    let (pt, pe) = branch_pres(&k.pre, &e);
    let lt = Triple::new(pt, cs[0].clone(), k.post.clone(), k.brk.clone(), k.con.clone());
    let rt = Triple::new(pe, cs[1].clone(), k.post, k.brk, k.con);
    Ok(both(expect_output(cfg, Ok(l), &lt)?, expect_output(cfg, Ok(r), &rt)?))
}

fn prop_inv_loop(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let t = some_or_skip!(premise(rng, cfg, &Command::for_(cs[0].clone(), cs[1].clone()))?);
    let k = conclusion(&t)?;
    let s = extended::inv_loop(&t)?;
    if s.entry.0 != k.pre {
        return Ok(Check::Fail(format!("entry condition starts from {}, not the loop precondition {}", s.entry.0, k.pre)));
    }
    if let v @ Verdict::CounterExample(_) = entails(&s.entry.0, &s.entry.1, &cfg.footprint, &cfg.caps)? {
        return Ok(Check::Fail(format!("entry condition {} |- {} fails: {v}", s.entry.0, s.entry.1)));
    }
    let b = Triple::new(s.i1.clone(), cs[0].clone(), s.i2.clone(), k.post.clone(), s.i2.clone());
    let i = Triple::new(s.i2.clone(), cs[1].clone(), s.i1.clone(), k.post, Assertion::False);
    Ok(both(expect_output(cfg, Ok(s.body), &b)?, expect_output(cfg, Ok(s.incr), &i)?))
}

fn prop_merge_disj(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let t1 = some_or_skip!(premise(rng, cfg, &cs[0])?);
    let t2 = some_or_skip!(premise(rng, cfg, &cs[0])?);
    let (a, b) = (conclusion(&t1)?, conclusion(&t2)?);
    let j = |x: &Assertion, y: &Assertion| Assertion::join(x.clone(), y.clone());
    let expected = if t1 == t2 {
        a.clone()
    } else {
        Triple::new(j(&a.pre, &b.pre), a.cmd.clone(), j(&a.post, &b.post), j(&a.brk, &b.brk), j(&a.con, &b.con))
    };
    expect_output(cfg, extended::merge_disj(&t1, &t2), &expected)
}

fn prop_ex_finite(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let fp = &cfg.footprint;
    let c = &cs[0];
    let m = fp.modulus();
    let x = fp.vars()[rng.random_range(0..fp.vars().len())].clone();
    let rest = safe_pre(rng, cfg, c)?;
    let template = Assertion::and(Assertion::cmp(Rel::Eq, ATerm::Prog(Expr::var(&x)), ATerm::lvar("n")), rest);
    let domain: Vec<u32> = match rng.random_range(0..3) {
        0 => (0..m).collect(),
        1 => (0..rng.random_range(1..=m)).collect(),
        _ => {
            let d: Vec<u32> = (0..m).filter(|_| rng.random_bool(0.5)).collect();
            if d.is_empty() {
                vec![rng.random_range(0..m)]
            } else {
                d
            }
        }
    };
    let mut proofs = Vec::new();
    let mut exits = Exits::default();
    for d in &domain {
        let (t, ex) = some_or_skip!(prove(cfg, c, &template.instantiate("n", *d))?);
        exits = Exits {
            normal: union(&exits.normal, &ex.normal),
            brk: union(&exits.brk, &ex.brk),
            con: union(&exits.con, &ex.con),
        };
        proofs.push((*d, t));
    }
    let q = weaken(rng, fp, describe(&exits.normal, fp));
    let rb = describe(&exits.brk, fp);
    let rc = describe(&exits.con, fp);
    let family = proofs
        .into_iter()
        .map(|(d, t)| Ok((d, with_posts(t, &template.instantiate("n", d), &q, &rb, &rc)?)))
        .collect::<Result<Vec<_>>>()?;
    let out = match extended::ex_finite("n", &template, &family, fp) {
        Ok(t) => t,
        Err(e) => return Ok(Check::Fail(format!("ex_finite rejected a valid family: {e}"))),
    };
    let got = conclusion(&out)?;
    // the guard restricting `n` is a choice of the transformer; its meaning is fixed
    let in_domain = Assertion::join_all(domain.iter().map(|d| Assertion::cmp(Rel::Eq, ATerm::lvar("n"), ATerm::Lit(*d))));
    let want = Assertion::exists("n", Assertion::and(in_domain, template));
    for (a, b) in [(&got.pre, &want), (&want, &got.pre)] {
        if let v @ Verdict::CounterExample(_) = entails(a, b, fp, &cfg.caps)? {
            return Ok(Check::Fail(format!("precondition {} is not equivalent to {want}: {v}", got.pre)));
        }
    }
    let expected = Triple::new(got.pre.clone(), c.clone(), q, rb, rc);
    conclude(cfg, &out, Some(&expected), false)
}

fn prop_nocontinue(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    if has_toplevel_continue(&cs[0]) {
        return Ok(Check::Skip);
    }
    let t = some_or_skip!(premise(rng, cfg, &cs[0])?);
    let rc = gen_assertion(rng, &cfg.footprint, 2);
    let k = conclusion(&t)?;
    let expected = Triple::new(k.pre, k.cmd, k.post, k.brk, rc.clone());
    expect_output(cfg, extended::nocontinue(&t, &rc), &expected)
}

fn prop_if_seq(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let e = gen_expr(rng, &cfg.footprint, 2, true);
    let (c1, c2, c3) = (&cs[0], &cs[1], &cs[2]);
    let distributed = Command::if_(e.clone(), Command::seq(c1.clone(), c3.clone()), Command::seq(c2.clone(), c3.clone()));
    let t = some_or_skip!(premise(rng, cfg, &distributed)?);
    let k = conclusion(&t)?;
    let factored = Command::seq(Command::if_(e, c1.clone(), c2.clone()), c3.clone());
    let expected = Triple::new(k.pre, factored, k.post, k.brk, k.con);
    expect_output(cfg, extended::if_seq(&t), &expected)
}

fn prop_loop_nocontinue(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let (c1, c2) = (&cs[0], &cs[1]);
    if has_toplevel_continue(c1) || has_toplevel_continue(c2) {
        return Ok(Check::Skip);
    }
    let fused = Command::for_(Command::seq(c1.clone(), c2.clone()), Command::Skip);
    let t = some_or_skip!(premise(rng, cfg, &fused)?);
    let k = conclusion(&t)?;
    let expected = Triple::new(k.pre, Command::for_(c1.clone(), c2.clone()), k.post, k.brk, k.con);
    expect_output(cfg, extended::loop_nocontinue(&t), &expected)
}

fn prop_loop_unroll1(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let fp = &cfg.footprint;
    let (c1, c2) = (&cs[0], &cs[1]);
    if has_toplevel_continue(c2) {
        return Ok(Check::Skip);
    }
    let lp = Command::for_(c1.clone(), c2.clone());
    let p = safe_pre(rng, cfg, &lp)?;
    let (t1, e1) = some_or_skip!(prove(cfg, c1, &p)?);
    let s1 = union(&e1.normal, &e1.con);
    let p1 = describe(&s1, fp);
    let (t2, e2) = some_or_skip!(prove(cfg, c2, &p1)?);
    let p2 = describe(&e2.normal, fp);
    let (t3, e3) = some_or_skip!(prove(cfg, &lp, &p2)?);
    let brk = union(&e1.brk, &e2.brk);
    let rb = describe(&brk, fp);
    let q = weaken(rng, fp, describe(&union(&e3.normal, &brk), fp));
    let t1 = with_posts(t1, &p, &p1, &rb, &p1)?;
    let t2 = with_posts(t2, &p1, &p2, &rb, &Assertion::False)?;
    let t3 = with_posts(t3, &p2, &q, &Assertion::False, &Assertion::False)?;
    gate!(cfg, &[&t1, &t2, &t3]);
    let expected = Triple::new(p, lp, q, Assertion::False, Assertion::False);
    expect_output(cfg, extended::loop_unroll1(&t1, &t2, &t3, fp, &cfg.caps), &expected)
}

fn prop_seq_assoc(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let (c1, c2, c3) = (&cs[0], &cs[1], &cs[2]);
    let left = Command::seq(Command::seq(c1.clone(), c2.clone()), c3.clone());
    let t = some_or_skip!(premise(rng, cfg, &left)?);
    let k = conclusion(&t)?;
    let right = Command::seq(c1.clone(), Command::seq(c2.clone(), c3.clone()));
    let expected = Triple::new(k.pre.clone(), right, k.post.clone(), k.brk.clone(), k.con.clone());
    let out = extended::seq_assoc(&t);
    let back = out.as_ref().map_err(Clone::clone).and_then(extended::seq_assoc_inv);
    Ok(both(expect_output(cfg, out, &expected)?, expect_output(cfg, back, &k)?))
}

fn prop_conseq_pre(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let t = some_or_skip!(premise(rng, cfg, &cs[0])?);
    let k = conclusion(&t)?;
    let p = Assertion::meet(k.pre.clone(), gen_assertion(rng, &cfg.footprint, 2));
    let expected = Triple::new(p.clone(), k.cmd, k.post, k.brk, k.con);
    expect_output(cfg, extended::conseq_pre(&t, &p, &cfg.footprint, &cfg.caps), &expected)
}

// --------------------------------------------------------------- refinements

fn refinement(cfg: &FuzzConfig, lhs: &Command, rhs: &Command) -> Result<Check> {
    let fp = &cfg.footprint;
    let b = refines_big(lhs, rhs, fp, cfg.fuel, &cfg.caps)?;
    let s = refines_small(lhs, rhs, fp, cfg.fuel, &cfg.caps)?;
    let subject = format!("{} refines {}", pretty(lhs), pretty(rhs));
    Ok(judge(&[("big-step", b), ("small-step", s)], &subject))
}

fn prop_refine_ifseq(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let e = gen_expr(rng, &cfg.footprint, 2, true);
    let (c1, c2, c3) = (&cs[0], &cs[1], &cs[2]);
    let lhs = Command::seq(Command::if_(e.clone(), c1.clone(), c2.clone()), c3.clone());
    let rhs = Command::if_(e, Command::seq(c1.clone(), c3.clone()), Command::seq(c2.clone(), c3.clone()));
    refinement(cfg, &lhs, &rhs)
}

fn prop_refine_loop(cfg: &FuzzConfig, cs: &[Command], _: &mut ChaCha8Rng) -> Result<Check> {
    let (c1, c2) = (&cs[0], &cs[1]);
    if has_toplevel_continue(c1) || has_toplevel_continue(c2) {
        return Ok(Check::Skip);
    }
    let lhs = Command::for_(c1.clone(), c2.clone());
    let rhs = Command::for_(Command::seq(c1.clone(), c2.clone()), Command::Skip);
    refinement(cfg, &lhs, &rhs)
}

// ---------------------------------------------------------------- simulation

const LEMMA_SAMPLES: usize = 10;

fn simulation_checks(cfg: &FuzzConfig, rel: RelationTable, rng: &mut ChaCha8Rng) -> Result<Check> {
    let fp = &cfg.footprint;
    let r = check_simulation(&rel, fp, cfg.fuel, &cfg.caps)?;
    if let Some(v) = r.violations.first() {
        return Ok(Check::Fail(format!("relation of {} pairs is not a simulation: {v}", rel.len())));
    }
    let mut verdicts = Vec::new();
    for _ in 0..LEMMA_SAMPLES {
        let posts = Posts::new(gen_assertion(rng, fp, 2), gen_assertion(rng, fp, 1), gen_assertion(rng, fp, 1));
        verdicts.push(("wp transfer", lemma_wp_sim_check(&rel, &posts, fp, cfg.fuel, &cfg.caps)?));
    }
    for _ in 0..LEMMA_SAMPLES {
        let p = gen_assertion(rng, fp, 2);
        verdicts.push(("guard transfer", lemma_guard_sim_check(&rel, &p, fp, cfg.fuel, &cfg.caps)?));
    }
    let verdict = judge(&verdicts, &"the simulation lemmas");
    if let Check::Fail(_) = verdict {
        return Ok(verdict);
    }
    let i = rng.random_range(0..rel.len());
    let bad = mutate(&rel, i, fp, &cfg.caps)?;
    if check_simulation(&bad, fp, cfg.fuel, &cfg.caps)?.ok {
        return Ok(Check::Fail(format!("mutating pair {i} ({}) went undetected", bad.pairs()[i])));
    }
    Ok(verdict)
}

fn prop_sim_ifseq(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let e = gen_expr(rng, &cfg.footprint, 2, true);
    let rel = build_rel_ifseq(&e, &cs[0], &cs[1], &cs[2], &cfg.footprint, Bounds::default(), &cfg.caps)?;
    simulation_checks(cfg, rel, rng)
}

fn prop_sim_loop(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    if has_toplevel_continue(&cs[0]) || has_toplevel_continue(&cs[1]) {
        return Ok(Check::Skip);
    }
    let rel = build_rel_loop_nocontinue(&cs[0], &cs[1], &cfg.footprint, Bounds::default(), &cfg.caps)?;
    simulation_checks(cfg, rel, rng)
}

// -------------------------------------------------------------- implications

fn implication(cfg: &FuzzConfig, premise: &Triple, concl: &Triple) -> Result<Check> {
    let fp = &cfg.footprint;
    match valid_big(premise, fp, cfg.fuel, &cfg.caps)? {
        Verdict::Holds => {}
        Verdict::CounterExample(_) => return Ok(Check::Skip),
        Verdict::Inconclusive(_) => return Ok(Check::Inconclusive),
    }
    let v = valid_big(concl, fp, cfg.fuel, &cfg.caps)?;
    let subject = format!("{concl} (premise {premise} holds)");
    Ok(judge(&[("big-step", v)], &subject))
}

fn prop_impl_ifseq(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    let e = gen_expr(rng, &cfg.footprint, 2, true);
    let (c1, c2, c3) = (&cs[0], &cs[1], &cs[2]);
    let distributed = Command::if_(e.clone(), Command::seq(c1.clone(), c3.clone()), Command::seq(c2.clone(), c3.clone()));
    let t = likely_valid_triple(rng, cfg, &distributed)?;
    let factored = Triple { cmd: Command::seq(Command::if_(e, c1.clone(), c2.clone()), c3.clone()), ..t.clone() };
    implication(cfg, &t, &factored)
}

fn prop_impl_nocontinue(cfg: &FuzzConfig, cs: &[Command], rng: &mut ChaCha8Rng) -> Result<Check> {
    if has_toplevel_continue(&cs[0]) {
        return Ok(Check::Skip);
    }
    let t = likely_valid_triple(rng, cfg, &cs[0])?;
    let other = Triple { con: gen_assertion(rng, &cfg.footprint, 2), ..t.clone() };
    implication(cfg, &t, &other)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_command;

    fn small_cfg() -> FuzzConfig {
        let mut cfg = FuzzConfig::new(Footprint::new(&["x", "y"], 3).unwrap());
        cfg.count = 4;
        cfg.size = 6;
        cfg.fuel = 2000;
        cfg
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!(Suite::Transformers.labels().len(), 11);
        assert_eq!(Suite::Rules.labels().len(), 8);
    }

    #[test]
    fn shrink_candidates_are_smaller() {
        let c = parse_command("for(;; x = 1) if x then break else (y = 2 ;; continue)").unwrap();
        let cands = smaller(&c);
        assert_eq!(cands[0], Command::Skip);
        assert!(cands.iter().all(|d| d.size() < c.size()));
        assert!(cands.windows(2).all(|w| w[0].size() <= w[1].size()));
    }

    #[test]
    fn deterministic_in_seed() {
        let cfg = small_cfg();
        let a = run_suite(Suite::Oracles, &cfg).unwrap();
        let b = run_suite(Suite::Oracles, &FuzzConfig { workers: 1, ..cfg }).unwrap();
        assert_eq!(a.labels, b.labels);
    }

    #[test]
    fn every_suite_runs_clean_on_a_tiny_budget() {
        let cfg = small_cfg();
        for s in Suite::ALL {
            let r = run_suite(s, &cfg).unwrap();
            assert!(r.ok(), "{r}");
        }
    }

    #[test]
    fn shrinking_reports_a_minimal_reproducer() {
        // a deliberately false property: no command assigns to y
        fn prop(_: &FuzzConfig, cs: &[Command], _: &mut ChaCha8Rng) -> Result<Check> {
            Ok(if cs[0].vars().contains(&"y".to_string()) && format!("{}", cs[0]).contains("y =") {
                Check::Fail("assigns y".into())
            } else {
                Check::Pass
            })
        }
        let case = Case { label: "toy", gen: gen_one, prop };
        let c = parse_command("x = 1 ;; if x then (y = 2 ;; skip) else break").unwrap();
        let (min, _) = shrink(&case, &small_cfg(), vec![c], 0, String::new()).unwrap();
        assert_eq!(min[0].size(), 1);
        assert!(matches!(min[0], Command::Assign(ref v, _) if v == "y"));
    }
}
