use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::sample::select;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use whilecf::assertions::{entails, satisfies, states_satisfying, subst, ATerm, Assertion, Env, Rel};
use whilecf::bigstep::{eval_big, refines_big, valid_big};
use whilecf::extended::{inv_seq, wrap};
use whilecf::fuzz::gen_assertion;
use whilecf::lang::{
    eval_expr, has_toplevel_continue, parse_command, pretty, BinOp, Caps, Command, EvalError, Expr, Footprint, State,
    UnOp,
};
use whilecf::proof::{check, conclusion, ProofTree, Triple};
use whilecf::simulation::{build_rel_ifseq, check_simulation, identity_table, refines_small, Bounds};
use whilecf::smallstep::{run_small, step, valid_wp, wp_indexed, Config, Cont, Frame, Posts, Step};
use whilecf::synth::{collect, describe, safe_states, synth_proof, StateSet};
use whilecf::verify::AnnCommand;

const FUEL: u64 = 2000;

const XYZ: &[&str] = &["x", "y", "z"];
const XY: &[&str] = &["x", "y"];

fn fp() -> Footprint {
    Footprint::new(XYZ, 4).unwrap()
}

fn caps() -> Caps {
    Caps::default()
}

fn arb_var_in(vars: &'static [&'static str]) -> impl Strategy<Value = String> {
    select(vars).prop_map(String::from)
}

fn arb_var() -> impl Strategy<Value = String> {
    arb_var_in(XYZ)
}

fn arb_expr() -> BoxedStrategy<Expr> {
    arb_expr_in(XYZ)
}

fn arb_cmd() -> BoxedStrategy<Command> {
    arb_cmd_in(XYZ)
}

fn arb_expr_in(vars: &'static [&'static str]) -> BoxedStrategy<Expr> {
    let leaf = prop_oneof![arb_var_in(vars).prop_map(Expr::Var), (0u32..4).prop_map(Expr::Const)];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            1 => (select(vec![UnOp::Neg, UnOp::Not]), inner.clone()).prop_map(|(op, a)| Expr::un(op, a)),
            4 => (select(BinOp::ALL.to_vec()), inner.clone(), inner).prop_map(|(op, a, b)| Expr::bin(op, a, b)),
        ]
    })
    .boxed()
}

fn arb_cmd_in(vars: &'static [&'static str]) -> BoxedStrategy<Command> {
    let leaf = prop_oneof![
        1 => Just(Command::Skip),
        2 => Just(Command::Break),
        1 => Just(Command::Continue),
        5 => (arb_var_in(vars), arb_expr_in(vars)).prop_map(|(x, e)| Command::Assign(x, e)),
    ];
    leaf.prop_recursive(4, 14, 2, move |inner| {
        prop_oneof![
            3 => (inner.clone(), inner.clone()).prop_map(|(a, b)| Command::seq(a, b)),
            3 => (arb_expr_in(vars), inner.clone(), inner.clone()).prop_map(|(e, a, b)| Command::if_(e, a, b)),
            2 => (inner.clone(), inner).prop_map(|(a, b)| Command::for_(a, b)),
        ]
    })
    .boxed()
}

fn arb_state() -> impl Strategy<Value = State> {
    (0u64..64).prop_map(|i| fp().state_at(i))
}

fn arb_assertion() -> impl Strategy<Value = Assertion> {
    arb_assertion_in(XYZ)
}

fn arb_assertion_in(vars: &'static [&'static str]) -> impl Strategy<Value = Assertion> {
    let fp = Footprint::new(vars, 4).unwrap();
    any::<u64>().prop_map(move |seed| gen_assertion(&mut ChaCha8Rng::seed_from_u64(seed), &fp, 2))
}

fn arb_frame() -> impl Strategy<Value = Frame> {
    prop_oneof![
        arb_cmd().prop_map(Frame::seq),
        (arb_cmd(), arb_cmd()).prop_map(|(a, b)| Frame::loop1(a, b)),
        (arb_cmd(), arb_cmd()).prop_map(|(a, b)| Frame::loop2(a, b)),
    ]
}

fn arb_cont() -> impl Strategy<Value = Cont> {
    prop::collection::vec(arb_frame(), 0..3).prop_map(Cont::from_top_first)
}

fn holds_at(p: &Assertion, s: &State) -> bool {
    satisfies(s, &Env::new(), p)
}

fn states_of(p: &Assertion) -> StateSet {
    states_satisfying(p, &Env::new(), &fp(), &caps()).unwrap().iter().map(State::index).collect()
}

/// `{P'} c {exact posts}` where `P'` is `P` cut down to the states on which `c` is safe.
fn exact_triple(p: &Assertion, c: &Command) -> Triple {
    let fp = fp();
    let safe = safe_states(c, &fp);
    let from: StateSet = states_of(p).intersection(&safe).copied().collect();
    let ex = collect(c, &from, &fp).unwrap();
    Triple::new(describe(&from, &fp), c.clone(), describe(&ex.normal, &fp), describe(&ex.brk, &fp), describe(&ex.con, &fp))
}

fn with_con(t: &Triple, rc: Assertion) -> Triple {
    Triple::new(t.pre.clone(), t.cmd.clone(), t.post.clone(), t.brk.clone(), rc)
}

/// True when a `continue` in the configuration can reach the empty continuation.
fn continue_escapes(cfg: &Config) -> bool {
    let frames = cfg.cont.top_first();
    match frames.iter().rposition(|f| !matches!(f, Frame::KSeq(_))) {
        Some(outer) => frames[outer + 1..].iter().any(seq_frame_continues),
        None => has_toplevel_continue(&cfg.cmd) || frames.iter().any(seq_frame_continues),
    }
}

fn seq_frame_continues(f: &Frame) -> bool {
    matches!(f, Frame::KSeq(c) if has_toplevel_continue(c))
}

fn assertions_in(t: &ProofTree) -> usize {
    match t {
        ProofTree::RSkip(_) | ProofTree::RBreak(_) | ProofTree::RContinue(_) | ProofTree::RAssign(..) => 1,
        ProofTree::RSeq(_, l, r) => 1 + assertions_in(l) + assertions_in(r),
        ProofTree::RIf(_, l, r) => assertions_in(l) + assertions_in(r),
        ProofTree::RLoop(_, _, b, i) => 2 + assertions_in(b) + assertions_in(i),
        ProofTree::RConseq(c, ..) => 4 + assertions_in(c),
    }
}

/// Replaces the `k`-th stored assertion, counted in pre-order.
fn replace_assertion(t: &ProofTree, k: &mut usize, a: &Assertion) -> ProofTree {
    let mut pick = |orig: &Assertion| {
        let out = if *k == 0 { a.clone() } else { orig.clone() };
        *k = k.wrapping_sub(1);
        out
    };
    match t {
        ProofTree::RSkip(p) => ProofTree::RSkip(pick(p)),
        ProofTree::RBreak(p) => ProofTree::RBreak(pick(p)),
        ProofTree::RContinue(p) => ProofTree::RContinue(pick(p)),
        ProofTree::RAssign(x, e, q) => ProofTree::RAssign(x.clone(), e.clone(), pick(q)),
        ProofTree::RSeq(m, l, r) => {
            let m = pick(m);
            let l = replace_assertion(l, k, a);
            ProofTree::seq(m, l, replace_assertion(r, k, a))
        }
        ProofTree::RIf(e, l, r) => {
            let l = replace_assertion(l, k, a);
            ProofTree::if_(e.clone(), l, replace_assertion(r, k, a))
        }
        ProofTree::RLoop(p, i, b, c) => {
            let (p, i) = (pick(p), pick(i));
            let b = replace_assertion(b, k, a);
            ProofTree::loop_(p, i, b, replace_assertion(c, k, a))
        }
        ProofTree::RConseq(c, p, q, rb, rc) => {
            let (p, q, rb, rc) = (pick(p), pick(q), pick(rb), pick(rc));
            ProofTree::conseq(replace_assertion(c, k, a), p, q, rb, rc)
        }
    }
}

/// Wraps every subcommand in `c ;; assert True` where the mask bit says so.
fn sprinkle(c: &Command, mask: &mut u64) -> AnnCommand {
    let bit = *mask & 1 == 1;
    *mask = mask.rotate_right(1);
    let inner = match c {
        Command::Seq(a, b) => AnnCommand::seq(sprinkle(a, mask), sprinkle(b, mask)),
        Command::If(e, a, b) => AnnCommand::If(e.clone(), Box::new(sprinkle(a, mask)), Box::new(sprinkle(b, mask))),
        Command::For(a, b) => AnnCommand::For {
            body: Box::new(sprinkle(a, mask)),
            incr: Box::new(sprinkle(b, mask)),
            inv: None,
            incr_inv: None,
        },
        other => AnnCommand::plain(other),
    };
    if bit {
        AnnCommand::seq(inner, AnnCommand::Assert(Assertion::True))
    } else {
        inner
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parse_inverts_pretty(c in arb_cmd()) {
        prop_assert_eq!(parse_command(&pretty(&c)).unwrap(), c);
    }

    #[test]
    fn expressions_are_deterministic_and_total_but_for_zero_divisors(e in arb_expr(), s in arb_state()) {
        let v = eval_expr(&e, &s);
        prop_assert_eq!(&v, &eval_expr(&e, &s));
        match v {
            Ok(v) => prop_assert!(v < 4),
            Err(err) => {
                prop_assert_eq!(err, EvalError::DivByZero);
                prop_assert!(e.may_fail());
            }
        }
    }

    #[test]
    fn loops_hide_their_continues(b in arb_cmd(), i in arb_cmd()) {
        prop_assert!(!has_toplevel_continue(&Command::for_(b, i)));
    }

    #[test]
    fn quantifier_duality(p in arb_assertion(), e in arb_expr(), s in arb_state(), rel in select(vec![Rel::Eq, Rel::Le, Rel::Lt])) {
        let body = Assertion::and(Assertion::cmp(rel, ATerm::lvar("v"), ATerm::prog(e)), p);
        let lhs = Assertion::not(Assertion::exists("v", body.clone()));
        let rhs = Assertion::forall("v", Assertion::not(body));
        prop_assert_eq!(holds_at(&lhs, &s), holds_at(&rhs, &s));
    }

    #[test]
    fn entailment_is_a_preorder(p in arb_assertion(), q in arb_assertion(), r in arb_assertion()) {
        let (fp, caps) = (fp(), caps());
        prop_assert!(entails(&p, &p, &fp, &caps).unwrap().holds());
        let pq = entails(&p, &q, &fp, &caps).unwrap().holds();
        let qr = entails(&q, &r, &fp, &caps).unwrap().holds();
        if pq && qr {
            prop_assert!(entails(&p, &r, &fp, &caps).unwrap().holds());
        }
        // a non-vacuous chain through a conjunction and a disjunction
        let low = Assertion::and(p.clone(), q.clone());
        let high = Assertion::or(p.clone(), r);
        prop_assert!(entails(&low, &p, &fp, &caps).unwrap().holds());
        prop_assert!(entails(&p, &high, &fp, &caps).unwrap().holds());
        prop_assert!(entails(&low, &high, &fp, &caps).unwrap().holds());
    }

    #[test]
    fn strict_atoms_follow_evaluation(e in arb_expr(), f in arb_expr(), s in arb_state()) {
        let atom = Assertion::cmp(Rel::Lt, ATerm::prog(e.clone()), ATerm::prog(f.clone()));
        let expected = match (eval_expr(&e, &s), eval_expr(&f, &s)) {
            (Ok(a), Ok(b)) => a < b,
            _ => false,
        };
        prop_assert_eq!(holds_at(&atom, &s), expected);
        prop_assert_eq!(holds_at(&Assertion::defined(&e), &s), eval_expr(&e, &s).is_ok());
    }

    #[test]
    fn substitution_matches_state_update(p in arb_assertion(), x in arb_var(), e in arb_expr(), s in arb_state()) {
        if let Ok(v) = eval_expr(&e, &s) {
            prop_assert_eq!(holds_at(&subst(&p, &x, &e), &s), holds_at(&p, &s.with(&x, v)));
        }
    }

    #[test]
    fn big_step_is_deterministic_and_fuel_monotone(c in arb_cmd(), s in arb_state(), k in 1u64..40, extra in 0u64..200) {
        let o = eval_big(&c, &s, k);
        prop_assert_eq!(&o, &eval_big(&c, &s, k));
        if o.is_conclusive() {
            prop_assert_eq!(o, eval_big(&c, &s, k + extra));
        }
    }

    #[test]
    fn big_and_small_step_agree(c in arb_cmd(), s in arb_state()) {
        let big = eval_big(&c, &s, FUEL);
        let small = run_small(&Config::initial(&c, &s), FUEL);
        if big.is_conclusive() && small.is_conclusive() {
            prop_assert_eq!(big, small);
        }
    }

    #[test]
    fn step_is_a_function_and_keeps_continue_confined(c in arb_cmd(), k in arb_cont(), s in arb_state()) {
        let mut cur = Config::new(c, k, s);
        for _ in 0..200 {
            let next = step(&cur);
            prop_assert_eq!(&next, &step(&cur));
            let Step::Next(n) = next else { break };
            if !continue_escapes(&cur) {
                prop_assert!(!continue_escapes(&n), "{} -> {}", cur, n);
            }
            cur = n;
        }
    }

    #[test]
    fn wp_is_antitone_in_the_index(c in arb_cmd(), k in arb_cont(), s in arb_state(), q in arb_assertion(), rb in arb_assertion(), rc in arb_assertion(), n in 0u64..60) {
        let posts = Posts::new(q, rb, rc);
        if wp_indexed(&s, &c, &k, &posts, &Env::new(), n + 1) {
            prop_assert!(wp_indexed(&s, &c, &k, &posts, &Env::new(), n));
        }
    }

    #[test]
    fn wp_ignores_the_continue_post_without_continues(c in arb_cmd(), k in arb_cont(), s in arb_state(), q in arb_assertion(), rb in arb_assertion(), rc in arb_assertion(), rc2 in arb_assertion()) {
        let cfg = Config::new(c.clone(), k.clone(), s.clone());
        prop_assume!(!continue_escapes(&cfg));
        let env = Env::new();
        if wp_indexed(&s, &c, &k, &Posts::new(q.clone(), rb.clone(), rc), &env, FUEL) {
            prop_assert!(wp_indexed(&s, &c, &k, &Posts::new(q, rb, rc2), &env, FUEL));
        }
    }

    #[test]
    fn seq_splits_at_the_weakest_precondition_of_its_tail(c1 in arb_cmd(), c2 in arb_cmd(), p in arb_assertion()) {
        let (fp, caps) = (fp(), caps());
        let whole = exact_triple(&p, &Command::seq(c1.clone(), c2.clone()));
        let posts = whole.posts();
        let mid: StateSet = (0..fp.state_count() as u64)
            .filter(|i| wp_indexed(&fp.state_at(*i), &c2, &Cont::empty(), &posts, &Env::new(), FUEL))
            .collect();
        let mid = describe(&mid, &fp);
        prop_assume!(valid_wp(&whole, &fp, FUEL, &caps).unwrap().holds());
        let left = Triple::new(whole.pre.clone(), c1, mid.clone(), whole.brk.clone(), whole.con.clone());
        let right = Triple::new(mid, c2, whole.post.clone(), whole.brk.clone(), whole.con.clone());
        prop_assert!(!valid_wp(&left, &fp, FUEL, &caps).unwrap().is_counterexample(), "{}", left);
        prop_assert!(!valid_wp(&right, &fp, FUEL, &caps).unwrap().is_counterexample(), "{}", right);
    }

    #[test]
    fn refinement_transfers_validity(e in arb_expr(), a in arb_cmd(), b in arb_cmd(), c in arb_cmd(), flip in any::<bool>(), p in arb_assertion()) {
        let (fp, caps) = (fp(), caps());
        let factored = Command::seq(Command::if_(e.clone(), a.clone(), b.clone()), c.clone());
        let distributed = Command::if_(e, Command::seq(a, c.clone()), Command::seq(b, c));
        let (c2, c1) = if flip { (distributed, factored) } else { (factored, distributed) };
        let t1 = exact_triple(&p, &c1);
        let t2 = Triple { cmd: c2.clone(), ..t1.clone() };
        if refines_big(&c2, &c1, &fp, FUEL, &caps).unwrap().holds() && valid_big(&t1, &fp, FUEL, &caps).unwrap().holds() {
            prop_assert!(!valid_big(&t2, &fp, FUEL, &caps).unwrap().is_counterexample(), "{}", t2);
        }
    }

    #[test]
    fn big_step_nocontinue(c in arb_cmd(), p in arb_assertion(), rc in arb_assertion()) {
        prop_assume!(!has_toplevel_continue(&c));
        let (fp, caps) = (fp(), caps());
        let t = exact_triple(&p, &c);
        if valid_big(&t, &fp, FUEL, &caps).unwrap().holds() {
            prop_assert!(!valid_big(&with_con(&t, rc), &fp, FUEL, &caps).unwrap().is_counterexample());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn checked_trees_are_never_refuted(c in arb_cmd(), p in arb_assertion(), slot in any::<usize>(), a in arb_assertion(), mutate in any::<bool>()) {
        let (fp, caps) = (fp(), caps());
        let from: StateSet = states_of(&p).intersection(&safe_states(&c, &fp)).copied().collect();
        let (tree, _) = synth_proof(&c, &from, &fp).unwrap();
        prop_assert!(check(&tree, &fp, &caps).unwrap().ok);
        let tree = if mutate {
            let mut k = slot % assertions_in(&tree);
            replace_assertion(&tree, &mut k, &a)
        } else {
            tree
        };
        if check(&tree, &fp, &caps).unwrap().ok {
            let t = conclusion(&tree).unwrap();
            prop_assert!(!valid_big(&t, &fp, FUEL, &caps).unwrap().is_counterexample(), "{}", t);
            prop_assert!(!valid_wp(&t, &fp, FUEL, &caps).unwrap().is_counterexample(), "{}", t);
        }
    }

    #[test]
    fn splitting_a_seq_proof_recomposes(a in arb_cmd(), b in arb_cmd(), p in arb_assertion()) {
        let (fp, caps) = (fp(), caps());
        let c = Command::seq(a, b);
        let from: StateSet = states_of(&p).intersection(&safe_states(&c, &fp)).copied().collect();
        let (tree, _) = synth_proof(&c, &from, &fp).unwrap();
        let target = conclusion(&tree).unwrap();
        let split = inv_seq(&tree).unwrap();
        prop_assert!(check(&split.left, &fp, &caps).unwrap().ok);
        prop_assert!(check(&split.right, &fp, &caps).unwrap().ok);
        let joined = ProofTree::seq(split.mid, split.left, split.right);
        let joined = wrap(joined, target.pre.clone(), target.post.clone(), target.brk.clone(), target.con.clone()).unwrap();
        prop_assert!(check(&joined, &fp, &caps).unwrap().ok);
        prop_assert_eq!(conclusion(&joined).unwrap(), target);
    }

    #[test]
    fn identity_tables_simulate(c in arb_cmd_in(XY)) {
        let fp = Footprint::new(XY, 4).unwrap();
        let rel = identity_table(&c, &fp, Bounds::default(), &caps()).unwrap();
        let report = check_simulation(&rel, &fp, FUEL, &caps()).unwrap();
        prop_assert!(report.ok, "{:?}", report.violations.first().map(ToString::to_string));
    }

    #[test]
    fn small_and_big_refinement_agree(c1 in arb_cmd(), c2 in arb_cmd(), e in arb_expr(), schema in any::<bool>()) {
        let (fp, caps) = (fp(), caps());
        let (l, r) = if schema {
            (Command::seq(Command::if_(e.clone(), c1.clone(), c2.clone()), c1.clone()), Command::if_(e, Command::seq(c1.clone(), c1), Command::seq(c2.clone(), c2)))
        } else {
            (c1, c2)
        };
        let big = refines_big(&l, &r, &fp, FUEL, &caps).unwrap();
        let small = refines_small(&l, &r, &fp, FUEL, &caps).unwrap();
        prop_assert_eq!(big.holds(), small.holds());
        prop_assert_eq!(big.is_counterexample(), small.is_counterexample());
    }

    #[test]
    fn simulating_tables_transfer_wp_validity(
        e in arb_expr_in(XY),
        c1 in arb_cmd_in(XY),
        c2 in arb_cmd_in(XY),
        c3 in arb_cmd_in(XY),
        p in arb_assertion_in(XY),
        q in arb_assertion_in(XY),
    ) {
        let (fp, caps) = (Footprint::new(XY, 4).unwrap(), caps());
        let rel = build_rel_ifseq(&e, &c1, &c2, &c3, &fp, Bounds::default(), &caps).unwrap();
        prop_assume!(check_simulation(&rel, &fp, FUEL, &caps).unwrap().ok);
        let source = Command::seq(Command::if_(e.clone(), c1.clone(), c2.clone()), c3.clone());
        let target = Command::if_(e, Command::seq(c1, c3.clone()), Command::seq(c2, c3));
        let t = Triple::new(p, target, q.clone(), q, Assertion::True);
        if valid_wp(&t, &fp, FUEL, &caps).unwrap().holds() {
            let s = Triple { cmd: source, ..t };
            prop_assert!(!valid_wp(&s, &fp, FUEL, &caps).unwrap().is_counterexample(), "{}", s);
        }
    }

    #[test]
    fn erasing_asserts_keeps_behaviour(c in arb_cmd(), mask in any::<u64>()) {
        let mut m = mask;
        let ann = sprinkle(&c, &mut m);
        prop_assert_eq!(AnnCommand::plain(&c).erase(), c.clone());
        let erased = ann.erase();
        let fp = fp();
        for i in 0..fp.state_count() as u64 {
            let s = fp.state_at(i);
            let (a, b) = (eval_big(&c, &s, FUEL), eval_big(&erased, &s, FUEL));
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn each_command_has_exactly_one_primary_rule() {
    let t = || ProofTree::RSkip(Assertion::True);
    let e = Expr::Const(1);
    let samples = [
        ProofTree::RSkip(Assertion::True),
        ProofTree::RBreak(Assertion::True),
        ProofTree::RContinue(Assertion::True),
        ProofTree::RAssign("x".into(), e.clone(), Assertion::True),
        ProofTree::seq(Assertion::True, t(), t()),
        ProofTree::if_(e, t(), t()),
        ProofTree::loop_(Assertion::True, Assertion::True, t(), t()),
    ];
    let mut by_kind: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for s in &samples {
        by_kind.entry(s.command().kind_name()).or_default().push(s.rule_name());
    }
    assert_eq!(by_kind.len(), 7);
    assert!(by_kind.values().all(|rules| rules.len() == 1), "{by_kind:?}");
    let wrapped = ProofTree::conseq(t(), Assertion::True, Assertion::True, Assertion::True, Assertion::True);
    assert_eq!(wrapped.command(), Command::Skip);
}
