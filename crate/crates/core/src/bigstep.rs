//! Fuel-bounded big-step evaluation and the big-step validity oracle.

use std::fmt;

use crate::assertions::{models, satisfies, Witness};
use crate::error::Result;
use crate::lang::{enumerate_states, eval_expr, Caps, Command, ExitKind, Footprint, State};
use crate::proof::Triple;

pub use crate::assertions::Verdict;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Terminated(ExitKind, State),
    Error,
    OutOfFuel,
}

impl Outcome {
    pub fn is_conclusive(&self) -> bool {
        !matches!(self, Outcome::OutOfFuel)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Terminated(ek, s) => write!(f, "Terminated {ek} {s}"),
            Outcome::Error => write!(f, "Error"),
            Outcome::OutOfFuel => write!(f, "OutOfFuel"),
        }
    }
}

/// Evaluates `c` from `s`, allowing derivations of depth at most `fuel`.
///
/// Loops are checked for a repeated state at the loop head; a repeat means
/// the loop diverges, which is reported as `OutOfFuel` without spending the
/// rest of the budget.
pub fn eval_big(c: &Command, s: &State, fuel: u64) -> Outcome {
    if fuel == 0 {
        return Outcome::OutOfFuel;
    }
    match c {
        Command::Skip => Outcome::Terminated(ExitKind::Normal, s.clone()),
        Command::Break => Outcome::Terminated(ExitKind::Brk, s.clone()),
        Command::Continue => Outcome::Terminated(ExitKind::Con, s.clone()),
        Command::Assign(x, e) => match eval_expr(e, s) {
            Ok(v) => Outcome::Terminated(ExitKind::Normal, s.with(x, v)),
            Err(_) => Outcome::Error,
        },
        Command::Seq(a, b) => match eval_big(a, s, fuel - 1) {
            Outcome::Terminated(ExitKind::Normal, s2) => eval_big(b, &s2, fuel - 1),
            other => other,
        },
        Command::If(e, a, b) => match eval_expr(e, s) {
            Ok(0) => eval_big(b, s, fuel - 1),
            Ok(_) => eval_big(a, s, fuel - 1),
            Err(_) => Outcome::Error,
        },
        Command::For(body, incr) => eval_loop(body, incr, s, fuel),
    }
}

fn eval_loop(body: &Command, incr: &Command, s: &State, fuel: u64) -> Outcome {
    let mut cur = s.clone();
    // Brent's cycle detection over loop-head states
    let mut saved = cur.clone();
    let (mut power, mut lam) = (1u64, 0u64);
    let mut depth = fuel;
    loop {
        if depth == 0 {
            return Outcome::OutOfFuel;
        }
        match eval_big(body, &cur, depth - 1) {
            Outcome::Terminated(ExitKind::Brk, s2) => return Outcome::Terminated(ExitKind::Normal, s2),
            Outcome::Terminated(_, s2) => match eval_big(incr, &s2, depth - 1) {
                Outcome::Terminated(ExitKind::Normal, s3) => cur = s3,
                Outcome::Terminated(ExitKind::Brk, s3) => return Outcome::Terminated(ExitKind::Normal, s3),
                Outcome::Terminated(ExitKind::Con, _) | Outcome::Error => return Outcome::Error,
                Outcome::OutOfFuel => return Outcome::OutOfFuel,
            },
            other => return other,
        }
        depth -= 1;
        if cur == saved {
            return Outcome::OutOfFuel;
        }
        lam += 1;
        if lam == power {
            saved = cur.clone();
            power *= 2;
            lam = 0;
        }
    }
}

/// Whether `s2` satisfies the postcondition selected by `ek`.
pub(crate) fn post_holds(t: &Triple, ek: ExitKind, s2: &State, env: &crate::assertions::Env) -> bool {
    let post = match ek {
        ExitKind::Normal => &t.post,
        ExitKind::Brk => &t.brk,
        ExitKind::Con => &t.con,
    };
    satisfies(s2, env, post)
}

/// `⊨_b {P} c {Q, [Rb, Rc]}` over every state and logic-variable valuation.
pub fn valid_big(t: &Triple, fp: &Footprint, fuel: u64, caps: &Caps) -> Result<Verdict> {
    let mut pending = Vec::new();
    for (s, env) in models(&t.pre, &t.free_lvars(fp), fp, caps)? {
        match eval_big(&t.cmd, &s, fuel) {
            Outcome::Error => {
                return Ok(Verdict::CounterExample(Witness::new(s, env).with_detail("execution errors")));
            }
            Outcome::Terminated(ek, s2) => {
                if !post_holds(t, ek, &s2, &env) {
                    let detail = format!("exits {ek} in {s2}, violating the {ek} postcondition");
                    return Ok(Verdict::CounterExample(Witness::new(s, env).with_detail(detail)));
                }
            }
            Outcome::OutOfFuel => pending.push(Witness::new(s, env)),
        }
    }
    Ok(if pending.is_empty() { Verdict::Holds } else { Verdict::Inconclusive(pending) })
}

/// `c1 ⊑ c2`: each terminal outcome and each error of `c1` is one of `c2`.
pub fn refines_big(c1: &Command, c2: &Command, fp: &Footprint, fuel: u64, caps: &Caps) -> Result<Verdict> {
    let mut pending = Vec::new();
    for s in enumerate_states(fp, caps)? {
        let o1 = eval_big(c1, &s, fuel);
        if o1 == Outcome::OutOfFuel {
            continue;
        }
        let o2 = eval_big(c2, &s, fuel);
        if o2 == Outcome::OutOfFuel {
            pending.push(Witness::new(s, Default::default()));
        } else if o1 != o2 {
            let detail = format!("left gives {o1}, right gives {o2}");
            return Ok(Verdict::CounterExample(Witness::new(s, Default::default()).with_detail(detail)));
        }
    }
    Ok(if pending.is_empty() { Verdict::Holds } else { Verdict::Inconclusive(pending) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assertions::{parse_assertion, Assertion};
    use crate::lang::parse_command;

    fn fp() -> Footprint {
        Footprint::new(&["x", "y", "z"], 8).unwrap()
    }

    fn run(c: &str, vals: &[u32]) -> Outcome {
        eval_big(&parse_command(c).unwrap(), &fp().state(vals).unwrap(), 200)
    }

    fn triple(p: &str, c: &str, q: &str, rb: &str, rc: &str) -> Triple {
        Triple::new(
            parse_assertion(p).unwrap(),
            parse_command(c).unwrap(),
            parse_assertion(q).unwrap(),
            parse_assertion(rb).unwrap(),
            parse_assertion(rc).unwrap(),
        )
    }

    #[test]
    fn basic_outcomes() {
        let s = fp().state(&[1, 2, 3]).unwrap();
        assert_eq!(run("skip", &[1, 2, 3]), Outcome::Terminated(ExitKind::Normal, s.clone()));
        assert_eq!(run("z = x / y", &[4, 0, 0]), Outcome::Error);
        assert_eq!(run("for(;; skip) skip", &[0, 0, 0]), Outcome::OutOfFuel);
        assert_eq!(eval_big(&Command::dead(), &s, 50), Outcome::OutOfFuel);
        assert_eq!(run("break ;; x = 1", &[1, 2, 3]), Outcome::Terminated(ExitKind::Brk, s.clone()));
    }

    #[test]
    fn loops() {
        assert_eq!(
            run("for(;; x = x + 1) if x == 5 then break else skip", &[0, 0, 0]),
            Outcome::Terminated(ExitKind::Normal, fp().state(&[5, 0, 0]).unwrap())
        );
        // continue skips the rest of the body but runs the increment
        assert_eq!(
            run("for(;; x = x + 1) (if x == 3 then break else continue ;; y = 7)", &[0, 0, 0]),
            Outcome::Terminated(ExitKind::Normal, fp().state(&[3, 0, 0]).unwrap())
        );
        assert_eq!(
            run("for(;; break) x = x + 2", &[0, 0, 0]),
            Outcome::Terminated(ExitKind::Normal, fp().state(&[2, 0, 0]).unwrap())
        );
        assert_eq!(run("for(;; continue) skip", &[0, 0, 0]), Outcome::Error);
    }

    #[test]
    fn fuel_is_derivation_depth() {
        let s = fp().zero_state();
        let c = parse_command("skip ;; skip").unwrap();
        assert_eq!(eval_big(&c, &s, 1), Outcome::OutOfFuel);
        assert!(eval_big(&c, &s, 2).is_conclusive());
        let c = parse_command("for(;; x = x + 1) if x == 7 then break else skip").unwrap();
        let depths: Vec<bool> = (1..20).map(|f| eval_big(&c, &s, f).is_conclusive()).collect();
        let first = depths.iter().position(|b| *b).unwrap();
        assert!(depths[first..].iter().all(|b| *b));
    }

    #[test]
    fn validity_examples() {
        let fp = fp();
        let caps = Caps::default();
        for p in ["true", "[x] = 1", "false", "exists n. [x] = n * [y]"] {
            let t = triple(p, "skip", p, "false", "false");
            assert!(valid_big(&t, &fp, 100, &caps).unwrap().holds());
        }
        let t = triple("true", "break", "false", "true", "false");
        assert!(valid_big(&t, &fp, 100, &caps).unwrap().holds());
        let t = triple("[y] = 0", "z = x / y", "true", "false", "false");
        assert!(valid_big(&t, &fp, 100, &caps).unwrap().is_counterexample());
        let t = Triple::new(Assertion::True, Command::dead(), Assertion::False, Assertion::False, Assertion::False);
        assert!(matches!(valid_big(&t, &fp, 100, &caps).unwrap(), Verdict::Inconclusive(_)));
    }

    #[test]
    fn refinement_examples() {
        let fp = Footprint::new(&["x", "y"], 4).unwrap();
        let caps = Caps::default();
        let c = parse_command("for(;; y = y + 1) if x < y then break else x = x + 1").unwrap();
        assert!(refines_big(&c, &c, &fp, 200, &caps).unwrap().is_conclusive());
        let a = parse_command("(if x then y = 1 else break) ;; x = x / y").unwrap();
        let b = parse_command("if x then y = 1 ;; x = x / y else (break ;; x = x / y)").unwrap();
        assert!(refines_big(&a, &b, &fp, 200, &caps).unwrap().holds());
        let a = parse_command("for(;; y = y + 1) if x < y then break else x = x + 2").unwrap();
        let b = parse_command("for(;; skip) ((if x < y then break else x = x + 2) ;; y = y + 1)").unwrap();
        assert!(!refines_big(&a, &b, &fp, 200, &caps).unwrap().is_counterexample());
        let skip = Command::Skip;
        assert!(refines_big(&skip, &Command::Break, &fp, 10, &caps).unwrap().is_counterexample());
    }
}
