//! The nine acceptance criteria, each printed as one PASS/FAIL line.

use std::io::Write;
use std::time::{Duration, Instant};

use whilecf::assertions::{parse_assertion, Assertion};
use whilecf::bigstep::valid_big;
use whilecf::fuzz::{run_labels, run_suite, FuzzConfig, Suite, SuiteReport};
use whilecf::lang::{Caps, Footprint};
use whilecf::verify::{parse_annotated, parse_spec, residual_goals, symexec_spec, verify_file, Options, VcKind};

struct Line {
    ok: bool,
    text: String,
}

fn cfg(vars: &[&str], m: u32, count: usize, size: usize, seed: u64) -> FuzzConfig {
    let mut c = FuzzConfig::new(Footprint::new(vars, m).unwrap());
    c.count = count;
    c.size = size;
    c.seed = seed;
    c
}

/// No violations, and every property evaluated on `min` instances.
fn suite_line(name: &str, report: &SuiteReport, min: usize, elapsed: Duration, limit: Option<Duration>) -> Line {
    let short: Vec<String> = report
        .labels
        .iter()
        .filter(|l| l.checked() < min)
        .map(|l| format!("{} evaluated only {}", l.label, l.checked()))
        .collect();
    let inconclusive: usize = report.labels.iter().map(|l| l.inconclusive).sum();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let ok = report.ok() && short.is_empty() && in_time;
    let mut text = format!(
        "{name}: {} instances over {} properties, {} violations, {} inconclusive, {:.1}s",
        report.checked(),
        report.labels.len(),
        report.findings.len(),
        inconclusive,
        elapsed.as_secs_f64()
    );
    for s in short {
        text.push_str(&format!("; {s}"));
    }
    if !in_time {
        text.push_str("; over the time limit");
    }
    for f in &report.findings {
        text.push_str(&format!("\n{f}"));
    }
    Line { ok, text }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn criterion_1() -> Line {
    let c = cfg(&["x", "y", "z"], 4, 1000, 12, 1);
    let (r, d) = timed(|| run_suite(Suite::Semantics, &c).unwrap());
    suite_line("semantics agreement", &r, 1000, d, Some(Duration::from_secs(60)))
}

fn criterion_2() -> Line {
    let c = cfg(&["x", "y", "z"], 4, 200, 10, 2);
    let (r, d) = timed(|| run_suite(Suite::Oracles, &c).unwrap());
    suite_line("big-step and wp oracles agree", &r, 200, d, None)
}

fn criterion_3() -> Line {
    let c = cfg(&["x", "y", "z"], 4, 100, 10, 3);
    let (r, d) = timed(|| run_suite(Suite::Rules, &c).unwrap());
    suite_line("primary rules are locally sound", &r, 100, d, None)
}

fn criterion_4() -> Line {
    let c = cfg(&["x", "y", "z"], 4, 100, 10, 4);
    let (r, d) = timed(|| run_suite(Suite::Certificates, &c).unwrap());
    suite_line("symbolic-execution certificates re-check", &r, 100, d, None)
}

fn criterion_5() -> Line {
    let c = cfg(&["x", "y", "z"], 4, 60, 10, 5);
    let (r, d) = timed(|| run_suite(Suite::Transformers, &c).unwrap());
    suite_line("extended-rule transformers", &r, 50, d, None)
}

fn criterion_6() -> Line {
    let c = cfg(&["x", "y", "z"], 4, 100, 9, 6);
    let (r, d) = timed(|| run_suite(Suite::Refinements, &c).unwrap());
    suite_line("if-seq and loop-nocontinue refinements", &r, 100, d, None)
}

fn criterion_7() -> Line {
    let c = cfg(&["x", "y"], 4, 20, 6, 7);
    let (r, d) = timed(|| run_suite(Suite::Simulation, &c).unwrap());
    suite_line("simulation tables, transfer lemmas, mutation detection", &r, 20, d, None)
}

fn worked_examples() -> Result<String, String> {
    let caps = Caps::default();
    let div_spec = "vars: x y z\nmodulus: 8\npre: exists n. [x] = n * m /\\ [y] = m /\\ 0 < m\npost: exists n. [z] = n /\\ [x] = n * m /\\ [y] = m\n";
    let spec = parse_spec(div_spec).map_err(|e| e.to_string())?;
    let out = symexec_spec(&parse_annotated("z = x / y ;; skip").unwrap(), &spec, Options::default()).map_err(|e| e.to_string())?;
    let goals = residual_goals(&out.vcs);
    let shape_ok = goals.len() == 1
        && goals[0].kind == VcKind::Exit
        && matches!(&goals[0].lhs, Assertion::Exists(_, body)
            if matches!(&**body, Assertion::And(first, _) if **first == parse_assertion("[z] = [x / y]").unwrap()));
    if !shape_ok {
        return Err(format!("division fragment left {} goals", goals.len()));
    }

    let halving = "{inv: [y] = 2 /\\ ([x] = 0 \\/ [x] = 4)} for(;; x = z / y) if x > 1 then break else z = x / y";
    let halving_spec = "vars: x y z\nmodulus: 8\npre: [y] = 2 /\\ ([x] = 0 \\/ [x] = 4)\npost: [y] = 2 /\\ [x] = 4\n";
    let spec = parse_spec(halving_spec).unwrap();
    let out = symexec_spec(&parse_annotated(halving).unwrap(), &spec, Options::default()).map_err(|e| e.to_string())?;
    let n = residual_goals(&out.vcs).len();
    if n != 2 {
        return Err(format!("loop skeleton left {n} goals, expected 2"));
    }
    let r = verify_file(halving, halving_spec, Options::default(), &caps).map_err(|e| e.to_string())?;
    if !r.ok() {
        return Err("loop skeleton does not verify".into());
    }

    let mid = "for(;; y = y + 1) (x = x + 1 ;; assert 0 < [x] /\\ [x] <= 4 ;; if 3 < x then break else skip)";
    let mid_spec = "vars: x y\nmodulus: 8\npre: [x] = 0\npost: [x] = 4\n";
    let r = verify_file(mid, mid_spec, Options::default(), &caps).map_err(|e| e.to_string())?;
    let cert = r.certificate.ok_or("mid-assert loop does not verify")?;
    if !cert.check(&caps).map_err(|e| e.to_string())?.ok {
        return Err("mid-assert certificate does not check".into());
    }
    let t = cert.conclusion().map_err(|e| e.to_string())?;
    if !valid_big(&t, &cert.footprint, 10_000, &caps).map_err(|e| e.to_string())?.holds() {
        return Err("mid-assert conclusion is not valid".into());
    }
    Ok("division fragment: 1 terminal goal; loop skeleton: 2 goals; mid-assert loop: checking certificate".into())
}

fn criterion_8() -> Line {
    match worked_examples() {
        Ok(s) => Line { ok: true, text: format!("worked examples: {s}") },
        Err(e) => Line { ok: false, text: format!("worked examples: {e}") },
    }
}

fn criterion_9() -> Line {
    let c = cfg(&["x", "y", "z"], 4, 200, 9, 9);
    let (r, d) = timed(|| run_labels(Suite::Implications, &c, |_| true).unwrap());
    suite_line("big-step if-seq and nocontinue implications", &r, 200, d, None)
}

#[test]
fn acceptance_criteria() {
    let criteria: [fn() -> Line; 9] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (i, f) in criteria.iter().enumerate() {
        let line = f();
        let tag = if line.ok { "PASS" } else { "FAIL" };
        writeln!(out, "[{tag}] criterion {}: {}", i + 1, line.text).unwrap();
        out.flush().unwrap();
        if !line.ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
