use whilecf::assertions::{parse_assertion, Assertion};
use whilecf::bigstep::valid_big;
use whilecf::lang::Caps;
use whilecf::proof::{check, conclusion};
use whilecf::verify::{parse_annotated, parse_spec, residual_goals, symexec_spec, verify_file, Options, Toggle, VcKind};

const DIV_SPEC: &str = "\
vars: x y z
modulus: 8
pre: exists n. [x] = n * m /\\ [y] = m /\\ 0 < m
post: exists n. [z] = n /\\ [x] = n * m /\\ [y] = m
";

#[test]
fn division_fragment_has_one_terminal_goal() {
    let spec = parse_spec(DIV_SPEC).unwrap();
    let c = parse_annotated("z = x / y ;; skip").unwrap();
    let out = symexec_spec(&c, &spec, Options::default()).unwrap();
    let goals = residual_goals(&out.vcs);
    assert_eq!(goals.len(), 1);
    assert_eq!(goals[0].kind, VcKind::Exit);
    match &goals[0].lhs {
        Assertion::Exists(n, body) => {
            assert_eq!(n, "n");
            let Assertion::And(first, _) = &**body else { panic!("{body}") };
            assert_eq!(**first, parse_assertion("[z] = [x / y]").unwrap());
        }
        other => panic!("{other}"),
    }
    assert!(out.vcs.iter().filter(|v| v.kind == VcKind::Safety).count() >= 1);
}

const HALVING_PROGRAM: &str = "{inv: [y] = 2 /\\ ([x] = 0 \\/ [x] = 4)} for(;; x = z / y) if x > 1 then break else z = x / y";
const HALVING_SPEC: &str = "\
vars: x y z
modulus: 8
pre: [y] = 2 /\\ ([x] = 0 \\/ [x] = 4)
post: [y] = 2 /\\ [x] = 4
";

#[test]
fn fused_loop_leaves_two_goals() {
    let spec = parse_spec(HALVING_SPEC).unwrap();
    let c = parse_annotated(HALVING_PROGRAM).unwrap();
    let out = symexec_spec(&c, &spec, Options::default()).unwrap();
    let goals = residual_goals(&out.vcs);
    assert_eq!(goals.len(), 2, "{}", goals.iter().map(|g| format!("{g}\n")).collect::<String>());
    let kinds: Vec<VcKind> = goals.iter().map(|g| g.kind).collect();
    assert!(kinds.contains(&VcKind::Exit) && kinds.contains(&VcKind::Incr));
    let r = verify_file(HALVING_PROGRAM, HALVING_SPEC, Options::default(), &Caps::default()).unwrap();
    let cert = r.certificate.expect("verifies");
    assert_eq!(cert.conclusion().unwrap().cmd, c.erase());
}

#[test]
fn preprocessing_does_not_change_the_triple() {
    let prog = "{inv: [y] = 2 /\\ ([x] = 0 \\/ [x] = 4)} {incr_inv: [y] = 2 /\\ [x] = 0 /\\ [z] = 0} for(;; x = z / y) if x > 1 then break else z = x / y";
    let mut seen = Vec::new();
    for if_seq in [Toggle::On, Toggle::Off, Toggle::Auto] {
        for loop_nocontinue in [Toggle::On, Toggle::Off, Toggle::Auto] {
            let r = verify_file(prog, HALVING_SPEC, Options { if_seq, loop_nocontinue }, &Caps::default()).unwrap();
            let cert = r.certificate.unwrap_or_else(|| panic!("{if_seq:?} {loop_nocontinue:?}"));
            seen.push(cert.conclusion().unwrap());
        }
    }
    assert!(seen.windows(2).all(|w| w[0] == w[1]));
}

const REORDER_PROGRAM: &str = "for(;; y = y + 1) (x = x + 1 ;; assert 0 < [x] /\\ [x] <= 4 ;; if 3 < x then break else skip)";
const REORDER_SPEC: &str = "\
vars: x y
modulus: 8
pre: [x] = 0
post: [x] = 4
";

#[test]
fn mid_assert_loop_certificate() {
    let r = verify_file(REORDER_PROGRAM, REORDER_SPEC, Options::default(), &Caps::default()).unwrap();
    for (vc, v) in &r.vcs {
        assert!(v.holds(), "{vc}: {v}");
    }
    let cert = r.certificate.expect("verifies");
    let caps = Caps::default();
    assert!(check(&cert.tree, &cert.footprint, &caps).unwrap().ok);
    let t = conclusion(&cert.tree).unwrap();
    assert_eq!(t.cmd, parse_annotated(REORDER_PROGRAM).unwrap().erase());
    assert!(valid_big(&t, &cert.footprint, 2000, &caps).unwrap().holds());
    // the loop invariants are the entry-or-rotated one and the mid-body one
    let text = cert.to_text();
    assert!(text.contains("(loop"));
}
