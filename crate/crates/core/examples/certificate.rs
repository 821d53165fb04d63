//! Builds a proof tree by hand, checks it, round-trips it through the
//! certificate format and shows what a corrupted node looks like.

use whilecf::assertions::parse_assertion;
use whilecf::lang::{parse_expr, Caps, Footprint};
use whilecf::proof::{check, conclusion, ProofTree};
use whilecf::verify::{parse_certificate, source_hash, Certificate};

fn main() {
    let a = |s: &str| parse_assertion(s).unwrap();
    let fp = Footprint::new(&["x", "y"], 8).unwrap();
    let caps = Caps::default();

    // {[x] = 2} y = x + x ;; x = y {[x] = 4}
    let second = ProofTree::RAssign("x".into(), parse_expr("y").unwrap(), a("[x] = 4"));
    let first = ProofTree::RAssign("y".into(), parse_expr("x + x").unwrap(), a("[y] = 4"));
    let tree = ProofTree::conseq(
        ProofTree::seq(a("[y] = 4"), first, second),
        a("[x] = 2"),
        a("[x] = 4"),
        a("false"),
        a("false"),
    );
    let report = check(&tree, &fp, &caps).unwrap();
    println!("checks: {}  ({} entailments)", report.ok, report.entailments);
    for f in &report.failures {
        println!("  {f}");
    }
    println!("conclusion: {}\n", conclusion(&tree).unwrap());

    let cert = Certificate { tree, footprint: fp, source_hash: source_hash("y = x + x ;; x = y", "by hand") };
    let text = cert.to_text();
    print!("{text}");
    let back = parse_certificate(&text).unwrap();
    assert_eq!(back, cert);

    let broken = parse_certificate(&text.replace("(seq {[y] = 4}", "(seq {[y] = 5}")).unwrap();
    let report = broken.check(&caps).unwrap();
    println!("\nafter editing the middle assertion:");
    for f in &report.failures {
        println!("  {f}");
    }
}
