//! Asks the three validity oracles about the same triples.

use whilecf::assertions::parse_assertion;
use whilecf::bigstep::valid_big;
use whilecf::lang::{parse_command, Caps, Footprint};
use whilecf::proof::Triple;
use whilecf::smallstep::{enumerate_continuations, valid_cont, valid_wp};

fn triple(pre: &str, c: &str, post: &str, brk: &str) -> Triple {
    let a = |s| parse_assertion(s).unwrap();
    Triple::new(a(pre), parse_command(c).unwrap(), a(post), a(brk), a("false"))
}

fn main() {
    let fp = Footprint::new(&["x", "y"], 4).unwrap();
    let caps = Caps::default();
    let family = enumerate_continuations(&fp, 1, 2, &caps).unwrap();
    println!("continuation family: {} stacks\n", family.len());

    let triples = [
        triple("[x] = 1", "skip", "[x] = 1", "false"),
        triple("0 < [y]", "x = x / y", "true", "false"),
        triple("true", "x = x / y", "true", "false"),
        triple("true", "if x then break else y = 1", "[y] = 1", "~([x] = 0)"),
        triple("true", "if x then break else y = 1", "[y] = 1", "false"),
        // divergence never refutes a partial-correctness triple
        triple("true", "for(;; skip) skip", "false", "false"),
    ];
    for t in &triples {
        println!("{t}");
        println!("  big-step      {}", valid_big(t, &fp, 1000, &caps).unwrap());
        println!("  wp            {}", valid_wp(t, &fp, 1000, &caps).unwrap());
        println!("  continuations {}", valid_cont(t, &fp, 1000, &family, &caps).unwrap());
    }
}
