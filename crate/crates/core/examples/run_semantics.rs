//! Runs one program under both semantics and prints the small-step trace.

use whilecf::bigstep::eval_big;
use whilecf::lang::{parse_command, Footprint};
use whilecf::smallstep::{run_small, trace, Config};

fn main() {
    let c = parse_command("for(;; i = i + 1) (if i == 3 then break else skip ;; if i % 2 then continue else s = s + i)").unwrap();
    let fp = Footprint::new(&["i", "s"], 8).unwrap();

    for i in 0..fp.modulus() {
        let s = fp.state(&[i, 0]).unwrap();
        let big = eval_big(&c, &s, 10_000);
        let small = run_small(&Config::initial(&c, &s), 10_000);
        assert_eq!(big, small);
        println!("{s:<14} {big}");
    }

    let (steps, last) = trace(&Config::initial(&c, &fp.zero_state()), 40);
    println!("\nfirst {} configurations from the zero state:", steps.len());
    for (n, cfg) in steps.iter().enumerate() {
        println!("{n:>3}  {cfg}");
    }
    if last.is_none() {
        println!("     ...");
    }
}
