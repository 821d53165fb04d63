//! Simulation tables for the two refinements, the transfer lemmas on
//! them, and a corrupted table being caught.

use whilecf::assertions::parse_assertion;
use whilecf::lang::{parse_command, parse_expr, Caps, Footprint};
use whilecf::simulation::{
    build_rel_ifseq, build_rel_loop_nocontinue, check_simulation, lemma_guard_sim_check, lemma_wp_sim_check, mutate,
    Bounds, RelationTable,
};
use whilecf::smallstep::Posts;

fn exercise(name: &str, rel: &RelationTable, fp: &Footprint, caps: &Caps) {
    let a = |s: &str| parse_assertion(s).unwrap();
    println!("{name}: {} pairs", rel.len());
    for p in rel.pairs().iter().take(4) {
        println!("  {p}");
    }
    println!("  simulation:  {}", check_simulation(rel, fp, 1000, caps).unwrap().ok);
    let posts = Posts::new(a("[x] <= 2"), a("[y] = 1"), a("false"));
    println!("  wp transfer: {}", lemma_wp_sim_check(rel, &posts, fp, 1000, caps).unwrap());
    println!("  guard transfer: {}", lemma_guard_sim_check(rel, &a("0 < [y]"), fp, 1000, caps).unwrap());
    let broken = mutate(rel, rel.len() / 2, fp, caps).unwrap();
    let report = check_simulation(&broken, fp, 1000, caps).unwrap();
    match report.violations.first() {
        Some(v) => print!("  after mutating pair {}: {v}", rel.len() / 2),
        None => println!("  mutation went unnoticed"),
    }
    println!();
}

fn main() {
    let fp = Footprint::new(&["x", "y"], 4).unwrap();
    let caps = Caps::default();
    let c = |s: &str| parse_command(s).unwrap();

    let rel = build_rel_ifseq(&parse_expr("x").unwrap(), &c("y = 1"), &c("break"), &c("x = x / y"), &fp, Bounds::default(), &caps).unwrap();
    exercise("if-seq", &rel, &fp, &caps);

    let rel = build_rel_loop_nocontinue(&c("x = x + 1"), &c("if x == 3 then break else y = x"), &fp, Bounds::default(), &caps).unwrap();
    exercise("loop-nocontinue", &rel, &fp, &caps);
}
