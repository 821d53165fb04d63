//! The derived rules as proof transformers: each takes checking trees and
//! returns a checking tree for the rule's conclusion.

use whilecf::assertions::parse_assertion;
use whilecf::extended::{if_seq, inv_seq, loop_nocontinue, merge_disj, nocontinue, seq_assoc};
use whilecf::lang::{parse_command, Caps, Footprint};
use whilecf::proof::{check, conclusion, ProofTree};
use whilecf::synth::{safe_states, synth_proof};

fn proof(c: &str, fp: &Footprint) -> ProofTree {
    let c = parse_command(c).unwrap();
    synth_proof(&c, &safe_states(&c, fp), fp).unwrap().0
}

fn report(name: &str, t: &ProofTree, fp: &Footprint) {
    let ok = check(t, fp, &Caps::default()).unwrap().ok;
    println!("{name:<16} checks={ok:<5} {} nodes", t.node_count());
    println!("{:<16} {}", "", conclusion(t).unwrap());
}

fn main() {
    let fp = Footprint::new(&["x", "y"], 4).unwrap();

    let t = proof("if x then (x = 0 ;; y = y + 1) else (y = 2 ;; y = y + 1)", &fp);
    report("distributed", &t, &fp);
    report("if_seq", &if_seq(&t).unwrap(), &fp);

    let t = proof("for(;; skip) (x = x + 1 ;; if x == 3 then break else y = x)", &fp);
    report("fused", &t, &fp);
    report("loop_nocontinue", &loop_nocontinue(&t).unwrap(), &fp);

    let t = proof("(x = 1 ;; y = x) ;; x = 2", &fp);
    report("left nested", &t, &fp);
    report("seq_assoc", &seq_assoc(&t).unwrap(), &fp);
    let split = inv_seq(&t).unwrap();
    println!("{:<16} mid {}", "inv_seq", split.mid);

    let t = proof("x = y + 1", &fp);
    report("nocontinue", &nocontinue(&t, &parse_assertion("[x] = 7").unwrap()).unwrap(), &fp);

    // two proofs about the same command from disjoint preconditions
    let c = parse_command("x = x * 2").unwrap();
    let (a, _) = synth_proof(&c, &[0, 1].into(), &fp).unwrap();
    let (b, _) = synth_proof(&c, &[5].into(), &fp).unwrap();
    report("merge_disj", &merge_disj(&a, &b).unwrap(), &fp);
}
