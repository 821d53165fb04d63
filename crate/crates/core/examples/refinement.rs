//! Refinement checked two ways, through terminal outcomes of the big-step
//! evaluator and of the abstract machine.

use whilecf::bigstep::refines_big;
use whilecf::lang::{parse_command, Caps, Footprint};
use whilecf::simulation::refines_small;

fn main() {
    let fp = Footprint::new(&["x", "y"], 4).unwrap();
    let caps = Caps::default();
    let pairs = [
        ("(if x then y = 1 else break) ;; x = x / y", "if x then (y = 1 ;; x = x / y) else (break ;; x = x / y)"),
        ("for(;; y = y + x) x = x + 1", "for(;; skip) (x = x + 1 ;; y = y + x)"),
        // a continue in the body skips the increment only in the original loop
        (
            "for(;; y = y + 1) (if 1 < y then break else skip ;; if x then (x = 0 ;; y = y + 2 ;; continue) else skip)",
            "for(;; skip) ((if 1 < y then break else skip ;; if x then (x = 0 ;; y = y + 2 ;; continue) else skip) ;; y = y + 1)",
        ),
        ("x = 1", "x = 2"),
    ];
    for (l, r) in pairs {
        let (l, r) = (parse_command(l).unwrap(), parse_command(r).unwrap());
        println!("{l}\n  refines {r}");
        println!("  big-step:   {}", refines_big(&l, &r, &fp, 1000, &caps).unwrap());
        println!("  small-step: {}", refines_small(&l, &r, &fp, 1000, &caps).unwrap());
    }
}
