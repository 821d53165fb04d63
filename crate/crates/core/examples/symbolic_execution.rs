//! Forward symbolic execution: the conditions it generates and the goals
//! left once the mechanical ones are set aside.

use whilecf::lang::Caps;
use whilecf::verify::{discharge, parse_annotated, parse_spec, residual_goals, symexec_spec, Options};

fn show(program: &str, spec: &str) {
    let spec = parse_spec(spec).unwrap();
    let c = parse_annotated(program).unwrap();
    let out = symexec_spec(&c, &spec, Options::default()).unwrap();
    println!("{}", program.trim());
    println!("  {} conditions, residual goals:", out.vcs.len());
    for g in residual_goals(&out.vcs) {
        println!("    {g}");
    }
    for (vc, v) in discharge(&out.vcs, &spec.footprint, &Caps::default()).unwrap() {
        if !v.holds() {
            println!("  fails: {vc}\n         {v}");
        }
    }
    println!();
}

fn main() {
    // the existential survives the assignment; modulo 8, 1 = 3 * 3 without 3 dividing 1
    show(
        "z = x / y ;; skip",
        "vars: x y z\nmodulus: 8\npre: exists n. [x] = n * m /\\ [y] = m /\\ 0 < m\npost: exists n. [z] = n /\\ [x] = n * m /\\ [y] = m\n",
    );
    // the same fragment with a post that holds modulo 8
    show(
        "z = x / y ;; skip",
        "vars: x y z\nmodulus: 8\npre: 0 < [y]\npost: [z] = [x / y]\n",
    );
    show(
        "{inv: [y] = 2 /\\ ([x] = 0 \\/ [x] = 4)} for(;; x = z / y) if x > 1 then break else z = x / y",
        "vars: x y z\nmodulus: 8\npre: [y] = 2 /\\ ([x] = 0 \\/ [x] = 4)\npost: [y] = 2 /\\ [x] = 4\n",
    );
}
