//! A loop whose only useful invariant sits in the middle of its body.
//! The verifier proves the rotated loop and rebuilds a proof of the original.

use whilecf::bigstep::valid_big;
use whilecf::lang::Caps;
use whilecf::verify::{verify_file, Options};

const PROGRAM: &str = "for(;; y = y + 1) (x = x + 1 ;; assert 0 < [x] /\\ [x] <= 4 ;; if 3 < x then break else skip)";
const SPEC: &str = "vars: x y\nmodulus: 8\npre: [x] = 0\npost: [x] = 4\n";

fn main() {
    let caps = Caps::default();
    let report = verify_file(PROGRAM, SPEC, Options::default(), &caps).unwrap();
    for (vc, v) in &report.vcs {
        println!("{vc}\n    {v}");
    }
    let cert = report.certificate.expect("the program verifies");
    println!("\n{}", cert.to_text());
    let t = cert.conclusion().unwrap();
    println!("re-check: {}", cert.check(&caps).unwrap().ok);
    println!("big-step oracle on the conclusion: {}", valid_big(&t, &cert.footprint, 10_000, &caps).unwrap());
}
