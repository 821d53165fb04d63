//! Runs every property suite on a small budget.

use whilecf::fuzz::{run_suite, FuzzConfig, Suite};
use whilecf::lang::Footprint;

fn main() {
    let mut cfg = FuzzConfig::new(Footprint::new(&["x", "y", "z"], 4).unwrap());
    cfg.count = 20;
    cfg.size = 8;
    cfg.seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    for suite in Suite::ALL {
        let report = run_suite(suite, &cfg).unwrap();
        print!("{report}");
    }
}
