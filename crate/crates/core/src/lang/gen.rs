use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{BinOp, Command, Expr, Footprint, UnOp};

/// Knobs for the random program generator.
#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Maximum expression depth.
    pub expr_depth: u32,
    /// Whether `/` and `%` may appear.
    pub partial_ops: bool,
    /// Whether `break` and `continue` may appear.
    pub control: bool,
    /// Whether loops may appear.
    pub loops: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { expr_depth: 2, partial_ops: true, control: true, loops: true }
    }
}

/// Deterministic random command with at most `size` command nodes.
pub fn gen_random_command(seed: u64, size: usize, fp: &Footprint) -> Command {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_command(&mut rng, size.max(1), fp, &GenConfig::default())
}

pub fn gen_command<R: Rng>(rng: &mut R, size: usize, fp: &Footprint, cfg: &GenConfig) -> Command {
    if size < 3 || rng.random_bool(0.12) {
        return gen_leaf(rng, fp, cfg);
    }
    // split most of the remaining budget between two children
    let budget = rng.random_range((size / 2).max(2)..size);
    let left = rng.random_range(1..budget);
    let right = budget - left;
    let roll = rng.random_range(0..10);
    if roll < 4 || (!cfg.loops && roll >= 7) {
        Command::seq(gen_command(rng, left, fp, cfg), gen_command(rng, right, fp, cfg))
    } else if roll < 7 {
        let e = gen_expr(rng, fp, cfg.expr_depth, cfg.partial_ops);
        Command::if_(e, gen_command(rng, left, fp, cfg), gen_command(rng, right, fp, cfg))
    } else {
        Command::for_(gen_command(rng, left, fp, cfg), gen_command(rng, right, fp, cfg))
    }
}

fn gen_leaf<R: Rng>(rng: &mut R, fp: &Footprint, cfg: &GenConfig) -> Command {
    let roll = rng.random_range(0..20);
    match roll {
        0..=1 => Command::Skip,
        2..=4 if cfg.control => Command::Break,
        5..=6 if cfg.control => Command::Continue,
        _ => {
            let x = &fp.vars()[rng.random_range(0..fp.vars().len())];
            Command::assign(x, gen_expr(rng, fp, cfg.expr_depth, cfg.partial_ops))
        }
    }
}

pub fn gen_expr<R: Rng>(rng: &mut R, fp: &Footprint, depth: u32, partial: bool) -> Expr {
    if depth == 0 || rng.random_bool(0.4) {
        return if rng.random_bool(0.6) {
            Expr::Var(fp.vars()[rng.random_range(0..fp.vars().len())].clone())
        } else {
            Expr::Const(rng.random_range(0..fp.modulus().min(4)))
        };
    }
    if rng.random_bool(0.1) {
        let op = if rng.random_bool(0.5) { UnOp::Neg } else { UnOp::Not };
        return Expr::un(op, gen_expr(rng, fp, depth - 1, partial));
    }
    let ops: Vec<BinOp> = BinOp::ALL
        .iter()
        .copied()
        .filter(|op| partial || !matches!(op, BinOp::Div | BinOp::Mod))
        .collect();
    let op = ops[rng.random_range(0..ops.len())];
    Expr::bin(op, gen_expr(rng, fp, depth - 1, partial), gen_expr(rng, fp, depth - 1, partial))
}
