//! Span dimensions of boundary spaces, grid by grid, for a random family.
//!
//! `cargo run --release --example region_check -- [d] [seed]`

use peps_injectivity::generators::{generate, FamilyKind, FamilyRecipe};
use peps_injectivity::injectivity::check_region;
use peps_injectivity::linalg::FloatEngine;
use peps_injectivity::{GridSpec, Limits};

fn main() -> peps_injectivity::Result<()> {
    let mut args = std::env::args().skip(1);
    let d: usize = args.next().map_or(4, |s| s.parse().expect("d"));
    let seed: u64 = args.next().map_or(11, |s| s.parse().expect("seed"));
    let fam = generate(&FamilyRecipe::resolve(FamilyKind::RandomGaussian, Some(2), Some(2), Some(d), Some(seed))?)?.to_float();
    let engine = FloatEngine::new(1e-9);
    for s in ["1x1", "1x2", "2x1", "2x2", "1x3", "2x3"] {
        let spec: GridSpec = s.parse()?;
        let r = check_region(&spec, &fam, &engine, &Limits::default())?;
        println!("G({s}): span {:>5} of {:>5}  {}", r.span_dim, r.full_dim, if r.injective { "injective" } else { "" });
    }
    Ok(())
}
