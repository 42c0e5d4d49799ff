//! Minimal injective grid sizes below a cap.
//!
//! `cargo run --release --example frontier_search -- [cap] [d] [seed]`

use peps_injectivity::generators::{generate, FamilyKind, FamilyRecipe};
use peps_injectivity::injectivity::minimal_injective_regions;
use peps_injectivity::linalg::FloatEngine;
use peps_injectivity::{GridSpec, Limits};

fn main() -> peps_injectivity::Result<()> {
    let mut args = std::env::args().skip(1);
    let cap: GridSpec = args.next().unwrap_or_else(|| "3x3".into()).parse()?;
    let d: usize = args.next().map_or(4, |s| s.parse().expect("d"));
    let seed: u64 = args.next().map_or(11, |s| s.parse().expect("seed"));
    let recipe = FamilyRecipe::resolve(FamilyKind::RandomGaussian, Some(cap.n()), Some(2), Some(d), Some(seed))?;
    let fam = generate(&recipe)?.to_float();
    let f = minimal_injective_regions(&fam, &cap, &FloatEngine::new(1e-9), &Limits::default())?;
    for v in &f.verdicts {
        println!("  G({}) {:?}", v.spec, v.status);
    }
    let show = |gs: &[GridSpec]| gs.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ");
    println!("minimal injective: [{}]", show(&f.minimal_injective));
    if !f.complete_within_cap {
        println!("undecided: [{}]", show(&f.undecided));
    }
    println!("non-injective verdicts hold up to {} only", f.explored_cap);
    Ok(())
}
