//! The boundary sweep against brute-force enumeration of all `d^|V|`
//! assignments, in both engines.

use peps_injectivity::contraction::{brute_force_span, sweep_span, SweepOptions};
use peps_injectivity::generators::{generate, FamilyKind, FamilyRecipe};
use peps_injectivity::linalg::{ExactEngine, FloatEngine};
use peps_injectivity::{GridSpec, Limits};

fn main() -> peps_injectivity::Result<()> {
    let limits = Limits::default();
    for s in ["3", "1x2", "2x2", "1x3"] {
        let spec: GridSpec = s.parse()?;
        for d in 1..=3 {
            let fam = generate(&FamilyRecipe::resolve(FamilyKind::RandomInteger, Some(spec.n()), Some(2), Some(d), Some(42))?)?;
            let exact = fam.to_exact_integers()?;
            let float = fam.to_float();
            let sweep_r = sweep_span(&spec, &exact, &ExactEngine::new(), &SweepOptions::default())?.dim();
            let (m, brute_r) = brute_force_span(&spec, &exact, &ExactEngine::new(), &limits)?;
            let sweep_f = sweep_span(&spec, &float, &FloatEngine::new(1e-9), &SweepOptions::default())?.dim();
            let (_, brute_f) = brute_force_span(&spec, &float, &FloatEngine::new(1e-9), &limits)?;
            let ok = sweep_r == brute_r && sweep_f == brute_f && sweep_r == sweep_f;
            println!(
                "G({s:<3}) d={d}: matrix {:>3}x{:<3} rational {sweep_r}/{brute_r} float {sweep_f}/{brute_f} {}",
                m.rows(),
                m.cols(),
                if ok { "ok" } else { "MISMATCH" }
            );
        }
    }
    Ok(())
}
