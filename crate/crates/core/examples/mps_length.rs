//! Injectivity length of matrix product state families, with the proof kind
//! behind every negative answer.

use peps_injectivity::generators::{generate, FamilyKind, FamilyRecipe};
use peps_injectivity::injectivity::{mps_injectivity_length, wielandt_cap};
use peps_injectivity::linalg::{ExactEngine, FloatEngine};

fn main() -> peps_injectivity::Result<()> {
    let named = [
        ("{I, X, Z}", FamilyRecipe::resolve(FamilyKind::PauliIXZ, None, None, None, None)?),
        ("{I, X}", FamilyRecipe::resolve(FamilyKind::PauliIX, None, None, None, None)?),
        ("{X, Z}", FamilyRecipe::resolve(FamilyKind::PauliXZ, None, None, None, None)?),
        ("{I}", FamilyRecipe::resolve(FamilyKind::IdentityOnly, Some(1), Some(2), None, None)?),
        ("matrix units D=3", FamilyRecipe::resolve(FamilyKind::MatrixUnits, Some(1), Some(3), None, None)?),
        ("diag projectors D=3", FamilyRecipe::resolve(FamilyKind::DiagonalProjectors, Some(1), Some(3), None, None)?),
    ];
    println!("exact engine:");
    for (name, recipe) in &named {
        let fam = generate(recipe)?.to_exact_integers()?;
        let r = mps_injectivity_length(&fam, &ExactEngine::new(), None)?;
        println!(
            "  {name:<20} {:?} length {:?} proof {:?}, dims {:?}, cap {}",
            r.status, r.length, r.proof, r.span_dims, r.cap
        );
    }

    println!("random Gaussian families, float engine:");
    for (bond, d) in [(2, 2), (3, 2), (4, 2), (3, 3)] {
        let mut lengths = Vec::new();
        for seed in 0..10 {
            let fam = generate(&FamilyRecipe::resolve(FamilyKind::RandomGaussian, Some(1), Some(bond), Some(d), Some(seed))?)?.to_float();
            lengths.push(mps_injectivity_length(&fam, &FloatEngine::new(1e-9), None)?.length);
        }
        println!("  D={bond} d={d}: lengths {lengths:?} (cap {})", wielandt_cap(bond, d));
    }
    Ok(())
}
