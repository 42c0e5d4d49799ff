//! Injectivity witnesses: assignments whose contractions form an invertible
//! matrix, certified exactly or by a pivot bound, then checked again from the
//! assignment list alone.

use peps_injectivity::generators::{generate, FamilyKind, FamilyRecipe};
use peps_injectivity::injectivity::{verify_witness, witness, WitnessOptions};
use peps_injectivity::linalg::{ExactEngine, FloatEngine};
use peps_injectivity::{GridSpec, Limits};

fn main() -> peps_injectivity::Result<()> {
    let limits = Limits::default();

    let ixz = generate(&FamilyRecipe::resolve(FamilyKind::PauliIXZ, None, None, None, None)?)?.to_exact_integers()?;
    let g2: GridSpec = "2".parse()?;
    let w = witness(&g2, &ixz, &ExactEngine::new(), &WitnessOptions::default())?;
    let words: Vec<Vec<usize>> = w.assignments.iter().map(|a| a.choice.iter().map(|i| i + 1).collect()).collect();
    println!("{{I,X,Z}} on G(2): words {words:?}");
    println!("  certificate {:?}", w.certificate);

    let ints = generate(&FamilyRecipe::resolve(FamilyKind::RandomInteger, Some(2), Some(2), Some(4), Some(3))?)?.to_exact_integers()?;
    let g22: GridSpec = "2x2".parse()?;
    let w = witness(&g22, &ints, &ExactEngine::new(), &WitnessOptions::default())?;
    println!("integer family d=4 on G(2x2): {} assignments, certificate {:?}", w.assignments.len(), w.certificate);

    let fam = generate(&FamilyRecipe::resolve(FamilyKind::RandomGaussian, Some(2), Some(2), Some(4), Some(3))?)?.to_float();
    let engine = FloatEngine::new(1e-9);
    let g23: GridSpec = "2x3".parse()?;
    let w = witness(&g23, &fam, &engine, &WitnessOptions::default())?;
    let again = verify_witness(&g23, &fam, &engine, &w.assignments, &limits)?;
    println!("Gaussian family d=4 on G(2x3): {} sampled assignments", w.assignments.len());
    println!("  certificate {:?}", w.certificate);
    println!("  re-contracted: invertible = {}", again.is_invertible());
    Ok(())
}
