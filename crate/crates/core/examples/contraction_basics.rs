//! Grid contraction: on a chain it is a matrix product, on a plaquette a
//! four-fold bond sum.

use num_complex::Complex64 as C;

use peps_injectivity::contraction::{contract_assignment, contract_grid};
use peps_injectivity::generators::{generate, FamilyKind, FamilyRecipe};
use peps_injectivity::grid::square_grid;
use peps_injectivity::tensor::DenseTensor;
use peps_injectivity::{Assignment, GridSpec};

fn main() -> peps_injectivity::Result<()> {
    // n = 1: a tensor with ports (−e1, +e1) is a D×D matrix.
    let a = DenseTensor::new(vec![2, 2], vec![C::new(1.0, 0.0), C::new(2.0, 0.0), C::new(0.0, 1.0), C::new(3.0, 0.0)])?;
    let b = DenseTensor::new(vec![2, 2], vec![C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(-1.0, 0.0)])?;
    let chain = square_grid(&"2".parse::<GridSpec>()?);
    let ab = contract_grid(&chain, &[&a, &b])?;
    println!("G(2) with (A, B) gives the matrix product, boundary order (−e1, +e1):");
    for row in ab.data().chunks(2) {
        println!("  {:?}", row.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>());
    }

    // n = 2: the identity family glues δ tensors, so every boundary pair that
    // a straight line connects is forced equal.
    let recipe = FamilyRecipe::resolve(FamilyKind::IdentityOnly, Some(2), Some(2), None, None)?;
    let fam = generate(&recipe)?.to_float();
    let spec: GridSpec = "2x2".parse()?;
    let t = contract_assignment(&square_grid(&spec), &fam, &Assignment::new(vec![0; 4]))?;
    let nonzero = t.data().iter().filter(|z| z.norm() > 0.0).count();
    println!("G(2x2) of δ tensors: {} boundary legs, {nonzero} nonzero entries of {}", t.rank(), t.len());
    Ok(())
}
