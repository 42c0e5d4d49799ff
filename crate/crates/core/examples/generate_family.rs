//! Builds every family kind, writes it as canonical JSON, and prints its hash.
//!
//! `cargo run --example generate_family -- out_dir`

use peps_injectivity::generators::{generate, FamilyKind, FamilyRecipe};
use peps_injectivity::io::{family_hash, read_family, write_family};

fn main() -> peps_injectivity::Result<()> {
    let out = std::env::args().nth(1).map(std::path::PathBuf::from);
    for kind in FamilyKind::ALL {
        let recipe = match kind {
            FamilyKind::RandomGaussian | FamilyKind::RandomInteger => FamilyRecipe::resolve(kind, Some(2), Some(2), Some(3), Some(7))?,
            FamilyKind::PauliIX | FamilyKind::PauliXZ | FamilyKind::PauliIXZ => FamilyRecipe::resolve(kind, None, None, None, None)?,
            FamilyKind::MatrixUnits | FamilyKind::DiagonalProjectors => FamilyRecipe::resolve(kind, Some(1), Some(3), None, None)?,
            FamilyKind::IdentityOnly | FamilyKind::FullBasis => FamilyRecipe::resolve(kind, Some(2), Some(2), None, None)?,
        };
        let fam = generate(&recipe)?;
        let text = write_family(&fam);
        assert_eq!(write_family(&read_family(&text)?), text);
        println!(
            "{:<20} n={} D={} d={:<3} {:<8} {}",
            kind.name(),
            fam.n(),
            fam.bond_dim(),
            fam.d(),
            if fam.is_exact() { "exact" } else { "float" },
            &family_hash(&fam)[..16]
        );
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir).map_err(|e| peps_injectivity::Error::Parse(e.to_string()))?;
            std::fs::write(dir.join(format!("{}.json", kind.name())), text + "\n")
                .map_err(|e| peps_injectivity::Error::Parse(e.to_string()))?;
        }
    }
    Ok(())
}
