//! Seeded random and named structured families.
//!
//! Random Gaussian entries use ChaCha20 (`seed_from_u64`) and one Box–Muller
//! step per entry: with `x, y` the next two 64-bit outputs,
//! `u₁ = ((x >> 11) + 1) / 2⁵³ ∈ (0, 1]`, `u₂ = (y >> 11) / 2⁵³ ∈ [0, 1)`,
//! `r = √(−2 ln u₁)`, and the entry is `r·cos(2πu₂) + i·r·sin(2πu₂)`.
//! The transcendental functions come from `libm`, so the bits do not depend
//! on the platform's math library.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::contraction::{Family, TensorFamily};
use crate::error::{Error, Result};
use crate::scalar::{ExactScalar, C64};
use crate::tensor::DenseTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    #[serde(rename = "random_gaussian")]
    RandomGaussian,
    /// Gaussian integers with real and imaginary parts uniform in `{−2,…,2}`.
    #[serde(rename = "random_integer")]
    RandomInteger,
    #[serde(rename = "matrix_units")]
    MatrixUnits,
    #[serde(rename = "identity_only")]
    IdentityOnly,
    #[serde(rename = "pauli_IX")]
    PauliIX,
    #[serde(rename = "pauli_XZ")]
    PauliXZ,
    #[serde(rename = "pauli_IXZ")]
    PauliIXZ,
    #[serde(rename = "diagonal_projectors")]
    DiagonalProjectors,
    #[serde(rename = "full_basis")]
    FullBasis,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 9] = [
        FamilyKind::RandomGaussian,
        FamilyKind::RandomInteger,
        FamilyKind::MatrixUnits,
        FamilyKind::IdentityOnly,
        FamilyKind::PauliIX,
        FamilyKind::PauliXZ,
        FamilyKind::PauliIXZ,
        FamilyKind::DiagonalProjectors,
        FamilyKind::FullBasis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::RandomGaussian => "random_gaussian",
            FamilyKind::RandomInteger => "random_integer",
            FamilyKind::MatrixUnits => "matrix_units",
            FamilyKind::IdentityOnly => "identity_only",
            FamilyKind::PauliIX => "pauli_IX",
            FamilyKind::PauliXZ => "pauli_XZ",
            FamilyKind::PauliIXZ => "pauli_IXZ",
            FamilyKind::DiagonalProjectors => "diagonal_projectors",
            FamilyKind::FullBasis => "full_basis",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, FamilyKind::RandomGaussian | FamilyKind::RandomInteger)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidRecipe(format!("unknown family kind {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRecipe {
    pub kind: FamilyKind,
    pub n: usize,
    #[serde(rename = "D")]
    pub bond_dim: usize,
    pub d: usize,
    pub seed: u64,
}

impl FamilyRecipe {
    /// Fills unspecified parameters from the kind: Pauli kinds are `n = 1,
    /// D = 2`; `d` follows from the kind where it is determined; the seed
    /// defaults to 0.
    pub fn resolve(
        kind: FamilyKind,
        n: Option<usize>,
        bond_dim: Option<usize>,
        d: Option<usize>,
        seed: Option<u64>,
    ) -> Result<Self> {
        let pauli = matches!(kind, FamilyKind::PauliIX | FamilyKind::PauliXZ | FamilyKind::PauliIXZ);
        let n = n.unwrap_or(1);
        let bond_dim = match bond_dim {
            Some(b) => b,
            None if pauli => 2,
            None => return Err(Error::InvalidRecipe(format!("{kind} needs a bond dimension D"))),
        };
        let implied = match kind {
            FamilyKind::PauliIXZ => Some(3),
            FamilyKind::PauliIX | FamilyKind::PauliXZ => Some(2),
            FamilyKind::IdentityOnly => Some(1),
            FamilyKind::MatrixUnits => bond_dim.checked_pow(2),
            FamilyKind::DiagonalProjectors => Some(bond_dim),
            FamilyKind::FullBasis => u32::try_from(2 * n).ok().and_then(|e| bond_dim.checked_pow(e)),
            FamilyKind::RandomGaussian | FamilyKind::RandomInteger => None,
        };
        let d = match (d, implied) {
            (Some(d), _) => d,
            (None, Some(i)) => i,
            (None, None) => return Err(Error::InvalidRecipe(format!("{kind} needs a physical dimension d"))),
        };
        let r = FamilyRecipe { kind, n, bond_dim, d, seed: seed.unwrap_or(0) };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let FamilyRecipe { kind, n, bond_dim, d, .. } = *self;
        let bad = |msg: String| Err(Error::InvalidRecipe(format!("{kind}: {msg}")));
        if n == 0 || bond_dim == 0 || d == 0 {
            return bad(format!("need n, D, d ≥ 1, got n = {n}, D = {bond_dim}, d = {d}"));
        }
        match kind {
            FamilyKind::PauliIX | FamilyKind::PauliXZ | FamilyKind::PauliIXZ => {
                let want = if kind == FamilyKind::PauliIXZ { 3 } else { 2 };
                if n != 1 || bond_dim != 2 || d != want {
                    return bad(format!("requires n = 1, D = 2, d = {want}"));
                }
            }
            FamilyKind::MatrixUnits => {
                if n != 1 || d != bond_dim * bond_dim {
                    return bad("requires n = 1 and d = D²".into());
                }
            }
            FamilyKind::DiagonalProjectors => {
                if n != 1 || d != bond_dim {
                    return bad("requires n = 1 and d = D".into());
                }
            }
            FamilyKind::IdentityOnly => {
                if d != 1 {
                    return bad("requires d = 1".into());
                }
            }
            FamilyKind::FullBasis => {
                if u32::try_from(2 * n).ok().and_then(|e| bond_dim.checked_pow(e)) != Some(d) {
                    return bad("requires d = D^(2n)".into());
                }
            }
            FamilyKind::RandomGaussian | FamilyKind::RandomInteger => {}
        }
        let len = u32::try_from(2 * n).ok().and_then(|e| bond_dim.checked_pow(e));
        if len.is_none_or(|l| l.saturating_mul(d) > 1 << 26) {
            return bad("family too large to materialize".into());
        }
        Ok(())
    }
}

/// Builds the family described by `recipe`. Random Gaussian families are
/// float; every other kind is exact.
pub fn generate(recipe: &FamilyRecipe) -> Result<Family> {
    recipe.validate()?;
    let FamilyRecipe { kind, n, bond_dim, d, seed } = *recipe;
    let len = bond_dim.pow(2 * n as u32);
    let shape = vec![bond_dim; 2 * n];
    if kind == FamilyKind::RandomGaussian {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let flats = (0..d).map(|_| (0..len).map(|_| gaussian(&mut rng)).collect()).collect();
        return Ok(Family::Float(TensorFamily::from_flat(n, bond_dim, flats)?));
    }
    let int = |re: i64, im: i64| ExactScalar::new(BigRational::from(BigInt::from(re)), BigRational::from(BigInt::from(im)));
    let mat = |entries: [i64; 4]| entries.iter().map(|&x| int(x, 0)).collect::<Vec<_>>();
    let identity = mat([1, 0, 0, 1]);
    let x = mat([0, 1, 1, 0]);
    let z = mat([1, 0, 0, -1]);
    let flats: Vec<Vec<ExactScalar>> = match kind {
        FamilyKind::RandomInteger => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut draw = || (rng.next_u64() % 5) as i64 - 2;
            (0..d).map(|_| (0..len).map(|_| int(draw(), draw())).collect()).collect()
        }
        FamilyKind::PauliIX => vec![identity, x],
        FamilyKind::PauliXZ => vec![x, z],
        FamilyKind::PauliIXZ => vec![identity, x, z],
        FamilyKind::MatrixUnits | FamilyKind::FullBasis => {
            (0..d).map(|k| (0..len).map(|j| int((j == k) as i64, 0)).collect()).collect()
        }
        FamilyKind::DiagonalProjectors => {
            (0..d).map(|k| (0..len).map(|j| int((j == k * bond_dim + k) as i64, 0)).collect()).collect()
        }
        FamilyKind::IdentityOnly => {
            let t = DenseTensor::from_fn(shape, |idx| int(idx.chunks(2).all(|p| p[0] == p[1]) as i64, 0));
            vec![t.into_data()]
        }
        FamilyKind::RandomGaussian => unreachable!(),
    };
    Ok(Family::Rational(TensorFamily::from_flat(n, bond_dim, flats)?))
}

const TWO_POW_53: f64 = 9_007_199_254_740_992.0;

fn gaussian(rng: &mut ChaCha20Rng) -> C64 {
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 / TWO_POW_53;
    let u2 = (rng.next_u64() >> 11) as f64 / TWO_POW_53;
    let r = libm::sqrt(-2.0 * libm::log(u1));
    let theta = 2.0 * std::f64::consts::PI * u2;
    C64::new(r * libm::cos(theta), r * libm::sin(theta))
}
