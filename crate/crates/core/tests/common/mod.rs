//! Test-side oracles, written without the crate's engines.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use peps_injectivity::contraction::TensorFamily;
use peps_injectivity::generators::{generate, FamilyKind, FamilyRecipe};
use peps_injectivity::scalar::{ExactScalar, GaussInt};
use peps_injectivity::Family;

/// Rank by complete-pivoting elimination, relative to the largest entry.
pub fn float_rank(columns: &[Vec<Complex64>], rel_tol: f64) -> usize {
    if columns.is_empty() {
        return 0;
    }
    let rows = columns[0].len();
    let mut a: Vec<Vec<Complex64>> = columns.to_vec();
    let scale = a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    let mut used_rows = vec![false; rows];
    let mut used_cols = vec![false; a.len()];
    loop {
        let mut best = (0.0, 0, 0);
        for (c, col) in a.iter().enumerate() {
            if used_cols[c] {
                continue;
            }
            for (r, z) in col.iter().enumerate() {
                if !used_rows[r] && z.norm() > best.0 {
                    best = (z.norm(), c, r);
                }
            }
        }
        if best.0 <= rel_tol * scale {
            return rank;
        }
        let (_, pc, pr) = best;
        used_cols[pc] = true;
        used_rows[pr] = true;
        rank += 1;
        let pivot_col = a[pc].clone();
        for (c, col) in a.iter_mut().enumerate() {
            if used_cols[c] {
                continue;
            }
            let f = col[pr] / pivot_col[pr];
            for (x, p) in col.iter_mut().zip(&pivot_col) {
                *x -= f * p;
            }
        }
    }
}

/// Exact rank over `ℚ(i)` by fraction elimination.
pub fn exact_rank(columns: &[Vec<GaussInt>]) -> usize {
    let mut rows: Vec<Vec<ExactScalar>> = columns
        .iter()
        .map(|c| c.iter().map(|z| ExactScalar::new(BigRational::from(z.re.clone()), BigRational::from(z.im.clone()))).collect())
        .collect();
    let width = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..width {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot[c];
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x -= &f * y;
            }
        }
        rank += 1;
    }
    rank
}

/// Row-major `dim×dim` product.
pub fn matmul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            for j in 0..dim {
                out[i * dim + j] += a[i * dim + k] * b[k * dim + j];
            }
        }
    }
    out
}

/// All `d^len` words `A_{i₁}⋯A_{i_len}` of an `n = 1` family.
pub fn words(mats: &[Vec<Complex64>], dim: usize, len: usize) -> Vec<Vec<Complex64>> {
    let mut cur: Vec<Vec<Complex64>> = vec![(0..dim * dim).map(|k| Complex64::new((k % (dim + 1) == 0) as u8 as f64, 0.0)).collect()];
    for _ in 0..len {
        cur = cur.iter().flat_map(|w| mats.iter().map(move |a| matmul(w, a, dim))).collect();
    }
    cur
}

/// Smallest `N ≤ cap` whose words span all `dim×dim` matrices.
pub fn word_oracle_length(mats: &[Vec<Complex64>], dim: usize, cap: usize) -> Option<usize> {
    (1..=cap).find(|&n| float_rank(&words(mats, dim, n), 1e-10) == dim * dim)
}

pub fn exact_to_gauss(x: &ExactScalar) -> GaussInt {
    assert!(x.re.is_integer() && x.im.is_integer());
    GaussInt::new(x.re.to_integer(), x.im.to_integer())
}

pub fn gauss_to_float(x: &GaussInt) -> Complex64 {
    use num_traits::ToPrimitive;
    Complex64::new(x.re.to_f64().unwrap(), x.im.to_f64().unwrap())
}

pub fn gi(re: i64, im: i64) -> GaussInt {
    GaussInt::new(BigInt::from(re), BigInt::from(im))
}

pub fn one() -> GaussInt {
    GaussInt::new(BigInt::one(), BigInt::zero())
}

pub fn random_gaussian(n: usize, bond: usize, d: usize, seed: u64) -> TensorFamily<Complex64> {
    match generate(&FamilyRecipe::resolve(FamilyKind::RandomGaussian, Some(n), Some(bond), Some(d), Some(seed)).unwrap()).unwrap() {
        Family::Float(f) => f,
        Family::Rational(_) => unreachable!(),
    }
}

/// Integer family from the `random_integer` generator, in both scalar forms.
pub fn random_integer(n: usize, bond: usize, d: usize, seed: u64) -> (TensorFamily<GaussInt>, TensorFamily<Complex64>) {
    let fam = generate(&FamilyRecipe::resolve(FamilyKind::RandomInteger, Some(n), Some(bond), Some(d), Some(seed)).unwrap()).unwrap();
    let exact = fam.to_exact_integers().unwrap();
    let float = fam.to_float();
    (exact, float)
}

pub fn named(kind: FamilyKind, n: Option<usize>, bond: Option<usize>) -> Family {
    generate(&FamilyRecipe::resolve(kind, n, bond, None, None).unwrap()).unwrap()
}
