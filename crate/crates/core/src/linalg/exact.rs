use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{gauss_to_exact, ExactScalar, GaussInt};

use super::{EngineTag, Matrix, RankEngine, SpanBasis};

/// Prime with `P ≡ 1 (mod 4)`, small enough that products fit in a `u64`.
pub const P: u64 = 2_147_483_629;
/// `SQRT_NEG_ONE² ≡ −1 (mod P)`; sending `i ↦ SQRT_NEG_ONE` is a ring map `ℤ[i] → 𝔽_P`.
const SQRT_NEG_ONE: u64 = 629_208_553;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExactEngine;

impl ExactEngine {
    pub fn new() -> Self {
        ExactEngine
    }
}

impl RankEngine for ExactEngine {
    type Elem = GaussInt;
    type Basis = ExactBasis;

    fn tag(&self) -> EngineTag {
        EngineTag::Rational
    }

    fn new_basis(&self, ambient: usize) -> ExactBasis {
        ExactBasis {
            ambient,
            raw: Vec::new(),
            modular: ModEchelon::default(),
            modular_valid: true,
            exact: ExactEchelon::default(),
        }
    }
}

/// Exact basis of a subspace of `ℚ(i)^ambient` spanned by Gaussian-integer
/// vectors.
///
/// While the accepted vectors stay independent modulo `P`, a vector whose
/// reduction is independent of theirs modulo `P` is independent over `ℚ(i)`,
/// so acceptance can be decided in machine arithmetic. A modular rejection
/// may be a false alarm (an unlucky prime) and is re-checked by exact
/// elimination. If that check disagrees, modular screening is switched off
/// for the rest of this basis.
#[derive(Clone, Debug)]
pub struct ExactBasis {
    ambient: usize,
    raw: Vec<Vec<GaussInt>>,
    modular: ModEchelon,
    modular_valid: bool,
    exact: ExactEchelon,
}

impl ExactBasis {
    fn check_len(&self, v: &[GaussInt]) -> Result<()> {
        if v.len() != self.ambient {
            return Err(Error::LengthMismatch { expected: self.ambient, got: v.len() });
        }
        Ok(())
    }

    fn sync_exact(&mut self) {
        while self.exact.rows.len() < self.raw.len() {
            let v: Vec<ExactScalar> = self.raw[self.exact.rows.len()].iter().map(gauss_to_exact).collect();
            let accepted = self.exact.insert(v);
            debug_assert!(accepted, "accepted vectors are independent");
        }
    }

    fn exact_residual_nonzero(&self, v: &[GaussInt]) -> bool {
        let mut w: Vec<ExactScalar> = v.iter().map(gauss_to_exact).collect();
        self.exact.reduce(&mut w);
        w.iter().any(|z| !z.is_zero())
    }
}

impl SpanBasis for ExactBasis {
    type Elem = GaussInt;

    fn ambient(&self) -> usize {
        self.ambient
    }

    fn dim(&self) -> usize {
        self.raw.len()
    }

    fn insert(&mut self, v: &[GaussInt]) -> Result<bool> {
        self.check_len(v)?;
        if self.is_full() || v.iter().all(|z| z.is_zero()) {
            return Ok(false);
        }
        if self.modular_valid {
            let mut m: Vec<u64> = v.iter().map(to_mod).collect();
            if self.modular.reduce(&mut m) {
                self.modular.push(m);
                self.raw.push(v.to_vec());
                return Ok(true);
            }
        }
        self.sync_exact();
        let mut w: Vec<ExactScalar> = v.iter().map(gauss_to_exact).collect();
        self.exact.reduce(&mut w);
        if w.iter().all(|z| z.is_zero()) {
            return Ok(false);
        }
        self.exact.push(w);
        self.raw.push(v.to_vec());
        self.modular_valid = false;
        Ok(true)
    }

    fn contains(&self, v: &[GaussInt]) -> Result<bool> {
        self.check_len(v)?;
        if self.is_full() || v.iter().all(|z| z.is_zero()) {
            return Ok(true);
        }
        if self.modular_valid {
            let mut m: Vec<u64> = v.iter().map(to_mod).collect();
            if self.modular.reduce(&mut m) {
                return Ok(false);
            }
        }
        let mut copy = self.clone();
        copy.sync_exact();
        Ok(!copy.exact_residual_nonzero(v))
    }

    fn vectors(&self) -> &[Vec<GaussInt>] {
        &self.raw
    }
}

fn big_mod(x: &BigInt) -> u64 {
    match x.to_i64() {
        Some(s) => s.rem_euclid(P as i64) as u64,
        None => x.mod_floor(&BigInt::from(P)).to_u64().expect("residue fits"),
    }
}

fn to_mod(z: &GaussInt) -> u64 {
    (big_mod(&z.re) + big_mod(&z.im) * SQRT_NEG_ONE % P) % P
}

fn inv_mod(a: u64) -> u64 {
    // Fermat
    let (mut base, mut e, mut acc) = (a % P, P - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % P;
        }
        base = base * base % P;
        e >>= 1;
    }
    acc
}

/// Row echelon form modulo `P`; each row is zero left of its pivot and has
/// pivot entry 1.
#[derive(Clone, Debug, Default)]
struct ModEchelon {
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModEchelon {
    /// Reduces `v` in place; returns whether a nonzero residual remains.
    fn reduce(&self, v: &mut [u64]) -> bool {
        for (piv, row) in &self.rows {
            let f = v[*piv];
            if f == 0 {
                continue;
            }
            let m = P - f;
            for (x, r) in v[*piv..].iter_mut().zip(&row[*piv..]) {
                *x = (*x + m * r) % P;
            }
        }
        v.iter().any(|&x| x != 0)
    }

    /// Pushes an already reduced, nonzero vector.
    fn push(&mut self, mut v: Vec<u64>) {
        let piv = v.iter().position(|&x| x != 0).expect("nonzero residual");
        let inv = inv_mod(v[piv]);
        for x in v[piv..].iter_mut() {
            *x = *x * inv % P;
        }
        self.rows.push((piv, v));
    }
}

/// Row echelon form over `ℚ(i)`, same shape conventions as [`ModEchelon`].
#[derive(Clone, Debug, Default)]
struct ExactEchelon {
    rows: Vec<(usize, Vec<ExactScalar>)>,
}

impl ExactEchelon {
    fn reduce(&self, v: &mut [ExactScalar]) {
        for (piv, row) in &self.rows {
            if v[*piv].is_zero() {
                continue;
            }
            let f = v[*piv].clone();
            for (x, r) in v[*piv..].iter_mut().zip(&row[*piv..]) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
    }

    fn push(&mut self, mut v: Vec<ExactScalar>) {
        let piv = v.iter().position(|x| !x.is_zero()).expect("nonzero residual");
        let inv = ExactScalar::new(num_traits::One::one(), Zero::zero()) / &v[piv];
        for x in v[piv..].iter_mut() {
            *x = &*x * &inv;
        }
        self.rows.push((piv, v));
    }

    fn insert(&mut self, mut v: Vec<ExactScalar>) -> bool {
        self.reduce(&mut v);
        if v.iter().all(|z| z.is_zero()) {
            return false;
        }
        self.push(v);
        true
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant_exact(m: &Matrix<ExactScalar>) -> Result<ExactScalar> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let one = ExactScalar::new(num_traits::One::one(), Zero::zero());
    if n == 0 {
        return Ok(one);
    }
    let mut a: Vec<Vec<ExactScalar>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut negate = false;
    let mut prev = one;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(ExactScalar::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Determinant of a Gaussian-integer matrix under the ring map `ℤ[i] → 𝔽_P`.
///
/// A nonzero residue proves the exact determinant is nonzero.
pub fn determinant_mod_p(m: &Matrix<GaussInt>) -> Result<u64> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let mut a: Vec<Vec<u64>> = (0..n).map(|i| m.row(i).iter().map(to_mod).collect()).collect();
    let mut det = 1u64;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != 0) else { return Ok(0) };
        if p != k {
            a.swap(k, p);
            det = (P - det) % P;
        }
        det = det * a[k][k] % P;
        let inv = inv_mod(a[k][k]);
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            let f = row[k] * inv % P;
            if f == 0 {
                continue;
            }
            let neg = P - f;
            for (x, r) in row[k..].iter_mut().zip(&pivot_row[k..]) {
                *x = (*x + neg * r) % P;
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn modular_determinant_matches_exact() {
        let vals = [[3, -1, 2], [0, 4, 1], [5, 2, -2]];
        let m = Matrix::from_fn(3, 3, |i, j| GaussInt::new(BigInt::from(vals[i][j]), BigInt::from((i as i64) - (j as i64))));
        let exact = determinant_exact(&m.map(gauss_to_exact)).unwrap();
        let as_int = GaussInt::new(exact.re.to_integer(), exact.im.to_integer());
        assert_eq!(determinant_mod_p(&m).unwrap(), to_mod(&as_int));
        let singular = Matrix::from_fn(2, 2, |_, j| GaussInt::new(BigInt::from(j as i64 + 1), BigInt::from(0)));
        assert_eq!(determinant_mod_p(&singular).unwrap(), 0);
    }

    fn cofactor_det(m: &[Vec<ExactScalar>]) -> ExactScalar {
        let n = m.len();
        if n == 0 {
            return ExactScalar::new(q(1, 1), q(0, 1));
        }
        let mut acc = ExactScalar::zero();
        for j in 0..n {
            let minor: Vec<Vec<ExactScalar>> =
                m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect()).collect();
            let term = &m[0][j] * cofactor_det(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn modular_constants() {
        assert_eq!(P % 4, 1);
        assert_eq!(SQRT_NEG_ONE * SQRT_NEG_ONE % P, P - 1);
        assert_eq!(inv_mod(12345) * 12345 % P, 1);
    }

    #[test]
    fn modular_map_is_a_ring_map() {
        let a = GaussInt::new(BigInt::from(-7), BigInt::from(3));
        let b = GaussInt::new(BigInt::from(4), BigInt::from(-11));
        assert_eq!(to_mod(&(&a * &b)), to_mod(&a) * to_mod(&b) % P);
        assert_eq!(to_mod(&(&a + &b)), (to_mod(&a) + to_mod(&b)) % P);
        let big = GaussInt::new(BigInt::from(P) * BigInt::from(P) + 5, BigInt::from(-(P as i64) * 3));
        assert_eq!(to_mod(&big), 5);
    }

    #[test]
    fn unlucky_prime_falls_back_to_exact() {
        // (1, P) and (1, 0) coincide modulo P but are independent over ℚ(i).
        let e = ExactEngine::new();
        let mut b = e.new_basis(2);
        let gi = |x: i64| GaussInt::new(BigInt::from(x), BigInt::zero());
        assert!(b.insert(&[gi(1), gi(0)]).unwrap());
        assert!(b.insert(&[gi(1), gi(P as i64)]).unwrap());
        assert_eq!(b.dim(), 2);
        assert!(b.is_full());
        let mut b = e.new_basis(3);
        assert!(b.insert(&[gi(1), gi(0), gi(0)]).unwrap());
        assert!(b.insert(&[gi(1), gi(P as i64), gi(0)]).unwrap());
        assert!(!b.insert(&[gi(2), gi(P as i64), gi(0)]).unwrap());
        assert!(b.insert(&[gi(0), gi(0), gi(P as i64)]).unwrap());
        assert!(b.contains(&[gi(3), gi(2 * P as i64), gi(-5)]).unwrap());
    }

    #[test]
    fn exact_determinant_cases() {
        let id = Matrix::<ExactScalar>::identity(5);
        assert_eq!(determinant_exact(&id).unwrap(), ExactScalar::new(q(1, 1), q(0, 1)));

        let rows = Matrix::from_fn(3, 3, |i, j| ExactScalar::new(q((i.min(1) * 3 + j) as i64, 1), q(0, 1)));
        assert!(determinant_exact(&rows).unwrap().is_zero());

        assert!(matches!(
            determinant_exact(&Matrix::<ExactScalar>::from_fn(2, 3, |_, _| ExactScalar::zero())),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn exact_determinant_matches_cofactor_expansion() {
        let mut s = 42u64;
        for _ in 0..5 {
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 33) % 9) as i64 - 4
            };
            let m = Matrix::from_fn(4, 4, |_, _| ExactScalar::new(q(next(), next().abs() + 1), q(next(), 3)));
            let rows: Vec<Vec<ExactScalar>> = (0..4).map(|i| m.row(i).to_vec()).collect();
            assert_eq!(determinant_exact(&m).unwrap(), cofactor_det(&rows));
        }
        // a zero leading entry forces a row swap
        let m = Matrix::from_fn(3, 3, |i, j| ExactScalar::new(q([[0, 1, 2], [3, 4, 5], [7, 0, 1]][i][j], 1), q(0, 1)));
        let rows: Vec<Vec<ExactScalar>> = (0..3).map(|i| m.row(i).to_vec()).collect();
        assert_eq!(determinant_exact(&m).unwrap(), cofactor_det(&rows));
    }
}
