//! Rank engines.
//!
//! A rank engine hands out [`SpanBasis`] values: growable bases of a
//! subspace of `ℂ^ambient` with an independence test. Two engines exist:
//!
//! * [`FloatEngine`]: Gram–Schmidt with re-orthogonalization; a vector is accepted iff its residual norm exceeds `τ` times its
//!   original norm.
//! * [`ExactEngine`]: exact arithmetic over the Gaussian rationals. Vectors
//!   are Gaussian integers; independence is certified by reduction modulo a
//!   prime `p ≡ 1 (mod 4)` and anything the modular test rejects is re-checked
//!   by exact elimination, so every answer is exact.

mod exact;
mod float;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use exact::{determinant_exact, determinant_mod_p, ExactBasis, ExactEngine, P as MODULUS};
pub use float::{determinant_float, FloatBasis, FloatDeterminant, FloatEngine};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineTag {
    Float,
    Rational,
}

impl std::fmt::Display for EngineTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EngineTag::Float => "float",
            EngineTag::Rational => "rational",
        })
    }
}

impl std::str::FromStr for EngineTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(EngineTag::Float),
            "rational" => Ok(EngineTag::Rational),
            other => Err(Error::Parse(format!("unknown engine {other:?}; expected float or rational"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankEngineConfig {
    pub mode: EngineTag,
    /// Relative residual threshold of the float engine.
    pub tolerance: f64,
}

impl Default for RankEngineConfig {
    fn default() -> Self {
        RankEngineConfig { mode: EngineTag::Float, tolerance: DEFAULT_TOLERANCE }
    }
}

impl RankEngineConfig {
    pub fn float(tolerance: f64) -> Self {
        RankEngineConfig { mode: EngineTag::Float, tolerance }
    }

    pub fn rational() -> Self {
        RankEngineConfig { mode: EngineTag::Rational, tolerance: DEFAULT_TOLERANCE }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Parse(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

/// A growable basis of a subspace of `ℂ^ambient`.
///
/// `vectors()` returns the accepted input vectors verbatim, in acceptance
/// order; they form a basis of the subspace.
pub trait SpanBasis: Clone + Send {
    type Elem: Scalar;

    fn ambient(&self) -> usize;
    fn dim(&self) -> usize;
    /// Adds `v` if it is independent of the current basis; the dimension
    /// grows by exactly 0 or 1.
    fn insert(&mut self, v: &[Self::Elem]) -> Result<bool>;
    fn contains(&self, v: &[Self::Elem]) -> Result<bool>;
    fn vectors(&self) -> &[Vec<Self::Elem>];

    /// Offers `vs` in order; same outcome as calling [`insert`](Self::insert)
    /// on each.
    fn insert_many(&mut self, vs: &[&[Self::Elem]]) -> Result<Vec<bool>> {
        vs.iter().map(|v| self.insert(v)).collect()
    }

    fn is_full(&self) -> bool {
        self.dim() == self.ambient()
    }
}

pub trait RankEngine: Clone + Send + Sync {
    type Elem: Scalar;
    type Basis: SpanBasis<Elem = Self::Elem>;

    fn tag(&self) -> EngineTag;
    fn new_basis(&self, ambient: usize) -> Self::Basis;
}

/// Returns whether `v` was accepted together with the updated basis.
pub fn add_to_basis<B: SpanBasis>(mut basis: B, v: &[B::Elem]) -> Result<(bool, B)> {
    let accepted = basis.insert(v)?;
    Ok((accepted, basis))
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{rows}x{cols} matrix from {} entries", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given equal-length vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Result<Self> {
        if let Some(c) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::LengthMismatch { expected: rows, got: c.len() });
        }
        Ok(Matrix::from_fn(rows, columns.len(), |i, j| columns[j][i].clone()))
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

const RANK_CHUNK: usize = 256;

/// Column rank of `m` under `engine`.
pub fn rank<E: RankEngine>(engine: &E, m: &Matrix<E::Elem>) -> Result<usize> {
    let mut basis = engine.new_basis(m.rows());
    let t = m.transpose();
    for chunk in t.data().chunks(RANK_CHUNK * m.rows().max(1)) {
        if basis.is_full() {
            break;
        }
        let cols: Vec<&[E::Elem]> = chunk.chunks(m.rows().max(1)).collect();
        basis.insert_many(&cols)?;
    }
    Ok(basis.dim())
}
