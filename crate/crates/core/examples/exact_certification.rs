//! A matrix that is invertible but within float tolerance of singular: the
//! float engine reports rank 1, the exact engine rank 2 with an exact
//! determinant and a modular certificate.

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};

use peps_injectivity::injectivity::CertifyingEngine;
use peps_injectivity::linalg::{determinant_mod_p, rank, ExactEngine, FloatEngine, Matrix, MODULUS};
use peps_injectivity::scalar::{gauss_to_c64, GaussInt};

fn gi(re: i64, im: i64) -> GaussInt {
    Complex::new(BigInt::from(re), BigInt::from(im))
}

fn main() -> peps_injectivity::Result<()> {
    let k = 1i64 << 40;
    // [[K, K], [K, K + i]]: columns differ by i in one entry out of ~2^41
    let m = Matrix::new(2, 2, vec![gi(k, 0), gi(k, 0), gi(k, 0), gi(k, 1)])?;
    let f: Matrix<Complex64> = m.map(gauss_to_c64);

    println!("float rank (tau = 1e-9):  {}", rank(&FloatEngine::new(1e-9), &f)?);
    println!("float rank (tau = 1e-14): {}", rank(&FloatEngine::new(1e-14), &f)?);
    println!("exact rank:               {}", rank(&ExactEngine::new(), &m)?);
    println!("exact determinant:        {:?}", ExactEngine::new().certify(&m)?);
    println!("determinant mod {MODULUS}: {}", determinant_mod_p(&m)?);
    println!("float certificate:        {:?}", FloatEngine::new(1e-9).certify(&f)?);
    Ok(())
}
