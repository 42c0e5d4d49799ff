//! Scalar types shared by the float and exact code paths.
//!
//! Three concrete scalars implement [`Scalar`]:
//!
//! * [`C64`]: double-precision complex numbers for the float path,
//! * [`GaussInt`]: Gaussian integers, the working type of the exact rank engine,
//! * [`ExactScalar`]: Gaussian rationals, used for family files and certificates.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;
pub type GaussInt = Complex<BigInt>;
pub type ExactScalar = Complex<BigRational>;

/// Ring operations needed by dense contraction.
pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_finite(&self) -> bool;
    fn mul(&self, other: &Self) -> Self;
    fn add(&self, other: &Self) -> Self;
    /// `self += a * b`
    fn mul_add_assign(&mut self, a: &Self, b: &Self);
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    #[inline]
    fn mul(&self, other: &Self) -> Self {
        *self * *other
    }
    #[inline]
    fn add(&self, other: &Self) -> Self {
        *self + *other
    }
    #[inline]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.re += a.re * b.re - a.im * b.im;
        self.im += a.re * b.im + a.im * b.re;
    }
}

macro_rules! exact_scalar_impl {
    ($t:ty) => {
        impl Scalar for $t {
            fn zero() -> Self {
                Zero::zero()
            }
            fn one() -> Self {
                One::one()
            }
            fn is_zero(&self) -> bool {
                Zero::is_zero(self)
            }
            fn is_finite(&self) -> bool {
                true
            }
            fn mul(&self, other: &Self) -> Self {
                self * other
            }
            fn add(&self, other: &Self) -> Self {
                self + other
            }
            fn mul_add_assign(&mut self, a: &Self, b: &Self) {
                if Zero::is_zero(a) || Zero::is_zero(b) {
                    return;
                }
                *self += a * b;
            }
        }
    };
}

exact_scalar_impl!(GaussInt);
exact_scalar_impl!(ExactScalar);

/// Parses `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p = BigInt::from_str(num).map_err(|_| Error::Parse(format!("bad rational numerator {s:?}")))?;
    let q = BigInt::from_str(den).map_err(|_| Error::Parse(format!("bad rational denominator {s:?}")))?;
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(p, q))
}

/// Canonical `"p/q"` text; `BigRational` is always kept reduced with `q > 0`.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn exact_to_c64(x: &ExactScalar) -> C64 {
    C64::new(rational_to_f64(&x.re), rational_to_f64(&x.im))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn gauss_to_exact(x: &GaussInt) -> ExactScalar {
    ExactScalar::new(
        BigRational::from_integer(x.re.clone()),
        BigRational::from_integer(x.im.clone()),
    )
}

pub fn gauss_to_c64(x: &GaussInt) -> C64 {
    C64::new(x.re.to_f64().unwrap_or(f64::NAN), x.im.to_f64().unwrap_or(f64::NAN))
}

/// Exact value of a finite double, as a dyadic rational.
pub fn f64_to_rational(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Least common multiple of all denominators (real and imaginary parts).
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a ExactScalar>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, z| {
        let acc = acc.lcm(z.re.denom());
        acc.lcm(z.im.denom())
    })
}

/// Multiplies by `scale` and returns the Gaussian integer; `scale` must clear
/// every denominator.
pub fn scale_to_gauss(x: &ExactScalar, scale: &BigInt) -> GaussInt {
    let re = &x.re * BigRational::from_integer(scale.clone());
    let im = &x.im * BigRational::from_integer(scale.clone());
    debug_assert!(re.is_integer() && im.is_integer());
    GaussInt::new(re.to_integer(), im.to_integer())
}

pub fn exact_norm_sqr_is_zero(x: &ExactScalar) -> bool {
    x.re.is_zero() && x.im.is_zero()
}

/// `|x|` of an exact scalar, rounded to f64.
pub fn exact_abs(x: &ExactScalar) -> f64 {
    let re = rational_to_f64(&x.re.abs());
    let im = rational_to_f64(&x.im.abs());
    re.hypot(im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let r = parse_rational("6/-4").unwrap();
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(format_rational(&parse_rational("7").unwrap()), "7/1");
        assert_eq!(format_rational(&parse_rational("0/5").unwrap()), "0/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn clearing_denominators_gives_gaussian_integers() {
        let a = ExactScalar::new(parse_rational("1/2").unwrap(), parse_rational("-2/3").unwrap());
        let b = ExactScalar::new(parse_rational("5").unwrap(), parse_rational("1/4").unwrap());
        let l = common_denominator([&a, &b]);
        assert_eq!(l, BigInt::from(12));
        assert_eq!(scale_to_gauss(&a, &l), GaussInt::new(6.into(), (-8).into()));
        assert_eq!(scale_to_gauss(&b, &l), GaussInt::new(60.into(), 3.into()));
    }

    #[test]
    fn float_fma_matches_complex_product() {
        let mut acc = C64::new(1.0, -1.0);
        let a = C64::new(0.5, 2.0);
        let b = C64::new(-3.0, 0.25);
        let expected = acc + a * b;
        acc.mul_add_assign(&a, &b);
        assert_eq!(acc, expected);
    }
}
