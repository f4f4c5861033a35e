//! Scalar rings: exact Gaussian rationals and complex `f64`.
//!
//! The whole workbench is generic over [`Scalar`]. The exact instance keeps
//! every quantity a pair of arbitrary-precision rationals (rotation blocks
//! force purely imaginary entries, so plain rationals are not enough); the
//! float instance is `num_complex::Complex<f64>`.

use alloc::string::ToString;
use core::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, re-exported for config parsing.
pub type Rational = BigRational;

/// Complex `f64` scalar.
pub type C64 = Complex<f64>;

/// Common interface of the two scalar rings.
///
/// Arithmetic takes references; implementations clone as needed. `div`
/// panics on a zero divisor, mirroring integer division.
pub trait Scalar: Clone + PartialEq + Debug {
    /// True for the exact Gaussian-rational instance.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    /// The imaginary unit.
    fn i() -> Self;
    fn is_zero(&self) -> bool;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Complex conjugate.
    fn conj(&self) -> Self;

    fn from_i64(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// `None` in the exact ring: floats carry no exact meaning there.
    fn from_f64(x: f64) -> Option<Self>;

    /// Complex `f64` approximation, used for pivot selection and reports.
    fn approx(&self) -> C64;

    /// `conj(self) * self`; a real element of the same ring.
    fn abs_sq(&self) -> Self {
        self.conj().mul(self)
    }

    /// Strict positivity for real ring elements (LDL pivots).
    fn is_positive_real(&self) -> bool;

    /// `self <= rhs` for real ring elements; exact for rationals.
    fn real_le(&self, rhs: &Self) -> bool;
}

/// `self^k` by repeated squaring.
pub fn pow<S: Scalar>(base: &S, mut k: u32) -> S {
    let mut acc = S::one();
    let mut b = base.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul(&b);
        }
        k >>= 1;
        if k > 0 {
            b = b.mul(&b);
        }
    }
    acc
}

/// Gaussian rational: a complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRat { re, im }
    }

    pub fn from_real(re: BigRational) -> Self {
        CRat { re, im: BigRational::zero() }
    }

    /// Purely imaginary value `im * i`.
    pub fn from_imag(im: BigRational) -> Self {
        CRat { re: BigRational::zero(), im }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

fn big_ratio(num: i64, den: i64) -> BigRational {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Scalar for CRat {
    const EXACT: bool = true;

    fn zero() -> Self {
        CRat::from_real(BigRational::zero())
    }

    fn one() -> Self {
        CRat::from_real(BigRational::one())
    }

    fn i() -> Self {
        CRat::from_imag(BigRational::one())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, rhs: &Self) -> Self {
        CRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }

    fn sub(&self, rhs: &Self) -> Self {
        CRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }

    fn mul(&self, rhs: &Self) -> Self {
        CRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }

    fn div(&self, rhs: &Self) -> Self {
        let d = &rhs.re * &rhs.re + &rhs.im * &rhs.im;
        assert!(!d.is_zero(), "division by zero");
        CRat::new(
            (&self.re * &rhs.re + &self.im * &rhs.im) / &d,
            (&self.im * &rhs.re - &self.re * &rhs.im) / &d,
        )
    }

    fn neg(&self) -> Self {
        CRat::new(-self.re.clone(), -self.im.clone())
    }

    fn conj(&self) -> Self {
        CRat::new(self.re.clone(), -self.im.clone())
    }

    fn from_i64(n: i64) -> Self {
        CRat::from_real(BigRational::from(BigInt::from(n)))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        CRat::from_real(big_ratio(num, den))
    }

    fn from_rational(r: &Rational) -> Self {
        CRat::from_real(r.clone())
    }

    fn from_f64(_x: f64) -> Option<Self> {
        None
    }

    fn approx(&self) -> C64 {
        Complex::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    fn is_positive_real(&self) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }

    fn real_le(&self, rhs: &Self) -> bool {
        debug_assert!(self.im.is_zero() && rhs.im.is_zero());
        self.re <= rhs.re
    }
}

/// Lossy conversion; good to f64 precision for any size of rational.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator both overflow f64; fall back on digit counts
        let n = r.numer().to_string().len() as f64;
        let d = r.denom().to_string().len() as f64;
        let sign = if r.is_negative() { -1.0 } else { 1.0 };
        sign * libm::pow(10.0, n - d)
    })
}

impl Scalar for C64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex::new(1.0, 0.0)
    }

    fn i() -> Self {
        Complex::new(0.0, 1.0)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn conj(&self) -> Self {
        Complex::new(self.re, -self.im)
    }

    fn from_i64(n: i64) -> Self {
        Complex::new(n as f64, 0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(num as f64 / den as f64, 0.0)
    }

    fn from_rational(r: &Rational) -> Self {
        Complex::new(ratio_to_f64(r), 0.0)
    }

    fn from_f64(x: f64) -> Option<Self> {
        Some(Complex::new(x, 0.0))
    }

    fn approx(&self) -> C64 {
        *self
    }

    fn is_positive_real(&self) -> bool {
        self.re > 0.0 && libm::fabs(self.im) <= 1e-9 * (1.0 + libm::fabs(self.re))
    }

    fn real_le(&self, rhs: &Self) -> bool {
        self.re <= rhs.re
    }
}

/// Parse `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let num: BigInt = p.trim().parse().ok()?;
            let den: BigInt = q.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(BigRational::new(num, den))
        }
        None => {
            let num: BigInt = s.parse().ok()?;
            Some(BigRational::from(num))
        }
    }
}
