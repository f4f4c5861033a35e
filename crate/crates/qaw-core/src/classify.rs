//! The factor-type trichotomy: the closed multiplicative subgroup generated
//! by the spectrum of the generator is trivial (II₁), a discrete lattice
//! `λ^ℤ` (III_λ), or dense in the positive reals (III₁).
//!
//! Rational spectra are classified exactly through prime-exponent vectors:
//! commensurability of logarithms is a question about the rank of the
//! integer lattice those vectors span, so no tolerances enter. Float spectra
//! go through continued-fraction rationality of log ratios and are labeled
//! tolerance-based; any failure falls conservatively to III₁.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::deformation::{Deformation, NumVal};
use crate::scalar::{Rational, Scalar, ratio_to_f64};
use crate::{Error, Result};

/// The classified type.
#[derive(Clone, Debug, PartialEq)]
pub enum FactorType {
    II1,
    /// `λ ∈ (0, 1)` generating the discrete subgroup.
    IIILambda(NumVal),
    III1,
}

/// Result plus provenance: exact results carry no tolerance caveat.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeLabel {
    pub factor: FactorType,
    pub exact: bool,
}

/// Parameters of the float path.
#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    /// Largest continued-fraction denominator accepted as "rational ratio".
    pub max_denominator: u64,
    /// Absolute tolerance on the log-ratio approximation.
    pub tolerance: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { max_denominator: 1_000, tolerance: 1e-9 }
    }
}

/// Prime-exponent vector of a positive rational (the possible leftover
/// cofactor after bounded trial division acts as one more "prime").
fn exponent_vector(r: &Rational) -> Result<BTreeMap<BigInt, i64>> {
    if !r.is_positive() {
        return Err(Error::InvalidInput(String::from("spectrum values must be positive")));
    }
    let mut out: BTreeMap<BigInt, i64> = BTreeMap::new();
    for (int, sign) in [(r.numer().clone(), 1i64), (r.denom().clone(), -1i64)] {
        let mut n = int;
        let mut p = BigInt::from(2u32);
        let limit = BigInt::from(1_000_000u64);
        while &p * &p <= n && p <= limit {
            while (&n % &p).is_zero() {
                *out.entry(p.clone()).or_insert(0) += sign;
                n = &n / &p;
            }
            p += if p == BigInt::from(2u32) { BigInt::one() } else { BigInt::from(2u32) };
        }
        if n > BigInt::one() {
            *out.entry(n).or_insert(0) += sign;
        }
    }
    out.retain(|_, v| *v != 0);
    Ok(out)
}

/// Exact classification of a rational spectrum.
pub fn classify_exact(lambdas: &[Rational]) -> Result<TypeLabel> {
    let mut vectors: Vec<BTreeMap<BigInt, i64>> = Vec::new();
    for r in lambdas {
        let v = exponent_vector(r)?;
        if !v.is_empty() {
            vectors.push(v);
        }
    }
    if vectors.is_empty() {
        return Ok(TypeLabel { factor: FactorType::II1, exact: true });
    }
    // primitive direction of the first vector
    let first = &vectors[0];
    let g0 = first.values().fold(0i64, |acc, &v| acc.gcd(&v));
    let primitive: BTreeMap<BigInt, i64> =
        first.iter().map(|(p, &v)| (p.clone(), v / g0)).collect();
    // every vector must be an integer multiple of the primitive direction,
    // otherwise the exponent lattice has rank >= 2 and the logarithms are
    // incommensurable
    let mut multiples: Vec<i64> = Vec::with_capacity(vectors.len());
    for v in &vectors {
        if v.len() != primitive.len() {
            return Ok(TypeLabel { factor: FactorType::III1, exact: true });
        }
        let (p0, &e0) = primitive.iter().next().unwrap();
        let Some(&w0) = v.get(p0) else {
            return Ok(TypeLabel { factor: FactorType::III1, exact: true });
        };
        if w0 % e0 != 0 {
            return Ok(TypeLabel { factor: FactorType::III1, exact: true });
        }
        let k = w0 / e0;
        let proportional = primitive.iter().all(|(p, &e)| v.get(p) == Some(&(e * k)));
        if !proportional || k == 0 {
            return Ok(TypeLabel { factor: FactorType::III1, exact: true });
        }
        multiples.push(k);
    }
    let g = multiples.iter().fold(0i64, |acc, k| acc.gcd(k));
    // generator rho = (value of primitive)^g
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (p, &e) in &primitive {
        let exp = (e * g).unsigned_abs() as u32;
        let power = p.pow(exp);
        if e * g > 0 {
            num *= power;
        } else {
            den *= power;
        }
    }
    let rho = Rational::new(num, den);
    let lam = if rho < Rational::one() { rho } else { rho.recip() };
    Ok(TypeLabel { factor: FactorType::IIILambda(NumVal::Rational(lam)), exact: true })
}

/// Best rational approximation `p/q` with `q ≤ max_den`, by continued
/// fractions; `None` when no convergent lands within `tol`.
fn rational_approx(x: f64, max_den: u64, tol: f64) -> Option<(i64, i64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, libm::floor(x) as i64, 1i64);
    let mut frac = x - libm::floor(x);
    for _ in 0..64 {
        if libm::fabs(x - p1 as f64 / q1 as f64) <= tol {
            return Some((p1, q1));
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = libm::floor(inv) as i64;
        frac = inv - libm::floor(inv);
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 as u64 > max_den || q2 <= 0 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    if libm::fabs(x - p1 as f64 / q1 as f64) <= tol { Some((p1, q1)) } else { None }
}

/// Tolerance-based classification of a float spectrum; conservative toward
/// III₁ (a failed rationality test never claims a discrete subgroup).
pub fn classify_float(lambdas: &[f64], opts: ClassifyOptions) -> Result<TypeLabel> {
    let mut logs: Vec<f64> = Vec::new();
    for &x in lambdas {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::InvalidInput(format!("spectrum value {x} must be positive")));
        }
        let l = libm::log(x);
        if libm::fabs(l) > opts.tolerance {
            logs.push(l);
        }
    }
    if logs.is_empty() {
        return Ok(TypeLabel { factor: FactorType::II1, exact: false });
    }
    let base = logs[0];
    let mut fracs: Vec<(i64, i64)> = Vec::with_capacity(logs.len());
    for &l in &logs {
        match rational_approx(l / base, opts.max_denominator, opts.tolerance) {
            Some(pq) => fracs.push(pq),
            None => return Ok(TypeLabel { factor: FactorType::III1, exact: false }),
        }
    }
    // common generator of log-lattice: base / lcm(q_j), counted g times
    let lcm = fracs.iter().fold(1i64, |acc, &(_, q)| acc.lcm(&q));
    let ks: Vec<i64> = fracs.iter().map(|&(p, q)| p * (lcm / q)).collect();
    let g = ks.iter().fold(0i64, |acc, k| acc.gcd(k));
    let log_gen = libm::fabs(base / lcm as f64 * g as f64);
    let lam = libm::exp(-log_gen);
    Ok(TypeLabel { factor: FactorType::IIILambda(NumVal::Real(lam)), exact: false })
}

/// Classify a NumVal spectrum: the exact path when every value is rational,
/// the float path otherwise.
pub fn classify_spectrum(values: &[NumVal], opts: ClassifyOptions) -> Result<TypeLabel> {
    let rationals: Option<Vec<Rational>> =
        values.iter().map(|v| v.as_rational().cloned()).collect();
    match rationals {
        Some(rs) => classify_exact(&rs),
        None => {
            let floats: Vec<f64> = values.iter().map(NumVal::to_f64).collect();
            classify_float(&floats, opts)
        }
    }
}

/// Classify a deformation from its block data (each rotation copy
/// contributes `λ` and `1/λ`, fixed directions contribute `1`).
pub fn classify_deformation<S: Scalar>(
    d: &Deformation<S>,
    opts: ClassifyOptions,
) -> Result<TypeLabel> {
    classify_spectrum(&d.spectrum(), opts)
}

/// Human-readable form, e.g. `III_1/2`.
pub fn describe(label: &TypeLabel) -> String {
    match &label.factor {
        FactorType::II1 => String::from("II_1"),
        FactorType::III1 => String::from("III_1"),
        FactorType::IIILambda(v) => match v {
            NumVal::Rational(r) => format!("III_{}/{}", r.numer(), r.denom()),
            NumVal::Real(x) => format!("III_{x:.12}"),
        },
    }
}

/// Convenience: `λ` of a III_λ label as `f64`, if applicable.
pub fn lambda_value(label: &TypeLabel) -> Option<f64> {
    match &label.factor {
        FactorType::IIILambda(NumVal::Rational(r)) => Some(ratio_to_f64(r)),
        FactorType::IIILambda(NumVal::Real(x)) => Some(*x),
        _ => None,
    }
}
