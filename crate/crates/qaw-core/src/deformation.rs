//! The deformed one-particle space.
//!
//! Input is the block normal form of the generator `A` of the orthogonal
//! group: identity on fixed directions, and on each two-dimensional rotation
//! block
//!
//! ```text
//! A = [ c   i*s ]        c = (lambda + 1/lambda) / 2
//!     [ -i*s  c ]        s = (lambda - 1/lambda) / 2
//! ```
//!
//! with eigenvalues `lambda` and `1/lambda`. The block form guarantees the
//! orthogonal-group constraint `conj(A) = A^{-1}` by construction and keeps
//! every entry of `A`, `T = 2A/(1+A)` and the covariance `B` a Gaussian
//! rational when `lambda` and `q` are rational.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::One;

use crate::matrix::Matrix;
use crate::scalar::{ratio_to_f64, Rational, Scalar};
use crate::{Error, Result};

/// A number that is either exactly rational or a float; exact-mode builders
/// reject the float variant.
#[derive(Clone, Debug, PartialEq)]
pub enum NumVal {
    Rational(Rational),
    Real(f64),
}

/// Alias used where the value is a rotation eigenvalue.
pub type LambdaVal = NumVal;

impl NumVal {
    pub fn to_f64(&self) -> f64 {
        match self {
            NumVal::Rational(r) => ratio_to_f64(r),
            NumVal::Real(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            NumVal::Rational(r) => Some(r),
            NumVal::Real(_) => None,
        }
    }

    /// Convert into a ring scalar; fails for a float value in the exact ring.
    pub fn to_scalar<S: Scalar>(&self, what: &str) -> Result<S> {
        match self {
            NumVal::Rational(r) => Ok(S::from_rational(r)),
            NumVal::Real(x) => S::from_f64(*x)
                .ok_or_else(|| Error::NotRational(String::from(what))),
        }
    }

    pub fn one() -> Self {
        NumVal::Rational(Rational::one())
    }
}

/// One block of the generator's normal form.
#[derive(Clone, Debug, PartialEq)]
pub enum Block {
    /// `dim` directions fixed by the group.
    Fixed { dim: usize },
    /// `count` copies of the rotation block with eigenvalues
    /// `lambda`, `1/lambda`; requires `lambda > 1`.
    Rotation { lambda: LambdaVal, count: usize },
}

impl Block {
    pub fn dim(&self) -> usize {
        match self {
            Block::Fixed { dim } => *dim,
            Block::Rotation { count, .. } => 2 * count,
        }
    }
}

/// An eigenpair of the generator. Vectors are kept unnormalized
/// (`e1 - i e2` on rotation blocks) so they stay Gaussian rational.
#[derive(Clone, Debug)]
pub struct EigenPair<S> {
    pub value: NumVal,
    pub vector: Vec<S>,
}

/// The deformed one-particle space: generator `A`, deformed inner product
/// matrix `T = 2A/(1+A)`, covariance `B = T` (standard real basis).
#[derive(Clone, Debug)]
pub struct Deformation<S> {
    q: S,
    q_val: NumVal,
    dim: usize,
    blocks: Vec<Block>,
    a: Matrix<S>,
    t: Matrix<S>,
}

impl<S: Scalar> Deformation<S> {
    pub fn build(q: &NumVal, blocks: &[Block]) -> Result<Self> {
        if S::EXACT && q.as_rational().is_none() {
            return Err(Error::NotRational(String::from("q")));
        }
        let qf = q.to_f64();
        if !(-1.0 < qf && qf < 1.0) || !qf.is_finite() {
            return Err(Error::InvalidInput(format!("q = {qf} outside (-1, 1)")));
        }
        if let Some(r) = q.as_rational() {
            let one = Rational::one();
            if !(-&one < *r && *r < one) {
                return Err(Error::InvalidInput(String::from("q outside (-1, 1)")));
            }
        }
        let dim: usize = blocks.iter().map(Block::dim).sum();
        if dim == 0 {
            return Err(Error::InvalidInput(String::from("total dimension is zero")));
        }
        for b in blocks {
            if let Block::Rotation { lambda, count } = b {
                if *count == 0 {
                    return Err(Error::InvalidInput(String::from("rotation count is zero")));
                }
                if S::EXACT && lambda.as_rational().is_none() {
                    return Err(Error::NotRational(String::from("lambda")));
                }
                let lf = lambda.to_f64();
                if !(lf > 1.0) {
                    return Err(Error::InvalidInput(format!("lambda = {lf} must exceed 1")));
                }
                if let Some(r) = lambda.as_rational() {
                    if *r <= Rational::one() {
                        return Err(Error::InvalidInput(String::from("lambda must exceed 1")));
                    }
                }
            }
            if let Block::Fixed { dim } = b {
                if *dim == 0 {
                    return Err(Error::InvalidInput(String::from("fixed block of dimension zero")));
                }
            }
        }

        let mut a = Matrix::zeros(dim, dim);
        let mut t = Matrix::zeros(dim, dim);
        let mut off = 0;
        let half = S::from_ratio(1, 2);
        for b in blocks {
            match b {
                Block::Fixed { dim: k } => {
                    for j in 0..*k {
                        a.set(off + j, off + j, S::one());
                        t.set(off + j, off + j, S::one());
                    }
                    off += k;
                }
                Block::Rotation { lambda, count } => {
                    let lam: S = lambda.to_scalar("lambda")?;
                    let lam_inv = S::one().div(&lam);
                    let c = lam.add(&lam_inv).mul(&half);
                    let s = lam.sub(&lam_inv).mul(&half);
                    // T on the block: diagonal 1, off-diagonal i*(lambda-1)/(lambda+1)
                    let ts = lam.sub(&S::one()).div(&lam.add(&S::one()));
                    let i_unit = imag_unit::<S>();
                    for _ in 0..*count {
                        a.set(off, off, c.clone());
                        a.set(off + 1, off + 1, c.clone());
                        a.set(off, off + 1, i_unit.mul(&s));
                        a.set(off + 1, off, i_unit.mul(&s).neg());
                        t.set(off, off, S::one());
                        t.set(off + 1, off + 1, S::one());
                        t.set(off, off + 1, i_unit.mul(&ts));
                        t.set(off + 1, off, i_unit.mul(&ts).neg());
                        off += 2;
                    }
                }
            }
        }
        Ok(Deformation { q: q.to_scalar("q")?, q_val: q.clone(), dim, blocks: blocks.to_vec(), a, t })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn q_val(&self) -> &NumVal {
        &self.q_val
    }

    pub fn q_f64(&self) -> f64 {
        self.q_val.to_f64()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Generator of the orthogonal group.
    pub fn generator(&self) -> &Matrix<S> {
        &self.a
    }

    /// Matrix of the deformed inner product, `T = 2A/(1+A)`.
    pub fn t(&self) -> &Matrix<S> {
        &self.t
    }

    /// Covariance matrix `B`, equal to `T` in the standard real basis.
    pub fn covariance(&self) -> &Matrix<S> {
        &self.t
    }

    /// The deformed inner product `<xi, eta>_U = xi^H T eta`
    /// (conjugate-linear in the left slot).
    pub fn deformed_inner(&self, xi: &[S], eta: &[S]) -> Result<S> {
        if xi.len() != self.dim || eta.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vectors of length {} and {}, space dimension {}",
                xi.len(),
                eta.len(),
                self.dim
            )));
        }
        let teta = self.t.mul_vec(eta);
        let mut acc = S::zero();
        for (x, y) in xi.iter().zip(&teta) {
            acc = acc.add(&x.conj().mul(y));
        }
        Ok(acc)
    }

    /// Eigenpairs of the generator: `(1, e_k)` on fixed directions and
    /// `(lambda, e1 - i e2)`, `(1/lambda, e1 + i e2)` per rotation block.
    pub fn eigenpairs(&self) -> Vec<EigenPair<S>> {
        let mut out = Vec::new();
        let mut off = 0;
        let i_unit = imag_unit::<S>();
        for b in &self.blocks {
            match b {
                Block::Fixed { dim: k } => {
                    for j in 0..*k {
                        let mut v = alloc::vec![S::zero(); self.dim];
                        v[off + j] = S::one();
                        out.push(EigenPair { value: NumVal::one(), vector: v });
                    }
                    off += k;
                }
                Block::Rotation { lambda, count } => {
                    for _ in 0..*count {
                        let mut f = alloc::vec![S::zero(); self.dim];
                        f[off] = S::one();
                        f[off + 1] = i_unit.neg();
                        let mut fbar = alloc::vec![S::zero(); self.dim];
                        fbar[off] = S::one();
                        fbar[off + 1] = i_unit.clone();
                        out.push(EigenPair { value: lambda.clone(), vector: f });
                        out.push(EigenPair { value: invert_numval(lambda), vector: fbar });
                        off += 2;
                    }
                }
            }
        }
        out
    }

    /// Eigenvalues contributed to the spectrum of `A`: `1` per fixed
    /// direction, `lambda` and `1/lambda` per rotation copy.
    pub fn spectrum(&self) -> Vec<NumVal> {
        self.eigenpairs().into_iter().map(|p| p.value).collect()
    }
}

fn invert_numval(v: &NumVal) -> NumVal {
    match v {
        NumVal::Rational(r) => NumVal::Rational(r.recip()),
        NumVal::Real(x) => NumVal::Real(1.0 / x),
    }
}

/// The imaginary unit in the scalar ring.
pub fn imag_unit<S: Scalar>() -> S {
    S::i()
}
