//! Creation, annihilation and Wick generators on the truncated Fock space,
//! Gram adjoints, the vacuum state, and two independent moment routes.
//!
//! Operators are stored blockwise per (output level, input level); absent
//! blocks are zero. Truncation semantics: creation out of the top level is
//! zero, so every identity is checked only on inputs whose exact computation
//! never touches the cut.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::fock::{FockSpace, FockVector};
use crate::matrix::Matrix;
use crate::partitions::{crossings_of_pairing, pair_partitions};
use crate::rng::Lcg64;
use crate::scalar::{C64, Scalar, pow};
use crate::{Error, Result};

/// A graded linear map on Fock coordinates, stored per level pair.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix<S> {
    /// Level dimensions `d^0, ..., d^N`.
    dims: Vec<usize>,
    /// `blocks[out][in]`; `None` means zero.
    blocks: Vec<Vec<Option<Matrix<S>>>>,
}

impl<S: Scalar> OperatorMatrix<S> {
    pub fn zero(f: &FockSpace<S>) -> Self {
        let n = f.truncation();
        OperatorMatrix {
            dims: (0..=n).map(|k| f.level_dim(k)).collect(),
            blocks: (0..=n).map(|_| vec![None; n + 1]).collect(),
        }
    }

    pub fn identity(f: &FockSpace<S>) -> Self {
        let mut m = Self::zero(f);
        for k in 0..m.dims.len() {
            m.blocks[k][k] = Some(Matrix::identity(m.dims[k]));
        }
        m
    }

    /// The rank-one projection onto the vacuum line.
    pub fn vacuum_projection(f: &FockSpace<S>) -> Self {
        let mut m = Self::zero(f);
        m.blocks[0][0] = Some(Matrix::identity(1));
        m
    }

    pub fn levels(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn block(&self, out: usize, input: usize) -> Option<&Matrix<S>> {
        self.blocks[out][input].as_ref()
    }

    pub fn set_block(&mut self, out: usize, input: usize, m: Matrix<S>) {
        assert_eq!((m.rows(), m.cols()), (self.dims[out], self.dims[input]), "block shape");
        self.blocks[out][input] = if m.is_zero() { None } else { Some(m) };
    }

    pub fn apply(&self, v: &FockVector<S>) -> FockVector<S> {
        let n = self.levels();
        let mut out_levels: Vec<Vec<S>> = (0..=n).map(|k| vec![S::zero(); self.dims[k]]).collect();
        for out in 0..=n {
            for input in 0..=n {
                let Some(b) = &self.blocks[out][input] else { continue };
                if v.level(input).iter().all(Scalar::is_zero) {
                    continue;
                }
                let w = b.mul_vec(v.level(input));
                for (acc, x) in out_levels[out].iter_mut().zip(&w) {
                    *acc = acc.add(x);
                }
            }
        }
        FockVector::from_raw(out_levels)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| match (a, b) {
            (None, None) => None,
            (Some(x), None) => Some(x.clone()),
            (None, Some(y)) => Some(y.clone()),
            (Some(x), Some(y)) => Some(x.add(y)),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| match (a, b) {
            (None, None) => None,
            (Some(x), None) => Some(x.clone()),
            (None, Some(y)) => Some(y.scale(&S::one().neg())),
            (Some(x), Some(y)) => Some(x.sub(y)),
        })
    }

    fn zip(
        &self,
        rhs: &Self,
        f: impl Fn(Option<&Matrix<S>>, Option<&Matrix<S>>) -> Option<Matrix<S>>,
    ) -> Self {
        assert_eq!(self.dims, rhs.dims);
        let n = self.levels();
        let mut out = Self { dims: self.dims.clone(), blocks: (0..=n).map(|_| vec![None; n + 1]).collect() };
        for a in 0..=n {
            for b in 0..=n {
                out.blocks[a][b] = f(self.blocks[a][b].as_ref(), rhs.blocks[a][b].as_ref());
            }
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        let n = self.levels();
        let mut out = Self { dims: self.dims.clone(), blocks: (0..=n).map(|_| vec![None; n + 1]).collect() };
        for a in 0..=n {
            for b in 0..=n {
                out.blocks[a][b] = self.blocks[a][b].as_ref().map(|m| m.scale(c));
            }
        }
        out
    }

    /// `self` after `rhs`: `(self ∘ rhs)(v) = self(rhs(v))`.
    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.dims, rhs.dims);
        let n = self.levels();
        let mut out = Self { dims: self.dims.clone(), blocks: (0..=n).map(|_| vec![None; n + 1]).collect() };
        for a in 0..=n {
            for c in 0..=n {
                let mut acc: Option<Matrix<S>> = None;
                for b in 0..=n {
                    let (Some(x), Some(y)) = (self.blocks[a][b].as_ref(), rhs.blocks[b][c].as_ref())
                    else {
                        continue;
                    };
                    let prod = x.matmul(y);
                    acc = Some(match acc {
                        None => prod,
                        Some(s) => s.add(&prod),
                    });
                }
                out.blocks[a][c] = acc.filter(|m| !m.is_zero());
            }
        }
        out
    }

    /// Zero out all blocks with input level above `max_level` (used to keep
    /// commutator checks inside the truncation-exact domain).
    pub fn restrict_input_levels(&self, max_level: usize) -> Self {
        let mut out = self.clone();
        for row in out.blocks.iter_mut() {
            for (input, b) in row.iter_mut().enumerate() {
                if input > max_level {
                    *b = None;
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().flatten().all(|b| b.as_ref().is_none_or(Matrix::is_zero))
    }

    /// Largest entry magnitude over all blocks, in `f64` approximation.
    pub fn max_abs_approx(&self) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .filter_map(|b| b.as_ref().map(Matrix::max_abs_approx))
            .fold(0.0, f64::max)
    }

    /// Entrywise float approximation.
    pub fn approx(&self) -> OperatorMatrix<C64> {
        let n = self.levels();
        OperatorMatrix {
            dims: self.dims.clone(),
            blocks: (0..=n)
                .map(|a| {
                    (0..=n)
                        .map(|b| {
                            self.blocks[a][b]
                                .as_ref()
                                .map(|m| Matrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).approx()))
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// `l*(xi)`: `e_w ↦ Σ_i xi_i e_{i·w}` (prepend); the top level maps to zero.
pub fn creation<S: Scalar>(f: &FockSpace<S>, xi: &[S]) -> Result<OperatorMatrix<S>> {
    check_one_particle(f, xi)?;
    let d = f.dim();
    let mut m = OperatorMatrix::zero(f);
    for n in 0..f.truncation() {
        let din = f.level_dim(n);
        let mut b = Matrix::zeros(din * d, din);
        for (i, c) in xi.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for iw in 0..din {
                b.add_assign_at(i * din + iw, iw, c);
            }
        }
        m.set_block(n + 1, n, b);
    }
    Ok(m)
}

/// `l(xi)`: `e_{j_n…j_1} ↦ Σ_k q^{n−k} ⟨xi, e_{j_k}⟩_U e_{j_n…ĵ_k…j_1}`
/// (position 1 is the rightmost letter); the vacuum maps to zero.
pub fn annihilation<S: Scalar>(f: &FockSpace<S>, xi: &[S]) -> Result<OperatorMatrix<S>> {
    check_one_particle(f, xi)?;
    let d = f.dim();
    let t = f.deformation().t();
    let q = f.deformation().q();
    // <xi, e_j>_U = Σ_a conj(xi_a) T[a, j]
    let pair: Vec<S> = (0..d)
        .map(|j| {
            let mut acc = S::zero();
            for (a, x) in xi.iter().enumerate() {
                if !x.is_zero() {
                    acc = acc.add(&x.conj().mul(t.get(a, j)));
                }
            }
            acc
        })
        .collect();
    let mut m = OperatorMatrix::zero(f);
    for n in 1..=f.truncation() {
        let din = f.level_dim(n);
        let mut b = Matrix::zeros(din / d, din);
        // stored position p carries exponent q^p (p = n - k)
        let mut qpows = Vec::with_capacity(n);
        let mut qp = S::one();
        for _ in 0..n {
            qpows.push(qp.clone());
            qp = qp.mul(q);
        }
        for iw in 0..din {
            let w = f.word_at(n, iw);
            for p in 0..n {
                let c = qpows[p].mul(&pair[w[p]]);
                if c.is_zero() {
                    continue;
                }
                let low = d.pow((n - 1 - p) as u32);
                let reduced = (iw / (low * d)) * low + iw % low;
                b.add_assign_at(reduced, iw, &c);
            }
        }
        m.set_block(n - 1, n, b);
    }
    Ok(m)
}

/// The Wick operator `W(xi) = l*(xi) + l(conj xi)` (so `W(xi)Ω = xi`).
pub fn wick<S: Scalar>(f: &FockSpace<S>, xi: &[S]) -> Result<OperatorMatrix<S>> {
    let xibar: Vec<S> = xi.iter().map(Scalar::conj).collect();
    Ok(creation(f, xi)?.add(&annihilation(f, &xibar)?))
}

/// The Gaussian generator `A_i = W(e_i)` (0-based `i`).
pub fn generator<S: Scalar>(f: &FockSpace<S>, i: usize) -> Result<OperatorMatrix<S>> {
    if i >= f.dim() {
        return Err(Error::InvalidInput(format!("generator index {i} for d = {}", f.dim())));
    }
    let mut e = vec![S::zero(); f.dim()];
    e[i] = S::one();
    wick(f, &e)
}

/// Adjoint with respect to the q-inner product:
/// `(M†)_{a←b} = G_a^{-1} (M_{b←a})^H G_b`.
pub fn gram_adjoint<S: Scalar>(f: &FockSpace<S>, m: &OperatorMatrix<S>) -> Result<OperatorMatrix<S>> {
    let n = f.truncation();
    let mut out = OperatorMatrix::zero(f);
    for a in 0..=n {
        for b in 0..=n {
            let Some(blk) = m.block(b, a) else { continue };
            let rhs = blk.dagger().matmul(f.gram(b));
            let adj = f.gram(a).solve(&rhs)?;
            out.set_block(a, b, adj);
        }
    }
    Ok(out)
}

/// The vacuum state `φ(M) = ⟨Ω, MΩ⟩`.
pub fn state<S: Scalar>(m: &OperatorMatrix<S>) -> S {
    m.block(0, 0).map_or_else(S::zero, |b| b.get(0, 0).clone())
}

/// `φ(A_{j_1} ⋯ A_{j_n})` by applying the generator matrices to the vacuum
/// (0-based letters, leftmost factor first). Exact whenever `n ≤ N`.
pub fn moment<S: Scalar>(f: &FockSpace<S>, word: &[usize]) -> Result<S> {
    if word.len() > f.truncation() {
        return Err(Error::InvalidInput(format!(
            "moment word of length {} exceeds truncation {}",
            word.len(),
            f.truncation()
        )));
    }
    let mut v = f.vacuum();
    for &j in word.iter().rev() {
        v = generator(f, j)?.apply(&v);
    }
    Ok(v.coeff(0, 0).clone())
}

/// The same moment by the combinatorial route: sum over perfect matchings of
/// the letter positions, weighted `q^crossings`, with ordered covariance
/// factors `φ(A_{j_a} A_{j_b}) = B[j_a, j_b]` for `a < b`. Shares no code
/// with [`moment`] and is independent of the truncation.
pub fn moment_pairings<S: Scalar>(f: &FockSpace<S>, word: &[usize]) -> S {
    let b = f.deformation().covariance();
    let q = f.deformation().q();
    let mut acc = S::zero();
    for matching in pair_partitions(word.len()) {
        let mut term = pow(q, crossings_of_pairing(&matching));
        for &(lo, hi) in &matching {
            term = term.mul(b.get(word[lo], word[hi]));
        }
        acc = acc.add(&term);
    }
    acc
}

/// Operator norm with respect to the q-inner product, by power iteration on
/// `M†M` (float only; the iteration vector is drawn from a pinned generator).
pub fn op_norm_q(f: &FockSpace<C64>, m: &OperatorMatrix<C64>, iters: usize) -> Result<f64> {
    let mm = gram_adjoint(f, m)?.compose(m);
    let mut rng = Lcg64::new(0x6f706e72);
    let mut v = f.zero_vector();
    for n in 0..=f.truncation() {
        for idx in 0..f.level_dim(n) {
            v.set_coeff(n, idx, C64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5));
        }
    }
    let mut mu = 0.0f64;
    for _ in 0..iters {
        let norm_sq = f.q_inner(&v, &v)?.re;
        if !(norm_sq > 0.0) {
            return Ok(0.0);
        }
        let inv = C64::new(1.0 / libm::sqrt(norm_sq), 0.0);
        v = v.scale(&inv);
        let w = mm.apply(&v);
        mu = f.q_inner(&v, &w)?.re;
        // mix in a fresh step to escape invariant subspaces of zero norm
        if w.max_abs_approx() == 0.0 {
            return Ok(0.0);
        }
        v = w;
    }
    Ok(libm::sqrt(mu.max(0.0)))
}

fn check_one_particle<S: Scalar>(f: &FockSpace<S>, xi: &[S]) -> Result<()> {
    if xi.len() != f.dim() {
        return Err(Error::DimensionMismatch(format!(
            "one-particle vector of length {}, space dimension {}",
            xi.len(),
            f.dim()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::{Block, Deformation, NumVal};
    use crate::scalar::{CRat, Rational};

    fn rat(p: i64, q: i64) -> NumVal {
        NumVal::Rational(Rational::new(p.into(), q.into()))
    }

    fn rot2(n: usize) -> FockSpace<CRat> {
        let d =
            Deformation::build(&rat(1, 2), &[Block::Rotation { lambda: rat(2, 1), count: 1 }])
                .unwrap();
        FockSpace::build(d, n).unwrap()
    }

    fn e(i: usize, d: usize) -> alloc::vec::Vec<CRat> {
        let mut v = vec![CRat::zero(); d];
        v[i] = CRat::one();
        v
    }

    #[test]
    fn creation_prepends_and_truncates() {
        let f = rot2(3);
        let c1 = creation(&f, &e(0, 2)).unwrap();
        let om = f.vacuum();
        assert_eq!(c1.apply(&om), f.basis_vector(&[0]).unwrap());
        let e2 = f.basis_vector(&[1]).unwrap();
        assert_eq!(c1.apply(&e2), f.basis_vector(&[0, 1]).unwrap());
        // top level maps to zero
        let top = f.basis_vector(&[0, 1, 0]).unwrap();
        assert!(c1.apply(&top).is_zero());
    }

    #[test]
    fn annihilation_examples() {
        let f = rot2(3);
        let a1 = annihilation(&f, &e(0, 2)).unwrap();
        // a(e1) e_(1) = T11 Ω = Ω
        assert_eq!(a1.apply(&f.basis_vector(&[0]).unwrap()), f.vacuum());
        // a(e1) e_(2) = T12 Ω = (i/3) Ω
        let i3 = CRat::from_imag(Rational::new(1.into(), 3.into()));
        assert_eq!(a1.apply(&f.basis_vector(&[1]).unwrap()), f.vacuum().scale(&i3));
        // vacuum maps to zero
        assert!(a1.apply(&f.vacuum()).is_zero());
    }

    #[test]
    fn annihilation_is_gram_adjoint_of_creation() {
        let f = rot2(4);
        for i in 0..2 {
            let c = creation(&f, &e(i, 2)).unwrap();
            let a = annihilation(&f, &e(i, 2)).unwrap();
            // compare on input levels whose creation image stays below the cut
            let adj = gram_adjoint(&f, &c).unwrap();
            assert_eq!(adj, a, "i = {i}");
        }
    }

    #[test]
    fn generators_self_adjoint_below_cut() {
        let f = rot2(4);
        for i in 0..2 {
            let a = generator(&f, i).unwrap();
            let adj = gram_adjoint(&f, &a).unwrap();
            // truncation kills the level N -> N+1 part of A_i, so its adjoint
            // loses the level N+1 -> N part; compare on inputs <= N-1
            assert_eq!(
                adj.restrict_input_levels(3),
                a.restrict_input_levels(3)
            );
        }
    }

    #[test]
    fn adjoint_is_involutive_on_interior() {
        let f = rot2(3);
        let c = creation(&f, &e(1, 2)).unwrap();
        let back = gram_adjoint(&f, &gram_adjoint(&f, &c).unwrap()).unwrap();
        assert_eq!(back, c);
        let id = OperatorMatrix::identity(&f);
        assert_eq!(gram_adjoint(&f, &id).unwrap(), id);
    }

    #[test]
    fn state_and_covariance() {
        let f = rot2(4);
        assert_eq!(state(&OperatorMatrix::identity(&f)), CRat::one());
        let b = f.deformation().covariance().clone();
        for j in 0..2 {
            for i in 0..2 {
                assert_eq!(moment(&f, &[j, i]).unwrap(), *b.get(j, i));
                // A_j A_i Ω = e_(j,i) + B_ji Ω
                let v = generator(&f, j)
                    .unwrap()
                    .apply(&generator(&f, i).unwrap().apply(&f.vacuum()));
                assert_eq!(*v.coeff(0, 0), *b.get(j, i));
                assert_eq!(*v.coeff(2, j * 2 + i), CRat::one());
            }
        }
    }

    #[test]
    fn odd_moments_vanish() {
        let f = rot2(3);
        for w in [vec![0], vec![1, 0, 1], vec![0, 0, 0]] {
            assert!(moment(&f, &w).unwrap().is_zero());
            assert!(moment_pairings(&f, &w).is_zero());
        }
    }

    #[test]
    fn moment_routes_agree() {
        let f = rot2(4);
        for n in [2usize, 4] {
            for idx in 0..(1usize << n) {
                let w: alloc::vec::Vec<usize> = (0..n).map(|k| (idx >> k) & 1).collect();
                assert_eq!(moment(&f, &w).unwrap(), moment_pairings(&f, &w), "w = {w:?}");
            }
        }
    }

    #[test]
    fn catalan_moments_at_q_zero() {
        let d = Deformation::<CRat>::build(&rat(0, 1), &[Block::Fixed { dim: 1 }]).unwrap();
        let f = FockSpace::build(d, 10).unwrap();
        let catalan = [1i64, 2, 5, 14, 42];
        for (m, &c) in catalan.iter().enumerate() {
            let w = vec![0usize; 2 * (m + 1)];
            assert_eq!(moment(&f, &w).unwrap(), CRat::from_i64(c), "length {}", 2 * (m + 1));
            assert_eq!(moment_pairings(&f, &w), CRat::from_i64(c));
        }
    }

    #[test]
    fn op_norm_of_vacuum_projection() {
        let d = Deformation::<C64>::build(&rat(1, 2), &[Block::Rotation {
            lambda: rat(2, 1),
            count: 1,
        }])
        .unwrap();
        let f = FockSpace::build(d, 3).unwrap();
        let p = OperatorMatrix::vacuum_projection(&f);
        let nrm = op_norm_q(&f, &p, 200).unwrap();
        assert!((nrm - 1.0).abs() < 1e-9, "norm {nrm}");
        assert_eq!(op_norm_q(&f, &OperatorMatrix::zero(&f), 50).unwrap(), 0.0);
    }
}
