//! Truncated q-Fock space: graded word basis and q-symmetrized Gram matrices.
//!
//! Level `n` is spanned by words of length `n` over `{1, ..., d}` (stored
//! 0-based, leftmost letter outermost, i.e. `e_{j_n ... j_1}` is stored as
//! `[j_n, ..., j_1]`), ordered lexicographically. The Gram matrix of level
//! `n` is
//!
//! ```text
//! G[v, w] = sum over permutations sigma of q^inv(sigma) * prod_k T[v_sigma(k), w_k]
//! ```
//!
//! assembled by the first-column expansion
//! `G_n[v, w] = sum_j q^(j-1) T[v_j, w_1] G_{n-1}[v \ j, w_2..n]`,
//! which follows from splitting the permutation sum by `sigma(1)`. The
//! direct permutation sum survives as a test oracle.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::deformation::Deformation;
use crate::linalg;
use crate::matrix::Matrix;
use crate::scalar::{C64, Scalar};
use crate::{Error, Result};

/// Largest level dimension certified by exact LDL pivots; bigger levels fall
/// back to float Cholesky plus an inverse-power smallest-eigenvalue check
/// (exact elimination on hundreds of rows of big rationals is impractical).
const EXACT_LDL_LIMIT: usize = 64;

/// Default ceiling on the total number of stored Gram entries.
pub const DEFAULT_GRAM_BUDGET: usize = 4_000_000;

/// Word of level `n` at lexicographic position `idx` (0-based letters).
pub fn word_from_index(d: usize, n: usize, mut idx: usize) -> Vec<usize> {
    let mut w = vec![0usize; n];
    for k in (0..n).rev() {
        w[k] = idx % d;
        idx /= d;
    }
    w
}

/// Lexicographic position of a word (0-based letters).
pub fn index_from_word(d: usize, word: &[usize]) -> usize {
    word.iter().fold(0, |acc, &j| acc * d + j)
}

/// The truncated q-Fock space over a deformed one-particle space.
#[derive(Clone, Debug)]
pub struct FockSpace<S> {
    deformation: Deformation<S>,
    n_max: usize,
    /// Gram matrices of levels `0 ..= n_max`.
    gram: Vec<Matrix<S>>,
}

impl<S: Scalar> FockSpace<S> {
    pub fn build(deformation: Deformation<S>, n_max: usize) -> Result<Self> {
        Self::build_with_budget(deformation, n_max, DEFAULT_GRAM_BUDGET)
    }

    /// Build with an explicit ceiling on stored Gram entries
    /// (`sum over levels of d^(2n)`).
    pub fn build_with_budget(
        deformation: Deformation<S>,
        n_max: usize,
        max_gram_entries: usize,
    ) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidInput(format!("truncation {n_max} must be >= 1")));
        }
        let d = deformation.dim();
        let mut total: usize = 0;
        let mut size: usize = 1;
        for n in 0..=n_max {
            total = total
                .checked_add(size.checked_mul(size).ok_or_else(|| budget_err(d, n_max))?)
                .ok_or_else(|| budget_err(d, n_max))?;
            if n < n_max {
                size = size.checked_mul(d).ok_or_else(|| budget_err(d, n_max))?;
            }
        }
        if total > max_gram_entries {
            return Err(Error::BudgetExceeded(format!(
                "{total} Gram entries for d = {d}, N = {n_max}, budget {max_gram_entries}"
            )));
        }

        let t = deformation.t().clone();
        let q = deformation.q().clone();
        let mut gram: Vec<Matrix<S>> = Vec::with_capacity(n_max + 1);
        gram.push(Matrix::identity(1));
        gram.push(t.clone());
        for n in 2..=n_max {
            let dim = d.pow(n as u32);
            let prev = &gram[n - 1];
            let stride = d.pow((n - 1) as u32); // d^(n-1)
            // q^0 .. q^(n-1)
            let mut qpows = Vec::with_capacity(n);
            let mut qp = S::one();
            for _ in 0..n {
                qpows.push(qp.clone());
                qp = qp.mul(&q);
            }
            let mut g = Matrix::zeros(dim, dim);
            for iv in 0..dim {
                let v = word_from_index(d, n, iv);
                // index of v with position j removed, per j
                let mut v_minus = Vec::with_capacity(n);
                for j in 0..n {
                    let low = d.pow((n - 1 - j) as u32);
                    let high = iv / (low * d);
                    v_minus.push(high * low + iv % low);
                }
                for iw in 0..dim {
                    let w0 = iw / stride;
                    let iw_rest = iw % stride;
                    let mut acc = S::zero();
                    for j in 0..n {
                        let tij = t.get(v[j], w0);
                        if tij.is_zero() {
                            continue;
                        }
                        let sub = prev.get(v_minus[j], iw_rest);
                        if sub.is_zero() {
                            continue;
                        }
                        acc = acc.add(&qpows[j].mul(&tij.mul(sub)));
                    }
                    g.set(iv, iw, acc);
                }
            }
            gram.push(g);
        }
        let space = FockSpace { deformation, n_max, gram };
        space.certify_positive()?;
        Ok(space)
    }

    /// Positive-definiteness certification of every level Gram matrix:
    /// exact LDL pivots on small levels in exact mode, float Cholesky plus a
    /// smallest-eigenvalue check otherwise. A failure signals an arithmetic
    /// or convention bug, never a legitimate input.
    pub fn certify_positive(&self) -> Result<()> {
        for (n, g) in self.gram.iter().enumerate() {
            if S::EXACT {
                if !g.is_hermitian() {
                    return Err(Error::GramNotPositive(format!("level {n} not Hermitian")));
                }
            } else {
                let ga = approx_matrix(g);
                let defect = ga.sub(&ga.dagger()).max_abs_approx();
                let scale = ga.max_abs_approx() + 1.0;
                if defect > 1e-10 * scale {
                    return Err(Error::GramNotPositive(format!(
                        "level {n}: hermiticity defect {defect:e}"
                    )));
                }
            }
            if S::EXACT && g.rows() <= EXACT_LDL_LIMIT {
                let pivots = g.ldl_pivots()?;
                if !pivots.iter().all(Scalar::is_positive_real) {
                    return Err(Error::GramNotPositive(format!(
                        "level {n}: nonpositive exact pivot"
                    )));
                }
            } else {
                let ga = approx_matrix(g);
                let scale = (0..ga.rows()).map(|i| ga.get(i, i).re).fold(1.0, f64::max);
                let tol = 1e-12 * scale;
                let l = linalg::cholesky(&ga, tol).ok_or_else(|| {
                    Error::GramNotPositive(format!("level {n}: float Cholesky pivot below {tol:e}"))
                })?;
                let lo = linalg::min_eig_pd(&ga, &l, 60);
                if !(lo > tol) {
                    return Err(Error::GramNotPositive(format!(
                        "level {n}: smallest eigenvalue {lo:e} below {tol:e}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn deformation(&self) -> &Deformation<S> {
        &self.deformation
    }

    /// One-particle dimension `d`.
    pub fn dim(&self) -> usize {
        self.deformation.dim()
    }

    /// Truncation level `N`.
    pub fn truncation(&self) -> usize {
        self.n_max
    }

    /// Number of words at a level.
    pub fn level_dim(&self, n: usize) -> usize {
        self.dim().pow(n as u32)
    }

    /// Total coordinate count over all levels.
    pub fn total_dim(&self) -> usize {
        (0..=self.n_max).map(|n| self.level_dim(n)).sum()
    }

    /// Gram matrix of a level.
    pub fn gram(&self, n: usize) -> &Matrix<S> {
        &self.gram[n]
    }

    /// `<xi, eta> = sum over levels of xi^H G eta`
    /// (conjugate-linear on the left).
    pub fn q_inner(&self, xi: &FockVector<S>, eta: &FockVector<S>) -> Result<S> {
        self.check_vector(xi)?;
        self.check_vector(eta)?;
        let mut acc = S::zero();
        for n in 0..=self.n_max {
            let g_eta = self.gram[n].mul_vec(eta.level(n));
            for (x, y) in xi.level(n).iter().zip(&g_eta) {
                if !x.is_zero() && !y.is_zero() {
                    acc = acc.add(&x.conj().mul(y));
                }
            }
        }
        Ok(acc)
    }

    pub fn check_vector(&self, v: &FockVector<S>) -> Result<()> {
        if v.levels.len() != self.n_max + 1
            || (0..=self.n_max).any(|n| v.level(n).len() != self.level_dim(n))
        {
            return Err(Error::DimensionMismatch(format!(
                "vector with {} levels on a space truncated at {}",
                v.levels.len().saturating_sub(1),
                self.n_max
            )));
        }
        Ok(())
    }

    pub fn zero_vector(&self) -> FockVector<S> {
        FockVector {
            levels: (0..=self.n_max).map(|n| vec![S::zero(); self.level_dim(n)]).collect(),
        }
    }

    pub fn vacuum(&self) -> FockVector<S> {
        let mut v = self.zero_vector();
        v.levels[0][0] = S::one();
        v
    }

    /// The basis vector `e_w` (0-based letters, stored order `[j_n, ..., j_1]`).
    pub fn basis_vector(&self, word: &[usize]) -> Result<FockVector<S>> {
        let n = word.len();
        if n > self.n_max || word.iter().any(|&j| j >= self.dim()) {
            return Err(Error::InvalidInput(format!(
                "word {word:?} outside basis (d = {}, N = {})",
                self.dim(),
                self.n_max
            )));
        }
        let mut v = self.zero_vector();
        v.levels[n][index_from_word(self.dim(), word)] = S::one();
        Ok(v)
    }

    /// Word at a lexicographic basis position of a level.
    pub fn word_at(&self, level: usize, idx: usize) -> Vec<usize> {
        word_from_index(self.dim(), level, idx)
    }

    /// Rebuild the same space in complex `f64` (used for norm computations,
    /// which need square roots).
    pub fn to_float(&self) -> Result<FockSpace<C64>> {
        let d = Deformation::build(self.deformation.q_val(), self.deformation.blocks())?;
        FockSpace::build_with_budget(d, self.n_max, usize::MAX)
    }
}

fn budget_err(d: usize, n_max: usize) -> Error {
    Error::BudgetExceeded(format!("basis size overflow for d = {d}, N = {n_max}"))
}

/// Float approximation of a matrix, entrywise.
pub fn approx_matrix<S: Scalar>(m: &Matrix<S>) -> Matrix<C64> {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j).approx())
}

/// A vector in the truncated Fock space: one coefficient array per level.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<S> {
    levels: Vec<Vec<S>>,
}

impl<S: Scalar> FockVector<S> {
    /// Assemble from raw per-level coefficient arrays (lengths must be the
    /// level dimensions of the space the vector will be used with).
    pub fn from_raw(levels: Vec<Vec<S>>) -> Self {
        FockVector { levels }
    }

    pub fn level(&self, n: usize) -> &[S] {
        &self.levels[n]
    }

    pub fn level_mut(&mut self, n: usize) -> &mut [S] {
        &mut self.levels[n]
    }

    pub fn levels(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn coeff(&self, level: usize, idx: usize) -> &S {
        &self.levels[level][idx]
    }

    pub fn set_coeff(&mut self, level: usize, idx: usize, v: S) {
        self.levels[level][idx] = v;
    }

    pub fn add_assign_coeff(&mut self, level: usize, idx: usize, v: &S) {
        let e = &mut self.levels[level][idx];
        *e = e.add(v);
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, Scalar::add)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, Scalar::sub)
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!(self.levels.len(), rhs.levels.len());
        FockVector {
            levels: self
                .levels
                .iter()
                .zip(&rhs.levels)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        FockVector {
            levels: self.levels.iter().map(|l| l.iter().map(|x| x.mul(c)).collect()).collect(),
        }
    }

    /// Entrywise conjugation of the coordinates.
    pub fn conj(&self) -> Self {
        FockVector {
            levels: self.levels.iter().map(|l| l.iter().map(Scalar::conj).collect()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(|l| l.iter().all(Scalar::is_zero))
    }

    /// Largest coefficient magnitude in `f64` approximation.
    pub fn max_abs_approx(&self) -> f64 {
        self.levels
            .iter()
            .flatten()
            .map(|x| {
                let c = x.approx();
                libm::hypot(c.re, c.im)
            })
            .fold(0.0, f64::max)
    }

    /// Levels carrying a nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.levels.len())
            .filter(|&n| self.levels[n].iter().any(|x| !x.is_zero()))
            .collect()
    }
}
