//! Dual variables by two independent constructions, conjugate variables by
//! two independent constructions, the conjugate pairing identity, base
//! change, and commutator residuals.
//!
//! The recursion
//!
//! ```text
//! D_i Ω = 0
//! D_i e_{j·w} = A_j (D_i e_w) + B_{ji} [w = ∅] Ω
//!               − Σ_{k=1}^{|w|} q^{|w|−k} B_{j w_k} D_i e_{w∖w_k}
//! ```
//!
//! is normative; the closed partition formula (module `partitions`) is the
//! implementation under test. Position `k` counts from the right
//! (`e_{j_n…j_1}`, stored `[j_n, ..., j_1]`), so the stored index `p` of a
//! letter carries exponent `q^p`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::fock::{FockSpace, FockVector, index_from_word};
use crate::matrix::Matrix;
use crate::partitions::enumerate_dual_partitions;
use crate::rng::Lcg64;
use crate::scalar::{Scalar, pow};
use crate::wick::{self, OperatorMatrix};
use crate::{Error, Result};

/// Which construction produced a dual system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualRoute {
    Recursive,
    Partition,
}

/// The operators `D_1, ..., D_d` as matrices on the truncated space.
#[derive(Clone, Debug)]
pub struct DualSystem<S> {
    route: DualRoute,
    ops: Vec<OperatorMatrix<S>>,
}

impl<S: Scalar> DualSystem<S> {
    pub fn build(f: &FockSpace<S>, route: DualRoute) -> Result<Self> {
        let d = f.dim();
        let mut ops = Vec::with_capacity(d);
        for i in 0..d {
            ops.push(match route {
                DualRoute::Recursive => build_recursive_op(f, i)?,
                DualRoute::Partition => build_partition_op(f, i)?,
            });
        }
        Ok(DualSystem { route, ops })
    }

    pub fn route(&self) -> DualRoute {
        self.route
    }

    pub fn op(&self, i: usize) -> &OperatorMatrix<S> {
        &self.ops[i]
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// `D_i e_w` by unrolling the defining recursion for a single word
/// (0-based letter `i`, stored word `[j_n, ..., j_1]`).
pub fn dual_apply_recursive<S: Scalar>(
    f: &FockSpace<S>,
    i: usize,
    word: &[usize],
) -> Result<FockVector<S>> {
    check_word(f, i, word)?;
    let b = f.deformation().covariance().clone();
    let q = f.deformation().q().clone();
    let gens: Vec<OperatorMatrix<S>> =
        (0..f.dim()).map(|j| wick::generator(f, j)).collect::<Result<_>>()?;
    fn rec<S: Scalar>(
        f: &FockSpace<S>,
        i: usize,
        word: &[usize],
        b: &Matrix<S>,
        q: &S,
        gens: &[OperatorMatrix<S>],
    ) -> Result<FockVector<S>> {
        if word.is_empty() {
            return Ok(f.zero_vector());
        }
        let j = word[0];
        let rest = &word[1..];
        if rest.is_empty() {
            return Ok(f.vacuum().scale(b.get(j, i)));
        }
        let mut out = gens[j].apply(&rec(f, i, rest, b, q, gens)?);
        for p in 0..rest.len() {
            let c = pow(q, p as u32).mul(b.get(j, rest[p]));
            if c.is_zero() {
                continue;
            }
            let mut sub = rest.to_vec();
            sub.remove(p);
            let term = rec(f, i, &sub, b, q, gens)?.scale(&c);
            out = out.sub(&term);
        }
        Ok(out)
    }
    rec(f, i, word, &b, &q, &gens)
}

/// `D_i e_w` by the closed partition formula: points `{0, ..., n}` with
/// `j_0 := i` and point `k` carrying letter `j_k` (the letter at position `k`
/// from the right), summed over the dual-partition family with sign
/// `(−1)^{π(0)−1}`, weight `q^{exponent}`, covariance factors
/// `B[j_hi, j_lo]` per pair, and the singleton letters (in decreasing point
/// order) forming the output word.
pub fn dual_apply_partition<S: Scalar>(
    f: &FockSpace<S>,
    i: usize,
    word: &[usize],
) -> Result<FockVector<S>> {
    check_word(f, i, word)?;
    let n = word.len();
    let b = f.deformation().covariance();
    let q = f.deformation().q();
    // letter at point k: j_0 = i, j_k = word[n - k]
    let letter = |k: usize| if k == 0 { i } else { word[n - k] };
    let mut out = f.zero_vector();
    for part in enumerate_dual_partitions(n) {
        let mut coeff = pow(q, part.q_exponent);
        if part.sign < 0 {
            coeff = coeff.neg();
        }
        coeff = coeff.mul(b.get(letter(part.partner0), letter(0)));
        for &(hi, lo) in &part.pairs {
            coeff = coeff.mul(b.get(letter(hi), letter(lo)));
        }
        if coeff.is_zero() {
            continue;
        }
        // decreasing point order = stored (left-to-right) order
        let out_word: Vec<usize> =
            part.singletons.iter().rev().map(|&s| letter(s)).collect();
        let level = out_word.len();
        out.add_assign_coeff(level, index_from_word(f.dim(), &out_word), &coeff);
    }
    Ok(out)
}

fn check_word<S: Scalar>(f: &FockSpace<S>, i: usize, word: &[usize]) -> Result<()> {
    if i >= f.dim() || word.iter().any(|&j| j >= f.dim()) {
        return Err(Error::InvalidInput(format!(
            "letters out of range for d = {}",
            f.dim()
        )));
    }
    if word.len() > f.truncation() {
        return Err(Error::InvalidInput(format!(
            "word of length {} exceeds truncation {}",
            word.len(),
            f.truncation()
        )));
    }
    Ok(())
}

/// Assemble `D_i` as a matrix, level by level, memoizing the recursion.
fn build_recursive_op<S: Scalar>(f: &FockSpace<S>, i: usize) -> Result<OperatorMatrix<S>> {
    let d = f.dim();
    let n_max = f.truncation();
    let b = f.deformation().covariance();
    let q = f.deformation().q();
    let gens: Vec<OperatorMatrix<S>> =
        (0..d).map(|j| wick::generator(f, j)).collect::<Result<_>>()?;
    // memo[n][iw] = D_i e_w for all words of length n
    let mut memo: Vec<Vec<FockVector<S>>> = vec![vec![f.zero_vector()]];
    for n in 1..=n_max {
        let dim = f.level_dim(n);
        let rest_dim = f.level_dim(n - 1);
        let mut level = Vec::with_capacity(dim);
        let mut qpows = Vec::with_capacity(n);
        let mut qp = S::one();
        for _ in 0..n.saturating_sub(1) {
            qpows.push(qp.clone());
            qp = qp.mul(q);
        }
        for iw in 0..dim {
            let j = iw / rest_dim;
            let i_rest = iw % rest_dim;
            let mut v = if n == 1 {
                f.vacuum().scale(b.get(j, i))
            } else {
                gens[j].apply(&memo[n - 1][i_rest])
            };
            if n >= 2 {
                let rest = f.word_at(n - 1, i_rest);
                for p in 0..n - 1 {
                    let c = qpows[p].mul(b.get(j, rest[p]));
                    if c.is_zero() {
                        continue;
                    }
                    let low = d.pow((n - 2 - p) as u32);
                    let sub = (i_rest / (low * d)) * low + i_rest % low;
                    v = v.sub(&memo[n - 2][sub].scale(&c));
                }
            }
            level.push(v);
        }
        memo.push(level);
    }
    columns_to_operator(f, &memo)
}

fn build_partition_op<S: Scalar>(f: &FockSpace<S>, i: usize) -> Result<OperatorMatrix<S>> {
    let n_max = f.truncation();
    let mut cols: Vec<Vec<FockVector<S>>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut level = Vec::with_capacity(f.level_dim(n));
        for iw in 0..f.level_dim(n) {
            level.push(dual_apply_partition(f, i, &f.word_at(n, iw))?);
        }
        cols.push(level);
    }
    columns_to_operator(f, &cols)
}

fn columns_to_operator<S: Scalar>(
    f: &FockSpace<S>,
    cols: &[Vec<FockVector<S>>],
) -> Result<OperatorMatrix<S>> {
    let mut m = OperatorMatrix::zero(f);
    for (n, level) in cols.iter().enumerate() {
        // degree profile: level n maps into n-1, n-3, ...
        let mut a = n;
        while a >= 1 {
            a -= 1;
            let mut blk = Matrix::zeros(f.level_dim(a), f.level_dim(n));
            let mut nonzero = false;
            for (iw, v) in level.iter().enumerate() {
                for (r, c) in v.level(a).iter().enumerate() {
                    if !c.is_zero() {
                        blk.set(r, iw, c.clone());
                        nonzero = true;
                    }
                }
            }
            if nonzero {
                m.set_block(a, n, blk);
            }
            if a == 0 {
                break;
            }
            a -= 1;
        }
        // anything outside the profile would be a construction bug
        for (iw, v) in level.iter().enumerate() {
            for lvl in v.support() {
                if lvl >= n || (n - lvl) % 2 == 0 {
                    return Err(Error::InvalidInput(format!(
                        "dual image of level-{n} word {iw} has support at level {lvl}"
                    )));
                }
            }
        }
    }
    Ok(m)
}

/// Norm of an operator residual: zero short-circuits exactly, otherwise the
/// q-inner operator norm is computed in float.
pub fn residual_norm<S: Scalar>(f: &FockSpace<S>, r: &OperatorMatrix<S>) -> Result<f64> {
    if r.is_zero() {
        return Ok(0.0);
    }
    let ff = f.to_float()?;
    wick::op_norm_q(&ff, &r.approx(), 150)
}

/// Norm of `[D_i, A_j] − B_{ji} P_Ω` restricted to input levels `≤ N−1`
/// (`A_j` raises one level, so the restriction keeps the check
/// truncation-exact). Zero in exact mode when the construction is right.
pub fn commutator_residual<S: Scalar>(
    f: &FockSpace<S>,
    dual: &DualSystem<S>,
    i: usize,
    j: usize,
) -> Result<f64> {
    let a_j = wick::generator(f, j)?;
    let target = OperatorMatrix::vacuum_projection(f).scale(f.deformation().covariance().get(j, i));
    let r = commutator(dual.op(i), &a_j)
        .sub(&target)
        .restrict_input_levels(f.truncation() - 1);
    residual_norm(f, &r)
}

fn commutator<S: Scalar>(x: &OperatorMatrix<S>, y: &OperatorMatrix<S>) -> OperatorMatrix<S> {
    x.compose(y).sub(&y.compose(x))
}

/// Base change: for invertible `X`, sets `E_i = Σ_k X[i,k] D_k` and
/// `C_j = Σ_k X[j,k] A_k` and returns the largest norm over `(i, j)` of
/// `[E_i, C_j] − (X T X^T)[j,i] P_Ω` on input levels `≤ N−1`.
pub fn base_change<S: Scalar>(
    f: &FockSpace<S>,
    dual: &DualSystem<S>,
    x: &Matrix<S>,
) -> Result<f64> {
    let d = f.dim();
    if x.rows() != d || x.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "base-change matrix {}x{} on a {d}-dimensional space",
            x.rows(),
            x.cols()
        )));
    }
    x.inverse().map_err(|_| Error::Singular(format!("base-change matrix")))?;
    let gens: Vec<OperatorMatrix<S>> =
        (0..d).map(|j| wick::generator(f, j)).collect::<Result<_>>()?;
    let combine = |ops: &dyn Fn(usize) -> OperatorMatrix<S>, row: usize| {
        let mut acc = OperatorMatrix::zero(f);
        for k in 0..d {
            acc = acc.add(&ops(k).scale(x.get(row, k)));
        }
        acc
    };
    let targets = x.matmul(f.deformation().t()).matmul(&x.transpose());
    let mut worst = 0.0f64;
    for i in 0..d {
        let e_i = combine(&|k| dual.op(k).clone(), i);
        for j in 0..d {
            let c_j = combine(&|k| gens[k].clone(), j);
            let target = OperatorMatrix::vacuum_projection(f).scale(targets.get(j, i));
            let r = commutator(&e_i, &c_j)
                .sub(&target)
                .restrict_input_levels(f.truncation() - 1);
            worst = worst.max(residual_norm(f, &r)?);
        }
    }
    Ok(worst)
}

/// Seeded invertible matrix with small Gaussian-rational entries. Entry
/// `(i, j)` draws, in row-major order: numerator in `[-9, 9]` and
/// denominator in `[1, 4]` for the real part, then the same for the
/// imaginary part. A singular draw is discarded and the stream continues.
pub fn seeded_matrix<S: Scalar>(d: usize, seed: u64) -> Matrix<S> {
    let mut rng = Lcg64::new(seed);
    loop {
        let m = Matrix::from_fn(d, d, |_, _| {
            let re = S::from_ratio(rng.next_i64_in(-9, 9), rng.next_i64_in(1, 4));
            let im = S::from_ratio(rng.next_i64_in(-9, 9), rng.next_i64_in(1, 4));
            re.add(&im.mul(&S::i()))
        });
        if m.inverse().is_ok() {
            return m;
        }
    }
}

/// `L̃_ξ`: strips the first (outermost) tensor factor with the UNDEFORMED
/// pairing, `ξ₁⊗⋯⊗ξ_n ↦ ⟨ξ, ξ₁⟩ ξ₂⊗⋯⊗ξ_n`.
pub fn strip_first_undeformed<S: Scalar>(f: &FockSpace<S>, xi: &[S]) -> Result<OperatorMatrix<S>> {
    strip_first(f, |j| xi[j].conj())
}

/// `L_ξ`: same strip with the deformed pairing `⟨ξ, ·⟩_U`.
pub fn strip_first_deformed<S: Scalar>(f: &FockSpace<S>, xi: &[S]) -> Result<OperatorMatrix<S>> {
    let t = f.deformation().t();
    strip_first(f, |j| {
        let mut acc = S::zero();
        for (a, x) in xi.iter().enumerate() {
            if !x.is_zero() {
                acc = acc.add(&x.conj().mul(t.get(a, j)));
            }
        }
        acc
    })
}

fn strip_first<S: Scalar>(
    f: &FockSpace<S>,
    pair: impl Fn(usize) -> S,
) -> Result<OperatorMatrix<S>> {
    let d = f.dim();
    let coeffs: Vec<S> = (0..d).map(pair).collect();
    let mut m = OperatorMatrix::zero(f);
    for n in 1..=f.truncation() {
        let rest_dim = f.level_dim(n - 1);
        let mut b = Matrix::zeros(rest_dim, rest_dim * d);
        for j in 0..d {
            if coeffs[j].is_zero() {
                continue;
            }
            for r in 0..rest_dim {
                b.add_assign_at(r, j * rest_dim + r, &coeffs[j]);
            }
        }
        m.set_block(n - 1, n, b);
    }
    Ok(m)
}

/// The conjugate vector `ξ_i = D_i^* Ω` by the truncated series
///
/// ```text
/// Σ_j Σ_{m ≥ 1, 2m−1 ≤ N} Σ_{|v| = m−1}
///     (−1)^{m−1} q^{m(m−1)/2} conj(B_{ji}) L̃*_{v·j}(ē_v)
/// ```
///
/// where `L̃_{u_1 … u_k} = L̃_{e_{u_k}} ∘ ⋯ ∘ L̃_{e_{u_1}}` strips `u_1`
/// first and `*` is the q-inner adjoint.
pub fn conjugate_series<S: Scalar>(f: &FockSpace<S>, i: usize) -> Result<FockVector<S>> {
    let shells = conjugate_series_shells(f, i)?;
    let mut out = f.zero_vector();
    for shell in shells {
        out = out.add(&shell);
    }
    Ok(out)
}

/// The per-`m` shells of the series (shell `m` lives at level `2m−1`);
/// exposed so the bounds module can compare each shell with its majorant.
pub fn conjugate_series_shells<S: Scalar>(
    f: &FockSpace<S>,
    i: usize,
) -> Result<Vec<FockVector<S>>> {
    if i >= f.dim() {
        return Err(Error::InvalidInput(format!("index {i} for d = {}", f.dim())));
    }
    let d = f.dim();
    let n_max = f.truncation();
    let b = f.deformation().covariance();
    let q = f.deformation().q();
    let strips: Vec<OperatorMatrix<S>> = (0..d)
        .map(|k| {
            let mut e = vec![S::zero(); d];
            e[k] = S::one();
            strip_first_undeformed(f, &e)
        })
        .collect::<Result<_>>()?;
    let mut shells = Vec::new();
    let mut m = 1usize;
    while 2 * m - 1 <= n_max {
        let mut shell = f.zero_vector();
        let mut coeff = pow(q, (m * (m - 1) / 2) as u32);
        if (m - 1) % 2 == 1 {
            coeff = coeff.neg();
        }
        for iv in 0..f.level_dim(m - 1) {
            let v = f.word_at(m - 1, iv);
            // ē_v = e_v: the standard basis is real
            let ev = f.basis_vector(&v)?;
            for j in 0..d {
                let bji = b.get(j, i).conj();
                if bji.is_zero() {
                    continue;
                }
                // u = v·j; L̃_u strips u_1 first, so later letters compose
                // on the left
                let seq: Vec<usize> = v.iter().copied().chain(core::iter::once(j)).collect();
                let mut ltilde = strips[seq[0]].clone();
                for &ul in &seq[1..] {
                    ltilde = strips[ul].compose(&ltilde);
                }
                let term = wick::gram_adjoint(f, &ltilde)?.apply(&ev);
                shell = shell.add(&term.scale(&coeff.mul(&bji)));
            }
        }
        shells.push(shell);
        m += 1;
    }
    Ok(shells)
}

/// The conjugate vector by the independent route: `gram_adjoint(D_i) Ω`.
pub fn conjugate_adjoint<S: Scalar>(
    f: &FockSpace<S>,
    dual: &DualSystem<S>,
    i: usize,
) -> Result<FockVector<S>> {
    Ok(wick::gram_adjoint(f, dual.op(i))?.apply(&f.vacuum()))
}

/// The quasi-free conjugate identity on a monomial:
/// `lhs = ⟨ξ_i, A_{j_1}⋯A_{j_n} Ω⟩`,
/// `rhs = Σ_k φ(A_{j_k} A_i) φ(A_{j_1}⋯A_{j_{k−1}}) φ(A_{j_{k+1}}⋯A_{j_n})`.
pub fn conjugate_pairing_check<S: Scalar>(
    f: &FockSpace<S>,
    xi: &FockVector<S>,
    i: usize,
    word: &[usize],
) -> Result<(S, S)> {
    check_word(f, i, word)?;
    let mut v = f.vacuum();
    for &j in word.iter().rev() {
        v = wick::generator(f, j)?.apply(&v);
    }
    let lhs = f.q_inner(xi, &v)?;
    let b = f.deformation().covariance();
    let mut rhs = S::zero();
    for k in 0..word.len() {
        let factor = b.get(word[k], i);
        if factor.is_zero() {
            continue;
        }
        let left = wick::moment(f, &word[..k])?;
        let right = wick::moment(f, &word[k + 1..])?;
        rhs = rhs.add(&factor.mul(&left.mul(&right)));
    }
    Ok((lhs, rhs))
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

    #[test]
    fn short_word_closed_forms() {
        let f = rot2(4);
        let b = f.deformation().covariance().clone();
        let q = f.deformation().q().clone();
        for i in 0..2 {
            // D_i e_(j) = B_ji Ω
            for j in 0..2 {
                let v = dual_apply_recursive(&f, i, &[j]).unwrap();
                assert_eq!(v, f.vacuum().scale(b.get(j, i)));
            }
            // D_i e_(j2, j1) = B_{j1 i} e_(j2)
            for j2 in 0..2 {
                for j1 in 0..2 {
                    let v = dual_apply_recursive(&f, i, &[j2, j1]).unwrap();
                    let want = f.basis_vector(&[j2]).unwrap().scale(b.get(j1, i));
                    assert_eq!(v, want);
                }
            }
            // D_i e_(j3,j2,j1) = B_{j1 i} e_(j3,j2) − q B_{j3 j1} B_{j2 i} Ω
            for j3 in 0..2 {
                for j2 in 0..2 {
                    for j1 in 0..2 {
                        let v = dual_apply_recursive(&f, i, &[j3, j2, j1]).unwrap();
                        let want = f
                            .basis_vector(&[j3, j2])
                            .unwrap()
                            .scale(b.get(j1, i))
                            .sub(&f.vacuum().scale(
                                &q.mul(b.get(j3, j1)).mul(b.get(j2, i)),
                            ));
                        assert_eq!(v, want, "i={i} w=({j3},{j2},{j1})");
                    }
                }
            }
        }
    }

    #[test]
    fn partition_route_matches_recursion() {
        let f = rot2(4);
        for i in 0..2 {
            for n in 1..=4usize {
                for iw in 0..f.level_dim(n) {
                    let w = f.word_at(n, iw);
                    assert_eq!(
                        dual_apply_partition(&f, i, &w).unwrap(),
                        dual_apply_recursive(&f, i, &w).unwrap(),
                        "i={i} w={w:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn memoized_builders_match_per_word_routes() {
        let f = rot2(3);
        let rec = DualSystem::build(&f, DualRoute::Recursive).unwrap();
        let part = DualSystem::build(&f, DualRoute::Partition).unwrap();
        for i in 0..2 {
            assert_eq!(rec.op(i), part.op(i));
            for n in 1..=3usize {
                for iw in 0..f.level_dim(n) {
                    let w = f.word_at(n, iw);
                    let e = f.basis_vector(&w).unwrap();
                    assert_eq!(rec.op(i).apply(&e), dual_apply_recursive(&f, i, &w).unwrap());
                }
            }
            // D_i Ω = 0
            assert!(rec.op(i).apply(&f.vacuum()).is_zero());
        }
    }

    #[test]
    fn commutator_relation_exact() {
        let f = rot2(4);
        let dual = DualSystem::build(&f, DualRoute::Recursive).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(commutator_residual(&f, &dual, i, j).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn residual_detector_fires_on_zero_dual() {
        let f = rot2(3);
        let zero = DualSystem {
            route: DualRoute::Recursive,
            ops: vec![OperatorMatrix::zero(&f); 2],
        };
        // with D = 0 the residual is |B_ji| (the vacuum projection has norm 1)
        let r = commutator_residual(&f, &zero, 0, 1).unwrap();
        let b01 = f.deformation().covariance().get(1, 0).approx();
        assert!((r - libm::hypot(b01.re, b01.im)).abs() < 1e-8, "r = {r}");
    }

    #[test]
    fn base_change_identity_and_seeded() {
        let f = rot2(3);
        let dual = DualSystem::build(&f, DualRoute::Recursive).unwrap();
        assert_eq!(base_change(&f, &dual, &Matrix::identity(2)).unwrap(), 0.0);
        let x: Matrix<CRat> = seeded_matrix(2, 7);
        assert_eq!(base_change(&f, &dual, &x).unwrap(), 0.0);
        // eigenvector rows
        let pairs = f.deformation().eigenpairs();
        let xe = Matrix::from_rows(pairs.into_iter().map(|p| p.vector).collect());
        assert_eq!(base_change(&f, &dual, &xe).unwrap(), 0.0);
        // singular X rejected
        let sing = Matrix::from_rows(vec![
            vec![CRat::one(), CRat::one()],
            vec![CRat::one(), CRat::one()],
        ]);
        assert!(base_change(&f, &dual, &sing).is_err());
    }

    #[test]
    fn undeformed_strip_is_deformed_strip_of_t_inverse() {
        let f = rot2(3);
        let t_inv = f.deformation().t().inverse().unwrap();
        for k in 0..2 {
            let mut e = vec![CRat::zero(); 2];
            e[k] = CRat::one();
            let lhs = strip_first_undeformed(&f, &e).unwrap();
            let xi_tilde = t_inv.mul_vec(&e);
            let rhs = strip_first_deformed(&f, &xi_tilde).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn conjugate_routes_agree() {
        let f = rot2(5);
        let dual = DualSystem::build(&f, DualRoute::Recursive).unwrap();
        for i in 0..2 {
            let series = conjugate_series(&f, i).unwrap();
            let adjoint = conjugate_adjoint(&f, &dual, i).unwrap();
            assert_eq!(series, adjoint, "i = {i}");
            // only odd levels populated, level 0 empty
            for lvl in series.support() {
                assert!(lvl % 2 == 1);
            }
        }
    }

    #[test]
    fn pairing_identity_holds() {
        let f = rot2(4);
        let dual = DualSystem::build(&f, DualRoute::Recursive).unwrap();
        for i in 0..2 {
            let xi = conjugate_adjoint(&f, &dual, i).unwrap();
            for n in 0..=4usize {
                for iw in 0..f.level_dim(n) {
                    let w = f.word_at(n, iw);
                    let (lhs, rhs) = conjugate_pairing_check(&f, &xi, i, &w).unwrap();
                    assert_eq!(lhs, rhs, "i={i} w={w:?}");
                    if n % 2 == 0 && n > 0 {
                        assert!(lhs.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn free_case_conjugate_is_generator_vector() {
        // q = 0, T = I: only the m = 1 shell survives and ξ_i = e_i
        let d = Deformation::<CRat>::build(&rat(0, 1), &[Block::Fixed { dim: 2 }]).unwrap();
        let f = FockSpace::build(d, 3).unwrap();
        for i in 0..2 {
            let xi = conjugate_series(&f, i).unwrap();
            assert_eq!(xi, f.basis_vector(&[i]).unwrap());
        }
    }
}
