//! Numerical modular data for the vacuum state: the conjugation candidate
//! `S (xΩ) = x*Ω` on monomial vectors, the positive operator `Δ = S*S`, the
//! involution `J = S Δ^{−1/2}`, the determined sign conventions, and the
//! eigenoperator / KMS scalar relations.
//!
//! Float only: the construction takes square roots of modular eigenvalues.
//! Antilinear maps are represented by their matrix against coordinate
//! conjugation: `S ξ = M_S · conj(ξ)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::fock::FockSpace;
use crate::linalg::herm_fn;
use crate::matrix::Matrix;
use crate::scalar::{C64, Scalar};
use crate::wick::{self, OperatorMatrix};
use crate::{Error, Result};

/// Modular data on the truncated space, with the measured sign conventions.
#[derive(Clone, Debug)]
pub struct ModularData {
    pub total_dim: usize,
    /// `S ξ = m_s · conj(ξ)`.
    pub m_s: Matrix<C64>,
    pub delta: Matrix<C64>,
    pub delta_inv: Matrix<C64>,
    /// `J ξ = j · conj(ξ)`.
    pub j: Matrix<C64>,
    /// Defect of the defining relation `S(xΩ) = x*Ω` over all monomials.
    pub s_residual: f64,
    /// `Δ` restricted to level 1 equals `A^sign_s`.
    pub sign_s: i32,
    /// Wick operators of the generator's eigenvectors, with eigenvalues.
    pub eigenops: Vec<(f64, Matrix<C64>)>,
    /// `Δ C_k Δ^{−1} = λ_k^{sign_s_prime} C_k`.
    pub sign_s_prime: i32,
    /// Worst eigenoperator relation residual at the determined sign.
    pub eig_residual: f64,
}

/// Residuals of the structural invariants.
#[derive(Clone, Debug)]
pub struct ModularInvariants {
    pub j_squared: f64,
    pub j_delta_j: f64,
    pub delta_vacuum: f64,
    /// `Δ` on level 2 against the tensor square of its level-1 block.
    pub tensor_level2: f64,
}

/// Coordinate offset of each level in the stacked (level-major) coordinates.
pub fn level_offsets(f: &FockSpace<C64>) -> Vec<usize> {
    let mut off = vec![0usize; f.truncation() + 2];
    for n in 0..=f.truncation() {
        off[n + 1] = off[n] + f.level_dim(n);
    }
    off
}

/// Block-diagonal Gram matrix of the whole truncated space.
pub fn full_gram(f: &FockSpace<C64>) -> Matrix<C64> {
    let off = level_offsets(f);
    let dim = *off.last().unwrap();
    let mut g = Matrix::zeros(dim, dim);
    for n in 0..=f.truncation() {
        let gn = f.gram(n);
        for i in 0..gn.rows() {
            for j in 0..gn.cols() {
                g.set(off[n] + i, off[n] + j, *gn.get(i, j));
            }
        }
    }
    g
}

/// Stack an operator's blocks into one matrix on the level-major coordinates.
pub fn op_to_full(f: &FockSpace<C64>, m: &OperatorMatrix<C64>) -> Matrix<C64> {
    let off = level_offsets(f);
    let dim = *off.last().unwrap();
    let mut out = Matrix::zeros(dim, dim);
    for a in 0..=f.truncation() {
        for b in 0..=f.truncation() {
            let Some(blk) = m.block(a, b) else { continue };
            for i in 0..blk.rows() {
                for j in 0..blk.cols() {
                    out.set(off[a] + i, off[b] + j, *blk.get(i, j));
                }
            }
        }
    }
    out
}

/// `A · L^{-H}` given lower-triangular `L`.
fn right_solve_lh(l: &Matrix<C64>, a: &Matrix<C64>) -> Result<Matrix<C64>> {
    // X L^H = A  <=>  conj(L) X^T = A^T
    Ok(l.conj().solve(&a.transpose())?.transpose())
}

/// `f(Δ)` for `Δ` self-adjoint and positive with respect to the q-inner
/// product `⟨ξ, η⟩ = ξ^H G η`, via the Cholesky change of coordinates
/// `G = L L^H`.
fn gram_herm_fn(
    l: &Matrix<C64>,
    delta: &Matrix<C64>,
    func: impl Fn(f64) -> f64,
) -> Result<Matrix<C64>> {
    let lh = l.dagger();
    let tilde = lh.matmul(&right_solve_lh(l, delta)?);
    let ft = herm_fn(&tilde, func)?;
    Ok(lh.solve(&ft)?.matmul(&lh))
}

/// Build the modular data. `N ≥ 2` required; errors if the monomial system
/// is rank-deficient or neither sign convention matches on level 1.
pub fn build_modular(f: &FockSpace<C64>) -> Result<ModularData> {
    if f.truncation() < 2 {
        return Err(Error::InvalidInput(format!(
            "modular data needs truncation >= 2, got {}",
            f.truncation()
        )));
    }
    let off = level_offsets(f);
    let dim = *off.last().unwrap();
    let d = f.dim();
    let gens: Vec<OperatorMatrix<C64>> =
        (0..d).map(|j| wick::generator(f, j)).collect::<Result<_>>()?;

    // monomial vectors x_w Ω with x_w = A_{w_1} ... A_{w_n}, columns in
    // level-major lexicographic order; reversing the word gives x_w*
    let monomial = |word: &[usize]| -> crate::fock::FockVector<C64> {
        let mut v = f.vacuum();
        for &j in word.iter().rev() {
            v = gens[j].apply(&v);
        }
        v
    };
    let mut m = Matrix::zeros(dim, dim);
    let mut m_rev = Matrix::zeros(dim, dim);
    let mut col = 0usize;
    for n in 0..=f.truncation() {
        for iw in 0..f.level_dim(n) {
            let w = f.word_at(n, iw);
            let rev: Vec<usize> = w.iter().rev().copied().collect();
            for (vec_, target) in [(monomial(&w), &mut m), (monomial(&rev), &mut m_rev)] {
                for lvl in 0..=f.truncation() {
                    for (r, c) in vec_.level(lvl).iter().enumerate() {
                        target.set(off[lvl] + r, col, *c);
                    }
                }
            }
            col += 1;
        }
    }

    // S(x Ω) = x* Ω: M_S conj(M) = M_rev
    let m_s = m
        .conj()
        .transpose()
        .solve(&m_rev.transpose())
        .map_err(|_| Error::Singular(format!("monomial system rank-deficient")))?
        .transpose();
    let s_residual = m_s.matmul(&m.conj()).sub(&m_rev).max_abs_approx();

    // Δ = S*S = G^{-1} M_S^T G^T conj(M_S)
    let g = full_gram(f);
    let delta = g.solve(&m_s.transpose().matmul(&g.transpose()).matmul(&m_s.conj()))?;
    let l = crate::linalg::cholesky(&g, 1e-13)
        .ok_or_else(|| Error::GramNotPositive(format!("full Gram matrix")))?;
    let delta_inv = gram_herm_fn(&l, &delta, |x| 1.0 / x)?;
    let inv_sqrt = gram_herm_fn(&l, &delta, |x| 1.0 / libm::sqrt(x))?;
    let j = m_s.matmul(&inv_sqrt.conj());

    // sign: Δ on level 1 is A or A^{-1}
    let lvl1 = Matrix::from_fn(d, d, |i, jx| *delta.get(off[1] + i, off[1] + jx));
    let a = crate::fock::approx_matrix(f.deformation().generator());
    let a_inv = a.inverse()?;
    let sign_s = if lvl1.sub(&a).max_abs_approx() < 1e-6 {
        1
    } else if lvl1.sub(&a_inv).max_abs_approx() < 1e-6 {
        -1
    } else {
        return Err(Error::ConventionFailure(format!(
            "level-1 Delta matches neither A nor A^-1 (defects {:.2e}, {:.2e})",
            lvl1.sub(&a).max_abs_approx(),
            lvl1.sub(&a_inv).max_abs_approx()
        )));
    };

    // eigenoperators C_k = W(f_k) and their modular scalar sign
    let mut eigenops = Vec::new();
    for pair in f.deformation().eigenpairs() {
        let c = wick::wick(f, &pair.vector)?;
        eigenops.push((pair.value.to_f64(), op_to_full(f, &c)));
    }
    let mut best: Option<(i32, f64)> = None;
    for sp in [1i32, -1] {
        let mut worst = 0.0f64;
        for (lam, c) in &eigenops {
            worst = worst.max(eigenop_defect(&delta, &delta_inv, *lam, sp, c, &off));
        }
        if best.is_none_or(|(_, r)| worst < r) {
            best = Some((sp, worst));
        }
    }
    let (sign_s_prime, eig_residual) = best.unwrap();
    if eig_residual > 1e-6 {
        return Err(Error::ConventionFailure(format!(
            "no consistent eigenoperator sign (best residual {eig_residual:.2e})"
        )));
    }

    Ok(ModularData {
        total_dim: dim,
        m_s,
        delta,
        delta_inv,
        j,
        s_residual,
        sign_s,
        eigenops,
        sign_s_prime,
        eig_residual,
    })
}

/// Residual of `Δ C Δ^{−1} − λ^{s'} C`, ignoring the blocks the truncation
/// cuts off (the top output level of the creation part has no counterpart
/// after conjugating by `Δ`).
fn eigenop_defect(
    delta: &Matrix<C64>,
    delta_inv: &Matrix<C64>,
    lam: f64,
    s_prime: i32,
    c: &Matrix<C64>,
    off: &[usize],
) -> f64 {
    let scale = libm::pow(lam, s_prime as f64);
    let r = delta
        .matmul(c)
        .matmul(delta_inv)
        .sub(&c.scale(&C64::new(scale, 0.0)));
    // compare only up to the last interior level boundary
    let cut = off[off.len() - 2];
    let mut worst = 0.0f64;
    for i in 0..cut {
        for jx in 0..cut {
            let z = r.get(i, jx);
            worst = worst.max(libm::hypot(z.re, z.im));
        }
    }
    worst
}

/// Per-eigenoperator residual at the determined sign.
pub fn eigenoperator_check(f: &FockSpace<C64>, md: &ModularData, k: usize) -> f64 {
    let off = level_offsets(f);
    let (lam, c) = &md.eigenops[k];
    eigenop_defect(&md.delta, &md.delta_inv, *lam, md.sign_s_prime, c, &off)
}

/// Residuals of the structural invariants.
pub fn modular_invariants(f: &FockSpace<C64>, md: &ModularData) -> ModularInvariants {
    let n = md.total_dim;
    let id = Matrix::identity(n);
    // J is antilinear: J^2 ξ = j conj(j) ξ
    let j_squared = md.j.matmul(&md.j.conj()).sub(&id).max_abs_approx();
    // J Δ J ξ = j conj(Δ) conj(j) ξ
    let j_delta_j = md
        .j
        .matmul(&md.delta.conj())
        .matmul(&md.j.conj())
        .sub(&md.delta_inv)
        .max_abs_approx();
    let mut vac = vec![C64::zero(); n];
    vac[0] = C64::one();
    let dv = md.delta.mul_vec(&vac);
    let mut delta_vacuum = 0.0f64;
    for (i, z) in dv.iter().enumerate() {
        let want = if i == 0 { C64::one() } else { C64::zero() };
        delta_vacuum = delta_vacuum.max((z - want).norm());
    }
    let off = level_offsets(f);
    let d = f.dim();
    let lvl1 = Matrix::from_fn(d, d, |i, jx| *md.delta.get(off[1] + i, off[1] + jx));
    let lvl2 = Matrix::from_fn(d * d, d * d, |i, jx| *md.delta.get(off[2] + i, off[2] + jx));
    let tensor_level2 = lvl2.sub(&lvl1.kron(&lvl1)).max_abs_approx();
    ModularInvariants { j_squared, j_delta_j, delta_vacuum, tensor_level2 }
}

/// KMS scalar check: `x` is a product of eigenoperators (indices into
/// `md.eigenops`, leftmost factor first) with modular scalar
/// `μ_x = Π λ_k^{s'}`; `y` is a word in the generators. Returns
/// `(φ(xy), μ_x · φ(yx))`; combined lengths must not exceed the truncation.
pub fn kms_check(
    f: &FockSpace<C64>,
    md: &ModularData,
    x: &[usize],
    y: &[usize],
) -> Result<(C64, C64)> {
    if x.len() + y.len() > f.truncation() {
        return Err(Error::InvalidInput(format!(
            "monomial lengths {} + {} exceed truncation {}",
            x.len(),
            y.len(),
            f.truncation()
        )));
    }
    let id = Matrix::identity(md.total_dim);
    let mut xm = id.clone();
    let mut mu = 1.0f64;
    for &k in x {
        let (lam, c) = &md.eigenops[k];
        xm = xm.matmul(c);
        mu *= libm::pow(*lam, md.sign_s_prime as f64);
    }
    let mut ym = id;
    for &jx in y {
        ym = ym.matmul(&op_to_full(f, &wick::generator(f, jx)?));
    }
    let lhs = *xm.matmul(&ym).get(0, 0);
    let rhs = *ym.matmul(&xm).get(0, 0) * C64::new(mu, 0.0);
    Ok((lhs, rhs))
}
