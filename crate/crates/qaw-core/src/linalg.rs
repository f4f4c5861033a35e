//! `f64`-only numerical linear algebra: Hermitian eigendecomposition,
//! complex Cholesky, and Hermitian matrix functions.
//!
//! The eigensolver runs cyclic Jacobi on the real symmetric embedding
//! `[[X, -Y], [Y, X]]` of `A = X + iY` and recovers a complex orthonormal
//! eigenbasis by Gram-Schmidt over the duplicated real eigenvectors. Sizes
//! here are tiny (modular data, level blocks), so clarity wins over speed.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::Matrix;
use crate::scalar::C64;
use crate::{Error, Result};

/// Cyclic Jacobi for a real symmetric matrix; returns (eigenvalues, columns).
fn jacobi_real(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let idx = |i: usize, j: usize| i * n + j;
    for _sweep in 0..60 {
        let mut off = 0.0;
        let mut fro = 0.0;
        for p in 0..n {
            for q in 0..n {
                let x = a[idx(p, q)] * a[idx(p, q)];
                fro += x;
                if q > p {
                    off += x;
                }
            }
        }
        if off <= 1e-30 * (fro + f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                if libm::fabs(apq) < 1e-300 {
                    continue;
                }
                let app = a[idx(p, p)];
                let aqq = a[idx(q, q)];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[idx(k, p)];
                    let vkq = v[idx(k, q)];
                    v[idx(k, p)] = c * vkp - s * vkq;
                    v[idx(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let evals = (0..n).map(|i| a[idx(i, i)]).collect();
    (evals, v)
}

/// Eigendecomposition of a Hermitian matrix: `A = U diag(w) U^H`,
/// eigenvalues ascending, `U` unitary (columns are eigenvectors).
pub fn eigh(a: &Matrix<C64>) -> Result<(Vec<f64>, Matrix<C64>)> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "eigh: square matrix required");
    // real embedding, 2n x 2n
    let m = 2 * n;
    let mut e = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = *a.get(i, j);
            e[i * m + j] = z.re;
            e[i * m + (n + j)] = -z.im;
            e[(n + i) * m + j] = z.im;
            e[(n + i) * m + (n + j)] = z.re;
        }
    }
    let (evals, vecs) = jacobi_real(e, m);
    // sort candidates by eigenvalue, then Gram-Schmidt over C to keep n
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
    let mut kept_vals: Vec<f64> = Vec::with_capacity(n);
    let mut kept_vecs: Vec<Vec<C64>> = Vec::with_capacity(n);
    for &k in &order {
        if kept_vecs.len() == n {
            break;
        }
        let mut z: Vec<C64> = (0..n)
            .map(|i| C64::new(vecs[i * m + k], vecs[(n + i) * m + k]))
            .collect();
        for u in &kept_vecs {
            let proj: C64 = u
                .iter()
                .zip(&z)
                .map(|(a, b)| a.conj() * b)
                .fold(C64::new(0.0, 0.0), |acc, x| acc + x);
            for (zi, ui) in z.iter_mut().zip(u) {
                *zi -= proj * ui;
            }
        }
        let norm = libm::sqrt(z.iter().map(|x| x.norm_sqr()).sum::<f64>());
        if norm > 1e-6 {
            for zi in z.iter_mut() {
                *zi /= norm;
            }
            kept_vals.push(evals[k]);
            kept_vecs.push(z);
        }
    }
    if kept_vecs.len() != n {
        return Err(Error::Singular(format!(
            "eigh: recovered {} of {} eigenvectors",
            kept_vecs.len(),
            n
        )));
    }
    let u = Matrix::from_fn(n, n, |i, j| kept_vecs[j][i]);
    Ok((kept_vals, u))
}

/// `f(A)` for Hermitian `A` via the spectral theorem.
pub fn herm_fn(a: &Matrix<C64>, f: impl Fn(f64) -> f64) -> Result<Matrix<C64>> {
    let (w, u) = eigh(a)?;
    let n = a.rows();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        d.set(i, i, C64::new(f(w[i]), 0.0));
    }
    Ok(u.matmul(&d).matmul(&u.dagger()))
}

/// Cholesky `A = L L^H` for Hermitian positive definite `A`.
/// Returns `None` when a pivot drops below `tol`.
pub fn cholesky(a: &Matrix<C64>, tol: f64) -> Option<Matrix<C64>> {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut l: Matrix<C64> = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j).re;
        for k in 0..j {
            d -= l.get(j, k).norm_sqr();
        }
        if d <= tol {
            return None;
        }
        let dj = libm::sqrt(d);
        l.set(j, j, C64::new(dj, 0.0));
        for i in j + 1..n {
            let mut s = *a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, s / dj);
        }
    }
    Some(l)
}

/// Solve `L L^H x = b` given the Cholesky factor.
pub fn chol_solve(l: &Matrix<C64>, b: &[C64]) -> Vec<C64> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let lik = *l.get(i, k);
            y[i] = y[i] - lik * y[k];
        }
        y[i] /= l.get(i, i);
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let lki = l.get(k, i).conj();
            y[i] = y[i] - lki * y[k];
        }
        y[i] /= l.get(i, i);
    }
    y
}

/// Smallest eigenvalue of a Hermitian positive definite matrix by inverse
/// power iteration on its Cholesky factor.
pub fn min_eig_pd(a: &Matrix<C64>, l: &Matrix<C64>, iters: usize) -> f64 {
    let n = a.rows();
    let mut rng = crate::rng::Lcg64::new(0x6d696e65);
    let mut v: Vec<C64> = (0..n).map(|_| C64::new(rng.next_f64() - 0.5, 0.0)).collect();
    let mut mu = 0.0;
    for _ in 0..iters {
        let w = chol_solve(l, &v);
        let norm = libm::sqrt(w.iter().map(|x| x.norm_sqr()).sum::<f64>());
        v = w.into_iter().map(|x| x / norm).collect();
        // Rayleigh quotient of A on v
        let av = a.mul_vec(&v);
        mu = v
            .iter()
            .zip(&av)
            .map(|(x, y)| (x.conj() * y).re)
            .sum::<f64>();
    }
    mu
}
