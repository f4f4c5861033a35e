//! Numerical certification of the norm estimates controlling the
//! conjugate-variable series: annihilation bounds, word-norm bounds,
//! `T_{i,v}` bounds, and convergence of the majorant series.
//!
//! Everything here needs square roots and operator norms, so the checks run
//! on a float space; exact-mode callers convert first (or record the suite
//! as skipped).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dualvars::{strip_first_deformed, strip_first_undeformed};
use crate::fock::{FockSpace, approx_matrix};
use crate::linalg::eigh;
use crate::scalar::{C64, Scalar};
use crate::wick::{OperatorMatrix, op_norm_q};
use crate::{Error, Result};

/// Slack below which a check counts as failed (float noise allowance).
pub const SLACK_TOLERANCE: f64 = -1e-12;

/// One certified inequality: passes when `lhs ≤ rhs` up to float noise.
#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl BoundCheck {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn passed(&self) -> bool {
        self.slack() >= SLACK_TOLERANCE
    }
}

/// The constants of the estimate and the outcome of every check.
#[derive(Clone, Debug)]
pub struct BoundReport {
    /// `Π_{k≥1} (1 − |q|^k)^{−1/2}`, the uniform bound on the norm of a
    /// strip (free annihilation) operator acting on the q-inner-product
    /// space, per unit vector.  (`= 1` at `q = 0`.)
    pub c: f64,
    /// `‖T^{−1}‖^{1/2}` (spectral norm).
    pub d_const: f64,
    /// `max |⟨ē_i, ē_j⟩_U|`.
    pub e: f64,
    /// `max |B_ij|`.
    pub b: f64,
    pub checks: Vec<BoundCheck>,
    /// First shell index from which the majorant ratio stays below 1.
    pub majorant_m0: usize,
    /// `Σ_{m ≤ m0} t_m`.
    pub majorant_partial_sum: f64,
    /// Geometric bound on the tail past `m0`.
    pub majorant_tail_bound: f64,
    pub passed: bool,
}

/// `[k]_{|q|}!` in `f64`.
fn q_factorial_f64(k: usize, qa: f64) -> f64 {
    let mut acc = 1.0;
    let mut bracket = 0.0;
    let mut qp = 1.0;
    for _ in 1..=k {
        bracket += qp;
        qp *= qa;
        acc *= bracket;
    }
    acc
}

/// `[m]_{|q|}` in `f64`.
fn q_bracket_f64(m: usize, qa: f64) -> f64 {
    (0..m).map(|j| libm::pow(qa, j as f64)).sum()
}

/// Runs all four check families on the truncated space.
///
/// `m_max` caps the shells whose `T_{i,v}` norms are measured; the majorant
/// ratio test continues analytically past `m_max` (the terms are closed-form
/// in the constants), since for `|q|` close to 1 the first decreasing shell
/// can lie far beyond any measurable truncation.
pub fn check_bounds(f: &FockSpace<C64>, m_max: usize) -> Result<BoundReport> {
    if m_max < 1 || 2 * m_max - 1 > f.truncation() {
        return Err(Error::InvalidInput(format!(
            "m_max = {m_max} needs truncation at least {}",
            2 * m_max.max(1) - 1
        )));
    }
    let d = f.dim();
    let qa = libm::fabs(f.deformation().q_f64());
    let t = approx_matrix(f.deformation().t());
    let t_inv = t.inverse()?;

    // C = Π_{k≥1} (1 − |q|^k)^{−1/2}: the q-norm on level n and the plain
    // tensor norm differ by at most ‖R_n^{-1}‖ ≤ Π_k (1 − |q|^k)^{-1}
    // uniformly in n, which bounds the strip operator norm by C per unit
    // vector.  (1 − |q|)^{−1/2} alone is NOT valid for the strip: its
    // restriction to level n grows past that for |q| near 1.
    let c = {
        let mut prod = 1.0;
        let mut qp = qa;
        while qp > 1e-18 {
            prod *= 1.0 - qp;
            qp *= qa;
        }
        1.0 / libm::sqrt(prod)
    };
    let (t_eigs, _) = eigh(&t)?;
    let d_const = libm::sqrt(1.0 / t_eigs[0]);
    let e = t.max_abs_approx();
    let b = f.deformation().covariance().max_abs_approx();

    let mut checks = Vec::new();

    // (a) ‖L_{ξ̃}‖ ≤ C ‖ξ̃‖_U for each standard basis vector ξ, ξ̃ = T^{-1}ξ
    for k in 0..d {
        let mut xi = vec![C64::zero(); d];
        xi[k] = C64::one();
        let xi_tilde = t_inv.mul_vec(&xi);
        let op = strip_first_deformed(f, &xi_tilde)?;
        let lhs = op_norm_q(f, &op, 150)?;
        let norm_u = libm::sqrt(f.deformation().deformed_inner(&xi_tilde, &xi_tilde)?.re);
        checks.push(BoundCheck {
            name: format!("annihilation_norm/xi=e{}", k + 1),
            lhs,
            rhs: c * norm_u,
        });
    }

    // (b) ‖ē_v‖² ≤ E^{|v|} [|v|]_{|q|}! for every word
    for n in 1..=f.truncation() {
        let mut worst = BoundCheck {
            name: format!("word_norm/level={n}"),
            lhs: 0.0,
            rhs: libm::pow(e, n as f64) * q_factorial_f64(n, qa),
        };
        for iv in 0..f.level_dim(n) {
            let nn = f.gram(n).get(iv, iv).re;
            if nn > worst.lhs {
                worst.lhs = nn;
            }
        }
        checks.push(worst);
    }

    // (c) ‖T_{i,v}‖ ≤ d·B·(C·D)^m, both covariance orderings
    let strips: Vec<OperatorMatrix<C64>> = (0..d)
        .map(|k| {
            let mut ek = vec![C64::zero(); d];
            ek[k] = C64::one();
            strip_first_undeformed(f, &ek)
        })
        .collect::<Result<_>>()?;
    let cov = f.deformation().covariance();
    for m in 1..=m_max {
        for i in 0..d {
            let mut worst = BoundCheck {
                name: format!("t_iv_norm/m={m}/i={}", i + 1),
                lhs: 0.0,
                rhs: d as f64 * b * libm::pow(c * d_const, m as f64),
            };
            for iv in 0..f.level_dim(m - 1) {
                let v = f.word_at(m - 1, iv);
                for ordering in 0..2 {
                    let mut op = OperatorMatrix::zero(f);
                    for j in 0..d {
                        let coeff =
                            if ordering == 0 { cov.get(i, j) } else { cov.get(j, i) };
                        if coeff.is_zero() {
                            continue;
                        }
                        // L̃_{v·j}: strip v_1 first, then the rest, then j
                        let mut ltilde = if v.is_empty() {
                            strips[j].clone()
                        } else {
                            let mut acc = strips[v[0]].clone();
                            for &ul in &v[1..] {
                                acc = strips[ul].compose(&acc);
                            }
                            strips[j].compose(&acc)
                        };
                        ltilde = ltilde.scale(coeff);
                        op = op.add(&ltilde);
                    }
                    let nrm = op_norm_q(f, &op, 150)?;
                    if nrm > worst.lhs {
                        worst.lhs = nrm;
                    }
                }
            }
            checks.push(worst);
        }
    }

    // (d) majorant series t_m = |q|^{m(m-1)/2} d^{m-1} E^{(m-1)/2}
    //     sqrt([m-1]_{|q|}!) · d·B·(CD)^m; ratio
    //     t_{m+1}/t_m = |q|^m · d · sqrt(E·[m]_{|q|}) · C·D
    let term = |m: usize| -> f64 {
        libm::pow(qa, (m * (m - 1) / 2) as f64)
            * libm::pow(d as f64, (m - 1) as f64)
            * libm::pow(e, (m - 1) as f64 / 2.0)
            * libm::sqrt(q_factorial_f64(m - 1, qa))
            * d as f64
            * b
            * libm::pow(c * d_const, m as f64)
    };
    let ratio = |m: usize| -> f64 {
        libm::pow(qa, m as f64) * d as f64 * libm::sqrt(e * q_bracket_f64(m, qa)) * c * d_const
    };
    // once ratio(m) < 1 AND the step factor |q|·sqrt([m+1]/[m]) < 1, the
    // ratios only shrink, so every later shell keeps decreasing
    let mut m0 = None;
    for m in 1..100_000usize {
        let r = ratio(m);
        let step = if qa == 0.0 {
            0.0
        } else {
            qa * libm::sqrt(q_bracket_f64(m + 1, qa) / q_bracket_f64(m, qa))
        };
        if r < 1.0 && step < 1.0 {
            m0 = Some(m);
            break;
        }
    }
    let m0 = m0.ok_or_else(|| {
        Error::InvalidInput(String::from("majorant ratio never certified below 1"))
    })?;
    let mut partial = 0.0;
    for m in 1..=m0 {
        partial += term(m);
    }
    let r0 = ratio(m0);
    let tail = term(m0) * r0 / (1.0 - r0);
    checks.push(BoundCheck {
        name: format!("majorant_ratio/m0={m0}"),
        lhs: r0,
        rhs: 1.0,
    });

    let passed = checks.iter().all(BoundCheck::passed);
    Ok(BoundReport {
        c,
        d_const,
        e,
        b,
        checks,
        majorant_m0: m0,
        majorant_partial_sum: partial,
        majorant_tail_bound: tail,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::{Block, Deformation, NumVal};
    use crate::scalar::Rational;

    fn rat(p: i64, q: i64) -> NumVal {
        NumVal::Rational(Rational::new(p.into(), q.into()))
    }

    fn space(q: (i64, i64), blocks: &[Block]) -> FockSpace<C64> {
        let d = Deformation::build(&rat(q.0, q.1), blocks).unwrap();
        FockSpace::build(d, 5).unwrap()
    }

    #[test]
    fn free_case_constants_and_pass() {
        let f = space((0, 1), &[Block::Fixed { dim: 2 }]);
        let r = check_bounds(&f, 2).unwrap();
        assert_eq!(r.c, 1.0);
        assert_eq!(r.d_const, 1.0);
        assert_eq!(r.e, 1.0);
        assert!(r.passed, "checks: {:?}", r.checks);
        // Cuntz case: annihilation norm is exactly 1, slack 0
        let a = r.checks.iter().find(|c| c.name.starts_with("annihilation_norm")).unwrap();
        assert!((a.lhs - 1.0).abs() < 1e-6 && (a.rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_block_d_constant() {
        let f = space((1, 2), &[Block::Rotation { lambda: rat(2, 1), count: 1 }]);
        let r = check_bounds(&f, 3).unwrap();
        // eigenvalues of T are 4/3 and 2/3, so D = sqrt(3/2)
        assert!((r.d_const - libm::sqrt(1.5)).abs() < 1e-10);
        assert!(r.passed, "failed: {:?}", r.checks.iter().filter(|c| !c.passed()).collect::<Vec<_>>());
    }

    #[test]
    fn high_q_ratio_certified_late() {
        let f = {
            let d = Deformation::build(&rat(9, 10), &[Block::Rotation {
                lambda: rat(2, 1),
                count: 1,
            }])
            .unwrap();
            FockSpace::build(d, 5).unwrap()
        };
        let r = check_bounds(&f, 2).unwrap();
        // |q| = 9/10 pushes the first decreasing shell far out
        assert!(r.majorant_m0 > 5, "m0 = {}", r.majorant_m0);
        assert!(r.majorant_tail_bound.is_finite() && r.majorant_tail_bound > 0.0);
        assert!(r.passed, "failed: {:?}", r.checks.iter().filter(|c| !c.passed()).collect::<Vec<_>>());
    }

    #[test]
    fn m_max_validation() {
        let f = space((1, 2), &[Block::Fixed { dim: 1 }]);
        assert!(check_bounds(&f, 4).is_err());
    }
}
