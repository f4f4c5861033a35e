//! Acceptance gate: every end-to-end criterion, one test each, at its
//! stated tolerance. The harness prints one pass/fail line per criterion.

use std::time::Instant;

use qaw_cli::config::{Arithmetic, RunConfig, Suite};
use qaw_cli::suites::run_verify;
use qaw_core::classify::{classify_exact, describe, ClassifyOptions, FactorType, classify_spectrum};
use qaw_core::deformation::NumVal;
use qaw_core::dualvars::{
    base_change, commutator_residual, conjugate_adjoint, conjugate_pairing_check,
    conjugate_series, dual_apply_partition, dual_apply_recursive, seeded_matrix, DualRoute,
    DualSystem,
};
use qaw_core::fock::word_from_index;
use qaw_core::rng::Lcg64;
use qaw_core::wick::{annihilation, creation, generator, gram_adjoint, moment, moment_pairings};
use qaw_core::{Block, C64, CRat, Deformation, FockSpace, Matrix, Rational, Scalar};

fn rat(p: i64, q: i64) -> NumVal {
    NumVal::Rational(Rational::new(p.into(), q.into()))
}

/// The reference exact configuration: d = 2, one rotation block with
/// λ = 2, q = 1/2.
fn reference_space<S: Scalar>(n: usize) -> FockSpace<S> {
    let d = Deformation::build(&rat(1, 2), &[Block::Rotation { lambda: rat(2, 1), count: 1 }])
        .unwrap();
    FockSpace::build(d, n).unwrap()
}

fn words_up_to(d: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for idx in 0..d.pow(len as u32) {
            out.push(word_from_index(d, len, idx));
        }
    }
    out
}

/// 1. The combinatorial and the recursive dual variables agree exactly on
///    all 126 basis words at N = 6, within the time budget.
#[test]
fn acceptance_01_dual_variable_equivalence() {
    let t0 = Instant::now();
    let f: FockSpace<CRat> = reference_space(6);
    let words = words_up_to(2, 6);
    assert_eq!(words.len(), 126);
    for word in &words {
        for i in 0..2 {
            let a = dual_apply_recursive(&f, i, word).unwrap();
            let b = dual_apply_partition(&f, i, word).unwrap();
            assert!(a.sub(&b).is_zero(), "word {word:?}, i = {i}");
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}, budget 60 s");
}

/// 2. Commutation relation `[D_i, A_j] = B_{ji} P_Ω`: exact zero on the
///    reference config, ≤ 1e−9 on a mixed-block float config.
#[test]
fn acceptance_02_commutation_relation() {
    let f: FockSpace<CRat> = reference_space(6);
    let dual = DualSystem::build(&f, DualRoute::Recursive).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let r = commutator_residual(&f, &dual, i, j).unwrap();
            assert_eq!(r, 0.0, "exact residual ({i},{j})");
        }
    }

    let defo = Deformation::<C64>::build(
        &NumVal::Real(-0.7),
        &[Block::Fixed { dim: 1 }, Block::Rotation { lambda: rat(3, 2), count: 1 }],
    )
    .unwrap();
    let ff = FockSpace::build(defo, 5).unwrap();
    let dualf = DualSystem::build(&ff, DualRoute::Recursive).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let r = commutator_residual(&ff, &dualf, i, j).unwrap();
            assert!(r <= 1e-9, "float residual ({i},{j}) = {r:e}");
        }
    }
}

/// 3. Conjugate-variable identity: pairing check exact on all words of
///    length ≤ 6, and the series route equals the adjoint route exactly.
#[test]
fn acceptance_03_conjugate_identity() {
    let f: FockSpace<CRat> = reference_space(6);
    let dual = DualSystem::build(&f, DualRoute::Recursive).unwrap();
    for i in 0..2 {
        let xi = conjugate_series(&f, i).unwrap();
        let adj = conjugate_adjoint(&f, &dual, i).unwrap();
        assert!(xi.sub(&adj).is_zero(), "series vs adjoint, i = {i}");
        for word in words_up_to(2, 6) {
            let (lhs, rhs) = conjugate_pairing_check(&f, &xi, i, &word).unwrap();
            assert_eq!(lhs, rhs, "pairing identity, i = {i}, word {word:?}");
        }
    }
}

/// 4. Adjoint/Wick consistency and Gram positive-definiteness
///    certification across dimensions up to 3, truncations up to 6.
#[test]
fn acceptance_04_adjoint_and_gram_certification() {
    let f: FockSpace<CRat> = reference_space(6);
    for i in 0..2 {
        let mut e = vec![CRat::zero(); 2];
        e[i] = CRat::one();
        let ann = annihilation(&f, &e).unwrap();
        let adj = gram_adjoint(&f, &creation(&f, &e).unwrap()).unwrap();
        assert!(ann.sub(&adj).is_zero(), "annihilation vs adjoint, i = {i}");
        let a = generator(&f, i).unwrap();
        let sa = gram_adjoint(&f, &a).unwrap().sub(&a).restrict_input_levels(5);
        assert!(sa.is_zero(), "self-adjointness, i = {i}");
    }
    // PD certification for d = 1, 2, 3 at N = 6 (builders certify)
    let configs: Vec<Vec<Block>> = vec![
        vec![Block::Fixed { dim: 1 }],
        vec![Block::Rotation { lambda: rat(2, 1), count: 1 }],
        vec![Block::Fixed { dim: 1 }, Block::Rotation { lambda: rat(3, 2), count: 1 }],
    ];
    for blocks in &configs {
        let d = Deformation::<CRat>::build(&rat(1, 2), blocks).unwrap();
        let space = FockSpace::build(d, 6).unwrap();
        space.certify_positive().unwrap();
    }
}

/// 5. The two moment routes agree exactly up to length 6, and the free
///    one-dimensional moments are the Catalan numbers.
#[test]
fn acceptance_05_moment_oracles() {
    let f: FockSpace<CRat> = reference_space(6);
    for word in words_up_to(2, 6) {
        let m1 = moment(&f, &word).unwrap();
        let m2 = moment_pairings(&f, &word);
        assert_eq!(m1, m2, "moment routes, word {word:?}");
    }

    let free =
        Deformation::<CRat>::build(&rat(0, 1), &[Block::Fixed { dim: 1 }]).unwrap();
    let ff = FockSpace::build(free, 10).unwrap();
    let catalan = [1i64, 2, 5, 14, 42];
    for (k, &c) in catalan.iter().enumerate() {
        let word = vec![0usize; 2 * (k + 1)];
        let m = moment(&ff, &word).unwrap();
        assert_eq!(m, CRat::from_i64(c), "Catalan number for length {}", 2 * (k + 1));
    }
}

/// 6. Base change: identity, eigenvector matrix, and five seeded random
///    Gaussian-rational matrices all leave the relation residual at zero.
#[test]
fn acceptance_06_base_change() {
    let f: FockSpace<CRat> = reference_space(5);
    let dual = DualSystem::build(&f, DualRoute::Recursive).unwrap();
    assert_eq!(base_change(&f, &dual, &Matrix::identity(2)).unwrap(), 0.0);
    let pairs = f.deformation().eigenpairs();
    let eig = Matrix::from_fn(2, 2, |i, j| pairs[i].vector[j].clone());
    assert_eq!(base_change(&f, &dual, &eig).unwrap(), 0.0, "eigenvector matrix");
    for seed in 1..=5u64 {
        let x: Matrix<CRat> = seeded_matrix(2, seed);
        assert_eq!(base_change(&f, &dual, &x).unwrap(), 0.0, "seed {seed}");
    }
}

/// 7. Norm-estimate suite: nonnegative slack on every check for
///    q ∈ {0, ±1/2, 9/10} × λ ∈ {1, 2}, with the majorant ratio test
///    certifying eventual decrease even at |q| = 9/10.
#[test]
fn acceptance_07_bounds() {
    for (qn, qd) in [(0i64, 1i64), (1, 2), (-1, 2), (9, 10)] {
        for lam in [1i64, 2] {
            let blocks = if lam == 1 {
                vec![Block::Fixed { dim: 2 }]
            } else {
                vec![Block::Rotation { lambda: rat(lam, 1), count: 1 }]
            };
            let d = Deformation::<C64>::build(&rat(qn, qd), &blocks).unwrap();
            let f = FockSpace::build(d, 6).unwrap();
            let r = qaw_core::bounds::check_bounds(&f, 3).unwrap();
            for c in &r.checks {
                assert!(
                    c.passed(),
                    "q = {qn}/{qd}, λ = {lam}: {} slack {:e}",
                    c.name,
                    c.slack()
                );
            }
            assert!(r.majorant_tail_bound.is_finite() && r.majorant_tail_bound >= 0.0);
            if (qn, qd) == (9, 10) {
                assert!(r.majorant_m0 > 3, "certification must extend past m_max");
            }
        }
    }
}

/// 8. Modular suite at d = 2, λ = 2, q = 3/10, N = 4: every residual of
///    the Tomita-Takesaki identities stays below 1e−8.
#[test]
fn acceptance_08_modular() {
    let d = Deformation::<C64>::build(&rat(3, 10), &[Block::Rotation {
        lambda: rat(2, 1),
        count: 1,
    }])
    .unwrap();
    let f = FockSpace::build(d, 4).unwrap();
    let md = qaw_core::modular::build_modular(&f).unwrap();
    assert!(md.s_residual < 1e-8, "S residual {:e}", md.s_residual);
    let inv = qaw_core::modular::modular_invariants(&f, &md);
    assert!(inv.j_squared < 1e-8, "J^2 {:e}", inv.j_squared);
    assert!(inv.j_delta_j < 1e-8, "JΔJ vs Δ^-1 {:e}", inv.j_delta_j);
    assert!(inv.delta_vacuum < 1e-8, "ΔΩ {:e}", inv.delta_vacuum);
    assert!(inv.tensor_level2 < 1e-8, "tensor square {:e}", inv.tensor_level2);
    for k in 0..md.eigenops.len() {
        let r = qaw_core::modular::eigenoperator_check(&f, &md, k);
        assert!(r < 1e-8, "eigenoperator {k} residual {r:e}");
    }
    // KMS scalar identity on eigen-monomials
    for x in [vec![0usize], vec![1], vec![0, 1]] {
        for y in [vec![0usize], vec![0, 1]] {
            if x.len() + y.len() > 4 {
                continue;
            }
            let (lhs, rhs) = qaw_core::modular::kms_check(&f, &md, &x, &y).unwrap();
            assert!((lhs - rhs).norm() < 1e-8, "KMS x={x:?} y={y:?}");
        }
    }
    // φ vanishes on eigen-monomials of non-unit modular weight
    let n = md.total_dim;
    for (k, l) in [(0usize, 0usize), (1, 1)] {
        let (lk, ck) = &md.eigenops[k];
        let (ll, cl) = &md.eigenops[l];
        if (lk * ll - 1.0).abs() < 1e-9 {
            continue;
        }
        let prod = ck.matmul(cl);
        let phi = prod.get(0, 0).norm();
        assert!(phi < 1e-8, "φ on weight {} monomial = {phi:e} (dim {n})", lk * ll);
    }
}

/// 9. Classifier: the worked examples exactly, plus symmetry invariants
///    on 100 seeded random rational spectra.
#[test]
fn acceptance_09_classifier() {
    let r = |p: i64, q: i64| Rational::new(p.into(), q.into());
    let label = classify_exact(&[]).unwrap();
    assert_eq!(describe(&label), "II_1");
    let label = classify_exact(&[r(2, 1), r(4, 1)]).unwrap();
    assert_eq!(describe(&label), "III_1/2");
    let label = classify_exact(&[r(2, 1), r(3, 1)]).unwrap();
    assert_eq!(describe(&label), "III_1");
    let label = classify_exact(&[r(9, 4), r(3, 2)]).unwrap();
    assert_eq!(describe(&label), "III_2/3");

    let mut rng = Lcg64::new(0xacce57);
    for trial in 0..100 {
        let len = 1 + (rng.next_below(4) as usize);
        let spectrum: Vec<Rational> = (0..len)
            .map(|_| r(rng.next_i64_in(1, 9), rng.next_i64_in(1, 9)))
            .collect();
        let base = classify_exact(&spectrum).unwrap();
        // invariant under inversion of every value
        let inverted: Vec<Rational> = spectrum.iter().map(|x| x.recip()).collect();
        assert_eq!(base, classify_exact(&inverted).unwrap(), "trial {trial}: inversion");
        // invariant under adjoining the trivial eigenvalue
        let mut with_one = spectrum.clone();
        with_one.push(r(1, 1));
        assert_eq!(base, classify_exact(&with_one).unwrap(), "trial {trial}: adjoin 1");
        // invariant under duplication
        let mut doubled = spectrum.clone();
        doubled.extend_from_slice(&spectrum);
        assert_eq!(base, classify_exact(&doubled).unwrap(), "trial {trial}: duplication");
        // a III_λ generator always lies in (0, 1)
        if let FactorType::IIILambda(v) = &base.factor {
            let x = v.to_f64();
            assert!(x > 0.0 && x < 1.0, "trial {trial}: generator {x}");
        }
        // float path agrees on these well-separated rational spectra
        let floats: Vec<NumVal> =
            spectrum.iter().map(|x| NumVal::Rational(x.clone())).collect();
        let again = classify_spectrum(&floats, ClassifyOptions::default()).unwrap();
        assert_eq!(base, again, "trial {trial}: spectrum route");
    }
}

/// 10. Determinism: the full exact suite renders byte-identical reports
///     across runs.
#[test]
fn acceptance_10_determinism() {
    let mut cfg = RunConfig::default();
    cfg.suites = Suite::ALL.to_vec();
    assert_eq!(cfg.arithmetic, Arithmetic::Exact);
    let a = run_verify(&cfg).unwrap().render_json();
    let b = run_verify(&cfg).unwrap().render_json();
    assert!(a == b, "reports differ between runs");
    assert!(a.contains("\"passed\": true"));
}
