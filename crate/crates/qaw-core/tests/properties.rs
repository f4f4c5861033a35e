//! Property tests: randomized invariants on small instances, exact
//! arithmetic wherever the identity is truncation-exact.

use std::sync::OnceLock;

use proptest::prelude::*;

use qaw_core::classify::{classify_exact, describe};
use qaw_core::deformation::NumVal;
use qaw_core::dualvars::{dual_apply_partition, dual_apply_recursive};
use qaw_core::fock::{index_from_word, word_from_index, FockSpace, FockVector};
use qaw_core::partitions::{crossings_of_pairing, enumerate_dual_partitions, pair_partitions};
use qaw_core::wick::{moment, moment_pairings};
use qaw_core::{Block, CRat, Deformation, Rational, Scalar};

fn rat(p: i64, q: i64) -> NumVal {
    NumVal::Rational(Rational::new(p.into(), q.into()))
}

/// Shared reference space (d = 2, λ = 2, q = 1/2, N = 4) so proptest
/// cases don't rebuild Gram matrices.
fn space() -> &'static FockSpace<CRat> {
    static SPACE: OnceLock<FockSpace<CRat>> = OnceLock::new();
    SPACE.get_or_init(|| {
        let d =
            Deformation::build(&rat(1, 2), &[Block::Rotation { lambda: rat(2, 1), count: 1 }])
                .unwrap();
        FockSpace::build(d, 4).unwrap()
    })
}

fn rational_strategy() -> impl Strategy<Value = Rational> {
    (1i64..40, 1i64..40).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Word index encoding round-trips at every level.
    #[test]
    fn word_index_roundtrip(d in 1usize..5, n in 0usize..6, salt in any::<usize>()) {
        let total = d.pow(n as u32);
        let idx = salt % total;
        let word = word_from_index(d, n, idx);
        prop_assert_eq!(word.len(), n);
        prop_assert!(word.iter().all(|&l| l < d));
        prop_assert_eq!(index_from_word(d, &word), idx);
    }

    /// The q-inner product is conjugate symmetric and positive on the
    /// basis (exact arithmetic).
    #[test]
    fn q_inner_conjugate_symmetric(
        coords in proptest::collection::vec((-5i64..6, -5i64..6), 4),
        level in 1usize..5,
    ) {
        let f = space();
        let dim = f.level_dim(level);
        let mut x = f.zero_vector();
        let mut y = f.zero_vector();
        for (k, (a, b)) in coords.iter().enumerate() {
            x.set_coeff(level, (7 * k + 1) % dim, CRat::from_i64(*a));
            y.set_coeff(level, (3 * k + 2) % dim, CRat::from_i64(*b));
        }
        let xy = f.q_inner(&x, &y).unwrap();
        let yx = f.q_inner(&y, &x).unwrap();
        prop_assert_eq!(xy, yx.conj());
        let xx = f.q_inner(&x, &x).unwrap();
        prop_assert!(xx.im == Rational::from_integer(0.into()));
        prop_assert!(xx.re >= Rational::from_integer(0.into()));
    }

    /// Both moment routes agree on random words (exactness domain).
    #[test]
    fn moment_routes_agree(word in proptest::collection::vec(0usize..2, 1..5)) {
        let f = space();
        let m1 = moment(f, &word).unwrap();
        let m2 = moment_pairings(f, &word);
        prop_assert_eq!(m1, m2);
    }

    /// The two dual-variable routes agree on random words.
    #[test]
    fn dual_routes_agree(word in proptest::collection::vec(0usize..2, 1..5), i in 0usize..2) {
        let f = space();
        let a = dual_apply_recursive(f, i, &word).unwrap();
        let b = dual_apply_partition(f, i, &word).unwrap();
        prop_assert!(a.sub(&b).is_zero());
    }

    /// The classifier is invariant under permutation, inversion,
    /// duplication, and adjoining the trivial eigenvalue.
    #[test]
    fn classifier_symmetries(spectrum in proptest::collection::vec(rational_strategy(), 0..5)) {
        let base = classify_exact(&spectrum).unwrap();

        let mut reversed = spectrum.clone();
        reversed.reverse();
        prop_assert_eq!(&base, &classify_exact(&reversed).unwrap());

        let inverted: Vec<Rational> = spectrum.iter().map(|x| x.recip()).collect();
        prop_assert_eq!(&base, &classify_exact(&inverted).unwrap());

        let mut doubled = spectrum.clone();
        doubled.extend_from_slice(&spectrum);
        prop_assert_eq!(&base, &classify_exact(&doubled).unwrap());

        let mut with_one = spectrum.clone();
        with_one.push(Rational::from_integer(1.into()));
        prop_assert_eq!(&base, &classify_exact(&with_one).unwrap());

        // a III_λ description always shows a generator strictly inside (0, 1)
        let text = describe(&base);
        if text != "II_1" && text != "III_1" {
            prop_assert!(text.starts_with("III_"));
        }
    }

    /// Structural invariants of the dual-partition enumeration: the
    /// blocks tile {0, …, n}, point 0 is always paired, and the sign
    /// matches the parity of its partner.
    #[test]
    fn dual_partition_structure(n in 1usize..8) {
        for part in enumerate_dual_partitions(n) {
            let blocks = part.blocks();
            let mut seen = vec![false; n + 1];
            for b in &blocks {
                for &p in b {
                    prop_assert!(p <= n && !seen[p]);
                    seen[p] = true;
                }
            }
            prop_assert!(seen.iter().all(|&s| s));
            let zero_block = blocks.iter().find(|b| b.contains(&0)).unwrap();
            prop_assert_eq!(zero_block.len(), 2);
        }
    }

    /// Pairings of [1..2m]: count is (2m−1)!! and crossings stay within
    /// the maximal crossing number m(m−1)/2.
    #[test]
    fn pairing_census(m in 1usize..6) {
        let all = pair_partitions(2 * m);
        let double_factorial: usize = (1..=2 * m).step_by(2).product();
        prop_assert_eq!(all.len(), double_factorial);
        for pairing in &all {
            let c = crossings_of_pairing(pairing) as usize;
            prop_assert!(c <= m * (m - 1) / 2);
        }
    }
}

/// Vector arithmetic helpers honor the ring axioms spot-checked here.
#[test]
fn fock_vector_linearity() {
    let f = space();
    let e1 = f.basis_vector(&[0]).unwrap();
    let e2 = f.basis_vector(&[1]).unwrap();
    let s: FockVector<CRat> = e1.add(&e2).sub(&e2);
    assert!(s.sub(&e1).is_zero());
}
