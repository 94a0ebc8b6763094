//! Property suites across the kernel and the data layer.

use chardata::gen::{random_relabel, random_unimodular, random_valid_chardata};
use chardata::lattice::{
    canonicalize, smith_invariants, GeneratorSet, Int, IntVec, SaturatedLattice,
};
use chardata::{decide, fingerprint, verify_witness, DecideOptions, Mode, Verdict};
use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gens_strategy() -> impl Strategy<Value = GeneratorSet> {
    (1usize..=4).prop_flat_map(|m| {
        proptest::collection::vec(proptest::collection::vec(-5i64..=5, m), 0..=4).prop_map(
            move |rows| {
                GeneratorSet::new(m, rows.iter().map(|r| IntVec::from_i64(r)).collect()).unwrap()
            },
        )
    })
}

/// Row operations preserving the row span over the integers.
#[derive(Clone, Debug)]
enum RowOp {
    Swap(usize, usize),
    Negate(usize),
    Add(usize, usize, i64),
}

fn rowops_strategy() -> impl Strategy<Value = Vec<RowOp>> {
    proptest::collection::vec(
        prop_oneof![
            (0usize..4, 0usize..4).prop_map(|(i, j)| RowOp::Swap(i, j)),
            (0usize..4).prop_map(RowOp::Negate),
            (0usize..4, 0usize..4, -3i64..=3).prop_map(|(i, j, c)| RowOp::Add(i, j, c)),
        ],
        0..=8,
    )
}

fn recombine(g: &GeneratorSet, ops: &[RowOp]) -> GeneratorSet {
    let mut rows: Vec<Vec<Int>> = g.rows().iter().map(|r| r.entries().to_vec()).collect();
    let k = rows.len();
    if k == 0 {
        return g.clone();
    }
    for op in ops {
        match op {
            RowOp::Swap(i, j) => rows.swap(i % k, j % k),
            RowOp::Negate(i) => {
                for x in rows[i % k].iter_mut() {
                    let v = -&*x;
                    *x = v;
                }
            }
            RowOp::Add(i, j, c) => {
                let (i, j) = (i % k, j % k);
                if i != j {
                    let src = rows[i].clone();
                    for (x, y) in rows[j % k].iter_mut().zip(src) {
                        *x += Int::from(*c) * y;
                    }
                }
            }
        }
    }
    GeneratorSet::new(
        g.ambient_rank(),
        rows.into_iter().map(IntVec::new).collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonicalize_is_idempotent_and_basis_independent(
        g in gens_strategy(),
        ops in rowops_strategy(),
    ) {
        let (basis, rank) = canonicalize(&g);
        prop_assert_eq!(basis.len(), rank);
        let again = GeneratorSet::new(g.ambient_rank(), basis.clone()).unwrap();
        prop_assert_eq!(canonicalize(&again).0, basis.clone());
        let mixed = recombine(&g, &ops);
        prop_assert_eq!(canonicalize(&mixed).0, basis);
    }

    #[test]
    fn saturation_contains_span_and_is_idempotent(g in gens_strategy()) {
        let (lat, index) = SaturatedLattice::saturation(&g);
        let mut coord_rows = Vec::new();
        for row in g.rows() {
            let coords = lat.coordinates_of(row);
            prop_assert!(coords.is_some(), "saturation must contain the span");
            coord_rows.push(coords.unwrap());
        }
        // the index is the product of the invariant factors of the span
        // expressed in the saturation's basis
        let coords = GeneratorSet::new(lat.rank(), coord_rows).unwrap();
        let mut product = BigUint::one();
        for d in smith_invariants(&coords) {
            product *= d;
        }
        prop_assert_eq!(product, index.clone());
        // idempotence
        let basis = GeneratorSet::new(lat.ambient_rank(), lat.basis().to_vec()).unwrap();
        let (again, index2) = SaturatedLattice::saturation(&basis);
        prop_assert_eq!(again, lat);
        prop_assert!(index2.is_one());
    }

    #[test]
    fn mutual_containment_is_equality(a in gens_strategy(), b in gens_strategy()) {
        prop_assume!(a.ambient_rank() == b.ambient_rank());
        let (la, _) = SaturatedLattice::saturation(&a);
        let (lb, _) = SaturatedLattice::saturation(&b);
        let fwd = la.contains(&lb).unwrap();
        let bwd = lb.contains(&la).unwrap();
        prop_assert_eq!(fwd && bwd, la == lb);
    }

    #[test]
    fn equal_rank_containment_is_equality(g in gens_strategy(), ops in rowops_strategy()) {
        // a saturated lattice of rank r inside another of the same rank
        // equals it; recombinations provide the contained copy
        let (lat, _) = SaturatedLattice::saturation(&g);
        let basis = GeneratorSet::new(lat.ambient_rank(), lat.basis().to_vec()).unwrap();
        let (lat2, _) = SaturatedLattice::saturation(&recombine(&basis, &ops));
        prop_assert_eq!(lat2.rank(), lat.rank());
        prop_assert!(lat.contains(&lat2).unwrap());
        prop_assert_eq!(lat2, lat);
    }

    #[test]
    fn unimodular_roundtrip_fixes_lattices(
        g in gens_strategy(),
        seed in proptest::num::u64::ANY,
    ) {
        let (lat, _) = SaturatedLattice::saturation(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_unimodular(&mut rng, lat.ambient_rank(), 10);
        let there = psi.apply_lattice(&lat).unwrap();
        prop_assert_eq!(there.rank(), lat.rank());
        let back = psi.inverse().apply_lattice(&there).unwrap();
        prop_assert_eq!(back, lat);
    }
}

#[test]
fn transformed_data_stays_valid_and_fingerprint_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for round in 0..30 {
        let m = 2 + round % 3;
        let d = random_valid_chardata(&mut rng, m);
        let psi = random_unimodular(&mut rng, m, 10);
        let relabel = random_relabel(&mut rng, d.poset());
        let t = d.transform(&psi, &relabel).unwrap();
        assert!(t.validate().is_valid(), "round {round}");
        assert_eq!(fingerprint(&d), fingerprint(&t), "round {round}");
    }
}

#[test]
fn links_of_random_data_validate_with_shifted_bookkeeping() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for round in 0..12 {
        let m = 2 + round % 3;
        let d = random_valid_chardata(&mut rng, m);
        let n = d.n();
        for s in d.poset().strata().to_vec() {
            let codim = d.poset().codim_of(&s.id).unwrap();
            let link = d.link_data(&s.id).unwrap();
            if codim == 0 {
                assert!(link.is_empty());
                continue;
            }
            assert_eq!(link.m(), codim, "link ambient rank is the codimension");
            assert!(link.validate().is_valid(), "round {round} stratum {}", s.id);
            if !link.is_empty() {
                assert_eq!(
                    link.n() + link.l(),
                    codim - 1,
                    "link poset reaches codim(s) - 1"
                );
            }
            assert!(link.n() <= n);
        }
    }
}

#[test]
fn skeleton_dimensions_follow_the_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for _ in 0..10 {
        let m = 2 + rng.gen_range(0..3usize);
        let d = random_valid_chardata(&mut rng, m);
        let r = d.inspect().unwrap();
        assert_eq!(r.total_dim, r.l + r.m + r.n);
        let expected: Vec<usize> = (0..=r.n).map(|i| r.l + 2 * i + (r.m - r.n)).collect();
        let got: Vec<usize> = r.skeleta.iter().map(|s| s.model_dim).collect();
        assert_eq!(got, expected);
        // full-rank strata exist only in the equal-rank case
        if r.m != r.n {
            assert!(r.fixed_components.is_empty());
        }
    }
}

#[test]
fn decide_recovers_random_transforms() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for round in 0..10 {
        let m = 2 + round % 3;
        let d = random_valid_chardata(&mut rng, m);
        let psi = random_unimodular(&mut rng, m, 10);
        let relabel = random_relabel(&mut rng, d.poset());
        let t = d.transform(&psi, &relabel).unwrap();
        let verdict = decide(&d, &t, Mode::Weak, &DecideOptions::default()).unwrap();
        let Verdict::Isomorphic(w) = verdict else {
            panic!("round {round}: expected isomorphic");
        };
        assert!(verify_witness(&d, &t, &w), "round {round}");
    }
}
