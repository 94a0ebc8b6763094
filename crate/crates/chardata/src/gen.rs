//! Random generation of kernel objects and valid characteristic data, used
//! by the property suites and useful for fuzzing a deployment.
//!
//! Unimodular maps are built as short products of elementary matrices, so
//! their entries stay desk-sized. Valid data comes from products of
//! simplices carrying the standard projective-style facet labels, twisted by
//! a random unimodular change of coordinates; the facet weights of such data
//! always span `Q^m`, which is the completeness class of the decision
//! procedure.

use crate::data::CharData;
use crate::lattice::{Int, IntVec, UnimodularMap};
use crate::polytope::PolytopeIncidence;
use crate::poset::StratPoset;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};

/// Product of at most `steps` random elementary matrices in `GL(m, Z)`:
/// transvections with small offsets, coordinate swaps, and sign flips.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, m: usize, steps: usize) -> UnimodularMap {
    let mut acc = UnimodularMap::identity(m);
    if m == 0 {
        return acc;
    }
    for _ in 0..steps {
        let kind = rng.gen_range(0..3);
        let e = if kind == 0 || m == 1 {
            UnimodularMap::elementary_negate(m, rng.gen_range(0..m))
        } else if kind == 1 {
            let i = rng.gen_range(0..m);
            let j = (i + rng.gen_range(1..m)) % m;
            UnimodularMap::elementary_swap(m, i, j)
        } else {
            let i = rng.gen_range(0..m);
            let j = (i + rng.gen_range(1..m)) % m;
            let c = *[-3i64, -2, -1, 1, 2, 3].choose(rng).expect("nonempty");
            UnimodularMap::elementary_add(m, i, j, Int::from(c))
        };
        acc = acc.then(&e);
    }
    acc
}

/// Product of simplices of the given positive dimensions, as a simple
/// polytope of dimension `sum(dims)` with the standard labels: each factor
/// contributes its coordinate basis vectors plus the negated sum. Every
/// vertex sees a lattice basis, so the labeling is a valid characteristic
/// function.
pub fn simplex_product(dims: &[usize]) -> PolytopeIncidence {
    assert!(
        !dims.is_empty() && dims.iter().all(|&d| d > 0),
        "factor dimensions must be positive"
    );
    let n: usize = dims.iter().sum();
    let mut labels: Vec<IntVec> = Vec::new();
    let mut facet_base = Vec::with_capacity(dims.len());
    let mut offset = 0usize;
    for &a in dims {
        facet_base.push(labels.len());
        for j in 0..a {
            let mut v = vec![0i64; n];
            v[offset + j] = 1;
            labels.push(IntVec::from_i64(&v));
        }
        let mut v = vec![0i64; n];
        for x in v.iter_mut().skip(offset).take(a) {
            *x = -1;
        }
        labels.push(IntVec::from_i64(&v));
        offset += a;
    }
    let facet_count = labels.len();

    // vertices: one choice of omitted facet per factor
    let mut vertices: Vec<(String, BTreeSet<usize>)> = Vec::new();
    let mut choice = vec![0usize; dims.len()];
    loop {
        let mut facets = BTreeSet::new();
        for (t, &a) in dims.iter().enumerate() {
            for j in 0..=a {
                if j != choice[t] {
                    facets.insert(facet_base[t] + j);
                }
            }
        }
        vertices.push((format!("v{}", vertices.len()), facets));
        let mut t = 0;
        loop {
            if t == dims.len() {
                let vertices_done = vertices;
                return PolytopeIncidence::new(n, facet_count, vertices_done, Some(labels), None)
                    .expect("simplex products are well-formed");
            }
            if choice[t] < dims[t] {
                choice[t] += 1;
                break;
            }
            choice[t] = 0;
            t += 1;
        }
    }
}

/// Random composition of `m` into positive parts.
pub fn random_composition<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<usize> {
    let mut parts = Vec::new();
    let mut rest = m;
    while rest > 0 {
        let p = rng.gen_range(1..=rest);
        parts.push(p);
        rest -= p;
    }
    parts
}

/// Random valid characteristic data of ambient rank `m`: a random product
/// of simplices with standard labels, twisted by a random unimodular map.
/// The codimension-one weights of the result span `Q^m`.
pub fn random_valid_chardata<R: Rng + ?Sized>(rng: &mut R, m: usize) -> CharData {
    assert!(m > 0);
    let dims = random_composition(rng, m);
    let base = simplex_product(&dims);
    let psi = random_unimodular(rng, m, 6);
    let labels: Vec<IntVec> = base
        .labels()
        .expect("labeled")
        .iter()
        .map(|v| psi.apply(v))
        .collect();
    let twisted = PolytopeIncidence::new(
        base.n(),
        base.facet_count(),
        base.vertices().to_vec(),
        Some(labels),
        Some(m),
    )
    .expect("unimodular images of a valid labeling stay valid");
    twisted
        .to_chardata()
        .expect("labeling is a characteristic function")
}

/// Random bijection from the poset's ids onto fresh names.
pub fn random_relabel<R: Rng + ?Sized>(
    rng: &mut R,
    poset: &StratPoset,
) -> BTreeMap<String, String> {
    let mut names: Vec<String> = (0..poset.len()).map(|i| format!("s{i}")).collect();
    names.shuffle(rng);
    poset
        .ids()
        .zip(names)
        .map(|(id, name)| (id.to_string(), name))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unimodular_has_unit_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in 1..=4 {
            for _ in 0..20 {
                let psi = random_unimodular(&mut rng, m, 10);
                assert!(psi.det().magnitude() == &num_bigint::BigUint::from(1u32));
            }
        }
    }

    #[test]
    fn simplex_products_are_simple_and_valid() {
        for dims in [
            vec![1],
            vec![2],
            vec![1, 1],
            vec![2, 1],
            vec![1, 1, 1],
            vec![3, 1],
        ] {
            let p = simplex_product(&dims);
            assert!(p.is_simple());
            let d = p.to_chardata().expect("standard labels validate");
            assert!(d.validate().is_valid());
            let expected: usize = dims.iter().map(|a| a + 1).product();
            assert_eq!(
                d.poset().strata().iter().filter(|s| s.dim == 0).count(),
                expected
            );
        }
    }

    #[test]
    fn random_chardata_validates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in 2..=4 {
            for _ in 0..5 {
                let d = random_valid_chardata(&mut rng, m);
                assert!(d.validate().is_valid());
                assert_eq!(d.m(), m);
            }
        }
    }

    #[test]
    fn random_relabel_is_a_bijection() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = random_valid_chardata(&mut rng, 3);
        let relabel = random_relabel(&mut rng, d.poset());
        let targets: BTreeSet<&String> = relabel.values().collect();
        assert_eq!(targets.len(), d.poset().len());
        assert!(d.transform(&UnimodularMap::identity(3), &relabel).is_ok());
    }
}
