//! Decision procedure for (weak) isomorphism of characteristic data.
//!
//! Two data sets are weakly isomorphic when a dimension-preserving poset
//! isomorphism `f` and a torus automorphism `psi` in `GL(m, Z)` intertwine
//! the two functors: `psi(lambda(S)) = lambda'(f(S))` for every stratum. By
//! the classification theorem for these actions, a positive verdict means
//! the underlying spaces are (weakly) equivariantly homeomorphic, provided
//! the top-strata homotopy condition holds for both orbit spaces.
//!
//! The search iterates poset isomorphisms, pruned by a `GL(m, Z)`-invariant
//! fingerprint, and solves for `psi` from the codimension-one strata: their
//! rank-one lattices give primitive vectors determined up to sign, so when
//! those vectors span `Q^m` the candidate `psi` for a given sign pattern is
//! the unique solution of a linear system. Outside that class the procedure
//! answers `Undecided` rather than risking a wrong negative; the `Undecided`
//! class is a limitation of this solver, not a notion from the underlying
//! theory.

use crate::data::{CharData, ChernClass, ValidationReport};
use crate::lattice::{smith_invariants, GeneratorSet, Int, IntVec, UnimodularMap};
use crate::poset::PosetIso;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum IsoError {
    #[error("left input does not validate: {0}")]
    InvalidLeft(ValidationReport),
    #[error("right input does not validate: {0}")]
    InvalidRight(ValidationReport),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Weak,
    Strict,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Weak => write!(f, "weak"),
            Mode::Strict => write!(f, "strict"),
        }
    }
}

/// A verified certificate of isomorphism: the stratum bijection and the
/// torus automorphism making the two functors agree. For `Strict` the
/// automorphism is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoWitness {
    pub poset_iso: PosetIso,
    pub psi: UnimodularMap,
    pub mode: Mode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Isomorphic(IsoWitness),
    NotIsomorphic { certificate: String },
    Undecided { reason: String },
}

impl Verdict {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, Verdict::Isomorphic(_))
    }
}

#[derive(Clone, Debug)]
pub struct DecideOptions {
    /// Upper bound on the number of codimension-one strata the sign
    /// enumeration will accept; the search runs `2^(F-1)` solves per poset
    /// isomorphism and overflows to `Undecided` beyond the cap.
    pub max_signs: usize,
    /// Skip candidate poset isomorphisms whose per-stratum fingerprints
    /// disagree. Disable to force the full search (the two paths must agree).
    pub fingerprint_prune: bool,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            max_signs: 24,
            fingerprint_prune: true,
        }
    }
}

/// Per-stratum invariant: dimension, lattice rank, order degrees, and the
/// Smith invariants of the matrix stacking the basis rows of the lattices of
/// all covers. Unimodular images and relabelings leave every component
/// unchanged.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FingerprintKey {
    pub dim: usize,
    pub rank: usize,
    pub down_degree: usize,
    pub up_degree: usize,
    pub cover_invariants: Vec<BigUint>,
}

/// Sorted multiset of per-stratum keys; equal for weakly isomorphic data, so
/// inequality certifies a negative verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint(Vec<FingerprintKey>);

impl Fingerprint {
    pub fn keys(&self) -> &[FingerprintKey] {
        &self.0
    }
}

fn key_of(d: &CharData, id: &str) -> FingerprintKey {
    let poset = d.poset();
    let mut stacked = Vec::new();
    for cover in poset.covers_of(id) {
        stacked.extend(
            d.lambda_of(cover)
                .expect("stratum has lattice")
                .basis()
                .iter()
                .cloned(),
        );
    }
    let gens = GeneratorSet::new(d.m(), stacked).expect("basis rows have ambient length");
    FingerprintKey {
        dim: poset.dim_of(id).expect("stratum exists"),
        rank: d.lambda_of(id).expect("stratum has lattice").rank(),
        down_degree: poset.down_degree(id),
        up_degree: poset.up_degree(id),
        cover_invariants: smith_invariants(&gens),
    }
}

/// `GL(m, Z)`-invariant pruning key of the data: the sorted multiset of
/// per-stratum [`FingerprintKey`]s.
pub fn fingerprint(d: &CharData) -> Fingerprint {
    let mut keys: Vec<FingerprintKey> = d.poset().ids().map(|id| key_of(d, id)).collect();
    keys.sort();
    Fingerprint(keys)
}

/// Smallest stratum dimension at which the two key multisets disagree.
fn fingerprint_mismatch_dim(a: &Fingerprint, b: &Fingerprint) -> Option<usize> {
    let group = |fp: &Fingerprint| {
        let mut by_dim: BTreeMap<usize, Vec<FingerprintKey>> = BTreeMap::new();
        for k in &fp.0 {
            by_dim.entry(k.dim).or_default().push(k.clone());
        }
        by_dim
    };
    let ga = group(a);
    let gb = group(b);
    let dims: std::collections::BTreeSet<usize> = ga.keys().chain(gb.keys()).copied().collect();
    dims.into_iter().find(|d| ga.get(d) != gb.get(d))
}

fn to_rational(x: &Int) -> BigRational {
    BigRational::from(x.clone())
}

/// Indices of `m` linearly independent rows, or `None` on a rank deficit.
fn independent_rows(rows: &[IntVec], m: usize) -> Option<Vec<usize>> {
    let mut pivots: Vec<(usize, Vec<BigRational>)> = Vec::new(); // (pivot col, reduced row)
    let mut picked = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        if picked.len() == m {
            break;
        }
        let mut v: Vec<BigRational> = row.entries().iter().map(to_rational).collect();
        for (col, p) in &pivots {
            if !v[*col].is_zero() {
                let f = v[*col].clone();
                for (x, y) in v.iter_mut().zip(p) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(col) = v.iter().position(|x| !x.is_zero()) {
            let lead = v[col].clone();
            for x in v.iter_mut() {
                *x /= &lead;
            }
            pivots.push((col, v));
            picked.push(idx);
        }
    }
    (picked.len() == m).then_some(picked)
}

/// Exact inverse of a nonsingular rational matrix.
fn invert_rational(a: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let m = a.len();
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..m {
                r.push(if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
            }
            r
        })
        .collect();
    for col in 0..m {
        let pivot = (col..m).find(|&i| !aug[i][col].is_zero())?;
        aug.swap(col, pivot);
        let p = aug[col][col].clone();
        for x in aug[col].iter_mut() {
            *x /= &p;
        }
        for i in 0..m {
            if i != col && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                let row = aug[col].clone();
                for (x, y) in aug[i].iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(
        aug.into_iter()
            .map(|row| row.into_iter().skip(m).collect())
            .collect(),
    )
}

/// The facet data of the left-hand side, shared by every candidate
/// isomorphism.
struct FacetSystem {
    /// Codim-1 stratum ids in id order.
    facets: Vec<String>,
    /// Their primitive weight rows.
    vectors: Vec<IntVec>,
    /// Indices of a row basis.
    basis_rows: Vec<usize>,
    /// Inverse of the selected square block.
    basis_inverse: Vec<Vec<BigRational>>,
}

fn facet_system(a: &CharData) -> Option<FacetSystem> {
    let poset = a.poset();
    let top = poset.max_dim()?;
    let facets: Vec<String> = poset
        .ids()
        .filter(|id| top > 0 && poset.dim_of(id) == Some(top - 1))
        .map(|s| s.to_string())
        .collect();
    let vectors: Vec<IntVec> = facets
        .iter()
        .map(|id| {
            let lat = a.lambda_of(id).expect("stratum has lattice");
            debug_assert_eq!(lat.rank(), 1);
            lat.basis()[0].clone()
        })
        .collect();
    let m = a.m();
    let basis_rows = independent_rows(&vectors, m)?;
    let square: Vec<Vec<BigRational>> = basis_rows
        .iter()
        .map(|&i| vectors[i].entries().iter().map(to_rational).collect())
        .collect();
    let basis_inverse = invert_rational(&square)?;
    Some(FacetSystem {
        facets,
        vectors,
        basis_rows,
        basis_inverse,
    })
}

/// Solves `v_S * X = eps_S * v'_{f(S)}` for the matrix `X`, returning it only
/// when it is integral, unimodular, and consistent with every facet row.
fn solve_psi(
    sys: &FacetSystem,
    images: &[IntVec],
    eps: &[bool], // true: flip sign
    m: usize,
) -> Option<UnimodularMap> {
    let signed = |i: usize| -> Vec<BigRational> {
        images[i]
            .entries()
            .iter()
            .map(|x| {
                let r = to_rational(x);
                if eps[i] {
                    -r
                } else {
                    r
                }
            })
            .collect()
    };
    // X = A0^-1 * B0 over the selected row basis
    let b0: Vec<Vec<BigRational>> = sys.basis_rows.iter().map(|&i| signed(i)).collect();
    let mut x = vec![vec![BigRational::zero(); m]; m];
    for i in 0..m {
        for j in 0..m {
            let mut acc = BigRational::zero();
            for k in 0..m {
                acc += &sys.basis_inverse[i][k] * &b0[k][j];
            }
            x[i][j] = acc;
        }
    }
    if x.iter().flatten().any(|e| !e.is_integer()) {
        return None;
    }
    let matrix: Vec<Vec<Int>> = x
        .iter()
        .map(|row| row.iter().map(|e| e.to_integer()).collect())
        .collect();
    // consistency on the facet rows outside the basis
    for (i, v) in sys.vectors.iter().enumerate() {
        let want = signed(i);
        for (j, w) in want.iter().enumerate() {
            let mut acc = Int::zero();
            for (k, e) in v.entries().iter().enumerate() {
                acc += e * &matrix[k][j];
            }
            if &to_rational(&acc) != w {
                return None;
            }
        }
    }
    UnimodularMap::new(matrix).ok()
}

/// True iff `psi(lambda(S)) = lambda'(f(S))` for every stratum of `a`.
fn lambda_compatible(a: &CharData, b: &CharData, f: &PosetIso, psi: &UnimodularMap) -> bool {
    a.poset().ids().all(|id| {
        let Some(target) = f.apply(id) else {
            return false;
        };
        let Some(lat) = a.lambda_of(id) else {
            return false;
        };
        let Some(expect) = b.lambda_of(target) else {
            return false;
        };
        match psi.apply_lattice(lat) {
            Ok(image) => image == *expect,
            Err(_) => false,
        }
    })
}

/// Checks a witness against the defining diagram, independently of how it
/// was produced: the bijection must be a dimension-preserving order
/// isomorphism, `psi` must be the identity in strict mode, and every lattice
/// must map onto its counterpart.
pub fn verify_witness(a: &CharData, b: &CharData, w: &IsoWitness) -> bool {
    if w.psi.m() != a.m() || a.m() != b.m() {
        return false;
    }
    if w.mode == Mode::Strict && !w.psi.is_identity() {
        return false;
    }
    let map = w.poset_iso.mapping();
    if map.len() != a.poset().len() || a.poset().len() != b.poset().len() {
        return false;
    }
    let mut seen = std::collections::BTreeSet::new();
    for (s, t) in map {
        if !a.poset().contains_id(s) || !b.poset().contains_id(t) || !seen.insert(t.clone()) {
            return false;
        }
        if a.poset().dim_of(s) != b.poset().dim_of(t) {
            return false;
        }
    }
    for (s1, t1) in map {
        for (s2, t2) in map {
            if a.poset().leq(s1, s2) != b.poset().leq(t1, t2) {
                return false;
            }
        }
    }
    lambda_compatible(a, b, &w.poset_iso, &w.psi)
}

/// Decides (weak) isomorphism of two valid characteristic data sets.
///
/// Positive verdicts carry a witness that re-verifies under
/// [`verify_witness`]; negative verdicts name their obstruction. The search
/// is deterministic: poset isomorphisms are enumerated in lexicographic
/// order of image ids and sign patterns in ascending binary order, and the
/// first witness found is reported, so the result is independent of any
/// internal work partitioning.
pub fn decide(
    a: &CharData,
    b: &CharData,
    mode: Mode,
    opts: &DecideOptions,
) -> Result<Verdict, IsoError> {
    let ra = a.validate();
    if !ra.is_valid() {
        return Err(IsoError::InvalidLeft(ra));
    }
    let rb = b.validate();
    if !rb.is_valid() {
        return Err(IsoError::InvalidRight(rb));
    }
    if a.m() != b.m() {
        return Ok(Verdict::NotIsomorphic {
            certificate: format!("ambient rank mismatch: {} vs {}", a.m(), b.m()),
        });
    }

    // Chern gate: proceed only when both classes are known equal. A zero
    // class can never match a genuinely nonzero one; two opaque classes have
    // no comparison without user pullback data.
    match (a.chern(), b.chern()) {
        (x, y) if x.is_effectively_zero() && y.is_effectively_zero() => {}
        (ChernClass::Zero, ChernClass::Opaque { tag, .. })
        | (ChernClass::Opaque { tag, .. }, ChernClass::Zero) => {
            return Ok(Verdict::NotIsomorphic {
                certificate: format!("Chern class mismatch: zero vs nonzero opaque class {tag:?}"),
            });
        }
        _ => {
            return Ok(Verdict::Undecided {
                reason: "opaque Chern classes lack pullback data".into(),
            });
        }
    }

    let fp_a = fingerprint(a);
    let fp_b = fingerprint(b);
    if opts.fingerprint_prune && fp_a != fp_b {
        let at = fingerprint_mismatch_dim(&fp_a, &fp_b)
            .map(|d| format!(" at dim-{d} strata"))
            .unwrap_or_default();
        return Ok(Verdict::NotIsomorphic {
            certificate: format!("fingerprint mismatch{at}"),
        });
    }

    let keys_a: BTreeMap<String, FingerprintKey> = a
        .poset()
        .ids()
        .map(|id| (id.to_string(), key_of(a, id)))
        .collect();
    let keys_b: BTreeMap<String, FingerprintKey> = b
        .poset()
        .ids()
        .map(|id| (id.to_string(), key_of(b, id)))
        .collect();

    let system = if mode == Mode::Weak {
        facet_system(a)
    } else {
        None
    };

    let mut searched = 0usize;
    for f in a.poset().enumerate_isos(b.poset()) {
        searched += 1;
        if opts.fingerprint_prune && f.mapping().iter().any(|(s, t)| keys_a[s] != keys_b[t]) {
            continue;
        }
        match mode {
            Mode::Strict => {
                let psi = UnimodularMap::identity(a.m());
                if lambda_compatible(a, b, &f, &psi) {
                    return Ok(Verdict::Isomorphic(IsoWitness {
                        poset_iso: f,
                        psi,
                        mode: Mode::Strict,
                    }));
                }
            }
            Mode::Weak => {
                let Some(sys) = system.as_ref() else {
                    return Ok(Verdict::Undecided {
                        reason: "facet lattices do not determine psi".into(),
                    });
                };
                // the mask is a u64, so the cap can never exceed 63 facets
                let cap = opts.max_signs.min(63);
                if sys.facets.len() > cap {
                    return Ok(Verdict::Undecided {
                        reason: format!(
                            "sign enumeration overflow: {} codim-1 strata exceed the cap {}",
                            sys.facets.len(),
                            cap
                        ),
                    });
                }
                let images: Vec<IntVec> = sys
                    .facets
                    .iter()
                    .map(|id| {
                        let target = f.apply(id).expect("facet mapped");
                        b.lambda_of(target).expect("stratum has lattice").basis()[0].clone()
                    })
                    .collect();
                let free = sys.facets.len().saturating_sub(1);
                for mask in 0u64..(1u64 << free) {
                    let mut eps = vec![false; sys.facets.len()];
                    for (bit, e) in eps.iter_mut().skip(1).enumerate() {
                        *e = mask >> bit & 1 == 1;
                    }
                    if let Some(psi) = solve_psi(sys, &images, &eps, a.m()) {
                        if lambda_compatible(a, b, &f, &psi) {
                            return Ok(Verdict::Isomorphic(IsoWitness {
                                poset_iso: f,
                                psi,
                                mode: Mode::Weak,
                            }));
                        }
                    }
                }
            }
        }
    }
    let certificate = if searched == 0 {
        "no dimension-preserving poset isomorphism exists".to_string()
    } else {
        format!("search exhausted over {searched} poset isomorphism(s)")
    };
    Ok(Verdict::NotIsomorphic { certificate })
}
