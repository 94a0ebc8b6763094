//! Characteristic data `(Q, lambda, c)`: a stratified poset, an
//! order-reversing assignment of saturated lattices (the characteristic
//! functor), and a Chern-class descriptor for the free-part principal
//! bundle.
//!
//! The defining conditions are checked by [`CharData::validate`]:
//! `rank(lambda(S)) = codim(S)` for every stratum and
//! `lambda(S1) >= lambda(S2)` whenever `S1 <= S2`. The canonical model built
//! from valid data of ambient rank `m` over a poset with lowest stratum
//! dimension `l` and length `n` is an `(l+m+n)`-dimensional space filtered by
//! skeleta of dimension `l+2i+(m-n)`; [`CharData::inspect`] reports that
//! bookkeeping without constructing any space.

use crate::lattice::{GeneratorSet, IntVec, LatticeError, SaturatedLattice, UnimodularMap};
use crate::poset::{PosetError, PosetViolation, StratPoset, Stratum};
use num_bigint::BigUint;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DataError {
    #[error("stratum {0:?} has no lattice assigned")]
    LambdaMissing(String),
    #[error("lattice assigned to unknown stratum {0:?}")]
    LambdaUnknownStratum(String),
    #[error("lattice of stratum {id:?} lives in Z^{found}, ambient rank is {expected}")]
    AmbientMismatch {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("opaque Chern coordinates have {found} columns, ambient rank is {expected}")]
    ChernWidthMismatch { expected: usize, found: usize },
    #[error("skeleton index {i} out of range 0..={n}")]
    SkeletonIndexOutOfRange { i: usize, n: usize },
    #[error("unknown stratum {0:?}")]
    UnknownStratum(String),
    #[error("relabeling is not a bijection on the stratum ids")]
    RelabelNotBijective,
    #[error("map rank {found} does not match ambient rank {expected}")]
    MapRankMismatch { expected: usize, found: usize },
    #[error("data does not validate: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Chern class of the free-part principal torus bundle.
///
/// `Zero` covers all orbit spaces with vanishing second cohomology (simple
/// polytopes, balls of complete fans). `Opaque` carries user-supplied
/// coordinates in a user-declared basis of `H^2(Q; Z^m)`; the library never
/// interprets them beyond equality with zero, and comparing two opaque
/// classes without pullback data is refused rather than guessed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChernClass {
    Zero,
    Opaque { tag: String, coords: Vec<IntVec> },
}

impl ChernClass {
    /// True for `Zero` and for `Opaque` with all-zero coordinates.
    pub fn is_effectively_zero(&self) -> bool {
        match self {
            ChernClass::Zero => true,
            ChernClass::Opaque { coords, .. } => coords.iter().all(|row| row.is_zero()),
        }
    }
}

/// Defects found by [`CharData::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DataViolation {
    Poset(PosetViolation),
    /// `rank(lambda(S))` differs from the codimension of `S`.
    RankMismatch {
        id: String,
        expected_codim: usize,
        found_rank: usize,
    },
    /// `lower <= upper` but `lambda(lower)` does not contain `lambda(upper)`.
    MonotonicityBroken {
        lower: String,
        upper: String,
    },
    /// Ambient rank below the poset length.
    AmbientTooSmall {
        m: usize,
        n: usize,
    },
}

impl fmt::Display for DataViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataViolation::Poset(v) => v.fmt(f),
            DataViolation::RankMismatch {
                id,
                expected_codim,
                found_rank,
            } => write!(
                f,
                "stratum {id}: lattice rank {found_rank} differs from codimension {expected_codim}"
            ),
            DataViolation::MonotonicityBroken { lower, upper } => write!(
                f,
                "monotonicity broken: lambda({lower}) does not contain lambda({upper})"
            ),
            DataViolation::AmbientTooSmall { m, n } => {
                write!(f, "ambient rank {m} is smaller than the poset length {n}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<DataViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", lines.join("; "))
    }
}

/// Per-level entry of an [`InspectReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonLevel {
    pub i: usize,
    /// Dimension of the model's `i`-th skeleton: `l + 2i + (m - n)`.
    pub model_dim: usize,
    /// Number of strata of orbit-space dimension `l + i`.
    pub stratum_count: usize,
}

/// Dimension bookkeeping of the canonical model, computed from the data
/// alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InspectReport {
    pub l: usize,
    pub n: usize,
    pub m: usize,
    /// Dimension of the model: `l + m + n`.
    pub total_dim: usize,
    /// Dimension of the free part (the top stratum of the model); equals
    /// `total_dim`.
    pub free_dim: usize,
    pub skeleta: Vec<SkeletonLevel>,
    /// Strata whose lattice has full rank `m` (possible only when `m == n`).
    pub fixed_components: Vec<String>,
    /// Saturation indices recorded by converters, where present.
    pub defects: BTreeMap<String, BigUint>,
    pub top_strata_he_asserted: bool,
    pub skeleton: bool,
}

/// Characteristic data: poset, characteristic functor, Chern descriptor,
/// ambient rank, plus converter metadata (saturation defects) and the user's
/// assertion of the top-strata homotopy condition. Immutable after
/// construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharData {
    m: usize,
    poset: StratPoset,
    lambda: BTreeMap<String, SaturatedLattice>,
    chern: ChernClass,
    defects: BTreeMap<String, BigUint>,
    top_strata_he_asserted: bool,
    skeleton: bool,
}

impl CharData {
    pub fn new(
        m: usize,
        poset: StratPoset,
        lambda: BTreeMap<String, SaturatedLattice>,
        chern: ChernClass,
        top_strata_he_asserted: bool,
    ) -> Result<Self, DataError> {
        for id in poset.ids() {
            if !lambda.contains_key(id) {
                return Err(DataError::LambdaMissing(id.to_string()));
            }
        }
        for (id, lat) in &lambda {
            if !poset.contains_id(id) {
                return Err(DataError::LambdaUnknownStratum(id.clone()));
            }
            if lat.ambient_rank() != m {
                return Err(DataError::AmbientMismatch {
                    id: id.clone(),
                    expected: m,
                    found: lat.ambient_rank(),
                });
            }
        }
        if let ChernClass::Opaque { coords, .. } = &chern {
            for row in coords {
                if row.dim() != m {
                    return Err(DataError::ChernWidthMismatch {
                        expected: m,
                        found: row.dim(),
                    });
                }
            }
        }
        Ok(CharData {
            m,
            poset,
            lambda,
            chern,
            defects: BTreeMap::new(),
            top_strata_he_asserted,
            skeleton: false,
        })
    }

    /// The empty data: the link of a point in a top stratum.
    pub fn empty() -> Self {
        CharData {
            m: 0,
            poset: StratPoset::empty(),
            lambda: BTreeMap::new(),
            chern: ChernClass::Zero,
            defects: BTreeMap::new(),
            top_strata_he_asserted: false,
            skeleton: false,
        }
    }

    pub fn with_defects(mut self, defects: BTreeMap<String, BigUint>) -> Result<Self, DataError> {
        for id in defects.keys() {
            if !self.poset.contains_id(id) {
                return Err(DataError::UnknownStratum(id.clone()));
            }
        }
        self.defects = defects;
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn poset(&self) -> &StratPoset {
        &self.poset
    }

    pub fn lambda_of(&self, id: &str) -> Option<&SaturatedLattice> {
        self.lambda.get(id)
    }

    pub fn chern(&self) -> &ChernClass {
        &self.chern
    }

    pub fn defects(&self) -> &BTreeMap<String, BigUint> {
        &self.defects
    }

    pub fn top_strata_he_asserted(&self) -> bool {
        self.top_strata_he_asserted
    }

    /// Overrides the user's top-strata homotopy assertion.
    pub fn assert_top_he(mut self) -> Self {
        self.top_strata_he_asserted = true;
        self
    }

    pub fn is_skeleton(&self) -> bool {
        self.skeleton
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn l(&self) -> usize {
        self.poset.l()
    }

    pub fn n(&self) -> usize {
        self.poset.length()
    }

    /// Checks every poset invariant plus the two defining conditions of a
    /// characteristic functor: rank equals codimension, and containment
    /// reverses the order. Returns the full violation list; never aborts.
    pub fn validate(&self) -> ValidationReport {
        let mut violations: Vec<DataViolation> = self
            .poset
            .validate()
            .violations
            .into_iter()
            .map(DataViolation::Poset)
            .collect();
        let n = self.poset.length();
        if self.m < n {
            violations.push(DataViolation::AmbientTooSmall { m: self.m, n });
        }
        for s in self.poset.strata() {
            let codim = self.poset.codim_of(&s.id).expect("stratum exists");
            let rank = self.lambda[&s.id].rank();
            if rank != codim {
                violations.push(DataViolation::RankMismatch {
                    id: s.id.clone(),
                    expected_codim: codim,
                    found_rank: rank,
                });
            }
        }
        for a in self.poset.strata() {
            for b in self.poset.strata() {
                if a.id != b.id && self.poset.leq(&a.id, &b.id) {
                    let lower = &self.lambda[&a.id];
                    let upper = &self.lambda[&b.id];
                    if !lower.contains(upper).unwrap_or(false) {
                        violations.push(DataViolation::MonotonicityBroken {
                            lower: a.id.clone(),
                            upper: b.id.clone(),
                        });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    /// Restriction to the strata of dimension at most `l + i`, with the
    /// functor restricted along. The result is tagged as a skeleton and its
    /// validation is deliberately deferred: relative to the sub-poset's own
    /// top dimension the rank condition generally fails, and the data is
    /// meaningful as an intermediate only.
    pub fn restrict_to_skeleton(&self, i: usize) -> Result<CharData, DataError> {
        let n = self.poset.length();
        if i > n {
            return Err(DataError::SkeletonIndexOutOfRange { i, n });
        }
        let cutoff = self.poset.l() + i;
        let keep: Vec<&Stratum> = self
            .poset
            .strata()
            .iter()
            .filter(|s| s.dim <= cutoff)
            .collect();
        let strata: Vec<Stratum> = keep.iter().map(|s| (*s).clone()).collect();
        let mut pairs = Vec::new();
        for a in &keep {
            for b in &keep {
                if a.id != b.id && self.poset.leq(&a.id, &b.id) {
                    pairs.push((a.id.clone(), b.id.clone()));
                }
            }
        }
        let poset = StratPoset::new(strata, &pairs)?;
        let lambda = keep
            .iter()
            .map(|s| (s.id.clone(), self.lambda[&s.id].clone()))
            .collect();
        let defects = self
            .defects
            .iter()
            .filter(|(id, _)| poset.contains_id(id))
            .map(|(id, d)| (id.clone(), d.clone()))
            .collect();
        Ok(CharData {
            m: self.m,
            poset,
            lambda,
            chern: self.chern.clone(),
            defects,
            top_strata_he_asserted: self.top_strata_he_asserted,
            skeleton: self.skeleton || i < n,
        })
    }

    /// Characteristic data of the link of a point of `s`: the upper set of
    /// `s` with shifted dimensions, ambient torus `lambda(s)`, and each
    /// `lambda(t)` re-expressed in the canonical basis of `lambda(s)`. For a
    /// maximal stratum the link is empty and the empty data is returned.
    pub fn link_data(&self, s: &str) -> Result<CharData, DataError> {
        if !self.poset.contains_id(s) {
            return Err(DataError::UnknownStratum(s.to_string()));
        }
        let report = self.validate();
        if !report.is_valid() {
            return Err(DataError::Invalid(report));
        }
        let codim = self.poset.codim_of(s).expect("stratum exists");
        if codim == 0 {
            return Ok(CharData::empty());
        }
        let ambient = &self.lambda[s];
        debug_assert_eq!(ambient.rank(), codim);
        let poset = self.poset.upper_set(s)?;
        let mut lambda = BTreeMap::new();
        for id in poset.ids() {
            let coords: GeneratorSet = ambient.express(&self.lambda[id])?;
            lambda.insert(id.to_string(), SaturatedLattice::from_generators(&coords)?);
        }
        let defects = self
            .defects
            .iter()
            .filter(|(id, _)| poset.contains_id(id))
            .map(|(id, d)| (id.clone(), d.clone()))
            .collect();
        let mut out = CharData::new(codim, poset, lambda, ChernClass::Zero, false)?;
        out.defects = defects;
        Ok(out)
    }

    /// Dimension bookkeeping of the canonical model. Requires valid data.
    pub fn inspect(&self) -> Result<InspectReport, DataError> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(DataError::Invalid(report));
        }
        let l = self.poset.l();
        let n = self.poset.length();
        let m = self.m;
        let skeleta = (0..=n)
            .map(|i| SkeletonLevel {
                i,
                model_dim: l + 2 * i + (m - n),
                stratum_count: self
                    .poset
                    .strata()
                    .iter()
                    .filter(|s| s.dim == l + i)
                    .count(),
            })
            .collect();
        let fixed_components = self
            .poset
            .ids()
            .filter(|id| self.lambda[*id].rank() == m)
            .map(|id| id.to_string())
            .collect();
        Ok(InspectReport {
            l,
            n,
            m,
            total_dim: l + m + n,
            free_dim: l + m + n,
            skeleta,
            fixed_components,
            defects: self.defects.clone(),
            top_strata_he_asserted: self.top_strata_he_asserted,
            skeleton: self.skeleton,
        })
    }

    /// Image of the data under a torus automorphism and a relabeling of the
    /// strata: the poset is carried across the bijection and every lattice is
    /// mapped through `psi`. Opaque Chern coordinates are carried unchanged
    /// (interpreting them under a relabeled basis is the user's pullback
    /// problem, not ours).
    pub fn transform(
        &self,
        psi: &UnimodularMap,
        relabel: &BTreeMap<String, String>,
    ) -> Result<CharData, DataError> {
        if psi.m() != self.m {
            return Err(DataError::MapRankMismatch {
                expected: self.m,
                found: psi.m(),
            });
        }
        if relabel.len() != self.poset.len() {
            return Err(DataError::RelabelNotBijective);
        }
        let mut seen = std::collections::BTreeSet::new();
        for id in self.poset.ids() {
            let target = relabel.get(id).ok_or(DataError::RelabelNotBijective)?;
            if !seen.insert(target.clone()) {
                return Err(DataError::RelabelNotBijective);
            }
        }
        let strata = self
            .poset
            .strata()
            .iter()
            .map(|s| Stratum::new(relabel[&s.id].clone(), s.dim))
            .collect();
        let mut pairs = Vec::new();
        for a in self.poset.strata() {
            for b in self.poset.strata() {
                if a.id != b.id && self.poset.leq(&a.id, &b.id) {
                    pairs.push((relabel[&a.id].clone(), relabel[&b.id].clone()));
                }
            }
        }
        let poset = StratPoset::new(strata, &pairs)?;
        let mut lambda = BTreeMap::new();
        for (id, lat) in &self.lambda {
            lambda.insert(relabel[id].clone(), psi.apply_lattice(lat)?);
        }
        let defects = self
            .defects
            .iter()
            .map(|(id, d)| (relabel[id].clone(), d.clone()))
            .collect();
        Ok(CharData {
            m: self.m,
            poset,
            lambda,
            chern: self.chern.clone(),
            defects,
            top_strata_he_asserted: self.top_strata_he_asserted,
            skeleton: self.skeleton,
        })
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::poset::fixtures::triangle;

    /// The two-stratum data of the unit 3-sphere with a circle acting on one
    /// coordinate: disk orbit space, fixed boundary circle, m = 1.
    pub fn circle_fixed_sphere() -> CharData {
        let poset = StratPoset::new(
            vec![Stratum::new("interior", 2), Stratum::new("boundary", 1)],
            &[("boundary".into(), "interior".into())],
        )
        .unwrap();
        let mut lambda = BTreeMap::new();
        lambda.insert("interior".into(), SaturatedLattice::zero(1));
        lambda.insert("boundary".into(), SaturatedLattice::full(1));
        CharData::new(1, poset, lambda, ChernClass::Zero, true).unwrap()
    }

    /// Triangle data with edge weights (0,1), (1,k), (1,0) and full vertex
    /// lattices; valid for every k.
    pub fn triangle_data(k: i64) -> CharData {
        let poset = triangle();
        let mut lambda = BTreeMap::new();
        lambda.insert("P".into(), SaturatedLattice::zero(2));
        lambda.insert(
            "e1".into(),
            SaturatedLattice::from_i64(2, &[&[0, 1]]).unwrap(),
        );
        lambda.insert(
            "e2".into(),
            SaturatedLattice::from_i64(2, &[&[1, k]]).unwrap(),
        );
        lambda.insert(
            "e3".into(),
            SaturatedLattice::from_i64(2, &[&[1, 0]]).unwrap(),
        );
        for v in ["v1", "v2", "v3"] {
            lambda.insert(v.into(), SaturatedLattice::full(2));
        }
        CharData::new(2, poset, lambda, ChernClass::Zero, true).unwrap()
    }
}
