//! Complete rational fans and their characteristic data.
//!
//! A complete fan in `R^n` filters the closed unit ball: every cone has a
//! dual cell whose dimension is `n` minus the cone's, and inclusion of cones
//! reverses to the closure order of cells. This module materializes only the
//! stratification poset of that filtered ball together with the isotropy
//! lattices (the saturated spans of the cones' rays, with saturation indices
//! recorded), which is all the classification consumes.
//!
//! Validation checks primitivity and, for simplicial fans, that pairwise
//! cone intersections are faces (an exact rational feasibility test) and the
//! wall criterion for completeness: every wall lies in exactly two maximal
//! cones, all maximal cones are full-dimensional, and the dual graph is
//! connected. Non-simplicial fans are accepted with completeness asserted by
//! the user and a warning; their subset-generated face structure is usually
//! too coarse to produce valid data, and the conversion then fails with the
//! validation report.

use crate::data::{CharData, ChernClass, DataError, ValidationReport};
use crate::lattice::{canonicalize, GeneratorSet, IntVec, SaturatedLattice};
use crate::poset::{PosetError, StratPoset, Stratum};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("cone {cone_index} references ray {ray}, only {ray_count} rays declared")]
    RayIndexOutOfRange {
        cone_index: usize,
        ray: usize,
        ray_count: usize,
    },
    #[error("ray {index} has {found} entries, fan dimension is {expected}")]
    RayWidthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("fan does not validate: {0}")]
    Invalid(FanReport),
    #[error("fan-derived data does not validate: {0}")]
    InvalidOutput(ValidationReport),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Data(#[from] DataError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FanViolation {
    /// Ray whose entries have gcd different from 1.
    NonPrimitiveRay {
        index: usize,
    },
    DuplicateRay {
        first: usize,
        second: usize,
    },
    /// Cone whose rays are linearly dependent.
    NonSimplicialCone {
        cone: Vec<usize>,
    },
    /// Two cones intersect geometrically in more than their common face.
    PairIntersectionNotFace {
        first: Vec<usize>,
        second: Vec<usize>,
    },
    /// Maximal cone of dimension below `n`.
    MaxConeNotFullDim {
        cone: Vec<usize>,
        dim: usize,
    },
    /// Wall contained in a number of maximal cones different from two.
    WallCofaceCount {
        wall: Vec<usize>,
        count: usize,
    },
    DualGraphDisconnected,
    NoMaximalCones,
}

impl fmt::Display for FanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |c: &[usize]| {
            c.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            FanViolation::NonPrimitiveRay { index } => write!(f, "ray {index} is not primitive"),
            FanViolation::DuplicateRay { first, second } => {
                write!(f, "rays {first} and {second} coincide")
            }
            FanViolation::NonSimplicialCone { cone } => {
                write!(f, "cone {{{}}} has linearly dependent rays", set(cone))
            }
            FanViolation::PairIntersectionNotFace { first, second } => write!(
                f,
                "cones {{{}}} and {{{}}} do not intersect in a common face",
                set(first),
                set(second)
            ),
            FanViolation::MaxConeNotFullDim { cone, dim } => {
                write!(f, "maximal cone {{{}}} has dimension {dim}", set(cone))
            }
            FanViolation::WallCofaceCount { wall, count } => {
                write!(
                    f,
                    "wall {{{}}} lies in {count} maximal cone(s), expected 2",
                    set(wall)
                )
            }
            FanViolation::DualGraphDisconnected => {
                write!(f, "dual graph of maximal cones is disconnected")
            }
            FanViolation::NoMaximalCones => write!(f, "fan has no maximal cones"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FanReport {
    pub violations: Vec<FanViolation>,
    pub warnings: Vec<String>,
    pub simplicial: bool,
    /// Set when completeness was checked (simplicial fans only).
    pub complete: Option<bool>,
}

impl FanReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for FanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "valid")
        } else {
            let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", lines.join("; "))
        }
    }
}

/// A fan given by primitive rays and cones as ray-index sets; the stored
/// cone collection is the subset closure of the maximal cones and always
/// includes the zero cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    n: usize,
    rays: Vec<IntVec>,
    cones: Vec<Vec<usize>>,
    max_cones: Vec<Vec<usize>>,
}

impl Fan {
    pub fn from_max_cones(
        n: usize,
        rays: Vec<IntVec>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<Self, FanError> {
        for (index, ray) in rays.iter().enumerate() {
            if ray.dim() != n {
                return Err(FanError::RayWidthMismatch {
                    index,
                    expected: n,
                    found: ray.dim(),
                });
            }
        }
        let mut normalized: Vec<BTreeSet<usize>> = Vec::new();
        for (cone_index, cone) in max_cones.iter().enumerate() {
            for &ray in cone {
                if ray >= rays.len() {
                    return Err(FanError::RayIndexOutOfRange {
                        cone_index,
                        ray,
                        ray_count: rays.len(),
                    });
                }
            }
            normalized.push(cone.iter().copied().collect());
        }
        // keep only inclusion-maximal cones
        let max_cones: Vec<Vec<usize>> = normalized
            .iter()
            .filter(|c| !normalized.iter().any(|d| *c != d && c.is_subset(d)))
            .map(|c| c.iter().copied().collect())
            .collect();
        let mut dedup_max: Vec<Vec<usize>> = Vec::new();
        for c in max_cones {
            if !dedup_max.contains(&c) {
                dedup_max.push(c);
            }
        }
        // subset closure, zero cone included
        let mut cones: BTreeSet<Vec<usize>> = BTreeSet::new();
        for cone in &dedup_max {
            let k = cone.len();
            for mask in 0u64..(1u64 << k) {
                let sub: Vec<usize> = (0..k)
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| cone[i])
                    .collect();
                cones.insert(sub);
            }
        }
        cones.insert(Vec::new());
        Ok(Fan {
            n,
            rays,
            cones: cones.into_iter().collect(),
            max_cones: dedup_max,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    fn cone_rays(&self, cone: &[usize]) -> Vec<IntVec> {
        cone.iter().map(|&i| self.rays[i].clone()).collect()
    }

    fn cone_rank(&self, cone: &[usize]) -> usize {
        let g = GeneratorSet::new(self.n, self.cone_rays(cone)).expect("ray widths checked");
        canonicalize(&g).1
    }

    /// Structural validation; with `require_complete`, additionally the wall
    /// criterion on simplicial fans. Completeness of non-simplicial fans is
    /// not checkable here and is recorded as a warning instead.
    pub fn validate(&self, require_complete: bool) -> FanReport {
        let mut report = FanReport {
            simplicial: true,
            ..FanReport::default()
        };
        for (index, ray) in self.rays.iter().enumerate() {
            if !ray.is_primitive() {
                report
                    .violations
                    .push(FanViolation::NonPrimitiveRay { index });
            }
        }
        for i in 0..self.rays.len() {
            for j in i + 1..self.rays.len() {
                if self.rays[i] == self.rays[j] {
                    report.violations.push(FanViolation::DuplicateRay {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        for cone in &self.max_cones {
            if self.cone_rank(cone) != cone.len() {
                report.simplicial = false;
                report
                    .violations
                    .push(FanViolation::NonSimplicialCone { cone: cone.clone() });
            }
        }
        if report.simplicial {
            for i in 0..self.max_cones.len() {
                for j in i + 1..self.max_cones.len() {
                    if !self.pair_intersects_in_face(&self.max_cones[i], &self.max_cones[j]) {
                        report
                            .violations
                            .push(FanViolation::PairIntersectionNotFace {
                                first: self.max_cones[i].clone(),
                                second: self.max_cones[j].clone(),
                            });
                    }
                }
            }
        }
        if require_complete {
            if report.simplicial {
                report.complete = Some(self.check_wall_condition(&mut report.violations));
            } else {
                report.warnings.push(
                    "fan is not simplicial: completeness cannot be checked and is asserted by the user"
                        .to_string(),
                );
            }
        }
        report
    }

    /// Every wall in exactly two maximal cones, all maximal cones of full
    /// dimension, dual graph connected.
    fn check_wall_condition(&self, violations: &mut Vec<FanViolation>) -> bool {
        let before = violations.len();
        if self.max_cones.is_empty() {
            violations.push(FanViolation::NoMaximalCones);
            return false;
        }
        for cone in &self.max_cones {
            if cone.len() != self.n {
                violations.push(FanViolation::MaxConeNotFullDim {
                    cone: cone.clone(),
                    dim: cone.len(),
                });
            }
        }
        if violations.len() > before {
            return false;
        }
        let mut wall_cofaces: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (ci, cone) in self.max_cones.iter().enumerate() {
            for drop in 0..cone.len() {
                let wall: Vec<usize> = cone
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != drop)
                    .map(|(_, &r)| r)
                    .collect();
                wall_cofaces.entry(wall).or_default().push(ci);
            }
        }
        for (wall, cofaces) in &wall_cofaces {
            if cofaces.len() != 2 {
                violations.push(FanViolation::WallCofaceCount {
                    wall: wall.clone(),
                    count: cofaces.len(),
                });
            }
        }
        if violations.len() > before {
            return false;
        }
        // connectivity of the dual graph
        let mut seen = vec![false; self.max_cones.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for cofaces in wall_cofaces.values() {
                if cofaces.contains(&c) {
                    for &d in cofaces {
                        if !seen[d] {
                            seen[d] = true;
                            stack.push(d);
                        }
                    }
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            violations.push(FanViolation::DualGraphDisconnected);
            return false;
        }
        true
    }

    /// Exact check that two simplicial cones meet exactly in the cone on
    /// their common ray set: no point of the intersection may use a ray
    /// outside the common set with positive coefficient.
    fn pair_intersects_in_face(&self, s: &[usize], t: &[usize]) -> bool {
        let common: BTreeSet<usize> = s
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .intersection(&t.iter().copied().collect())
            .copied()
            .collect();
        for &i0 in s.iter().filter(|r| !common.contains(r)) {
            // columns: a_i for i in s \ {i0}, then b_j for j in t; rows: the
            // n coordinates of sum a_i r_i - sum b_j r_j = -r_{i0}
            let mut columns: Vec<Vec<BigRational>> = Vec::new();
            for &i in s.iter().filter(|&&i| i != i0) {
                columns.push(
                    self.rays[i]
                        .entries()
                        .iter()
                        .map(|e| BigRational::from(e.clone()))
                        .collect(),
                );
            }
            for &j in t {
                columns.push(
                    self.rays[j]
                        .entries()
                        .iter()
                        .map(|e| -BigRational::from(e.clone()))
                        .collect(),
                );
            }
            let rhs: Vec<BigRational> = self.rays[i0]
                .entries()
                .iter()
                .map(|e| -BigRational::from(e.clone()))
                .collect();
            let rows = (0..self.n)
                .map(|r| columns.iter().map(|c| c[r].clone()).collect::<Vec<_>>())
                .collect::<Vec<_>>();
            if feasible_nonneg(&rows, &rhs) {
                return false;
            }
        }
        true
    }

    fn cone_id(cone: &[usize]) -> String {
        if cone.is_empty() {
            "c".to_string()
        } else {
            let parts: Vec<String> = cone.iter().map(|i| i.to_string()).collect();
            format!("c{}", parts.join("-"))
        }
    }

    /// Characteristic data of the filtered ball of a complete fan: one
    /// stratum per cone with dimension `n - dim(cone)`, closure order dual
    /// to inclusion of cones, and isotropy the saturated span of the cone's
    /// rays (saturation index recorded as the stratum's defect). The ball
    /// minus its boundary skeleton deformation-retracts, so the top-strata
    /// homotopy condition is set.
    pub fn to_chardata(&self) -> Result<CharData, FanError> {
        let report = self.validate(true);
        if !report.is_valid() {
            return Err(FanError::Invalid(report));
        }
        let mut strata = Vec::new();
        let mut lambda = BTreeMap::new();
        let mut defects: BTreeMap<String, BigUint> = BTreeMap::new();
        for cone in &self.cones {
            let id = Fan::cone_id(cone);
            let rank = self.cone_rank(cone);
            strata.push(Stratum::new(id.clone(), self.n - rank));
            let gens = GeneratorSet::new(self.n, self.cone_rays(cone)).map_err(DataError::from)?;
            let (lat, index) = SaturatedLattice::saturation(&gens);
            lambda.insert(id.clone(), lat);
            defects.insert(id, index);
        }
        let mut pairs = Vec::new();
        for sigma in &self.cones {
            for rho in &self.cones {
                // rho a proper subset of sigma: the dual cell of sigma lies
                // in the closure of the dual cell of rho
                if sigma != rho && rho.iter().all(|r| sigma.contains(r)) {
                    pairs.push((Fan::cone_id(sigma), Fan::cone_id(rho)));
                }
            }
        }
        let poset = StratPoset::new(strata, &pairs)?;
        let data =
            CharData::new(self.n, poset, lambda, ChernClass::Zero, true)?.with_defects(defects)?;
        let out = data.validate();
        if !out.is_valid() {
            return Err(FanError::InvalidOutput(out));
        }
        Ok(data)
    }
}

/// Exact feasibility of `{x >= 0 : A x = b}` by phase-one simplex with
/// Bland's rule over rationals.
fn feasible_nonneg(a: &[Vec<BigRational>], b: &[BigRational]) -> bool {
    let m = a.len();
    let n0 = a.first().map_or(0, |r| r.len());
    // tableau: columns 0..n0 original, n0..n0+m artificial, last = rhs
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for i in 0..m {
        let negate = b[i] < BigRational::zero();
        let mut row: Vec<BigRational> = a[i]
            .iter()
            .map(|x| if negate { -x.clone() } else { x.clone() })
            .collect();
        for j in 0..m {
            row.push(if i == j {
                BigRational::one()
            } else {
                BigRational::zero()
            });
        }
        row.push(if negate { -b[i].clone() } else { b[i].clone() });
        t.push(row);
    }
    let cols = n0 + m;
    let mut basis: Vec<usize> = (0..m).map(|i| n0 + i).collect();
    loop {
        // reduced cost of column j: c_j - sum over artificial basic rows
        let reduced = |t: &[Vec<BigRational>], basis: &[usize], j: usize| -> BigRational {
            let c_j = if j >= n0 {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            let mut z = BigRational::zero();
            for (i, &bi) in basis.iter().enumerate() {
                if bi >= n0 {
                    z += &t[i][j];
                }
            }
            c_j - z
        };
        let entering = (0..cols).find(|&j| reduced(&t, &basis, j) < BigRational::zero());
        let Some(j) = entering else { break };
        // ratio test, Bland tie-break by smallest basis index
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for i in 0..m {
            if t[i][j] > BigRational::zero() {
                let ratio = &t[i][cols] / &t[i][j];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else { break };
        // pivot on (r, j)
        let p = t[r][j].clone();
        for x in t[r].iter_mut() {
            *x /= &p;
        }
        for i in 0..m {
            if i != r && !t[i][j].is_zero() {
                let f = t[i][j].clone();
                let row = t[r].clone();
                for (x, y) in t[i].iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
        basis[r] = j;
    }
    let objective: BigRational = basis
        .iter()
        .enumerate()
        .filter(|&(_, &bi)| bi >= n0)
        .map(|(i, _)| t[i][cols].clone())
        .sum();
    objective.is_zero()
}
