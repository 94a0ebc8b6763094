//! Finite stratified posets: the face category of a compact stratified
//! orbit space, with structural validation and isomorphism enumeration.
//!
//! The order relation `a <= b` means "a lies in the closure of b". Users
//! supply covering pairs or arbitrary comparable pairs; construction stores
//! the full reflexive-transitive closure. Each element is by definition one
//! connected stratum; merging two components into one element cannot be
//! detected here.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("duplicate stratum id {0:?}")]
    DuplicateId(String),
    #[error("unknown stratum id {0:?}")]
    UnknownId(String),
}

/// One stratum: an identifier plus its (orbit-space) dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Stratum {
    pub id: String,
    pub dim: usize,
}

impl Stratum {
    pub fn new(id: impl Into<String>, dim: usize) -> Self {
        Stratum { id: id.into(), dim }
    }
}

/// Structural defects reported by [`StratPoset::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PosetViolation {
    /// `a <= b` and `b <= a` for distinct strata.
    AntisymmetryBroken { a: String, b: String },
    /// `lower < upper` strictly but `dim(lower) >= dim(upper)`.
    DimNotIncreasing { lower: String, upper: String },
    /// A maximal element whose dimension is below the top dimension.
    MaximalNotTopDim { id: String },
    /// A stratum not below any top-dimensional stratum (density surrogate).
    NotBelowTopStratum { id: String },
}

impl fmt::Display for PosetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosetViolation::AntisymmetryBroken { a, b } => {
                write!(f, "antisymmetry broken: {a} <= {b} and {b} <= {a}")
            }
            PosetViolation::DimNotIncreasing { lower, upper } => {
                write!(f, "dims not strictly increasing along {lower} < {upper}")
            }
            PosetViolation::MaximalNotTopDim { id } => {
                write!(f, "maximal stratum {id} is not of top dimension")
            }
            PosetViolation::NotBelowTopStratum { id } => {
                write!(f, "stratum {id} is not below any top-dimensional stratum")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PosetReport {
    pub violations: Vec<PosetViolation>,
}

impl PosetReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Finite poset of strata with integer dimensions, stored as its full
/// reflexive-transitive closure. Immutable after construction.
#[derive(Clone, PartialEq, Eq)]
pub struct StratPoset {
    strata: Vec<Stratum>, // sorted by id
    leq: Vec<Vec<bool>>,  // leq[i][j]: strata[i] <= strata[j]
}

impl StratPoset {
    /// Builds the poset from strata and comparable pairs `(lower, upper)`,
    /// closing the relation transitively. Order-theoretic defects are left to
    /// [`validate`](Self::validate); only structural errors abort.
    pub fn new(mut strata: Vec<Stratum>, pairs: &[(String, String)]) -> Result<Self, PosetError> {
        strata.sort_by(|a, b| a.id.cmp(&b.id));
        for w in strata.windows(2) {
            if w[0].id == w[1].id {
                return Err(PosetError::DuplicateId(w[0].id.clone()));
            }
        }
        let index: BTreeMap<&str, usize> = strata
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.as_str(), i))
            .collect();
        let n = strata.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (lo, hi) in pairs {
            let &i = index
                .get(lo.as_str())
                .ok_or_else(|| PosetError::UnknownId(lo.clone()))?;
            let &j = index
                .get(hi.as_str())
                .ok_or_else(|| PosetError::UnknownId(hi.clone()))?;
            leq[i][j] = true;
        }
        // Warshall closure
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        Ok(StratPoset { strata, leq })
    }

    pub fn empty() -> Self {
        StratPoset {
            strata: Vec::new(),
            leq: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    /// Strata in id order.
    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.strata.iter().map(|s| s.id.as_str())
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.index_of(id).is_some()
    }

    fn index_of(&self, id: &str) -> Option<usize> {
        self.strata.binary_search_by(|s| s.id.as_str().cmp(id)).ok()
    }

    pub fn dim_of(&self, id: &str) -> Option<usize> {
        self.index_of(id).map(|i| self.strata[i].dim)
    }

    /// `a <= b`, i.e. `a` lies in the closure of `b`. False for unknown ids.
    pub fn leq(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.leq[i][j],
            _ => false,
        }
    }

    pub fn min_dim(&self) -> Option<usize> {
        self.strata.iter().map(|s| s.dim).min()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.strata.iter().map(|s| s.dim).max()
    }

    /// Lowest stratum dimension (`l`); 0 for the empty poset.
    pub fn l(&self) -> usize {
        self.min_dim().unwrap_or(0)
    }

    /// Length of the filtration (`n` = max dim - min dim); 0 when empty.
    pub fn length(&self) -> usize {
        match (self.min_dim(), self.max_dim()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0,
        }
    }

    /// `max_dim - dim(id)`.
    pub fn codim_of(&self, id: &str) -> Option<usize> {
        let d = self.dim_of(id)?;
        Some(self.max_dim().expect("nonempty") - d)
    }

    fn strictly_less(&self, i: usize, j: usize) -> bool {
        i != j && self.leq[i][j]
    }

    /// Ids of the covers of `id`: minimal strata strictly above it.
    pub fn covers_of(&self, id: &str) -> Vec<&str> {
        let Some(i) = self.index_of(id) else {
            return Vec::new();
        };
        let ups: Vec<usize> = (0..self.len())
            .filter(|&j| self.strictly_less(i, j))
            .collect();
        ups.iter()
            .copied()
            .filter(|&j| !ups.iter().any(|&k| k != j && self.strictly_less(k, j)))
            .map(|j| self.strata[j].id.as_str())
            .collect()
    }

    pub fn up_degree(&self, id: &str) -> usize {
        let Some(i) = self.index_of(id) else { return 0 };
        (0..self.len())
            .filter(|&j| self.strictly_less(i, j))
            .count()
    }

    pub fn down_degree(&self, id: &str) -> usize {
        let Some(i) = self.index_of(id) else { return 0 };
        (0..self.len())
            .filter(|&j| self.strictly_less(j, i))
            .count()
    }

    /// Checks the stratified-poset invariants: antisymmetry, strict dimension
    /// growth along the strict order, maximal elements of top dimension, and
    /// every stratum below a top-dimensional one. Never aborts; returns the
    /// full violation list.
    pub fn validate(&self) -> PosetReport {
        let mut violations = Vec::new();
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.leq[i][j] && self.leq[j][i] {
                    violations.push(PosetViolation::AntisymmetryBroken {
                        a: self.strata[i].id.clone(),
                        b: self.strata[j].id.clone(),
                    });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if self.strictly_less(i, j)
                    && !self.leq[j][i]
                    && self.strata[i].dim >= self.strata[j].dim
                {
                    violations.push(PosetViolation::DimNotIncreasing {
                        lower: self.strata[i].id.clone(),
                        upper: self.strata[j].id.clone(),
                    });
                }
            }
        }
        if let Some(top) = self.max_dim() {
            for i in 0..n {
                let maximal = !(0..n).any(|j| self.strictly_less(i, j));
                if maximal && self.strata[i].dim < top {
                    violations.push(PosetViolation::MaximalNotTopDim {
                        id: self.strata[i].id.clone(),
                    });
                }
                let below_top = (0..n).any(|j| self.leq[i][j] && self.strata[j].dim == top);
                if !below_top {
                    violations.push(PosetViolation::NotBelowTopStratum {
                        id: self.strata[i].id.clone(),
                    });
                }
            }
        }
        PosetReport { violations }
    }

    /// Poset of the strata strictly above `s`, with dimensions shifted by
    /// `dim(s) + 1`: the stratification of the link of a point of `s`. Empty
    /// when `s` is maximal.
    pub fn upper_set(&self, s: &str) -> Result<StratPoset, PosetError> {
        let i = self
            .index_of(s)
            .ok_or_else(|| PosetError::UnknownId(s.to_string()))?;
        let base = self.strata[i].dim;
        let keep: Vec<usize> = (0..self.len())
            .filter(|&j| self.strictly_less(i, j))
            .collect();
        let strata = keep
            .iter()
            .map(|&j| Stratum {
                id: self.strata[j].id.clone(),
                dim: self.strata[j].dim.saturating_sub(base + 1),
            })
            .collect();
        let mut pairs = Vec::new();
        for &a in &keep {
            for &b in &keep {
                if self.leq[a][b] {
                    pairs.push((self.strata[a].id.clone(), self.strata[b].id.clone()));
                }
            }
        }
        StratPoset::new(strata, &pairs)
    }

    /// Lazily yields every dimension-preserving order isomorphism onto
    /// `other`, each exactly once, in lexicographic order of the image ids
    /// along this poset's id-sorted strata.
    pub fn enumerate_isos<'a>(&'a self, other: &'a StratPoset) -> IsoIter<'a> {
        IsoIter::new(self, other)
    }
}

impl fmt::Debug for StratPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StratPoset({} strata)", self.len())
    }
}

/// A dimension-preserving order isomorphism between two posets, stored as an
/// id bijection.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PosetIso {
    map: BTreeMap<String, String>,
}

impl PosetIso {
    pub fn new(map: BTreeMap<String, String>) -> Self {
        PosetIso { map }
    }

    pub fn identity_on(p: &StratPoset) -> Self {
        PosetIso {
            map: p.ids().map(|s| (s.to_string(), s.to_string())).collect(),
        }
    }

    pub fn mapping(&self) -> &BTreeMap<String, String> {
        &self.map
    }

    pub fn apply(&self, id: &str) -> Option<&str> {
        self.map.get(id).map(|s| s.as_str())
    }

    pub fn inverse(&self) -> PosetIso {
        PosetIso {
            map: self
                .map
                .iter()
                .map(|(k, v)| (v.clone(), k.clone()))
                .collect(),
        }
    }

    /// `other` after `self`.
    pub fn then(&self, other: &PosetIso) -> Option<PosetIso> {
        let mut map = BTreeMap::new();
        for (k, v) in &self.map {
            map.insert(k.clone(), other.map.get(v)?.clone());
        }
        Some(PosetIso { map })
    }
}

/// Backtracking enumerator for dimension-preserving order isomorphisms.
///
/// Strata of the source are assigned in id order; candidates are pruned by
/// the profile (dim, down-degree, up-degree) and checked for two-sided order
/// consistency against all earlier assignments. Restartable and
/// side-effect-free.
pub struct IsoIter<'a> {
    p: &'a StratPoset,
    q: &'a StratPoset,
    cands: Vec<Vec<usize>>, // per source index, profile-compatible targets
    choice: Vec<usize>,     // choice[d]: index into cands[d]
    used: Vec<bool>,
    state: IterState,
}

enum IterState {
    Fresh,
    Mid,
    Done,
}

impl<'a> IsoIter<'a> {
    fn new(p: &'a StratPoset, q: &'a StratPoset) -> Self {
        let n = p.len();
        let mut cands = Vec::with_capacity(n);
        let feasible = n == q.len();
        if feasible {
            let profile = |poset: &StratPoset, i: usize| {
                let id = poset.strata()[i].id.as_str();
                (
                    poset.strata()[i].dim,
                    poset.down_degree(id),
                    poset.up_degree(id),
                )
            };
            for i in 0..n {
                let want = profile(p, i);
                let list: Vec<usize> = (0..n).filter(|&j| profile(q, j) == want).collect();
                cands.push(list);
            }
        }
        let state = if feasible && cands.iter().all(|c| !c.is_empty()) {
            IterState::Fresh
        } else {
            IterState::Done
        };
        IsoIter {
            p,
            q,
            cands,
            choice: Vec::new(),
            used: vec![false; q.len()],
            state,
        }
    }

    fn compatible(&self, depth: usize, qi: usize) -> bool {
        for (d, &c) in self.choice.iter().enumerate().take(depth) {
            let qd = self.cands[d][c];
            if self.p.leq[d][depth] != self.q.leq[qd][qi]
                || self.p.leq[depth][d] != self.q.leq[qi][qd]
            {
                return false;
            }
        }
        true
    }

    fn emit(&self) -> PosetIso {
        let map = self
            .choice
            .iter()
            .enumerate()
            .map(|(d, &c)| {
                (
                    self.p.strata()[d].id.clone(),
                    self.q.strata()[self.cands[d][c]].id.clone(),
                )
            })
            .collect();
        PosetIso { map }
    }
}

impl<'a> Iterator for IsoIter<'a> {
    type Item = PosetIso;

    fn next(&mut self) -> Option<PosetIso> {
        let n = self.p.len();
        let mut start = match self.state {
            IterState::Done => return None,
            IterState::Fresh => {
                self.state = IterState::Mid;
                if n == 0 {
                    self.state = IterState::Done;
                    return Some(PosetIso {
                        map: BTreeMap::new(),
                    });
                }
                0
            }
            IterState::Mid => {
                // backtrack off the previously emitted full assignment
                let c = self.choice.pop().expect("previous emission");
                self.used[self.cands[self.choice.len()][c]] = false;
                c + 1
            }
        };
        loop {
            let depth = self.choice.len();
            let mut advanced = false;
            for c in start..self.cands[depth].len() {
                let qi = self.cands[depth][c];
                if !self.used[qi] && self.compatible(depth, qi) {
                    self.choice.push(c);
                    self.used[qi] = true;
                    advanced = true;
                    break;
                }
            }
            if advanced {
                if self.choice.len() == n {
                    return Some(self.emit());
                }
                start = 0;
            } else {
                // exhausted this level; pop the previous choice
                match self.choice.pop() {
                    Some(c) => {
                        self.used[self.cands[self.choice.len()][c]] = false;
                        start = c + 1;
                    }
                    None => {
                        self.state = IterState::Done;
                        return None;
                    }
                }
            }
        }
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::{square, triangle};
    use super::*;

    #[test]
    fn triangle_validates() {
        assert!(triangle().validate().is_valid());
    }

    #[test]
    fn single_point_validates() {
        let p = StratPoset::new(vec![Stratum::new("pt", 0)], &[]).unwrap();
        assert!(p.validate().is_valid());
    }

    #[test]
    fn decreasing_dims_flagged() {
        let p = StratPoset::new(
            vec![Stratum::new("a", 2), Stratum::new("b", 1)],
            &[("a".into(), "b".into())],
        )
        .unwrap();
        let report = p.validate();
        assert!(report.violations.iter().any(
            |v| matches!(v, PosetViolation::DimNotIncreasing { lower, upper }
                if lower == "a" && upper == "b")
        ));
    }

    #[test]
    fn cycles_are_flagged_as_antisymmetry_violations() {
        let p = StratPoset::new(
            vec![Stratum::new("a", 0), Stratum::new("b", 0)],
            &[("a".into(), "b".into()), ("b".into(), "a".into())],
        )
        .unwrap();
        let report = p.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, PosetViolation::AntisymmetryBroken { .. })));
    }

    #[test]
    fn transitive_closure_is_computed() {
        let p = StratPoset::new(
            vec![
                Stratum::new("a", 0),
                Stratum::new("b", 1),
                Stratum::new("c", 2),
            ],
            &[("a".into(), "b".into()), ("b".into(), "c".into())],
        )
        .unwrap();
        assert!(p.leq("a", "c"));
        assert!(!p.leq("c", "a"));
    }

    #[test]
    fn upper_set_of_vertex_is_segment() {
        let t = triangle();
        let link = t.upper_set("v1").unwrap();
        // e2, e3 become endpoints (dim 0), P the interior (dim 1)
        assert_eq!(link.len(), 3);
        assert_eq!(link.dim_of("e2"), Some(0));
        assert_eq!(link.dim_of("e3"), Some(0));
        assert_eq!(link.dim_of("P"), Some(1));
        assert!(link.leq("e2", "P") && link.leq("e3", "P"));
        assert!(!link.leq("e2", "e3"));
        assert!(link.validate().is_valid());
    }

    #[test]
    fn upper_set_of_edge_is_point() {
        let t = triangle();
        let link = t.upper_set("e1").unwrap();
        assert_eq!(link.len(), 1);
        assert_eq!(link.dim_of("P"), Some(0));
    }

    #[test]
    fn upper_set_of_top_is_empty() {
        let t = triangle();
        assert!(t.upper_set("P").unwrap().is_empty());
    }

    #[test]
    fn upper_set_unknown_id() {
        assert_eq!(
            triangle().upper_set("nope").unwrap_err(),
            PosetError::UnknownId("nope".into())
        );
    }

    #[test]
    fn triangle_self_isos_form_s3() {
        let t = triangle();
        let isos: Vec<_> = t.enumerate_isos(&t).collect();
        assert_eq!(isos.len(), 6);
        assert!(isos.contains(&PosetIso::identity_on(&t)));
        // group closure
        for a in &isos {
            for b in &isos {
                let c = a.then(b).unwrap();
                assert!(isos.contains(&c));
            }
        }
        // deterministic order, identical on re-enumeration
        let again: Vec<_> = t.enumerate_isos(&t).collect();
        assert_eq!(isos, again);
    }

    #[test]
    fn triangle_square_no_isos() {
        let t = triangle();
        let s = square();
        assert_eq!(t.enumerate_isos(&s).count(), 0);
    }

    #[test]
    fn point_to_point_identity_only() {
        let p = StratPoset::new(vec![Stratum::new("x", 0)], &[]).unwrap();
        let q = StratPoset::new(vec![Stratum::new("y", 0)], &[]).unwrap();
        let isos: Vec<_> = p.enumerate_isos(&q).collect();
        assert_eq!(isos.len(), 1);
        assert_eq!(isos[0].apply("x"), Some("y"));
    }

    #[test]
    fn upper_set_dims_shift_by_codim() {
        let t = triangle();
        for s in ["v1", "v2", "v3", "e1", "e2", "e3"] {
            let link = t.upper_set(s).unwrap();
            assert!(link.validate().is_valid());
            let expected = t.max_dim().unwrap() - t.dim_of(s).unwrap() - 1;
            assert_eq!(link.max_dim(), Some(expected));
        }
    }
}
